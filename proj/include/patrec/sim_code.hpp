#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The patrec Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "patrec/errors.hpp"
#include "patrec/info_core.hpp"
#include "patrec/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

// Random-coding recognition scheme for the binary environment: typical-set
// codebooks, sequential memory and sensory encoders, a two-stage classifier
// over the active memory codewords, and per-event error accounting.
namespace patrec::sim {

/// Unpacked sequence of symbols, one byte per position.
using Sequence = std::vector<std::uint8_t>;

/// Binary sequence of length n <= 24, bit k holding position k.
using Word     = std::uint32_t;
using Codebook = std::vector<Word>;

inline constexpr std::size_t kMinBlockLength = 4;
inline constexpr std::size_t kMaxBlockLength = 24;
inline constexpr double      kMaxLog2Size    = 24.0;

inline bool within_band(std::size_t count, std::size_t n, double p, double delta)
{
  return std::abs(static_cast<double>(count) / static_cast<double>(n) - p) <= delta;
}

/// Strong joint typicality: every symbol-tuple frequency lies within delta of
/// its probability under `joint`. Sequences are in the variable order of
/// `joint`.
inline bool typicality_test(const std::vector<Sequence> &sequences, const JointPMF &joint, double delta)
{
  const auto &sizes = joint.alphabet_sizes();
  patrec::detail::require(sequences.size() == sizes.size(), "typicality_test: one sequence per variable");
  patrec::detail::require(!sequences.empty() && !sequences.front().empty(), "typicality_test: empty sequence");
  const std::size_t n = sequences.front().size();
  for (std::size_t v = 0; v < sequences.size(); ++v)
  {
    patrec::detail::require(sequences[v].size() == n, "typicality_test: sequence lengths differ");
    for (std::uint8_t s : sequences[v])
    {
      patrec::detail::require(s < sizes[v], "typicality_test: symbol out of range");
    }
  }
  std::vector<std::size_t> counts(joint.probs().size(), 0);
  std::vector<std::size_t> symbols(sequences.size());
  for (std::size_t k = 0; k < n; ++k)
  {
    for (std::size_t v = 0; v < sequences.size(); ++v)
    {
      symbols[v] = sequences[v][k];
    }
    ++counts[joint.flat_index(symbols)];
  }
  for (std::size_t c = 0; c < counts.size(); ++c)
  {
    if (!within_band(counts[c], n, joint.probs()[c], delta))
    {
      return false;
    }
  }
  return true;
}

/// iid draws from a one-variable pmf, rejected until typical. The accepted
/// sequence is distributed as the iid law restricted to the typical set.
inline Sequence sample_typical(const JointPMF &marginal,
                               std::size_t     n,
                               double          delta,
                               CounterRng     &rng,
                               std::size_t     max_rejection = 1'000'000)
{
  patrec::detail::require(marginal.names().size() == 1, "sample_typical: marginal must be over one variable");
  patrec::detail::require(n >= 1, "sample_typical: n must be positive");
  const auto &p = marginal.probs();
  Sequence    seq(n);
  for (std::size_t attempt = 0; attempt < max_rejection; ++attempt)
  {
    for (auto &s : seq)
    {
      const double u   = rng.uniform();
      double       acc = 0.0;
      std::size_t  k   = 0;
      for (; k + 1 < p.size(); ++k)
      {
        acc += p[k];
        if (u < acc)
        {
          break;
        }
      }
      s = static_cast<std::uint8_t>(k);
    }
    if (typicality_test({seq}, marginal, delta))
    {
      return seq;
    }
  }
  throw SamplingFailure("sample_typical: rejection cap exceeded");
}

inline Word word_mask(std::size_t n) { return n >= 32 ? ~Word{0} : (Word{1} << n) - 1; }

inline Sequence unpack(Word w, std::size_t n)
{
  Sequence s(n);
  for (std::size_t k = 0; k < n; ++k)
  {
    s[k] = static_cast<std::uint8_t>((w >> k) & 1U);
  }
  return s;
}

inline Word pack(const Sequence &s)
{
  Word w = 0;
  for (std::size_t k = 0; k < s.size(); ++k)
  {
    w |= static_cast<Word>(s[k] & 1U) << k;
  }
  return w;
}

/// Typicality of one binary word against a two-symbol marginal.
class WordTypicality
{
public:
  WordTypicality(const JointPMF &marginal, std::size_t n, double delta)
    : n_(n)
    , p_one_(marginal.probs().at(1))
    , allowed_(n + 1)
  {
    patrec::detail::require(marginal.alphabet_sizes().size() == 1 && marginal.alphabet_sizes()[0] == 2,
                            "WordTypicality: binary marginal required");
    for (std::size_t ones = 0; ones <= n; ++ones)
    {
      allowed_[ones] = within_band(n - ones, n, marginal.probs()[0], delta) &&
                       within_band(ones, n, marginal.probs()[1], delta);
    }
  }

  bool operator()(Word a) const { return allowed_[static_cast<std::size_t>(std::popcount(a))]; }

  std::size_t n() const { return n_; }
  double      p_one() const { return p_one_; }

private:
  std::size_t       n_;
  double            p_one_;
  std::vector<bool> allowed_;
};

/// Joint typicality of two aligned binary words against a 2x2 pmf.
class PairTypicality
{
public:
  PairTypicality(const JointPMF &pair, std::size_t n, double delta)
    : n_(n)
    , mask_(word_mask(n))
  {
    patrec::detail::require(pair.alphabet_sizes() == std::vector<std::size_t>{2, 2},
                            "PairTypicality: pmf over two binary variables required");
    for (std::size_t cell = 0; cell < 4; ++cell)
    {
      allowed_[cell].resize(n + 1);
      for (std::size_t c = 0; c <= n; ++c)
      {
        allowed_[cell][c] = within_band(c, n, pair.probs()[cell], delta);
      }
    }
  }

  bool operator()(Word a, Word b) const
  {
    const auto n11 = static_cast<std::size_t>(std::popcount(a & b));
    const auto n10 = static_cast<std::size_t>(std::popcount(a & ~b & mask_));
    const auto n01 = static_cast<std::size_t>(std::popcount(~a & b & mask_));
    const auto n00 = n_ - n11 - n10 - n01;
    return allowed_[3][n11] && allowed_[2][n10] && allowed_[1][n01] && allowed_[0][n00];
  }

private:
  std::size_t                      n_;
  Word                             mask_;
  std::array<std::vector<bool>, 4> allowed_;
};

/// Joint typicality of aligned binary words against a pmf over as many
/// binary variables (variable k is bit k of the cell index, most significant
/// first as in JointPMF's row-major layout).
inline bool words_typical(const std::vector<Word> &words, const JointPMF &joint, std::size_t n, double delta)
{
  const std::size_t          vars = words.size();
  std::vector<std::size_t>   counts(std::size_t{1} << vars, 0);
  for (std::size_t k = 0; k < n; ++k)
  {
    std::size_t cell = 0;
    for (std::size_t v = 0; v < vars; ++v)
    {
      cell = (cell << 1) | ((words[v] >> k) & 1U);
    }
    ++counts[cell];
  }
  for (std::size_t c = 0; c < counts.size(); ++c)
  {
    if (!within_band(counts[c], n, joint.probs()[c], delta))
    {
      return false;
    }
  }
  return true;
}

/// Packed-word counterpart of sample_typical for a binary marginal.
inline Word sample_typical_word(const WordTypicality &typical, CounterRng &rng, std::size_t max_rejection)
{
  const Word mask = word_mask(typical.n());
  for (std::size_t attempt = 0; attempt < max_rejection; ++attempt)
  {
    Word w = 0;
    if (typical.p_one() == 0.5)
    {
      w = static_cast<Word>(rng()) & mask;
    }
    else
    {
      for (std::size_t k = 0; k < typical.n(); ++k)
      {
        w |= static_cast<Word>(rng.bernoulli(typical.p_one())) << k;
      }
    }
    if (typical(w))
    {
      return w;
    }
  }
  throw SamplingFailure("sample_typical: rejection cap exceeded");
}

/// Block length, channel and test-channel crossovers, rates and typicality
/// slack of one code ensemble. Codebook sizes are round(2^(nR)), at least 1.
struct CodeConfig
{
  std::size_t   n             = 8;
  double        q             = 0.2;
  double        qx            = 0.0;
  double        qy            = 0.0;
  double        rc            = 0.1;
  double        rx            = 1.0;
  double        ry            = 1.0;
  double        delta         = 0.1;
  std::uint64_t seed          = 0;
  std::size_t   max_rejection = 1'000'000;

  static double default_delta(std::size_t n) { return n <= 12 ? 0.1 : 0.05; }

  /// Test channels chosen so that I(X;U) = rx and I(Y;V) = ry.
  static CodeConfig from_rates(std::size_t n, double q, double rc, double rx, double ry, std::uint64_t seed)
  {
    patrec::detail::require(rx >= 0.0 && rx <= 1.0 && ry >= 0.0 && ry <= 1.0,
                            "CodeConfig: rates must lie in [0, 1] to derive test channels");
    CodeConfig cfg;
    cfg.n     = n;
    cfg.q     = q;
    cfg.qx    = inverse_binary_entropy(1.0 - rx);
    cfg.qy    = inverse_binary_entropy(1.0 - ry);
    cfg.rc    = rc;
    cfg.rx    = rx;
    cfg.ry    = ry;
    cfg.delta = default_delta(n);
    cfg.seed  = seed;
    return cfg;
  }

  static std::size_t codebook_size(std::size_t n, double rate)
  {
    return static_cast<std::size_t>(std::max<long long>(1, std::llround(std::exp2(static_cast<double>(n) * rate))));
  }

  std::size_t mc() const { return codebook_size(n, rc); }
  std::size_t mx() const { return codebook_size(n, rx); }
  std::size_t my() const { return codebook_size(n, ry); }

  void validate() const
  {
    patrec::detail::require(n >= kMinBlockLength && n <= kMaxBlockLength, "CodeConfig: n must lie in [4, 24]");
    for (double p : {q, qx, qy})
    {
      patrec::detail::require(p >= 0.0 && p <= 0.5, "CodeConfig: crossovers must lie in [0, 1/2]");
    }
    for (double r : {rc, rx, ry})
    {
      patrec::detail::require(std::isfinite(r) && r >= 0.0, "CodeConfig: rates must be nonnegative");
      patrec::detail::require(static_cast<double>(n) * r <= kMaxLog2Size,
                              "CodeConfig: n * rate must not exceed 24 (codebook guard)");
    }
    patrec::detail::require(delta > 0.0 && delta < 0.5, "CodeConfig: delta must lie in (0, 1/2)");
    patrec::detail::require(max_rejection >= 1, "CodeConfig: max_rejection must be positive");
  }

  /// p(x, y, u, v) for a uniform pattern and the three BSCs, over (X, Y, U, V).
  JointPMF joint() const
  {
    return build_chain_pmf(make_pmf("X", {0.5, 0.5}), StochasticMatrix::bsc(q), StochasticMatrix::bsc(qx),
                           StochasticMatrix::bsc(qy));
  }
};

/// Typicality tests of one configuration, built once and shared by trials.
struct Model
{
  explicit Model(const CodeConfig &cfg)
    : joint(cfg.joint())
    , xuyv(joint.marginal_pmf({"X", "U", "Y", "V"}))
    , u_typical(joint.marginal_pmf({"U"}), cfg.n, cfg.delta)
    , v_typical(joint.marginal_pmf({"V"}), cfg.n, cfg.delta)
    , xy(joint.marginal_pmf({"X", "Y"}), cfg.n, cfg.delta)
    , xu(joint.marginal_pmf({"X", "U"}), cfg.n, cfg.delta)
    , yv(joint.marginal_pmf({"Y", "V"}), cfg.n, cfg.delta)
    , uv(joint.marginal_pmf({"U", "V"}), cfg.n, cfg.delta)
    , n(cfg.n)
    , delta(cfg.delta)
  {}

  JointPMF       joint;
  JointPMF       xuyv;
  WordTypicality u_typical;
  WordTypicality v_typical;
  PairTypicality xy;
  PairTypicality xu;
  PairTypicality yv;
  PairTypicality uv;
  std::size_t    n;
  double         delta;
};

struct Codebooks
{
  Codebook memory;   ///< B_u
  Codebook sensory;  ///< B_v
};

inline Codebooks generate_codebooks(const CodeConfig &cfg, const Model &model, CounterRng &rng)
{
  Codebooks books;
  books.memory.resize(cfg.mx());
  books.sensory.resize(cfg.my());
  for (auto &w : books.memory)
  {
    w = sample_typical_word(model.u_typical, rng, cfg.max_rejection);
  }
  for (auto &w : books.sensory)
  {
    w = sample_typical_word(model.v_typical, rng, cfg.max_rejection);
  }
  return books;
}

/// Result of a sequential codebook search. On failure the index falls back
/// to the first codeword (index 0).
struct EncodeResult
{
  std::size_t index  = 0;
  bool        failed = false;
};

inline EncodeResult first_typical(const Codebook &book, Word seq, const PairTypicality &typical)
{
  for (std::size_t i = 0; i < book.size(); ++i)
  {
    if (typical(seq, book[i]))
    {
      return {i, false};
    }
  }
  return {0, true};
}

/// First memory codeword jointly typical with the pattern; failure is E1.
inline EncodeResult memory_encode(const Codebook &memory, Word pattern, const PairTypicality &xu)
{
  return first_typical(memory, pattern, xu);
}

/// First sensory codeword jointly typical with the observation; failure is E3.
inline EncodeResult sensory_encode(const Codebook &sensory, Word observation, const PairTypicality &yv)
{
  return first_typical(sensory, observation, yv);
}

/// True iff some memory index is assigned to two or more patterns.
inline bool detect_collision(const std::vector<std::size_t> &assignments)
{
  std::vector<std::size_t> sorted(assignments);
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

struct ClassifyResult
{
  std::size_t m_hat     = 0;
  bool        no_match  = false;  ///< E4
  bool        ambiguous = false;  ///< E5
};

/// Searches the active memory codewords (indices present in `assignments`) in
/// ascending order for those jointly typical with the sensory codeword. A
/// unique match gives m_hat; otherwise m_hat falls back to 0.
inline ClassifyResult classify(const Codebook                 &memory,
                               const std::vector<std::size_t> &assignments,
                               Word                            sensory_codeword,
                               const PairTypicality           &uv)
{
  std::vector<std::size_t> active(assignments);
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  ClassifyResult result;
  std::size_t    matches = 0;
  for (std::size_t i : active)
  {
    if (uv(memory.at(i), sensory_codeword))
    {
      if (++matches == 1)
      {
        result.m_hat = i;
      }
    }
  }
  result.no_match  = matches == 0;
  result.ambiguous = matches > 1;
  if (matches != 1)
  {
    result.m_hat = 0;
  }
  return result;
}

/// Label of the first stored pair whose memory index equals m_hat.
inline std::optional<std::size_t> lookup_label(const std::vector<std::size_t> &assignments, std::size_t m_hat)
{
  for (std::size_t w = 0; w < assignments.size(); ++w)
  {
    if (assignments[w] == m_hat)
    {
      return w;
    }
  }
  return std::nullopt;
}

enum class Event
{
  ok,
  e0,
  e1,
  e2,
  e3,
  e4,
  e5,
  sampling_failure
};

inline const char *event_name(Event e)
{
  switch (e)
  {
  case Event::ok:
    return "OK";
  case Event::e0:
    return "E0";
  case Event::e1:
    return "E1";
  case Event::e2:
    return "E2";
  case Event::e3:
    return "E3";
  case Event::e4:
    return "E4";
  case Event::e5:
    return "E5";
  case Event::sampling_failure:
    return "sampling_failure";
  }
  return "";
}

/// One recognition attempt. w_hat is left empty when the outcome is already
/// decided without it (m_hat differs from m(w)) or no stored pair carries
/// m_hat.
struct TrialOutcome
{
  std::size_t                selected_w = 0;
  std::size_t                m_assigned = 0;
  std::size_t                mu         = 0;
  std::size_t                m_hat      = 0;
  std::optional<std::size_t> w_hat;
  Event                      event = Event::ok;
};

/// Everything drawn once per code: codebooks and the labelled training set.
struct TrialCode
{
  Codebooks         books;
  std::vector<Word> patterns;  ///< X(w), w = 0 .. M_c - 1
};

inline TrialCode draw_code(const CodeConfig &cfg, const Model &model, CounterRng &rng)
{
  TrialCode code;
  code.books = generate_codebooks(cfg, model, rng);
  code.patterns.resize(cfg.mc());
  const Word mask = word_mask(cfg.n);
  for (auto &x : code.patterns)
  {
    x = static_cast<Word>(rng()) & mask;
  }
  return code;
}

struct Observation
{
  std::size_t w = 0;
  Word        y = 0;
};

inline Observation draw_observation(const CodeConfig &cfg, std::size_t mc, const TrialCode &code, CounterRng &rng)
{
  Observation obs;
  obs.w      = static_cast<std::size_t>(rng.below(mc));
  Word noise = 0;
  for (std::size_t k = 0; k < cfg.n; ++k)
  {
    noise |= static_cast<Word>(rng.bernoulli(cfg.q)) << k;
  }
  obs.y = code.patterns[obs.w] ^ noise;
  return obs;
}

namespace detail {

struct Facts
{
  std::size_t                w;
  EncodeResult               enc_w;
  EncodeResult               sens;
  ClassifyResult             cls;
  std::optional<std::size_t> w_hat;
  bool                       success;
};

// First failing event in the order E0 .. E5 of the nested definitions. E2 is
// a pattern other than w typical with U(m(w)), or the label lookup returning
// an earlier pattern that shares m(w). E4 covers a non-typical 4-tuple and a
// true codeword not typical with the sensory codeword; E5 is the remainder.
template <class OtherTypicalWithTrue>
Event attribute(const Model &model, const TrialCode &code, const Observation &obs, const Facts &f,
                OtherTypicalWithTrue &&other_typical_with_true)
{
  if (f.success)
  {
    return Event::ok;
  }
  const Word x = code.patterns[obs.w];
  if (!model.xy(x, obs.y))
  {
    return Event::e0;
  }
  if (f.enc_w.failed)
  {
    return Event::e1;
  }
  const bool lookup_collision = f.cls.m_hat == f.enc_w.index && f.w_hat != obs.w;
  if (lookup_collision || other_typical_with_true())
  {
    return Event::e2;
  }
  if (f.sens.failed)
  {
    return Event::e3;
  }
  const Word u = code.books.memory[f.enc_w.index];
  const Word v = code.books.sensory[f.sens.index];
  if (!words_typical({x, u, obs.y, v}, model.xuyv, model.n, model.delta) || !model.uv(u, v))
  {
    return Event::e4;
  }
  return Event::e5;
}

}  // namespace detail

/// Eager evaluation: every training pattern is encoded and the classifier,
/// collision detector and label lookup run on the full stored set.
inline TrialOutcome evaluate_reference(const Model &model, const TrialCode &code, const Observation &obs)
{
  std::vector<std::size_t> assignments(code.patterns.size());
  std::vector<EncodeResult> encodings(code.patterns.size());
  for (std::size_t w = 0; w < code.patterns.size(); ++w)
  {
    encodings[w]   = memory_encode(code.books.memory, code.patterns[w], model.xu);
    assignments[w] = encodings[w].index;
  }
  detail::Facts f;
  f.w     = obs.w;
  f.enc_w = encodings[obs.w];
  f.sens  = sensory_encode(code.books.sensory, obs.y, model.yv);
  f.cls   = classify(code.books.memory, assignments, code.books.sensory[f.sens.index], model.uv);
  f.w_hat = lookup_label(assignments, f.cls.m_hat);
  f.success = f.cls.m_hat == f.enc_w.index && f.w_hat == obs.w;

  TrialOutcome out;
  out.selected_w = obs.w;
  out.m_assigned = f.enc_w.index;
  out.mu         = f.sens.index;
  out.m_hat      = f.cls.m_hat;
  out.w_hat      = f.w_hat;
  out.event      = detail::attribute(model, code, obs, f, [&] {
    const Word u = code.books.memory[f.enc_w.index];
    for (std::size_t w = 0; w < code.patterns.size(); ++w)
    {
      if (w != obs.w && model.xu(code.patterns[w], u))
      {
        return true;
      }
    }
    return false;
  });
  return out;
}

/// Same decisions as evaluate_reference, computing memory assignments only
/// on demand. Cost is driven by the number of codewords typical with the
/// sensory codeword rather than by M_c * M_x.
class LazyEvaluator
{
public:
  LazyEvaluator(const Model &model, const TrialCode &code)
    : model_(model)
    , code_(code)
  {}

  TrialOutcome operator()(const Observation &obs)
  {
    memo_.clear();
    detail::Facts f;
    f.w     = obs.w;
    f.enc_w = encode(obs.w);
    f.sens  = sensory_encode(code_.books.sensory, obs.y, model_.yv);
    f.cls   = classify_active(code_.books.sensory[f.sens.index]);
    if (f.cls.m_hat == f.enc_w.index)
    {
      f.w_hat = first_assigned_up_to(f.cls.m_hat, obs.w);
    }
    f.success = f.cls.m_hat == f.enc_w.index && f.w_hat == obs.w;

    TrialOutcome out;
    out.selected_w = obs.w;
    out.m_assigned = f.enc_w.index;
    out.mu         = f.sens.index;
    out.m_hat      = f.cls.m_hat;
    out.w_hat      = f.w_hat;
    out.event      = detail::attribute(model_, code_, obs, f, [&] {
      const Word u = code_.books.memory[f.enc_w.index];
      for (std::size_t w = 0; w < code_.patterns.size(); ++w)
      {
        if (w != obs.w && model_.xu(code_.patterns[w], u))
        {
          return true;
        }
      }
      return false;
    });
    return out;
  }

private:
  const EncodeResult &encode(std::size_t w)
  {
    auto it = memo_.find(w);
    if (it == memo_.end())
    {
      it = memo_.emplace(w, memory_encode(code_.books.memory, code_.patterns[w], model_.xu)).first;
    }
    return it->second;
  }

  bool assigned_to(std::size_t w, std::size_t i)
  {
    if (model_.xu(code_.patterns[w], code_.books.memory[i]))
    {
      return encode(w).index == i;
    }
    return i == 0 && encode(w).failed;
  }

  bool active(std::size_t i)
  {
    for (std::size_t w = 0; w < code_.patterns.size(); ++w)
    {
      if (model_.xu(code_.patterns[w], code_.books.memory[i]) && encode(w).index == i)
      {
        return true;
      }
    }
    if (i != 0)
    {
      return false;
    }
    for (std::size_t w = 0; w < code_.patterns.size(); ++w)
    {
      if (encode(w).failed)
      {
        return true;
      }
    }
    return false;
  }

  // Index 0 is resolved last because its activity may need full searches of
  // patterns that fall back to it.
  ClassifyResult classify_active(Word v)
  {
    const Codebook          &memory = code_.books.memory;
    std::size_t              matches = 0;
    std::size_t              first   = 0;
    for (std::size_t i = 1; i < memory.size() && matches < 2; ++i)
    {
      if (model_.uv(memory[i], v) && active(i))
      {
        if (matches++ == 0)
        {
          first = i;
        }
      }
    }
    if (matches < 2 && !memory.empty() && model_.uv(memory[0], v) && active(0))
    {
      ++matches;
      first = 0;
    }
    ClassifyResult result;
    result.no_match  = matches == 0;
    result.ambiguous = matches > 1;
    result.m_hat     = matches == 1 ? first : 0;
    return result;
  }

  std::optional<std::size_t> first_assigned_up_to(std::size_t i, std::size_t limit)
  {
    for (std::size_t w = 0; w <= limit; ++w)
    {
      if (assigned_to(w, i))
      {
        return w;
      }
    }
    return std::nullopt;
  }

  const Model                                    &model_;
  const TrialCode                                &code_;
  std::unordered_map<std::size_t, EncodeResult>   memo_;
};

struct SimulationResult
{
  CodeConfig                 config;
  std::size_t                trials = 0;
  std::array<std::size_t, 6> errors{};  ///< E0 .. E5
  std::size_t                ok                = 0;
  std::size_t                sampling_failures = 0;

  double p_e_hat() const
  {
    return trials == 0 ? 0.0 : 1.0 - static_cast<double>(ok) / static_cast<double>(trials);
  }

  /// 95% Wald half-width.
  double ci95() const
  {
    if (trials == 0)
    {
      return 0.0;
    }
    const double p = p_e_hat();
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  }

  void record(Event e)
  {
    switch (e)
    {
    case Event::ok:
      ++ok;
      break;
    case Event::sampling_failure:
      ++sampling_failures;
      break;
    default:
      ++errors[static_cast<std::size_t>(e) - 1];
      break;
    }
  }

  void merge(const SimulationResult &other)
  {
    trials += other.trials;
    ok += other.ok;
    sampling_failures += other.sampling_failures;
    for (std::size_t k = 0; k < errors.size(); ++k)
    {
      errors[k] += other.errors[k];
    }
  }
};

inline nlohmann::ordered_json to_json(const SimulationResult &r)
{
  const CodeConfig      &c = r.config;
  nlohmann::ordered_json j{{"n", c.n},   {"Rc", c.rc},       {"Rx", c.rx},   {"Ry", c.ry},
                           {"q", c.q},   {"qx", c.qx},       {"qy", c.qy},   {"delta", c.delta},
                           {"seed", c.seed}, {"trials", r.trials}};
  for (std::size_t k = 0; k < r.errors.size(); ++k)
  {
    j["e" + std::to_string(k)] = r.errors[k];
  }
  j["ok"]                = r.ok;
  j["pe_hat"]            = r.p_e_hat();
  j["ci95"]              = r.ci95();
  j["sampling_failures"] = r.sampling_failures;
  return j;
}

/// Whether p_e_hat is nonincreasing along a sweep. A rise between adjacent
/// points is tolerated when their 95% intervals overlap, at most
/// `allowed_overlaps` times.
struct TrendAssessment
{
  bool        nonincreasing     = true;
  std::size_t overlapping_rises = 0;
  std::size_t separated_rises   = 0;
};

inline TrendAssessment assess_trend(const std::vector<SimulationResult> &sweep, std::size_t allowed_overlaps = 1)
{
  TrendAssessment t;
  for (std::size_t k = 1; k < sweep.size(); ++k)
  {
    const SimulationResult &prev = sweep[k - 1];
    const SimulationResult &next = sweep[k];
    if (next.p_e_hat() <= prev.p_e_hat())
    {
      continue;
    }
    if (next.p_e_hat() - next.ci95() <= prev.p_e_hat() + prev.ci95())
    {
      ++t.overlapping_rises;
    }
    else
    {
      ++t.separated_rises;
    }
  }
  t.nonincreasing = t.separated_rises == 0 && t.overlapping_rises <= allowed_overlaps;
  return t;
}

namespace detail {

template <class Body>
SimulationResult parallel_trials(const CodeConfig &cfg, std::size_t trials, std::size_t threads, Body &&body)
{
  threads = std::max<std::size_t>(1, std::min(threads, trials));
  std::vector<SimulationResult> parts(threads);
  auto worker = [&](std::size_t t) {
    for (std::size_t k = t; k < trials; k += threads)
    {
      parts[t].record(body(k));
      ++parts[t].trials;
    }
  };
  if (threads == 1)
  {
    worker(0);
  }
  else
  {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
    {
      pool.emplace_back(worker, t);
    }
    for (auto &th : pool)
    {
      th.join();
    }
  }
  SimulationResult total;
  total.config = cfg;
  for (const auto &p : parts)
  {
    total.merge(p);
  }
  return total;
}

}  // namespace detail

/// Monte Carlo over the code ensemble: every trial draws fresh codebooks, a
/// fresh training set, a uniform label and channel noise from the substream
/// keyed by (seed, trial index). Results do not depend on `threads`.
inline SimulationResult run_trials(const CodeConfig &cfg, std::size_t trials, std::size_t threads = 1)
{
  cfg.validate();
  patrec::detail::require(trials >= 1, "run_trials: trials must be positive");
  const Model       model(cfg);
  const std::size_t mc = cfg.mc();
  return detail::parallel_trials(cfg, trials, threads, [&](std::size_t k) {
    CounterRng rng = CounterRng::substream(cfg.seed, k);
    TrialCode  code;
    try
    {
      code = draw_code(cfg, model, rng);
    }
    catch (const SamplingFailure &)
    {
      return Event::sampling_failure;
    }
    const Observation obs = draw_observation(cfg, mc, code, rng);
    return LazyEvaluator(model, code)(obs).event;
  });
}

/// Stream index reserved for the code drawn by run_trials_fixed_code.
inline constexpr std::uint64_t kFixedCodeStream = ~std::uint64_t{0};

inline TrialCode draw_fixed_code(const CodeConfig &cfg, const Model &model)
{
  CounterRng rng = CounterRng::substream(cfg.seed, kFixedCodeStream);
  return draw_code(cfg, model, rng);
}

/// Monte Carlo over labels and channel noise with one code held fixed.
inline SimulationResult run_trials_fixed_code(const CodeConfig &cfg, std::size_t trials, std::size_t threads = 1)
{
  cfg.validate();
  patrec::detail::require(trials >= 1, "run_trials: trials must be positive");
  const Model     model(cfg);
  const TrialCode code = draw_fixed_code(cfg, model);
  return detail::parallel_trials(cfg, trials, threads, [&](std::size_t k) {
    CounterRng rng = CounterRng::substream(cfg.seed, k);
    return LazyEvaluator(model, code)(draw_observation(cfg, code.patterns.size(), code, rng)).event;
  });
}

}  // namespace patrec::sim
