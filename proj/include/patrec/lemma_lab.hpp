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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace patrec::lab {

inline constexpr double kLemmaTolerance  = 1e-10;
inline constexpr double kNearEqualityGap = 1e-6;

struct LemmaReport
{
  std::string lemma_id;
  std::size_t cases_run     = 0;
  double      max_violation = 0.0;
  std::string worst_case_descriptor;
  double      tolerance = kLemmaTolerance;
  bool        pass      = true;
  /// Cases whose inequality gap fell below kNearEqualityGap, with the largest
  /// value of the quantity the equality condition says must vanish.
  std::size_t near_equality_cases   = 0;
  double      near_equality_max_aux = 0.0;

  void observe(double violation, std::size_t case_index, const std::string &what)
  {
    ++cases_run;
    if (violation > max_violation || worst_case_descriptor.empty())
    {
      max_violation         = std::max(max_violation, violation);
      worst_case_descriptor = "case " + std::to_string(case_index) + ": " + what;
    }
  }

  void finish() { pass = max_violation <= tolerance; }
};

inline void to_json(nlohmann::ordered_json &j, const LemmaReport &r)
{
  j = nlohmann::ordered_json{{"lemma_id", r.lemma_id},
                             {"cases_run", r.cases_run},
                             {"max_violation", r.max_violation},
                             {"worst_case_descriptor", r.worst_case_descriptor},
                             {"tolerance", r.tolerance},
                             {"pass", r.pass},
                             {"near_equality_cases", r.near_equality_cases},
                             {"near_equality_max_aux", r.near_equality_max_aux}};
}

// ---------------------------------------------------------------------------
// Random models

inline std::vector<double> random_simplex(CounterRng &rng, std::size_t size)
{
  std::vector<double> p(size);
  double              total = 0.0;
  for (double &v : p)
  {
    v = rng.exponential();
    total += v;
  }
  for (double &v : p)
  {
    v /= total;
  }
  return p;
}

/// Flat-Dirichlet joint pmf over the full table.
inline JointPMF random_pmf(CounterRng &rng, const VarSet &names, const std::vector<std::size_t> &sizes)
{
  std::size_t cells = 1;
  for (std::size_t s : sizes)
  {
    cells *= s;
  }
  return JointPMF(names, sizes, random_simplex(rng, cells));
}

inline StochasticMatrix random_channel(CounterRng &rng, std::size_t rows, std::size_t cols)
{
  std::vector<double> entries;
  entries.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
  {
    auto row = random_simplex(rng, cols);
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return StochasticMatrix(rows, cols, std::move(entries));
}

inline std::size_t random_size(CounterRng &rng, std::size_t lo, std::size_t hi)
{
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

/// Mixture of per-component test channels over (X, Y, U, V):
/// p(q) p(x, y) p_q(u|x) p_q(v|y). With `reveal_component` the component
/// index is appended to both U and V (U = (U_Q, Q), V = (V_Q, Q)); otherwise
/// it stays hidden. Either way U - X - Y and X - Y - V hold.
struct MixtureModel
{
  std::vector<double>           weights;
  JointPMF                      source = make_pmf("X", {1.0});  ///< over (X, Y)
  std::vector<StochasticMatrix> u_given_x;
  std::vector<StochasticMatrix> v_given_y;
  bool                          reveal_component = true;

  std::size_t u_symbols() const { return u_given_x.front().cols(); }
  std::size_t v_symbols() const { return v_given_y.front().cols(); }

  /// Chain pmf of component k over (X, Y, U, V).
  JointPMF component(std::size_t k) const
  {
    const std::size_t nx = source.alphabet_sizes()[0];
    const std::size_t ny = source.alphabet_sizes()[1];
    auto              px = source.marginal({"X"});
    std::vector<double> y_given_x(nx * ny);
    for (std::size_t x = 0; x < nx; ++x)
    {
      for (std::size_t y = 0; y < ny; ++y)
      {
        y_given_x[x * ny + y] = px[x] > 0.0 ? source.probs()[x * ny + y] / px[x] : 1.0 / static_cast<double>(ny);
      }
    }
    return build_chain_pmf(JointPMF({"X"}, {nx}, px), StochasticMatrix(nx, ny, y_given_x), u_given_x[k],
                           v_given_y[k]);
  }

  JointPMF composite() const
  {
    const std::size_t   nq = weights.size();
    const std::size_t   nx = source.alphabet_sizes()[0];
    const std::size_t   ny = source.alphabet_sizes()[1];
    const std::size_t   nu = u_symbols();
    const std::size_t   nv = v_symbols();
    const std::size_t   su = reveal_component ? nu * nq : nu;
    const std::size_t   sv = reveal_component ? nv * nq : nv;
    std::vector<double> table(nx * ny * su * sv, 0.0);
    for (std::size_t q = 0; q < nq; ++q)
    {
      for (std::size_t x = 0; x < nx; ++x)
      {
        for (std::size_t y = 0; y < ny; ++y)
        {
          const double pxy = weights[q] * source.probs()[x * ny + y];
          for (std::size_t u = 0; u < nu; ++u)
          {
            for (std::size_t v = 0; v < nv; ++v)
            {
              const std::size_t cu = reveal_component ? u * nq + q : u;
              const std::size_t cv = reveal_component ? v * nq + q : v;
              table[((x * ny + y) * su + cu) * sv + cv] += pxy * u_given_x[q](x, u) * v_given_y[q](y, v);
            }
          }
        }
      }
    }
    return JointPMF({"X", "Y", "U", "V"}, {nx, ny, su, sv}, std::move(table));
  }
};

inline MixtureModel random_mixture(CounterRng &rng, std::size_t components, bool reveal_component)
{
  MixtureModel m;
  const std::size_t nx = random_size(rng, 2, 3);
  const std::size_t ny = random_size(rng, 2, 3);
  const std::size_t nu = random_size(rng, 2, 3);
  const std::size_t nv = random_size(rng, 2, 3);
  m.weights            = random_simplex(rng, components);
  m.source             = random_pmf(rng, {"X", "Y"}, {nx, ny});
  for (std::size_t k = 0; k < components; ++k)
  {
    m.u_given_x.push_back(random_channel(rng, nx, nu));
    m.v_given_y.push_back(random_channel(rng, ny, nv));
  }
  m.reveal_component = reveal_component;
  return m;
}

inline std::string describe_sizes(const JointPMF &pmf)
{
  std::string s = "sizes";
  for (std::size_t k = 0; k < pmf.names().size(); ++k)
  {
    s += (k == 0 ? " " : " x ") + pmf.names()[k] + "=" + std::to_string(pmf.alphabet_sizes()[k]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Per-pmf residuals

/// Over (A, alpha, B, beta): `gap` = I(alpha;beta) - [I(A;alpha) + I(B;beta)
/// - I(AB;alpha beta)] and `equality_term` = I(A alpha; B beta) - I(A;B).
struct AbTerms
{
  double gap;
  double equality_term;
};

inline AbTerms ab_lemma_terms(const JointPMF &pmf)
{
  const double rhs = mutual_information(pmf, {"A"}, {"alpha"}) + mutual_information(pmf, {"B"}, {"beta"}) -
                     mutual_information(pmf, {"A", "B"}, {"alpha", "beta"});
  return {mutual_information(pmf, {"alpha"}, {"beta"}) - rhs,
          mutual_information(pmf, {"A", "alpha"}, {"B", "beta"}) - mutual_information(pmf, {"A"}, {"B"})};
}

/// Over (A1 .. An, gamma) with independent A_i:
/// sum_i I(A_i; gamma, A^{i-1}) - I(A^n; gamma).
inline double single_letter_residual(const JointPMF &pmf, std::size_t n)
{
  double sum = 0.0;
  VarSet past;
  VarSet all;
  for (std::size_t i = 1; i <= n; ++i)
  {
    const std::string a = "A" + std::to_string(i);
    VarSet            z  = past;
    z.push_back("gamma");
    sum += mutual_information(pmf, {a}, z);
    past.push_back(a);
    all.push_back(a);
  }
  return sum - mutual_information(pmf, all, {"gamma"});
}

/// Over (X, Y, U, V): [I(X;U) + I(Y;V) - I(XY;UV)] - [I(U;V) - I(U;V|XY)].
inline double alt_form_residual(const JointPMF &pmf)
{
  const double lhs = mutual_information(pmf, {"X"}, {"U"}) + mutual_information(pmf, {"Y"}, {"V"}) -
                     mutual_information(pmf, {"X", "Y"}, {"U", "V"});
  return lhs - rate_excess(pmf);
}

/// Residuals of I(X;U) - I(X;U|V) and I(Y;V) - I(Y;V|U) against
/// I(U;V) - I(U;V|XY).
struct ExcessResiduals
{
  double x_side;
  double y_side;
};

inline ExcessResiduals rate_excess_residuals(const JointPMF &pmf)
{
  const double excess = rate_excess(pmf);
  return {mutual_information(pmf, {"X"}, {"U"}) - conditional_mutual_information(pmf, {"X"}, {"U"}, {"V"}) - excess,
          mutual_information(pmf, {"Y"}, {"V"}) - conditional_mutual_information(pmf, {"Y"}, {"V"}, {"U"}) - excess};
}

/// Over (A, alpha, gamma): I(A;alpha) - [I(A;alpha gamma) - I(A alpha;gamma)
/// + I(alpha;gamma)].
inline double no_ind_residual(const JointPMF &pmf)
{
  return mutual_information(pmf, {"A"}, {"alpha"}) -
         (mutual_information(pmf, {"A"}, {"alpha", "gamma"}) - mutual_information(pmf, {"A", "alpha"}, {"gamma"}) +
          mutual_information(pmf, {"alpha"}, {"gamma"}));
}

/// Largest deviation of a time-sharing composite from the weighted per-
/// component quantities: I(X;U), I(Y;V), the rate excess, the rate triple,
/// and the two short Markov chains of the composite.
inline double time_sharing_residual(const MixtureModel &model)
{
  const JointPMF composite = model.composite();
  double         ixu = 0.0, iyv = 0.0, excess = 0.0;
  RateTriple     mixed{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < model.weights.size(); ++k)
  {
    const JointPMF   part = model.component(k);
    const double     w    = model.weights[k];
    const RateTriple t    = rate_triple_from_aux(part);
    ixu += w * mutual_information(part, {"X"}, {"U"});
    iyv += w * mutual_information(part, {"Y"}, {"V"});
    excess += w * rate_excess(part);
    mixed.r_c += w * t.r_c;
    mixed.r_x += w * t.r_x;
    mixed.r_y += w * t.r_y;
  }
  const RateTriple whole = rate_triple_from_aux(composite);
  double           worst = 0.0;
  for (double d : {ixu - mutual_information(composite, {"X"}, {"U"}),
                   iyv - mutual_information(composite, {"Y"}, {"V"}), excess - rate_excess(composite),
                   mixed.r_c - whole.r_c, mixed.r_x - whole.r_x, mixed.r_y - whole.r_y,
                   conditional_mutual_information(composite, {"U"}, {"Y"}, {"X"}),
                   conditional_mutual_information(composite, {"X"}, {"V"}, {"Y"})})
  {
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Randomised checks. Case k draws from rng.split(k), so reports depend only
// on the generator key and the case count.

inline LemmaReport check_ab_lemma(const CounterRng &rng, std::size_t cases, std::size_t alphabet_cap = 3)
{
  detail::require(alphabet_cap >= 2 && alphabet_cap <= 3, "check_ab_lemma: alphabet_cap must be 2 or 3");
  LemmaReport report;
  report.lemma_id = "ab_lemma";
  for (std::size_t k = 0; k < cases; ++k)
  {
    CounterRng     local = rng.split(k);
    JointPMF       pmf   = random_pmf(local, {"A", "alpha", "B", "beta"},
                                      {random_size(local, 2, alphabet_cap), random_size(local, 2, alphabet_cap),
                                       random_size(local, 2, alphabet_cap), random_size(local, 2, alphabet_cap)});
    const AbTerms  t     = ab_lemma_terms(pmf);
    if (t.gap < kNearEqualityGap)
    {
      ++report.near_equality_cases;
      report.near_equality_max_aux = std::max(report.near_equality_max_aux, t.equality_term);
    }
    report.observe(std::max(-t.gap, std::abs(t.gap - t.equality_term)), k, describe_sizes(pmf));
  }
  report.finish();
  return report;
}

inline LemmaReport check_gelfand_pinsker(const CounterRng &rng, std::size_t cases, std::size_t n_small = 3)
{
  detail::require(n_small >= 1 && n_small <= 3, "check_gelfand_pinsker: n_small must lie in [1, 3]");
  LemmaReport report;
  report.lemma_id = "gelfand_pinsker";
  VarSet names;
  for (std::size_t i = 1; i <= n_small; ++i)
  {
    names.push_back("A" + std::to_string(i));
  }
  names.push_back("gamma");
  for (std::size_t k = 0; k < cases; ++k)
  {
    CounterRng        local  = rng.split(k);
    const double      p_one  = local.uniform();
    const std::size_t g_size = random_size(local, 2, 4);
    const std::size_t inputs = std::size_t{1} << n_small;
    const double      noise  = local.uniform();
    std::vector<double> table(inputs * g_size);
    for (std::size_t a = 0; a < inputs; ++a)
    {
      double pa = 1.0;
      for (std::size_t i = 0; i < n_small; ++i)
      {
        // A1 is the most significant bit, matching the row-major layout.
        const bool bit = (a >> (n_small - 1 - i)) & 1U;
        pa *= bit ? p_one : 1.0 - p_one;
      }
      const std::size_t target = static_cast<std::size_t>(local.below(g_size));
      const auto        spread = random_simplex(local, g_size);
      for (std::size_t g = 0; g < g_size; ++g)
      {
        table[a * g_size + g] = pa * ((1.0 - noise) * (g == target ? 1.0 : 0.0) + noise * spread[g]);
      }
    }
    std::vector<std::size_t> sizes(n_small, 2);
    sizes.push_back(g_size);
    JointPMF pmf(names, sizes, std::move(table));
    report.observe(std::abs(single_letter_residual(pmf, n_small)), k, describe_sizes(pmf));
  }
  report.finish();
  return report;
}

inline LemmaReport check_time_sharing(const CounterRng &rng, std::size_t cases)
{
  LemmaReport report;
  report.lemma_id = "time_sharing";
  for (std::size_t k = 0; k < cases; ++k)
  {
    CounterRng         local = rng.split(k);
    const std::size_t  nq    = random_size(local, 2, 3);
    const MixtureModel model = random_mixture(local, nq, true);
    report.observe(time_sharing_residual(model), k, "|Q|=" + std::to_string(nq));
  }
  report.finish();
  return report;
}

inline LemmaReport check_alt_form(const CounterRng &rng, std::size_t cases)
{
  LemmaReport report;
  report.lemma_id = "alt_form";
  for (std::size_t k = 0; k < cases; ++k)
  {
    CounterRng     local  = rng.split(k);
    const bool     reveal = local.bernoulli(0.5);
    const JointPMF pmf    = random_mixture(local, random_size(local, 1, 3), reveal).composite();
    report.observe(std::abs(alt_form_residual(pmf)), k,
                   describe_sizes(pmf) + (reveal ? ", component revealed" : ", component hidden"));
  }
  report.finish();
  return report;
}

/// The single-encoder excess identities need I(U;Y|XV) = 0 and I(V;X|YU) = 0,
/// which the two short chains alone do not imply: a mixture with a hidden
/// component index breaks them. Cases are drawn from time-sharing composites
/// that expose the index in both U and V, where both conditions hold.
inline LemmaReport check_rate_excess(const CounterRng &rng, std::size_t cases)
{
  LemmaReport report;
  report.lemma_id = "rate_excess";
  for (std::size_t k = 0; k < cases; ++k)
  {
    CounterRng            local = rng.split(k);
    const JointPMF        pmf   = random_mixture(local, random_size(local, 1, 3), true).composite();
    const ExcessResiduals r     = rate_excess_residuals(pmf);
    report.observe(std::max(std::abs(r.x_side), std::abs(r.y_side)), k, describe_sizes(pmf));
  }
  report.finish();
  return report;
}

inline LemmaReport check_no_ind_identity(const CounterRng &rng, std::size_t cases)
{
  LemmaReport report;
  report.lemma_id = "no_ind_identity";
  for (std::size_t k = 0; k < cases; ++k)
  {
    CounterRng local = rng.split(k);
    JointPMF   pmf   = random_pmf(local, {"A", "alpha", "gamma"},
                                  {random_size(local, 2, 3), random_size(local, 2, 3), random_size(local, 2, 3)});
    report.observe(std::abs(no_ind_residual(pmf)), k, describe_sizes(pmf));
  }
  report.finish();
  return report;
}

/// Suite names accepted by run_suite, in reporting order.
inline const std::vector<std::string> &suite_names()
{
  static const std::vector<std::string> names{"ab_lemma",    "gelfand_pinsker", "time_sharing",
                                              "alt_form",    "rate_excess",     "no_ind_identity"};
  return names;
}

/// Default case counts per suite.
inline std::size_t default_cases(const std::string &suite)
{
  return suite == "ab_lemma" || suite == "no_ind_identity" ? 10'000 : 1'000;
}

inline LemmaReport run_suite(const std::string &suite, std::uint64_t seed, std::size_t cases)
{
  const auto &names = suite_names();
  const auto  pos   = std::find(names.begin(), names.end(), suite);
  if (pos == names.end())
  {
    throw ArgumentError("unknown suite: " + suite);
  }
  const CounterRng rng = CounterRng::substream(seed, static_cast<std::uint64_t>(pos - names.begin()));
  if (suite == "ab_lemma")
  {
    return check_ab_lemma(rng, cases);
  }
  if (suite == "gelfand_pinsker")
  {
    return check_gelfand_pinsker(rng, cases);
  }
  if (suite == "time_sharing")
  {
    return check_time_sharing(rng, cases);
  }
  if (suite == "alt_form")
  {
    return check_alt_form(rng, cases);
  }
  if (suite == "rate_excess")
  {
    return check_rate_excess(rng, cases);
  }
  if (suite == "no_ind_identity")
  {
    return check_no_ind_identity(rng, cases);
  }
  throw ArgumentError("unknown suite: " + suite);
}

}  // namespace patrec::lab
