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


#include "patrec/sim_code.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numeric>

using namespace patrec;
using namespace patrec::sim;

namespace {

CodeConfig small_config(std::size_t n, double rc, std::uint64_t seed)
{
  return CodeConfig::from_rates(n, 0.2, rc, 0.8, 0.8, seed);
}

std::size_t counted(const SimulationResult &r)
{
  return std::accumulate(r.errors.begin(), r.errors.end(), r.ok + r.sampling_failures);
}

// P(|N_c / n - p_c| <= delta for every cell) for n iid draws from a pmf
// with four cells, by summing multinomial terms.
double band_probability(std::size_t n, const std::array<double, 4> &p, double delta)
{
  std::vector<double> log_fact(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k)
    log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));
  auto ok = [&](std::size_t c, double pc) { return std::abs(static_cast<double>(c) / n - pc) <= delta; };
  double total = 0.0;
  for (std::size_t a = 0; a <= n; ++a)
    for (std::size_t b = 0; a + b <= n; ++b)
      for (std::size_t c = 0; a + b + c <= n; ++c)
      {
        const std::size_t d = n - a - b - c;
        if (!(ok(a, p[0]) && ok(b, p[1]) && ok(c, p[2]) && ok(d, p[3])))
          continue;
        total += std::exp(log_fact[n] - log_fact[a] - log_fact[b] - log_fact[c] - log_fact[d] + a * std::log(p[0]) +
                          b * std::log(p[1]) + c * std::log(p[2]) + d * std::log(p[3]));
      }
  return total;
}

}  // namespace

TEST(Typicality, ExactTypeAndAllZeros)
{
  const JointPMF uniform = make_pmf("X", {0.5, 0.5});
  EXPECT_TRUE(typicality_test({{0, 1, 0, 1}}, uniform, 0.01));
  EXPECT_FALSE(typicality_test({Sequence(20, 0)}, uniform, 0.1));
  EXPECT_THROW(typicality_test({{0, 1}, {0}}, JointPMF({"A", "B"}, {2, 2}, {0.25, 0.25, 0.25, 0.25}), 0.1),
               ArgumentError);
  EXPECT_THROW(typicality_test({{0, 2}}, uniform, 0.1), ArgumentError);
}

TEST(Typicality, LongIidSequencesAreTypical)
{
  const JointPMF pmf = make_pmf("X", {0.3, 0.7});
  CounterRng     rng(8);
  int            typical = 0;
  for (int k = 0; k < 500; ++k)
  {
    Sequence s(1000);
    for (auto &v : s)
      v = rng.bernoulli(0.7) ? 1 : 0;
    typical += typicality_test({s}, pmf, 0.1) ? 1 : 0;
  }
  EXPECT_GT(typical, 495);
}

TEST(Typicality, PackedPairMatchesGenericTest)
{
  const CodeConfig cfg   = small_config(10, 0.2, 1);
  const JointPMF   xy    = cfg.joint().marginal_pmf({"X", "Y"});
  const PairTypicality packed(xy, cfg.n, 0.1);
  CounterRng       rng(9);
  for (int k = 0; k < 5000; ++k)
  {
    const Word a = static_cast<Word>(rng()) & word_mask(cfg.n);
    const Word b = static_cast<Word>(rng()) & word_mask(cfg.n);
    EXPECT_EQ(packed(a, b), typicality_test({unpack(a, cfg.n), unpack(b, cfg.n)}, xy, 0.1));
    EXPECT_EQ(words_typical({a, b}, xy, cfg.n, 0.1), typicality_test({unpack(a, cfg.n), unpack(b, cfg.n)}, xy, 0.1));
  }
}

TEST(Typicality, PackedAcceptanceMatchesMultinomialSum)
{
  const std::size_t n     = 8;
  const JointPMF    xy({"X", "Y"}, {2, 2}, {0.4, 0.1, 0.1, 0.4});
  const PairTypicality packed(xy, n, 0.1);
  double            accepted = 0.0;
  for (Word a = 0; a < (1u << n); ++a)
    for (Word b = 0; b < (1u << n); ++b)
    {
      const int flips = std::popcount(a ^ b);
      if (packed(a, b))
        accepted += std::pow(0.5, n) * std::pow(0.2, flips) * std::pow(0.8, static_cast<int>(n) - flips);
    }
  EXPECT_NEAR(accepted, band_probability(n, {0.4, 0.1, 0.1, 0.4}, 0.1), 1e-12);
}

TEST(Typicality, SourcePairAtypicalityFallsAtWidelySpacedLengths)
{
  double previous = 1.0;
  for (std::size_t n : {8, 16, 40, 80, 160})
  {
    const double miss = 1.0 - band_probability(n, {0.4, 0.1, 0.1, 0.4}, 0.1);
    EXPECT_LT(miss, previous) << n;
    previous = miss;
  }
  EXPECT_LT(previous, 0.02);
}

TEST(Typicality, SourcePairAtypicalityHasLatticeBumpAtTwenty)
{
  // At slack 0.1 a diagonal cell may hold 5..11 counts at n = 16 but only
  // 6..10 at n = 20.
  EXPECT_GT(1.0 - band_probability(20, {0.4, 0.1, 0.1, 0.4}, 0.1),
            1.0 - band_probability(16, {0.4, 0.1, 0.1, 0.4}, 0.1) + 0.05);
  double previous = 1.0;
  for (std::size_t n : {8, 12, 16, 20, 24})
  {
    const double miss = 1.0 - band_probability(n, {0.4, 0.1, 0.1, 0.4}, 0.15);
    EXPECT_LT(miss, previous) << n;
    previous = miss;
  }
}

TEST(SampleTypical, BandAndCap)
{
  const JointPMF uniform = make_pmf("X", {0.5, 0.5});
  CounterRng     rng(10);
  for (int k = 0; k < 200; ++k)
  {
    const Sequence s    = sample_typical(uniform, 8, 0.25, rng);
    const int      ones = std::accumulate(s.begin(), s.end(), 0);
    EXPECT_GE(ones, 2);
    EXPECT_LE(ones, 6);
  }
  const Sequence constant = sample_typical(make_pmf("X", {0.0, 1.0}), 6, 0.01, rng);
  EXPECT_EQ(constant, Sequence(6, 1));
  // Five symbols can never split evenly.
  EXPECT_THROW(sample_typical(uniform, 5, 0.05, rng, 1000), SamplingFailure);
}

TEST(Words, PackRoundTrip)
{
  CounterRng rng(12);
  for (int k = 0; k < 1000; ++k)
  {
    const Word w = static_cast<Word>(rng()) & word_mask(17);
    EXPECT_EQ(pack(unpack(w, 17)), w);
  }
}

TEST(CodeConfig, SizesAndValidation)
{
  CodeConfig cfg = CodeConfig::from_rates(12, 0.2, 0.1, 0.5, 0.5, 0);
  EXPECT_EQ(cfg.mx(), 64u);
  EXPECT_EQ(cfg.mc(), 2u);
  EXPECT_EQ(CodeConfig::codebook_size(8, 0.0), 1u);
  EXPECT_NEAR(cfg.qx, inverse_binary_entropy(0.5), 1e-15);
  EXPECT_EQ(cfg.delta, 0.1);
  EXPECT_EQ(CodeConfig::from_rates(16, 0.2, 0.1, 0.5, 0.5, 0).delta, 0.05);
  EXPECT_NO_THROW(cfg.validate());

  CodeConfig bad = cfg;
  bad.n          = 3;
  EXPECT_THROW(bad.validate(), ArgumentError);
  bad    = cfg;
  bad.rx = 2.5;
  EXPECT_THROW(bad.validate(), ArgumentError);
  bad       = cfg;
  bad.delta = 0.5;
  EXPECT_THROW(bad.validate(), ArgumentError);
}

TEST(Codebooks, TypicalAndDeterministic)
{
  const CodeConfig cfg = CodeConfig::from_rates(12, 0.2, 0.1, 0.5, 0.5, 42);
  const Model      model(cfg);
  CounterRng       a(42), b(42);
  const Codebooks  first  = generate_codebooks(cfg, model, a);
  const Codebooks  second = generate_codebooks(cfg, model, b);
  EXPECT_EQ(first.memory, second.memory);
  EXPECT_EQ(first.sensory, second.sensory);
  ASSERT_EQ(first.memory.size(), 64u);
  for (Word u : first.memory)
    EXPECT_TRUE(model.u_typical(u));

  CodeConfig single = cfg;
  single.rx         = 0.0;
  CounterRng c(1);
  EXPECT_EQ(generate_codebooks(single, Model(single), c).memory.size(), 1u);
}

TEST(Encoders, FindPatternAndFallBack)
{
  const JointPMF       xu({"X", "U"}, {2, 2}, {0.5, 0.0, 0.0, 0.5});
  const PairTypicality exact(xu, 8, 0.05);
  const Codebook       book{0b00001111, 0b10101010, 0b11001100};
  EXPECT_EQ(memory_encode(book, 0b10101010, exact).index, 1u);
  EXPECT_FALSE(memory_encode(book, 0b10101010, exact).failed);
  const EncodeResult miss = sensory_encode(book, 0b11110000, exact);
  EXPECT_TRUE(miss.failed);
  EXPECT_EQ(miss.index, 0u);
}

TEST(Collision, RepeatedIndices)
{
  EXPECT_FALSE(detect_collision({3}));
  EXPECT_FALSE(detect_collision({0, 1, 2}));
  EXPECT_TRUE(detect_collision({0, 0, 0}));
  EXPECT_TRUE(detect_collision({4, 1, 4}));
}

TEST(Classify, UniqueNoneAndAmbiguous)
{
  const JointPMF       uv({"U", "V"}, {2, 2}, {0.5, 0.0, 0.0, 0.5});
  const PairTypicality exact(uv, 8, 0.05);
  const Codebook       memory{0b00001111, 0b10101010, 0b10101010};

  const ClassifyResult unique = classify(memory, {1, 0}, 0b10101010, exact);
  EXPECT_EQ(unique.m_hat, 1u);
  EXPECT_FALSE(unique.no_match || unique.ambiguous);
  EXPECT_EQ(lookup_label({1, 0}, unique.m_hat), std::optional<std::size_t>(0));

  const ClassifyResult none = classify(memory, {0}, 0b10101010, exact);
  EXPECT_TRUE(none.no_match);
  EXPECT_EQ(none.m_hat, 0u);

  const ClassifyResult both = classify(memory, {1, 2}, 0b10101010, exact);
  EXPECT_TRUE(both.ambiguous);
  EXPECT_EQ(both.m_hat, 0u);

  EXPECT_EQ(lookup_label({2, 2}, 1), std::nullopt);
  EXPECT_EQ(lookup_label({2, 5, 2}, 2), std::optional<std::size_t>(0));
}

TEST(Evaluator, LazyAgreesWithReference)
{
  std::size_t checked = 0;
  for (std::size_t n : {6, 8, 10})
    for (double rc : {0.1, 0.5, 0.9})
    {
      const CodeConfig cfg = small_config(n, rc, 100 + n);
      const Model      model(cfg);
      for (std::uint64_t k = 0; k < 100; ++k)
      {
        CounterRng        rng  = CounterRng::substream(cfg.seed, k);
        const TrialCode   code = draw_code(cfg, model, rng);
        const Observation obs  = draw_observation(cfg, cfg.mc(), code, rng);
        const TrialOutcome ref  = evaluate_reference(model, code, obs);
        const TrialOutcome lazy = LazyEvaluator(model, code)(obs);
        ASSERT_EQ(ref.event, lazy.event) << "n=" << n << " rc=" << rc << " trial=" << k;
        EXPECT_EQ(ref.m_assigned, lazy.m_assigned);
        EXPECT_EQ(ref.mu, lazy.mu);
        EXPECT_EQ(ref.m_hat, lazy.m_hat);
        if (ref.m_hat == ref.m_assigned)
          EXPECT_EQ(ref.w_hat, lazy.w_hat);
        ++checked;
      }
    }
  EXPECT_EQ(checked, 900u);
}

TEST(Evaluator, SuccessMatchesDefinition)
{
  const CodeConfig cfg = small_config(8, 0.5, 7);
  const Model      model(cfg);
  for (std::uint64_t k = 0; k < 300; ++k)
  {
    CounterRng         rng  = CounterRng::substream(cfg.seed, k);
    const TrialCode    code = draw_code(cfg, model, rng);
    const Observation  obs  = draw_observation(cfg, cfg.mc(), code, rng);
    const TrialOutcome out  = evaluate_reference(model, code, obs);
    const bool         good = out.m_hat == out.m_assigned && out.w_hat == obs.w;
    EXPECT_EQ(out.event == Event::ok, good);
  }
}

TEST(RunTrials, DeterministicAndThreadIndependent)
{
  const CodeConfig       cfg = small_config(10, 0.3, 5);
  const SimulationResult a   = run_trials(cfg, 400, 1);
  const SimulationResult b   = run_trials(cfg, 400, 1);
  const SimulationResult c   = run_trials(cfg, 400, 3);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(to_json(a).dump(), to_json(c).dump());
  EXPECT_EQ(counted(a), 400u);
  EXPECT_NEAR(a.p_e_hat(), 1.0 - static_cast<double>(a.ok) / 400.0, 1e-15);
  EXPECT_THROW(run_trials(cfg, 0), ArgumentError);
}

TEST(RunTrials, RecordHasDocumentedFields)
{
  const nlohmann::ordered_json j = to_json(run_trials(small_config(8, 0.1, 1), 20));
  for (const char *key : {"n", "Rc", "Rx", "Ry", "q", "qx", "qy", "delta", "seed", "trials", "e0", "e1", "e2", "e3",
                          "e4", "e5", "ok", "pe_hat", "ci95"})
  {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(RunTrials, NoiselessChannelFailsOnlyThroughAtypicalPatterns)
{
  // With delta * n < 1 joint typicality with q = qx = qy = 0 means equality,
  // so a typical pattern is recognised unless its codeword is missing.
  CodeConfig cfg;
  cfg.n     = 16;
  cfg.q     = 0.0;
  cfg.qx    = 0.0;
  cfg.qy    = 0.0;
  cfg.rc    = 0.25;
  cfg.rx    = 1.0;
  cfg.ry    = 1.0;
  cfg.delta = 0.05;
  cfg.seed  = 1;
  const SimulationResult r = run_trials(cfg, 300);
  std::size_t            beyond_e0 = 0;
  for (std::size_t k = 1; k < 6; ++k)
    beyond_e0 += r.errors[k];
  EXPECT_LE(beyond_e0, 9u);
  EXPECT_EQ(r.errors[0] + beyond_e0 + r.ok, 300u);
}

TEST(RunTrials, RateOutsideRegionFailsOften)
{
  const SimulationResult r = run_trials(CodeConfig::from_rates(16, 0.2, 1.0, 0.8, 0.8, 3), 300);
  EXPECT_GT(r.p_e_hat(), 0.3);
}

TEST(RunTrials, FixedCodeReusesOneCode)
{
  const CodeConfig       cfg = small_config(8, 0.5, 9);
  const SimulationResult a   = run_trials_fixed_code(cfg, 300, 1);
  const SimulationResult b   = run_trials_fixed_code(cfg, 300, 2);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Trend, OverlapAllowance)
{
  auto point = [](std::size_t trials, std::size_t ok) {
    SimulationResult r;
    r.trials = trials;
    r.ok     = ok;
    return r;
  };
  EXPECT_TRUE(assess_trend({point(1000, 400), point(1000, 500), point(1000, 600)}).nonincreasing);
  // p_e 0.50 then 0.51: CIs overlap, one rise allowed.
  const TrendAssessment one = assess_trend({point(1000, 500), point(1000, 490), point(1000, 600)});
  EXPECT_TRUE(one.nonincreasing);
  EXPECT_EQ(one.overlapping_rises, 1u);
  const TrendAssessment two = assess_trend({point(1000, 500), point(1000, 490), point(1000, 480)});
  EXPECT_FALSE(two.nonincreasing);
  const TrendAssessment jump = assess_trend({point(1000, 600), point(1000, 400)});
  EXPECT_FALSE(jump.nonincreasing);
  EXPECT_EQ(jump.separated_rises, 1u);
}
