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


#include "patrec/lemma_lab.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace patrec;
using namespace patrec::lab;

namespace {

// X is a fair bit seen by Y through a 0.2 crossover. Component 0 sends X to U and keeps V constant;
// component 1 does the reverse.
MixtureModel split_observer(bool reveal)
{
  MixtureModel m;
  m.weights          = {0.5, 0.5};
  m.source           = JointPMF({"X", "Y"}, {2, 2}, {0.4, 0.1, 0.1, 0.4});
  m.u_given_x        = {StochasticMatrix::identity(2), StochasticMatrix(2, 2, {1.0, 0.0, 1.0, 0.0})};
  m.v_given_y        = {StochasticMatrix(2, 2, {1.0, 0.0, 1.0, 0.0}), StochasticMatrix::identity(2)};
  m.reveal_component = reveal;
  return m;
}

}  // namespace

class SuiteRun : public ::testing::TestWithParam<std::string>
{
};

TEST_P(SuiteRun, PassesAtSmallCount)
{
  const LemmaReport r = run_suite(GetParam(), 2026, 200);
  EXPECT_TRUE(r.pass) << r.worst_case_descriptor;
  EXPECT_EQ(r.cases_run, 200u);
  EXPECT_LE(r.max_violation, kLemmaTolerance);
  EXPECT_FALSE(r.worst_case_descriptor.empty());
}

TEST_P(SuiteRun, DeterministicPerSeed)
{
  nlohmann::ordered_json a = run_suite(GetParam(), 77, 50);
  nlohmann::ordered_json b = run_suite(GetParam(), 77, 50);
  EXPECT_EQ(a.dump(), b.dump());
}

INSTANTIATE_TEST_SUITE_P(AllSuites, SuiteRun, ::testing::ValuesIn(suite_names()));

TEST(Suites, UnknownNameThrows)
{
  EXPECT_THROW(run_suite("nope", 1, 10), ArgumentError);
  EXPECT_EQ(default_cases("ab_lemma"), 10'000u);
  EXPECT_EQ(default_cases("alt_form"), 1'000u);
}

TEST(AbLemma, IndependentPairsAreTight)
{
  // A, B independent; alpha = A, beta = B: both sides vanish.
  std::vector<double> table(16, 0.0);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      table[((a * 2 + b) * 2 + a) * 2 + b] = 0.25;
  const JointPMF pmf({"A", "B", "alpha", "beta"}, {2, 2, 2, 2}, table);
  const AbTerms  t = ab_lemma_terms(pmf);
  EXPECT_NEAR(t.gap, 0.0, 1e-14);
  EXPECT_NEAR(t.equality_term, 0.0, 1e-14);
}

TEST(AbLemma, SharedBitShowsGap)
{
  // A = B = alpha = beta: I(alpha;beta) = 1 while the right side is 1 + 1 - 1.
  const JointPMF pmf({"A", "B", "alpha", "beta"}, {2, 2, 2, 2},
                     {0.5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0.5});
  EXPECT_NEAR(ab_lemma_terms(pmf).gap, 0.0, 1e-14);
}

TEST(SingleLetter, GammaCopiesFirstSymbol)
{
  // A1, A2 iid bits, gamma = A1: sum is 1 + 0, joint information is 1.
  std::vector<double> table(8, 0.0);
  for (std::size_t a1 = 0; a1 < 2; ++a1)
    for (std::size_t a2 = 0; a2 < 2; ++a2)
      table[(a1 * 2 + a2) * 2 + a1] = 0.25;
  EXPECT_NEAR(single_letter_residual(JointPMF({"A1", "A2", "gamma"}, {2, 2, 2}, table), 2), 0.0, 1e-14);
}

TEST(SingleLetter, ConstantGamma)
{
  const JointPMF pmf({"A1", "gamma"}, {2, 1}, {0.3, 0.7});
  EXPECT_NEAR(single_letter_residual(pmf, 1), 0.0, 1e-15);
}

TEST(AltForm, IdentityChannelsGiveSourceInformation)
{
  const JointPMF pmf = build_chain_pmf(make_pmf("X", {0.5, 0.5}), StochasticMatrix::bsc(0.2),
                                       StochasticMatrix::identity(2), StochasticMatrix::identity(2));
  EXPECT_NEAR(rate_excess(pmf), 1.0 - binary_entropy(0.2), 1e-14);
  EXPECT_NEAR(alt_form_residual(pmf), 0.0, 1e-14);
  const ExcessResiduals r = rate_excess_residuals(pmf);
  EXPECT_NEAR(r.x_side, 0.0, 1e-14);
  EXPECT_NEAR(r.y_side, 0.0, 1e-14);
}

TEST(TimeSharing, SingleComponentIsExact)
{
  CounterRng         rng(5);
  const MixtureModel m = random_mixture(rng, 1, true);
  EXPECT_NEAR(time_sharing_residual(m), 0.0, 1e-13);
}

TEST(RateExcess, RevealedSplitObserverSatisfiesIdentity)
{
  const ExcessResiduals r = rate_excess_residuals(split_observer(true).composite());
  EXPECT_NEAR(r.x_side, 0.0, 1e-13);
  EXPECT_NEAR(r.y_side, 0.0, 1e-13);
}

TEST(RateExcess, HiddenComponentBreaksSingleEncoderForm)
{
  // Both short chains hold, but U carries information about Y beyond X once V
  // is known, so the single-encoder identity fails.
  const JointPMF pmf = split_observer(false).composite();
  EXPECT_TRUE(is_markov_chain(pmf, {"U"}, {"X"}, {"Y"}, 1e-12));
  EXPECT_TRUE(is_markov_chain(pmf, {"X"}, {"Y"}, {"V"}, 1e-12));
  const ExcessResiduals r = rate_excess_residuals(pmf);
  EXPECT_GT(std::max(std::abs(r.x_side), std::abs(r.y_side)), 1e-3);
  EXPECT_NEAR(alt_form_residual(pmf), 0.0, 1e-13);
}

TEST(NoInd, ConstantGammaAndCopies)
{
  const JointPMF constant({"A", "alpha", "gamma"}, {2, 2, 1}, {0.4, 0.1, 0.2, 0.3});
  EXPECT_NEAR(no_ind_residual(constant), 0.0, 1e-14);
  const JointPMF copies({"A", "alpha", "gamma"}, {2, 2, 2}, {0.5, 0, 0, 0, 0, 0, 0, 0.5});
  EXPECT_NEAR(no_ind_residual(copies), 0.0, 1e-14);
}

TEST(Report, JsonFieldsAndObserve)
{
  LemmaReport r;
  r.lemma_id = "x";
  r.observe(1e-12, 0, "a");
  r.observe(5e-11, 1, "b");
  r.observe(1e-13, 2, "c");
  r.finish();
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.cases_run, 3u);
  EXPECT_EQ(r.worst_case_descriptor, "case 1: b");
  r.observe(1e-9, 3, "d");
  r.finish();
  EXPECT_FALSE(r.pass);
  const nlohmann::ordered_json j = r;
  for (const char *key : {"lemma_id", "cases_run", "max_violation", "worst_case_descriptor", "tolerance", "pass"})
    EXPECT_TRUE(j.contains(key)) << key;
}

TEST(Random, SimplexAndChannelAreNormalised)
{
  CounterRng rng(3);
  for (int k = 0; k < 100; ++k)
  {
    const auto p = random_simplex(rng, 5);
    double     s = 0.0;
    for (double v : p)
    {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
  const StochasticMatrix ch = random_channel(rng, 3, 4);
  for (std::size_t r = 0; r < 3; ++r)
  {
    double s = 0.0;
    for (std::size_t c = 0; c < 4; ++c)
      s += ch(r, c);
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
}
