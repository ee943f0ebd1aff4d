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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "oracles.hpp"
#include "patrec/patrec.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace patrec;

namespace {

struct Verdict
{
  bool        pass;
  std::string detail;
};

std::string fmt(const char *pattern, double a, double b = 0.0, double c = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

int failures = 0;

void criterion(int id, const char *title, const std::function<Verdict()> &body)
{
  const auto start   = std::chrono::steady_clock::now();
  Verdict    verdict = body();
  const double secs  = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  failures += verdict.pass ? 0 : 1;
  std::printf("%s criterion %d (%s): %s [%.2f s]\n", verdict.pass ? "PASS" : "FAIL", id, title, verdict.detail.c_str(),
              secs);
  std::fflush(stdout);
}

Verdict binary_surface()
{
  const binary::BinaryEnv env(0.2);
  const SurfaceGrid       s = binary::surface(env, GridSpec::square(0.0, 1.0, 41), binary::Surface::inner);
  double                  worst = 0.0;
  for (std::size_t i = 0; i < s.r_x_values.size(); ++i)
    for (std::size_t j = 0; j < s.r_y_values.size(); ++j)
    {
      const long double ref = oracle::binary_inner(0.2L, s.r_x_values[i], s.r_y_values[j]);
      worst = std::max(worst, static_cast<double>(std::fabs(static_cast<long double>(s.at(i, j)) - ref)));
    }
  const double corner = binary::inner_bound(env, 1.0, 1.0);
  const double target = static_cast<double>(1.0L - oracle::h2(0.2L));
  const bool   pass   = worst <= 1e-9 && std::abs(corner - target) <= 1e-9 && std::abs(corner - 0.278072) <= 1e-6;
  return {pass, fmt("max |g - oracle| = %.3e, g(1,1) = %.12f", worst, corner)};
}

Verdict envelope_simplification()
{
  const GridSpec unit = GridSpec::square(0.0, 1.0, 21);
  const auto     bin  = check_simplification(binary::inner_bound_field(binary::BinaryEnv(0.2)), unit, 1e-6);
  const auto     gau  = check_simplification(gaussian::inner_bound_field(0.8), GridSpec::square(0.0, 4.0, 21), 1e-6);
  const auto     work = check_simplification(saturating_product_field(), unit, 1e-6);
  return {bin.pass && gau.pass && work.pass,
          fmt("max gap binary %.2e, gaussian %.2e, worked %.2e", bin.max_gap, gau.max_gap, work.max_gap)};
}

Verdict stationary_point()
{
  double worst_rho = 0.0, worst_det = 0.0;
  for (int a = 1; a <= 9; ++a)
    for (int b = 1; b <= 9; ++b)
      for (int c = 1; c <= 9; ++c)
      {
        const double rho_xy = 0.1 * a, rho_xu = 0.1 * b, rho_yv = 0.1 * c;
        const double swept  = gaussian::sweep_optimize_rho_uv(rho_xy, rho_xu, rho_yv);
        const double star   = gaussian::outer_bound_terms(rho_xy, rho_xu, rho_yv).rho_star;
        worst_rho           = std::max(worst_rho, std::abs(swept - star));
        for (double rho_uv : {swept, star})
        {
          const gaussian::CorrelationSet cs{rho_xy, rho_xu, rho_yv, rho_uv};
          worst_det = std::max(worst_det, std::abs(gaussian::gaussian_mi_xyuv(cs) - gaussian::closed_form_mi_xyuv(cs)));
        }
      }
  return {worst_rho <= 1e-6 && worst_det <= 1e-9,
          fmt("max |sweep - rho*| = %.3e, max |det - closed| = %.3e", worst_rho, worst_det)};
}

Verdict beta_exceeds_two_gamma()
{
  CounterRng rng(2026);
  double     min_margin = 1.0, min_gamma = 1.0;
  bool       pass       = true;
  for (int k = 0; k < 100'000; ++k)
  {
    const double rho_xy = 0.01 + 0.98 * rng.uniform();
    const double rho_xu = 0.01 + 0.98 * rng.uniform();
    const double rho_yv = 0.01 + 0.98 * rng.uniform();
    const auto   t      = gaussian::outer_bound_terms(rho_xy, rho_xu, rho_yv);
    pass                = pass && t.beta > 2.0 * t.gamma && t.gamma > 0.0 && t.margin > 0.0;
    min_margin          = std::min(min_margin, t.margin);
    min_gamma           = std::min(min_gamma, t.gamma);
  }
  return {pass, fmt("min beta - 2 gamma = %.3e, min gamma = %.3e", min_margin, min_gamma)};
}

Verdict outer_vs_hull()
{
  const SurfaceGrid gap  = gaussian::surface(0.8, GridSpec::square(0.0, 4.0, 41), gaussian::Surface::hull_gap);
  const double      hull = gap.max_z();
  const binary::BinaryEnv env(0.2);
  const TwoPointEnvelope  hull_of_g(binary::inner_bound_field(env));
  double                  worst = 0.0;
  const GridSpec          grid  = GridSpec::square(0.0, 1.0, 41);
  for (double rx : grid.x_values())
    for (double ry : grid.y_values())
      worst = std::max(worst, std::abs(binary::outer_bound(env, rx, ry) - hull_of_g(rx, ry)));
  return {hull > 1e-3 && worst <= 1e-6,
          fmt("gaussian max(G* - hull G) = %.4e, binary max |g* - hull g| = %.3e", hull, worst)};
}

Verdict lemma_suites()
{
  bool        pass = true;
  std::string detail;
  for (const auto &suite : lab::suite_names())
  {
    const lab::LemmaReport r = lab::run_suite(suite, 2026, lab::default_cases(suite));
    pass                     = pass && r.pass;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s%s %zu cases %.1e", detail.empty() ? "" : ", ", suite.c_str(), r.cases_run,
                  r.max_violation);
    detail += buf;
  }
  return {pass, detail};
}

Verdict forward_construction()
{
  const binary::BinaryEnv env(0.2);
  double                  worst = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
    {
      const double     qx  = 0.125 * i, qy = 0.125 * j;
      const RateTriple num = binary::forward_construction_check(env, qx, qy);
      const double     g   = static_cast<double>(1.0L - oracle::h2(oracle::star(oracle::star(0.2L, qx), qy)));
      const double     rx  = static_cast<double>(1.0L - oracle::h2(qx));
      const double     ry  = static_cast<double>(1.0L - oracle::h2(qy));
      worst = std::max({worst, std::abs(num.r_c - g), std::abs(num.r_x - rx), std::abs(num.r_y - ry)});
    }
  return {worst <= 1e-10, fmt("max deviation %.3e", worst)};
}

Verdict simulator_trends()
{
  auto sweep = [](double rc) {
    std::vector<sim::SimulationResult> out;
    for (std::size_t n : {8, 12, 16, 20})
      out.push_back(sim::run_trials(sim::CodeConfig::from_rates(n, 0.2, rc, 0.8, 0.8, 2026), 2000));
    return out;
  };
  const auto low  = sweep(0.1);
  const auto high = sweep(0.9);
  const auto again = sweep(0.1);
  bool       deterministic = true;
  for (std::size_t k = 0; k < low.size(); ++k)
    deterministic = deterministic && sim::to_json(low[k]).dump() == sim::to_json(again[k]).dump();
  const auto trend     = sim::assess_trend(low);
  bool       high_fail = true;
  std::string detail   = "Rc=0.1 pe:";
  for (const auto &r : low)
    detail += fmt(" %.4f", r.p_e_hat());
  detail += " Rc=0.9 pe:";
  for (const auto &r : high)
  {
    detail += fmt(" %.4f", r.p_e_hat());
    high_fail = high_fail && r.p_e_hat() > 0.3;
  }
  detail += fmt(" overlapping rises %.0f, separated rises %.0f", static_cast<double>(trend.overlapping_rises),
                static_cast<double>(trend.separated_rises));
  return {trend.nonincreasing && high_fail && deterministic, detail};
}

Verdict exhaustive_oracle()
{
  sim::CodeConfig cfg = sim::CodeConfig::from_rates(6, 0.2, 0.5, 1.0, 1.0, 2026);
  cfg.qx              = 0.0;
  cfg.qy              = 0.0;
  const sim::Model     model(cfg);
  const sim::TrialCode code = sim::draw_fixed_code(cfg, model);
  const std::size_t    mc   = code.patterns.size();
  double               exact = 0.0;
  for (std::size_t w = 0; w < mc; ++w)
    for (sim::Word noise = 0; noise < (1u << cfg.n); ++noise)
    {
      const int    flips  = std::popcount(noise);
      const double weight = std::pow(cfg.q, flips) * std::pow(1.0 - cfg.q, static_cast<int>(cfg.n) - flips) / mc;
      const sim::TrialOutcome out = sim::evaluate_reference(model, code, {w, code.patterns[w] ^ noise});
      exact += out.event == sim::Event::ok ? 0.0 : weight;
    }
  const std::size_t          trials = 100'000;
  const sim::SimulationResult mc_run = sim::run_trials_fixed_code(cfg, trials);
  const double se = std::sqrt(std::max(exact * (1.0 - exact), 1e-12) / static_cast<double>(trials));
  const double z  = std::abs(mc_run.p_e_hat() - exact) / se;
  return {z <= 3.0, fmt("exact %.5f, monte carlo %.5f, |z| = %.2f", exact, mc_run.p_e_hat(), z)};
}

}  // namespace

int main()
{
  criterion(1, "binary surface fidelity", binary_surface);
  criterion(2, "envelope simplification", envelope_simplification);
  criterion(3, "gaussian stationary point", stationary_point);
  criterion(4, "beta exceeds twice gamma", beta_exceeds_two_gamma);
  criterion(5, "outer bound versus hull", outer_vs_hull);
  criterion(6, "lemma suites", lemma_suites);
  criterion(7, "forward construction", forward_construction);
  criterion(8, "simulator trends", simulator_trends);
  criterion(9, "exhaustive oracle at n = 6", exhaustive_oracle);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
