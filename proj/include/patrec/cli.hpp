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

#include "patrec/binary_region.hpp"
#include "patrec/envelope.hpp"
#include "patrec/errors.hpp"
#include "patrec/gaussian_region.hpp"
#include "patrec/lemma_lab.hpp"
#include "patrec/sim_code.hpp"
#include "patrec/surface_grid.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace patrec::cli {

inline constexpr const char *kVersion = "1.0.0";

inline constexpr std::uint64_t kDefaultSeed = 2026;

enum ExitCode : int
{
  kSuccess      = 0,
  kVerifyFailed = 1,
  kUsageError   = 2,
  kIoError      = 3
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// One batch job: command, validated parameters, output path and seed. The
/// parameters are recorded in the `.meta.json` sidecar.
struct JobConfig
{
  std::string            command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::string            output_path;
  std::optional<std::uint64_t> seed;  ///< unset for deterministic jobs
};

namespace detail {

inline std::uint64_t parse_seed(const std::string &text)
{
  std::size_t   used  = 0;
  unsigned long long value = 0;
  try
  {
    value = std::stoull(text, &used, 0);
  }
  catch (const std::exception &)
  {
    used = 0;
  }
  patrec::detail::require(used != 0 && used == text.size() && text.front() != '-',
                          "seed must be a nonnegative integer, got '" + text + "'");
  return value;
}

/// --seed if given, else PATREC_SEED, else kDefaultSeed.
inline std::uint64_t resolve_seed(const std::optional<std::string> &flag)
{
  if (flag)
  {
    return parse_seed(*flag);
  }
  if (const char *env = std::getenv("PATREC_SEED"); env != nullptr && *env != '\0')
  {
    return parse_seed(env);
  }
  return kDefaultSeed;
}

inline std::string utc_timestamp()
{
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm           tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_file(const std::string &path, const std::string &content)
{
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
  {
    throw IoError("cannot open '" + path + "' for writing");
  }
  os << content;
  os.flush();
  if (!os)
  {
    throw IoError("failed writing '" + path + "'");
  }
}

/// Writes `content` to the job's output path (stdout when empty) and, for
/// files, a `<path>.meta.json` sidecar carrying the timestamp.
inline void emit(const JobConfig &job, const std::string &content, std::ostream &out)
{
  if (job.output_path.empty())
  {
    out << content;
    return;
  }
  write_file(job.output_path, content);
  nlohmann::ordered_json meta{{"command", job.command},
                              {"parameters", job.parameters},
                              {"seed", job.seed ? nlohmann::ordered_json(*job.seed) : nlohmann::ordered_json()},
                              {"version", kVersion},
                              {"generated_at_utc", utc_timestamp()}};
  write_file(job.output_path + ".meta.json", meta.dump(2) + "\n");
}

inline std::string fmt(const char *pattern, double value)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// surface

struct SurfaceOptions
{
  std::string case_name = "binary";
  std::string which;
  double      q      = 0.2;
  double      rho_xy = 0.8;
  std::size_t nx     = 41;
  std::size_t ny     = 41;
  double      rx_min = 0.0;
  double      ry_min = 0.0;
  std::optional<double> rx_max;
  std::optional<double> ry_max;
  std::string out;
};

inline int cmd_surface(const SurfaceOptions &o, std::ostream &out, std::ostream &err)
{
  JobConfig job{"surface", {}, o.out, std::nullopt};
  SurfaceGrid s;
  if (o.case_name == "binary")
  {
    const std::string which = o.which.empty() ? "g" : o.which;
    binary::Surface   kind;
    if (which == "g")
      kind = binary::Surface::inner;
    else if (which == "g_star")
      kind = binary::Surface::outer;
    else if (which == "difference")
      kind = binary::Surface::difference;
    else
      throw ArgumentError("binary surfaces are g, g_star or difference, got '" + which + "'");
    const GridSpec grid{o.rx_min, o.rx_max.value_or(1.0), o.nx, o.ry_min, o.ry_max.value_or(1.0), o.ny};
    job.parameters = {{"case", "binary"}, {"which", which}, {"q", o.q}, {"nx", o.nx}, {"ny", o.ny},
                      {"rx_min", grid.x_min}, {"rx_max", grid.x_max}, {"ry_min", grid.y_min}, {"ry_max", grid.y_max}};
    const binary::BinaryEnv env(o.q);
    s = binary::surface(env, grid, kind);
  }
  else
  {
    const std::string which = o.which.empty() ? "G" : o.which;
    gaussian::Surface kind;
    if (which == "G")
      kind = gaussian::Surface::inner;
    else if (which == "G_star")
      kind = gaussian::Surface::outer;
    else if (which == "difference")
      kind = gaussian::Surface::difference;
    else if (which == "hull_gap")
      kind = gaussian::Surface::hull_gap;
    else
      throw ArgumentError("gaussian surfaces are G, G_star, difference or hull_gap, got '" + which + "'");
    const GridSpec grid{o.rx_min, o.rx_max.value_or(4.0), o.nx, o.ry_min, o.ry_max.value_or(4.0), o.ny};
    job.parameters = {{"case", "gaussian"}, {"which", which}, {"rho_xy", o.rho_xy}, {"nx", o.nx}, {"ny", o.ny},
                      {"rx_min", grid.x_min}, {"rx_max", grid.x_max}, {"ry_min", grid.y_min}, {"ry_max", grid.y_max}};
    s = gaussian::surface(o.rho_xy, grid, kind);
  }
  std::ostringstream csv;
  write_csv(csv, s);
  detail::emit(job, csv.str(), out);
  const auto [ax, ay] = s.argmax();
  err << s.label << ": " << s.z.size() << " cells, max " << format_sig12(s.max_z()) << " at (" << format_sig12(ax)
      << ", " << format_sig12(ay) << "), min " << format_sig12(s.min_z()) << "\n";
  if (s.rates_clamped)
  {
    err << "warning: rates above " << format_sig12(gaussian::kRateCap) << " bits were clamped\n";
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// envelope

struct EnvelopeOptions
{
  std::string case_name = "binary";
  double      q         = 0.2;
  double      rho_xy    = 0.8;
  std::size_t grid      = 21;
  std::size_t oracle_n  = 64;
  double      tol       = 1e-6;
  std::string out;
};

inline int cmd_envelope(const EnvelopeOptions &o, std::ostream &out, std::ostream &err)
{
  JobConfig     job{"envelope", {}, o.out, std::nullopt};
  ScalarField2D field;
  GridSpec      grid;
  if (o.case_name == "binary")
  {
    field          = binary::inner_bound_field(binary::BinaryEnv(o.q));
    grid           = GridSpec::square(0.0, 1.0, o.grid);
    job.parameters = {{"case", "binary"}, {"q", o.q}};
  }
  else if (o.case_name == "gaussian")
  {
    field          = gaussian::inner_bound_field(o.rho_xy);
    grid           = GridSpec::square(0.0, 4.0, o.grid);
    job.parameters = {{"case", "gaussian"}, {"rho_xy", o.rho_xy}};
  }
  else
  {
    field          = saturating_product_field();
    grid           = GridSpec::square(0.0, 1.0, o.grid);
    job.parameters = {{"case", "worked"}};
  }
  job.parameters["grid"]        = o.grid;
  job.parameters["oracle_grid"] = o.oracle_n;
  job.parameters["tol"]         = o.tol;

  const SimplificationReport report = check_simplification(field, grid, o.tol, o.oracle_n);
  nlohmann::ordered_json     j{{"case", job.parameters["case"]}};
  nlohmann::ordered_json     body;
  to_json(body, report);
  j.update(body);
  detail::emit(job, j.dump(2) + "\n", out);
  err << "envelope " << o.case_name << ": max gap " << detail::fmt("%.3g", report.max_gap) << " at ("
      << format_sig12(report.argmax_rx) << ", " << format_sig12(report.argmax_ry) << "), "
      << (report.pass ? "pass" : "FAIL") << "\n";
  return report.pass ? kSuccess : kVerifyFailed;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions
{
  double                   q  = 0.2;
  double                   rc = 0.1;
  double                   rx = 0.8;
  double                   ry = 0.8;
  std::optional<double>    qx;
  std::optional<double>    qy;
  std::vector<std::size_t> n_values{8, 12, 16, 20};
  std::size_t              trials = 2000;
  std::optional<double>    delta;
  std::optional<std::string> seed;
  std::string              out;
  std::string              sweep_csv;
  std::size_t              threads       = 1;
  std::size_t              max_rejection = 1'000'000;
};

inline int cmd_simulate(const SimulateOptions &o, std::ostream &out, std::ostream &err)
{
  JobConfig           job{"simulate", {}, o.out, detail::resolve_seed(o.seed)};
  const std::uint64_t seed = *job.seed;
  patrec::detail::require(o.trials >= 1, "trials must be positive");
  patrec::detail::require(!o.n_values.empty(), "at least one block length is required");

  std::vector<sim::CodeConfig> configs;
  for (std::size_t n : o.n_values)
  {
    sim::CodeConfig cfg = sim::CodeConfig::from_rates(n, o.q, o.rc, o.rx, o.ry, seed);
    if (o.qx)
      cfg.qx = *o.qx;
    if (o.qy)
      cfg.qy = *o.qy;
    if (o.delta)
      cfg.delta = *o.delta;
    cfg.max_rejection = o.max_rejection;
    cfg.validate();
    configs.push_back(cfg);
  }
  job.parameters = {{"q", o.q},           {"rc", o.rc},         {"rx", o.rx},
                    {"ry", o.ry},         {"qx", configs.front().qx}, {"qy", configs.front().qy},
                    {"n", o.n_values},    {"trials", o.trials}, {"max_rejection", o.max_rejection}};
  if (o.delta)
  {
    job.parameters["delta"] = *o.delta;
  }

  std::vector<sim::SimulationResult> results;
  std::string                        jsonl;
  std::string                        csv = "n,pe_hat,ci95\n";
  for (const auto &cfg : configs)
  {
    results.push_back(sim::run_trials(cfg, o.trials, o.threads));
    const auto &r = results.back();
    jsonl += to_json(r).dump() + "\n";
    csv += std::to_string(cfg.n) + "," + format_sig12(r.p_e_hat()) + "," + format_sig12(r.ci95()) + "\n";
    err << "n=" << cfg.n << " pe_hat=" << detail::fmt("%.4f", r.p_e_hat()) << " ci95=" << detail::fmt("%.4f", r.ci95())
        << " pe_hat>0.3=" << (r.p_e_hat() > 0.3 ? "yes" : "no") << "\n";
  }
  detail::emit(job, jsonl, out);
  if (!o.sweep_csv.empty())
  {
    detail::write_file(o.sweep_csv, csv);
  }
  if (results.size() > 1)
  {
    const sim::TrendAssessment t = sim::assess_trend(results);
    err << "trend: " << (t.nonincreasing ? "nonincreasing" : "not nonincreasing")
        << " (rises within CI overlap: " << t.overlapping_rises << ", separated rises: " << t.separated_rises << ")\n";
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions
{
  std::vector<std::string>   suites;
  std::optional<std::size_t> cases;
  std::optional<std::string> seed;
  std::string                out;
};

inline int cmd_verify(const VerifyOptions &o, std::ostream &out, std::ostream &err)
{
  JobConfig           job{"verify", {}, o.out, detail::resolve_seed(o.seed)};
  const std::uint64_t seed = *job.seed;
  const std::vector<std::string> suites = o.suites.empty() ? lab::suite_names() : o.suites;
  for (const auto &s : suites)
  {
    const auto &known = lab::suite_names();
    patrec::detail::require(std::find(known.begin(), known.end(), s) != known.end(), "unknown suite: " + s);
  }
  patrec::detail::require(!o.cases || *o.cases >= 1, "cases must be positive");
  job.parameters = {{"suites", suites}};
  if (o.cases)
  {
    job.parameters["cases"] = *o.cases;
  }

  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  bool                   all     = true;
  for (const auto &s : suites)
  {
    const lab::LemmaReport r = lab::run_suite(s, seed, o.cases.value_or(lab::default_cases(s)));
    nlohmann::ordered_json j;
    to_json(j, r);
    reports.push_back(j);
    all = all && r.pass;
    err << s << ": " << r.cases_run << " cases, max violation " << detail::fmt("%.3g", r.max_violation) << ", "
        << (r.pass ? "pass" : "FAIL") << "\n";
  }
  nlohmann::ordered_json doc{{"seed", seed}, {"pass", all}, {"reports", reports}};
  detail::emit(job, doc.dump(2) + "\n", out);
  return all ? kSuccess : kVerifyFailed;
}

// ---------------------------------------------------------------------------
// entry point

/// Parses `args` (without the program name) and runs one command.
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Rate-region surfaces, envelope checks, recognition-code simulation and identity checks.", "patrec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SurfaceOptions so;
  auto          *surface = app.add_subcommand("surface", "Write a bound surface as CSV r_x,r_y,z");
  surface->add_option("--case", so.case_name, "binary or gaussian")
    ->check(CLI::IsMember({"binary", "gaussian"}))
    ->capture_default_str();
  surface->add_option("--which", so.which,
                      "binary: g|g_star|difference (default g); gaussian: G|G_star|difference|hull_gap (default G)");
  surface->add_option("--q", so.q, "binary channel crossover in [0, 0.5]")
    ->check(CLI::Range(0.0, 0.5))
    ->capture_default_str();
  surface->add_option("--rho-xy", so.rho_xy, "Gaussian source correlation in (0, 1]")
    ->check(CLI::Range(0.0, 1.0))
    ->capture_default_str();
  surface->add_option("--nx", so.nx, "grid points along r_x, at least 1")->check(CLI::PositiveNumber)->capture_default_str();
  surface->add_option("--ny", so.ny, "grid points along r_y, at least 1")->check(CLI::PositiveNumber)->capture_default_str();
  surface->add_option("--rx-min", so.rx_min, "smallest r_x, nonnegative")->check(CLI::NonNegativeNumber)->capture_default_str();
  surface->add_option("--ry-min", so.ry_min, "smallest r_y, nonnegative")->check(CLI::NonNegativeNumber)->capture_default_str();
  surface->add_option("--rx-max", so.rx_max, "largest r_x (default 1 binary, 4 gaussian)")->check(CLI::NonNegativeNumber);
  surface->add_option("--ry-max", so.ry_max, "largest r_y (default 1 binary, 4 gaussian)")->check(CLI::NonNegativeNumber);
  surface->add_option("--out", so.out, "CSV output path (default stdout)");

  EnvelopeOptions eo;
  auto           *envelope = app.add_subcommand("envelope", "Compare the ray envelope with the two-point oracle");
  envelope->add_option("--case", eo.case_name, "binary, gaussian or worked")
    ->check(CLI::IsMember({"binary", "gaussian", "worked"}))
    ->capture_default_str();
  envelope->add_option("--q", eo.q, "binary channel crossover in [0, 0.5]")
    ->check(CLI::Range(0.0, 0.5))
    ->capture_default_str();
  envelope->add_option("--rho-xy", eo.rho_xy, "Gaussian source correlation in (0, 1]")
    ->check(CLI::Range(0.0, 1.0))
    ->capture_default_str();
  envelope->add_option("--grid", eo.grid, "grid points per axis, at least 2")->check(CLI::Range(2, 1001))->capture_default_str();
  envelope->add_option("--oracle-grid", eo.oracle_n, "two-point oracle resolution, at least 8")
    ->check(CLI::Range(8, 4096))
    ->capture_default_str();
  envelope->add_option("--tol", eo.tol, "pass threshold on the largest gap, positive")
    ->check(CLI::PositiveNumber)
    ->capture_default_str();
  envelope->add_option("--out", eo.out, "JSON report path (default stdout)");

  SimulateOptions mo;
  auto           *simulate = app.add_subcommand("simulate", "Monte Carlo error rates of the recognition code");
  simulate->add_option("--q", mo.q, "channel crossover in [0, 0.5]")->check(CLI::Range(0.0, 0.5))->capture_default_str();
  simulate->add_option("--rc", mo.rc, "pattern rate, nonnegative")->check(CLI::NonNegativeNumber)->capture_default_str();
  simulate->add_option("--rx", mo.rx, "memory rate in [0, 1]")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  simulate->add_option("--ry", mo.ry, "sensory rate in [0, 1]")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  simulate->add_option("--qx", mo.qx, "memory test-channel crossover in [0, 0.5] (default h^-1(1 - rx))")
    ->check(CLI::Range(0.0, 0.5));
  simulate->add_option("--qy", mo.qy, "sensory test-channel crossover in [0, 0.5] (default h^-1(1 - ry))")
    ->check(CLI::Range(0.0, 0.5));
  simulate->add_option("--n", mo.n_values, "block lengths in [4, 24], comma separated")
    ->delimiter(',')
    ->check(CLI::Range(4, 24))
    ->capture_default_str();
  simulate->add_option("--trials", mo.trials, "trials per block length, at least 1")
    ->check(CLI::PositiveNumber)
    ->capture_default_str();
  simulate->add_option("--delta", mo.delta, "typicality slack in (0, 0.5) (default 0.1 for n <= 12, else 0.05)")
    ->check(CLI::Range(0.0, 0.5));
  simulate->add_option("--seed", mo.seed, "nonnegative integer (default PATREC_SEED, else 2026)");
  simulate->add_option("--out", mo.out, "JSONL output path (default stdout)");
  simulate->add_option("--sweep-csv", mo.sweep_csv, "optional CSV n,pe_hat,ci95 path");
  simulate->add_option("--threads", mo.threads, "worker threads, at least 1")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--max-rejection", mo.max_rejection, "rejection-sampling draw cap per codeword, at least 1")
    ->check(CLI::PositiveNumber)
    ->capture_default_str();

  VerifyOptions vo;
  auto         *verify = app.add_subcommand("verify", "Check information identities on random models");
  verify->add_option("--suites", vo.suites, "comma separated subset of the suite names (default all)")
    ->delimiter(',')
    ->check(CLI::IsMember(lab::suite_names()));
  verify->add_option("--cases", vo.cases, "cases per suite, at least 1 (default 10000 or 1000 per suite)");
  verify->add_option("--seed", vo.seed, "nonnegative integer (default PATREC_SEED, else 2026)");
  verify->add_option("--out", vo.out, "JSON report path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try
  {
    app.parse(std::move(reversed));
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try
  {
    if (surface->parsed())
      return cmd_surface(so, out, err);
    if (envelope->parsed())
      return cmd_envelope(eo, out, err);
    if (simulate->parsed())
      return cmd_simulate(mo, out, err);
    return cmd_verify(vo, out, err);
  }
  catch (const IoError &e)
  {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  catch (const ArgumentError &e)
  {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << "\n";
    return kVerifyFailed;
  }
}

}  // namespace patrec::cli
