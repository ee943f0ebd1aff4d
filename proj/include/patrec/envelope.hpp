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
#include "patrec/numerics.hpp"
#include "patrec/rng.hpp"
#include "patrec/surface_grid.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace patrec {

/// A real surface on the rectangle [0, max_x] x [0, max_y]. The evaluator must
/// be callable concurrently.
struct ScalarField2D
{
  std::function<double(double, double)> evaluator;
  double                                max_x = 1.0;
  double                                max_y = 1.0;

  double operator()(double x, double y) const { return evaluator(x, y); }

  bool contains(double x, double y) const
  {
    return x >= 0.0 && y >= 0.0 && x <= max_x && y <= max_y;
  }

  void require_contains(double x, double y) const
  {
    detail::require(std::isfinite(x) && std::isfinite(y) && contains(x, y),
                    "envelope: point outside the field domain");
  }
};

/// sup over theta in (0, 1] of theta * f(r / theta), restricted to r / theta
/// inside the domain. Scan of 1024 values of theta, then golden refinement.
inline double ray_envelope(const ScalarField2D &field, double rx, double ry)
{
  field.require_contains(rx, ry);
  const double theta_min = std::max(rx / field.max_x, ry / field.max_y);
  if (theta_min <= 0.0)
  {
    return std::max(0.0, field(0.0, 0.0));
  }
  auto scaled = [&](double theta) {
    const double x = std::min(rx / theta, field.max_x);
    const double y = std::min(ry / theta, field.max_y);
    return theta * field(x, y);
  };
  const auto best = numerics::scan_then_golden_maximize(scaled, theta_min, 1.0, 1024, 1e-10);
  return std::max(best.value, field(rx, ry));
}

/// Upper concave envelope evaluated from pairs of points: the maximum of
/// t f(r1) + (1 - t) f(r2) over chords through r. Candidate chords come from
/// a tabulated copy of f scanned along 2 * grid_n directions plus the corner
/// directions; the best few are polished on the exact field by coordinate
/// ascent over the far endpoint and the near distance.
class TwoPointEnvelope
{
public:
  explicit TwoPointEnvelope(ScalarField2D field, std::size_t grid_n = 64)
    : field_(std::move(field))
    , grid_n_(grid_n)
    , table_n_(4 * grid_n + 1)
  {
    detail::require(grid_n_ >= 8, "two_point_envelope: grid_n must be at least 8");
    detail::require(field_.max_x > 0.0 && field_.max_y > 0.0, "two_point_envelope: empty domain");
    table_.resize(table_n_ * table_n_);
    for (std::size_t i = 0; i < table_n_; ++i)
    {
      for (std::size_t j = 0; j < table_n_; ++j)
      {
        table_[i * table_n_ + j] = field_(node_x(i), node_y(j));
      }
    }
  }

  const ScalarField2D &field() const { return field_; }
  std::size_t          grid_n() const { return grid_n_; }

  double operator()(double rx, double ry) const
  {
    field_.require_contains(rx, ry);
    const double at_r = field_(rx, ry);
    double       best = at_r;

    std::vector<Candidate> sweep;
    const std::size_t      n_angles = 2 * grid_n_;
    for (std::size_t k = 0; k < n_angles; ++k)
    {
      sweep.push_back(scan_direction(rx, ry, std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_angles)));
    }

    // Local maxima of the coarse value over the cyclic sequence of directions,
    // best first, plus the directions through the domain corners.
    std::vector<Candidate> seeds;
    for (std::size_t k = 0; k < n_angles; ++k)
    {
      const double v = sweep[k].coarse;
      if (v >= sweep[(k + n_angles - 1) % n_angles].coarse && v > sweep[(k + 1) % n_angles].coarse)
      {
        seeds.push_back(sweep[k]);
      }
    }
    std::sort(seeds.begin(), seeds.end(), [](const Candidate &a, const Candidate &b) { return a.coarse > b.coarse; });
    seeds.resize(std::min<std::size_t>(seeds.size(), kMaxPeaks));
    for (auto [cx, cy] : std::array<std::pair<double, double>, 4>{
           {{0.0, 0.0}, {field_.max_x, 0.0}, {0.0, field_.max_y}, {field_.max_x, field_.max_y}}})
    {
      if (cx != rx || cy != ry)
      {
        Candidate through_corner = scan_direction(rx, ry, std::atan2(ry - cy, rx - cx));
        through_corner.b         = 1.0;
        seeds.push_back(through_corner);
      }
    }
    for (const Candidate &seed : seeds)
    {
      if (seed.coarse > -std::numeric_limits<double>::infinity())
      {
        best = std::max(best, refine(rx, ry, seed));
      }
    }
    return best;
  }

private:
  static constexpr std::size_t kMaxPeaks = 3;

  struct Candidate
  {
    double coarse;
    double phi;
    double a;
    double b;
  };

  double node_x(std::size_t i) const
  {
    return field_.max_x * static_cast<double>(i) / static_cast<double>(table_n_ - 1);
  }
  double node_y(std::size_t j) const
  {
    return field_.max_y * static_cast<double>(j) / static_cast<double>(table_n_ - 1);
  }

  double tabulated(double x, double y) const
  {
    const double      u  = std::clamp(x / field_.max_x, 0.0, 1.0) * static_cast<double>(table_n_ - 1);
    const double      v  = std::clamp(y / field_.max_y, 0.0, 1.0) * static_cast<double>(table_n_ - 1);
    const std::size_t i  = std::min(static_cast<std::size_t>(u), table_n_ - 2);
    const std::size_t j  = std::min(static_cast<std::size_t>(v), table_n_ - 2);
    const double      fu = u - static_cast<double>(i);
    const double      fv = v - static_cast<double>(j);
    const double     *row0 = &table_[i * table_n_ + j];
    const double     *row1 = row0 + table_n_;
    return (1 - fu) * ((1 - fv) * row0[0] + fv * row0[1]) + fu * ((1 - fv) * row1[0] + fv * row1[1]);
  }

  // Largest s >= 0 with (rx, ry) + s (dx, dy) inside the domain.
  double reach(double rx, double ry, double dx, double dy) const
  {
    double s = std::numeric_limits<double>::infinity();
    if (dx > 1e-15)
    {
      s = std::min(s, (field_.max_x - rx) / dx);
    }
    else if (dx < -1e-15)
    {
      s = std::min(s, -rx / dx);
    }
    if (dy > 1e-15)
    {
      s = std::min(s, (field_.max_y - ry) / dy);
    }
    else if (dy < -1e-15)
    {
      s = std::min(s, -ry / dy);
    }
    return std::max(0.0, s);
  }

  // Best chord on the line through r with direction phi, from the table.
  Candidate scan_direction(double rx, double ry, double phi) const
  {
    const double dx = std::cos(phi);
    const double dy = std::sin(phi);
    const double s1 = reach(rx, ry, dx, dy);
    const double s2 = reach(rx, ry, -dx, -dy);
    Candidate best{-std::numeric_limits<double>::infinity(), phi, 0.0, 0.0};
    if (s1 <= 0.0 || s2 <= 0.0)
    {
      return best;
    }
    const std::size_t   n = grid_n_;
    std::vector<double> fwd(n + 1);
    std::vector<double> bwd(n + 1);
    for (std::size_t k = 1; k <= n; ++k)
    {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      fwd[k] = tabulated(std::clamp(rx + t * s1 * dx, 0.0, field_.max_x),
                         std::clamp(ry + t * s1 * dy, 0.0, field_.max_y));
      bwd[k] = tabulated(std::clamp(rx - t * s2 * dx, 0.0, field_.max_x),
                         std::clamp(ry - t * s2 * dy, 0.0, field_.max_y));
    }
    for (std::size_t i = 1; i <= n; ++i)
    {
      const double a = static_cast<double>(i) / static_cast<double>(n);
      for (std::size_t j = 1; j <= n; ++j)
      {
        const double b     = static_cast<double>(j) / static_cast<double>(n);
        const double d1    = a * s1;
        const double d2    = b * s2;
        const double value = (d2 * fwd[i] + d1 * bwd[j]) / (d1 + d2);
        if (value > best.coarse)
        {
          best = {value, phi, a, b};
        }
      }
    }
    return best;
  }

  // Exact chord value with far endpoint r2 = (x2, y2) inside the domain and
  // the near endpoint r1 at distance d1 beyond r on the line from r2 through r.
  double chord(double rx, double ry, double x2, double y2, double d1) const
  {
    return chord(rx, ry, x2, y2, d1, std::numeric_limits<double>::quiet_NaN());
  }

  // As above with f(x2, y2) supplied when already known (NaN otherwise).
  double chord(double rx, double ry, double x2, double y2, double d1, double f2) const
  {
    const double d2 = std::hypot(rx - x2, ry - y2);
    if (d2 <= 1e-14 || d1 <= 0.0)
    {
      return field_(rx, ry);
    }
    const double dx = (rx - x2) / d2;
    const double dy = (ry - y2) / d2;
    d1              = std::min(d1, reach(rx, ry, dx, dy));
    if (d1 <= 0.0)
    {
      return field_(rx, ry);
    }
    const double f1 = field_(std::clamp(rx + d1 * dx, 0.0, field_.max_x),
                             std::clamp(ry + d1 * dy, 0.0, field_.max_y));
    return (d2 * f1 + d1 * (std::isnan(f2) ? field_(x2, y2) : f2)) / (d1 + d2);
  }

  double reach_from(double rx, double ry, double x2, double y2) const
  {
    const double d2 = std::hypot(rx - x2, ry - y2);
    return d2 <= 1e-14 ? 0.0 : reach(rx, ry, (rx - x2) / d2, (ry - y2) / d2);
  }

  // Coordinate ascent over (x2, y2, d1). Each coordinate is maximised by
  // golden section in a bracket clipped to the domain; a bracket doubles when
  // its optimum lands on an edge and otherwise relaxes back to one grid cell.
  double refine(double rx, double ry, const Candidate &c) const
  {
    const double dx    = std::cos(c.phi);
    const double dy    = std::sin(c.phi);
    const double d2    = c.b * reach(rx, ry, -dx, -dy);
    double       x2    = std::clamp(rx - d2 * dx, 0.0, field_.max_x);
    double       y2    = std::clamp(ry - d2 * dy, 0.0, field_.max_y);
    double       d1    = c.a * reach(rx, ry, dx, dy);
    double       best  = chord(rx, ry, x2, y2, d1);
    const double cell  = 2.0 * std::max(field_.max_x, field_.max_y) / static_cast<double>(grid_n_);
    std::array<double, 3> width{cell, cell, cell};

    auto step = [&](std::size_t k, double &coord, double lo, double hi, auto &&objective) {
      const double a  = std::max(lo, coord - width[k]);
      const double b  = std::min(hi, coord + width[k]);
      auto         bx = numerics::brent_maximize(objective, a, b);
      const bool   at_edge = (bx.x - a < 1e-9 && a > lo) || (b - bx.x < 1e-9 && b < hi);
      width[k]             = at_edge ? 2.0 * width[k] : std::max(cell, 0.5 * width[k]);
      if (bx.value > best)
      {
        coord = bx.x;
        best  = bx.value;
      }
      return at_edge;
    };

    for (int sweep = 0; sweep < 80; ++sweep)
    {
      const double before = best;
      bool         moving = false;
      moving |= step(0, x2, 0.0, field_.max_x, [&](double v) { return chord(rx, ry, v, y2, d1); });
      moving |= step(1, y2, 0.0, field_.max_y, [&](double v) { return chord(rx, ry, x2, v, d1); });
      const double limit = reach_from(rx, ry, x2, y2);
      d1                 = std::min(d1, limit);
      const double f2    = field_(x2, y2);
      moving |= step(2, d1, 0.0, limit, [&](double v) { return chord(rx, ry, x2, y2, v, f2); });
      if (!moving && best - before <= 1e-15)
      {
        break;
      }
    }
    return best;
  }

  ScalarField2D       field_;
  std::size_t         grid_n_;
  std::size_t         table_n_;
  std::vector<double> table_;
};

/// (1 - (1 - x)^2)(1 - (1 - y)^2) on [0, 1]^2: zero on both axes, increasing
/// and concave in each coordinate.
inline ScalarField2D saturating_product_field()
{
  return ScalarField2D{[](double x, double y) { return (1.0 - (1.0 - x) * (1.0 - x)) * (1.0 - (1.0 - y) * (1.0 - y)); },
                       1.0, 1.0};
}

/// One-shot two-point envelope value. Builds the lookup table on each call;
/// construct a TwoPointEnvelope directly when evaluating many points.
inline double two_point_envelope(const ScalarField2D &field, double rx, double ry, std::size_t grid_n = 64)
{
  return TwoPointEnvelope(field, grid_n)(rx, ry);
}

struct SimplificationReport
{
  double      max_gap                     = 0.0;
  double      argmax_rx                   = 0.0;
  double      argmax_ry                   = 0.0;
  std::size_t cells                       = 0;
  std::size_t precondition_samples        = 0;
  std::size_t precondition_samples_failed = 0;
  std::size_t axis_samples_nonzero        = 0;
  double      tol                         = 0.0;
  bool        pass                        = false;
};

inline void to_json(nlohmann::ordered_json &j, const SimplificationReport &r)
{
  j = nlohmann::ordered_json{{"max_gap", r.max_gap},
                             {"argmax_rx", r.argmax_rx},
                             {"argmax_ry", r.argmax_ry},
                             {"cells", r.cells},
                             {"precondition_samples", r.precondition_samples},
                             {"precondition_samples_failed", r.precondition_samples_failed},
                             {"axis_samples_nonzero", r.axis_samples_nonzero},
                             {"tol", r.tol},
                             {"pass", r.pass}};
}

namespace detail {

// Counts sampled interior points where f_x > 0, f_y > 0, f_xx < 0, f_yy < 0
// fails under central differences with step 1e-4.
inline std::size_t curvature_failures(const ScalarField2D &field, std::size_t samples)
{
  constexpr double h = 1e-4;
  CounterRng       rng(0x5eed'c0ffee'2026ULL);
  std::size_t      failed = 0;
  for (std::size_t k = 0; k < samples; ++k)
  {
    const double x   = field.max_x * (0.01 + 0.98 * rng.uniform());
    const double y   = field.max_y * (0.01 + 0.98 * rng.uniform());
    const double f0  = field(x, y);
    const double fxp = field(x + h, y);
    const double fxm = field(x - h, y);
    const double fyp = field(x, y + h);
    const double fym = field(x, y - h);
    const bool   ok  = fxp - fxm > 0.0 && fyp - fym > 0.0 && fxp - 2 * f0 + fxm < 0.0 &&
                    fyp - 2 * f0 + fym < 0.0;
    failed += ok ? 0 : 1;
  }
  return failed;
}

inline std::size_t nonzero_axis_samples(const ScalarField2D &field, std::size_t per_axis)
{
  std::size_t count = 0;
  for (std::size_t k = 0; k < per_axis; ++k)
  {
    const double t = static_cast<double>(k) / static_cast<double>(per_axis - 1);
    count += std::abs(field(t * field.max_x, 0.0)) > 1e-12 ? 1 : 0;
    count += std::abs(field(0.0, t * field.max_y)) > 1e-12 ? 1 : 0;
  }
  return count;
}

}  // namespace detail

/// Compares ray_envelope against the two-point oracle on every grid cell.
/// Passes iff the largest absolute disagreement is at most `tol`; the
/// curvature and zero-axis conditions are sampled and reported only.
inline SimplificationReport check_simplification(const ScalarField2D &field,
                                                 const GridSpec      &grid,
                                                 double               tol,
                                                 std::size_t          grid_n = 64)
{
  grid.validate();
  TwoPointEnvelope     oracle(field, grid_n);
  SimplificationReport report;
  report.tol = tol;
  for (double rx : grid.x_values())
  {
    for (double ry : grid.y_values())
    {
      const double gap = std::abs(ray_envelope(field, rx, ry) - oracle(rx, ry));
      if (gap > report.max_gap || report.cells == 0)
      {
        report.max_gap   = gap;
        report.argmax_rx = rx;
        report.argmax_ry = ry;
      }
      ++report.cells;
    }
  }
  report.precondition_samples        = 100;
  report.precondition_samples_failed = detail::curvature_failures(field, report.precondition_samples);
  report.axis_samples_nonzero        = detail::nonzero_axis_samples(field, 21);
  report.pass                        = report.max_gap <= tol;
  return report;
}

}  // namespace patrec
