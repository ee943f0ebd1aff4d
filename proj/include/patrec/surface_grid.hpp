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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace patrec {

/// Rectangular sampling grid over (r_x, r_y).
struct GridSpec
{
  double      x_min = 0.0;
  double      x_max = 1.0;
  std::size_t nx    = 41;
  double      y_min = 0.0;
  double      y_max = 1.0;
  std::size_t ny    = 41;

  static GridSpec square(double lo, double hi, std::size_t n) { return {lo, hi, n, lo, hi, n}; }

  void validate() const
  {
    detail::require(nx >= 1 && ny >= 1, "grid: empty grid");
    detail::require(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
                      std::isfinite(y_max),
                    "grid: bounds must be finite");
    detail::require(nx == 1 || x_max > x_min, "grid: r_x values must be strictly increasing");
    detail::require(ny == 1 || y_max > y_min, "grid: r_y values must be strictly increasing");
  }

  std::vector<double> x_values() const { return axis(x_min, x_max, nx); }
  std::vector<double> y_values() const { return axis(y_min, y_max, ny); }

private:
  static std::vector<double> axis(double lo, double hi, std::size_t n)
  {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    if (n > 1)
    {
      v.back() = hi;
    }
    return v;
  }
};

/// Sampled surface z(r_x, r_y), stored row-major with r_x as the outer index.
struct SurfaceGrid
{
  std::vector<double> r_x_values;
  std::vector<double> r_y_values;
  std::vector<double> z;
  std::string         label;
  bool                rates_clamped = false;

  double at(std::size_t i, std::size_t j) const { return z[i * r_y_values.size() + j]; }

  double max_z() const { return z.empty() ? 0.0 : *std::max_element(z.begin(), z.end()); }
  double min_z() const { return z.empty() ? 0.0 : *std::min_element(z.begin(), z.end()); }

  /// (r_x, r_y) at which max_z is attained (first occurrence).
  std::pair<double, double> argmax() const
  {
    auto        it = std::max_element(z.begin(), z.end());
    std::size_t k  = static_cast<std::size_t>(it - z.begin());
    return {r_x_values[k / r_y_values.size()], r_y_values[k % r_y_values.size()]};
  }
};

template <class F>
SurfaceGrid evaluate_surface(const GridSpec &grid, std::string label, F &&z_of)
{
  grid.validate();
  SurfaceGrid s;
  s.r_x_values = grid.x_values();
  s.r_y_values = grid.y_values();
  s.label      = std::move(label);
  s.z.reserve(s.r_x_values.size() * s.r_y_values.size());
  for (double rx : s.r_x_values)
  {
    for (double ry : s.r_y_values)
    {
      s.z.push_back(z_of(rx, ry));
    }
  }
  return s;
}

/// 12 significant digits, never "-0".
inline std::string format_sig12(double v)
{
  if (v == 0.0)
  {
    v = 0.0;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// CSV with header `r_x,r_y,z`, one row per cell, r_x outer and r_y inner.
inline void write_csv(std::ostream &os, const SurfaceGrid &s)
{
  os << "r_x,r_y,z\n";
  for (std::size_t i = 0; i < s.r_x_values.size(); ++i)
  {
    for (std::size_t j = 0; j < s.r_y_values.size(); ++j)
    {
      os << format_sig12(s.r_x_values[i]) << ',' << format_sig12(s.r_y_values[j]) << ','
         << format_sig12(s.at(i, j)) << '\n';
    }
  }
}

}  // namespace patrec
