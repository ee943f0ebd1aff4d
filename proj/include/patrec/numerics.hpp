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

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

namespace patrec::numerics {

struct Extremum
{
  double x;
  double value;
};

/// Golden-section search for a maximum of `f` on [lo, hi], stopped when the
/// bracket is narrower than `tol`. Endpoint values are also considered.
template <class F>
Extremum golden_maximize(F &&f, double lo, double hi, double tol)
{
  constexpr double kInvPhi = 0.6180339887498949;
  Extremum         best{lo, f(lo)};
  if (double fh = f(hi); fh > best.value)
  {
    best = {hi, fh};
  }
  double a  = lo;
  double b  = hi;
  double c  = b - kInvPhi * (b - a);
  double d  = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 200 && b - a > tol; ++iter)
  {
    if (fc >= fd)
    {
      b  = d;
      d  = c;
      fd = fc;
      c  = b - kInvPhi * (b - a);
      fc = f(c);
    }
    else
    {
      a  = c;
      c  = d;
      fc = fd;
      d  = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  if (fc > best.value)
  {
    best = {c, fc};
  }
  if (fd > best.value)
  {
    best = {d, fd};
  }
  return best;
}

/// Brent's parabolic search for a maximum of `f` on [lo, hi] to about half
/// of double precision in x. Endpoint values are also considered.
template <class F>
Extremum brent_maximize(F &&f, double lo, double hi)
{
  Extremum best{lo, f(lo)};
  if (double fh = f(hi); fh > best.value)
  {
    best = {hi, fh};
  }
  if (hi > lo)
  {
    const auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi,
                                                         std::numeric_limits<double>::digits / 2);
    if (-r.second > best.value)
    {
      best = {r.first, -r.second};
    }
  }
  return best;
}

template <class F>
Extremum golden_minimize(F &&f, double lo, double hi, double tol)
{
  auto r = golden_maximize([&](double x) { return -f(x); }, lo, hi, tol);
  return {r.x, -r.value};
}

/// Grid scan of `points` equally spaced abscissae on [lo, hi] followed by a
/// golden refinement of the bracket around the best sample.
template <class F>
Extremum scan_then_golden_maximize(F &&f, double lo, double hi, std::size_t points, double tol)
{
  if (hi <= lo || points < 2)
  {
    return {lo, f(lo)};
  }
  const double step = (hi - lo) / static_cast<double>(points - 1);
  std::size_t  best = 0;
  double       best_value = f(lo);
  for (std::size_t i = 1; i < points; ++i)
  {
    double x = (i + 1 == points) ? hi : lo + step * static_cast<double>(i);
    double v = f(x);
    if (v > best_value)
    {
      best       = i;
      best_value = v;
    }
  }
  double a = best == 0 ? lo : lo + step * static_cast<double>(best - 1);
  double b = best + 1 >= points ? hi : lo + step * static_cast<double>(best + 1);
  auto   refined = golden_maximize(f, a, b, tol);
  if (refined.value >= best_value)
  {
    return refined;
  }
  return {best + 1 == points ? hi : lo + step * static_cast<double>(best), best_value};
}

/// Nelder-Mead maximisation in N dimensions. `f` receives a std::array and is
/// responsible for handling (e.g. clamping) out-of-box coordinates.
template <std::size_t N, class F>
std::pair<std::array<double, N>, double> nelder_mead_maximize(F                           &&f,
                                                               const std::array<double, N> &start,
                                                               const std::array<double, N> &step,
                                                               std::size_t max_evals,
                                                               double      ftol)
{
  using Point = std::array<double, N>;
  std::array<Point, N + 1>  simplex;
  std::array<double, N + 1> values;
  simplex[0] = start;
  values[0]  = f(start);
  for (std::size_t i = 0; i < N; ++i)
  {
    simplex[i + 1] = start;
    simplex[i + 1][i] += step[i];
    values[i + 1] = f(simplex[i + 1]);
  }
  std::size_t evals = N + 1;

  auto blend = [](const Point &a, const Point &b, double t) {
    Point p;
    for (std::size_t k = 0; k < N; ++k)
    {
      p[k] = a[k] + t * (b[k] - a[k]);
    }
    return p;
  };

  while (evals < max_evals)
  {
    std::array<std::size_t, N + 1> order;
    for (std::size_t i = 0; i <= N; ++i)
    {
      order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] > values[b]; });
    const std::size_t best   = order[0];
    const std::size_t worst  = order[N];
    const std::size_t second = order[N - 1];
    if (std::abs(values[best] - values[worst]) <= ftol)
    {
      double spread = 0.0;
      for (std::size_t i = 0; i <= N; ++i)
      {
        for (std::size_t k = 0; k < N; ++k)
        {
          spread = std::max(spread, std::abs(simplex[i][k] - simplex[best][k]));
        }
      }
      if (spread < 1e-12)
      {
        break;
      }
    }

    Point centroid{};
    for (std::size_t i = 0; i <= N; ++i)
    {
      if (i == worst)
      {
        continue;
      }
      for (std::size_t k = 0; k < N; ++k)
      {
        centroid[k] += simplex[i][k] / static_cast<double>(N);
      }
    }

    Point  reflected = blend(centroid, simplex[worst], -1.0);
    double fr        = f(reflected);
    ++evals;
    if (fr > values[best])
    {
      Point  expanded = blend(centroid, simplex[worst], -2.0);
      double fe       = f(expanded);
      ++evals;
      if (fe > fr)
      {
        simplex[worst] = expanded;
        values[worst]  = fe;
      }
      else
      {
        simplex[worst] = reflected;
        values[worst]  = fr;
      }
      continue;
    }
    if (fr > values[second])
    {
      simplex[worst] = reflected;
      values[worst]  = fr;
      continue;
    }
    const bool outside    = fr > values[worst];
    Point      contracted = outside ? blend(centroid, reflected, 0.5) : blend(centroid, simplex[worst], 0.5);
    double     fc         = f(contracted);
    ++evals;
    if (fc > (outside ? fr : values[worst]))
    {
      simplex[worst] = contracted;
      values[worst]  = fc;
      continue;
    }
    for (std::size_t i = 0; i <= N; ++i)
    {
      if (i == best)
      {
        continue;
      }
      simplex[i] = blend(simplex[best], simplex[i], 0.5);
      values[i]  = f(simplex[i]);
      ++evals;
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= N; ++i)
  {
    if (values[i] > values[best])
    {
      best = i;
    }
  }
  return {simplex[best], values[best]};
}

}  // namespace patrec::numerics
