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

#include "patrec/envelope.hpp"
#include "patrec/errors.hpp"
#include "patrec/info_core.hpp"
#include "patrec/surface_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace patrec::binary {

/// Uniform binary pattern observed through a BSC with crossover `q`.
struct BinaryEnv
{
  double q = 0.0;

  explicit BinaryEnv(double crossover)
    : q(crossover)
  {
    detail::require(q >= 0.0 && q <= 0.5, "binary: crossover must lie in [0, 1/2]");
  }
};

namespace detail {

inline void require_unit_rates(double r_x, double r_y)
{
  patrec::detail::require(r_x >= 0.0 && r_x <= 1.0 && r_y >= 0.0 && r_y <= 1.0,
                          "binary: rates must lie in [0, 1]");
}

}  // namespace detail

/// Test-channel crossover achieving memory/sensory rate `r`: h^-1(1 - r).
inline double test_channel_crossover(double r)
{
  return inverse_binary_entropy(std::clamp(1.0 - r, 0.0, 1.0));
}

/// Inner-bound pattern rate 1 - h(q * q_x * q_y).
inline double inner_bound(const BinaryEnv &env, double r_x, double r_y)
{
  detail::require_unit_rates(r_x, r_y);
  const double q_x = test_channel_crossover(r_x);
  const double q_y = test_channel_crossover(r_y);
  return std::max(0.0, 1.0 - binary_entropy(binary_convolve(binary_convolve(env.q, q_x), q_y)));
}

inline ScalarField2D inner_bound_field(const BinaryEnv &env)
{
  return ScalarField2D{[env](double x, double y) { return inner_bound(env, x, y); }, 1.0, 1.0};
}

/// Upper concave envelope of the inner bound, by scaling along rays.
inline double outer_bound(const BinaryEnv &env, double r_x, double r_y)
{
  detail::require_unit_rates(r_x, r_y);
  return ray_envelope(inner_bound_field(env), r_x, r_y);
}

/// Rate triple of U = X xor W_x, V = Y xor W_y computed from the explicit
/// joint pmf.
inline RateTriple forward_construction_check(const BinaryEnv &env, double q_x, double q_y)
{
  patrec::detail::require(q_x >= 0.0 && q_x <= 0.5 && q_y >= 0.0 && q_y <= 0.5,
                          "binary: test-channel crossovers must lie in [0, 1/2]");
  const JointPMF pmf = build_chain_pmf(make_pmf("X", {0.5, 0.5}), StochasticMatrix::bsc(env.q),
                                       StochasticMatrix::bsc(q_x), StochasticMatrix::bsc(q_y));
  return rate_triple_from_aux(pmf);
}

inline RateTriple forward_construction_closed_form(const BinaryEnv &env, double q_x, double q_y)
{
  return {1.0 - binary_entropy(binary_convolve(binary_convolve(env.q, q_x), q_y)),
          1.0 - binary_entropy(q_x), 1.0 - binary_entropy(q_y)};
}

enum class Surface
{
  inner,
  outer,
  difference
};

inline std::string surface_label(Surface which)
{
  switch (which)
  {
  case Surface::inner:
    return "g";
  case Surface::outer:
    return "g_star";
  case Surface::difference:
    return "difference";
  }
  return "";
}

inline SurfaceGrid surface(const BinaryEnv &env, const GridSpec &grid, Surface which)
{
  grid.validate();
  detail::require_unit_rates(grid.x_min, grid.y_min);
  detail::require_unit_rates(grid.x_max, grid.y_max);
  const ScalarField2D field = inner_bound_field(env);
  return evaluate_surface(grid, surface_label(which), [&](double rx, double ry) {
    switch (which)
    {
    case Surface::inner:
      return field(rx, ry);
    case Surface::outer:
      return ray_envelope(field, rx, ry);
    case Surface::difference:
      return ray_envelope(field, rx, ry) - field(rx, ry);
    }
    return 0.0;
  });
}

}  // namespace patrec::binary
