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
#include "patrec/numerics.hpp"
#include "patrec/surface_grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

// Jointly Gaussian pattern X and observation Y with unit variances; U and V
// are Gaussian descriptions of X and Y. Every quantity below depends only on
// the correlation coefficients.
namespace patrec::gaussian {

/// Rates are clamped to this many bits per symbol.
inline constexpr double kRateCap = 8.0;

/// Correlations whose magnitude exceeds this make the MI overflow.
inline constexpr double kCorrelationCap = 1.0 - 1e-6;

namespace detail {

inline double log2_of(double x) { return std::log(x) / std::numbers::ln2; }

inline void require_rate(double r)
{
  patrec::detail::require(!std::isnan(r) && r >= 0.0, "gaussian: rates must be nonnegative");
}

inline void require_rho_xy(double rho_xy)
{
  patrec::detail::require(rho_xy >= 0.0 && rho_xy < 1.0, "gaussian: rho_xy must lie in [0, 1)");
}

}  // namespace detail

inline double clamp_rate(double r)
{
  detail::require_rate(r);
  return std::min(r, kRateCap);
}

/// Correlation of a Gaussian test channel carrying `r` bits: sqrt(1 - 2^-2r).
inline double rho_from_rate(double r)
{
  const double capped = clamp_rate(r);
  return std::sqrt(-std::expm1(-2.0 * capped * std::numbers::ln2));
}

/// 2^-2r, i.e. 1 - rho_from_rate(r)^2 without cancellation.
inline double residual_from_rate(double r) { return std::exp2(-2.0 * clamp_rate(r)); }

/// Inner-bound pattern rate -1/2 log(1 - (rho_xy rho_xu rho_yv)^2).
inline double inner_bound(double rho_xy, double r_x, double r_y)
{
  detail::require_rho_xy(rho_xy);
  const double p = rho_from_rate(r_x);
  const double s = rho_from_rate(r_y);
  const double c = rho_xy * p * s;
  return -0.5 * std::log1p(-c * c) / std::numbers::ln2;
}

inline ScalarField2D inner_bound_field(double rho_xy)
{
  detail::require_rho_xy(rho_xy);
  return ScalarField2D{[rho_xy](double x, double y) { return inner_bound(rho_xy, x, y); }, kRateCap,
                       kRateCap};
}

/// Coefficients of the stationarity condition gamma t^2 - beta t + gamma = 0
/// for the U-V correlation, and its root inside (0, 1).
struct OuterBoundTerms
{
  double gamma       = 0.0;
  double beta        = 0.0;
  double rho_star    = 0.0;
  double margin      = 0.0;  ///< beta - 2 gamma
  bool   on_boundary = false;
};

inline OuterBoundTerms outer_bound_terms(double rho_xy, double rho_xu, double rho_yv)
{
  if (rho_xy == 0.0 || rho_xu == 0.0 || rho_yv == 0.0)
  {
    throw DegenerateInputError("gaussian: zero correlation leaves the stationary point undefined");
  }
  patrec::detail::require(rho_xy > 0.0 && rho_xy <= 1.0, "gaussian: rho_xy must lie in (0, 1]");
  patrec::detail::require(rho_xu > 0.0 && rho_xu < 1.0 && rho_yv > 0.0 && rho_yv < 1.0,
                          "gaussian: rho_xu and rho_yv must lie in (0, 1)");
  OuterBoundTerms t;
  const double    p2 = rho_xu * rho_xu;
  const double    s2 = rho_yv * rho_yv;
  t.gamma            = rho_xy * rho_xu * rho_yv;
  t.beta             = p2 + s2 - (1.0 - rho_xy * rho_xy) * p2 * s2;
  // (1 - gamma)^2 - (1 - p^2)(1 - s^2), free of the cancellation in beta - 2 gamma.
  t.margin = (1.0 - t.gamma) * (1.0 - t.gamma) - (1.0 - p2) * (1.0 - s2);
  if (t.margin < -1e-12)
  {
    throw ConsistencyError("gaussian: beta < 2 gamma");
  }
  t.margin      = std::max(t.margin, 0.0);
  t.on_boundary = t.margin <= 1e-12;
  t.rho_star    = 2.0 * t.gamma / (t.beta + std::sqrt(t.margin * (t.margin + 4.0 * t.gamma)));
  return t;
}

/// Outer-bound pattern rate: r_x + r_y - I(XY;UV) minimised over the U-V
/// correlation with both rate constraints tight. Zero whenever a rate or
/// rho_xy is zero.
inline double outer_bound(double rho_xy, double r_x, double r_y)
{
  detail::require_rho_xy(rho_xy);
  const double rx = clamp_rate(r_x);
  const double ry = clamp_rate(r_y);
  if (rx == 0.0 || ry == 0.0 || rho_xy == 0.0)
  {
    return 0.0;
  }
  const auto   terms = outer_bound_terms(rho_xy, rho_from_rate(rx), rho_from_rate(ry));
  const double d     = terms.rho_star - terms.gamma;
  const double num   = 1.0 - d * d * std::exp2(2.0 * (rx + ry));
  const double den   = (1.0 - terms.rho_star) * (1.0 + terms.rho_star);
  return std::max(0.0, 0.5 * detail::log2_of(num / den));
}

inline ScalarField2D outer_bound_field(double rho_xy)
{
  detail::require_rho_xy(rho_xy);
  return ScalarField2D{[rho_xy](double x, double y) { return outer_bound(rho_xy, x, y); }, kRateCap,
                       kRateCap};
}

/// Correlation of A and C when A - B - C is a Gaussian Markov chain.
inline double markov_correlation_check(double rho_ab, double rho_bc)
{
  patrec::detail::require(std::abs(rho_ab) <= 1.0 && std::abs(rho_bc) <= 1.0,
                          "gaussian: correlations must have magnitude at most 1");
  return rho_ab * rho_bc;
}

struct CorrelationSet
{
  double                rho_xy = 0.0;
  double                rho_xu = 0.0;
  double                rho_yv = 0.0;
  std::optional<double> rho_uv;

  /// Correlation matrix over (X, Y, U, V) under U - X - Y and X - Y - V.
  Eigen::Matrix4d matrix() const
  {
    patrec::detail::require(rho_uv.has_value(), "gaussian: rho_uv is not set");
    const double    rho_yu = markov_correlation_check(rho_xy, rho_xu);
    const double    rho_xv = markov_correlation_check(rho_xy, rho_yv);
    Eigen::Matrix4d c;
    c << 1.0, rho_xy, rho_xu, rho_xv,  //
      rho_xy, 1.0, rho_yu, rho_yv,     //
      rho_xu, rho_yu, 1.0, *rho_uv,    //
      rho_xv, rho_yv, *rho_uv, 1.0;
    return c;
  }
};

namespace detail {

// I(XY;UV) from the conditional covariance of XY given UV. Returns +inf when
// the conditional covariance is singular.
inline double determinant_mi(const Eigen::Matrix4d &c)
{
  const Eigen::Matrix2d c_xy    = c.topLeftCorner<2, 2>();
  const Eigen::Matrix2d c_uv    = c.bottomRightCorner<2, 2>();
  const Eigen::Matrix2d c_cross = c.topRightCorner<2, 2>();
  const double          det_uv  = c_uv.determinant();
  if (det_uv <= 0.0)
  {
    return std::numeric_limits<double>::infinity();
  }
  const Eigen::Matrix2d schur     = c_xy - c_cross * c_uv.inverse() * c_cross.transpose();
  const double          det_schur = schur.determinant();
  if (det_schur <= 0.0)
  {
    return std::numeric_limits<double>::infinity();
  }
  return 0.5 * log2_of(c_xy.determinant() / det_schur);
}

}  // namespace detail

/// I(XY;UV) in bits from the 4x4 correlation matrix. Throws ArgumentError if
/// the matrix is not PSD and OverflowError near the singular limit.
inline double gaussian_mi_xyuv(const CorrelationSet &cs)
{
  patrec::detail::require(cs.rho_uv.has_value(), "gaussian: rho_uv is not set");
  for (double r : {cs.rho_xy, cs.rho_xu, cs.rho_yv, *cs.rho_uv})
  {
    patrec::detail::require(std::isfinite(r) && std::abs(r) <= 1.0,
                            "gaussian: correlations must have magnitude at most 1");
    if (std::abs(r) > kCorrelationCap)
    {
      throw OverflowError("gaussian: correlation too close to 1, mutual information diverges");
    }
  }
  const Eigen::Matrix4d                          c = cs.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(c, Eigen::EigenvaluesOnly);
  patrec::detail::require(eig.eigenvalues().minCoeff() >= -1e-12,
                          "gaussian: correlation matrix is not positive semidefinite");
  const double mi = detail::determinant_mi(c);
  if (!std::isfinite(mi))
  {
    throw OverflowError("gaussian: singular conditional covariance, mutual information diverges");
  }
  return std::max(0.0, mi);
}

/// Rational form -1/2 log(1 + (2 rho_uv gamma - beta) / (1 - rho_uv^2)).
inline double closed_form_mi_xyuv(const CorrelationSet &cs)
{
  patrec::detail::require(cs.rho_uv.has_value(), "gaussian: rho_uv is not set");
  const double p2    = cs.rho_xu * cs.rho_xu;
  const double s2    = cs.rho_yv * cs.rho_yv;
  const double gamma = cs.rho_xy * cs.rho_xu * cs.rho_yv;
  const double beta  = p2 + s2 - (1.0 - cs.rho_xy * cs.rho_xy) * p2 * s2;
  const double t     = *cs.rho_uv;
  return -0.5 * detail::log2_of(1.0 + (2.0 * t * gamma - beta) / (1.0 - t * t));
}

/// Range of rho_uv keeping the 4x4 correlation matrix PSD. The determinant
/// is quadratic in rho_uv; its roots are recovered from three samples.
inline std::pair<double, double> feasible_rho_uv_interval(double rho_xy, double rho_xu, double rho_yv)
{
  auto det_at = [&](double t) { return CorrelationSet{rho_xy, rho_xu, rho_yv, t}.matrix().determinant(); };
  const double dm = det_at(-0.5);
  const double d0 = det_at(0.0);
  const double dp = det_at(0.5);
  const double a  = 2.0 * (dp + dm - 2.0 * d0);
  const double b  = dp - dm;
  const double c  = d0;
  if (a >= 0.0)
  {
    return {-1.0, 1.0};
  }
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  const double root = std::sqrt(disc);
  double       lo   = (-b + root) / (2.0 * a);
  double       hi   = (-b - root) / (2.0 * a);
  if (lo > hi)
  {
    std::swap(lo, hi);
  }
  return {std::max(lo, -1.0), std::min(hi, 1.0)};
}

/// Numerical minimiser of the determinant-form I(XY;UV) over the feasible
/// rho_uv: 4096-point scan then golden refinement.
inline double sweep_optimize_rho_uv(double rho_xy, double rho_xu, double rho_yv)
{
  patrec::detail::require(rho_xy > 0.0 && rho_xy < 1.0 && rho_xu > 0.0 && rho_xu < 1.0 && rho_yv > 0.0 &&
                            rho_yv < 1.0,
                          "gaussian: correlations must lie in (0, 1)");
  const auto [lo, hi] = feasible_rho_uv_interval(rho_xy, rho_xu, rho_yv);
  auto neg_mi         = [&](double t) {
    return -detail::determinant_mi(CorrelationSet{rho_xy, rho_xu, rho_yv, t}.matrix());
  };
  constexpr std::size_t kScan = 4096;
  const double          step  = (hi - lo) / static_cast<double>(kScan);
  std::size_t           best  = 0;
  double                best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kScan; ++k)
  {
    const double v = neg_mi(lo + step * (static_cast<double>(k) + 0.5));
    if (v > best_value)
    {
      best       = k;
      best_value = v;
    }
  }
  const double a = lo + step * (static_cast<double>(best) - 0.5);
  const double b = lo + step * (static_cast<double>(best) + 1.5);
  return numerics::golden_maximize(neg_mi, std::max(a, lo + 0.25 * step), std::min(b, hi - 0.25 * step), 1e-12)
    .x;
}

enum class Surface
{
  inner,
  outer,
  difference,
  hull_gap
};

inline std::string surface_label(Surface which)
{
  switch (which)
  {
  case Surface::inner:
    return "G";
  case Surface::outer:
    return "G_star";
  case Surface::difference:
    return "difference";
  case Surface::hull_gap:
    return "hull_gap";
  }
  return "";
}

/// Requested surface over the grid. Rates above kRateCap are clamped and
/// flagged in the result. hull_gap is the outer bound minus the ray envelope
/// of the inner bound over [0, kRateCap]^2.
inline SurfaceGrid surface(double rho_xy, const GridSpec &grid, Surface which)
{
  grid.validate();
  detail::require_rho_xy(rho_xy);
  detail::require_rate(grid.x_min);
  detail::require_rate(grid.y_min);
  const ScalarField2D inner = inner_bound_field(rho_xy);
  SurfaceGrid         s     = evaluate_surface(grid, surface_label(which), [&](double rx, double ry) {
    rx = clamp_rate(rx);
    ry = clamp_rate(ry);
    switch (which)
    {
    case Surface::inner:
      return inner(rx, ry);
    case Surface::outer:
      return outer_bound(rho_xy, rx, ry);
    case Surface::difference:
      return outer_bound(rho_xy, rx, ry) - inner(rx, ry);
    case Surface::hull_gap:
      return outer_bound(rho_xy, rx, ry) - ray_envelope(inner, rx, ry);
    }
    return 0.0;
  });
  s.rates_clamped = grid.x_max > kRateCap || grid.y_max > kRateCap;
  return s;
}

}  // namespace patrec::gaussian
