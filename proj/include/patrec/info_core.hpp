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

// Exact discrete information measures over small dense joint tables.
//
// All logarithms are base 2 and 0 log 0 = 0. Measures that must be
// nonnegative are clamped to zero when round-off leaves them within
// kRoundOff below zero; anything more negative raises ConsistencyError.

#include "patrec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace patrec {

using VarSet = std::vector<std::string>;

inline constexpr double      kRoundOff         = 1e-12;
inline constexpr std::size_t kMaxVariables     = 4;
inline constexpr std::size_t kMaxAlphabetSize  = 16;
inline constexpr double      kDefaultMarkovTol = 1e-10;

namespace detail {

inline double clamp_nonnegative(double value, const char *what)
{
  if (value >= 0.0)
  {
    return value;
  }
  if (value >= -kRoundOff)
  {
    return 0.0;
  }
  throw ConsistencyError(std::string(what) + " is negative beyond round-off: " +
                         std::to_string(value));
}

inline double plogp_sum(std::span<const double> table)
{
  double h = 0.0;
  for (double p : table)
  {
    if (p > 0.0)
    {
      h -= p * std::log2(p);
    }
  }
  return h;
}

}  // namespace detail

/// Dense joint probability table over up to four named discrete variables.
///
/// Entries are stored row-major: the first variable is the most significant
/// index. Construction validates nonnegativity and unit mass (within 1e-12).
class JointPMF
{
public:
  JointPMF(VarSet names, std::vector<std::size_t> alphabet_sizes, std::vector<double> probs)
    : names_(std::move(names))
    , sizes_(std::move(alphabet_sizes))
    , probs_(std::move(probs))
  {
    detail::require(!names_.empty(), "JointPMF: at least one variable required");
    detail::require(names_.size() <= kMaxVariables, "JointPMF: at most four variables");
    detail::require(names_.size() == sizes_.size(), "JointPMF: one alphabet size per variable");
    for (std::size_t i = 0; i < names_.size(); ++i)
    {
      detail::require(!names_[i].empty(), "JointPMF: empty variable name");
      detail::require(std::count(names_.begin(), names_.end(), names_[i]) == 1,
                      "JointPMF: duplicate variable name '" + names_[i] + "'");
      detail::require(sizes_[i] >= 1 && sizes_[i] <= kMaxAlphabetSize,
                      "JointPMF: alphabet sizes must lie in [1, 16]");
    }
    std::size_t cells = 1;
    strides_.assign(sizes_.size(), 1);
    for (std::size_t i = sizes_.size(); i-- > 0;)
    {
      strides_[i] = cells;
      cells *= sizes_[i];
    }
    detail::require(probs_.size() == cells, "JointPMF: table size does not match alphabet sizes");
    double total = 0.0;
    for (double p : probs_)
    {
      detail::require(std::isfinite(p) && p >= 0.0, "JointPMF: entries must be nonnegative");
      total += p;
    }
    detail::require(std::abs(total - 1.0) <= 1e-12, "JointPMF: entries must sum to 1");
  }

  const VarSet                   &names() const { return names_; }
  const std::vector<std::size_t> &alphabet_sizes() const { return sizes_; }
  const std::vector<double>      &probs() const { return probs_; }
  std::size_t                     num_variables() const { return names_.size(); }
  std::size_t                     num_cells() const { return probs_.size(); }

  bool has_variable(std::string_view name) const
  {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
  }

  std::size_t index_of(std::string_view name) const
  {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
    {
      throw ArgumentError("unknown variable '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - names_.begin());
  }

  std::size_t alphabet_size(std::string_view name) const { return sizes_[index_of(name)]; }

  std::size_t flat_index(std::span<const std::size_t> symbols) const
  {
    detail::require(symbols.size() == sizes_.size(), "JointPMF: wrong number of symbols");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < symbols.size(); ++i)
    {
      detail::require(symbols[i] < sizes_[i], "JointPMF: symbol out of range");
      flat += symbols[i] * strides_[i];
    }
    return flat;
  }

  /// Symbol of variable `var` in flat cell `flat`.
  std::size_t symbol(std::size_t flat, std::size_t var) const
  {
    return (flat / strides_[var]) % sizes_[var];
  }

  double operator()(std::span<const std::size_t> symbols) const
  {
    return probs_[flat_index(symbols)];
  }

  /// Marginal table over `vars`, in the order given (first = most significant).
  std::vector<double> marginal(const VarSet &vars) const
  {
    std::vector<std::size_t> idx = indices_of(vars);
    std::vector<std::size_t> sub_strides(idx.size(), 1);
    std::size_t              cells = 1;
    for (std::size_t k = idx.size(); k-- > 0;)
    {
      sub_strides[k] = cells;
      cells *= sizes_[idx[k]];
    }
    std::vector<double> out(cells, 0.0);
    for (std::size_t flat = 0; flat < probs_.size(); ++flat)
    {
      if (probs_[flat] == 0.0)
      {
        continue;
      }
      std::size_t sub = 0;
      for (std::size_t k = 0; k < idx.size(); ++k)
      {
        sub += symbol(flat, idx[k]) * sub_strides[k];
      }
      out[sub] += probs_[flat];
    }
    return out;
  }

  JointPMF marginal_pmf(const VarSet &vars) const
  {
    std::vector<std::size_t> sizes;
    for (const auto &v : vars)
    {
      sizes.push_back(alphabet_size(v));
    }
    auto   table = marginal(vars);
    double total = std::accumulate(table.begin(), table.end(), 0.0);
    for (double &p : table)
    {
      p /= total;
    }
    return JointPMF(vars, std::move(sizes), std::move(table));
  }

  std::vector<std::size_t> indices_of(const VarSet &vars) const
  {
    detail::require(!vars.empty(), "variable subset must be nonempty");
    std::vector<std::size_t> idx;
    idx.reserve(vars.size());
    for (const auto &v : vars)
    {
      std::size_t i = index_of(v);
      detail::require(std::find(idx.begin(), idx.end(), i) == idx.end(),
                      "variable '" + v + "' listed twice");
      idx.push_back(i);
    }
    return idx;
  }

private:
  VarSet                   names_;
  std::vector<std::size_t> sizes_;
  std::vector<double>      probs_;
  std::vector<std::size_t> strides_;
};

/// Row-stochastic conditional table p(col | row).
class StochasticMatrix
{
public:
  StochasticMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows)
    , cols_(cols)
    , entries_(std::move(entries))
  {
    detail::require(rows_ >= 1 && cols_ >= 1, "StochasticMatrix: empty shape");
    detail::require(rows_ <= kMaxAlphabetSize && cols_ <= kMaxAlphabetSize,
                    "StochasticMatrix: alphabet sizes must lie in [1, 16]");
    detail::require(entries_.size() == rows_ * cols_, "StochasticMatrix: wrong entry count");
    for (std::size_t r = 0; r < rows_; ++r)
    {
      double total = 0.0;
      for (std::size_t c = 0; c < cols_; ++c)
      {
        double p = entries_[r * cols_ + c];
        detail::require(std::isfinite(p) && p >= 0.0, "StochasticMatrix: negative entry");
        total += p;
      }
      detail::require(std::abs(total - 1.0) <= 1e-12, "StochasticMatrix: row does not sum to 1");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double      operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  static StochasticMatrix identity(std::size_t n)
  {
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
      e[i * n + i] = 1.0;
    }
    return {n, n, std::move(e)};
  }

  static StochasticMatrix uniform(std::size_t rows, std::size_t cols)
  {
    return {rows, cols, std::vector<double>(rows * cols, 1.0 / static_cast<double>(cols))};
  }

  /// Binary symmetric channel with crossover probability `q`.
  static StochasticMatrix bsc(double q)
  {
    detail::require(q >= 0.0 && q <= 1.0, "bsc: crossover must lie in [0, 1]");
    return {2, 2, {1.0 - q, q, q, 1.0 - q}};
  }

private:
  std::size_t         rows_;
  std::size_t         cols_;
  std::vector<double> entries_;
};

/// (R_c, R_x, R_y) in bits per symbol.
struct RateTriple
{
  double r_c = 0.0;
  double r_x = 0.0;
  double r_y = 0.0;
};

inline double entropy(const JointPMF &pmf, const VarSet &vars)
{
  auto table = pmf.marginal(vars);
  return detail::clamp_nonnegative(detail::plogp_sum(table), "entropy");
}

/// h(p) = -p log p - (1-p) log(1-p).
inline double binary_entropy(double p)
{
  detail::require(p >= 0.0 && p <= 1.0, "binary_entropy: p must lie in [0, 1]");
  double h = 0.0;
  if (p > 0.0)
  {
    h -= p * std::log2(p);
  }
  if (p < 1.0)
  {
    h -= (1.0 - p) * std::log2(1.0 - p);
  }
  return h;
}

/// The unique q in [0, 1/2] with h(q) = t, by bisection (200 steps max or
/// bracket below 1e-14).
inline double inverse_binary_entropy(double t)
{
  detail::require(t >= 0.0 && t <= 1.0, "inverse_binary_entropy: t must lie in [0, 1]");
  if (t == 0.0)
  {
    return 0.0;
  }
  if (t == 1.0)
  {
    return 0.5;
  }
  double lo = 0.0;
  double hi = 0.5;
  for (int iter = 0; iter < 200 && hi - lo >= 1e-14; ++iter)
  {
    double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < t)
    {
      lo = mid;
    }
    else
    {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// a * b = a(1-b) + b(1-a): crossover of two cascaded binary symmetric channels.
inline double binary_convolve(double a, double b)
{
  detail::require(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0,
                  "binary_convolve: arguments must lie in [0, 1]");
  return a * (1.0 - b) + b * (1.0 - a);
}

namespace detail {

inline VarSet join(const VarSet &a, const VarSet &b)
{
  VarSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline void require_disjoint(const VarSet &a, const VarSet &b)
{
  for (const auto &v : a)
  {
    require(std::find(b.begin(), b.end(), v) == b.end(),
            "variable subsets must be disjoint ('" + v + "' repeated)");
  }
}

}  // namespace detail

/// I(A;B) = H(A) + H(B) - H(A,B).
inline double mutual_information(const JointPMF &pmf, const VarSet &a, const VarSet &b)
{
  detail::require(!a.empty() && !b.empty(), "mutual_information: subsets must be nonempty");
  detail::require_disjoint(a, b);
  double value = entropy(pmf, a) + entropy(pmf, b) - entropy(pmf, detail::join(a, b));
  return detail::clamp_nonnegative(value, "mutual information");
}

/// I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C).
inline double conditional_mutual_information(const JointPMF &pmf,
                                             const VarSet   &a,
                                             const VarSet   &b,
                                             const VarSet   &c)
{
  detail::require(!a.empty() && !b.empty() && !c.empty(),
                  "conditional_mutual_information: subsets must be nonempty");
  detail::require_disjoint(a, b);
  detail::require_disjoint(a, c);
  detail::require_disjoint(b, c);
  VarSet ac  = detail::join(a, c);
  VarSet bc  = detail::join(b, c);
  VarSet abc = detail::join(a, bc);
  double value = entropy(pmf, ac) + entropy(pmf, bc) - entropy(pmf, abc) - entropy(pmf, c);
  return detail::clamp_nonnegative(value, "conditional mutual information");
}

/// True iff A - B - C is a Markov chain, i.e. I(A;C|B) <= tol.
inline bool is_markov_chain(const JointPMF &pmf,
                            const VarSet   &a,
                            const VarSet   &b,
                            const VarSet   &c,
                            double          tol = kDefaultMarkovTol)
{
  detail::require(tol > 0.0, "is_markov_chain: tol must be positive");
  return conditional_mutual_information(pmf, a, c, b) <= tol;
}

/// p(x,y,u,v) = p(x) p(y|x) p(u|x) p(v|y), over variables (X, Y, U, V).
///
/// Every pmf produced here satisfies the long chain U - X - Y - V.
inline JointPMF build_chain_pmf(const JointPMF         &p_x,
                                const StochasticMatrix &y_given_x,
                                const StochasticMatrix &u_given_x,
                                const StochasticMatrix &v_given_y)
{
  detail::require(p_x.num_variables() == 1, "build_chain_pmf: p_x must be a single-variable pmf");
  const std::size_t nx = p_x.alphabet_sizes()[0];
  detail::require(y_given_x.rows() == nx, "build_chain_pmf: p(y|x) rows must match |X|");
  detail::require(u_given_x.rows() == nx, "build_chain_pmf: p(u|x) rows must match |X|");
  detail::require(v_given_y.rows() == y_given_x.cols(), "build_chain_pmf: p(v|y) rows must match |Y|");
  const std::size_t ny = y_given_x.cols();
  const std::size_t nu = u_given_x.cols();
  const std::size_t nv = v_given_y.cols();

  std::vector<double> table(nx * ny * nu * nv, 0.0);
  double              total = 0.0;
  for (std::size_t x = 0; x < nx; ++x)
  {
    for (std::size_t y = 0; y < ny; ++y)
    {
      for (std::size_t u = 0; u < nu; ++u)
      {
        for (std::size_t v = 0; v < nv; ++v)
        {
          double p = p_x.probs()[x] * y_given_x(x, y) * u_given_x(x, u) * v_given_y(y, v);
          table[((x * ny + y) * nu + u) * nv + v] = p;
          total += p;
        }
      }
    }
  }
  for (double &p : table)
  {
    p /= total;
  }
  return JointPMF({"X", "Y", "U", "V"}, {nx, ny, nu, nv}, std::move(table));
}

/// I(U;V) - I(U;V|X,Y) over (X, Y, U, V), without clamping.
inline double rate_excess(const JointPMF &pmf)
{
  return mutual_information(pmf, {"U"}, {"V"}) - conditional_mutual_information(pmf, {"U"}, {"V"}, {"X", "Y"});
}

/// Corner point of the rate set generated by the auxiliary pair (U, V):
/// (I(U;V) - I(U;V|X,Y), I(U;X), I(V;Y)). The pattern rate is clamped at zero.
inline RateTriple rate_triple_from_aux(const JointPMF &pmf)
{
  detail::require(pmf.num_variables() == 4 && pmf.has_variable("X") && pmf.has_variable("Y") &&
                    pmf.has_variable("U") && pmf.has_variable("V"),
                  "rate_triple_from_aux: pmf must be over exactly X, Y, U, V");
  RateTriple r;
  double     excess = mutual_information(pmf, {"U"}, {"V"}) -
                  conditional_mutual_information(pmf, {"U"}, {"V"}, {"X", "Y"});
  r.r_c = std::max(0.0, excess);
  r.r_x = mutual_information(pmf, {"U"}, {"X"});
  r.r_y = mutual_information(pmf, {"V"}, {"Y"});
  return r;
}

/// Single-variable pmf; convenience for the channel constructions.
inline JointPMF make_pmf(std::string name, std::vector<double> probs)
{
  std::size_t n = probs.size();
  return JointPMF({std::move(name)}, {n}, std::move(probs));
}

}  // namespace patrec
