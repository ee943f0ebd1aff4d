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

#include <cmath>
#include <cstdint>
#include <limits>

namespace patrec {

/// SplitMix64 run as a counter-based generator: output i is the SplitMix64
/// finalizer applied to key + (i + 1) * golden-gamma. Streams are split by
/// deriving a fresh key, so substreams never share state.
class CounterRng
{
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
    : key_(key)
    , counter_(counter)
  {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()()
  {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  /// Independent stream keyed by `seed ^ index` (e.g. one per trial).
  static CounterRng substream(std::uint64_t seed, std::uint64_t index)
  {
    return CounterRng(mix(seed ^ index));
  }

  CounterRng split(std::uint64_t index) const { return CounterRng(mix(key_ ^ mix(index + kGamma))); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n)
  {
    if (n <= 1)
    {
      return 0;
    }
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t       x;
    do
    {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

  /// Exponential(1) variate; sums of these normalise to a flat Dirichlet.
  double exponential()
  {
    double u;
    do
    {
      u = uniform();
    } while (u == 0.0);
    return -std::log(u);
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z)
  {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace patrec
