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

#include <stdexcept>
#include <string>

namespace patrec {

/// A caller violated a documented precondition.
class ArgumentError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A result that must be nonnegative (or otherwise bounded) came out wrong by
/// more than round-off. Signals a bug, not bad input.
class ConsistencyError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// Input sits on a degenerate boundary where a closed form is undefined.
class DegenerateInputError : public ArgumentError
{
public:
  using ArgumentError::ArgumentError;
};

/// A quantity diverges (e.g. Gaussian MI as a correlation approaches 1).
class OverflowError : public std::overflow_error
{
public:
  using std::overflow_error::overflow_error;
};

/// Rejection sampling hit its draw cap.
class SamplingFailure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const char *message)
{
  if (!condition)
  {
    throw ArgumentError(message);
  }
}

inline void require(bool condition, const std::string &message)
{
  if (!condition)
  {
    throw ArgumentError(message);
  }
}

}  // namespace detail
}  // namespace patrec
