// Copyright 2026 The ctclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace ctclab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown, duplicated, or otherwise invalid subsystem label.
class LabelError : public Error {
 public:
  using Error::Error;
};

/// Shapes or subsystem dimensions that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates one of its type invariants (norm, trace, Hermiticity,
/// positivity, unitarity, orthonormality).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// The post-selection can never succeed for this input: the projected branch
/// has (numerically) zero norm.
class ParadoxicalEvolution : public Error {
 public:
  using Error::Error;
};

/// The paradox harness could not embed the requested theorem into the random
/// data it was given.
class ParadoxSetupError : public Error {
 public:
  ParadoxSetupError(const std::string& what, std::size_t placed)
      : Error(what), placed_(placed) {}
  std::size_t placed() const noexcept { return placed_; }

 private:
  std::size_t placed_;
};

/// No fixed point of a consistency map could be located. For a valid
/// trace-preserving positive map this indicates a malformed superoperator.
class FixedPointError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctclab
