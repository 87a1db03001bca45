// Copyright 2026 The mpstomo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MPSTOMO_ERRORS_HPP
#define MPSTOMO_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpstomo {

// Invalid argument, shape mismatch or malformed configuration.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation requested on a basis or local dimension it does not support.
class UnsupportedError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class FormatError : public ParameterError {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : ParameterError(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
        detail_(what),
        line_(line) {}
  std::size_t line() const { return line_; }
  // The message without the line suffix.
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  std::size_t line_;
};

// Base of all numerical failures.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The MPS gauge is not where the operation needs it.
class StateError : public NumericError {
 public:
  using NumericError::NumericError;
};

// All-zero tensors, vanishing norms or conditional masses.
class DegenerateStateError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Dense contraction would exceed the configured size limit.
class ResourceError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A power-law fit that cannot be inverted (non-negative exponent).
class UnusableFitError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Fixed-basis reconstruction found a disconnected coefficient graph.
// Each component lists the computational-basis indices it contains.
class PartialReconstructionError : public NumericError {
 public:
  PartialReconstructionError(const std::string& what,
                             std::vector<std::vector<std::size_t>> components)
      : NumericError(what), components_(std::move(components)) {}
  const std::vector<std::vector<std::size_t>>& components() const { return components_; }

 private:
  std::vector<std::vector<std::size_t>> components_;
};

// Files that cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mpstomo

#endif  // MPSTOMO_ERRORS_HPP
