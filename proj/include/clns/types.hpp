// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The clns Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace clns {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
// Row-major so that a contiguous row range of H is a contiguous memory block.
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Voxel counts of the imaging grid. Linear voxel index is x-fastest, then y, then z.
struct GridDims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  std::size_t count() const { return nx * ny * nz; }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const { return x + nx * (y + ny * z); }

  friend bool operator==(const GridDims&, const GridDims&) = default;
};

// Error hierarchy. Every error thrown by the library derives from clns::Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index or box outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid scalar parameter (block count, rho, tolerance, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, failed factorizations, diverging iterates.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Metric that is undefined for the given input (e.g. NMSE against a zero reference).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary file. `offset()` is the byte offset where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Configuration rejected; carries one message per violated field.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace clns
