// Copyright 2026 The pepqubo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pepqubo {

/// Malformed or inconsistent user input (files, parameters).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3 &) const = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double distance(const Vec3 &a, const Vec3 &b) { return (a - b).norm(); }

/// Dense row-major square matrix of doubles.
class SquareMatrix {
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0)
      : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double &operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

  bool is_symmetric(double tol = 0.0) const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol)
          return false;
    return true;
  }

  bool operator==(const SquareMatrix &) const = default;

private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Bits of a binary assignment; one byte per variable.
using Bits = std::vector<unsigned char>;

} // namespace pepqubo
