// SPDX-License-Identifier: Apache-2.0
//
// risce: mutual-coupling-aware channel estimation for RIS-aided mmWave links
// Copyright (C) 2026 The risce Authors
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
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace risce
{

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cd kI{0.0, 1.0};

/// Random stream used by every stochastic operation. One stream per trial.
using Rng = std::mt19937_64;

/// Builds an independent stream from a base seed and a list of stream tags
/// (trial index, purpose tag, ...).
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags = {});

/// Draws CN(0, variance): real and imaginary parts each N(0, variance / 2).
cd complex_normal(Rng &rng, double variance);

// ---- error hierarchy ---------------------------------------------------

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error
{
  public:
    using Error::Error;
};

class SingularMatrix : public Error
{
  public:
    using Error::Error;
};

class QuadratureNotConverged : public Error
{
  public:
    using Error::Error;
};

class DegenerateSubspace : public Error
{
  public:
    using Error::Error;
};

class MissingSupport : public Error
{
  public:
    using Error::Error;
};

class DictionaryTooLarge : public Error
{
  public:
    using Error::Error;
};

class ConfigError : public Error
{
  public:
    using Error::Error;
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

} // namespace risce
