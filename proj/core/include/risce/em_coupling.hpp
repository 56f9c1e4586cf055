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

#include "risce/array_channel.hpp"

#include <vector>

namespace risce
{

inline constexpr double kFreeSpaceImpedance = 376.730313668; // ohms
inline constexpr double kSpeedOfLight = 299792458.0;         // m/s

/// Thin dipoles parallel to the z-axis. All lengths in metres.
struct WireGeometry
{
    double length = 0.0;
    double radius = 0.0;
    double wavelength = 0.0;
    std::vector<Eigen::Vector3d> positions; // element centres

    double wavenumber() const { return 2.0 * kPi / wavelength; }
    int size() const { return static_cast<int>(positions.size()); }

    /// Throws ConfigError on non-positive sizes, radius > length / 10 or
    /// coincident elements.
    void validate() const;

    /// Places element (v, h) of `ris` at (0, h d, v d), i.e. on the y-z plane,
    /// using the same element order as the steering vectors.
    static WireGeometry on_upa(const UpaGeometry &ris, double wavelength, double length,
                               double radius);
};

struct QuadratureOptions
{
    int nodes = 64;          // Gauss-Legendre nodes per axis, split evenly at the centre
    double tolerance = 1e-4; // max relative change after doubling the node count
};

/// Fixed-order evaluation of the induced-EMF double integral for two wires with
/// transverse centre distance rho1 and axial centre offset rho2.
cd impedance_integral(const WireGeometry &geom, double rho1, double rho2, int nodes);

/// Z_qp. Self terms use rho1 = radius. The value at 2 * nodes is returned after
/// checking it against the value at `nodes`.
cd mutual_impedance(const WireGeometry &geom, int p, int q, const QuadratureOptions &opts = {});

/// 1 / sin^2(k l / 2): the amplification applied by the kernel normalisation.
double sine_normalization_gain(const WireGeometry &geom);

/// Full M x M matrix. Each distinct (transverse, |axial|) offset is integrated once.
CMat impedance_matrix(const WireGeometry &geom, const QuadratureOptions &opts = {});

/// S = (Z + z0 I)^{-1} (Z - z0 I). Throws SingularMatrix when Z + z0 I has
/// reciprocal condition number below 1e-12.
CMat scattering_matrix(const CMat &Z, double z0);

struct ScatteringModel
{
    CMat impedance;
    double z0 = 50.0;
    CMat scattering;

    int size() const { return static_cast<int>(scattering.rows()); }
};

ScatteringModel scattering_model(const WireGeometry &geom, double z0,
                                 const QuadratureOptions &opts = {});

/// Coupling-free model of the given size (S = 0).
ScatteringModel uncoupled_model(int elements, double z0 = 50.0);

/// B = (Gamma^{-1} - S)^{-1} with Gamma = Diag(gamma).
CMat mc_response(const CVec &gamma, const CMat &S);

} // namespace risce
