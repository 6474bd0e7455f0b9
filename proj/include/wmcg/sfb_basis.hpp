// Copyright 2026 The WMCG Authors. All Rights Reserved.
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

// Spherical Fourier-Bessel and Gaussian-shell filter bases.
//
//   sFB:            psi_lmn(r, theta, phi) = j_l(k_n r) Y_lm(theta, phi)
//   Gaussian shell: psi_lmn(r, theta, phi) = exp(-(r - n)^2 / (2 sigma^2)) Y_lm
//
// Both are compactly supported on the ball of radius R. The radial
// wavenumbers k_n solve j_{l-1}(k_n R) = 0, which makes the radial modes of a
// fixed degree orthogonal on [0, R] with weight r^2. Y_lm are the real
// orthonormal spherical harmonics (no Condon-Shortley phase). Coordinates:
// theta is measured from +z, phi from +x toward +y.

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "wmcg/affine_group.hpp"

namespace wmcg {

inline constexpr int kMaxDegree = 8;
inline constexpr int kMaxRadialModes = 16;

// j_l(x) for 0 <= l <= kMaxDegree and x >= 0.
double SphericalBessel(int l, double x);

// j_{l-1}(x), extended to l = 0 by j_{-1}(x) = cos(x) / x.
double BoundaryFunction(int l, double x);

// First `count` positive k with j_{l-1}(k R) = 0, strictly increasing.
std::vector<double> BesselBoundaryRoots(int l, double radius, int count);

double RealSphericalHarmonic(int l, int m, double theta, double phi);

struct BasisIndex {
  int l = 0;
  int m = 0;
  int n = 1;

  bool IsValid() const { return l >= 0 && n >= 1 && m >= -l && m <= l; }
  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

std::string ToString(const BasisIndex& index);

struct RadialProfile {
  enum class Kind { kSphericalBessel, kGaussianShell };
  Kind kind = Kind::kSphericalBessel;
  double sigma = 0.5;  // grid units, Gaussian shell only

  static RadialProfile SphericalBessel() { return {}; }
  static RadialProfile GaussianShell(double sigma = 0.5) {
    return {Kind::kGaussianShell, sigma};
  }

  friend bool operator==(const RadialProfile&, const RadialProfile&) = default;
};

struct KernelGrid {
  int size = 5;
  double radius = 2.5;

  // R = (k - 1) / 2 + 0.5 voxels.
  static KernelGrid WithDefaultRadius(int size);
  void Validate() const;
  std::size_t Volume() const {
    return static_cast<std::size_t>(size) * size * size;
  }
};

// Evaluates basis functions for a fixed profile and support radius. Radial
// wavenumbers for every supported (l, n) are solved once at construction.
class BasisEvaluator {
 public:
  BasisEvaluator(RadialProfile profile, double radius);

  double operator()(const BasisIndex& index, const Vec3& point) const;

  double Wavenumber(int l, int n) const;
  const RadialProfile& profile() const { return profile_; }
  double radius() const { return radius_; }

 private:
  RadialProfile profile_;
  double radius_;
  // roots_[l][n - 1]
  std::array<std::array<double, kMaxRadialModes>, kMaxDegree + 1> roots_{};
};

double EvalBasis(const BasisIndex& index, const RadialProfile& profile,
                 const Vec3& point, double radius);

// Deterministic basis list: n outermost, then l, then m, all ascending.
// `count` must equal N (L + 1)^2 with 1 <= N <= L + 1 (N radial modes over
// every (l, m) with l <= L); the largest admissible L is used.
std::vector<BasisIndex> EnumerateBases(int count);

// Counts accepted by EnumerateBases, ascending, up to `limit`.
std::vector<int> ValidBasisCounts(int limit);

using IntVec3 = std::array<int, 3>;

struct SampledKernel {
  int size = 0;
  std::vector<double> values;  // z-major: values[(z * k + y) * k + x]
  BasisIndex index;
  Mat3 applied_transform;
  IntVec3 applied_shift{0, 0, 0};  // (x, y, z)
};

// Samples psi(T u) at the centered voxel coordinates u = (x, y, z) - c,
// circularly shifts by `shift` (x, y, z), then optionally L2-normalizes.
SampledKernel SampleOnGrid(const BasisEvaluator& evaluator, const BasisIndex& index,
                           const KernelGrid& grid, const Mat3& transform,
                           const IntVec3& shift, bool normalize);

// Circular shift of a cubic k^3 block: out[(i + s) mod k] = in[i] per axis.
std::vector<double> CircularShift(const std::vector<double>& values, int size,
                                  const IntVec3& shift);

struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Voxel-sum inner products of sampled kernels.
DenseMatrix DiscreteGram(const std::vector<SampledKernel>& kernels);

// Inner products over the ball of radius R by tensor-product quadrature:
// `resolution` Gauss-Legendre nodes in r and cos(theta), 2 * resolution
// uniform azimuth nodes.
DenseMatrix AnalyticGram(const std::vector<BasisIndex>& bases,
                         const BasisEvaluator& evaluator, int resolution);

// G(n, n') = int_0^R r^2 j_l(k_n r) j_l(k_n' r) dr for n, n' = 1..n_max,
// integrated adaptively with at least `min_nodes` nodes per entry.
DenseMatrix RadialGram(int l, double radius, int n_max, std::size_t min_nodes);

// Closed-form diagonal (R^3 / 2) j_l(k_n R)^2.
double RadialNorm(int l, double radius, double wavenumber);

// Real-harmonic Gram over Gauss-Legendre(cos theta) x uniform(phi)
// quadrature, indices ordered by l then m.
DenseMatrix AngularGram(int l_max, int n_theta, int n_phi);

}  // namespace wmcg
