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

// Algebra of GL+(3,R) and the 3D affine group built on it.
//
// Group elements are parameterized by an 11-vector
//   (theta1, theta3, alpha, beta, gamma, s01, s10, s02, s20, s12, s21)
// and composed as
//   M(a) = R1(theta1) R3(theta3) A1(alpha) A2(beta) A3(gamma)
//          S20 S10 S21 S01 S12 S02.
// DecomposeGl3 inverts that map for any matrix with positive determinant
// (barring degenerate elimination pivots).

#pragma once

#include <array>
#include <string>

namespace wmcg {

using Vec3 = std::array<double, 3>;

// Row-major 3x3 matrix. Entry (r, c) is m[3 * r + c].
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 Identity() { return Mat3{}; }
  static Mat3 Zero() { return Mat3{{0, 0, 0, 0, 0, 0, 0, 0, 0}}; }
  static Mat3 Diagonal(double a, double b, double c) {
    return Mat3{{a, 0, 0, 0, b, 0, 0, 0, c}};
  }

  double operator()(int r, int c) const { return m[3 * r + c]; }
  double& operator()(int r, int c) { return m[3 * r + c]; }

  friend bool operator==(const Mat3&, const Mat3&) = default;
};

Mat3 operator*(const Mat3& a, const Mat3& b);
Vec3 operator*(const Mat3& a, const Vec3& v);
Mat3 Transpose(const Mat3& a);
double Determinant(const Mat3& a);
// Throws kIllConditioned when the matrix is singular to working precision.
Mat3 Inverse(const Mat3& a);
// Frobenius-norm condition estimate ||A||_F * ||A^-1||_F; +inf for singular A.
double ConditionEstimate(const Mat3& a);
double MaxAbs(const Mat3& a);

struct TransformParams {
  double theta1 = 0;
  double theta3 = 0;
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
  double s01 = 0;
  double s10 = 0;
  double s02 = 0;
  double s20 = 0;
  double s12 = 0;
  double s21 = 0;

  static constexpr int kSize = 11;
  // Order matches the parameter vector above.
  std::array<double, kSize> ToArray() const;
  static TransformParams FromArray(const std::array<double, kSize>& v);
  bool IsFinite() const;

  friend bool operator==(const TransformParams&, const TransformParams&) = default;
};

enum class GeneratorKind {
  kScaleX,
  kScaleY,
  kScaleZ,
  kRotX,
  kRotY,
  kRotZ,
  kShear01,
  kShear02,
  kShear12,
  kShear10,
  kShear20,
  kShear21,
};

Mat3 GeneratorMatrix(GeneratorKind kind, double value);

Mat3 ComposeParams(const TransformParams& a);

// Constructive inverse of ComposeParams. Throws kNotInGroup for det <= 0 and
// kDegeneratePivot (naming the failing elimination step) when a shear pivot
// falls below 1e-12 * max|Y^-1|.
TransformParams DecomposeGl3(const Mat3& y);

// Exact quarter turn about a coordinate axis (0 = x, 1 = y, 2 = z), built
// from integers so that it permutes the voxel lattice without rounding.
Mat3 QuarterTurn(int axis, int turns);

struct AffineElement {
  Vec3 x{0, 0, 0};
  Mat3 linear;

  static AffineElement Identity() { return AffineElement{}; }
};

// (x1, M1) . (x2, M2) = (M1 x2 + x1, M1 M2).
AffineElement GroupProduct(const AffineElement& g1, const AffineElement& g2);
AffineElement GroupInverse(const AffineElement& g);
// Action on a point: T(g, p) = M p + x.
Vec3 GroupAct(const AffineElement& g, const Vec3& p);

// Haar normalization 2^(-2 alpha - 2 beta - 2 gamma).
double HaarCoefficient(const TransformParams& b);

std::string ToString(const TransformParams& a);

}  // namespace wmcg
