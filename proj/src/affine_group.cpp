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

#include "wmcg/affine_group.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "wmcg/error.hpp"

namespace wmcg {

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 out = Mat3::Zero();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
    }
  }
  return out;
}

Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a(0, 0) * v[0] + a(0, 1) * v[1] + a(0, 2) * v[2],
          a(1, 0) * v[0] + a(1, 1) * v[1] + a(1, 2) * v[2],
          a(2, 0) * v[0] + a(2, 1) * v[1] + a(2, 2) * v[2]};
}

Mat3 Transpose(const Mat3& a) {
  Mat3 t;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) t(r, c) = a(c, r);
  }
  return t;
}

double Determinant(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Mat3 Inverse(const Mat3& a) {
  const double det = Determinant(a);
  if (det == 0.0 || !std::isfinite(det)) {
    throw Error(ErrorCode::kIllConditioned, "matrix is singular");
  }
  Mat3 adj;
  adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  adj(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  adj(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  adj(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  for (double& v : adj.m) v /= det;
  return adj;
}

namespace {

double FrobeniusNorm(const Mat3& a) {
  double s = 0;
  for (double v : a.m) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double ConditionEstimate(const Mat3& a) {
  const double det = Determinant(a);
  if (det == 0.0 || !std::isfinite(det)) {
    return std::numeric_limits<double>::infinity();
  }
  return FrobeniusNorm(a) * FrobeniusNorm(Inverse(a));
}

double MaxAbs(const Mat3& a) {
  double mx = 0;
  for (double v : a.m) mx = std::max(mx, std::abs(v));
  return mx;
}

std::array<double, TransformParams::kSize> TransformParams::ToArray() const {
  return {theta1, theta3, alpha, beta, gamma, s01, s10, s02, s20, s12, s21};
}

TransformParams TransformParams::FromArray(const std::array<double, kSize>& v) {
  return TransformParams{v[0], v[1], v[2], v[3], v[4], v[5],
                         v[6], v[7], v[8], v[9], v[10]};
}

bool TransformParams::IsFinite() const {
  for (double v : ToArray()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Mat3 GeneratorMatrix(GeneratorKind kind, double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, "generator value must be finite");
  }
  Mat3 g = Mat3::Identity();
  const double c = std::cos(value);
  const double s = std::sin(value);
  switch (kind) {
    case GeneratorKind::kScaleX: g(0, 0) = std::exp2(value); break;
    case GeneratorKind::kScaleY: g(1, 1) = std::exp2(value); break;
    case GeneratorKind::kScaleZ: g(2, 2) = std::exp2(value); break;
    case GeneratorKind::kRotX:
      g(1, 1) = c; g(1, 2) = -s;
      g(2, 1) = s; g(2, 2) = c;
      break;
    case GeneratorKind::kRotY:
      g(0, 0) = c; g(0, 2) = -s;
      g(2, 0) = s; g(2, 2) = c;
      break;
    case GeneratorKind::kRotZ:
      g(0, 0) = c; g(0, 1) = -s;
      g(1, 0) = s; g(1, 1) = c;
      break;
    case GeneratorKind::kShear01: g(0, 1) = value; break;
    case GeneratorKind::kShear02: g(0, 2) = value; break;
    case GeneratorKind::kShear12: g(1, 2) = value; break;
    case GeneratorKind::kShear10: g(1, 0) = value; break;
    case GeneratorKind::kShear20: g(2, 0) = value; break;
    case GeneratorKind::kShear21: g(2, 1) = value; break;
  }
  return g;
}

Mat3 ComposeParams(const TransformParams& a) {
  if (!a.IsFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "transform parameters must be finite");
  }
  using K = GeneratorKind;
  return GeneratorMatrix(K::kRotX, a.theta1) * GeneratorMatrix(K::kRotZ, a.theta3) *
         GeneratorMatrix(K::kScaleX, a.alpha) * GeneratorMatrix(K::kScaleY, a.beta) *
         GeneratorMatrix(K::kScaleZ, a.gamma) * GeneratorMatrix(K::kShear20, a.s20) *
         GeneratorMatrix(K::kShear10, a.s10) * GeneratorMatrix(K::kShear21, a.s21) *
         GeneratorMatrix(K::kShear01, a.s01) * GeneratorMatrix(K::kShear12, a.s12) *
         GeneratorMatrix(K::kShear02, a.s02);
}

TransformParams DecomposeGl3(const Mat3& y) {
  for (double v : y.m) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "matrix entries must be finite");
    }
  }
  const double det = Determinant(y);
  if (!(det > 0.0)) {
    throw Error(ErrorCode::kNotInGroup, "determinant must be positive, got " +
                                            std::to_string(det));
  }
  Mat3 z = Inverse(y);
  const double tol = 1e-12 * MaxAbs(z);

  // Left-multiplying by S_ij(s) adds s * row j to row i. Eliminating in this
  // order realizes S20 S10 S21 S01 S12 S02 Y^-1 = D.
  struct Step {
    int target_row;
    int pivot_row;
    double TransformParams::*param;
    const char* name;
  };
  static constexpr Step kSteps[] = {
      {0, 2, &TransformParams::s02, "S02 eliminating (0,2)"},
      {1, 2, &TransformParams::s12, "S12 eliminating (1,2)"},
      {0, 1, &TransformParams::s01, "S01 eliminating (0,1)"},
      {2, 1, &TransformParams::s21, "S21 eliminating (2,1)"},
      {1, 0, &TransformParams::s10, "S10 eliminating (1,0)"},
      {2, 0, &TransformParams::s20, "S20 eliminating (2,0)"},
  };

  TransformParams out;
  for (const Step& step : kSteps) {
    const double pivot = z(step.pivot_row, step.pivot_row);
    if (!(std::abs(pivot) > tol)) {
      throw Error(ErrorCode::kDegeneratePivot,
                  std::string("pivot below tolerance at step ") + step.name);
    }
    const double s = -z(step.target_row, step.pivot_row) / pivot;
    for (int c = 0; c < 3; ++c) {
      z(step.target_row, c) += s * z(step.pivot_row, c);
    }
    z(step.target_row, step.pivot_row) = 0.0;
    out.*(step.param) = s;
  }

  // R1(theta1) R3(theta3) A1 A2 A3 = D^-1 with theta in {0, pi}; the sign
  // pattern of D selects the rotations since R1(pi) = diag(1,-1,-1) and
  // R3(pi) = diag(-1,-1,1).
  const double a = z(0, 0);
  const double b = z(1, 1);
  const double c = z(2, 2);
  constexpr double kPi = std::numbers::pi;
  if (a > 0 && b > 0 && c > 0) {
    out.theta1 = 0; out.theta3 = 0;
  } else if (a > 0 && b < 0 && c < 0) {
    out.theta1 = kPi; out.theta3 = 0;
  } else if (a < 0 && b < 0 && c > 0) {
    out.theta1 = 0; out.theta3 = kPi;
  } else if (a < 0 && b > 0 && c < 0) {
    out.theta1 = kPi; out.theta3 = kPi;
  } else {
    throw Error(ErrorCode::kInternal, "residual diagonal has non-positive product");
  }
  out.alpha = -std::log2(std::abs(a));
  out.beta = -std::log2(std::abs(b));
  out.gamma = -std::log2(std::abs(c));
  return out;
}

Mat3 QuarterTurn(int axis, int turns) {
  static constexpr int kCos[4] = {1, 0, -1, 0};
  static constexpr int kSin[4] = {0, 1, 0, -1};
  if (axis < 0 || axis > 2) {
    throw Error(ErrorCode::kInvalidArgument, "axis must be 0, 1 or 2");
  }
  const int t = ((turns % 4) + 4) % 4;
  const double c = kCos[t];
  const double s = kSin[t];
  Mat3 g = Mat3::Identity();
  switch (axis) {
    case 0: g(1, 1) = c; g(1, 2) = -s; g(2, 1) = s; g(2, 2) = c; break;
    case 1: g(0, 0) = c; g(0, 2) = -s; g(2, 0) = s; g(2, 2) = c; break;
    default: g(0, 0) = c; g(0, 1) = -s; g(1, 0) = s; g(1, 1) = c; break;
  }
  return g;
}

AffineElement GroupProduct(const AffineElement& g1, const AffineElement& g2) {
  const Vec3 mx = g1.linear * g2.x;
  return AffineElement{{mx[0] + g1.x[0], mx[1] + g1.x[1], mx[2] + g1.x[2]},
                       g1.linear * g2.linear};
}

AffineElement GroupInverse(const AffineElement& g) {
  if (!(Determinant(g.linear) > 0.0)) {
    throw Error(ErrorCode::kNotInGroup, "linear part must have positive determinant");
  }
  if (ConditionEstimate(g.linear) > 1e12) {
    throw Error(ErrorCode::kIllConditioned, "condition estimate exceeds 1e12");
  }
  const Mat3 inv = Inverse(g.linear);
  const Vec3 t = inv * g.x;
  return AffineElement{{-t[0], -t[1], -t[2]}, inv};
}

Vec3 GroupAct(const AffineElement& g, const Vec3& p) {
  const Vec3 mp = g.linear * p;
  return {mp[0] + g.x[0], mp[1] + g.x[1], mp[2] + g.x[2]};
}

double HaarCoefficient(const TransformParams& b) {
  // Summing in double costs up to |exponent| ulps; extended precision keeps
  // the result within one rounding.
  const long double e = -2.0L * b.alpha - 2.0L * b.beta - 2.0L * b.gamma;
  return static_cast<double>(std::exp2(e));
}

std::string ToString(const TransformParams& a) {
  std::string out;
  char buf[32];
  bool first = true;
  for (double v : a.ToArray()) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    if (!first) out += ' ';
    out += buf;
    first = false;
  }
  return out;
}

}  // namespace wmcg
