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

#include "wmcg/sfb_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wmcg/error.hpp"
#include "wmcg/quadrature.hpp"

namespace wmcg {

namespace {

constexpr double kPi = std::numbers::pi;

// Ascending power series, used below x = l + 1/2 where upward recurrence
// loses accuracy.
double BesselSeries(int l, double x) {
  double prefactor = 1.0;
  for (int i = 1; i <= l; ++i) prefactor *= x / (2.0 * i + 1.0);
  const double q = -0.5 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 80; ++k) {
    term *= q / (k * (2.0 * l + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return prefactor * sum;
}

double BesselRecurrence(int l, double x) {
  const double s = std::sin(x);
  const double c = std::cos(x);
  double jm = s / x;
  if (l == 0) return jm;
  double j = s / (x * x) - c / x;
  for (int n = 1; n < l; ++n) {
    const double next = (2.0 * n + 1.0) / x * j - jm;
    jm = j;
    j = next;
  }
  return j;
}

// Fully normalized associated Legendre value N_lm P_l^m(x), m >= 0.
double NormalizedLegendre(int l, int m, double x) {
  const double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  double pmm = 1.0;
  for (int i = 1; i <= m; ++i) pmm *= (2.0 * i - 1.0) * somx2;
  double p = pmm;
  if (l > m) {
    double pm1 = pmm;
    double pm0 = x * (2.0 * m + 1.0) * pmm;
    for (int ll = m + 2; ll <= l; ++ll) {
      const double pn = ((2.0 * ll - 1.0) * x * pm0 - (ll + m - 1.0) * pm1) / (ll - m);
      pm1 = pm0;
      pm0 = pn;
    }
    p = pm0;
  }
  // sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!)
  double ratio = 1.0;
  for (int i = l - m + 1; i <= l + m; ++i) ratio /= i;
  return std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * ratio) * p;
}

double HarmonicFromCosTheta(int l, int m, double cos_theta, double phi) {
  if (m == 0) return NormalizedLegendre(l, 0, cos_theta);
  const double p = std::numbers::sqrt2 * NormalizedLegendre(l, std::abs(m), cos_theta);
  return m > 0 ? p * std::cos(m * phi) : p * std::sin(-m * phi);
}

void CheckDegree(int l) {
  if (l < 0 || l > kMaxDegree) {
    throw Error(ErrorCode::kUnsupportedDegree,
                "degree " + std::to_string(l) + " outside [0, " +
                    std::to_string(kMaxDegree) + "]");
  }
}

}  // namespace

double SphericalBessel(int l, double x) {
  CheckDegree(l);
  if (!std::isfinite(x) || x < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "argument must be finite and >= 0");
  }
  if (x == 0.0) return l == 0 ? 1.0 : 0.0;
  if (x < l + 0.5) return BesselSeries(l, x);
  return BesselRecurrence(l, x);
}

double BoundaryFunction(int l, double x) {
  if (l == 0) {
    if (!(x > 0.0)) throw Error(ErrorCode::kInvalidArgument, "j_{-1} needs x > 0");
    return std::cos(x) / x;
  }
  return SphericalBessel(l - 1, x);
}

std::vector<double> BesselBoundaryRoots(int l, double radius, int count) {
  CheckDegree(l);
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  }
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "count must be positive");

  // Zeros of j_{l-1} are spaced by roughly pi, so a 0.05 step cannot step over
  // a pair of them.
  constexpr double kStep = 0.05;
  std::vector<double> roots;
  roots.reserve(count);
  double x0 = 1e-6;
  double f0 = BoundaryFunction(l, x0);
  for (int iter = 0; static_cast<int>(roots.size()) < count; ++iter) {
    if (iter > 100000) {
      throw Error(ErrorCode::kInternal, "root bracketing failed");
    }
    const double x1 = x0 + kStep;
    const double f1 = BoundaryFunction(l, x1);
    if (f1 == 0.0) {
      roots.push_back(x1);
    } else if ((f0 < 0.0) != (f1 < 0.0)) {
      double lo = x0;
      double hi = x1;
      double flo = f0;
      for (int b = 0; b < 200 && hi - lo > 0.0; ++b) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = BoundaryFunction(l, mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double root = std::abs(BoundaryFunction(l, lo)) <= std::abs(BoundaryFunction(l, hi)) ? lo : hi;
      roots.push_back(root);
    }
    x0 = x1;
    f0 = f1;
  }
  for (double& r : roots) r /= radius;
  return roots;
}

double RealSphericalHarmonic(int l, int m, double theta, double phi) {
  CheckDegree(l);
  if (m < -l || m > l) {
    throw Error(ErrorCode::kInvalidArgument, "order m must satisfy |m| <= l");
  }
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw Error(ErrorCode::kInvalidArgument, "angles must be finite");
  }
  return HarmonicFromCosTheta(l, m, std::cos(theta), phi);
}

std::string ToString(const BasisIndex& index) {
  return "(l=" + std::to_string(index.l) + ",m=" + std::to_string(index.m) +
         ",n=" + std::to_string(index.n) + ")";
}

KernelGrid KernelGrid::WithDefaultRadius(int size) {
  KernelGrid grid{size, 0.5 * (size - 1) + 0.5};
  grid.Validate();
  return grid;
}

void KernelGrid::Validate() const {
  if (size < 1 || size % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "kernel size must be odd and positive");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kInvalidArgument, "kernel radius must be positive");
  }
}

BasisEvaluator::BasisEvaluator(RadialProfile profile, double radius)
    : profile_(profile), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kInvalidArgument, "support radius must be positive");
  }
  if (profile_.kind == RadialProfile::Kind::kGaussianShell && !(profile_.sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Gaussian shell sigma must be positive");
  }
  if (profile_.kind == RadialProfile::Kind::kSphericalBessel) {
    for (int l = 0; l <= kMaxDegree; ++l) {
      const auto ks = BesselBoundaryRoots(l, radius, kMaxRadialModes);
      std::copy(ks.begin(), ks.end(), roots_[l].begin());
    }
  }
}

double BasisEvaluator::Wavenumber(int l, int n) const {
  CheckDegree(l);
  if (n < 1 || n > kMaxRadialModes) {
    throw Error(ErrorCode::kInvalidArgument, "radial mode out of range");
  }
  return roots_[l][n - 1];
}

double BasisEvaluator::operator()(const BasisIndex& index, const Vec3& point) const {
  if (!index.IsValid()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid basis index " + ToString(index));
  }
  CheckDegree(index.l);
  if (index.n > kMaxRadialModes) {
    throw Error(ErrorCode::kInvalidArgument, "radial mode out of range");
  }
  const double r = std::sqrt(point[0] * point[0] + point[1] * point[1] + point[2] * point[2]);
  if (r > radius_) return 0.0;

  double radial;
  if (profile_.kind == RadialProfile::Kind::kSphericalBessel) {
    radial = SphericalBessel(index.l, roots_[index.l][index.n - 1] * r);
  } else {
    const double d = (r - index.n) / profile_.sigma;
    radial = std::exp(-0.5 * d * d);
  }
  const double cos_theta = r > 0.0 ? point[2] / r : 1.0;
  const double phi = std::atan2(point[1], point[0]);
  return radial * HarmonicFromCosTheta(index.l, index.m, std::clamp(cos_theta, -1.0, 1.0), phi);
}

double EvalBasis(const BasisIndex& index, const RadialProfile& profile,
                 const Vec3& point, double radius) {
  return BasisEvaluator(profile, radius)(index, point);
}

namespace {

bool SplitCount(int count, int& max_l, int& radial) {
  for (int l = kMaxDegree; l >= 0; --l) {
    const int shell = (l + 1) * (l + 1);
    if (count % shell != 0) continue;
    const int n = count / shell;
    if (n >= 1 && n <= l + 1 && n <= kMaxRadialModes) {
      max_l = l;
      radial = n;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<int> ValidBasisCounts(int limit) {
  std::vector<int> out;
  int l = 0;
  int n = 0;
  for (int c = 1; c <= limit; ++c) {
    if (SplitCount(c, l, n)) out.push_back(c);
  }
  return out;
}

std::vector<BasisIndex> EnumerateBases(int count) {
  int max_l = 0;
  int radial = 0;
  if (count < 1 || !SplitCount(count, max_l, radial)) {
    const auto valid = ValidBasisCounts(std::max(2 * count, 32));
    int below = 0;
    int above = 0;
    for (int v : valid) {
      if (v < count) below = v;
      if (v > count && above == 0) above = v;
    }
    std::string msg = "basis count " + std::to_string(count) +
                      " is not N*(L+1)^2 with 1 <= N <= L+1; nearest valid:";
    if (below > 0) msg += " " + std::to_string(below);
    if (above > 0) msg += " " + std::to_string(above);
    throw Error(ErrorCode::kInvalidArgument, msg);
  }
  std::vector<BasisIndex> out;
  out.reserve(count);
  for (int n = 1; n <= radial; ++n) {
    for (int l = 0; l <= max_l; ++l) {
      for (int m = -l; m <= l; ++m) out.push_back(BasisIndex{l, m, n});
    }
  }
  return out;
}

std::vector<double> CircularShift(const std::vector<double>& values, int size,
                                  const IntVec3& shift) {
  auto wrap = [size](int v) { return ((v % size) + size) % size; };
  std::vector<double> out(values.size());
  for (int z = 0; z < size; ++z) {
    const int tz = wrap(z + shift[2]);
    for (int y = 0; y < size; ++y) {
      const int ty = wrap(y + shift[1]);
      for (int x = 0; x < size; ++x) {
        const int tx = wrap(x + shift[0]);
        out[(static_cast<std::size_t>(tz) * size + ty) * size + tx] =
            values[(static_cast<std::size_t>(z) * size + y) * size + x];
      }
    }
  }
  return out;
}

SampledKernel SampleOnGrid(const BasisEvaluator& evaluator, const BasisIndex& index,
                           const KernelGrid& grid, const Mat3& transform,
                           const IntVec3& shift, bool normalize) {
  grid.Validate();
  if (!index.IsValid()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid basis index " + ToString(index));
  }
  const int k = grid.size;
  const double c = 0.5 * (k - 1);
  std::vector<double> raw(grid.Volume());
  if (evaluator.radius() != grid.radius) {
    throw Error(ErrorCode::kInvalidArgument, "evaluator radius differs from grid radius");
  }
  for (int z = 0; z < k; ++z) {
    for (int y = 0; y < k; ++y) {
      for (int x = 0; x < k; ++x) {
        const Vec3 u{x - c, y - c, z - c};
        raw[(static_cast<std::size_t>(z) * k + y) * k + x] = evaluator(index, transform * u);
      }
    }
  }
  SampledKernel out;
  out.size = k;
  out.index = index;
  out.applied_transform = transform;
  out.applied_shift = shift;
  out.values = CircularShift(raw, k, shift);
  if (normalize) {
    double ss = 0;
    for (double v : out.values) ss += v * v;
    if (!(ss > 0.0)) {
      throw Error(ErrorCode::kDegenerateKernel,
                  "sampled kernel for " + ToString(index) + " is identically zero");
    }
    const double inv = 1.0 / std::sqrt(ss);
    for (double& v : out.values) v *= inv;
  }
  return out;
}

DenseMatrix DiscreteGram(const std::vector<SampledKernel>& kernels) {
  const int n = static_cast<int>(kernels.size());
  DenseMatrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (kernels[i].values.size() != kernels[j].values.size()) {
        throw Error(ErrorCode::kInvalidArgument, "kernels differ in size");
      }
      double s = 0;
      for (std::size_t v = 0; v < kernels[i].values.size(); ++v) {
        s += kernels[i].values[v] * kernels[j].values[v];
      }
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

DenseMatrix AnalyticGram(const std::vector<BasisIndex>& bases,
                         const BasisEvaluator& evaluator, int resolution) {
  if (bases.empty()) throw Error(ErrorCode::kInvalidArgument, "empty basis list");
  if (resolution < 2) throw Error(ErrorCode::kInvalidArgument, "resolution too small");
  const QuadratureRule radial = MapRule(GaussLegendre(resolution), 0.0, evaluator.radius());
  const QuadratureRule polar = GaussLegendre(resolution);
  const int n_phi = 2 * resolution;
  const int nb = static_cast<int>(bases.size());

  DenseMatrix g(nb, nb);
  std::vector<double> vals(nb);
  for (std::size_t ir = 0; ir < radial.nodes.size(); ++ir) {
    const double r = radial.nodes[ir];
    for (std::size_t it = 0; it < polar.nodes.size(); ++it) {
      const double ct = polar.nodes[it];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int ip = 0; ip < n_phi; ++ip) {
        const double phi = 2.0 * kPi * ip / n_phi;
        const double w = radial.weights[ir] * r * r * polar.weights[it] * (2.0 * kPi / n_phi);
        const Vec3 p{r * st * std::cos(phi), r * st * std::sin(phi), r * ct};
        for (int b = 0; b < nb; ++b) vals[b] = evaluator(bases[b], p);
        for (int i = 0; i < nb; ++i) {
          const double wi = w * vals[i];
          for (int j = i; j < nb; ++j) g(i, j) += wi * vals[j];
        }
      }
    }
  }
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

DenseMatrix RadialGram(int l, double radius, int n_max, std::size_t min_nodes) {
  CheckDegree(l);
  const auto ks = BesselBoundaryRoots(l, radius, n_max);
  DenseMatrix g(n_max, n_max);
  for (int i = 0; i < n_max; ++i) {
    for (int j = i; j < n_max; ++j) {
      const double ki = ks[i];
      const double kj = ks[j];
      const auto res = IntegrateAdaptive(
          [&](double r) {
            return r * r * SphericalBessel(l, ki * r) * SphericalBessel(l, kj * r);
          },
          0.0, radius, 1e-14, min_nodes);
      g(i, j) = res.value;
      g(j, i) = res.value;
    }
  }
  return g;
}

double RadialNorm(int l, double radius, double wavenumber) {
  const double j = SphericalBessel(l, wavenumber * radius);
  return 0.5 * radius * radius * radius * j * j;
}

DenseMatrix AngularGram(int l_max, int n_theta, int n_phi) {
  CheckDegree(l_max);
  const int n = (l_max + 1) * (l_max + 1);
  const QuadratureRule polar = GaussLegendre(n_theta);
  DenseMatrix g(n, n);
  std::vector<double> vals(n);
  for (std::size_t it = 0; it < polar.nodes.size(); ++it) {
    const double theta = std::acos(polar.nodes[it]);
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = 2.0 * kPi * ip / n_phi;
      const double w = polar.weights[it] * 2.0 * kPi / n_phi;
      int idx = 0;
      for (int l = 0; l <= l_max; ++l) {
        for (int m = -l; m <= l; ++m) vals[idx++] = RealSphericalHarmonic(l, m, theta, phi);
      }
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) g(i, j) += w * vals[i] * vals[j];
      }
    }
  }
  return g;
}

}  // namespace wmcg
