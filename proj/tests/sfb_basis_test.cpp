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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wmcg/error.hpp"

namespace wmcg {
namespace {

constexpr double kPi = std::numbers::pi;

struct BesselCase {
  int l;
  double x;
  double want;  // 40-digit reference rounded to double
};

const BesselCase kBesselCases[] = {
    {0, 0.5, 0.95885107720840600055},
    {1, 0.001, 0.00033333330000000119048},
    {3, 0.1, 9.5185197208655670454e-6},
    {4, 2.5, 0.030910585677825798895},
    {8, 0.7, 1.6514777877252990366e-9},
    {8, 12.3, 0.033916433238837451397},
    {2, 30.0, 0.032310434678570905965},
    {5, 5.0, 0.10681116145650454205},
    {6, 15.0, 0.045792862271461413711},
    {7, 3.3, 0.0015177169887284552601},
    {0, 1e-8, 0.99999999999999998333},
    {2, 8.5, -0.065042017554591817888},
    {8, 9.0, 0.11000231934697899755},
};

TEST(SphericalBesselTest, ReferenceValues) {
  for (const auto& c : kBesselCases) {
    EXPECT_NEAR(SphericalBessel(c.l, c.x), c.want, 1e-13 * std::abs(c.want))
        << "l=" << c.l << " x=" << c.x;
  }
}

TEST(SphericalBesselTest, AgreesWithStandardLibrary) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 40.0);
  for (int i = 0; i < 2000; ++i) {
    const int l = static_cast<int>(rng() % (kMaxDegree + 1));
    const double x = ux(rng);
    EXPECT_NEAR(SphericalBessel(l, x), std::sph_bessel(l, x), 1e-12) << "l=" << l << " x=" << x;
  }
}

TEST(SphericalBesselTest, ValuesAtZero) {
  EXPECT_EQ(SphericalBessel(0, 0.0), 1.0);
  for (int l = 1; l <= kMaxDegree; ++l) EXPECT_EQ(SphericalBessel(l, 0.0), 0.0);
  EXPECT_THROW(SphericalBessel(9, 1.0), Error);
}

TEST(BoundaryFunctionTest, DegreeZeroUsesCosOverX) {
  for (double x : {0.3, 1.0, 7.7}) {
    EXPECT_NEAR(BoundaryFunction(0, x), std::cos(x) / x, 1e-15);
    EXPECT_NEAR(BoundaryFunction(3, x), SphericalBessel(2, x), 1e-15);
  }
}

TEST(BesselRootsTest, ReferenceRoots) {
  // First three zeros of j_{l-1} (cos x / x for l = 0).
  const double want[9][3] = {
      {1.5707963267948966192, 4.7123889803846898577, 7.8539816339744830962},
      {3.1415926535897932385, 6.2831853071795864769, 9.4247779607693797154},
      {4.4934094579090641753, 7.7252518369377071642, 10.904121659428899827},
      {5.7634591968945497914, 9.0950113304763551563, 12.322940970566582052},
      {6.987932000500519959, 10.417118547379364763, 13.698023153249249},
      {8.1825614525712427017, 11.704907154570390558, 15.039664707616520808},
      {9.3558121110427461714, 12.966530172774344558, 16.354709639350463182},
      {10.512835408093997982, 14.207392458842460327, 17.647974870165897508},
      {11.657032192516371598, 15.431289210268378367, 18.922999198546148478},
  };
  for (double radius : {1.0, 2.5}) {
    for (int l = 0; l <= kMaxDegree; ++l) {
      const auto ks = BesselBoundaryRoots(l, radius, 3);
      for (int n = 0; n < 3; ++n) {
        EXPECT_NEAR(ks[n] * radius, want[l][n], 1e-12 * want[l][n]) << "l=" << l << " n=" << n;
      }
    }
  }
}

TEST(BesselRootsTest, ResidualAndOrdering) {
  for (double radius : {1.0, 2.5, 3.5}) {
    for (int l = 0; l <= 4; ++l) {
      const auto ks = BesselBoundaryRoots(l, radius, 8);
      ASSERT_EQ(ks.size(), 8u);
      for (int n = 0; n < 8; ++n) {
        EXPECT_LT(std::abs(BoundaryFunction(l, ks[n] * radius)), 1e-10);
        if (n > 0) {
          EXPECT_GT(ks[n], ks[n - 1]);
        }
      }
    }
    const auto k1 = BesselBoundaryRoots(1, radius, 8);
    for (int n = 1; n <= 8; ++n) EXPECT_NEAR(k1[n - 1], n * kPi / radius, 1e-12 * n * kPi / radius);
  }
  EXPECT_THROW(BesselBoundaryRoots(2, -1.0, 3), Error);
}

// Closed forms of the real orthonormal harmonics up to l = 2.
double ClosedFormY(int l, int m, double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  x /= r;
  y /= r;
  z /= r;
  const double c1 = std::sqrt(3.0 / (4.0 * kPi));
  const double c2 = 0.5 * std::sqrt(15.0 / kPi);
  if (l == 0) return 0.5 / std::sqrt(kPi);
  if (l == 1) return c1 * (m == -1 ? y : m == 0 ? z : x);
  switch (m) {
    case -2: return c2 * x * y;
    case -1: return c2 * y * z;
    case 0: return 0.25 * std::sqrt(5.0 / kPi) * (3 * z * z - 1);
    case 1: return c2 * x * z;
    default: return 0.5 * c2 * (x * x - y * y);
  }
}

TEST(RealHarmonicTest, MatchesClosedForms) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double x = n(rng), y = n(rng), z = n(rng);
    const double r = std::sqrt(x * x + y * y + z * z);
    const double theta = std::acos(z / r);
    const double phi = std::atan2(y, x);
    for (int l = 0; l <= 2; ++l) {
      for (int m = -l; m <= l; ++m) {
        EXPECT_NEAR(RealSphericalHarmonic(l, m, theta, phi), ClosedFormY(l, m, x, y, z), 1e-14)
            << "l=" << l << " m=" << m;
      }
    }
  }
}

TEST(RealHarmonicTest, ParityAndRange) {
  for (int l = 0; l <= kMaxDegree; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double t = 0.7, p = 1.1;
      const double a = RealSphericalHarmonic(l, m, t, p);
      const double b = RealSphericalHarmonic(l, m, kPi - t, p + kPi);
      EXPECT_NEAR(b, (l % 2 ? -1.0 : 1.0) * a, 1e-13);
    }
  }
  EXPECT_THROW(RealSphericalHarmonic(2, 3, 0.1, 0.1), Error);
}

TEST(RealHarmonicTest, OrthonormalOnSphere) {
  // Independent midpoint product rule; the integrands are trigonometric
  // polynomials in phi so the azimuthal sum is exact.
  const int nt = 2000, np = 40;
  const int lmax = 4;
  const int count = (lmax + 1) * (lmax + 1);
  std::vector<double> g(count * count, 0.0);
  std::vector<double> y(count);
  for (int it = 0; it < nt; ++it) {
    const double t = (it + 0.5) * kPi / nt;
    for (int ip = 0; ip < np; ++ip) {
      const double p = 2 * kPi * ip / np;
      const double w = std::sin(t) * (kPi / nt) * (2 * kPi / np);
      int k = 0;
      for (int l = 0; l <= lmax; ++l)
        for (int m = -l; m <= l; ++m) y[k++] = RealSphericalHarmonic(l, m, t, p);
      for (int a = 0; a < count; ++a)
        for (int b = 0; b < count; ++b) g[a * count + b] += w * y[a] * y[b];
    }
  }
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b) EXPECT_NEAR(g[a * count + b], a == b ? 1.0 : 0.0, 2e-5);

  const DenseMatrix ag = AngularGram(4, 16, 32);
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b) EXPECT_NEAR(ag(a, b), a == b ? 1.0 : 0.0, 1e-8);
}

TEST(EnumerateBasesTest, TwentySevenIsThreeRadialModesUpToDegreeTwo) {
  const auto bases = EnumerateBases(27);
  ASSERT_EQ(bases.size(), 27u);
  EXPECT_EQ(bases[0], (BasisIndex{0, 0, 1}));
  EXPECT_EQ(bases[1], (BasisIndex{1, -1, 1}));
  EXPECT_EQ(bases[8], (BasisIndex{2, 2, 1}));
  EXPECT_EQ(bases[9], (BasisIndex{0, 0, 2}));
  EXPECT_EQ(bases[26], (BasisIndex{2, 2, 3}));
  for (const auto& b : bases) EXPECT_TRUE(b.IsValid());
}

TEST(EnumerateBasesTest, ValidCountsAndRejection) {
  EXPECT_EQ(ValidBasisCounts(30), (std::vector<int>{1, 4, 8, 9, 16, 18, 25, 27}));
  try {
    EnumerateBases(10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_NE(std::string(e.what()).find("9 16"), std::string::npos) << e.what();
  }
  EXPECT_THROW(EnumerateBases(0), Error);
}

TEST(BasisEvaluatorTest, ProductFormAndSupport) {
  const double radius = 2.5;
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), radius);
  const BasisIndex idx{2, -1, 2};
  const double k = BesselBoundaryRoots(2, radius, 2)[1];
  EXPECT_DOUBLE_EQ(ev.Wavenumber(2, 2), k);
  const Vec3 p{0.4, -1.1, 0.9};
  const double r = std::sqrt(0.16 + 1.21 + 0.81);
  EXPECT_NEAR(ev(idx, p), std::sph_bessel(2, k * r) * ClosedFormY(2, -1, p[0], p[1], p[2]), 1e-13);
  EXPECT_EQ(ev(idx, {2.0, 1.6, 0.0}), 0.0);
  EXPECT_THROW(ev(BasisIndex{1, 2, 1}, p), Error);
  EXPECT_THROW(BasisEvaluator(RadialProfile::SphericalBessel(), 0.0), Error);
}

TEST(BasisEvaluatorTest, GaussianShell) {
  const BasisEvaluator ev(RadialProfile::GaussianShell(0.5), 2.5);
  const Vec3 p{0.0, 0.0, 1.5};
  const double want = std::exp(-0.5 * 0.25 / 0.25) * ClosedFormY(1, 0, 0, 0, 1.5);
  EXPECT_NEAR(ev(BasisIndex{1, 0, 2}, p), want, 1e-15);
  EXPECT_THROW(BasisEvaluator(RadialProfile::GaussianShell(0.0), 2.5), Error);
}

TEST(KernelGridTest, DefaultRadiusAndValidation) {
  EXPECT_EQ(KernelGrid::WithDefaultRadius(5).radius, 2.5);
  EXPECT_EQ(KernelGrid::WithDefaultRadius(9).radius, 4.5);
  EXPECT_THROW(KernelGrid::WithDefaultRadius(4), Error);
  EXPECT_EQ(KernelGrid::WithDefaultRadius(7).Volume(), 343u);
}

TEST(SampleOnGridTest, IdentitySamplingMatchesDirectEvaluation) {
  const KernelGrid grid = KernelGrid::WithDefaultRadius(5);
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), grid.radius);
  const BasisIndex idx{1, 1, 1};
  const auto s = SampleOnGrid(ev, idx, grid, Mat3::Identity(), {0, 0, 0}, false);
  for (int z = 0; z < 5; ++z)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) {
        const Vec3 u{x - 2.0, y - 2.0, z - 2.0};
        EXPECT_EQ(s.values[(z * 5 + y) * 5 + x], ev(idx, u));
      }
  EXPECT_EQ(s.index, idx);
}

TEST(SampleOnGridTest, TransformShiftAndNormalization) {
  const KernelGrid grid = KernelGrid::WithDefaultRadius(5);
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), grid.radius);
  const BasisIndex idx{2, 1, 2};
  const Mat3 t{{1.2, 0.3, 0, -0.1, 0.9, 0.2, 0, 0.4, 1.1}};
  const auto raw = SampleOnGrid(ev, idx, grid, t, {0, 0, 0}, false);
  for (int z = 0; z < 5; ++z)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) {
        EXPECT_EQ(raw.values[(z * 5 + y) * 5 + x], ev(idx, t * Vec3{x - 2.0, y - 2.0, z - 2.0}));
      }
  const IntVec3 shift{1, 3, 4};
  const auto shifted = SampleOnGrid(ev, idx, grid, t, shift, true);
  double norm = 0;
  for (double v : raw.values) norm += v * v;
  norm = std::sqrt(norm);
  for (int z = 0; z < 5; ++z)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) {
        const int d = (((z + 4) % 5) * 5 + (y + 3) % 5) * 5 + (x + 1) % 5;
        EXPECT_NEAR(shifted.values[d], raw.values[(z * 5 + y) * 5 + x] / norm, 1e-15);
      }
  EXPECT_EQ(shifted.applied_shift, shift);
  EXPECT_EQ(shifted.applied_transform, t);
}

TEST(SampleOnGridTest, SphericallySymmetricKernelIsAxisSymmetric) {
  const KernelGrid grid = KernelGrid::WithDefaultRadius(7);
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), grid.radius);
  const auto s = SampleOnGrid(ev, {0, 0, 1}, grid, Mat3::Identity(), {0, 0, 0}, true);
  auto at = [&](int z, int y, int x) { return s.values[(z * 7 + y) * 7 + x]; };
  for (int z = 0; z < 7; ++z)
    for (int y = 0; y < 7; ++y)
      for (int x = 0; x < 7; ++x) {
        EXPECT_DOUBLE_EQ(at(z, y, x), at(x, z, y));
        EXPECT_DOUBLE_EQ(at(z, y, x), at(6 - z, y, x));
      }
}

TEST(SampleOnGridTest, QuarterTurnIsVoxelPermutation) {
  const KernelGrid grid = KernelGrid::WithDefaultRadius(5);
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), grid.radius);
  // R_z(90): (x, y, z) -> (-y, x, z). Sampling psi(R u) at voxel (x, y)
  // reads the unrotated sample at (2 - y, x) in centered-offset terms.
  const Mat3 rz{{0, -1, 0, 1, 0, 0, 0, 0, 1}};
  for (const BasisIndex idx : {BasisIndex{1, 1, 1}, BasisIndex{2, -2, 1}, BasisIndex{2, 1, 3}}) {
    const auto base = SampleOnGrid(ev, idx, grid, Mat3::Identity(), {0, 0, 0}, false);
    const auto rot = SampleOnGrid(ev, idx, grid, rz, {0, 0, 0}, false);
    for (int z = 0; z < 5; ++z)
      for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) {
          EXPECT_NEAR(rot.values[(z * 5 + y) * 5 + x], base.values[(z * 5 + x) * 5 + (4 - y)],
                      1e-12);
        }
  }
}

TEST(SampleOnGridTest, Errors) {
  const KernelGrid grid = KernelGrid::WithDefaultRadius(5);
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), grid.radius);
  // A huge scale leaves only the center in the support, where l = 1 vanishes.
  try {
    SampleOnGrid(ev, {1, 0, 1}, grid, Mat3::Diagonal(100, 100, 100), {0, 0, 0}, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateKernel);
  }
  const BasisEvaluator other(RadialProfile::SphericalBessel(), 3.0);
  EXPECT_THROW(SampleOnGrid(other, {0, 0, 1}, grid, Mat3::Identity(), {0, 0, 0}, true), Error);
}

TEST(CircularShiftTest, FullPeriodIsIdentity) {
  std::vector<double> v(27);
  for (int i = 0; i < 27; ++i) v[i] = i;
  EXPECT_EQ(CircularShift(v, 3, {3, -3, 6}), v);
  const auto s = CircularShift(v, 3, {1, 0, 0});
  EXPECT_EQ(s[1], v[0]);
  EXPECT_EQ(s[0], v[2]);
}

TEST(GramTest, DiscreteGramOfNormalizedKernelsHasUnitDiagonal) {
  const KernelGrid grid = KernelGrid::WithDefaultRadius(5);
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), grid.radius);
  std::vector<SampledKernel> ks;
  for (const auto& b : EnumerateBases(9)) {
    ks.push_back(SampleOnGrid(ev, b, grid, Mat3::Identity(), {0, 0, 0}, true));
  }
  const DenseMatrix g = DiscreteGram(ks);
  for (int i = 0; i < 9; ++i) {
    EXPECT_NEAR(g(i, i), 1.0, 1e-14);
    for (int j = 0; j < 9; ++j) EXPECT_DOUBLE_EQ(g(i, j), g(j, i));
  }
}

TEST(GramTest, FineGridGramIsDiagonallyDominant) {
  const KernelGrid grid = KernelGrid::WithDefaultRadius(41);
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), grid.radius);
  std::vector<SampledKernel> ks;
  for (const auto& b : EnumerateBases(27)) {
    ks.push_back(SampleOnGrid(ev, b, grid, Mat3::Identity(), {0, 0, 0}, false));
  }
  const DenseMatrix g = DiscreteGram(ks);
  double min_diag = g(0, 0), max_off = 0;
  for (int i = 0; i < 27; ++i) {
    min_diag = std::min(min_diag, g(i, i));
    for (int j = 0; j < 27; ++j) {
      if (i != j) max_off = std::max(max_off, std::abs(g(i, j)));
    }
  }
  EXPECT_LT(max_off, 0.1 * min_diag);
}

TEST(GramTest, RadialGramOrthogonalWithClosedFormDiagonal) {
  for (double radius : {1.0, 2.5}) {
    for (int l = 0; l <= 4; ++l) {
      const DenseMatrix g = RadialGram(l, radius, 4, 10000);
      const auto ks = BesselBoundaryRoots(l, radius, 4);
      for (int i = 0; i < 4; ++i) {
        const double d = RadialNorm(l, radius, ks[i]);
        EXPECT_NEAR(g(i, i), d, 1e-6 * d);
        for (int j = 0; j < 4; ++j) {
          if (i != j) {
            EXPECT_LT(std::abs(g(i, j)) / std::sqrt(g(i, i) * g(j, j)), 1e-6);
          }
        }
      }
    }
  }
}

TEST(GramTest, AnalyticGramIsDiagonalForSfb) {
  const double radius = 2.5;
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), radius);
  const auto bases = EnumerateBases(27);
  const DenseMatrix g = AnalyticGram(bases, ev, 40);
  for (int i = 0; i < 27; ++i) {
    const auto& b = bases[i];
    const double want = RadialNorm(b.l, radius, ev.Wavenumber(b.l, b.n));
    EXPECT_NEAR(g(i, i), want, 1e-9 * want);
    for (int j = 0; j < 27; ++j) {
      if (i != j) {
        EXPECT_LT(std::abs(g(i, j)), 1e-9 * want);
      }
    }
  }
}

}  // namespace
}  // namespace wmcg
