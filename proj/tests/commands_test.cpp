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


#include "wmcg/commands.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "wmcg/checks.hpp"
#include "wmcg/error.hpp"

namespace wmcg {
namespace {

// Splits one CSV row, honouring double-quoted cells.
std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      cells.emplace_back();
    } else {
      cells.back() += ch;
    }
  }
  return cells;
}

RunConfig Small() {
  RunConfig c;
  c.c_out = 2;
  c.c_in = 3;
  c.augmentation.seed = 6;
  return c;
}

TEST(GenerateBankTest, ShapeFlagsAndDeterminism) {
  const BankFile f = GenerateBank(Small());
  EXPECT_EQ(f.bank.c_out, 2);
  EXPECT_EQ(f.bank.c_in, 3);
  EXPECT_EQ(f.bank.size, 5);
  EXPECT_EQ(f.flags, kBankFlagNormalized | kBankFlagHaarApplied);
  EXPECT_EQ(EncodeBank(f), EncodeBank(GenerateBank(Small())));
  RunConfig other = Small();
  other.augmentation.seed = 7;
  EXPECT_NE(GenerateBank(other).bank.values, f.bank.values);
  RunConfig raw = Small();
  raw.normalize = false;
  EXPECT_EQ(GenerateBank(raw).flags, kBankFlagHaarApplied);
}

TEST(GenerateBankTest, IdentityAugmentationRepeatsOneKernel) {
  RunConfig c = Small();
  c.weights = WeightSource::kUnit;
  c.augmentation = AugmentationConfig::Identity();
  const KernelBank bank = GenerateBank(c).bank;
  for (int co = 0; co < 2; ++co)
    for (int ci = 0; ci < 3; ++ci)
      for (std::size_t v = 0; v < bank.KernelVolume(); ++v)
        EXPECT_EQ(bank.Kernel(co, ci)[v], bank.Kernel(0, 0)[v]);
}

TEST(GramCsvTest, ShapeAndDiagonal) {
  RunConfig c;
  c.basis_count = 8;
  const std::string csv = BasisGramCsv(c, GramKind::kDiscrete);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 9u);
  const auto header = SplitCsv(lines[0]);
  ASSERT_EQ(header.size(), 9u);
  EXPECT_EQ(header[1], "(l=0,m=0,n=1)");
  // Normalized sampled bases have unit voxel norm.
  for (int r = 0; r < 8; ++r) {
    const auto cells = SplitCsv(lines[r + 1]);
    ASSERT_EQ(cells.size(), 9u);
    EXPECT_NEAR(std::stod(cells[r + 1]), 1.0, 1e-14);
  }
  const std::string analytic = BasisGramCsv(c, GramKind::kAnalytic, 16);
  EXPECT_EQ(std::count(analytic.begin(), analytic.end(), '\n'), 9);
}

TEST(DecomposeTextTest, PrintsParametersAndResidual) {
  const std::string out = DecomposeText("2 0 0\n0 3 0\n0 0 0.5");
  std::istringstream in(out);
  std::string name;
  double v;
  std::vector<std::pair<std::string, double>> rows;
  while (in >> name >> v) rows.emplace_back(name, v);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0].first, "theta1");
  EXPECT_DOUBLE_EQ(rows[2].second, 1.0);
  EXPECT_DOUBLE_EQ(rows[3].second, std::log2(3.0));
  EXPECT_DOUBLE_EQ(rows[4].second, -1.0);
  EXPECT_EQ(rows[11].first, "residual");
  EXPECT_LT(rows[11].second, 1e-15);
  EXPECT_EQ(out.find("-0 "), std::string::npos);
  EXPECT_THROW(DecomposeText("1 2 3"), Error);
  EXPECT_THROW(DecomposeText("1 0 0 0 1 0 0 0 x"), Error);
  try {
    DecomposeText("1 0 0 0 1 0 0 0 -1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotInGroup);
  }
}

TEST(RootsTextTest, FifteenDigits) {
  const std::string out = RootsText(1, 1.0, 2);
  // l = 1: roots of the boundary function are n pi / R.
  EXPECT_EQ(out, "1 3.14159265358979\n2 6.28318530717959\n");
}

TEST(DumpSlicesTest, RadialKernelHasEqualSlices) {
  RunConfig c;
  c.c_out = 1;
  c.c_in = 1;
  c.basis_count = 1;
  c.augmentation = AugmentationConfig::Identity();
  const KernelBank bank = GenerateBank(c).bank;
  const SliceFiles s = DumpSlices(bank, 0, 0);
  EXPECT_EQ(s.pgm_x, s.pgm_y);
  EXPECT_EQ(s.pgm_x, s.pgm_z);
  EXPECT_EQ(std::string(s.pgm_x.begin(), s.pgm_x.begin() + 2), "P5");
  EXPECT_EQ(std::count(s.scale.begin(), s.scale.end(), '\n'), 3);
  EXPECT_EQ(s.scale.substr(0, 2), "x ");
}

TEST(DumpSlicesTest, CsvRoundTripsExactlyAndPlanesAreOriented) {
  const KernelBank bank = RandomKernelBank(2, 2, 3, 4);
  const SliceFiles s = DumpSlices(bank, 1, 0);
  std::istringstream in(s.csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "z,y,x,value");
  int n = 0;
  while (std::getline(in, line)) {
    int z, y, x;
    char comma;
    std::istringstream row(line);
    row >> z >> comma >> y >> comma >> x >> comma;
    std::string value;
    row >> value;
    EXPECT_EQ(std::stod(value), bank.Kernel(1, 0)[(z * 3 + y) * 3 + x]);
    ++n;
  }
  EXPECT_EQ(n, 27);
  // Plane z = 1 pixels follow (y, x) raster order; the extremes map to 0 and 255.
  const double* k = bank.Kernel(1, 0);
  std::vector<double> plane(k + 9, k + 18);
  const auto lo = std::min_element(plane.begin(), plane.end()) - plane.begin();
  const auto hi = std::max_element(plane.begin(), plane.end()) - plane.begin();
  const std::size_t data = s.pgm_z.size() - 9;
  EXPECT_EQ(s.pgm_z[data + lo], 0);
  EXPECT_EQ(s.pgm_z[data + hi], 255);
  EXPECT_THROW(DumpSlices(bank, 2, 0), Error);
  EXPECT_THROW(DumpSlices(bank, 0, -1), Error);
}

TEST(ChecksTest, SignTestPValues) {
  EXPECT_NEAR(SignTestPValue(15, 20), 0.020694732666015625, 1e-15);
  EXPECT_NEAR(SignTestPValue(0, 20), 1.0, 1e-14);
  EXPECT_NEAR(SignTestPValue(20, 20), std::ldexp(1.0, -20), 1e-20);
  EXPECT_NEAR(SignTestPValue(10, 20), 0.5880985260009766, 1e-14);
}

TEST(ChecksTest, SuiteNamesParse) {
  EXPECT_EQ(ParseCheckSuite("ortho"), CheckSuite::kOrtho);
  EXPECT_EQ(ParseCheckSuite("EQUIV"), CheckSuite::kEquiv);
  EXPECT_FALSE(ParseCheckSuite("nonsense").has_value());
  EXPECT_STREQ(SuiteName(CheckSuite::kGrad), "grad");
}

TEST(ChecksTest, ReportVerdictNamesFirstFailure) {
  CheckReport r{"demo", {{"a", 0.5, 1.0}, {"b", 2.0, 1.0}, {"c", 3.0, 1.0}}};
  EXPECT_FALSE(r.Passed());
  EXPECT_EQ(r.FirstFailure()->name, "b");
  EXPECT_NE(r.ToText().find("suite demo: FAIL, first violated check b"), std::string::npos);
  CheckReport ok{"demo", {{"a", 1.0, 1.0, true}}};
  EXPECT_TRUE(ok.Passed());
}

TEST(ChecksTest, FastSuitesPass) {
  const RunConfig c;
  for (CheckSuite s : {CheckSuite::kRoots, CheckSuite::kDecompose, CheckSuite::kOrtho}) {
    const CheckReport r = RunCheckSuite(s, c);
    EXPECT_TRUE(r.Passed()) << r.ToText();
  }
  const CheckReport g = CheckGrad(c, 3);
  EXPECT_TRUE(g.Passed()) << g.ToText();
}

TEST(BenchTest, RejectsTooFewRepeats) {
  EXPECT_THROW(RunBench(RunConfig{}, 2), Error);
}

}  // namespace
}  // namespace wmcg
