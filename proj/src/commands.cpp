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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "wmcg/checks.hpp"
#include "wmcg/error.hpp"

namespace wmcg {

namespace {

std::string Printf(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename F>
double Seconds(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::uint8_t> Pgm(const std::vector<double>& pixels, int rows, int cols, double lo,
                              double hi) {
  const std::string header =
      "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (double v : pixels) {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    out.push_back(static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(t, 0.0, 1.0))));
  }
  return out;
}

}  // namespace

BankFile GenerateBank(const RunConfig& config) {
  const KernelGrid grid = config.Grid();
  const BasisEvaluator ev(config.profile, grid.radius);
  const auto bases = config.Bases();
  const auto plan = BuildLayerPlan(config.augmentation, config.c_out, config.c_in, grid.size,
                                   config.layer_id);
  const WeightTensor w =
      ConfiguredWeights(config, static_cast<int>(bases.size()), config.weight_seed);
  BankFile file;
  file.flags = kBankFlagHaarApplied | (config.normalize ? kBankFlagNormalized : 0u);
  file.bank = BuildKernelBank(w, bases, ev, grid, plan, config.normalize);
  return file;
}

std::string BasisGramCsv(const RunConfig& config, GramKind kind, int resolution) {
  const KernelGrid grid = config.Grid();
  const BasisEvaluator ev(config.profile, grid.radius);
  const auto bases = config.Bases();
  DenseMatrix g;
  if (kind == GramKind::kAnalytic) {
    g = AnalyticGram(bases, ev, resolution);
  } else {
    std::vector<SampledKernel> kernels;
    for (const auto& b : bases) {
      kernels.push_back(SampleOnGrid(ev, b, grid, Mat3::Identity(), {0, 0, 0}, config.normalize));
    }
    g = DiscreteGram(kernels);
  }
  std::string out = "basis";
  for (const auto& b : bases) out += ",\"" + ToString(b) + "\"";
  out += "\n";
  for (int i = 0; i < g.rows; ++i) {
    out += "\"" + ToString(bases[i]) + "\"";
    for (int j = 0; j < g.cols; ++j) out += "," + Printf("%.17g", g(i, j));
    out += "\n";
  }
  return out;
}

std::string DecomposeText(const std::string& input) {
  std::istringstream in(input);
  std::vector<double> v;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw Error(ErrorCode::kInvalidArgument, "not a real number: '" + token + "'");
    }
    v.push_back(x);
  }
  if (v.size() != 9) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected 9 reals, got " + std::to_string(v.size()));
  }
  Mat3 y;
  std::copy(v.begin(), v.end(), y.m.begin());
  const TransformParams p = DecomposeGl3(y);
  const Mat3 back = ComposeParams(p);
  double residual = 0;
  for (int i = 0; i < 9; ++i) residual = std::max(residual, std::abs(back.m[i] - y.m[i]));

  static const char* const kNames[] = {"theta1", "theta3", "alpha", "beta", "gamma", "s01",
                                       "s10",    "s02",    "s20",   "s12",  "s21"};
  const auto values = p.ToArray();
  std::string out;
  for (int i = 0; i < 11; ++i) out += std::string(kNames[i]) + " " + Printf("%.17g", values[i] + 0.0) + "\n";
  out += "residual " + Printf("%.17g", residual) + "\n";
  return out;
}

std::string RootsText(int l, double radius, int count) {
  std::string out;
  const auto ks = BesselBoundaryRoots(l, radius, count);
  for (int n = 1; n <= count; ++n) {
    out += std::to_string(n) + " " + Printf("%.15g", ks[n - 1]) + "\n";
  }
  return out;
}

std::string EquivText(const RunConfig& config) {
  const auto report =
      SweepReport(MakeLayerFactory(config, config.equiv_layer), MakeSweepConfig(config));
  return ReportToJsonLines(report);
}

std::string BenchResult::ToText() const {
  std::string out;
  out += "repeats " + std::to_string(repeats) + "\n";
  out += "synthesis_median_s " + Printf("%.6e", synthesis_median_s) + "\n";
  out += "bank_conv_median_s " + Printf("%.6e", bank_conv_median_s) + "\n";
  out += "random_conv_median_s " + Printf("%.6e", random_conv_median_s) + "\n";
  out += "ratio " + Printf("%.4f", ratio) + "\n";
  out += std::string("verdict ") + (within_tolerance ? "PASS" : "FAIL") +
         " (ratio must lie in [0.95, 1.05])\n";
  return out;
}

BenchResult RunBench(const RunConfig& config, int repeats) {
  if (repeats < 3) throw Error(ErrorCode::kInvalidArgument, "bench needs repeats >= 3");
  const KernelGrid grid = config.Grid();
  const BasisEvaluator ev(config.profile, grid.radius);
  const auto bases = config.Bases();
  const auto plan = BuildLayerPlan(config.augmentation, config.c_out, config.c_in, grid.size,
                                   config.layer_id);
  const WeightTensor w =
      ConfiguredWeights(config, static_cast<int>(bases.size()), config.weight_seed);
  const int n = config.bench_volume_size;
  const Tensor4D vol =
      SynthVolume(VolumeKind::kBandlimitedNoise, config.c_in, n, config.equiv_seed);
  const KernelBank random = RandomKernelBank(config.c_out, config.c_in, grid.size,
                                             config.weight_seed);

  BenchResult r;
  r.repeats = repeats;
  KernelBank bank;
  std::vector<double> synth, with_bank, with_random;
  for (int i = 0; i < repeats; ++i) {
    synth.push_back(Seconds([&] { bank = BuildKernelBank(w, bases, ev, grid, plan, config.normalize); }));
  }
  // Interleave the two convolutions so drift affects both alike.
  Tensor4D sink;
  Conv3d(vol, bank, config.padding);
  for (int i = 0; i < repeats; ++i) {
    with_bank.push_back(Seconds([&] { sink = Conv3d(vol, bank, config.padding); }));
    with_random.push_back(Seconds([&] { sink = Conv3d(vol, random, config.padding); }));
  }
  r.synthesis_median_s = Median(synth);
  r.bank_conv_median_s = Median(with_bank);
  r.random_conv_median_s = Median(with_random);
  r.ratio = r.bank_conv_median_s / r.random_conv_median_s;
  r.within_tolerance = r.ratio >= 0.95 && r.ratio <= 1.05;
  return r;
}

SliceFiles DumpSlices(const KernelBank& bank, int co, int ci) {
  if (co < 0 || co >= bank.c_out || ci < 0 || ci >= bank.c_in) {
    throw Error(ErrorCode::kInvalidArgument,
                "channel pair (" + std::to_string(co) + ", " + std::to_string(ci) +
                    ") outside bank dims (" + std::to_string(bank.c_out) + ", " +
                    std::to_string(bank.c_in) + ")");
  }
  const int k = bank.size;
  const int c = k / 2;
  const double* kernel = bank.Kernel(co, ci);
  auto at = [&](int z, int y, int x) { return kernel[(z * k + y) * k + x]; };

  SliceFiles files;
  struct Plane {
    const char* name;
    std::vector<std::uint8_t>* dst;
  };
  const Plane planes[3] = {{"x", &files.pgm_x}, {"y", &files.pgm_y}, {"z", &files.pgm_z}};
  for (int p = 0; p < 3; ++p) {
    std::vector<double> px;
    for (int row = 0; row < k; ++row) {
      for (int col = 0; col < k; ++col) {
        px.push_back(p == 0 ? at(row, col, c) : p == 1 ? at(row, c, col) : at(c, row, col));
      }
    }
    const auto [lo, hi] = std::minmax_element(px.begin(), px.end());
    *planes[p].dst = Pgm(px, k, k, *lo, *hi);
    files.scale += std::string(planes[p].name) + " " + Printf("%.17g", *lo) + " " +
                   Printf("%.17g", *hi) + "\n";
  }
  files.csv = "z,y,x,value\n";
  for (int z = 0; z < k; ++z)
    for (int y = 0; y < k; ++y)
      for (int x = 0; x < k; ++x) {
        files.csv += std::to_string(z) + "," + std::to_string(y) + "," + std::to_string(x) +
                     "," + Printf("%.17g", at(z, y, x)) + "\n";
      }
  return files;
}

void WriteSliceFiles(const SliceFiles& files, const std::string& prefix) {
  WriteBytes(prefix + "_x.pgm", files.pgm_x);
  WriteBytes(prefix + "_y.pgm", files.pgm_y);
  WriteBytes(prefix + "_z.pgm", files.pgm_z);
  WriteText(prefix + "_scale.txt", files.scale);
  WriteText(prefix + ".csv", files.csv);
}

}  // namespace wmcg
