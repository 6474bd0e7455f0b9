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

// Bodies of the `wmcg` subcommands. Each returns its artifact as bytes or
// text so the tool only decides where it goes.

#pragma once

#include <string>
#include <vector>

#include "wmcg/bank_io.hpp"
#include "wmcg/run_config.hpp"

namespace wmcg {

// Exit codes of the tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Kernel bank for the configured layer: unit, random or file weights under
// the configured plan, Haar coefficients applied.
BankFile GenerateBank(const RunConfig& config);

enum class GramKind { kDiscrete, kAnalytic };

// Header row of basis labels, then one row per basis; values printed %.17g.
// Discrete: voxel inner products of the (untransformed) sampled bases.
// Analytic: quadrature over the support ball with `resolution` nodes.
std::string BasisGramCsv(const RunConfig& config, GramKind kind, int resolution = 32);

// Reads nine whitespace-separated reals (row-major Y) and prints the eleven
// parameters and the max-abs round-trip residual, one "name value" per line.
std::string DecomposeText(const std::string& input);

// One "n k_n" line per root, 15 significant digits.
std::string RootsText(int l, double radius, int count);

// JSON-lines sweep report for the configured layer kind and family.
std::string EquivText(const RunConfig& config);

struct BenchResult {
  int repeats = 0;
  double synthesis_median_s = 0;
  double bank_conv_median_s = 0;
  double random_conv_median_s = 0;
  double ratio = 0;  // bank / random
  bool within_tolerance = false;

  std::string ToText() const;
};

// Times bank synthesis and, interleaved, conv3d with the synthesized bank and
// with a random bank of identical shape. Throws kInvalidArgument if
// repeats < 3.
BenchResult RunBench(const RunConfig& config, int repeats);

struct SliceFiles {
  std::vector<std::uint8_t> pgm_x;  // plane x = c, rows z, columns y
  std::vector<std::uint8_t> pgm_y;  // plane y = c, rows z, columns x
  std::vector<std::uint8_t> pgm_z;  // plane z = c, rows y, columns x
  std::string scale;                // "<plane> <min> <max>" per image
  std::string csv;                  // "z,y,x,value" for the whole kernel
};

// Throws kInvalidArgument for out-of-range channel indices.
SliceFiles DumpSlices(const KernelBank& bank, int co, int ci);

// Writes <prefix>_x.pgm, <prefix>_y.pgm, <prefix>_z.pgm, <prefix>_scale.txt
// and <prefix>.csv.
void WriteSliceFiles(const SliceFiles& files, const std::string& prefix);

}  // namespace wmcg
