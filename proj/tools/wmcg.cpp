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

// wmcg: filter banks, orthogonality and decomposition reports, equivariance
// sweeps, self-checks and benchmarks.
//
// Exit codes: 0 success, 1 failed check or runtime error, 2 usage error.

#include <cstdint>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wmcg/bank_io.hpp"
#include "wmcg/checks.hpp"
#include "wmcg/commands.hpp"
#include "wmcg/error.hpp"
#include "wmcg/run_config.hpp"

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

wmcg::RunConfig LoadConfig(const Globals& g) {
  wmcg::RunConfig config;
  if (!g.config_path.empty()) config = wmcg::LoadRunConfig(g.config_path);
  if (g.seed) config.ApplySeed(*g.seed);
  return config;
}

void Emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    wmcg::WriteText(g.out, text);
  }
}

std::string RequireOut(const Globals& g, const char* what) {
  if (g.out.empty()) {
    throw wmcg::Error(wmcg::ErrorCode::kInvalidArgument, std::string("--out is required for ") + what);
  }
  return g.out;
}

bool IsUsageError(wmcg::ErrorCode code) {
  return code == wmcg::ErrorCode::kConfig || code == wmcg::ErrorCode::kInvalidArgument ||
         code == wmcg::ErrorCode::kUnsupportedDegree;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Monte-Carlo affine group convolution toolkit"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override every seed in the configuration");
  app.add_option("--out", g.out, "Output path (or prefix for dump-slices)");

  int exit_code = wmcg::kExitOk;

  auto* basis = app.add_subcommand("basis", "Filter bank generation and Gram matrices");
  basis->require_subcommand(1);
  std::string plan_out;
  auto* gen = basis->add_subcommand("gen", "Write the kernel bank of the configured layer");
  gen->add_option("--plan", plan_out, "Also write the sampling plan as a text table");
  gen->callback([&] {
    const auto config = LoadConfig(g);
    const std::string out = RequireOut(g, "basis gen");
    wmcg::WriteBankFile(out, wmcg::GenerateBank(config));
    if (!plan_out.empty()) {
      const auto plan = wmcg::BuildLayerPlan(config.augmentation, config.c_out, config.c_in,
                                             config.kernel_size, config.layer_id);
      wmcg::WriteText(plan_out, wmcg::PlanToText(plan));
    }
  });

  std::string gram_kind = "discrete";
  int gram_resolution = 32;
  auto* gram = basis->add_subcommand("gram", "Basis Gram matrix as CSV");
  gram->add_option("--kind", gram_kind, "discrete (voxel sums) or analytic (quadrature)")
      ->check(CLI::IsMember({"discrete", "analytic"}));
  gram->add_option("--resolution", gram_resolution, "Quadrature nodes per axis (analytic)")
      ->check(CLI::Range(2, 512));
  gram->callback([&] {
    const auto kind = gram_kind == "analytic" ? wmcg::GramKind::kAnalytic
                                              : wmcg::GramKind::kDiscrete;
    Emit(g, wmcg::BasisGramCsv(LoadConfig(g), kind, gram_resolution));
  });

  std::vector<std::string> decompose_values;
  auto* decompose = app.add_subcommand(
      "decompose", "Decompose a 3x3 matrix (nine reals, row-major; stdin if none given)");
  decompose->add_option("values", decompose_values, "Matrix entries")->allow_extra_args();
  decompose->callback([&] {
    std::string input;
    if (decompose_values.empty()) {
      input.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
      for (const auto& v : decompose_values) input += v + " ";
    }
    Emit(g, wmcg::DecomposeText(input));
  });

  int roots_l = 0;
  int roots_count = 8;
  std::optional<double> roots_radius;
  auto* roots = app.add_subcommand("roots", "Radial wavenumbers k_n with j_{l-1}(k_n R) = 0");
  roots->add_option("--l", roots_l, "Degree")->check(CLI::Range(0, wmcg::kMaxDegree));
  roots->add_option("--count", roots_count, "Number of roots")->check(CLI::Range(1, 64));
  roots->add_option("--radius", roots_radius, "Support radius (default: config kernel radius)");
  roots->callback([&] {
    const double radius = roots_radius ? *roots_radius : LoadConfig(g).Grid().radius;
    Emit(g, wmcg::RootsText(roots_l, radius, roots_count));
  });

  auto* equiv = app.add_subcommand("equiv", "Equivariance sweep as JSON lines");
  equiv->callback([&] { Emit(g, wmcg::EquivText(LoadConfig(g))); });

  std::string suite_name;
  auto* check = app.add_subcommand("check", "Run a self-check suite");
  check->add_option("suite", suite_name, "ortho | decompose | roots | grad | equiv")->required();
  check->callback([&] {
    const auto suite = wmcg::ParseCheckSuite(suite_name);
    if (!suite) {
      throw wmcg::Error(wmcg::ErrorCode::kInvalidArgument, "unknown suite '" + suite_name + "'");
    }
    const auto report = wmcg::RunCheckSuite(*suite, LoadConfig(g));
    Emit(g, report.ToText());
    if (!report.Passed()) {
      std::cerr << "check failed: " << report.FirstFailure()->name << "\n";
      exit_code = wmcg::kExitCheckFailed;
    }
  });

  std::optional<int> bench_repeats;
  auto* bench = app.add_subcommand("bench", "Time bank synthesis and convolution");
  bench->add_option("--repeats", bench_repeats, "Repeats (>= 3; default from config)");
  bench->callback([&] {
    const auto config = LoadConfig(g);
    const auto result = wmcg::RunBench(config, bench_repeats.value_or(config.bench_repeats));
    Emit(g, result.ToText());
    if (!result.within_tolerance) exit_code = wmcg::kExitCheckFailed;
  });

  std::string bank_path;
  int slice_co = 0;
  int slice_ci = 0;
  auto* slices = app.add_subcommand("dump-slices", "Central cross-sections of one kernel");
  slices->add_option("--bank", bank_path, "Kernel bank file")->required();
  slices->add_option("--co", slice_co, "Output channel")->required();
  slices->add_option("--ci", slice_ci, "Input channel")->required();
  slices->callback([&] {
    const std::string prefix = RequireOut(g, "dump-slices");
    const auto file = wmcg::ReadBankFile(bank_path);
    wmcg::WriteSliceFiles(wmcg::DumpSlices(file.bank, slice_co, slice_ci), prefix);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? wmcg::kExitOk : wmcg::kExitUsage;
  } catch (const wmcg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return IsUsageError(e.code()) ? wmcg::kExitUsage : wmcg::kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wmcg::kExitCheckFailed;
  }
  return exit_code;
}
