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

// Self-check suites run by `wmcg check`. Each item records a measured value
// against its threshold; a suite passes iff every item does.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wmcg/equiv_harness.hpp"
#include "wmcg/run_config.hpp"

namespace wmcg {

enum class CheckSuite { kOrtho, kDecompose, kRoots, kGrad, kEquiv };

std::optional<CheckSuite> ParseCheckSuite(const std::string& name);
const char* SuiteName(CheckSuite suite);

struct CheckItem {
  std::string name;
  double measured = 0;
  double threshold = 0;
  bool inclusive = false;  // measured <= threshold instead of <

  bool Passed() const { return inclusive ? measured <= threshold : measured < threshold; }
};

struct CheckReport {
  std::string suite;
  std::vector<CheckItem> items;

  bool Passed() const;
  const CheckItem* FirstFailure() const;
  // One line per item, then a verdict line naming the first failure if any.
  std::string ToText() const;
};

CheckReport RunCheckSuite(CheckSuite suite, const RunConfig& config);

CheckReport CheckRoots(const RunConfig& config);
CheckReport CheckDecompose(const RunConfig& config);
CheckReport CheckOrtho(const RunConfig& config);
CheckReport CheckGrad(const RunConfig& config, int instances = 20);
CheckReport CheckEquiv(const RunConfig& config);

// One-sided paired sign test: P(X >= wins) for X ~ Binomial(trials, 1/2).
double SignTestPValue(int wins, int trials);

// Layers for equivariance sweeps built from the run config. WMCG layers draw
// their plan (and random weights, if configured) from the sample seed. With
// `matched` the layer applied to the transformed input samples its bases in
// the transformed frame; shifts must then be disabled for exactness.
LayerFactory MakeLayerFactory(const RunConfig& config, EquivLayerKind kind,
                              bool matched = false);

SweepConfig MakeSweepConfig(const RunConfig& config);

}  // namespace wmcg
