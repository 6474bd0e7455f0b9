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

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wmcg {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
QuadratureRule GaussLegendre(int n);

// Maps a [-1, 1] rule onto [a, b].
QuadratureRule MapRule(const QuadratureRule& rule, double a, double b);

struct IntegrationResult {
  double value = 0;
  double error_estimate = 0;
  std::size_t nodes = 0;
};

// Adaptive composite Gauss-Legendre integration. The interval is first split
// into enough equal panels to use at least `min_nodes` nodes, then each panel
// is bisected until a 16-point rule and its two halves agree to `tol`
// relative to the running magnitude.
IntegrationResult IntegrateAdaptive(const std::function<double(double)>& f,
                                    double a, double b, double tol,
                                    std::size_t min_nodes = 0);

}  // namespace wmcg
