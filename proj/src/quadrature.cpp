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

#include "wmcg/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "wmcg/error.hpp"

namespace wmcg {

QuadratureRule GaussLegendre(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "rule size must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule MapRule(const QuadratureRule& rule, double a, double b) {
  QuadratureRule out;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  out.nodes.reserve(rule.nodes.size());
  out.weights.reserve(rule.weights.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    out.nodes.push_back(mid + half * rule.nodes[i]);
    out.weights.push_back(half * rule.weights[i]);
  }
  return out;
}

namespace {

constexpr int kPanelOrder = 16;
constexpr int kMaxDepth = 30;

double Panel(const std::function<double(double)>& f, const QuadratureRule& rule,
             double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * s;
}

void Refine(const std::function<double(double)>& f, const QuadratureRule& rule,
            double a, double b, double whole, double tol, int depth,
            IntegrationResult& acc) {
  const double m = 0.5 * (a + b);
  const double left = Panel(f, rule, a, m);
  const double right = Panel(f, rule, m, b);
  acc.nodes += 2 * rule.nodes.size();
  const double diff = std::abs(left + right - whole);
  if (diff <= tol || depth >= kMaxDepth) {
    acc.value += left + right;
    acc.error_estimate += diff;
    return;
  }
  Refine(f, rule, a, m, left, 0.5 * tol, depth + 1, acc);
  Refine(f, rule, m, b, right, 0.5 * tol, depth + 1, acc);
}

}  // namespace

IntegrationResult IntegrateAdaptive(const std::function<double(double)>& f,
                                    double a, double b, double tol,
                                    std::size_t min_nodes) {
  static const QuadratureRule rule = GaussLegendre(kPanelOrder);
  // Each panel evaluates the whole rule and its two halves.
  const std::size_t per_panel = 3 * kPanelOrder;
  const std::size_t panels = std::max<std::size_t>(1, (min_nodes + per_panel - 1) / per_panel);

  IntegrationResult acc;
  const double width = (b - a) / static_cast<double>(panels);
  // Absolute tolerance from a coarse magnitude estimate.
  double scale = 0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * p;
    scale += std::abs(Panel(f, rule, lo, lo + width));
  }
  const double abs_tol = tol * std::max(scale, 1e-300);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * p;
    const double hi = (p + 1 == panels) ? b : lo + width;
    const double whole = Panel(f, rule, lo, hi);
    acc.nodes += kPanelOrder;
    Refine(f, rule, lo, hi, whole, abs_tol / panels, 0, acc);
  }
  return acc;
}

}  // namespace wmcg
