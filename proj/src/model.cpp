// Copyright 2026 The smalldev Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "smalldev/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "smalldev/error.hpp"

namespace smalldev {

namespace {

constexpr double kBoundSlack = 1e-12;

bool within(double v, double lo, double hi) {
  const double slack = kBoundSlack * std::max(1.0, std::abs(hi));
  return v >= lo - slack && v <= hi + slack;
}

}  // namespace

void Instance::validate() const {
  require(std::isfinite(xi) && xi > 0 && xi <= 1, "instance: xi must lie in (0, 1]");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto& v = vars[i];
    require(std::isfinite(v.a) && std::isfinite(v.b) && within(v.a, 0, xi) && within(v.b, 0, 1),
            "instance: var " + std::to_string(i) + " outside [0, xi] x [0, 1]");
  }
}

InstanceStats stats(const Instance& instance) {
  InstanceStats s;
  for (const auto& v : instance.vars) {
    if (v.degenerate()) continue;
    const double ab = v.a * v.b;
    s.D += ab;
    s.T_B += ab * (v.a * v.a + v.b * v.b) / (v.a + v.b);
    s.T_M += ab * (v.a - v.b);
  }
  return s;
}

double s_of_xi(double xi) {
  require(xi > 0 && xi <= 1, "s_of_xi: xi must lie in (0, 1]");
  const double corners[] = {0.0, 5 * xi * xi, 1 - 4 * xi, 5 * xi * xi - 8 * xi + 1};
  return *std::max_element(std::begin(corners), std::end(corners));
}

ShiftedMoments shifted_moments(double xi, double D, M3Mode mode) {
  require(D > 0, "shifted_moments: D must be positive");
  const double S = s_of_xi(xi);
  ShiftedMoments m;
  m.xi = xi;
  m.D = D;
  m.M1 = -xi;
  m.M2 = D + xi * xi;
  m.B4 = 3 * D * D + 6 * xi * xi * D + std::pow(xi, 4) + S * D;
  const double basic_l3 = -std::pow(xi, 3) - 4 * xi * D;
  if (mode.kind == M3Mode::Kind::kBasic) {
    m.L3 = basic_l3;
  } else {
    require(mode.s > 0 && mode.s <= 1, "shifted_moments: refined s must lie in (0, 1]");
    // Below s = xi the refinement no longer bites.
    m.L3 = mode.s >= xi ? -std::pow(xi, 3) - 5 * xi * D + mode.s * D : basic_l3;
  }
  return m;
}

Partition truncate_partition(const std::vector<RawTwoPoint>& raw, double tau) {
  require(tau > 1, "truncate_partition: tau must exceed 1");
  for (const auto& r : raw)
    require(r.a > 0 && r.a <= 1 && r.b > 0, "truncate_partition: need 0 < a <= 1 and b > 0");

  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return raw[i].b > raw[j].b; });

  std::size_t N = 0;
  double prefix = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    prefix += raw[order[k]].a;
    if (raw[order[k]].b >= tau * prefix) N = k + 1;
  }

  Partition p;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k < N) {
      p.A.push_back(order[k]);
      p.a_sum += raw[order[k]].a;
    } else {
      p.B.push_back(order[k]);
    }
  }
  const double scale = 1.0 / (tau * (p.a_sum + 1.0));
  p.transformed.xi = 1.0 / tau;
  for (std::size_t i : p.B)
    p.transformed.vars.push_back({raw[i].a * scale, raw[i].b * scale});
  return p;
}

std::string instance_to_json(const Instance& instance) {
  nlohmann::json j;
  j["xi"] = instance.xi;
  j["vars"] = nlohmann::json::array();
  for (const auto& v : instance.vars) j["vars"].push_back({{"a", v.a}, {"b", v.b}});
  return j.dump();
}

Instance instance_from_json(const std::string& text) {
  Instance inst;
  try {
    const auto j = nlohmann::json::parse(text);
    inst.xi = j.at("xi").get<double>();
    for (const auto& v : j.at("vars"))
      inst.vars.push_back({v.at("a").get<double>(), v.at("b").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kArgument, std::string("instance JSON: ") + e.what());
  }
  inst.validate();
  return inst;
}

}  // namespace smalldev
