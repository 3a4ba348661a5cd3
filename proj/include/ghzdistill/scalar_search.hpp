// Copyright 2026 The ghzdistill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Bounded scalar maximization: a uniform grid picks candidate brackets,
// Brent's method refines each one.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/math/tools/minima.hpp>

namespace ghzdistill {

struct ScalarMaximum {
  double argmax;
  double value;
};

struct MultistartOptions {
  std::size_t grid_points = 2001;
  std::size_t min_starts = 8;
  std::size_t max_starts = 24;
  int brent_bits = std::numeric_limits<double>::digits;
  std::uintmax_t brent_max_iter = 200;
};

// Global maximum of f on [lo, hi]. Every grid local maximum (best first,
// capped at max_starts) and enough further grid points to reach min_starts
// are refined over their neighbouring grid cells. Ties go to the lowest
// argmax, so the result does not depend on evaluation order.
template <typename F>
ScalarMaximum maximize_multistart(F&& f, double lo, double hi, const MultistartOptions& opt = {}) {
  const std::size_t n = std::max<std::size_t>(opt.grid_points, 3);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> xs(n);
  std::vector<double> vs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = i + 1 == n ? hi : lo + step * static_cast<double>(i);
    vs[i] = f(xs[i]);
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return vs[i] > vs[j]; });

  auto is_local_max = [&](std::size_t i) {
    const bool left = i == 0 || vs[i] >= vs[i - 1];
    const bool right = i + 1 == n || vs[i] >= vs[i + 1];
    return left && right;
  };

  std::vector<std::size_t> starts;
  for (std::size_t i : order) {
    if (starts.size() >= opt.max_starts) break;
    if (is_local_max(i)) starts.push_back(i);
  }
  for (std::size_t i : order) {
    if (starts.size() >= opt.min_starts) break;
    if (std::find(starts.begin(), starts.end(), i) == starts.end()) starts.push_back(i);
  }

  ScalarMaximum best{xs[order[0]], vs[order[0]]};
  auto consider = [&best](double x, double v) {
    if (v > best.value || (v == best.value && x < best.argmax)) best = {x, v};
  };
  for (std::size_t i = 0; i < n; ++i) consider(xs[i], vs[i]);

  for (std::size_t i : starts) {
    const double a = xs[i == 0 ? 0 : i - 1];
    const double b = xs[i + 1 == n ? n - 1 : i + 1];
    std::uintmax_t iters = opt.brent_max_iter;
    const auto [x, neg] = boost::math::tools::brent_find_minima(
        [&f](double t) { return -f(t); }, a, b, opt.brent_bits, iters);
    consider(x, -neg);
  }
  return best;
}

}  // namespace ghzdistill
