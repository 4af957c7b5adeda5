//------------------------------------------------------------------------------
//
//   Copyright 2026 The lap-auctions Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "lap/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lap::detail {

namespace {
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
}

LpResult solve_lp(int nvars, const std::vector<std::vector<std::pair<int, double>>>& rows,
                  const std::vector<double>& b, const std::vector<double>& c) {
    const int m = static_cast<int>(rows.size());
    const int n = nvars;
    const int width = n + m + 1;
    for (double bi : b)
        if (bi < 0.0) throw std::invalid_argument("simplex requires b >= 0");

    std::vector<double> t(static_cast<std::size_t>(m + 1) * width, 0.0);
    auto at = [&](int r, int col) -> double& {
        return t[static_cast<std::size_t>(r) * width + col];
    };

    for (int r = 0; r < m; ++r) {
        for (const auto& [col, coef] : rows[static_cast<std::size_t>(r)]) at(r, col) += coef;
        at(r, n + r) = 1.0;
        at(r, n + m) = b[static_cast<std::size_t>(r)];
    }
    for (int j = 0; j < n; ++j) at(m, j) = -c[static_cast<std::size_t>(j)];

    std::vector<int> basis(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = n + r;

    const long max_iters = 2000 + 60L * (m + n);
    const long bland_after = max_iters / 2;
    for (long iter = 0;; ++iter) {
        if (iter > max_iters) throw std::runtime_error("simplex failed to converge");
        const bool bland = iter > bland_after;

        int enter = -1;
        double best = -kCostTol;
        for (int j = 0; j < n + m; ++j) {
            const double red = at(m, j);
            if (red < -kCostTol) {
                if (bland) {
                    enter = j;
                    break;
                }
                if (red < best) {
                    best = red;
                    enter = j;
                }
            }
        }
        if (enter < 0) break;  // optimal

        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int r = 0; r < m; ++r) {
            const double a = at(r, enter);
            if (a > kPivotTol) {
                const double ratio = at(r, n + m) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && leave >= 0 &&
                     basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
        }
        if (leave < 0) throw std::runtime_error("LP is unbounded");

        const double piv = at(leave, enter);
        for (int j = 0; j <= n + m; ++j) at(leave, j) /= piv;
        at(leave, enter) = 1.0;
        for (int r = 0; r <= m; ++r) {
            if (r == leave) continue;
            const double f = at(r, enter);
            if (f == 0.0) continue;
            for (int j = 0; j <= n + m; ++j) at(r, j) -= f * at(leave, j);
            at(r, enter) = 0.0;
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    LpResult res;
    res.x.assign(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < m; ++r) {
        const int v = basis[static_cast<std::size_t>(r)];
        if (v < n) res.x[static_cast<std::size_t>(v)] = at(r, n + m);
    }
    res.objective = at(m, n + m);
    return res;
}

}  // namespace lap::detail
