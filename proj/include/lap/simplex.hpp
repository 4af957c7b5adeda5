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

#pragma once

#include <utility>
#include <vector>

namespace lap::detail {

struct LpResult {
    double objective = 0.0;
    std::vector<double> x;
};

/// maximize c'x subject to Ax <= b, x >= 0, with every b_i >= 0 (the slack
/// basis is feasible, so no phase-1 is needed). Rows are sparse
/// (column, coefficient) lists. Dantzig pricing with a Bland fallback against
/// cycling on the degenerate rows these auction programs produce.
LpResult solve_lp(int nvars, const std::vector<std::vector<std::pair<int, double>>>& rows,
                  const std::vector<double>& b, const std::vector<double>& c);

}  // namespace lap::detail
