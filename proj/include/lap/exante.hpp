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

#include <array>
#include <vector>

#include "lap/dist.hpp"
#include "lap/mech.hpp"

namespace lap {

/// Optimal split of at most `budget` units of selling probability across
/// concave (ironed) revenue curves, with each share decomposed into the one- or
/// two-price lottery that attains it.
struct ExAnteSolution {
    struct Bidder {
        double x = 0.0;        // ex-ante selling probability
        double revenue = 0.0;  // envelope value at x
        IronLottery prices;    // decomposition via the curve's iron lottery
    };
    std::vector<Bidder> bidders;
    double value = 0.0;   // sum of envelope values
    double budget = 0.0;  // total probability actually assigned
};

/// Greedy water-filling on envelope slopes. Exact because the envelopes are
/// concave piecewise-linear. Equal slopes fill earlier curves first, so a
/// dummy bidder passed last only absorbs what the real bidders cannot use.
ExAnteSolution solve_exante(const std::vector<RevenueCurve>& curves, double budget);

/// Lower bounds on the three candidate pooling mechanisms, normalized to v = 1.
/// Requires 0 <= x1, x2, x1 + x2 <= 1, r1 >= x1, r2 >= x2.
std::array<double, 3> pooling_revenue_bounds(double r1, double r2, double x1, double x2);

struct PooledPairReport {
    double rev1 = 0.0, rev2 = 0.0, rev3 = 0.0;  // exact revenues, original scale
    int chosen = 0;                             // 1, 2 or 3
    double chosen_revenue = 0.0;
    double bound1 = 0.0, bound2 = 0.0, bound3 = 0.0;  // Claim-1 bounds, original scale
    double benchmark = 0.0;  // three-bidder ex-ante optimum, original scale
    double ratio = 0.0;      // chosen_revenue / benchmark
    bool irregular_route = false;
    // normalized (v = 1) program solution
    double x1 = 0.0, x2 = 0.0, r1 = 0.0, r2 = 0.0;
    std::vector<double> prices_a, prices_b;  // candidate posted prices, original scale
};

struct PooledPairResult {
    Mechanism mechanism;    // best of the three candidates, on the original scale
    PoolSchedule schedule;  // pool interval the chosen mechanism commits to
    PooledPairReport report;
};

/// Builds the two-real-bidders-plus-deterministic-dummy pooling mechanism and
/// its report. Supports of a and b must lie in [v, inf), v > 0.
PooledPairResult pooled_pair_mechanism(const DiscreteDistribution& a, const DiscreteDistribution& b,
                              double v);

}  // namespace lap
