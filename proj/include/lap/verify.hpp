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

#include <cstdint>
#include <optional>
#include <vector>

#include "lap/mech.hpp"

namespace lap {

struct DeviationWitness {
    int bidder = -1;
    std::vector<double> profile;
    double bid = 0.0;
    double truthful_utility = 0.0;
    double deviating_utility = 0.0;
    bool ir_violation = false;
};

struct DeviationReport {
    bool passed = true;
    std::optional<DeviationWitness> witness;
    std::int64_t checks = 0;
};

/// Exhaustive ex-post deviation scan: every profile, every bidder, every bid
/// from the breakpoint-complete candidate set. Deviators keep choosing menu
/// options and accepting prices according to their true value. The first
/// violation in scan order (profile, bidder, bid — all ascending) is returned.
DeviationReport check_dsic_ir(const AuctionInstance& inst, const Mechanism& mech,
                              const std::vector<double>& extra_breakpoints = {});

/// The deviation bids check_dsic_ir would use; exposed for diagnostics.
std::vector<double> deviation_bids(const AuctionInstance& inst,
                                   const std::vector<double>& extra_breakpoints);

/// Revenue-optimal DSIC + IR auction value on the full support grid, solved as
/// a linear program over monotone allocations with threshold payments folded
/// into the objective. Valid for correlated priors. Throws
/// std::invalid_argument("instance too large") beyond 10000 grid profiles.
double optimal_dsic_lp(const AuctionInstance& inst);

/// expected_revenue(mech) / benchmark. Throws on a non-positive benchmark.
double ratio_report(const AuctionInstance& inst, const Mechanism& mech, double benchmark);

struct GridCheckReport {
    double grid_step = 0.0;
    double rmax = 0.0;
    double min_ratio = 0.0;             // min of max{bounds} / benchmark-sum
    double min_ratio_normalized = 0.0;  // min_ratio / (4/7)
    double r1 = 0.0, r2 = 0.0, x1 = 0.0, x2 = 0.0;  // argmin grid point
    std::int64_t points = 0;
};

/// Grid verification of the algebraic four-sevenths inequality: over
/// {0 <= x1, x2, x1+x2 <= 1, x1 <= r1 <= rmax, x2 <= r2 <= rmax} the best of
/// the candidate-mechanism bounds covers 4/7 of r1 + r2 + 1 - x1 - x2.
GridCheckReport grid_check_47(double step, double rmax);

struct SearchResult {
    PoolSchedule schedule;
    double revenue = 0.0;
    std::size_t family_size = 0;
};

/// Best schedule in an explicit finite family by exact expected revenue.
/// Ties keep the earliest (fewest-jumps-first) candidate.
SearchResult search_lap(const AuctionInstance& inst, const std::vector<PoolSchedule>& family);

/// Every schedule of at most max_jumps disjoint (optionally touching) jump
/// intervals with endpoints drawn from `endpoints`; the empty schedule first,
/// then by jump count.
std::vector<PoolSchedule> schedule_family(const std::vector<double>& endpoints, int max_jumps);

/// Deliberately non-truthful first-price sealed-bid auction; the deviation
/// checker must find a shading witness against it.
Mechanism make_first_price(const AuctionInstance& inst);

}  // namespace lap
