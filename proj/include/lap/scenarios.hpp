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
#include <string>
#include <vector>

#include "lap/mech.hpp"

namespace lap {

/// Two bidders: a point mass at 1 and {1+eps w.p. 1-eps, 1/eps w.p. eps}.
AuctionInstance build_example1(double eps);

/// One (v1, v2) pair of the correlated construction, carried both as doubles
/// and as exact integers: v1 = a/grid, xi2 = b/grid, and v2 in units of
/// grid^-4, so v2 = v1 * (xi2 + eps^3) holds exactly in the integer form.
struct CorrelatedRow {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t v2_units = 0;
    double v1 = 0.0;
    double v2 = 0.0;
    double mass = 0.0;
};

struct CorrelatedOptions {
    /// Unit-spaced v1 grid while 1/eps1 stays at or under this; geometric above.
    int unit_cap = 50;
    double geometric_ratio = 1.4;
};

/// The correlated lower-bound instance: v1 equal-revenue on [1, 1/eps1],
/// v2 = v1 * (xi2 + eps^3) with xi2 equal-revenue on [1, 1/eps2], everything
/// on the eps-grid so v1 is recoverable from v2 alone.
class CorrelatedConstruction {
public:
    double eps1 = 0.0, eps2 = 0.0, eps = 0.0;
    std::int64_t grid = 0;  // 1/eps as an integer
    std::vector<double> v1_support, v1_mass;
    std::vector<double> xi2_support, xi2_mass;
    std::vector<CorrelatedRow> rows;
    AuctionInstance instance;
    /// Whether float64 carries enough bits for decode_value to round-trip on
    /// every row (it cannot once v2 * grid^4 outgrows the 53-bit significand).
    bool double_decode_exact = false;

    /// v1 grid units from the exact v2 representation: the fractional part of
    /// v2/eps^2 is a/grid^2, i.e. a = v2_units mod grid^2. Exact at any size.
    std::int64_t decode_units(std::int64_t v2_units) const;
    /// Same decoder from the rounded double; exact only when
    /// double_decode_exact is set.
    double decode_value(double v2) const;
};

CorrelatedConstruction build_correlated(double eps1, double eps2, double eps,
                                        const CorrelatedOptions& opts = {});

/// Revenue a pooled jump [s, t] extracts from one unit of equal-revenue mass:
/// 1 - s/t + ((t-s)/(2t)) ln(t/s).
double lap_interval_revenue_closed_form(double s, double t);
/// The companion upper bound -ln(s/t) the closed form never exceeds.
double lap_interval_revenue_bound(double s, double t);
/// The same pooled-interval revenue evaluated by discretizing the
/// equal-revenue mass on [s, t] into `points` geometric cells and applying the
/// jump's lottery/menu accounting cell by cell.
double lap_interval_revenue_discrete(double s, double t, int points);

/// Exact expected revenue of the strong benchmark on the discrete instance:
/// offer bidder 2 the top price v1 * max(xi2), fall back to price v1 for
/// bidder 1.
double correlated_opt_benchmark(const CorrelatedConstruction& c);
/// The continuum reference value (2 - eps2) ln(1/eps1).
double correlated_opt_continuum(const CorrelatedConstruction& c);

AuctionInstance gen_random_instance(std::uint64_t seed, int n, int support_size, double lo,
                                    double hi);
/// Corpus instance for the verification sweeps: 2-3 bidders, supports of 2-5.
AuctionInstance gen_corpus_instance(std::uint64_t seed);
/// Deterministically finds a distribution whose virtual values need ironing.
DiscreteDistribution gen_random_irregular(std::uint64_t seed);

struct CorrelatedSearchResult {
    PoolSchedule schedule;
    double revenue = 0.0;
    double la_revenue = 0.0;
    std::size_t intervals = 0;  // candidate jump intervals considered
};

/// Best schedule of at most max_jumps jumps with endpoints on the v1 support.
/// Uses the per-interval revenue decomposition (each jump's effect is local
/// because v2 strictly exceeds v1 on every profile), then verifies the winner
/// against the generic simulator.
CorrelatedSearchResult search_lap_correlated(const CorrelatedConstruction& c, int max_jumps);

struct CorrelatedPoint {
    double eps1 = 0.0, eps2 = 0.0, eps = 0.0;
    double opt_exact = 0.0, opt_continuum = 0.0;
    double la = 0.0, best_lap = 0.0, ratio = 0.0;
    bool decoder_ok = false;
    bool decoder_double_ok = false;
    std::string schedule;
    std::size_t profiles = 0;
};

CorrelatedPoint run_correlated_point(double eps1, double eps2, double eps,
                                     const CorrelatedOptions& opts = {}, int max_jumps = 3);
/// The standard shrinking-eps1 ladder at eps2 = 0.05.
std::vector<CorrelatedPoint> run_correlated_ladder(int max_jumps = 3);

}  // namespace lap
