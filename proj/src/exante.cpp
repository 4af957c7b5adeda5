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

#include "lap/exante.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lap {

namespace {
constexpr double kTol = 1e-12;
}

ExAnteSolution solve_exante(const std::vector<RevenueCurve>& curves, double budget) {
    if (curves.empty()) throw std::invalid_argument("need at least one revenue curve");
    if (!(budget > 0.0) || budget > 1.0 + kTol)
        throw std::invalid_argument("budget must lie in (0, 1]");

    struct Seg {
        std::size_t bidder;
        double slope;
        double length;
    };
    std::vector<Seg> segs;
    for (std::size_t i = 0; i < curves.size(); ++i)
        for (const auto& s : curves[i].envelope_segments())
            segs.push_back({i, s.slope(), s.q1 - s.q0});
    std::stable_sort(segs.begin(), segs.end(),
                     [](const Seg& a, const Seg& b) { return a.slope > b.slope; });

    ExAnteSolution sol;
    sol.bidders.resize(curves.size());
    double remaining = budget;
    for (const auto& s : segs) {
        if (remaining <= kTol || s.slope < 0.0) break;  // zero slopes still absorb budget
        const double take = std::min(s.length, remaining);
        sol.bidders[s.bidder].x += take;
        remaining -= take;
    }
    sol.budget = budget - std::max(remaining, 0.0);
    for (std::size_t i = 0; i < curves.size(); ++i) {
        auto& b = sol.bidders[i];
        b.x = std::min(b.x, 1.0);
        b.prices = curves[i].iron_lottery(b.x);
        b.revenue = b.prices.value;
        sol.value += b.revenue;
    }
    return sol;
}

std::array<double, 3> pooling_revenue_bounds(double r1, double r2, double x1, double x2) {
    if (x1 < -kTol || x2 < -kTol || x1 + x2 > 1.0 + 1e-9 || r1 < x1 - 1e-9 || r2 < x2 - 1e-9)
        throw std::invalid_argument(
            "pooling_revenue_bounds requires 0 <= x1, x2, x1+x2 <= 1, r1 >= x1, r2 >= x2");
    const double b1 = r1 + r2 - (r2 * x1 + r1 * x2) / 2.0;
    const double b2 = std::max(r1, r2);
    const double b3 = std::max(1.0 + (r1 - x1) / 2.0, 1.0 + (r2 - x2) / 2.0);
    return {b1, b2, b3};
}

namespace {

/// The first candidate mechanism: raise the cutoff to the lower of the two
/// posted prices no matter who drops, then either post each lone survivor
/// their own price, or pool the price gap. With both prices equal the pool is
/// empty and the ascent simply continues past it.
Mechanism make_ascend_post_pool(const AuctionInstance& inst, double price_a, double price_b) {
    const double lo = std::min(price_a, price_b);
    const double hi = std::max(price_a, price_b);
    const Mechanism pool_part =
        hi > lo + kTol ? make_lap(inst, PoolSchedule({{lo, hi}})) : make_la(inst);
    return {"ascend-post-pool",
            [price_a, price_b, lo, pool_part](std::span<const double> bids,
                                              std::span<const double> decisions) {
                Outcome out(2);
                const bool a_in = bids[0] >= lo;
                const bool b_in = bids[1] >= lo;
                if (a_in && b_in) return pool_part.run(bids, decisions);
                if (a_in && decisions[0] >= price_a - kTol) {
                    out.alloc[0] = 1.0;
                    out.pay[0] = price_a;
                } else if (b_in && !a_in && decisions[1] >= price_b - kTol) {
                    out.alloc[1] = 1.0;
                    out.pay[1] = price_b;
                }
                return out;
            }};
}

}  // namespace

PooledPairResult pooled_pair_mechanism(const DiscreteDistribution& a, const DiscreteDistribution& b,
                              double v) {
    if (!(v > 0.0)) throw std::invalid_argument("values must be at least v");
    if (a.min_value() < v - 1e-9 || b.min_value() < v - 1e-9)
        throw std::invalid_argument("values must be at least v");

    const DiscreteDistribution na = a.scaled(1.0 / v);
    const DiscreteDistribution nb = b.scaled(1.0 / v);
    const auto inst = AuctionInstance::independent({na, nb});
    const double above_all = std::max(na.max_value(), nb.max_value()) + 1.0;

    const RevenueCurve ca = revenue_curve(na);
    const RevenueCurve cb = revenue_curve(nb);
    const RevenueCurve cc = revenue_curve(DiscreteDistribution::point_mass(1.0));
    const ExAnteSolution sol = solve_exante({ca, cb, cc}, 1.0);

    PooledPairReport rep;
    rep.x1 = sol.bidders[0].x;
    rep.x2 = sol.bidders[1].x;
    rep.r1 = sol.bidders[0].revenue;
    rep.r2 = sol.bidders[1].revenue;
    const double benchmark_norm = rep.r1 + rep.r2 + 1.0 - rep.x1 - rep.x2;

    // An ex-ante share of zero has no finite price; any price above both
    // supports reproduces its accounting exactly.
    auto candidates = [&](const ExAnteSolution::Bidder& bd) {
        // The q = 0 anchor has no finite price; selling with that probability
        // share means selling to nobody, which any above-support price does.
        auto clamp = [&](double p) { return std::isfinite(p) ? p : above_all; };
        std::vector<double> c;
        if (bd.x <= kTol) {
            c.push_back(above_all);
        } else if (bd.prices.mixed()) {
            c.push_back(clamp(bd.prices.price1));
            c.push_back(clamp(bd.prices.price2));
        } else {
            c.push_back(clamp(bd.prices.price1));
        }
        return c;
    };
    const std::vector<double> cands_a = candidates(sol.bidders[0]);
    const std::vector<double> cands_b = candidates(sol.bidders[1]);
    rep.irregular_route = cands_a.size() > 1 || cands_b.size() > 1;

    // Mechanism (1): best price pair.
    double rev1 = -1.0;
    double best1_a = cands_a[0], best1_b = cands_b[0];
    for (double pa : cands_a) {
        for (double pb : cands_b) {
            const double r = expected_revenue(inst, make_ascend_post_pool(inst, pa, pb));
            if (r > rev1 + kTol) {
                rev1 = r;
                best1_a = pa;
                best1_b = pb;
            }
        }
    }

    // Mechanism (2): plain lookahead.
    const double rev2 = expected_revenue(inst, make_la(inst));

    // Mechanism (3): pool from the dummy's value up to one of the prices.
    double rev3 = -1.0;
    double best3_p = 0.0;
    std::vector<double> pool_tops = cands_a;
    pool_tops.insert(pool_tops.end(), cands_b.begin(), cands_b.end());
    for (double p : pool_tops) {
        if (p > 1.0 + kTol) {
            const double r = expected_revenue(inst, make_lap(inst, PoolSchedule({{1.0, p}})));
            if (r > rev3 + kTol) {
                rev3 = r;
                best3_p = p;
            }
        }
    }
    if (rev3 < 0.0) {
        rev3 = rev2;  // no non-degenerate pool available
        best3_p = 0.0;
    }

    const auto bounds = pooling_revenue_bounds(rep.r1, rep.r2, rep.x1, rep.x2);

    rep.rev1 = rev1 * v;
    rep.rev2 = rev2 * v;
    rep.rev3 = rev3 * v;
    rep.bound1 = bounds[0] * v;
    rep.bound2 = bounds[1] * v;
    rep.bound3 = bounds[2] * v;
    rep.benchmark = benchmark_norm * v;
    for (double p : cands_a) rep.prices_a.push_back(p * v);
    for (double p : cands_b) rep.prices_b.push_back(p * v);

    rep.chosen = 1;
    rep.chosen_revenue = rep.rev1;
    if (rep.rev2 > rep.chosen_revenue + kTol) {
        rep.chosen = 2;
        rep.chosen_revenue = rep.rev2;
    }
    if (rep.rev3 > rep.chosen_revenue + kTol) {
        rep.chosen = 3;
        rep.chosen_revenue = rep.rev3;
    }
    rep.ratio = rep.chosen_revenue / rep.benchmark;

    // Rebuild the winner on the original scale.
    const auto orig = AuctionInstance::independent({a, b});
    PooledPairResult res{Mechanism{}, PoolSchedule{}, rep};
    if (rep.chosen == 1) {
        res.mechanism = make_ascend_post_pool(orig, best1_a * v, best1_b * v);
        const double lo = std::min(best1_a, best1_b) * v;
        const double hi = std::max(best1_a, best1_b) * v;
        if (hi > lo + kTol) res.schedule = PoolSchedule({{lo, hi}});
    } else if (rep.chosen == 2) {
        res.mechanism = make_la(orig);
    } else {
        if (best3_p > 0.0) {
            res.schedule = PoolSchedule({{v, best3_p * v}});
            res.mechanism = make_lap(orig, res.schedule);
        } else {
            res.mechanism = make_la(orig);
        }
    }
    return res;
}

}  // namespace lap
