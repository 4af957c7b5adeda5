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

#include "lap/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace lap {

namespace {
constexpr double kTol = 1e-12;
}

AuctionInstance build_example1(double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    return AuctionInstance::independent(
        {DiscreteDistribution::point_mass(1.0),
         DiscreteDistribution({1.0 + eps, 1.0 / eps}, {1.0 - eps, eps})});
}

namespace {

/// Equal-revenue masses on an ascending support: Pr[v >= x_j] = 1/x_j at every
/// support point, so each posted support price earns exactly 1.
std::vector<double> equal_revenue_mass(const std::vector<double>& support) {
    std::vector<double> mass(support.size());
    for (std::size_t j = 0; j + 1 < support.size(); ++j)
        mass[j] = 1.0 / support[j] - 1.0 / support[j + 1];
    mass.back() = 1.0 / support.back();
    double sum = 0.0;
    for (double m : mass) sum += m;
    for (double& m : mass) m /= sum;
    return mass;
}

}  // namespace

std::int64_t CorrelatedConstruction::decode_units(std::int64_t units) const {
    return units % (grid * grid);
}

double CorrelatedConstruction::decode_value(double v2) const {
    const long double n = static_cast<long double>(grid);
    const long double scaled = static_cast<long double>(v2) * n * n;  // v2 / eps^2
    const long double frac = scaled - floorl(scaled);
    const std::int64_t a = llroundl(frac * n * n);
    return static_cast<double>(a) / static_cast<double>(grid);
}

CorrelatedConstruction build_correlated(double eps1, double eps2, double eps,
                                        const CorrelatedOptions& opts) {
    // eps1 != eps2 keeps the two equal-revenue supports distinct; the
    // construction itself does not care which of the two is smaller.
    if (!(eps > 0.0 && eps < eps1 && eps < eps2 && eps1 < 1.0 && eps2 < 1.0) ||
        eps1 == eps2)
        throw std::invalid_argument("require 0 < eps < eps1, eps2 < 1 and eps1 != eps2");
    const std::int64_t n = std::llround(1.0 / eps);
    if (n < 2 || std::abs(n * eps - 1.0) > 1e-9)
        throw std::invalid_argument("infeasible grid");

    CorrelatedConstruction c;
    c.eps1 = eps1;
    c.eps2 = eps2;
    c.eps = eps;
    c.grid = n;

    auto snap_units = [&](double v) { return std::llround(v * static_cast<double>(n)); };
    auto unit_value = [&](std::int64_t a) {
        return static_cast<double>(a) / static_cast<double>(n);
    };

    // v1 support: unit-spaced up to the cap, geometric beyond, both snapped to
    // the eps-grid and always ending exactly at 1/eps1.
    std::vector<std::int64_t> a_units;
    const double top1 = 1.0 / eps1;
    if (top1 <= static_cast<double>(opts.unit_cap) + 1e-9) {
        for (double v = 1.0; v < top1 - 1e-9; v += 1.0) a_units.push_back(snap_units(v));
        a_units.push_back(snap_units(top1));
    } else {
        for (double v = 1.0; v < top1 * (1.0 - 1e-12); v *= opts.geometric_ratio)
            a_units.push_back(snap_units(v));
        a_units.push_back(snap_units(top1));
    }
    std::sort(a_units.begin(), a_units.end());
    a_units.erase(std::unique(a_units.begin(), a_units.end()), a_units.end());
    if (a_units.front() != n) throw std::invalid_argument("infeasible grid");
    if (a_units.back() >= n * n) throw std::invalid_argument("infeasible grid");

    // xi2 support: the integers up to 1/eps2 (plus a snapped non-integer top).
    std::vector<std::int64_t> b_units;
    const double top2 = 1.0 / eps2;
    for (double v = 1.0; v < top2 - 1e-9; v += 1.0) b_units.push_back(snap_units(v));
    b_units.push_back(snap_units(top2));
    std::sort(b_units.begin(), b_units.end());
    b_units.erase(std::unique(b_units.begin(), b_units.end()), b_units.end());

    for (std::int64_t a : a_units) c.v1_support.push_back(unit_value(a));
    for (std::int64_t b : b_units) c.xi2_support.push_back(unit_value(b));
    c.v1_mass = equal_revenue_mass(c.v1_support);
    c.xi2_mass = equal_revenue_mass(c.xi2_support);

    const long double n4 = static_cast<long double>(n) * n * n * n;
    std::vector<std::vector<double>> profiles;
    std::vector<double> mass;
    double total = 0.0;
    c.double_decode_exact = true;
    for (std::size_t j = 0; j < a_units.size(); ++j) {
        for (std::size_t k = 0; k < b_units.size(); ++k) {
            const std::int64_t a = a_units[j];
            const std::int64_t b = b_units[k];
            const __int128 u128 =
                static_cast<__int128>(a) * b * n * n + static_cast<__int128>(a);
            if (u128 > static_cast<__int128>(INT64_MAX)) throw std::invalid_argument("infeasible grid");
            const std::int64_t u = static_cast<std::int64_t>(u128);
            CorrelatedRow row;
            row.a = a;
            row.b = b;
            row.v2_units = u;
            row.v1 = c.v1_support[j];
            row.v2 = static_cast<double>(static_cast<long double>(u) / n4);
            row.mass = c.v1_mass[j] * c.xi2_mass[k];
            total += row.mass;
            c.rows.push_back(row);
            profiles.push_back({row.v1, row.v2});
            mass.push_back(row.mass);
            if (std::llround(c.decode_value(row.v2) * static_cast<double>(n)) != a)
                c.double_decode_exact = false;
        }
    }
    for (double& m : mass) m /= total;
    for (auto& row : c.rows) row.mass /= total;
    c.instance = AuctionInstance::joint(std::move(profiles), std::move(mass));
    return c;
}

double lap_interval_revenue_closed_form(double s, double t) {
    if (!(s > 0.0) || !(s < t)) throw std::invalid_argument("requires 0 < s < t");
    return 1.0 - s / t + (t - s) / (2.0 * t) * std::log(t / s);
}

double lap_interval_revenue_bound(double s, double t) {
    if (!(s > 0.0) || !(s < t)) throw std::invalid_argument("requires 0 < s < t");
    return -std::log(s / t);
}

double lap_interval_revenue_discrete(double s, double t, int points) {
    if (points < 1) throw std::invalid_argument("need at least one grid cell");
    if (!(s > 0.0) || !(s < t)) throw std::invalid_argument("requires 0 < s < t");
    // Equal-revenue mass in [s, t]: Pr[v >= x] = 1/x. A low bidder at x pays
    // the pool price s when the high value stays under t (probability
    // 1 - x/t against the scaled equal-revenue top), and the survivor menu
    // collects (s + t)/2 otherwise.
    const double ratio = std::pow(t / s, 1.0 / points);
    double rev = 0.0;
    double x = s;
    for (int j = 0; j < points; ++j) {
        const double x_next = j + 1 == points ? t : x * ratio;
        const double cell_mass = 1.0 / x - 1.0 / x_next;
        const double p_high = x / t;
        rev += cell_mass * (s * (1.0 - p_high) + (s + t) / 2.0 * p_high);
        x = x_next;
    }
    return rev;
}

double correlated_opt_benchmark(const CorrelatedConstruction& c) {
    const double xi_top = c.xi2_support.back();
    double rev = 0.0;
    for (const auto& row : c.rows) {
        const double price2 = row.v1 * xi_top;
        rev += row.mass * (row.v2 >= price2 ? price2 : row.v1);
    }
    return rev;
}

double correlated_opt_continuum(const CorrelatedConstruction& c) {
    return (2.0 - c.eps2) * std::log(1.0 / c.eps1);
}

AuctionInstance gen_random_instance(std::uint64_t seed, int n, int support_size, double lo,
                                    double hi) {
    if (n < 1 || n > 4) throw std::invalid_argument("n must lie in 1..4");
    if (support_size < 1 || support_size > 8)
        throw std::invalid_argument("support size must lie in 1..8");
    if (!(lo >= 0.0) || !(lo < hi)) throw std::invalid_argument("bad value range");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uv(lo, hi);
    std::exponential_distribution<double> ew(1.0);

    std::vector<DiscreteDistribution> ds;
    for (int i = 0; i < n; ++i) {
        std::vector<double> vals;
        while (static_cast<int>(vals.size()) < support_size) {
            double v = std::round(uv(rng) * 1000.0) / 1000.0;
            if (v <= 0.0) v = 0.001;
            if (std::find(vals.begin(), vals.end(), v) == vals.end()) vals.push_back(v);
        }
        std::sort(vals.begin(), vals.end());
        std::vector<double> m(vals.size());
        double sum = 0.0;
        for (double& w : m) {
            w = ew(rng) + 0.05;
            sum += w;
        }
        for (double& w : m) w /= sum;
        double head = 0.0;
        for (std::size_t j = 0; j + 1 < m.size(); ++j) head += m[j];
        m.back() = 1.0 - head;
        ds.emplace_back(vals, m);
    }
    return AuctionInstance::independent(std::move(ds));
}

AuctionInstance gen_corpus_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
    const int n = 2 + static_cast<int>(rng() % 2);
    const int s = 2 + static_cast<int>(rng() % 4);
    return gen_random_instance(rng(), n, s, 0.05, 5.0);
}

DiscreteDistribution gen_random_irregular(std::uint64_t seed) {
    for (std::uint64_t t = 0; t < 200; ++t) {
        std::mt19937_64 rng(seed * 1000003ULL + t);
        std::uniform_int_distribution<int> np(3, 6);
        const int m = np(rng);
        std::uniform_real_distribution<double> uv(0.5, 20.0);
        std::vector<double> vals;
        while (static_cast<int>(vals.size()) < m) {
            const double v = std::round(uv(rng) * 1000.0) / 1000.0;
            if (std::find(vals.begin(), vals.end(), v) == vals.end()) vals.push_back(v);
        }
        std::sort(vals.begin(), vals.end());
        std::gamma_distribution<double> g(0.35, 1.0);
        std::vector<double> mass(vals.size());
        double sum = 0.0;
        for (double& w : mass) {
            w = g(rng) + 1e-3;
            sum += w;
        }
        for (double& w : mass) w /= sum;
        double head = 0.0;
        for (std::size_t j = 0; j + 1 < mass.size(); ++j) head += mass[j];
        mass.back() = 1.0 - head;
        DiscreteDistribution d(vals, mass);
        if (!virtual_values(d).regular) return d;
    }
    // spiky draws essentially always produce one; a fixed fallback keeps the
    // function total anyway
    const double scale = 1.0 + static_cast<double>(seed % 7) * 0.1;
    return DiscreteDistribution({scale, 2.0 * scale, 10.0 * scale}, {0.8, 0.1, 0.1});
}

namespace {

struct SliceData {
    double mass = 0.0;     // v1 marginal mass
    double la_rev = 0.0;   // exact-reveal lookahead revenue of the slice
};

/// Slice revenue of a jump [s, t) for pooled slice j, mirroring the simulator:
/// lottery at s when v2 < t, otherwise the survivor menu at price r.
double jump_slice_revenue(const CorrelatedConstruction& c, std::size_t j, double s, double t,
                          double r) {
    double rev = 0.0;
    for (std::size_t k = 0; k < c.xi2_support.size(); ++k) {
        const CorrelatedRow& row = c.rows[j * c.xi2_support.size() + k];
        double contribution;
        if (row.v2 >= t) {
            const double buy_price = s / 2.0 + r / 2.0;
            const double u_buy = row.v2 - buy_price;
            const double u_lottery = row.v2 / 2.0 - s / 2.0;
            contribution =
                (u_buy >= u_lottery - kTol && u_buy >= -kTol) ? buy_price : s / 2.0;
        } else {
            contribution = s;  // everyone pooled: uniform lottery at price s
        }
        rev += c.xi2_mass[k] * contribution;
    }
    return rev;
}

}  // namespace

CorrelatedSearchResult search_lap_correlated(const CorrelatedConstruction& c, int max_jumps) {
    const std::size_t m = c.v1_support.size();
    const std::size_t kxi = c.xi2_support.size();

    // Exact-reveal lookahead revenue per v1 slice: the posterior of v2 given
    // v1 is the scaled equal-revenue curve, priced by the lowest-tie rule.
    std::vector<SliceData> slices(m);
    for (std::size_t j = 0; j < m; ++j) {
        slices[j].mass = c.v1_mass[j];
        std::vector<double> sup, w;
        for (std::size_t k = 0; k < kxi; ++k) {
            sup.push_back(c.rows[j * kxi + k].v2);
            w.push_back(c.xi2_mass[k]);
        }
        const DiscreteDistribution post(sup, w);
        slices[j].la_rev = posted_price_revenue(post, c.v1_support[j]).second;
    }
    double la_total = 0.0;
    for (const auto& sl : slices) la_total += sl.mass * sl.la_rev;

    // Net gain of each candidate jump interval over plain lookahead. Jumps act
    // only on the slices they pool (v2 > v1 everywhere), so schedule revenue
    // is la_total plus the sum of its jumps' gains.
    std::vector<std::vector<double>> gain(m, std::vector<double>(m, 0.0));
    std::size_t intervals = 0;
    for (std::size_t si = 0; si + 1 < m; ++si) {
        for (std::size_t ti = si + 1; ti < m; ++ti) {
            ++intervals;
            const double s = c.v1_support[si];
            const double t = c.v1_support[ti];
            // survivor menu price: best posted price >= t against the pooled
            // posterior {v1 in [s,t), v2 >= t}
            std::vector<std::pair<double, double>> atoms;
            for (std::size_t j = si; j < ti; ++j)
                for (std::size_t k = 0; k < kxi; ++k) {
                    const CorrelatedRow& row = c.rows[j * kxi + k];
                    if (row.v2 >= t) atoms.emplace_back(row.v2, row.mass);
                }
            double r = t;
            if (!atoms.empty()) {
                std::sort(atoms.begin(), atoms.end());
                std::vector<double> sup, w;
                double tot = 0.0;
                for (const auto& [v, ww] : atoms) tot += ww;
                for (std::size_t q = 0; q < atoms.size(); ++q) {
                    if (q > 0 && atoms[q].first == sup.back()) {
                        w.back() += atoms[q].second / tot;
                    } else {
                        sup.push_back(atoms[q].first);
                        w.push_back(atoms[q].second / tot);
                    }
                }
                r = posted_price_revenue(DiscreteDistribution(sup, w), t).first;
            }
            double g = 0.0;
            for (std::size_t j = si; j < ti; ++j)
                g += slices[j].mass * (jump_slice_revenue(c, j, s, t, r) - slices[j].la_rev);
            gain[si][ti] = g;
        }
    }

    // Weighted interval scheduling over at most max_jumps touching-allowed
    // intervals on the support endpoints.
    const int kmax = std::max(0, max_jumps);
    std::vector<std::vector<double>> dp(m, std::vector<double>(kmax + 1, 0.0));
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> choice(
        m, std::vector<std::pair<std::size_t, std::size_t>>(kmax + 1, {m, m}));
    for (std::size_t pos = m; pos-- > 0;) {
        for (int k = 1; k <= kmax; ++k) {
            double best = pos + 1 < m ? dp[pos + 1][k] : 0.0;
            std::pair<std::size_t, std::size_t> pick{m, m};
            if (pos + 1 < m) pick = choice[pos + 1][k];
            for (std::size_t ti = pos + 1; ti < m; ++ti) {
                const double cand = gain[pos][ti] + dp[ti][k - 1];
                if (cand > best + kTol) {
                    best = cand;
                    pick = {pos, ti};
                }
            }
            dp[pos][k] = best;
            choice[pos][k] = pick;
        }
    }

    std::vector<std::pair<double, double>> jumps;
    std::size_t pos = 0;
    int k = kmax;
    while (k > 0 && pos + 1 < m) {
        const auto pick = choice[pos][k];
        if (pick.first >= m) break;  // no further interval improves anything
        if (pick.first > pos) {
            pos = pick.first;
            continue;
        }
        jumps.emplace_back(c.v1_support[pick.first], c.v1_support[pick.second]);
        pos = pick.second;
        --k;
    }

    CorrelatedSearchResult res;
    res.schedule = PoolSchedule(jumps);
    res.la_revenue = la_total;
    res.revenue = la_total + (kmax > 0 ? dp[0][kmax] : 0.0);
    res.intervals = intervals;

    // The decomposition must agree with the generic simulator on the winner.
    const double direct = expected_revenue(c.instance, make_lap(c.instance, res.schedule));
    if (std::abs(direct - res.revenue) > 1e-9 * std::max(1.0, std::abs(direct)))
        throw std::logic_error("interval decomposition disagrees with the simulator");
    res.revenue = direct;
    return res;
}

CorrelatedPoint run_correlated_point(double eps1, double eps2, double eps,
                                     const CorrelatedOptions& opts, int max_jumps) {
    const CorrelatedConstruction c = build_correlated(eps1, eps2, eps, opts);
    CorrelatedPoint pt;
    pt.eps1 = eps1;
    pt.eps2 = eps2;
    pt.eps = eps;
    pt.profiles = c.rows.size();
    pt.opt_exact = correlated_opt_benchmark(c);
    pt.opt_continuum = correlated_opt_continuum(c);

    pt.decoder_ok = true;
    for (const auto& row : c.rows)
        if (c.decode_units(row.v2_units) != row.a) pt.decoder_ok = false;
    pt.decoder_double_ok = c.double_decode_exact;

    const auto search = search_lap_correlated(c, max_jumps);
    pt.la = search.la_revenue;
    pt.best_lap = search.revenue;
    pt.ratio = pt.best_lap / pt.opt_exact;
    pt.schedule = search.schedule.str();
    return pt;
}

std::vector<CorrelatedPoint> run_correlated_ladder(int max_jumps) {
    std::vector<CorrelatedPoint> ladder;
    ladder.push_back(run_correlated_point(0.1, 0.05, 0.01, {}, max_jumps));
    ladder.push_back(run_correlated_point(0.02, 0.05, 0.01, {}, max_jumps));
    ladder.push_back(run_correlated_point(0.005, 0.05, 0.004, {}, max_jumps));
    ladder.push_back(run_correlated_point(0.001, 0.05, 1.0 / 1024.0, {}, max_jumps));
    return ladder;
}

}  // namespace lap
