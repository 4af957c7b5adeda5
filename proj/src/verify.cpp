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

#include "lap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

#include "lap/simplex.hpp"

namespace lap {

namespace {
constexpr double kUtilityTol = 1e-9;
}

std::vector<double> deviation_bids(const AuctionInstance& inst,
                                   const std::vector<double>& extra_breakpoints) {
    std::vector<double> base = inst.support_union();
    std::vector<double> grid = base;
    grid.insert(grid.end(), extra_breakpoints.begin(), extra_breakpoints.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < grid.size(); ++j)
        min_gap = std::min(min_gap, grid[j + 1] - grid[j]);
    const double delta = std::isfinite(min_gap) ? min_gap / 2.0 : 0.5;

    std::vector<double> bids = grid;
    for (std::size_t j = 0; j + 1 < grid.size(); ++j)
        bids.push_back((grid[j] + grid[j + 1]) / 2.0);
    for (double e : extra_breakpoints) {
        bids.push_back(e - delta);
        bids.push_back(e + delta);
    }
    bids.push_back(0.0);
    if (!grid.empty()) bids.push_back(grid.back() + 1.0);

    std::sort(bids.begin(), bids.end());
    bids.erase(std::remove_if(bids.begin(), bids.end(), [](double b) { return b < 0.0; }),
               bids.end());
    bids.erase(std::unique(bids.begin(), bids.end()), bids.end());
    return bids;
}

DeviationReport check_dsic_ir(const AuctionInstance& inst, const Mechanism& mech,
                              const std::vector<double>& extra_breakpoints) {
    const auto bids = deviation_bids(inst, extra_breakpoints);

    std::vector<std::vector<double>> profiles;
    inst.for_each_profile([&](std::span<const double> v, double) {
        profiles.emplace_back(v.begin(), v.end());
    });

    DeviationReport rep;
    for (const auto& v : profiles) {
        const Outcome truthful = mech.run(v, v);
        std::vector<double> utils(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            utils[i] = v[i] * truthful.alloc[i] - truthful.pay[i];
            ++rep.checks;
            if (utils[i] < -kUtilityTol) {
                rep.passed = false;
                rep.witness = DeviationWitness{static_cast<int>(i), v, v[i], utils[i],
                                               utils[i], true};
                return rep;
            }
        }
        std::vector<double> dev = v;
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (double b : bids) {
                if (b == v[i]) continue;
                dev[i] = b;
                const Outcome out = mech.run(dev, v);
                const double u_dev = v[i] * out.alloc[i] - out.pay[i];
                ++rep.checks;
                if (u_dev > utils[i] + kUtilityTol) {
                    rep.passed = false;
                    rep.witness =
                        DeviationWitness{static_cast<int>(i), v, b, utils[i], u_dev, false};
                    return rep;
                }
            }
            dev[i] = v[i];
        }
    }
    return rep;
}

double optimal_dsic_lp(const AuctionInstance& inst) {
    const int n = inst.bidders();
    std::vector<std::vector<double>> sup(static_cast<std::size_t>(n));
    std::size_t grid = 1;
    for (int i = 0; i < n; ++i) {
        sup[static_cast<std::size_t>(i)] = inst.bidder_support(i);
        grid *= sup[static_cast<std::size_t>(i)].size();
        if (grid > 10000) throw std::invalid_argument("instance too large");
    }
    const std::size_t P = grid;

    std::vector<std::size_t> stride(static_cast<std::size_t>(n), 1);
    for (int i = n - 2; i >= 0; --i)
        stride[static_cast<std::size_t>(i)] =
            stride[static_cast<std::size_t>(i + 1)] * sup[static_cast<std::size_t>(i + 1)].size();

    // Prior mass on the full grid (zero off the joint table).
    std::vector<double> mass(P, 0.0);
    inst.for_each_profile([&](std::span<const double> v, double w) {
        std::size_t p = 0;
        for (int i = 0; i < n; ++i) {
            const auto& si = sup[static_cast<std::size_t>(i)];
            const auto it = std::lower_bound(si.begin(), si.end(), v[i]);
            p += static_cast<std::size_t>(it - si.begin()) * stride[static_cast<std::size_t>(i)];
        }
        mass[p] += w;
    });

    // One allocation variable per (bidder, grid profile); payments are folded
    // into the objective through the threshold-payment identity, leaving
    // supply and per-line monotonicity constraints.
    const int nv = static_cast<int>(P) * n;
    std::vector<double> c(static_cast<std::size_t>(nv), 0.0);
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> b;

    for (std::size_t p = 0; p < P; ++p) {
        std::vector<std::pair<int, double>> row;
        row.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            row.emplace_back(i * static_cast<int>(P) + static_cast<int>(p), 1.0);
        rows.push_back(std::move(row));
        b.push_back(1.0);
    }

    for (int i = 0; i < n; ++i) {
        const auto& si = sup[static_cast<std::size_t>(i)];
        const std::size_t m = si.size();
        const std::size_t st = stride[static_cast<std::size_t>(i)];
        const std::size_t lines = P / m;
        for (std::size_t line = 0; line < lines; ++line) {
            // base grid index of this line (own coordinate = 0)
            const std::size_t hi = line / st;
            const std::size_t lo = line % st;
            const std::size_t base = hi * st * m + lo;

            double above = 0.0;  // prior mass with own value strictly higher
            for (std::size_t k = m; k-- > 0;) {
                const std::size_t p = base + k * st;
                const int var = i * static_cast<int>(P) + static_cast<int>(p);
                double coef = mass[p] * si[k];
                if (k + 1 < m) coef -= (si[k + 1] - si[k]) * above;
                c[static_cast<std::size_t>(var)] += coef;
                above += mass[p];
                if (k + 1 < m) {
                    const int var_up =
                        i * static_cast<int>(P) + static_cast<int>(p + st);
                    rows.push_back({{var, 1.0}, {var_up, -1.0}});
                    b.push_back(0.0);
                }
            }
        }
    }

    return detail::solve_lp(nv, rows, b, c).objective;
}

double ratio_report(const AuctionInstance& inst, const Mechanism& mech, double benchmark) {
    if (!(benchmark > 0.0)) throw std::invalid_argument("zero benchmark");
    return expected_revenue(inst, mech) / benchmark;
}

GridCheckReport grid_check_47(double step, double rmax) {
    if (!(step > 0.0) || step > 0.1) throw std::invalid_argument("step must lie in (0, 0.1]");
    if (rmax < 2.0) throw std::invalid_argument("rmax must be at least 2");

    const long nx = std::lround(std::floor(1.0 / step + 1e-9));
    struct Cell {
        long i1, i2;
    };
    std::vector<Cell> cells;
    for (long i1 = 0; i1 <= nx; ++i1)
        for (long i2 = 0; i2 + i1 <= nx; ++i2) cells.push_back({i1, i2});

    struct Local {
        double min_ratio = std::numeric_limits<double>::infinity();
        double r1 = 0, r2 = 0, x1 = 0, x2 = 0;
        std::int64_t points = 0;
    };

    auto scan = [&](std::size_t lo, std::size_t hi) {
        Local loc;
        for (std::size_t ci = lo; ci < hi; ++ci) {
            const double x1 = cells[ci].i1 * step;
            const double x2 = cells[ci].i2 * step;
            const long nr1 = std::lround(std::floor((rmax - x1) / step + 1e-9));
            for (long j1 = 0; j1 <= nr1; ++j1) {
                const double r1 = x1 + j1 * step;
                const double b3a = 1.0 + (r1 - x1) / 2.0;
                // affine in r2, advanced incrementally
                double b1 = r1 * (1.0 - x2 / 2.0) + x2 * (1.0 - x1 / 2.0);
                const double db1 = (1.0 - x1 / 2.0) * step;
                double b3b = 1.0;
                double s = r1 + x2 + 1.0 - x1 - x2;
                double r2 = x2;
                const long nr2 = std::lround(std::floor((rmax - x2) / step + 1e-9));
                for (long j2 = 0; j2 <= nr2; ++j2) {
                    double m = b1;
                    if (r1 > m) m = r1;
                    if (r2 > m) m = r2;
                    if (b3a > m) m = b3a;
                    if (b3b > m) m = b3b;
                    const double ratio = m / s;
                    ++loc.points;
                    if (ratio < loc.min_ratio) {
                        loc.min_ratio = ratio;
                        loc.r1 = r1;
                        loc.r2 = r2;
                        loc.x1 = x1;
                        loc.x2 = x2;
                    }
                    // r2/s only grows from here; nothing past this point can
                    // dip anywhere near the recorded minimum
                    if (r2 >= 0.8 * s) break;
                    b1 += db1;
                    b3b += step / 2.0;
                    s += step;
                    r2 += step;
                }
            }
        }
        return loc;
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 4;
    const std::size_t chunks = std::min<std::size_t>(std::max(1u, hw), cells.size());
    std::vector<std::future<Local>> futs;
    const std::size_t per = (cells.size() + chunks - 1) / chunks;
    for (std::size_t k = 0; k < chunks; ++k) {
        const std::size_t lo = k * per;
        const std::size_t hi = std::min(cells.size(), lo + per);
        if (lo >= hi) break;
        futs.push_back(std::async(std::launch::async, scan, lo, hi));
    }

    GridCheckReport rep;
    rep.grid_step = step;
    rep.rmax = rmax;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (auto& f : futs) {
        const Local loc = f.get();
        rep.points += loc.points;
        if (loc.min_ratio < rep.min_ratio) {
            rep.min_ratio = loc.min_ratio;
            rep.r1 = loc.r1;
            rep.r2 = loc.r2;
            rep.x1 = loc.x1;
            rep.x2 = loc.x2;
        }
    }
    rep.min_ratio_normalized = rep.min_ratio * 7.0 / 4.0;
    return rep;
}

std::vector<PoolSchedule> schedule_family(const std::vector<double>& endpoints, int max_jumps) {
    std::vector<double> e = endpoints;
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());

    std::vector<PoolSchedule> out;
    out.emplace_back();
    std::vector<std::pair<double, double>> current;
    const std::size_t m = e.size();

    // Grouped by jump count so the fewest-jumps candidate wins revenue ties.
    for (int k = 1; k <= max_jumps; ++k) {
        std::function<void(std::size_t, int)> exact = [&](std::size_t start, int left) {
            for (std::size_t i = start; i + 1 < m; ++i) {
                for (std::size_t j = i + 1; j < m; ++j) {
                    current.emplace_back(e[i], e[j]);
                    if (left == 1)
                        out.emplace_back(current);
                    else
                        exact(j, left - 1);
                    current.pop_back();
                }
            }
        };
        exact(0, k);
    }
    return out;
}

SearchResult search_lap(const AuctionInstance& inst, const std::vector<PoolSchedule>& family) {
    SearchResult best;
    best.family_size = family.size();
    best.revenue = -std::numeric_limits<double>::infinity();
    for (const auto& sched : family) {
        const double rev = expected_revenue(inst, make_lap(inst, sched));
        if (rev > best.revenue + 1e-12) {
            best.revenue = rev;
            best.schedule = sched;
        }
    }
    return best;
}

Mechanism make_first_price(const AuctionInstance& inst) {
    const int n = inst.bidders();
    return {"first-price", [n](std::span<const double> bids, std::span<const double>) {
                Outcome out(static_cast<std::size_t>(n));
                int winner = 0;
                for (int i = 1; i < n; ++i)
                    if (bids[static_cast<std::size_t>(i)] >
                        bids[static_cast<std::size_t>(winner)])
                        winner = i;
                out.alloc[static_cast<std::size_t>(winner)] = 1.0;
                out.pay[static_cast<std::size_t>(winner)] =
                    bids[static_cast<std::size_t>(winner)];
                return out;
            }};
}

}  // namespace lap
