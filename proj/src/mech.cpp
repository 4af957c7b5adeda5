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

#include "lap/mech.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace lap {

struct PricingCache {
    std::mutex mu;
    std::map<std::pair<int, double>, std::pair<double, double>> entries;
};

std::shared_ptr<PricingCache> make_pricing_cache() { return std::make_shared<PricingCache>(); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kChoiceTol = 1e-12;

double rel_tol(double x) { return 1e-12 * std::max(1.0, std::abs(x)); }

/// Best posted price >= floor against an already-conditioned posterior.
/// Ties break toward the lowest price; the comparison uses a relative margin so
/// that O(1e-15) accumulation noise on equal-revenue curves does not steal the
/// argmax from the lowest price.
std::pair<double, double> best_price(const DiscreteDistribution& d, double floor) {
    double best_p = floor;
    double best_r = -1.0;
    for (double p : d.support()) {
        if (p < floor) continue;
        const double r = p * d.survival(p);
        if (r > best_r + rel_tol(best_r)) {
            best_r = r;
            best_p = p;
        }
    }
    if (best_r < 0.0) return {floor, 0.0};
    return {best_p, best_r};
}

std::pair<double, double> best_price_or_floor(const std::optional<DiscreteDistribution>& post,
                                              double floor) {
    if (!post) return {floor, 0.0};
    return best_price(*post, floor);
}

double pairwise_sum(std::vector<double>& terms) {
    if (terms.empty()) return 0.0;
    std::size_t n = terms.size();
    while (n > 1) {
        std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i) terms[i] += terms[i + half];
        n = half;
    }
    return terms[0];
}

}  // namespace

PoolSchedule::PoolSchedule(std::vector<std::pair<double, double>> jumps)
    : jumps_(std::move(jumps)) {
    double prev_end = 0.0;
    for (const auto& [s, t] : jumps_) {
        if (!std::isfinite(s) || !std::isfinite(t) || s < 0.0 || !(s < t) || s < prev_end)
            throw std::invalid_argument("non-monotone schedule");
        prev_end = t;
    }
}

std::string PoolSchedule::str() const {
    std::ostringstream os;
    os.precision(15);
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        if (k) os << ";";
        os << "[" << jumps_[k].first << "," << jumps_[k].second << "]";
    }
    if (jumps_.empty()) os << "[]";
    return os.str();
}

AuctionInstance AuctionInstance::independent(std::vector<DiscreteDistribution> marginals) {
    if (marginals.empty()) throw std::invalid_argument("need at least one bidder");
    AuctionInstance inst;
    inst.n_ = static_cast<int>(marginals.size());
    inst.marginals_ = std::move(marginals);
    inst.supports_.reserve(inst.marginals_.size());
    for (const auto& d : inst.marginals_) inst.supports_.push_back(d.support());
    return inst;
}

AuctionInstance AuctionInstance::joint(std::vector<std::vector<double>> profiles,
                                       std::vector<double> mass) {
    if (profiles.empty() || profiles.size() != mass.size())
        throw std::invalid_argument("joint table needs matching non-empty profiles and mass");
    const std::size_t n = profiles.front().size();
    if (n == 0) throw std::invalid_argument("joint profiles must have at least one bidder");
    double sum = 0.0;
    for (std::size_t r = 0; r < profiles.size(); ++r) {
        if (profiles[r].size() != n) throw std::invalid_argument("ragged joint table");
        for (double v : profiles[r])
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument("joint values must be finite and non-negative");
        if (!(mass[r] > 0.0)) throw std::invalid_argument("joint masses must be positive");
        sum += mass[r];
    }
    if (std::abs(sum - 1.0) > kMassSumTol)
        throw std::invalid_argument("joint masses must sum to 1");

    AuctionInstance inst;
    inst.n_ = static_cast<int>(n);
    inst.joint_profiles_ = std::move(profiles);
    inst.joint_mass_ = std::move(mass);
    inst.supports_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> vals;
        vals.reserve(inst.joint_profiles_.size());
        for (const auto& row : inst.joint_profiles_) vals.push_back(row[i]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        inst.supports_[i] = std::move(vals);
    }
    return inst;
}

const std::vector<DiscreteDistribution>& AuctionInstance::marginals() const {
    if (!is_independent()) throw std::logic_error("joint prior has no independent marginals");
    return marginals_;
}

std::vector<double> AuctionInstance::support_union() const {
    std::vector<double> all;
    for (const auto& s : supports_) all.insert(all.end(), s.begin(), s.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

void AuctionInstance::for_each_profile(
    const std::function<void(std::span<const double>, double)>& f) const {
    if (is_independent()) {
        std::vector<std::size_t> idx(n_, 0);
        std::vector<double> values(n_);
        while (true) {
            double mass = 1.0;
            for (int i = 0; i < n_; ++i) {
                values[i] = marginals_[i].support()[idx[i]];
                mass *= marginals_[i].mass()[idx[i]];
            }
            f(values, mass);
            int i = n_ - 1;
            while (i >= 0 && ++idx[i] == marginals_[i].size()) idx[i--] = 0;
            if (i < 0) break;
        }
    } else {
        for (std::size_t r = 0; r < joint_profiles_.size(); ++r)
            f(joint_profiles_[r], joint_mass_[r]);
    }
}

std::optional<DiscreteDistribution> AuctionInstance::posterior(
    int bidder, const std::vector<BidderCondition>& conds) const {
    const BidderCondition& own = conds[bidder];
    const double floor = own.kind == BidderCondition::Kind::AtLeast ? own.a : 0.0;

    if (is_independent()) {
        try {
            return marginals_[bidder].conditional_at_least(floor);
        } catch (const std::domain_error&) {
            return std::nullopt;
        }
    }

    // Joint prior: filter table rows by everything the run has revealed.
    // relax = 0: as given; 1: exact reveals weakened to upper bounds;
    // 2: ignore the other bidders entirely. The relaxations are only reachable
    // under off-support deviation bids.
    for (int relax = 0; relax <= 2; ++relax) {
        std::map<double, double> atoms;
        double total = 0.0;
        for (std::size_t r = 0; r < joint_profiles_.size(); ++r) {
            const auto& row = joint_profiles_[r];
            if (row[bidder] < floor - rel_tol(floor)) continue;
            bool ok = true;
            if (relax < 2) {
                for (int j = 0; j < n_ && ok; ++j) {
                    if (j == bidder) continue;
                    const BidderCondition& cd = conds[j];
                    switch (cd.kind) {
                        case BidderCondition::Kind::None:
                        case BidderCondition::Kind::AtLeast:
                            break;
                        case BidderCondition::Kind::Exact:
                            ok = relax == 0 ? std::abs(row[j] - cd.a) <= rel_tol(cd.a)
                                            : row[j] <= cd.a + rel_tol(cd.a);
                            break;
                        case BidderCondition::Kind::Window:
                            ok = row[j] >= cd.a - rel_tol(cd.a) && row[j] < cd.b - rel_tol(cd.b);
                            break;
                    }
                }
            }
            if (!ok) continue;
            atoms[row[bidder]] += joint_mass_[r];
            total += joint_mass_[r];
        }
        if (total > 0.0) {
            std::vector<double> sup, m;
            sup.reserve(atoms.size());
            m.reserve(atoms.size());
            for (const auto& [v, w] : atoms) {
                sup.push_back(v);
                m.push_back(w / total);
            }
            double s = 0.0;
            for (double w : m) s += w;
            for (double& w : m) w /= s;
            return DiscreteDistribution(std::move(sup), std::move(m));
        }
    }
    return std::nullopt;
}

std::pair<double, double> posted_price_revenue(const DiscreteDistribution& d, double floor) {
    const DiscreteDistribution cond = d.conditional_at_least(floor);
    return best_price(cond, floor);
}

MenuChoice menu_choice(double pool_price, std::size_t pool_size, double r) {
    if (pool_size < 2) throw std::invalid_argument("a pool has at least two bidders");
    const double k = static_cast<double>(pool_size);
    return {1.0 / k, pool_price / k, pool_price / k + r * (k - 1.0) / k};
}

namespace {

/// Posted price and conditional revenue for `bidder` at `cutoff`, memoized for
/// independent priors where the pair fully determines the answer.
std::pair<double, double> cutoff_price(const AuctionInstance& inst, int bidder, double cutoff,
                                       const std::vector<BidderCondition>& conds,
                                       PricingCache* cache) {
    if (cache != nullptr && inst.is_independent()) {
        const std::pair<int, double> key{bidder, cutoff};
        {
            std::lock_guard<std::mutex> lock(cache->mu);
            const auto it = cache->entries.find(key);
            if (it != cache->entries.end()) return it->second;
        }
        const auto result = best_price_or_floor(inst.posterior(bidder, conds), cutoff);
        std::lock_guard<std::mutex> lock(cache->mu);
        cache->entries.emplace(key, result);
        return result;
    }
    return best_price_or_floor(inst.posterior(bidder, conds), cutoff);
}

/// Shared LA/LAP run. LA is the empty schedule. `decisions` drives the winner's
/// take-it-or-leave acceptance and the pooled survivor's menu choice.
Outcome simulate_lap(const AuctionInstance& inst,
                     const std::vector<std::pair<double, double>>& jumps,
                     std::span<const double> bids, std::span<const double> decisions,
                     PricingCache* cache) {
    const int n = inst.bidders();
    if (static_cast<int>(bids.size()) != n || static_cast<int>(decisions.size()) != n)
        throw std::invalid_argument("profile size mismatch");
    Outcome out(static_cast<std::size_t>(n));

    static thread_local std::vector<int> active;
    static thread_local std::vector<int> pool_buf;
    static thread_local std::vector<int> survivor_buf;
    static thread_local std::vector<BidderCondition> conds;
    active.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) active[static_cast<std::size_t>(i)] = i;
    conds.assign(static_cast<std::size_t>(n), BidderCondition{});
    double cutoff = 0.0;
    std::size_t next_jump = 0;

    while (true) {
        const double s = next_jump < jumps.size() ? jumps[next_jump].first : kInf;
        if (s < cutoff - 1e-15) throw std::invalid_argument("non-monotone schedule");

        int reach = 0;
        for (int i : active)
            if (bids[static_cast<std::size_t>(i)] >= s) ++reach;

        if (reach <= 1) {
            // Continuous phase resolves the auction before the next jump: the
            // losers drop at their exact bids, the cutoff stops at the
            // second-highest bid still active (or stays put with one bidder).
            int winner = active[0];
            for (int i : active)
                if (bids[static_cast<std::size_t>(i)] > bids[static_cast<std::size_t>(winner)])
                    winner = i;
            double floor = cutoff;
            if (active.size() >= 2) {
                double second = -kInf;
                for (int i : active) {
                    if (i == winner) continue;
                    second = std::max(second, bids[static_cast<std::size_t>(i)]);
                }
                floor = std::max(cutoff, second);
            }
            for (int i : active) {
                if (i == winner) continue;
                conds[static_cast<std::size_t>(i)] = {BidderCondition::Kind::Exact,
                                                      bids[static_cast<std::size_t>(i)], 0.0};
            }
            conds[static_cast<std::size_t>(winner)] = {BidderCondition::Kind::AtLeast, floor,
                                                       0.0};
            const auto [price, rev] = cutoff_price(inst, winner, floor, conds, cache);
            (void)rev;
            if (decisions[static_cast<std::size_t>(winner)] >= price - kChoiceTol) {
                out.alloc[static_cast<std::size_t>(winner)] = 1.0;
                out.pay[static_cast<std::size_t>(winner)] = price;
            }
            return out;
        }

        // Ascend to s: bidders below the jump start drop at their exact bids.
        std::vector<int>& pool = pool_buf;
        pool.clear();
        for (int i : active) {
            if (bids[static_cast<std::size_t>(i)] >= s) {
                pool.push_back(i);
            } else {
                conds[static_cast<std::size_t>(i)] = {BidderCondition::Kind::Exact,
                                                      bids[static_cast<std::size_t>(i)], 0.0};
            }
        }
        active.swap(pool);
        cutoff = s;
        const double t = jumps[next_jump].second;
        ++next_jump;

        const std::size_t k = active.size();  // |S(c°)| >= 2 here
        std::vector<int>& survivors = survivor_buf;
        survivors.clear();
        for (int i : active)
            if (bids[static_cast<std::size_t>(i)] >= t) survivors.push_back(i);

        if (survivors.empty()) {
            for (int i : active) {
                out.alloc[static_cast<std::size_t>(i)] = 1.0 / static_cast<double>(k);
                out.pay[static_cast<std::size_t>(i)] = s / static_cast<double>(k);
            }
            return out;
        }
        if (survivors.size() == 1) {
            const int i = survivors[0];
            for (int j : active) {
                if (j == i) continue;
                conds[static_cast<std::size_t>(j)] = {BidderCondition::Kind::Window, s, t};
            }
            conds[static_cast<std::size_t>(i)] = {BidderCondition::Kind::AtLeast, t, 0.0};
            const auto [r, rrev] = cutoff_price(inst, i, t, conds, cache);
            (void)rrev;
            const MenuChoice menu = menu_choice(s, k, r);
            const double v = decisions[static_cast<std::size_t>(i)];
            const double u_buy = v - menu.buy_price;
            const double u_lottery = v * menu.lottery_alloc - menu.lottery_price;
            if (u_buy >= u_lottery - kChoiceTol && u_buy >= -kChoiceTol) {
                out.alloc[static_cast<std::size_t>(i)] = 1.0;
                out.pay[static_cast<std::size_t>(i)] = menu.buy_price;
            } else if (u_lottery >= -kChoiceTol) {
                out.alloc[static_cast<std::size_t>(i)] = menu.lottery_alloc;
                out.pay[static_cast<std::size_t>(i)] = menu.lottery_price;
            }
            // Declining both menu options leaves the item unsold.
            return out;
        }
        active.swap(survivors);
        cutoff = t;
    }
}

Outcome myerson_outcome(const AuctionInstance& inst,
                        const std::vector<VirtualValueTable>& tables,
                        std::span<const double> bids) {
    const int n = inst.bidders();
    Outcome out(static_cast<std::size_t>(n));
    std::vector<double> phis(static_cast<std::size_t>(n));
    double max_phi = -kInf;
    for (int i = 0; i < n; ++i) {
        phis[static_cast<std::size_t>(i)] =
            tables[static_cast<std::size_t>(i)].ironed_at(bids[static_cast<std::size_t>(i)]);
        max_phi = std::max(max_phi, phis[static_cast<std::size_t>(i)]);
    }
    if (!(max_phi > 1e-12)) return out;  // all ironed virtual values at or below zero
    int winner = 0;
    while (phis[static_cast<std::size_t>(winner)] != max_phi) ++winner;

    // Threshold payment: the least support value at which the winner still wins.
    const auto& wt = tables[static_cast<std::size_t>(winner)];
    for (std::size_t jj = 0; jj < wt.values.size(); ++jj) {
        const double f = wt.phi_ironed[jj];
        if (!(f > 1e-12)) continue;
        bool wins = true;
        for (int j = 0; j < inst.bidders() && wins; ++j) {
            if (j == winner) continue;
            const double fj = phis[static_cast<std::size_t>(j)];
            wins = j < winner ? f > fj : f >= fj;
        }
        if (wins) {
            out.alloc[static_cast<std::size_t>(winner)] = 1.0;
            out.pay[static_cast<std::size_t>(winner)] = wt.values[jj];
            break;
        }
    }
    return out;
}

}  // namespace

Mechanism make_la(const AuctionInstance& inst, std::shared_ptr<PricingCache> cache) {
    auto shared = std::make_shared<AuctionInstance>(inst);
    if (!cache) cache = make_pricing_cache();
    return {"la",
            [shared, cache](std::span<const double> bids, std::span<const double> decisions) {
                return simulate_lap(*shared, {}, bids, decisions, cache.get());
            }};
}

Mechanism make_lap(const AuctionInstance& inst, PoolSchedule schedule,
                   std::shared_ptr<PricingCache> cache) {
    auto shared = std::make_shared<AuctionInstance>(inst);
    auto jumps = std::make_shared<std::vector<std::pair<double, double>>>(schedule.jumps());
    if (!cache) cache = make_pricing_cache();
    return {"lap " + schedule.str(),
            [shared, jumps, cache](std::span<const double> bids,
                                   std::span<const double> decisions) {
                return simulate_lap(*shared, *jumps, bids, decisions, cache.get());
            }};
}

Mechanism make_myerson(const AuctionInstance& inst) {
    if (!inst.is_independent()) throw std::invalid_argument("requires independence");
    auto shared = std::make_shared<AuctionInstance>(inst);
    auto tables = std::make_shared<std::vector<VirtualValueTable>>();
    for (const auto& d : inst.marginals()) tables->push_back(virtual_values(d));
    return {"myerson", [shared, tables](std::span<const double> bids, std::span<const double>) {
                return myerson_outcome(*shared, *tables, bids);
            }};
}

Outcome run_la(const AuctionInstance& inst, std::span<const double> profile) {
    return simulate_lap(inst, {}, profile, profile, nullptr);
}

Outcome run_lap(const AuctionInstance& inst, const PoolSchedule& schedule,
                std::span<const double> profile) {
    return simulate_lap(inst, schedule.jumps(), profile, profile, nullptr);
}

Outcome run_myerson(const AuctionInstance& inst, std::span<const double> profile) {
    if (!inst.is_independent()) throw std::invalid_argument("requires independence");
    std::vector<VirtualValueTable> tables;
    for (const auto& d : inst.marginals()) tables.push_back(virtual_values(d));
    return myerson_outcome(inst, tables, profile);
}

double expected_revenue(const AuctionInstance& inst, const Mechanism& mech) {
    std::vector<double> terms;
    inst.for_each_profile([&](std::span<const double> values, double mass) {
        terms.push_back(mass * mech.run(values, values).revenue());
    });
    return pairwise_sum(terms);
}

}  // namespace lap
