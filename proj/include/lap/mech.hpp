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

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lap/dist.hpp"

namespace lap {

/// Per-bidder allocation probability and expected payment for one bid profile,
/// with all internal lotteries integrated out.
struct Outcome {
    std::vector<double> alloc;
    std::vector<double> pay;

    explicit Outcome(std::size_t n = 0) : alloc(n, 0.0), pay(n, 0.0) {}
    double revenue() const {
        double r = 0.0;
        for (double p : pay) r += p;
        return r;
    }
};

/// Ordered disjoint price-jump intervals [s_k, t_k], s_k < t_k <= s_{k+1}.
class PoolSchedule {
public:
    PoolSchedule() = default;
    explicit PoolSchedule(std::vector<std::pair<double, double>> jumps);
    static PoolSchedule single(double s, double t) { return PoolSchedule({{s, t}}); }

    bool empty() const noexcept { return jumps_.empty(); }
    const std::vector<std::pair<double, double>>& jumps() const noexcept { return jumps_; }
    std::string str() const;

private:
    std::vector<std::pair<double, double>> jumps_;
};

/// The two options a lone jump survivor chooses between: stay in the lottery
/// the dropped pool would have run, or buy outright at the blended price.
struct MenuChoice {
    double lottery_alloc;  // 1 / |S(c_before)|
    double lottery_price;  // c_before / |S(c_before)|
    double buy_price;      // lottery_price + r * (|S| - 1) / |S|
};

/// pool_price = c_before (the cutoff the jump started from), pool_size =
/// |S(c_before)| >= 2, r = the survivor's optimal posted price above the jump.
MenuChoice menu_choice(double pool_price, std::size_t pool_size, double r);

/// What the auction has learned about one bidder's value while running.
struct BidderCondition {
    enum class Kind { None, Exact, Window, AtLeast };
    Kind kind = Kind::None;
    double a = 0.0;  // Exact: value; Window: [a, b); AtLeast: lower bound
    double b = 0.0;
};

/// n bidders with either independent marginals or an explicit joint table.
class AuctionInstance {
public:
    static AuctionInstance independent(std::vector<DiscreteDistribution> marginals);
    static AuctionInstance joint(std::vector<std::vector<double>> profiles,
                                 std::vector<double> mass);

    bool is_independent() const noexcept { return joint_profiles_.empty(); }
    int bidders() const noexcept { return n_; }

    const std::vector<DiscreteDistribution>& marginals() const;
    /// Distinct values bidder i can take (marginal support for joint priors).
    const std::vector<double>& bidder_support(int i) const { return supports_[i]; }
    /// Sorted distinct values across all bidders.
    std::vector<double> support_union() const;

    const std::vector<std::vector<double>>& joint_profiles() const { return joint_profiles_; }
    const std::vector<double>& joint_mass() const { return joint_mass_; }

    /// Visit every positive-mass profile: f(values, mass).
    void for_each_profile(const std::function<void(std::span<const double>, double)>& f) const;

    /// Posterior of one bidder's value given the run's information about
    /// everyone (the bidder's own entry is its AtLeast cutoff). Empty event
    /// yields nullopt; callers fall back to quoting the cutoff itself.
    std::optional<DiscreteDistribution> posterior(
        int bidder, const std::vector<BidderCondition>& conds) const;

private:
    int n_ = 0;
    std::vector<DiscreteDistribution> marginals_;       // independent only
    std::vector<std::vector<double>> joint_profiles_;   // joint only
    std::vector<double> joint_mass_;
    std::vector<std::vector<double>> supports_;         // per-bidder distinct values
};

/// Revenue-maximizing posted price >= floor against d restricted to {v >= floor}.
/// Ties break toward the lowest price. Throws on a zero-probability floor.
std::pair<double, double> posted_price_revenue(const DiscreteDistribution& d, double floor);

/// Memo of posted-price solutions keyed by (bidder, cutoff); sound for
/// independent priors, where the posterior depends on nothing else. Share one
/// across mechanisms of the same instance to avoid recomputing conditionals
/// in deviation scans.
struct PricingCache;
std::shared_ptr<PricingCache> make_pricing_cache();

/// A mechanism bound to an instance. `bids` is what the auction sees; `decisions`
/// supplies the values bidders use for take-it-or-leave acceptance and menu
/// choices (equal to bids when everyone is truthful).
struct Mechanism {
    std::string name;
    std::function<Outcome(std::span<const double> bids, std::span<const double> decisions)> run;

    Outcome operator()(std::span<const double> bids) const { return run(bids, bids); }
};

Mechanism make_la(const AuctionInstance& inst, std::shared_ptr<PricingCache> cache = nullptr);
Mechanism make_lap(const AuctionInstance& inst, PoolSchedule schedule,
                   std::shared_ptr<PricingCache> cache = nullptr);
Mechanism make_myerson(const AuctionInstance& inst);

Outcome run_la(const AuctionInstance& inst, std::span<const double> profile);
Outcome run_lap(const AuctionInstance& inst, const PoolSchedule& schedule,
                std::span<const double> profile);
Outcome run_myerson(const AuctionInstance& inst, std::span<const double> profile);

/// Exact expected revenue: sum over all profiles of mass * total payment,
/// reduced pairwise for a thread-count-independent result.
double expected_revenue(const AuctionInstance& inst, const Mechanism& mech);

}  // namespace lap
