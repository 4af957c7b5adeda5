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

#include <cstddef>
#include <utility>
#include <vector>

namespace lap {

inline constexpr double kMassSumTol = 1e-12;

/// Finite value distribution with strictly positive atom masses.
/// Support is strictly increasing, values are non-negative and bounded.
/// Immutable after construction; all queries are const.
class DiscreteDistribution {
public:
    DiscreteDistribution(std::vector<double> support, std::vector<double> mass);

    static DiscreteDistribution point_mass(double value);

    const std::vector<double>& support() const noexcept { return support_; }
    const std::vector<double>& mass() const noexcept { return mass_; }
    std::size_t size() const noexcept { return support_.size(); }
    double min_value() const noexcept { return support_.front(); }
    double max_value() const noexcept { return support_.back(); }

    /// Pr[v >= price], closed survival convention.
    double survival(double price) const;
    double expectation() const;

    /// Restriction to {v >= cutoff}, renormalized.
    /// Throws std::domain_error("zero-probability condition") on an empty event.
    DiscreteDistribution conditional_at_least(double cutoff) const;

    /// Same distribution with all values multiplied by factor > 0.
    DiscreteDistribution scaled(double factor) const;

private:
    std::vector<double> support_;
    std::vector<double> mass_;
    std::vector<double> suffix_;  // suffix_[j] = Pr[v >= support_[j]]
};

/// One raw revenue-curve point: selling probability q, revenue q*price.
/// The q=0 anchor carries price = +infinity.
struct CurvePoint {
    double q;
    double revenue;
    double price;
};

/// Two-price randomization attaining the envelope value at quantile q:
/// alpha * q1 + (1 - alpha) * q2 = q, value = alpha*R(q1) + (1-alpha)*R(q2).
struct IronLottery {
    double alpha;
    double q1;
    double q2;
    double price1;
    double price2;
    double value;
    bool mixed() const noexcept { return alpha < 1.0; }
};

/// Revenue in quantile space for one distribution: raw points plus the upper
/// concave envelope (ironing). Points run from (0,0) to (1, v_min).
class RevenueCurve {
public:
    struct Segment {
        double q0, q1;  // quantile range, q0 < q1
        double r0, r1;  // envelope values at the endpoints
        double slope() const noexcept { return (r1 - r0) / (q1 - q0); }
    };

    static RevenueCurve from(const DiscreteDistribution& d);

    const std::vector<CurvePoint>& points() const noexcept { return points_; }
    /// Indices into points() of the envelope vertices (always includes 0 and last).
    const std::vector<std::size_t>& hull() const noexcept { return hull_; }
    /// Quantile intervals where the envelope lies strictly above the raw points.
    const std::vector<std::pair<double, double>>& ironed_intervals() const noexcept {
        return ironed_;
    }

    double envelope(double q) const;
    /// Chord interpolation of the raw point set.
    double raw(double q) const;
    IronLottery iron_lottery(double q) const;
    std::vector<Segment> envelope_segments() const;
    bool regular() const noexcept { return ironed_.empty(); }

private:
    std::vector<CurvePoint> points_;
    std::vector<std::size_t> hull_;
    std::vector<std::pair<double, double>> ironed_;
};

/// Per-support-value virtual values. phi is the raw revenue-curve slope at the
/// value's quantile, phi_ironed the envelope slope there.
struct VirtualValueTable {
    std::vector<double> values;       // ascending support
    std::vector<double> phi;
    std::vector<double> phi_ironed;
    bool regular = true;

    /// Step lookup: ironed virtual value of the largest support value <= bid,
    /// -infinity below the support.
    double ironed_at(double bid) const;
    double phi_at(double bid) const;
};

// Spec-level operation names.
double quantile(const DiscreteDistribution& d, double price);
RevenueCurve revenue_curve(const DiscreteDistribution& d);
IronLottery iron_lottery(const RevenueCurve& curve, double q);
VirtualValueTable virtual_values(const DiscreteDistribution& d);
DiscreteDistribution conditional_at_least(const DiscreteDistribution& d, double cutoff);

}  // namespace lap
