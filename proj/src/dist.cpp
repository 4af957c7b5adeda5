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

#include "lap/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> support,
                                           std::vector<double> mass)
    : support_(std::move(support)), mass_(std::move(mass)) {
    if (support_.empty() || support_.size() != mass_.size())
        throw std::invalid_argument("distribution needs matching non-empty support and mass");
    double sum = 0.0;
    for (std::size_t j = 0; j < support_.size(); ++j) {
        if (!std::isfinite(support_[j]) || support_[j] < 0.0)
            throw std::invalid_argument("support values must be finite and non-negative");
        if (j > 0 && !(support_[j] > support_[j - 1]))
            throw std::invalid_argument("support must be strictly increasing");
        if (!(mass_[j] > 0.0) || !std::isfinite(mass_[j]))
            throw std::invalid_argument("masses must be strictly positive");
        sum += mass_[j];
    }
    if (std::abs(sum - 1.0) > kMassSumTol)
        throw std::invalid_argument("masses must sum to 1");
    suffix_.assign(support_.size(), 0.0);
    double acc = 0.0;
    for (std::size_t j = support_.size(); j-- > 0;) {
        acc += mass_[j];
        suffix_[j] = acc;
    }
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
    return DiscreteDistribution({value}, {1.0});
}

double DiscreteDistribution::survival(double price) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), price);
    if (it == support_.end()) return 0.0;
    return suffix_[static_cast<std::size_t>(it - support_.begin())];
}

double DiscreteDistribution::expectation() const {
    double e = 0.0;
    for (std::size_t j = 0; j < support_.size(); ++j) e += support_[j] * mass_[j];
    return e;
}

DiscreteDistribution DiscreteDistribution::conditional_at_least(double cutoff) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), cutoff);
    if (it == support_.end()) throw std::domain_error("zero-probability condition");
    const auto first = static_cast<std::size_t>(it - support_.begin());
    const double total = suffix_[first];
    std::vector<double> s(support_.begin() + first, support_.end());
    std::vector<double> m(mass_.begin() + first, mass_.end());
    for (double& x : m) x /= total;
    return DiscreteDistribution(std::move(s), std::move(m));
}

DiscreteDistribution DiscreteDistribution::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    std::vector<double> s(support_);
    for (double& v : s) v *= factor;
    return DiscreteDistribution(std::move(s), mass_);
}

RevenueCurve RevenueCurve::from(const DiscreteDistribution& d) {
    RevenueCurve c;
    const auto& sup = d.support();
    const std::size_t m = sup.size();
    c.points_.reserve(m + 1);
    c.points_.push_back({0.0, 0.0, kInf});
    // Descending value order gives ascending quantiles.
    for (std::size_t j = m; j-- > 0;) {
        const double q = d.survival(sup[j]);
        c.points_.push_back({q, q * sup[j], sup[j]});
    }

    // Upper concave hull. Collinear interior points stay on the hull, so they
    // never open an ironed interval.
    double max_r = 0.0;
    for (const auto& p : c.points_) max_r = std::max(max_r, std::abs(p.revenue));
    const double tol = 1e-12 * std::max(1.0, max_r);
    auto below_chord = [&](std::size_t a, std::size_t b, std::size_t x) {
        // true iff point x lies strictly below chord a->b
        const CurvePoint &A = c.points_[a], &B = c.points_[b], &X = c.points_[x];
        const double cross = (B.q - A.q) * (X.revenue - A.revenue) -
                             (B.revenue - A.revenue) * (X.q - A.q);
        return cross < -tol;
    };
    std::vector<std::size_t>& hull = c.hull_;
    for (std::size_t i = 0; i < c.points_.size(); ++i) {
        while (hull.size() >= 2 && below_chord(hull[hull.size() - 2], i, hull.back()))
            hull.pop_back();
        hull.push_back(i);
    }

    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        if (hull[k + 1] > hull[k] + 1)
            c.ironed_.emplace_back(c.points_[hull[k]].q, c.points_[hull[k + 1]].q);
    }
    return c;
}

double RevenueCurve::envelope(double q) const {
    if (q < -1e-12 || q > 1.0 + 1e-12) throw std::invalid_argument("quantile out of [0,1]");
    q = std::clamp(q, 0.0, 1.0);
    for (std::size_t k = 0; k + 1 < hull_.size(); ++k) {
        const CurvePoint& a = points_[hull_[k]];
        const CurvePoint& b = points_[hull_[k + 1]];
        if (q <= b.q || k + 2 == hull_.size()) {
            const double t = (q - a.q) / (b.q - a.q);
            return a.revenue + t * (b.revenue - a.revenue);
        }
    }
    return points_.back().revenue;  // single-point curve cannot reach here
}

double RevenueCurve::raw(double q) const {
    if (q < -1e-12 || q > 1.0 + 1e-12) throw std::invalid_argument("quantile out of [0,1]");
    q = std::clamp(q, 0.0, 1.0);
    for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
        const CurvePoint& a = points_[k];
        const CurvePoint& b = points_[k + 1];
        if (q <= b.q || k + 2 == points_.size()) {
            const double t = (q - a.q) / (b.q - a.q);
            return a.revenue + t * (b.revenue - a.revenue);
        }
    }
    return points_.back().revenue;
}

IronLottery RevenueCurve::iron_lottery(double q) const {
    if (q < -1e-12 || q > 1.0 + 1e-12) throw std::invalid_argument("quantile out of [0,1]");
    q = std::clamp(q, 0.0, 1.0);
    const double snap = 1e-12;
    for (std::size_t k = 0; k < hull_.size(); ++k) {
        const CurvePoint& p = points_[hull_[k]];
        if (std::abs(q - p.q) <= snap)
            return {1.0, p.q, p.q, p.price, p.price, p.revenue};
    }
    for (std::size_t k = 0; k + 1 < hull_.size(); ++k) {
        const CurvePoint& a = points_[hull_[k]];
        const CurvePoint& b = points_[hull_[k + 1]];
        if (q > a.q && q < b.q) {
            const double alpha = (b.q - q) / (b.q - a.q);
            const double value = alpha * a.revenue + (1.0 - alpha) * b.revenue;
            return {alpha, a.q, b.q, a.price, b.price, value};
        }
    }
    const CurvePoint& last = points_[hull_.back()];
    return {1.0, last.q, last.q, last.price, last.price, last.revenue};
}

std::vector<RevenueCurve::Segment> RevenueCurve::envelope_segments() const {
    std::vector<Segment> segs;
    segs.reserve(hull_.size() - 1);
    for (std::size_t k = 0; k + 1 < hull_.size(); ++k) {
        const CurvePoint& a = points_[hull_[k]];
        const CurvePoint& b = points_[hull_[k + 1]];
        segs.push_back({a.q, b.q, a.revenue, b.revenue});
    }
    return segs;
}

double VirtualValueTable::ironed_at(double bid) const {
    auto it = std::upper_bound(values.begin(), values.end(), bid);
    if (it == values.begin()) return -kInf;
    return phi_ironed[static_cast<std::size_t>(it - values.begin()) - 1];
}

double VirtualValueTable::phi_at(double bid) const {
    auto it = std::upper_bound(values.begin(), values.end(), bid);
    if (it == values.begin()) return -kInf;
    return phi[static_cast<std::size_t>(it - values.begin()) - 1];
}

VirtualValueTable virtual_values(const DiscreteDistribution& d) {
    const RevenueCurve curve = RevenueCurve::from(d);
    const auto& pts = curve.points();
    const auto& hull = curve.hull();
    const std::size_t m = d.size();

    VirtualValueTable t;
    t.values = d.support();
    t.phi.resize(m);
    t.phi_ironed.resize(m);

    // Support index j (ascending value) sits at point index m - j.
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = m - j;
        t.phi[j] = (pts[k].revenue - pts[k - 1].revenue) / (pts[k].q - pts[k - 1].q);

        // Envelope slope just left of pts[k].q.
        const double q = pts[k].q;
        double slope = 0.0;
        for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
            const CurvePoint& a = pts[hull[h]];
            const CurvePoint& b = pts[hull[h + 1]];
            if (q <= b.q + 1e-15) {
                slope = (b.revenue - a.revenue) / (b.q - a.q);
                break;
            }
        }
        t.phi_ironed[j] = slope;
    }

    t.regular = true;
    const double tol = 1e-12 * std::max(1.0, std::abs(d.max_value()));
    for (std::size_t j = 0; j + 1 < m; ++j) {
        if (t.phi[j] > t.phi[j + 1] + tol) {
            t.regular = false;
            break;
        }
    }
    return t;
}

double quantile(const DiscreteDistribution& d, double price) {
    if (price < 0.0) throw std::invalid_argument("price must be non-negative");
    return d.survival(price);
}

RevenueCurve revenue_curve(const DiscreteDistribution& d) { return RevenueCurve::from(d); }

IronLottery iron_lottery(const RevenueCurve& curve, double q) { return curve.iron_lottery(q); }

DiscreteDistribution conditional_at_least(const DiscreteDistribution& d, double cutoff) {
    return d.conditional_at_least(cutoff);
}

}  // namespace lap
