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

#include <cmath>
#include <random>

#include "doctest.h"
#include "lap/dist.hpp"
#include "test_util.hpp"

using namespace lap;

namespace {

DiscreteDistribution example1_bidder2(double eps) {
    return DiscreteDistribution({1.0 + eps, 1.0 / eps}, {1.0 - eps, eps});
}

const DiscreteDistribution two_point({1.0, 2.0}, {0.5, 0.5});
const DiscreteDistribution irregular3({1.0, 2.0, 10.0}, {0.8, 0.1, 0.1});

}  // namespace

TEST_CASE("distribution invariants are enforced") {
    CHECK_THROWS(DiscreteDistribution({2.0, 1.0}, {0.5, 0.5}));
    CHECK_THROWS(DiscreteDistribution({1.0, 2.0}, {0.5, 0.6}));
    CHECK_THROWS(DiscreteDistribution({1.0, 2.0}, {1.0, 0.0}));
    CHECK_THROWS(DiscreteDistribution({-1.0, 2.0}, {0.5, 0.5}));
    CHECK_THROWS(DiscreteDistribution({}, {}));
}

TEST_CASE("quantile = closed survival probability") {
    CHECK(quantile(DiscreteDistribution::point_mass(5.0), 5.0) == 1.0);
    CHECK(quantile(example1_bidder2(0.01), 100.0) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(quantile(two_point, 1.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(quantile(two_point, 2.5) == 0.0);
    CHECK_THROWS(quantile(two_point, -1.0));
}

TEST_CASE("revenue curve: point mass") {
    const auto c = revenue_curve(DiscreteDistribution::point_mass(3.0));
    REQUIRE(c.points().size() == 2);
    CHECK(c.points()[0].q == 0.0);
    CHECK(c.points()[1].q == 1.0);
    CHECK(c.points()[1].revenue == 3.0);
    CHECK(c.regular());
    CHECK(c.envelope(0.5) == doctest::Approx(1.5));
}

TEST_CASE("revenue curve: two-point already concave") {
    const auto c = revenue_curve(two_point);
    REQUIRE(c.points().size() == 3);
    CHECK(c.points()[1].q == doctest::Approx(0.5));
    CHECK(c.points()[1].revenue == doctest::Approx(1.0));
    CHECK(c.points()[2].q == doctest::Approx(1.0));
    CHECK(c.points()[2].revenue == doctest::Approx(1.0));
    CHECK(c.ironed_intervals().empty());
}

TEST_CASE("revenue curve: irregular three-point gets ironed over [0.1, 1]") {
    const auto c = revenue_curve(irregular3);
    REQUIRE(c.points().size() == 4);
    CHECK(c.points()[1].q == doctest::Approx(0.1));
    CHECK(c.points()[1].revenue == doctest::Approx(1.0));
    CHECK(c.points()[2].q == doctest::Approx(0.2));
    CHECK(c.points()[2].revenue == doctest::Approx(0.4));
    REQUIRE(c.ironed_intervals().size() == 1);
    CHECK(c.ironed_intervals()[0].first == doctest::Approx(0.1));
    CHECK(c.ironed_intervals()[0].second == doctest::Approx(1.0));
    CHECK(c.envelope(0.2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.envelope(0.2) == doctest::Approx(lap::testutil::envelope_bruteforce(c, 0.2)));
}

TEST_CASE("iron_lottery: vertices and the ironed mixture") {
    const auto concave = revenue_curve(two_point);
    const auto at_point = iron_lottery(concave, 0.5);
    CHECK(at_point.alpha == 1.0);
    CHECK(at_point.q1 == doctest::Approx(0.5));

    const auto zero = iron_lottery(concave, 0.0);
    CHECK(zero.alpha == 1.0);
    CHECK(zero.value == 0.0);

    const auto c = revenue_curve(irregular3);
    const auto mix = iron_lottery(c, 0.2);
    CHECK(mix.alpha == doctest::Approx(8.0 / 9.0));
    CHECK(mix.q1 == doctest::Approx(0.1));
    CHECK(mix.q2 == doctest::Approx(1.0));
    CHECK(mix.value == doctest::Approx(1.0));
    CHECK(mix.price1 == doctest::Approx(10.0));
    CHECK(mix.price2 == doctest::Approx(1.0));
}

TEST_CASE("virtual values: examples") {
    const auto pm = virtual_values(DiscreteDistribution::point_mass(4.0));
    CHECK(pm.phi[0] == doctest::Approx(4.0));
    CHECK(pm.phi_ironed[0] == doctest::Approx(4.0));
    CHECK(pm.regular);

    const auto tp = virtual_values(two_point);
    CHECK(tp.phi[1] == doctest::Approx(2.0));
    CHECK(tp.phi[0] == doctest::Approx(0.0));
    CHECK(tp.regular);

    const auto ir = virtual_values(irregular3);
    CHECK(ir.phi_ironed[2] == doctest::Approx(10.0));
    CHECK(ir.phi_ironed[1] == doctest::Approx(0.0));
    CHECK(ir.phi_ironed[0] == doctest::Approx(0.0));
    CHECK_FALSE(ir.regular);
}

TEST_CASE("conditional_at_least: examples and the empty event") {
    const auto c1 = conditional_at_least(two_point, 2.0);
    CHECK(c1.size() == 1);
    CHECK(c1.support()[0] == 2.0);

    const auto c2 = conditional_at_least(example1_bidder2(0.01), 100.0);
    CHECK(c2.size() == 1);
    CHECK(c2.support()[0] == doctest::Approx(100.0));

    const auto c3 = conditional_at_least(irregular3, 2.0);
    REQUIRE(c3.size() == 2);
    CHECK(c3.mass()[0] == doctest::Approx(0.5));
    CHECK(c3.mass()[1] == doctest::Approx(0.5));

    CHECK_THROWS_WITH_AS(conditional_at_least(two_point, 3.0), "zero-probability condition",
                         std::domain_error);
}

TEST_CASE("curve properties hold on random distributions") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const auto d = lap::testutil::random_distribution(rng);
        const auto c = revenue_curve(d);
        const auto& pts = c.points();

        // point at quantile q(p) equals p * quantile(d, p) exactly
        for (const auto& p : pts) {
            if (p.q == 0.0) continue;
            CHECK(p.revenue == p.price * quantile(d, p.price));
        }

        // envelope concave, above raw, touching at hull vertices
        const auto segs = c.envelope_segments();
        for (std::size_t k = 0; k + 1 < segs.size(); ++k)
            CHECK(segs[k].slope() >= segs[k + 1].slope() - 1e-9);
        for (const auto& p : pts) CHECK(c.envelope(p.q) >= p.revenue - 1e-10);
        for (std::size_t h : c.hull())
            CHECK(c.envelope(pts[h].q) == doctest::Approx(pts[h].revenue).epsilon(1e-12));

        // iron_lottery reconstruction identities
        std::uniform_real_distribution<double> uq(0.0, 1.0);
        for (int k = 0; k < 8; ++k) {
            const double q = uq(rng);
            const auto lot = c.iron_lottery(q);
            CHECK(lot.alpha * lot.q1 + (1.0 - lot.alpha) * lot.q2 ==
                  doctest::Approx(q).epsilon(1e-10));
            CHECK(lot.value == doctest::Approx(c.envelope(q)).epsilon(1e-10));
            CHECK(lot.value ==
                  doctest::Approx(lap::testutil::envelope_bruteforce(c, q)).epsilon(1e-8));
        }

        // phi_ironed non-decreasing in value; equal to phi on regular inputs
        const auto t = virtual_values(d);
        for (std::size_t j = 0; j + 1 < t.values.size(); ++j)
            CHECK(t.phi_ironed[j] <= t.phi_ironed[j + 1] + 1e-9);
        if (t.regular) {
            for (std::size_t j = 0; j < t.values.size(); ++j)
                CHECK(t.phi[j] == doctest::Approx(t.phi_ironed[j]).epsilon(1e-9));
        }
        CHECK(t.regular == c.ironed_intervals().empty());
        for (std::size_t j = 0; j < t.values.size(); ++j)
            CHECK(t.phi[j] <= t.values[j] + 1e-9);

        // outside every ironed interval the two virtual values coincide
        for (std::size_t j = 0; j < t.values.size(); ++j) {
            const double q = quantile(d, t.values[j]);
            bool inside = false;
            for (const auto& [a, b] : c.ironed_intervals())
                if (q > a - 1e-12 && q < b + 1e-12) inside = true;
            if (!inside)
                CHECK(t.phi_ironed[j] == doctest::Approx(t.phi[j]).epsilon(1e-9));
        }
    }
}

TEST_CASE("restriction keeps raw virtual values") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto d = lap::testutil::random_distribution(rng);
        const auto t = virtual_values(d);
        std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
        const double cutoff = d.support()[pick(rng)];
        const auto cond = d.conditional_at_least(cutoff);
        const auto tc = virtual_values(cond);
        for (std::size_t j = 0; j < cond.size(); ++j) {
            const double v = cond.support()[j];
            // raw virtual value never decreases under restriction (it is in
            // fact unchanged for surviving values)
            CHECK(tc.phi[j] >= t.phi_at(v) - 1e-9);
            CHECK(tc.phi[j] == doctest::Approx(t.phi_at(v)).epsilon(1e-9));
        }
    }
}
