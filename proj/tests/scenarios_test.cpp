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
#include <set>

#include "doctest.h"
#include "lap/scenarios.hpp"
#include "lap/verify.hpp"

using namespace lap;

TEST_CASE("build_example1") {
    const auto ex = build_example1(0.01);
    const auto& b2 = ex.marginals()[1];
    REQUIRE(b2.size() == 2);
    CHECK(b2.support()[0] == doctest::Approx(1.01));
    CHECK(b2.support()[1] == doctest::Approx(100.0));
    CHECK(b2.mass()[0] == doctest::Approx(0.99));
    CHECK(b2.mass()[1] == doctest::Approx(0.01));

    const auto half = build_example1(0.5);
    CHECK(half.marginals()[1].support()[0] == doctest::Approx(1.5));
    CHECK(half.marginals()[1].support()[1] == doctest::Approx(2.0));

    CHECK_THROWS_AS(build_example1(0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_example1(1.0), std::invalid_argument);

    // full pipeline: the optimal single-jump pool earns 1.5 - eps/2
    const auto best = search_lap(ex, schedule_family(ex.support_union(), 1));
    CHECK(best.revenue == doctest::Approx(1.495).epsilon(1e-12));
}

TEST_CASE("build_example1: revenue formulas hold at other eps") {
    // pooling the whole gap beats plain lookahead iff 1.5 - eps/2 > 1 + eps,
    // i.e. eps < 1/3
    for (double eps : {0.05, 0.1, 0.2, 0.3}) {
        const auto ex = build_example1(eps);
        CHECK(expected_revenue(ex, make_la(ex)) ==
              doctest::Approx(1.0 + eps).epsilon(1e-12));
        const auto best = search_lap(ex, schedule_family(ex.support_union(), 1));
        CHECK(best.revenue == doctest::Approx(1.5 - eps / 2.0).epsilon(1e-12));
        REQUIRE(best.schedule.jumps().size() == 1);
        CHECK(best.schedule.jumps()[0].second == doctest::Approx(1.0 / eps));
    }
    const auto wide = build_example1(0.4);
    const auto best = search_lap(wide, schedule_family(wide.support_union(), 1));
    CHECK(best.schedule.empty());
    CHECK(best.revenue == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("build_correlated: small instance structure and decoding") {
    const auto c = build_correlated(0.1, 0.25, 0.01);
    REQUIRE(c.v1_support.size() == 10);
    CHECK(c.v1_support.front() == doctest::Approx(1.0));
    CHECK(c.v1_support.back() == doctest::Approx(10.0));
    REQUIRE(c.xi2_support.size() == 4);
    CHECK(c.xi2_support.back() == doctest::Approx(4.0));

    // equal-revenue property of the v1 marginal: p * Pr[v1 >= p] = 1
    double suffix = 0.0;
    for (std::size_t j = c.v1_support.size(); j-- > 0;) {
        suffix += c.v1_mass[j];
        CHECK(c.v1_support[j] * suffix == doctest::Approx(1.0).epsilon(1e-9));
    }

    // decoder round-trips on every profile, in exact units and from doubles
    CHECK(c.double_decode_exact);
    for (const auto& row : c.rows) {
        CHECK(c.decode_units(row.v2_units) == row.a);
        CHECK(c.decode_value(row.v2) == doctest::Approx(row.v1).epsilon(1e-12));
    }

    // v2 really is v1 * (xi2 + eps^3) in exact units
    for (const auto& row : c.rows) {
        const __int128 n = c.grid;
        const __int128 expect = static_cast<__int128>(row.a) * row.b * n * n + row.a;
        CHECK(static_cast<std::int64_t>(expect) == row.v2_units);
    }

    CHECK_THROWS_AS(build_correlated(0.25, 0.25, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(build_correlated(0.1, 0.25, 0.2), std::invalid_argument);
}

TEST_CASE("build_correlated: geometric grid beyond the unit cap") {
    const auto c = build_correlated(0.005, 0.05, 0.004);
    CHECK(c.v1_support.size() < 30);
    CHECK(c.v1_support.front() == doctest::Approx(1.0));
    CHECK(c.v1_support.back() == doctest::Approx(200.0));
    for (const auto& row : c.rows) CHECK(c.decode_units(row.v2_units) == row.a);
    double suffix = 0.0;
    for (std::size_t j = c.v1_support.size(); j-- > 0;) {
        suffix += c.v1_mass[j];
        CHECK(c.v1_support[j] * suffix == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("closed-form pooled-interval revenue") {
    const double e = std::exp(1.0);
    CHECK(lap_interval_revenue_closed_form(1.0, e) ==
          doctest::Approx(1.0 - 1.0 / e + (e - 1.0) / (2.0 * e)));
    CHECK(lap_interval_revenue_closed_form(1.0, e) <= lap_interval_revenue_bound(1.0, e));
    CHECK(lap_interval_revenue_bound(1.0, e) == doctest::Approx(1.0));

    CHECK(lap_interval_revenue_closed_form(1.0, 2.0) ==
          doctest::Approx(0.5 + 0.25 * std::log(2.0)));
    CHECK(lap_interval_revenue_closed_form(1.0, 2.0) <= std::log(2.0));

    CHECK(lap_interval_revenue_closed_form(5.0, 5.0 + 1e-6) < 1e-5);

    CHECK_THROWS_AS(lap_interval_revenue_closed_form(2.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(lap_interval_revenue_closed_form(3.0, 2.0), std::invalid_argument);
}

TEST_CASE("closed form never exceeds the log bound") {
    for (double t = 1.5; t < 40.0; t *= 1.7)
        for (double s = 1.0; s < t - 1e-9; s += (t - 1.0) / 7.0)
            CHECK(lap_interval_revenue_closed_form(s, t) <=
                  lap_interval_revenue_bound(s, t) + 1e-12);
}

TEST_CASE("discrete pooled-interval revenue converges to the closed form") {
    for (auto [s, t] : {std::pair{1.0, std::exp(1.0)}, {1.0, 2.0}, {2.0, 9.0}}) {
        const double exact = lap_interval_revenue_closed_form(s, t);
        const double coarse = lap_interval_revenue_discrete(s, t, 40);
        const double fine = lap_interval_revenue_discrete(s, t, 1000);
        CHECK(std::abs(fine - exact) / exact < 0.02);
        CHECK(std::abs(fine - exact) < std::abs(coarse - exact) + 1e-12);
    }
}

TEST_CASE("correlated benchmark: per-slice factor is 2 - eps2 exactly") {
    const auto c = build_correlated(0.1, 0.25, 0.01);
    const double opt = correlated_opt_benchmark(c);
    double ev1 = 0.0;
    for (std::size_t j = 0; j < c.v1_support.size(); ++j)
        ev1 += c.v1_support[j] * c.v1_mass[j];
    CHECK(opt == doctest::Approx((2.0 - 0.25) * ev1).epsilon(1e-9));
}

TEST_CASE("gen_random_instance: deterministic and valid") {
    const auto a = gen_random_instance(7, 3, 4, 0.1, 5.0);
    const auto b = gen_random_instance(7, 3, 4, 0.1, 5.0);
    REQUIRE(a.bidders() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(a.marginals()[static_cast<std::size_t>(i)].support() ==
              b.marginals()[static_cast<std::size_t>(i)].support());
        CHECK(a.marginals()[static_cast<std::size_t>(i)].mass() ==
              b.marginals()[static_cast<std::size_t>(i)].mass());
    }
    CHECK_THROWS_AS(gen_random_instance(1, 5, 4, 0.1, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(gen_random_instance(1, 2, 9, 0.1, 5.0), std::invalid_argument);

    std::set<int> seen_n, seen_s;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = gen_corpus_instance(seed);
        seen_n.insert(inst.bidders());
        for (int i = 0; i < inst.bidders(); ++i)
            seen_s.insert(static_cast<int>(inst.bidder_support(i).size()));
        CHECK(inst.bidders() <= 3);
        for (int i = 0; i < inst.bidders(); ++i)
            CHECK(inst.bidder_support(i).size() <= 5);
    }
    CHECK(seen_n.size() == 2);
    CHECK(seen_s.size() >= 3);
}

TEST_CASE("gen_random_irregular really irons") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto d = gen_random_irregular(seed);
        CHECK_FALSE(virtual_values(d).regular);
        CHECK_FALSE(revenue_curve(d).ironed_intervals().empty());
    }
}

TEST_CASE("correlated schedule search agrees with exhaustive enumeration") {
    const auto c = build_correlated(0.1, 0.25, 0.01);
    const auto fast = search_lap_correlated(c, 2);
    const auto slow = search_lap(c.instance, schedule_family(c.v1_support, 2));
    CHECK(fast.revenue == doctest::Approx(slow.revenue).epsilon(1e-9));
    CHECK(fast.la_revenue ==
          doctest::Approx(expected_revenue(c.instance, make_la(c.instance))).epsilon(1e-9));
}

TEST_CASE("correlated ladder point: first rung sanity") {
    const auto pt = run_correlated_point(0.1, 0.05, 0.01);
    CHECK(pt.decoder_ok);
    CHECK(pt.decoder_double_ok);
    CHECK(pt.ratio > 0.5);
    CHECK(pt.ratio < 0.65);
    CHECK(pt.best_lap >= pt.la - 1e-12);
    CHECK(pt.opt_exact > pt.best_lap);
}
