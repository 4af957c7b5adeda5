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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lap/exante.hpp"
#include "lap/mech.hpp"
#include "lap/scenarios.hpp"
#include "lap/verify.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string instance;
    std::string mech = "la";
    std::string schedule;
    std::string out;
    double eps = 0.01;
    double eps1 = 0.0;
    double eps2 = 0.05;
    double budget = 1.0;
    double dummy_value = 0.0;
    double grid_step = 0.02;
    double rmax = 20.0;
    std::uint64_t seed = 0;
    int corpus_size = 200;
    int jumps = 2;
};

lap::PoolSchedule parse_schedule(const std::string& text) {
    if (text.empty()) return lap::PoolSchedule{};
    const json j = json::parse(text);
    std::vector<std::pair<double, double>> jumps;
    if (j.is_array() && j.size() == 2 && j[0].is_number()) {
        jumps.emplace_back(j[0].get<double>(), j[1].get<double>());
    } else {
        for (const auto& pair : j)
            jumps.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    return lap::PoolSchedule(jumps);
}

json schedule_to_json(const lap::PoolSchedule& sched) {
    json out = json::array();
    for (const auto& [s, t] : sched.jumps()) out.push_back(json::array({s, t}));
    return out;
}

lap::AuctionInstance load_instance(const Options& opt) {
    if (opt.instance == "example1") return lap::build_example1(opt.eps);
    if (opt.instance == "two-point-iid") {
        const lap::DiscreteDistribution d({1.0, 2.0}, {0.5, 0.5});
        return lap::AuctionInstance::independent({d, d});
    }
    if (opt.instance == "correlated") {
        const double eps1 = opt.eps1 > 0.0 ? opt.eps1 : 0.1;
        return lap::build_correlated(eps1, opt.eps2, opt.eps).instance;
    }
    std::ifstream in(opt.instance);
    if (!in) throw std::invalid_argument("cannot open instance file: " + opt.instance);
    json j;
    in >> j;
    const auto& prior = j.at("prior");
    if (prior.contains("independent")) {
        std::vector<lap::DiscreteDistribution> ds;
        for (const auto& lit : prior.at("independent")) {
            std::vector<double> sup, mass;
            for (const auto& pair : lit) {
                sup.push_back(pair.at(0).get<double>());
                mass.push_back(pair.at(1).get<double>());
            }
            ds.emplace_back(sup, mass);
        }
        return lap::AuctionInstance::independent(std::move(ds));
    }
    const auto& table = prior.at("joint");
    std::vector<std::vector<double>> profiles;
    for (const auto& row : table.at("profiles")) profiles.push_back(row.get<std::vector<double>>());
    return lap::AuctionInstance::joint(std::move(profiles),
                                       table.at("mass").get<std::vector<double>>());
}

std::optional<lap::PoolSchedule> file_schedule(const Options& opt) {
    if (opt.instance == "example1" || opt.instance == "two-point-iid" ||
        opt.instance == "correlated")
        return std::nullopt;
    std::ifstream in(opt.instance);
    if (!in) return std::nullopt;
    json j;
    in >> j;
    if (!j.contains("pool_schedule")) return std::nullopt;
    std::vector<std::pair<double, double>> jumps;
    for (const auto& pair : j.at("pool_schedule"))
        jumps.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return lap::PoolSchedule(jumps);
}

lap::Mechanism build_mechanism(const lap::AuctionInstance& inst, const Options& opt) {
    if (opt.mech == "la") return lap::make_la(inst);
    if (opt.mech == "myerson") return lap::make_myerson(inst);
    if (opt.mech == "lap") {
        auto sched = opt.schedule.empty()
                         ? file_schedule(opt).value_or(lap::PoolSchedule{})
                         : parse_schedule(opt.schedule);
        return lap::make_lap(inst, std::move(sched));
    }
    throw std::invalid_argument("unknown mechanism: " + opt.mech);
}

void dump_outcomes_csv(const lap::AuctionInstance& inst, const lap::Mechanism& mech,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out.precision(17);
    const int n = inst.bidders();
    for (int i = 0; i < n; ++i) out << "profile_" << i << ",";
    out << "mass";
    for (int i = 0; i < n; ++i) out << ",alloc_" << i;
    for (int i = 0; i < n; ++i) out << ",pay_" << i;
    out << "\n";
    inst.for_each_profile([&](std::span<const double> v, double mass) {
        const auto o = mech.run(v, v);
        for (double x : v) out << x << ",";
        out << mass;
        for (double a : o.alloc) out << "," << a;
        for (double p : o.pay) out << "," << p;
        out << "\n";
    });
}

int cmd_eval(const Options& opt) {
    const auto inst = load_instance(opt);
    const auto mech = build_mechanism(inst, opt);
    json summary;
    summary["command"] = "eval";
    summary["instance"] = opt.instance;
    summary["mechanism"] = mech.name;
    summary["expected_revenue"] = lap::expected_revenue(inst, mech);
    if (!opt.out.empty()) {
        dump_outcomes_csv(inst, mech, opt.out);
        summary["outcomes_csv"] = opt.out;
    }
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_opt(const Options& opt) {
    const auto inst = load_instance(opt);
    json summary;
    summary["command"] = "opt";
    summary["instance"] = opt.instance;
    summary["opt_dsic_lp"] = lap::optimal_dsic_lp(inst);
    if (inst.is_independent())
        summary["myerson"] = lap::expected_revenue(inst, lap::make_myerson(inst));
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_exante(const Options& opt) {
    const auto inst = load_instance(opt);
    json summary;
    summary["command"] = "exante";
    summary["instance"] = opt.instance;
    if (opt.dummy_value > 0.0) {
        if (inst.bidders() != 2 || !inst.is_independent())
            throw std::invalid_argument("the dummy-bidder comparison needs an independent two-bidder instance");
        const auto res = lap::pooled_pair_mechanism(inst.marginals()[0], inst.marginals()[1],
                                               opt.dummy_value);
        const auto& r = res.report;
        summary["dummy_value"] = opt.dummy_value;
        summary["opt_exante"] = r.benchmark;
        summary["rev1"] = r.rev1;
        summary["rev2"] = r.rev2;
        summary["rev3"] = r.rev3;
        summary["chosen"] = r.chosen;
        summary["chosen_revenue"] = r.chosen_revenue;
        summary["ratio"] = r.ratio;
        summary["bounds"] = json::array({r.bound1, r.bound2, r.bound3});
        summary["pool"] = schedule_to_json(res.schedule);
        if (!opt.out.empty()) {
            dump_outcomes_csv(lap::AuctionInstance::independent(
                                  {inst.marginals()[0], inst.marginals()[1]}),
                              res.mechanism, opt.out);
            summary["outcomes_csv"] = opt.out;
        }
    } else {
        if (!inst.is_independent())
            throw std::invalid_argument("ex-ante program needs independent marginals");
        std::vector<lap::RevenueCurve> curves;
        for (const auto& d : inst.marginals()) curves.push_back(lap::revenue_curve(d));
        const auto sol = lap::solve_exante(curves, opt.budget);
        summary["budget"] = opt.budget;
        summary["value"] = sol.value;
        json bidders = json::array();
        for (const auto& b : sol.bidders) {
            json jb;
            jb["x"] = b.x;
            jb["revenue"] = b.revenue;
            jb["alpha"] = b.prices.alpha;
            jb["price1"] = b.prices.price1;
            jb["price2"] = b.prices.price2;
            bidders.push_back(jb);
        }
        summary["bidders"] = bidders;
    }
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_check_dsic(const Options& opt) {
    const auto inst = load_instance(opt);
    const auto mech = build_mechanism(inst, opt);
    std::vector<double> extra;
    if (!opt.schedule.empty())
        for (const auto& [s, t] : parse_schedule(opt.schedule).jumps()) {
            extra.push_back(s);
            extra.push_back(t);
        }
    const auto rep = lap::check_dsic_ir(inst, mech, extra);
    json summary;
    summary["command"] = "check-dsic";
    summary["instance"] = opt.instance;
    summary["mechanism"] = mech.name;
    summary["passed"] = rep.passed;
    summary["checks"] = rep.checks;
    if (rep.witness) {
        json w;
        w["bidder"] = rep.witness->bidder;
        w["profile"] = rep.witness->profile;
        w["bid"] = rep.witness->bid;
        w["truthful_utility"] = rep.witness->truthful_utility;
        w["deviating_utility"] = rep.witness->deviating_utility;
        w["ir_violation"] = rep.witness->ir_violation;
        summary["witness"] = w;
    }
    std::cout << summary.dump(2) << "\n";
    return rep.passed ? kExitOk : kExitVerificationFailure;
}

int cmd_search_lap(const Options& opt) {
    const auto inst = load_instance(opt);
    const auto family = lap::schedule_family(inst.support_union(), opt.jumps);
    const auto best = lap::search_lap(inst, family);
    json summary;
    summary["command"] = "search-lap";
    summary["instance"] = opt.instance;
    summary["max_jumps"] = opt.jumps;
    summary["family_size"] = best.family_size;
    summary["best_schedule"] = schedule_to_json(best.schedule);
    summary["best_revenue"] = best.revenue;
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int repro_example1(const Options& opt) {
    const auto inst = lap::build_example1(opt.eps);
    const double la = lap::expected_revenue(inst, lap::make_la(inst));
    const auto best =
        lap::search_lap(inst, lap::schedule_family(inst.support_union(), opt.jumps));
    const double lp = lap::optimal_dsic_lp(inst);
    json summary;
    summary["scenario"] = "example1";
    summary["eps"] = opt.eps;
    summary["la"] = la;
    summary["lap"] = best.revenue;
    summary["lap_schedule"] = schedule_to_json(best.schedule);
    summary["opt"] = lp;
    summary["ratio_la"] = la / lp;
    summary["ratio_lap"] = best.revenue / lp;
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int repro_two_point(const Options&) {
    const lap::DiscreteDistribution d({1.0, 2.0}, {0.5, 0.5});
    const auto inst = lap::AuctionInstance::independent({d, d});
    const double la = lap::expected_revenue(inst, lap::make_la(inst));
    const double my = lap::expected_revenue(inst, lap::make_myerson(inst));
    const auto best = lap::search_lap(inst, lap::schedule_family(inst.support_union(), 2));
    const auto pooled = lap::pooled_pair_mechanism(d, d, 1.0);
    json summary;
    summary["scenario"] = "two-point-iid";
    summary["la"] = la;
    summary["myerson"] = my;
    summary["opt"] = lap::optimal_dsic_lp(inst);
    summary["lap"] = best.revenue;
    summary["lap_schedule"] = schedule_to_json(best.schedule);
    summary["opt_exante_with_dummy"] = pooled.report.benchmark;
    summary["pooled_pair_revenue"] = pooled.report.chosen_revenue;
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int repro_grid(const Options& opt) {
    const auto rep = lap::grid_check_47(opt.grid_step, opt.rmax);
    json summary;
    summary["scenario"] = "grid-47";
    summary["grid_step"] = rep.grid_step;
    summary["rmax"] = rep.rmax;
    summary["points"] = rep.points;
    summary["min_ratio"] = rep.min_ratio;
    summary["min_ratio_normalized"] = rep.min_ratio_normalized;
    summary["threshold"] = 4.0 / 7.0;
    summary["argmin"] =
        json{{"r1", rep.r1}, {"r2", rep.r2}, {"x1", rep.x1}, {"x2", rep.x2}};
    summary["passed"] = rep.min_ratio >= 4.0 / 7.0 - 1e-9;
    std::cout << summary.dump(2) << "\n";
    return summary["passed"].get<bool>() ? kExitOk : kExitVerificationFailure;
}

int repro_correlated(const Options& opt) {
    std::vector<lap::CorrelatedPoint> pts;
    if (opt.eps1 > 0.0) {
        const double eps = opt.eps < opt.eps1 ? opt.eps : opt.eps1 / 4.0;
        pts.push_back(lap::run_correlated_point(opt.eps1, opt.eps2, eps, {}, opt.jumps));
    } else {
        pts = lap::run_correlated_ladder(opt.jumps);
    }

    json ladder = json::array();
    bool monotone = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        json row;
        row["eps1"] = p.eps1;
        row["eps2"] = p.eps2;
        row["eps"] = p.eps;
        row["profiles"] = p.profiles;
        row["opt"] = p.opt_exact;
        row["opt_continuum"] = p.opt_continuum;
        row["la"] = p.la;
        row["best_lap"] = p.best_lap;
        row["ratio"] = p.ratio;
        row["decoder_exact"] = p.decoder_ok;
        row["decoder_float64_exact"] = p.decoder_double_ok;
        row["schedule"] = p.schedule;
        ladder.push_back(row);
        if (i > 0 && pts[i].ratio > pts[i - 1].ratio + 1e-12) monotone = false;
    }
    json summary;
    summary["scenario"] = "correlated";
    summary["ladder"] = ladder;
    summary["ratio_non_increasing"] = monotone;
    summary["final_ratio"] = pts.back().ratio;

    if (!opt.out.empty()) {
        std::ofstream csv(opt.out);
        if (!csv) throw std::invalid_argument("cannot write " + opt.out);
        csv.precision(17);
        csv << "eps1,eps2,eps,opt,best_lap,la,ratio,decoder_exact,schedule\n";
        for (const auto& p : pts)
            csv << p.eps1 << "," << p.eps2 << "," << p.eps << "," << p.opt_exact << ","
                << p.best_lap << "," << p.la << "," << p.ratio << "," << p.decoder_ok << ",\""
                << p.schedule << "\"\n";
        std::ofstream dat(opt.out + ".ratio.dat");
        dat.precision(17);
        for (const auto& p : pts) dat << p.eps1 << " " << p.ratio << "\n";
        summary["csv"] = opt.out;
        summary["ratio_curve"] = opt.out + ".ratio.dat";
    }
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int repro_corpus(const Options& opt) {
    double min_ratio = std::numeric_limits<double>::infinity();
    std::uint64_t argmin = 0;
    bool dsic_all = true;
    std::ofstream csv;
    if (!opt.out.empty()) {
        csv.open(opt.out);
        if (!csv) throw std::invalid_argument("cannot write " + opt.out);
        csv.precision(17);
        csv << "seed,lp,la,myerson,best_lap,ratio_lap,dsic_la,dsic_myerson,dsic_best_lap\n";
    }
    for (int k = 0; k < opt.corpus_size; ++k) {
        const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(k);
        const auto inst = lap::gen_corpus_instance(seed);
        auto cache = lap::make_pricing_cache();
        const double lp = lap::optimal_dsic_lp(inst);
        const double la = lap::expected_revenue(inst, lap::make_la(inst, cache));
        const double my = lap::expected_revenue(inst, lap::make_myerson(inst));
        const auto fam = lap::schedule_family(inst.support_union(), opt.jumps);
        lap::SearchResult best;
        best.revenue = -std::numeric_limits<double>::infinity();
        for (const auto& s : fam) {
            const double rev = lap::expected_revenue(inst, lap::make_lap(inst, s, cache));
            if (rev > best.revenue + 1e-12) {
                best.revenue = rev;
                best.schedule = s;
            }
        }
        const double ratio = best.revenue / lp;
        if (ratio < min_ratio) {
            min_ratio = ratio;
            argmin = seed;
        }
        std::vector<double> extra;
        for (const auto& [s, t] : best.schedule.jumps()) {
            extra.push_back(s);
            extra.push_back(t);
        }
        const bool d1 = lap::check_dsic_ir(inst, lap::make_la(inst, cache)).passed;
        const bool d2 = lap::check_dsic_ir(inst, lap::make_myerson(inst)).passed;
        const bool d3 =
            lap::check_dsic_ir(inst, lap::make_lap(inst, best.schedule, cache), extra).passed;
        dsic_all = dsic_all && d1 && d2 && d3;
        if (csv.is_open())
            csv << seed << "," << lp << "," << la << "," << my << "," << best.revenue << ","
                << ratio << "," << d1 << "," << d2 << "," << d3 << "\n";
    }
    json summary;
    summary["scenario"] = "corpus";
    summary["seed"] = opt.seed;
    summary["corpus_size"] = opt.corpus_size;
    summary["max_jumps"] = opt.jumps;
    summary["min_ratio"] = min_ratio;
    summary["min_ratio_seed"] = argmin;
    summary["threshold"] = 4.0 / 7.0;
    summary["dsic_all_passed"] = dsic_all;
    if (!opt.out.empty()) summary["csv"] = opt.out;
    std::cout << summary.dump(2) << "\n";
    const bool ok = dsic_all && min_ratio >= 4.0 / 7.0 - 1e-9;
    return ok ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lookahead auctions with pooling: exact simulation and verification"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--eps", opt.eps, "eps parameter");
        sub->add_option("--eps1", opt.eps1, "eps1 parameter");
        sub->add_option("--eps2", opt.eps2, "eps2 parameter");
        sub->add_option("--seed", opt.seed, "base random seed");
        sub->add_option("--out", opt.out, "CSV artifact path");
        sub->add_option("--jumps", opt.jumps, "max jumps in searched schedules");
    };

    auto* eval = app.add_subcommand("eval", "expected revenue of a mechanism");
    eval->add_option("--instance", opt.instance, "instance file or builtin")->required();
    eval->add_option("--mech", opt.mech, "la | lap | myerson");
    eval->add_option("--schedule", opt.schedule, "pool schedule, e.g. [[1,100]]");
    add_common(eval);

    auto* optc = app.add_subcommand("opt", "optimal-revenue benchmarks");
    optc->add_option("--instance", opt.instance)->required();
    add_common(optc);

    auto* ex = app.add_subcommand("exante", "ex-ante relaxation / dummy-bidder pooling");
    ex->add_option("--instance", opt.instance)->required();
    ex->add_option("--budget", opt.budget, "probability budget");
    ex->add_option("--dummy-value", opt.dummy_value,
                   "dummy bidder value; runs the three-mechanism comparison");
    add_common(ex);

    auto* chk = app.add_subcommand("check-dsic", "exhaustive deviation check");
    chk->add_option("--instance", opt.instance)->required();
    chk->add_option("--mech", opt.mech);
    chk->add_option("--schedule", opt.schedule);
    add_common(chk);

    auto* srch = app.add_subcommand("search-lap", "best pool schedule over support endpoints");
    srch->add_option("--instance", opt.instance)->required();
    add_common(srch);

    auto* rep = app.add_subcommand("repro", "scripted scenario reproductions");
    rep->add_option("scenario", opt.instance,
                    "example1 | two-point-iid | grid-47 | correlated | corpus")
        ->required();
    rep->add_option("--grid-step", opt.grid_step, "grid spacing");
    rep->add_option("--rmax", opt.rmax, "grid upper bound for r1, r2");
    rep->add_option("--corpus-size", opt.corpus_size, "number of seeded instances");
    add_common(rep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (eval->parsed()) return cmd_eval(opt);
        if (optc->parsed()) return cmd_opt(opt);
        if (ex->parsed()) return cmd_exante(opt);
        if (chk->parsed()) return cmd_check_dsic(opt);
        if (srch->parsed()) return cmd_search_lap(opt);
        if (rep->parsed()) {
            if (opt.instance == "example1") return repro_example1(opt);
            if (opt.instance == "two-point-iid") return repro_two_point(opt);
            if (opt.instance == "grid-47") return repro_grid(opt);
            if (opt.instance == "correlated") return repro_correlated(opt);
            if (opt.instance == "corpus") return repro_corpus(opt);
            throw std::invalid_argument("unknown scenario: " + opt.instance);
        }
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cerr << err.dump(2) << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
