// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "contrarian/cli.hpp"
#include "contrarian/contrarian.hpp"
#include "support/brute_force.hpp"
#include "support/test_support.hpp"

using namespace contrarian;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] AC%d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

SynthConfig defaults(double phi, std::uint64_t seed) {
    SynthConfig cfg; // 200 stocks x 240 months, sigma_idio 0.08, sigma_mkt 0.05, mu 0.005
    cfg.phi = phi;
    cfg.seed = seed;
    return cfg;
}

// 1. C = L - W for every cohort, and the same additive structure in the
// published decile table at its 3-decimal rounding.
Outcome additive_identity() {
    double worst = 0.0;
    std::size_t cohorts = 0;
    const std::vector<int> horizons{1, 6, 12, 24};
    const std::vector<int> groups{3, 5, 10};
    for (double phi : {-0.3, 0.0, 0.3}) {
        SynthConfig cfg = defaults(phi, 101);
        cfg.n_stocks = 120;
        cfg.n_months = 96;
        auto panel = inject_missing(generate(cfg), 0.05, 7);
        for (int skip : {0, 1})
            for (const auto& run : run_strategies(panel, horizons, horizons, skip, groups))
                for (const auto& c : run.cohorts) {
                    worst = std::max(worst, std::abs(c.contrarian - (c.loser - c.winner)));
                    ++cohorts;
                }
    }
    // Decile SHSE, J = K = 48 and J = K = 42: LOS, WIN, CON as printed.
    const double rounding = 3 * 0.0005;
    const double gap48 = std::abs(0.361 - 0.146 - 0.215);
    const double gap42 = std::abs(0.350 - 0.152 - 0.197);
    const bool ok = worst <= 1e-12 && gap48 <= rounding + 1e-12 && gap42 <= rounding + 1e-12;
    return {ok, fmt("max |C-(L-W)| = %.3g over %.0f cohorts; table gaps %.4f, %.4f (bound 0.0015)", worst,
                    static_cast<double>(cohorts), gap48, gap42)};
}

// 2. Engine vs. straight-line reference on random small panels.
Outcome oracle_equivalence() {
    std::mt19937_64 rng(8675309);
    double worst = 0.0;
    std::size_t compared = 0;
    std::size_t mismatched_shape = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int stocks = 2 + static_cast<int>(rng() % 7);
        const int months = 2 + static_cast<int>(rng() % 35);
        auto x = test_support::random_matrix(rng, stocks, months, trial % 4 == 0 ? 0.0 : 0.15, trial % 5 == 0);
        auto panel = test_support::to_panel(x);
        for (int J : {1, 2, 3, 6})
            for (int K : {1, 2, 3, 6})
                for (int skip : {0, 1})
                    for (int G : {2, 3}) {
                        const StrategySpec spec{J, K, skip, G};
                        const auto ref = oracle::run(x, J, K, skip, G);
                        if (!formation_range(panel, spec)) {
                            if (!ref.cohorts.empty() || ref.skipped != 0) ++mismatched_shape;
                            continue;
                        }
                        const auto got = run_strategy(panel, spec);
                        if (got.cohorts.size() != ref.cohorts.size() ||
                            got.skipped != static_cast<std::size_t>(ref.skipped)) {
                            ++mismatched_shape;
                            continue;
                        }
                        for (std::size_t i = 0; i < got.cohorts.size(); ++i) {
                            if (got.cohorts[i].formation != panel.first_month() + ref.cohorts[i].t) ++mismatched_shape;
                            worst = std::max({worst, std::abs(got.cohorts[i].loser - ref.cohorts[i].loser),
                                              std::abs(got.cohorts[i].winner - ref.cohorts[i].winner),
                                              std::abs(got.cohorts[i].contrarian - ref.cohorts[i].contrarian)});
                            ++compared;
                        }
                    }
    }
    return {mismatched_shape == 0 && worst <= 1e-12 && compared > 0,
            fmt("%.0f cohorts compared, max abs diff %.3g, %.0f shape mismatches", static_cast<double>(compared), worst,
                static_cast<double>(mismatched_shape))};
}

// 3. Newey-West against hand-expanded formulas and frozen high-precision values.
Outcome newey_west() {
    double worst = 0.0;
    auto track = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };

    // Five elements, q = 2, written out term by term.
    const std::vector<double> x5{0.1, 0.3, 0.2, 0.4, 0.0};
    const double m5 = (0.1 + 0.3 + 0.2 + 0.4 + 0.0) / 5;
    const double d[5] = {x5[0] - m5, x5[1] - m5, x5[2] - m5, x5[3] - m5, x5[4] - m5};
    const double g0 = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3] + d[4] * d[4]) / 5;
    const double g1 = (d[0] * d[1] + d[1] * d[2] + d[2] * d[3] + d[3] * d[4]) / 5;
    const double g2 = (d[0] * d[2] + d[1] * d[3] + d[2] * d[4]) / 5;
    const double hand_q2 = g0 + 2 * (2.0 / 3.0) * g1 + 2 * (1.0 / 3.0) * g2;
    track(nw_variance(x5, 2), hand_q2);
    track(nw_variance(x5, 1), g0 + 2 * 0.5 * g1);
    track(nw_tstat(x5, 2), m5 / std::sqrt(hand_q2 / 5));

    // Frozen 40-digit evaluations of the same formulas.
    track(nw_variance(x5, 1), 0.01);
    track(nw_tstat(x5, 1), 4.4721359549995793928);
    track(nw_variance(x5, 2), 0.0093333333333333333333);
    track(nw_tstat(x5, 2), 4.6291004988627573078);
    track(nw_variance(x5, 4), 0.004);
    track(nw_tstat(x5, 4), 7.071067811865475244);

    const std::vector<double> x12{0.12, -0.05, 0.33, 0.08, -0.21, 0.15, 0.02, 0.27, -0.11, 0.06, 0.19, -0.03};
    const struct {
        std::size_t q;
        double var;
        double t;
    } frozen[] = {
        {0, 0.022397222222222222222, 1.581707412288240009},
        {1, 0.012301157407407407407, 2.1342743325258385115},
        {3, 0.0046953703703703703704, 3.4545246966132612361},
        {5, 0.0044260030864197530864, 3.5580936376378846748},
        {11, 0.0018287808641975308642, 5.5353156949757253456},
    };
    for (const auto& f : frozen) {
        track(nw_variance(x12, f.q), f.var);
        track(nw_tstat(x12, f.q), f.t);
    }

    // q = 0 is the population variance, bit for bit.
    bool exact = true;
    for (const auto* xs : {&x5, &x12}) {
        double m = 0;
        for (double v : *xs) m += v;
        m /= static_cast<double>(xs->size());
        double pop = 0;
        for (double v : *xs) pop += (v - m) * (v - m);
        pop /= static_cast<double>(xs->size());
        exact = exact && nw_variance(*xs, 0) == pop;
    }
    return {worst <= 1e-10 && exact, fmt("max abs error %.3g; q=0 population variance exact: ", worst) +
                                         (exact ? "yes" : "no")};
}

// 4. Null world: insignificant contrarian profit at the 5% level.
Outcome null_calibration() {
    const int seeds = 200;
    int insignificant = 0;
    std::vector<double> rets;
    for (int seed = 1; seed <= seeds; ++seed) {
        auto panel = generate(defaults(0.0, static_cast<std::uint64_t>(seed)));
        auto s = summarize(run_strategy(panel, StrategySpec{1, 1, 0, 10}), Leg::contrarian);
        if (std::abs(s.tstat) < 1.96) ++insignificant;
        rets.push_back(s.ret);
    }
    const double m = mean(rets);
    double var = 0;
    for (double r : rets) var += (r - m) * (r - m);
    const double se = std::sqrt(var / (seeds - 1) / seeds);
    const double frac = static_cast<double>(insignificant) / seeds;
    return {frac >= 0.90 && std::abs(m) <= 3 * se,
            fmt("|t|<1.96 in %.1f%% of seeds (need >= 90%%); mean ret %.5f, 3 SE = %.5f", 100 * frac, m, 3 * se)};
}

// 5. Reversal world reads as contrarian profit, momentum world as loss.
Outcome reversal_detection() {
    const int seeds = 50;
    int positive = 0;
    int negative = 0;
    for (int seed = 1; seed <= seeds; ++seed) {
        const StrategySpec spec{1, 1, 0, 10};
        auto rev = summarize(run_strategy(generate(defaults(-0.3, static_cast<std::uint64_t>(seed))), spec), Leg::contrarian);
        auto mom = summarize(run_strategy(generate(defaults(0.3, static_cast<std::uint64_t>(seed))), spec), Leg::contrarian);
        if (rev.ret > 0) ++positive;
        if (mom.ret < 0) ++negative;
    }
    const double fp = 100.0 * positive / seeds;
    const double fn = 100.0 * negative / seeds;
    return {fp >= 95 && fn >= 95, fmt("phi=-0.3: ret>0 in %.0f%%; phi=+0.3: ret<0 in %.0f%% (need >= 95%% each)", fp, fn)};
}

// Shared by 6 and 7: 20 reversal seeds, 17 x 17 decile sweep plus the
// tertile run at J = K = 48.
struct ReversalSweeps {
    std::vector<int> horizons;
    std::vector<std::vector<SweepCell>> decile; // per seed, ordered (J, K)
    std::vector<DiffResult> diff_10_3;          // per seed, contrarian leg at J = K = 48
    std::vector<bool> diff_ok;
};

const ReversalSweeps& reversal_sweeps() {
    static const ReversalSweeps data = [] {
        ReversalSweeps d;
        d.horizons = parse_int_list("1,3..48:3");
        for (int seed = 1; seed <= 20; ++seed) {
            auto panel = generate(defaults(-0.3, static_cast<std::uint64_t>(seed)));
            d.decile.push_back(sweep(panel, d.horizons, d.horizons, 0, 10));
            const auto& g10 = d.decile.back().back().run; // J = K = 48
            auto g3 = run_strategy(panel, StrategySpec{48, 48, 0, 3});
            try {
                d.diff_10_3.push_back(diff_test(g10, g3, Leg::contrarian));
                d.diff_ok.push_back(true);
            } catch (const Error&) {
                d.diff_10_3.push_back({});
                d.diff_ok.push_back(false);
            }
        }
        return d;
    }();
    return data;
}

// 6. Contrarian ret nondecreasing in J over J = 12..48 at every fixed K.
Outcome increases_with_J() {
    const auto& d = reversal_sweeps();
    const std::size_t n = d.horizons.size();
    int seeds_ok = 0;
    std::size_t pairs = 0;
    std::size_t rising = 0;
    for (const auto& grid : d.decile) {
        bool seed_ok = true;
        for (std::size_t ki = 0; ki < n; ++ki) {
            double prev = -INFINITY;
            for (std::size_t ji = 0; ji < n; ++ji) {
                if (d.horizons[ji] < 12) continue;
                const auto& leg = grid[ji * n + ki].leg(Leg::contrarian);
                if (leg.status == CellStatus::empty) continue;
                const double ret = leg.summary.ret;
                if (prev != -INFINITY) {
                    ++pairs;
                    if (ret >= prev) ++rising;
                    else seed_ok = false;
                }
                prev = ret;
            }
        }
        if (seed_ok) ++seeds_ok;
    }
    const double frac = 100.0 * seeds_ok / static_cast<double>(d.decile.size());
    return {frac >= 90, fmt("monotone in J at every K in %.0f%% of seeds (need >= 90%%); %.1f%% of adjacent J steps rise",
                            frac, 100.0 * static_cast<double>(rising) / static_cast<double>(pairs))};
}

// 7. Decile beats tertile at J = K = 48.
Outcome grouping_extremity() {
    const auto& d = reversal_sweeps();
    int positive = 0;
    double sum = 0;
    for (std::size_t i = 0; i < d.diff_10_3.size(); ++i) {
        if (d.diff_ok[i] && d.diff_10_3[i].delta > 0) ++positive;
        sum += d.diff_10_3[i].delta;
    }
    const double frac = 100.0 * positive / static_cast<double>(d.diff_10_3.size());
    return {frac >= 90, fmt("10-3 contrarian delta > 0 in %.0f%% of seeds (need >= 90%%); mean delta %.5f", frac,
                            sum / static_cast<double>(d.diff_10_3.size()))};
}

// 8. A spike at the formation month only affects ranks without the skip.
Outcome skip_semantics() {
    // Five stocks; ranks over months t-2..t-1 favour S0 > S1 > ... while S4
    // jumps by 90% exactly at t.
    std::vector<std::vector<double>> rows{
        {0.04, 0.04, 0.00, 0.01, 0.01},
        {0.03, 0.03, 0.00, 0.01, 0.01},
        {0.02, 0.02, 0.00, 0.01, 0.01},
        {0.01, 0.01, 0.00, 0.01, 0.01},
        {0.00, 0.00, 0.90, 0.01, 0.01},
    };
    auto panel = test_support::dense_panel(rows);
    const MonthIndex t = panel.first_month() + 2;
    auto order = [&](int J, int skip) {
        std::vector<std::pair<StockIndex, double>> scores;
        for (StockIndex s : eligible_stocks(panel, t, J, skip)) scores.emplace_back(s, estimation_return(panel, s, t, J, skip));
        return rank_and_group<StockIndex>(scores, 5).sorted;
    };
    const auto base_skip0 = order(2, 0);
    const auto base_skip1 = order(2, 1);

    // Same panel without the spike.
    rows[4][2] = 0.0;
    auto calm = test_support::dense_panel(rows);
    auto calm_order = [&](int J, int skip) {
        std::vector<std::pair<StockIndex, double>> scores;
        for (StockIndex s : eligible_stocks(calm, t, J, skip)) scores.emplace_back(s, estimation_return(calm, s, t, J, skip));
        return rank_and_group<StockIndex>(scores, 5).sorted;
    };
    const bool changes_without_skip = base_skip0 != calm_order(2, 0);
    const bool unchanged_with_skip = base_skip1 == calm_order(2, 1);
    auto c0 = form_cohort(panel, t, StrategySpec{2, 1, 0, 5});
    auto c1 = form_cohort(panel, t, StrategySpec{2, 1, 1, 5});
    const bool cohorts = c0 && c1 && c0->winners == std::vector<StockIndex>{4} && c1->winners == std::vector<StockIndex>{0};
    return {changes_without_skip && unchanged_with_skip && cohorts,
            std::string("spike reorders ranks with skip=0: ") + (changes_without_skip ? "yes" : "no") +
                "; ranks unchanged with skip=1: " + (unchanged_with_skip ? "yes" : "no") +
                "; winners {S4} vs {S0}: " + (cohorts ? "yes" : "no")};
}

// 9. Byte-identical output across worker counts; full table on a large panel
// in under a minute on one thread.
Outcome determinism_and_performance() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "contrarian_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    SynthConfig big = defaults(-0.3, 2024);
    big.n_stocks = 2000;
    big.n_months = 192;
    cli::SynthCommand synth;
    synth.synth = big;
    synth.out_path = (dir / "big.csv").string();
    std::ostringstream sink;
    if (cli::cmd_synth(synth, sink, sink) != 0) return {false, "synth failed"};

    cli::RunConfig cfg;
    cfg.inputs = {synth.out_path};
    cfg.J_set = {1, 6, 12, 18, 24, 30, 36, 42, 48};
    cfg.K_set = cfg.J_set;
    cfg.G_set = {3, 5, 10};
    cfg.workers = 1;
    cfg.out_dir = (dir / "serial").string();
    const auto t0 = std::chrono::steady_clock::now();
    if (cli::cmd_run(cfg, sink) != 0) return {false, "serial run failed: " + sink.str()};
    const double serial_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    cfg.workers = 4;
    cfg.out_dir = (dir / "parallel").string();
    if (cli::cmd_run(cfg, sink) != 0) return {false, "parallel run failed: " + sink.str()};
    cfg.workers = 1;
    cfg.out_dir = (dir / "serial2").string();
    if (cli::cmd_run(cfg, sink) != 0) return {false, "second serial run failed"};

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    bool identical = true;
    for (const char* f : {"summary.csv", "cohorts.csv"}) {
        const auto a = slurp(dir / "serial" / f);
        identical = identical && !a.empty() && a == slurp(dir / "parallel" / f) && a == slurp(dir / "serial2" / f);
    }
    fs::remove_all(dir);
    return {identical && serial_secs < 60.0,
            fmt("243 cells on 2000 x 192 single-threaded in %.1fs (limit 60s); outputs identical across runs/workers: ",
                serial_secs) +
                (identical ? "yes" : "no")};
}

} // namespace

int main() {
    report(1, "additive identity", additive_identity);
    report(2, "brute-force oracle equivalence", oracle_equivalence);
    report(3, "Newey-West correctness", newey_west);
    report(4, "null calibration", null_calibration);
    report(5, "reversal / momentum detection", reversal_detection);
    report(6, "contrarian ret increases with J", increases_with_J);
    report(7, "decile beats tertile at J=K=48", grouping_extremity);
    report(8, "skip-month semantics", skip_semantics);
    report(9, "determinism and performance", determinism_and_performance);
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
