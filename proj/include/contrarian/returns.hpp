#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "contrarian/error.hpp"
#include "contrarian/panel.hpp"
#include "contrarian/strategy.hpp"

namespace contrarian {

/// prod(1 + r_i) - 1.
inline double cumulative(std::span<const double> returns) {
    if (returns.empty()) throw Error(ErrorKind::invalid_argument, "cumulative of an empty list");
    double growth = 1.0;
    for (double r : returns) {
        if (!(r > -1.0)) throw Error(ErrorKind::invalid_argument, "return must be > -1");
        growth *= 1.0 + r;
    }
    return growth - 1.0;
}

/// Geometric rescaling of a K-month cumulative return to a 12-month basis.
inline double annualize(double cumulative_return, int K) {
    if (!(cumulative_return > -1.0)) throw Error(ErrorKind::invalid_argument, "cumulative return must be > -1");
    if (K < 1) throw Error(ErrorKind::invalid_argument, "K must be >= 1");
    if (K == 12) return cumulative_return;
    return std::pow(1.0 + cumulative_return, 12.0 / static_cast<double>(K)) - 1.0;
}

struct CohortResult {
    MonthIndex formation;
    double loser = 0.0;      // annualized loser-leg return
    double winner = 0.0;     // annualized winner-leg return
    double contrarian = 0.0; // loser - winner

    double leg(Leg which) const {
        switch (which) {
        case Leg::loser: return loser;
        case Leg::winner: return winner;
        case Leg::contrarian: return contrarian;
        }
        return 0.0;
    }

    bool operator==(const CohortResult&) const = default;
};

struct StrategyRun {
    StrategySpec spec;
    std::vector<CohortResult> cohorts; // ascending formation month
    std::size_t skipped = 0;           // formation months with fewer than G eligible stocks

    std::vector<double> leg_series(Leg which) const {
        std::vector<double> out;
        out.reserve(cohorts.size());
        for (const auto& c : cohorts) out.push_back(c.leg(which));
        return out;
    }

    bool operator==(const StrategyRun&) const = default;
};

inline CohortResult cohort_result(const ReturnPanel& panel, const Cohort& cohort, int K) {
    CohortResult r;
    r.formation = cohort.formation;
    r.loser = annualize(cumulative(holding_leg_returns(panel, cohort.losers, cohort.formation, K)), K);
    r.winner = annualize(cumulative(holding_leg_returns(panel, cohort.winners, cohort.formation, K)), K);
    r.contrarian = r.loser - r.winner;
    return r;
}

/// Annualized leg returns for the cohort formed at t, or nullopt when the
/// formation month is skipped for lack of stocks.
inline std::optional<CohortResult> cohort_result(const ReturnPanel& panel, MonthIndex t, const StrategySpec& spec) {
    auto cohort = form_cohort(panel, t, spec);
    if (!cohort) return std::nullopt;
    return cohort_result(panel, *cohort, spec.K);
}

/// Range of formation months with J+skip months of history and K months of
/// future inside the panel; nullopt when there are none.
inline std::optional<std::pair<MonthIndex, MonthIndex>> formation_range(const ReturnPanel& panel,
                                                                        const StrategySpec& spec) {
    MonthIndex first = panel.first_month() + (spec.J + spec.skip - 1);
    MonthIndex last = panel.last_month() - spec.K;
    if (first > last) return std::nullopt;
    return std::make_pair(first, last);
}

namespace detail {

// Runs `task(i)` for i in [0, n) on up to `workers` threads. Each task writes
// only its own output slot, so results do not depend on scheduling.
template <class Task>
void parallel_for(std::size_t n, unsigned workers, Task&& task) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const auto count = std::min<std::size_t>(workers, n);
    for (std::size_t w = 0; w < count; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace detail

/// Every (G, J, K) combination in that nesting order. Cohorts are formed once
/// per (J, G) and reused across holding horizons; formation months and cells
/// may be spread over `workers` threads without changing the result.
inline std::vector<StrategyRun> run_strategies(const ReturnPanel& panel, std::span<const int> J_set,
                                               std::span<const int> K_set, int skip, std::span<const int> G_set,
                                               unsigned workers = 1) {
    if (J_set.empty() || K_set.empty() || G_set.empty())
        throw Error(ErrorKind::invalid_argument, "J, K and G sets must be nonempty");
    for (int G : G_set)
        for (int J : J_set)
            for (int K : K_set) StrategySpec{J, K, skip, G}.validate();

    std::vector<StrategyRun> runs(G_set.size() * J_set.size() * K_set.size());

    struct FormationTask {
        int G;
        int J;
        std::size_t g_index;
        std::size_t j_index;
    };
    std::vector<FormationTask> tasks;
    for (std::size_t gi = 0; gi < G_set.size(); ++gi)
        for (std::size_t ji = 0; ji < J_set.size(); ++ji) tasks.push_back({G_set[gi], J_set[ji], gi, ji});

    auto run_task = [&](std::size_t i) {
        const auto& task = tasks[i];
        // Formation months valid for the shortest holding horizon (K = 1).
        const StrategySpec base{task.J, 1, skip, task.G};
        std::vector<std::optional<Cohort>> cohorts;
        MonthIndex first{};
        if (auto range = formation_range(panel, base)) {
            first = range->first;
            for (MonthIndex t = range->first; t <= range->second; ++t) cohorts.push_back(form_cohort(panel, t, base));
        }
        for (std::size_t ki = 0; ki < K_set.size(); ++ki) {
            const int K = K_set[ki];
            StrategyRun& run = runs[(task.g_index * J_set.size() + task.j_index) * K_set.size() + ki];
            run.spec = StrategySpec{task.J, K, skip, task.G};
            const MonthIndex last = panel.last_month() - K;
            for (std::size_t c = 0; c < cohorts.size(); ++c) {
                const MonthIndex t = first + static_cast<int>(c);
                if (t > last) break;
                if (!cohorts[c]) {
                    ++run.skipped;
                    continue;
                }
                run.cohorts.push_back(cohort_result(panel, *cohorts[c], K));
            }
        }
    };
    detail::parallel_for(tasks.size(), workers, run_task);
    return runs;
}

/// Overlapping event-time cohorts: one per calendar formation month.
inline StrategyRun run_strategy(const ReturnPanel& panel, const StrategySpec& spec) {
    spec.validate();
    if (!formation_range(panel, spec))
        throw Error(ErrorKind::insufficient_data, "panel of " + std::to_string(panel.n_months()) +
                                                      " months has no formation month for J=" +
                                                      std::to_string(spec.J) + " K=" + std::to_string(spec.K) +
                                                      " skip=" + std::to_string(spec.skip));
    const int J[] = {spec.J};
    const int K[] = {spec.K};
    const int G[] = {spec.G};
    return std::move(run_strategies(panel, J, K, spec.skip, G).front());
}

} // namespace contrarian
