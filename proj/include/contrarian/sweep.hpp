#pragma once

#include <array>
#include <span>
#include <vector>

#include "contrarian/returns.hpp"
#include "contrarian/stats.hpp"

namespace contrarian {

enum class CellStatus {
    ok,
    empty,     // fewer than 2 cohorts, nothing to summarize
    degenerate // zero-variance series with nonzero mean: ret is defined, tstat is not
};

struct LegSummary {
    CellStatus status = CellStatus::empty;
    StrategySummary summary; // summary.n is always set; ret valid unless empty
};

inline LegSummary summarize_leg(const StrategyRun& run, Leg leg) {
    LegSummary out;
    out.summary.n = run.cohorts.size();
    if (run.cohorts.size() < 2) return out;
    try {
        out.summary = summarize(run, leg);
        out.status = CellStatus::ok;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate) throw;
        const auto series = run.leg_series(leg);
        out.summary.ret = mean(series);
        out.status = CellStatus::degenerate;
    }
    return out;
}

struct SweepCell {
    StrategyRun run;
    std::array<LegSummary, 3> legs;

    const StrategySpec& spec() const { return run.spec; }
    const LegSummary& leg(Leg which) const { return legs[static_cast<std::size_t>(which)]; }
};

/// Runs and summarizes every (G, J, K) cell, ordered by G, then J, then K.
inline std::vector<SweepCell> sweep_groups(const ReturnPanel& panel, std::span<const int> J_set,
                                           std::span<const int> K_set, int skip, std::span<const int> G_set,
                                           unsigned workers = 1) {
    auto runs = run_strategies(panel, J_set, K_set, skip, G_set, workers);
    std::vector<SweepCell> cells;
    cells.reserve(runs.size());
    for (auto& run : runs) {
        SweepCell cell;
        cell.run = std::move(run);
        for (Leg leg : kAllLegs) cell.legs[static_cast<std::size_t>(leg)] = summarize_leg(cell.run, leg);
        cells.push_back(std::move(cell));
    }
    return cells;
}

/// J x K grid for one grouping, ordered by J then K.
inline std::vector<SweepCell> sweep(const ReturnPanel& panel, std::span<const int> J_set, std::span<const int> K_set,
                                    int skip, int G, unsigned workers = 1) {
    const int groups[] = {G};
    return sweep_groups(panel, J_set, K_set, skip, groups, workers);
}

} // namespace contrarian
