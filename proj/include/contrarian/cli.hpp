#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "contrarian/error.hpp"
#include "contrarian/panel.hpp"
#include "contrarian/report.hpp"
#include "contrarian/sweep.hpp"
#include "contrarian/synth.hpp"

namespace contrarian::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNoCells = 2;

enum class CompareMode { none, grouping_pairs, panel_pairs };

struct RunConfig {
    std::vector<std::string> inputs;
    std::optional<MonthIndex> start;
    std::optional<MonthIndex> end;
    std::vector<int> J_set{1};
    std::vector<int> K_set{1};
    int skip = 0;
    std::vector<int> G_set{10};
    std::vector<Leg> legs{Leg::loser, Leg::winner, Leg::contrarian};
    std::string out_dir = ".";
    CompareMode compare = CompareMode::none;
    bool drop_first_month = true;
    unsigned workers = 1;

    void validate() const {
        auto fail = [](const std::string& m) { return Error(ErrorKind::invalid_argument, m); };
        if (inputs.empty()) throw fail("at least one --input is required");
        if (J_set.empty() || K_set.empty() || G_set.empty()) throw fail("need at least one (J, K, G) cell");
        if (legs.empty()) throw fail("need at least one leg");
        for (int G : G_set)
            for (int J : J_set)
                for (int K : K_set) StrategySpec{J, K, skip, G}.validate();
        if (start && end && *start > *end) throw fail("--start is after --end");
        switch (compare) {
        case CompareMode::none:
            if (inputs.size() != 1) throw fail("run and sweep take exactly one --input");
            break;
        case CompareMode::grouping_pairs:
            if (G_set.size() < 2) throw fail("grouping-pairs comparison needs at least 2 group counts");
            if (inputs.size() != 1) throw fail("grouping-pairs comparison takes exactly one --input");
            break;
        case CompareMode::panel_pairs:
            if (inputs.size() != 2) throw fail("panel-pairs comparison needs exactly 2 --input paths");
            break;
        }
    }

    PanelFilterConfig filter() const { return {drop_first_month, start, end}; }
};

struct SynthCommand {
    SynthConfig synth;
    double missing_rate = 0.0;
    std::uint64_t missing_seed = 0;
    std::string out_path; // empty writes to the output stream
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::invalid_argument, "cannot write '" + path.string() + "'");
    out << contents;
    if (!out) throw Error(ErrorKind::invalid_argument, "failed writing '" + path.string() + "'");
}

inline std::filesystem::path prepare_out_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw Error(ErrorKind::invalid_argument, "cannot create output directory '" + dir + "'");
    return p;
}

inline bool all_cells_empty(const std::vector<SweepCell>& cells) {
    return std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.run.cohorts.empty(); });
}

// Pairs larger-minus-smaller group counts, nearest neighbours first:
// {3, 5, 10} -> 5-3, 10-5, 10-3.
inline std::vector<std::pair<int, int>> grouping_pairs(std::vector<int> groups) {
    std::sort(groups.begin(), groups.end());
    std::vector<std::pair<int, int>> out;
    for (std::size_t gap = 1; gap < groups.size(); ++gap)
        for (std::size_t i = 0; i + gap < groups.size(); ++i) out.emplace_back(groups[i + gap], groups[i]);
    return out;
}

template <class Body>
int guarded(std::ostream& diag, Body&& body) {
    try {
        return body();
    } catch (const Error& e) {
        diag << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace detail

/// Writes summary.csv (rows by G, J, K, leg) and cohorts.csv.
inline int cmd_run(const RunConfig& config, std::ostream& diag) {
    return detail::guarded(diag, [&] {
        config.validate();
        const auto panel = load_panel_file(config.inputs.front(), config.filter());
        const auto cells = sweep_groups(panel, config.J_set, config.K_set, config.skip, config.G_set, config.workers);
        if (detail::all_cells_empty(cells)) {
            diag << "error: no cell has a computable cohort\n";
            return kExitNoCells;
        }
        std::ostringstream summary;
        std::ostringstream cohorts;
        write_summary_csv(summary, cells, config.legs);
        write_cohorts_csv(cohorts, cells);
        const auto dir = detail::prepare_out_dir(config.out_dir);
        detail::write_file(dir / "summary.csv", summary.str());
        detail::write_file(dir / "cohorts.csv", cohorts.str());
        return kExitOk;
    });
}

/// Writes grid_<leg>.csv per leg; with several group counts the files are
/// grid_G<g>_<leg>.csv.
inline int cmd_sweep(const RunConfig& config, std::ostream& diag) {
    return detail::guarded(diag, [&] {
        config.validate();
        const auto panel = load_panel_file(config.inputs.front(), config.filter());
        const auto cells = sweep_groups(panel, config.J_set, config.K_set, config.skip, config.G_set, config.workers);
        if (detail::all_cells_empty(cells)) {
            diag << "error: no cell has a computable cohort\n";
            return kExitNoCells;
        }
        const auto dir = detail::prepare_out_dir(config.out_dir);
        const std::size_t per_group = config.J_set.size() * config.K_set.size();
        for (std::size_t gi = 0; gi < config.G_set.size(); ++gi) {
            std::span<const SweepCell> grid(cells.data() + gi * per_group, per_group);
            for (Leg leg : config.legs) {
                std::ostringstream out;
                write_grid_csv(out, grid, leg);
                std::string name = config.G_set.size() == 1
                                       ? "grid_" + std::string(leg_name(leg)) + ".csv"
                                       : "grid_G" + std::to_string(config.G_set[gi]) + "_" + leg_name(leg) + ".csv";
                detail::write_file(dir / name, out.str());
            }
        }
        return kExitOk;
    });
}

/// Writes diff.csv. Grouping pairs compare G values on one panel; panel pairs
/// compare the first input minus the second at each G.
inline int cmd_compare(const RunConfig& config, std::ostream& diag) {
    return detail::guarded(diag, [&] {
        if (config.compare == CompareMode::none)
            throw Error(ErrorKind::invalid_argument, "compare needs grouping-pairs or panel-pairs mode");
        config.validate();
        const std::size_t per_group = config.J_set.size() * config.K_set.size();
        auto at = [&](const std::vector<StrategyRun>& runs, std::size_t gi, std::size_t ji, std::size_t ki) -> const StrategyRun& {
            return runs[gi * per_group + ji * config.K_set.size() + ki];
        };
        auto index_of = [&](int G) {
            return static_cast<std::size_t>(std::find(config.G_set.begin(), config.G_set.end(), G) - config.G_set.begin());
        };

        std::vector<DiffRow> rows;
        bool any_cohort = false;
        if (config.compare == CompareMode::grouping_pairs) {
            const auto panel = load_panel_file(config.inputs.front(), config.filter());
            const auto runs = run_strategies(panel, config.J_set, config.K_set, config.skip, config.G_set, config.workers);
            for (const auto& r : runs) any_cohort = any_cohort || !r.cohorts.empty();
            for (auto [hi, lo] : detail::grouping_pairs(config.G_set)) {
                const std::string label = std::to_string(hi) + "-" + std::to_string(lo);
                for (std::size_t ji = 0; ji < config.J_set.size(); ++ji)
                    for (std::size_t ki = 0; ki < config.K_set.size(); ++ki)
                        for (Leg leg : config.legs)
                            rows.push_back(diff_row(label, at(runs, index_of(hi), ji, ki), at(runs, index_of(lo), ji, ki), leg));
            }
        } else {
            const auto panel_a = load_panel_file(config.inputs[0], config.filter());
            const auto panel_b = load_panel_file(config.inputs[1], config.filter());
            const auto runs_a = run_strategies(panel_a, config.J_set, config.K_set, config.skip, config.G_set, config.workers);
            const auto runs_b = run_strategies(panel_b, config.J_set, config.K_set, config.skip, config.G_set, config.workers);
            for (const auto& r : runs_a) any_cohort = any_cohort || !r.cohorts.empty();
            for (std::size_t gi = 0; gi < config.G_set.size(); ++gi) {
                const std::string label =
                    config.G_set.size() == 1 ? std::string("A-B") : "A-B/G" + std::to_string(config.G_set[gi]);
                for (std::size_t ji = 0; ji < config.J_set.size(); ++ji)
                    for (std::size_t ki = 0; ki < config.K_set.size(); ++ki)
                        for (Leg leg : config.legs)
                            rows.push_back(diff_row(label, at(runs_a, gi, ji, ki), at(runs_b, gi, ji, ki), leg));
            }
        }
        if (!any_cohort) {
            diag << "error: no cell has a computable cohort\n";
            return kExitNoCells;
        }
        std::ostringstream out;
        write_diff_csv(out, rows);
        const auto dir = detail::prepare_out_dir(config.out_dir);
        detail::write_file(dir / "diff.csv", out.str());
        return kExitOk;
    });
}

/// Writes a canonical panel CSV to `command.out_path`, or to `out` when no
/// path is given.
inline int cmd_synth(const SynthCommand& command, std::ostream& out, std::ostream& diag) {
    return detail::guarded(diag, [&] {
        auto result = generate_detailed(command.synth);
        ReturnPanel panel = command.missing_rate > 0.0
                                ? inject_missing(result.panel, command.missing_rate, command.missing_seed)
                                : std::move(result.panel);
        std::ostringstream csv;
        write_panel(csv, panel);
        if (command.out_path.empty()) {
            out << csv.str();
        } else {
            const std::filesystem::path path(command.out_path);
            if (path.has_parent_path()) detail::prepare_out_dir(path.parent_path().string());
            detail::write_file(path, csv.str());
        }
        if (result.clamped_cells > 0) diag << "note: " << result.clamped_cells << " returns clamped at -0.99\n";
        return kExitOk;
    });
}

} // namespace contrarian::cli
