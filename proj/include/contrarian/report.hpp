#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contrarian/error.hpp"
#include "contrarian/panel.hpp"
#include "contrarian/stats.hpp"
#include "contrarian/sweep.hpp"

namespace contrarian {

// Output tables: UTF-8, LF line endings, header row, '.' decimal separator.
// Returns carry 6 decimals and t-statistics 2; per-cohort values carry 17
// significant digits so the summary can be recomputed from them.

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline void write_summary_csv(std::ostream& out, std::span<const SweepCell> cells, std::span<const Leg> legs) {
    out << "J,K,G,leg,ret,tstat,n,sig\n";
    for (const auto& cell : cells) {
        const auto& spec = cell.spec();
        for (Leg leg : kAllLegs) {
            if (std::find(legs.begin(), legs.end(), leg) == legs.end()) continue;
            const auto& s = cell.leg(leg);
            out << spec.J << ',' << spec.K << ',' << spec.G << ',' << leg_name(leg) << ',';
            switch (s.status) {
            case CellStatus::ok:
                out << format_fixed(s.summary.ret, 6) << ',' << format_fixed(s.summary.tstat, 2) << ',' << s.summary.n
                    << ',' << significance_mark(s.summary.sig);
                break;
            case CellStatus::degenerate:
                out << format_fixed(s.summary.ret, 6) << ",," << s.summary.n << ",ERR";
                break;
            case CellStatus::empty:
                out << ",," << s.summary.n << ',';
                break;
            }
            out << '\n';
        }
    }
}

inline void write_cohorts_csv(std::ostream& out, std::span<const SweepCell> cells) {
    out << "formation,J,K,G,L_ann,W_ann,C_ann\n";
    for (const auto& cell : cells) {
        const auto& spec = cell.spec();
        for (const auto& c : cell.run.cohorts) {
            out << c.formation.to_string() << ',' << spec.J << ',' << spec.K << ',' << spec.G << ','
                << format_decimal17(c.loser) << ',' << format_decimal17(c.winner) << ','
                << format_decimal17(c.contrarian) << '\n';
        }
    }
}

/// One row per (J, K) cell; empty cells leave ret and tstat blank.
inline void write_grid_csv(std::ostream& out, std::span<const SweepCell> cells, Leg leg) {
    out << "J,K,ret,tstat,n\n";
    for (const auto& cell : cells) {
        const auto& s = cell.leg(leg);
        out << cell.spec().J << ',' << cell.spec().K << ',';
        if (s.status != CellStatus::empty) out << format_fixed(s.summary.ret, 6);
        out << ',';
        if (s.status == CellStatus::ok) out << format_fixed(s.summary.tstat, 2);
        out << ',' << s.summary.n << '\n';
    }
}

struct DiffRow {
    std::string pair; // "10-3", "A-B", ...
    int J = 0;
    int K = 0;
    Leg leg = Leg::contrarian;
    CellStatus status = CellStatus::empty;
    DiffResult result;
};

/// Paired difference of two runs, folding the degenerate and too-short cases
/// into a status instead of an exception.
inline DiffRow diff_row(std::string pair, const StrategyRun& a, const StrategyRun& b, Leg leg) {
    DiffRow row;
    row.pair = std::move(pair);
    row.J = a.spec.J;
    row.K = a.spec.K;
    row.leg = leg;
    try {
        row.result = diff_test(a, b, leg);
        row.status = CellStatus::ok;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::degenerate) {
            row.status = CellStatus::degenerate;
        } else if (e.kind() != ErrorKind::insufficient_data) {
            throw;
        }
        // Recompute delta and n over the shared months for the report.
        std::vector<double> diff;
        for (const auto& ca : a.cohorts)
            for (const auto& cb : b.cohorts)
                if (ca.formation == cb.formation) diff.push_back(ca.leg(leg) - cb.leg(leg));
        row.result.n = diff.size();
        if (!diff.empty() && row.status == CellStatus::degenerate) row.result.delta = mean(diff);
    }
    return row;
}

inline void write_diff_csv(std::ostream& out, std::span<const DiffRow> rows) {
    out << "pair,J,K,leg,delta,tstat,n,sig\n";
    for (const auto& r : rows) {
        out << r.pair << ',' << r.J << ',' << r.K << ',' << leg_name(r.leg) << ',';
        switch (r.status) {
        case CellStatus::ok:
            out << format_fixed(r.result.delta, 6) << ',' << format_fixed(r.result.tstat, 2) << ',' << r.result.n << ','
                << significance_mark(r.result.sig);
            break;
        case CellStatus::degenerate:
            out << format_fixed(r.result.delta, 6) << ",," << r.result.n << ",ERR";
            break;
        case CellStatus::empty:
            out << ",," << r.result.n << ',';
            break;
        }
        out << '\n';
    }
}

/// Header plus rows of a comma-separated table without quoting; every row
/// must have as many fields as the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw Error(ErrorKind::malformed_input, "missing column '" + std::string(name) + "'");
    }
};

inline std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = detail::trim_cr(line);
        if (view.empty()) continue;
        auto fields = split_fields(view);
        if (first) {
            table.header = std::move(fields);
            first = false;
            continue;
        }
        if (fields.size() != table.header.size())
            throw Error(ErrorKind::malformed_input, "line " + std::to_string(line_no) + ": expected " +
                                                        std::to_string(table.header.size()) + " fields");
        table.rows.push_back(std::move(fields));
    }
    if (first) throw Error(ErrorKind::empty_input, "empty input");
    return table;
}

/// Parses "1,6,12", "3..48:3" (inclusive range with step) or a mix of both
/// such as "1,3..48:3". Values keep the order given; duplicates are rejected.
inline std::vector<int> parse_int_list(std::string_view text) {
    auto bad = [&] { return Error(ErrorKind::invalid_argument, "bad integer list '" + std::string(text) + "'"); };
    auto to_int = [&](std::string_view s) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) throw bad();
        return v;
    };
    std::vector<int> out;
    for (const auto& item : split_fields(text)) {
        std::string_view v = item;
        auto dots = v.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(to_int(v));
            continue;
        }
        int lo = to_int(v.substr(0, dots));
        std::string_view rest = v.substr(dots + 2);
        int step = 1;
        if (auto colon = rest.find(':'); colon != std::string_view::npos) {
            step = to_int(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        int hi = to_int(rest);
        if (step < 1 || hi < lo) throw bad();
        for (int x = lo; x <= hi; x += step) out.push_back(x);
    }
    if (out.empty()) throw bad();
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = i + 1; j < out.size(); ++j)
            if (out[i] == out[j]) throw bad();
    return out;
}

} // namespace contrarian
