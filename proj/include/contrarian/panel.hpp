#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contrarian/error.hpp"
#include "contrarian/month.hpp"

namespace contrarian {

using StockId = std::string;

/// Position of a stock within a panel's ordered stock list. Index order equals
/// byte-wise StockId order.
using StockIndex = std::size_t;

inline bool is_valid_stock_id(std::string_view id) {
    if (id.empty()) return false;
    return std::none_of(id.begin(), id.end(), [](char c) {
        return c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
    });
}

struct PanelFilterConfig {
    bool drop_first_month = true;
    /// Unset bounds mean "as far as the data reaches".
    std::optional<MonthIndex> start;
    std::optional<MonthIndex> end;
};

/// Immutable month-by-stock matrix of simple monthly returns with an
/// availability mask. Months form a gap-free range; stocks are sorted by id.
class ReturnPanel {
public:
    /// `returns` and `present` are stock-major: cell (s, m) lives at
    /// s * n_months + m. Values of masked cells are ignored.
    ReturnPanel(MonthIndex first_month, std::size_t n_months, std::vector<StockId> stocks,
                std::vector<double> returns, std::vector<std::uint8_t> present)
        : first_(first_month),
          n_months_(n_months),
          stocks_(std::move(stocks)),
          returns_(std::move(returns)),
          present_(std::move(present)) {
        validate();
    }

    MonthIndex first_month() const { return first_; }
    MonthIndex last_month() const { return first_ + static_cast<int>(n_months_) - 1; }
    std::size_t n_months() const { return n_months_; }
    std::size_t n_stocks() const { return stocks_.size(); }

    const std::vector<StockId>& stocks() const { return stocks_; }
    const StockId& stock(StockIndex s) const { return stocks_[s]; }

    std::optional<StockIndex> find(std::string_view id) const {
        auto it = std::lower_bound(stocks_.begin(), stocks_.end(), id);
        if (it == stocks_.end() || *it != id) return std::nullopt;
        return static_cast<StockIndex>(it - stocks_.begin());
    }

    bool contains(MonthIndex m) const { return m >= first_ && m <= last_month(); }

    /// Offset of `m` from the first month; `m` must be inside the panel.
    std::size_t offset(MonthIndex m) const { return static_cast<std::size_t>(m - first_); }

    bool is_present(StockIndex s, std::size_t month_offset) const {
        return present_[s * n_months_ + month_offset] != 0;
    }
    double value(StockIndex s, std::size_t month_offset) const { return returns_[s * n_months_ + month_offset]; }

    std::optional<double> get(StockIndex s, MonthIndex m) const {
        if (s >= stocks_.size() || !contains(m)) return std::nullopt;
        std::size_t off = offset(m);
        if (!is_present(s, off)) return std::nullopt;
        return value(s, off);
    }

    /// Contiguous row of one stock's returns / mask across all months.
    std::span<const double> row(StockIndex s) const { return {returns_.data() + s * n_months_, n_months_}; }
    std::span<const std::uint8_t> mask_row(StockIndex s) const { return {present_.data() + s * n_months_, n_months_}; }

    std::size_t present_count() const {
        return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), std::uint8_t{1}));
    }

    bool operator==(const ReturnPanel&) const = default;

private:
    void validate() {
        if (n_months_ == 0) throw Error(ErrorKind::empty_input, "panel has no months");
        if (stocks_.empty()) throw Error(ErrorKind::empty_input, "panel has no stocks");
        const std::size_t cells = n_months_ * stocks_.size();
        if (returns_.size() != cells || present_.size() != cells)
            throw Error(ErrorKind::invalid_argument, "panel storage size does not match months x stocks");
        for (std::size_t s = 0; s < stocks_.size(); ++s) {
            if (!is_valid_stock_id(stocks_[s]))
                throw Error(ErrorKind::malformed_input, "invalid stock id '" + stocks_[s] + "'");
            if (s > 0 && !(stocks_[s - 1] < stocks_[s]))
                throw Error(ErrorKind::invalid_argument, "stock ids must be unique and sorted");
            bool any = false;
            for (std::size_t m = 0; m < n_months_; ++m) {
                std::size_t i = s * n_months_ + m;
                if (present_[i] != 0) {
                    present_[i] = 1;
                    if (!std::isfinite(returns_[i]) || returns_[i] <= -1.0)
                        throw Error(ErrorKind::malformed_input, "return must be finite and > -1 for stock " + stocks_[s]);
                    any = true;
                } else {
                    returns_[i] = 0.0;
                }
            }
            if (!any) throw Error(ErrorKind::invalid_argument, "stock " + stocks_[s] + " has no present return");
        }
    }

    MonthIndex first_;
    std::size_t n_months_ = 0;
    std::vector<StockId> stocks_;
    std::vector<double> returns_;
    std::vector<std::uint8_t> present_;
};

namespace detail {

inline std::string_view trim_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

inline std::optional<double> parse_decimal(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, std::chars_format::general);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

// Builds a panel from sparse cells over [first, last], dropping stocks that
// end up with no present return.
inline ReturnPanel assemble(MonthIndex first, MonthIndex last,
                            const std::map<StockId, std::map<int, std::optional<double>>>& cells) {
    const std::size_t n_months = static_cast<std::size_t>(last - first + 1);
    std::vector<StockId> stocks;
    std::vector<double> returns;
    std::vector<std::uint8_t> present;
    for (const auto& [id, row] : cells) {
        std::vector<double> r(n_months, 0.0);
        std::vector<std::uint8_t> p(n_months, 0);
        bool any = false;
        for (const auto& [ordinal, value] : row) {
            MonthIndex m(ordinal);
            if (m < first || m > last || !value) continue;
            std::size_t off = static_cast<std::size_t>(m - first);
            r[off] = *value;
            p[off] = 1;
            any = true;
        }
        if (!any) continue;
        stocks.push_back(id);
        returns.insert(returns.end(), r.begin(), r.end());
        present.insert(present.end(), p.begin(), p.end());
    }
    if (stocks.empty()) throw Error(ErrorKind::empty_input, "empty input");
    return ReturnPanel(first, n_months, std::move(stocks), std::move(returns), std::move(present));
}

} // namespace detail

/// Reads a `month,stock_id,return` CSV. An empty return field denotes an
/// explicitly masked cell (the canonical emitter writes these).
inline ReturnPanel load_panel(std::istream& in, const PanelFilterConfig& config) {
    if (config.start && config.end && *config.start > *config.end)
        throw Error(ErrorKind::invalid_argument, "filter start is after end");

    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::map<StockId, std::map<int, std::optional<double>>> cells;
    std::optional<MonthIndex> lo;
    std::optional<MonthIndex> hi;

    auto fail = [&](const std::string& msg) -> Error {
        return Error(ErrorKind::malformed_input, "line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = detail::trim_cr(line);
        if (!saw_header) {
            if (view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
            if (view.empty()) continue;
            if (view != "month,stock_id,return") throw fail("expected header 'month,stock_id,return'");
            saw_header = true;
            continue;
        }
        if (view.empty()) continue;

        auto c1 = view.find(',');
        auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
        if (c2 == std::string_view::npos || view.find(',', c2 + 1) != std::string_view::npos)
            throw fail("expected 3 fields");
        std::string_view month_text = view.substr(0, c1);
        std::string_view id = view.substr(c1 + 1, c2 - c1 - 1);
        std::string_view ret_text = view.substr(c2 + 1);

        auto month = MonthIndex::parse(month_text);
        if (!month) throw fail("bad month '" + std::string(month_text) + "'");
        if (!is_valid_stock_id(id)) throw fail("bad stock id '" + std::string(id) + "'");

        std::optional<double> value;
        if (!ret_text.empty()) {
            value = detail::parse_decimal(ret_text);
            if (!value) throw fail("non-numeric return '" + std::string(ret_text) + "'");
            if (*value <= -1.0) throw fail("return must be > -1");
        }

        auto& row = cells[StockId(id)];
        if (!row.emplace(month->ordinal(), value).second)
            throw Error(ErrorKind::duplicate_cell,
                        "duplicate cell (" + month->to_string() + ", " + std::string(id) + ") at line " +
                            std::to_string(line_no));
    }
    if (!saw_header && cells.empty()) throw Error(ErrorKind::empty_input, "empty input");

    if (config.drop_first_month) {
        for (auto& [id, row] : cells) {
            for (auto& [ordinal, value] : row) {
                if (value) {
                    value.reset();
                    break;
                }
            }
        }
    }

    for (const auto& [id, row] : cells) {
        for (const auto& [ordinal, value] : row) {
            if (!value) continue;
            MonthIndex m(ordinal);
            if ((config.start && m < *config.start) || (config.end && m > *config.end)) continue;
            if (!lo || m < *lo) lo = m;
            if (!hi || m > *hi) hi = m;
        }
    }
    if (!lo) throw Error(ErrorKind::empty_input, "empty input");

    // Explicitly masked rows extend an unbounded range so that the canonical
    // emitter round-trips panels with all-masked edge months.
    if (!config.start || !config.end) {
        for (const auto& [id, row] : cells) {
            for (const auto& [ordinal, value] : row) {
                MonthIndex m(ordinal);
                if ((config.start && m < *config.start) || (config.end && m > *config.end)) continue;
                if (!config.start && m < *lo) lo = m;
                if (!config.end && m > *hi) hi = m;
            }
        }
    }

    return detail::assemble(config.start.value_or(*lo), config.end.value_or(*hi), cells);
}

inline ReturnPanel load_panel_file(const std::string& path, const PanelFilterConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::invalid_argument, "cannot open '" + path + "'");
    return load_panel(in, config);
}

inline std::string format_decimal17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Canonical emitter: header, every cell sorted by (month, stock_id), LF line
/// endings, 17 significant digits; masked cells carry an empty return.
inline void write_panel(std::ostream& out, const ReturnPanel& panel) {
    out << "month,stock_id,return\n";
    for (std::size_t m = 0; m < panel.n_months(); ++m) {
        const std::string month = (panel.first_month() + static_cast<int>(m)).to_string();
        for (StockIndex s = 0; s < panel.n_stocks(); ++s) {
            out << month << ',' << panel.stock(s) << ',';
            if (panel.is_present(s, m)) out << format_decimal17(panel.value(s, m));
            out << '\n';
        }
    }
}

/// Sub-panel over [start, end] clipped to the panel's range. Stocks with no
/// present return inside the slice are dropped.
inline ReturnPanel slice_period(const ReturnPanel& panel, MonthIndex start, MonthIndex end) {
    MonthIndex lo = std::max(start, panel.first_month());
    MonthIndex hi = std::min(end, panel.last_month());
    if (lo > hi)
        throw Error(ErrorKind::out_of_range, "slice " + start.to_string() + ".." + end.to_string() +
                                                 " does not intersect the panel");
    const std::size_t off = panel.offset(lo);
    const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
    std::vector<StockId> stocks;
    std::vector<double> returns;
    std::vector<std::uint8_t> present;
    for (StockIndex s = 0; s < panel.n_stocks(); ++s) {
        auto mask = panel.mask_row(s).subspan(off, n);
        if (std::find(mask.begin(), mask.end(), std::uint8_t{1}) == mask.end()) continue;
        auto vals = panel.row(s).subspan(off, n);
        stocks.push_back(panel.stock(s));
        returns.insert(returns.end(), vals.begin(), vals.end());
        present.insert(present.end(), mask.begin(), mask.end());
    }
    if (stocks.empty()) throw Error(ErrorKind::empty_input, "slice contains no present returns");
    return ReturnPanel(lo, n, std::move(stocks), std::move(returns), std::move(present));
}

/// First and last month of the estimation window for formation month `t`.
inline std::pair<MonthIndex, MonthIndex> estimation_window(MonthIndex t, int J, int skip) {
    return {t - J - skip + 1, t - skip};
}

/// Stocks with a present return in every month of the estimation window
/// [t-J-skip+1, t-skip], in StockId order.
inline std::vector<StockIndex> eligible_stocks(const ReturnPanel& panel, MonthIndex t, int J, int skip) {
    if (J < 1 || skip < 0) throw Error(ErrorKind::invalid_argument, "J must be >= 1 and skip >= 0");
    auto [w0, w1] = estimation_window(t, J, skip);
    if (!panel.contains(w0) || !panel.contains(w1))
        throw Error(ErrorKind::out_of_range, "estimation window for " + t.to_string() + " is outside the panel");
    const std::size_t off = panel.offset(w0);
    std::vector<StockIndex> out;
    for (StockIndex s = 0; s < panel.n_stocks(); ++s) {
        auto mask = panel.mask_row(s).subspan(off, static_cast<std::size_t>(J));
        if (std::all_of(mask.begin(), mask.end(), [](std::uint8_t p) { return p != 0; })) out.push_back(s);
    }
    return out;
}

} // namespace contrarian
