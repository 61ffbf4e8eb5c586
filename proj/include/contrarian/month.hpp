#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace contrarian {

/// Calendar month as an ordinal count of months since 1997-01 (ordinal 0).
/// Earlier months have negative ordinals.
class MonthIndex {
public:
    constexpr MonthIndex() = default;
    constexpr explicit MonthIndex(int ordinal) : ordinal_(ordinal) {}

    static constexpr MonthIndex from_year_month(int year, int month) {
        return MonthIndex((year - kEpochYear) * 12 + (month - 1));
    }

    constexpr int ordinal() const { return ordinal_; }

    constexpr int year() const { return kEpochYear + floor_div(ordinal_, 12); }
    constexpr int month() const { return ordinal_ - floor_div(ordinal_, 12) * 12 + 1; }

    /// Parses exactly "YYYY-MM" (four-digit year, month 01..12).
    static std::optional<MonthIndex> parse(std::string_view text) {
        if (text.size() != 7 || text[4] != '-') return std::nullopt;
        int y = 0;
        int m = 0;
        if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m)) return std::nullopt;
        if (m < 1 || m > 12) return std::nullopt;
        return from_year_month(y, m);
    }

    std::string to_string() const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d-%02d", year(), month());
        return buf;
    }

    constexpr MonthIndex operator+(int months) const { return MonthIndex(ordinal_ + months); }
    constexpr MonthIndex operator-(int months) const { return MonthIndex(ordinal_ - months); }
    constexpr int operator-(MonthIndex other) const { return ordinal_ - other.ordinal_; }
    constexpr MonthIndex& operator++() { ++ordinal_; return *this; }

    constexpr auto operator<=>(const MonthIndex&) const = default;

private:
    static constexpr int kEpochYear = 1997;

    static constexpr int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

    static bool parse_digits(std::string_view s, int& out) {
        for (char c : s)
            if (c < '0' || c > '9') return false;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    }

    int ordinal_ = 0;
};

} // namespace contrarian
