#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contrarian/error.hpp"
#include "contrarian/panel.hpp"

namespace contrarian {

/// One J-K cell: rank on J months of returns ending `skip` months before
/// formation, hold for K months, split the cross-section into G groups.
struct StrategySpec {
    int J = 1;
    int K = 1;
    int skip = 0;
    int G = 10;

    void validate() const {
        if (J < 1) throw Error(ErrorKind::invalid_argument, "J must be >= 1");
        if (K < 1) throw Error(ErrorKind::invalid_argument, "K must be >= 1");
        if (skip < 0) throw Error(ErrorKind::invalid_argument, "skip must be >= 0");
        if (G < 2) throw Error(ErrorKind::invalid_argument, "G must be >= 2");
    }

    bool operator==(const StrategySpec&) const = default;
};

enum class Leg { loser, winner, contrarian };

inline constexpr Leg kAllLegs[] = {Leg::loser, Leg::winner, Leg::contrarian};

inline const char* leg_name(Leg leg) {
    switch (leg) {
    case Leg::loser: return "loser";
    case Leg::winner: return "winner";
    case Leg::contrarian: return "contrarian";
    }
    return "?";
}

inline std::optional<Leg> parse_leg(std::string_view name) {
    for (Leg leg : kAllLegs)
        if (name == leg_name(leg)) return leg;
    return std::nullopt;
}

struct Cohort {
    MonthIndex formation;
    std::vector<StockIndex> losers;  // group 0, StockId order
    std::vector<StockIndex> winners; // group G-1, StockId order
    std::size_t universe_size = 0;
};

/// Result of rank_and_group: keys in ascending (score, key) order together
/// with each one's group, 0 being the worst performers.
template <class Key>
struct GroupAssignment {
    int groups = 0;
    std::vector<Key> sorted;
    std::vector<int> group;

    /// Half-open range [begin, end) of sorted ranks belonging to group g.
    std::pair<std::size_t, std::size_t> bounds(int g) const {
        const auto n = static_cast<std::uint64_t>(sorted.size());
        const auto G = static_cast<std::uint64_t>(groups);
        return {static_cast<std::size_t>(n * static_cast<std::uint64_t>(g) / G),
                static_cast<std::size_t>(n * static_cast<std::uint64_t>(g + 1) / G)};
    }

    std::vector<Key> members(int g) const {
        auto [b, e] = bounds(g);
        return {sorted.begin() + static_cast<std::ptrdiff_t>(b), sorted.begin() + static_cast<std::ptrdiff_t>(e)};
    }

    std::optional<int> group_of(const Key& key) const {
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] == key) return group[i];
        return std::nullopt;
    }
};

/// Sorts ascending by score, ties broken by ascending key; the stock at rank k
/// lands in group g iff floor(N*g/G) <= k < floor(N*(g+1)/G).
template <class Key>
GroupAssignment<Key> rank_and_group(std::span<const std::pair<Key, double>> scores, int G) {
    if (G < 2) throw Error(ErrorKind::invalid_argument, "group count must be >= 2");
    if (scores.size() < static_cast<std::size_t>(G))
        throw Error(ErrorKind::insufficient_data, "fewer stocks than groups");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a].second != scores[b].second) return scores[a].second < scores[b].second;
        return scores[a].first < scores[b].first;
    });

    GroupAssignment<Key> out;
    out.groups = G;
    out.sorted.reserve(order.size());
    for (std::size_t i : order) out.sorted.push_back(scores[i].first);
    out.group.resize(order.size());
    for (int g = 0; g < G; ++g) {
        auto [b, e] = out.bounds(g);
        std::fill(out.group.begin() + static_cast<std::ptrdiff_t>(b), out.group.begin() + static_cast<std::ptrdiff_t>(e), g);
    }
    return out;
}

template <class Key>
GroupAssignment<Key> rank_and_group(const std::vector<std::pair<Key, double>>& scores, int G) {
    return rank_and_group(std::span<const std::pair<Key, double>>(scores), G);
}

/// Compounded return over the estimation window, prod(1 + r) - 1.
inline double estimation_return(const ReturnPanel& panel, StockIndex stock, MonthIndex t, int J, int skip) {
    auto [w0, w1] = estimation_window(t, J, skip);
    if (J < 1 || skip < 0) throw Error(ErrorKind::invalid_argument, "J must be >= 1 and skip >= 0");
    if (!panel.contains(w0) || !panel.contains(w1))
        throw Error(ErrorKind::out_of_range, "estimation window for " + t.to_string() + " is outside the panel");
    const std::size_t off = panel.offset(w0);
    double growth = 1.0;
    for (std::size_t m = off; m < off + static_cast<std::size_t>(J); ++m) {
        if (!panel.is_present(stock, m))
            throw Error(ErrorKind::out_of_range,
                        "stock " + panel.stock(stock) + " is missing a return inside its estimation window");
        growth *= 1.0 + panel.value(stock, m);
    }
    return growth - 1.0;
}

/// Ranks eligible stocks at formation month t. Returns nullopt (a skipped
/// formation month) when fewer than G stocks are eligible.
inline std::optional<Cohort> form_cohort(const ReturnPanel& panel, MonthIndex t, const StrategySpec& spec) {
    spec.validate();
    if (!panel.contains(t + 1) || !panel.contains(t + spec.K))
        throw Error(ErrorKind::out_of_range, "holding window after " + t.to_string() + " is outside the panel");

    const auto eligible = eligible_stocks(panel, t, spec.J, spec.skip);
    if (eligible.size() < static_cast<std::size_t>(spec.G)) return std::nullopt;

    std::vector<std::pair<StockIndex, double>> scores;
    scores.reserve(eligible.size());
    for (StockIndex s : eligible) scores.emplace_back(s, estimation_return(panel, s, t, spec.J, spec.skip));

    const auto groups = rank_and_group<StockIndex>(scores, spec.G);
    Cohort c;
    c.formation = t;
    c.universe_size = eligible.size();
    c.losers = groups.members(0);
    c.winners = groups.members(spec.G - 1);
    std::sort(c.losers.begin(), c.losers.end());
    std::sort(c.winners.begin(), c.winners.end());
    return c;
}

/// Equal-weighted monthly returns of `members` over months t+1..t+K. Members
/// missing a month drop out of that month's average; a month with no
/// surviving member earns 0.
inline std::vector<double> holding_leg_returns(const ReturnPanel& panel, std::span<const StockIndex> members,
                                               MonthIndex t, int K) {
    if (members.empty()) throw Error(ErrorKind::invalid_argument, "holding leg has no members");
    if (K < 1) throw Error(ErrorKind::invalid_argument, "K must be >= 1");
    if (!panel.contains(t + 1) || !panel.contains(t + K))
        throw Error(ErrorKind::out_of_range, "holding window after " + t.to_string() + " is outside the panel");

    const std::size_t off = panel.offset(t + 1);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(K));
    for (std::size_t m = off; m < off + static_cast<std::size_t>(K); ++m) {
        double sum = 0.0;
        std::size_t n = 0;
        for (StockIndex s : members) {
            if (!panel.is_present(s, m)) continue;
            sum += panel.value(s, m);
            ++n;
        }
        out.push_back(n == 0 ? 0.0 : sum / static_cast<double>(n));
    }
    return out;
}

} // namespace contrarian
