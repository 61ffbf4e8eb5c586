#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "contrarian/error.hpp"
#include "contrarian/returns.hpp"

namespace contrarian {

enum class Significance { none, star5, star1 };

inline const char* significance_mark(Significance s) {
    switch (s) {
    case Significance::none: return "";
    case Significance::star5: return "*";
    case Significance::star1: return "**";
    }
    return "";
}

struct StrategySummary {
    double ret = 0.0;   // mean annualized return
    double tstat = 0.0; // Newey-West t-statistic
    std::size_t n = 0;  // cohort count
    Significance sig = Significance::none;
};

struct DiffResult {
    double delta = 0.0; // mean of A - B over shared formation months
    double tstat = 0.0;
    std::size_t n = 0;
    Significance sig = Significance::none;
};

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw Error(ErrorKind::insufficient_data, "mean of an empty series");
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

/// Bartlett-weighted long-run variance:
///   gamma_0 + 2 * sum_{j=1..q} (1 - j/(q+1)) * gamma_j,
///   gamma_j = (1/n) * sum_{t} (x_t - mean)(x_{t+j} - mean),
/// truncated at zero.
inline double nw_variance(std::span<const double> series, std::size_t q) {
    const std::size_t n = series.size();
    if (n < 2) throw Error(ErrorKind::insufficient_data, "Newey-West variance needs at least 2 observations");
    if (q > n - 1) throw Error(ErrorKind::invalid_argument, "Newey-West lag must be <= n - 1");

    const double xbar = mean(series);
    std::vector<double> dev(n);
    double scale = 0.0;
    double spread = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        dev[t] = series[t] - xbar;
        scale = std::max(scale, std::abs(series[t]));
        spread = std::max(spread, std::abs(dev[t]));
    }
    // numerically constant series (rounding noise only)
    if (spread <= 64.0 * std::numeric_limits<double>::epsilon() * scale) return 0.0;

    auto autocov = [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t t = 0; t + j < n; ++t) s += dev[t] * dev[t + j];
        return s / static_cast<double>(n);
    };

    double var = autocov(0);
    for (std::size_t j = 1; j <= q; ++j) {
        const double w = 1.0 - static_cast<double>(j) / static_cast<double>(q + 1);
        var += 2.0 * w * autocov(j);
    }
    return std::max(var, 0.0);
}

/// mean / sqrt(nw_variance / n). A zero-variance, zero-mean series has t = 0;
/// zero variance with a nonzero mean is degenerate and throws.
inline double nw_tstat(std::span<const double> series, std::size_t q) {
    const double var = nw_variance(series, q);
    const double xbar = mean(series);
    if (var == 0.0) {
        if (xbar == 0.0) return 0.0;
        throw Error(ErrorKind::degenerate, "zero-variance series with nonzero mean");
    }
    return xbar / std::sqrt(var / static_cast<double>(series.size()));
}

/// Two-sided Student-t critical value at significance level `alpha`.
inline double t_critical(double alpha, std::size_t dof) {
    if (dof < 1) throw Error(ErrorKind::insufficient_data, "Student-t needs at least 1 degree of freedom");
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
}

inline Significance classify(double tstat, std::size_t n) {
    const double a = std::abs(tstat);
    if (a >= t_critical(0.01, n - 1)) return Significance::star1;
    if (a >= t_critical(0.05, n - 1)) return Significance::star5;
    return Significance::none;
}

/// Overlap of K-month holding windows (plus the skip gap) leaves MA(K-1+skip)
/// dependence in consecutive cohort returns.
inline std::size_t hac_lag(int K, int skip) { return static_cast<std::size_t>(K - 1 + skip); }

inline StrategySummary summarize(const StrategyRun& run, Leg leg) {
    const auto series = run.leg_series(leg);
    if (series.size() < 2)
        throw Error(ErrorKind::insufficient_data, "summary needs at least 2 cohorts, got " + std::to_string(series.size()));
    StrategySummary s;
    s.n = series.size();
    s.ret = mean(series);
    s.tstat = nw_tstat(series, std::min(hac_lag(run.spec.K, run.spec.skip), s.n - 1));
    s.sig = classify(s.tstat, s.n);
    return s;
}

/// Paired comparison A - B over the formation months both runs share.
inline DiffResult diff_test(const StrategyRun& a, const StrategyRun& b, Leg leg) {
    std::vector<double> diff;
    auto ia = a.cohorts.begin();
    auto ib = b.cohorts.begin();
    while (ia != a.cohorts.end() && ib != b.cohorts.end()) {
        if (ia->formation < ib->formation) {
            ++ia;
        } else if (ib->formation < ia->formation) {
            ++ib;
        } else {
            diff.push_back(ia->leg(leg) - ib->leg(leg));
            ++ia;
            ++ib;
        }
    }
    if (diff.size() < 2)
        throw Error(ErrorKind::insufficient_data,
                    "runs share " + std::to_string(diff.size()) + " formation months; at least 2 required");

    const int K = std::max(a.spec.K, b.spec.K);
    const int skip = std::max(a.spec.skip, b.spec.skip);
    DiffResult r;
    r.n = diff.size();
    r.delta = mean(diff);
    r.tstat = nw_tstat(diff, std::min(hac_lag(K, skip), r.n - 1));
    r.sig = classify(r.tstat, r.n);
    return r;
}

} // namespace contrarian
