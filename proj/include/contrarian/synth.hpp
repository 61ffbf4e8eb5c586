#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "contrarian/error.hpp"
#include "contrarian/panel.hpp"

namespace contrarian {

/// One-factor panel with AR(1) idiosyncratic components:
///
///   r[i,t] = mu + m[t] + s[i,t]
///   m[t]   ~ N(0, sigma_mkt^2), shared by all stocks
///   s[i,t] = phi * s[i,t-1] + e[i,t],  e ~ N(0, sigma_idio^2)
///   s[i,0] ~ N(0, sigma_idio^2 / (1 - phi^2))
///
/// phi < 0 gives a reversal world, phi > 0 momentum, phi = 0 the null.
struct SynthConfig {
    std::size_t n_stocks = 200;
    std::size_t n_months = 240;
    double phi = 0.0;
    double sigma_idio = 0.08;
    double sigma_mkt = 0.05;
    double mu = 0.005;
    std::uint64_t seed = 1;

    void validate() const {
        if (n_stocks < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 stocks");
        if (n_months < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 months");
        if (!(std::abs(phi) < 1.0)) throw Error(ErrorKind::invalid_argument, "phi must lie in (-1, 1)");
        if (!(sigma_idio >= 0.0) || !(sigma_mkt >= 0.0))
            throw Error(ErrorKind::invalid_argument, "volatilities must be >= 0");
        if (!std::isfinite(mu)) throw Error(ErrorKind::invalid_argument, "mu must be finite");
    }
};

inline constexpr double kSynthReturnFloor = -0.99;
inline constexpr MonthIndex kSynthEpoch = MonthIndex::from_year_month(2000, 1);

/// Random stream used by the generator. Engine: std::mt19937_64 seeded with
/// the 64-bit seed (its output sequence is fixed by the C++ standard).
///   uniform() = ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1)
///   normal()  = sqrt(-2 ln u1) * cos(2 pi u2), consuming u1 then u2;
///               the sine variate is discarded.
class SynthStream {
public:
    explicit SynthStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

/// "S0001", "S0002", ... zero-padded wide enough that id order matches
/// generation order.
inline std::string synth_stock_id(std::size_t i, std::size_t n_stocks) {
    const int width = std::max<int>(4, static_cast<int>(std::to_string(n_stocks).size()));
    std::string digits = std::to_string(i + 1);
    return "S" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
}

struct SynthOutput {
    ReturnPanel panel;
    std::size_t clamped_cells = 0; // raw draws at or below the -0.99 floor
};

/// Draw order: m[0..T-1] first, then stock by stock s[i,0], e[i,1..T-1].
/// Market draws are consumed even when sigma_mkt = 0, so the idiosyncratic
/// stream does not depend on sigma_mkt.
inline SynthOutput generate_detailed(const SynthConfig& config) {
    config.validate();
    const std::size_t T = config.n_months;
    const std::size_t N = config.n_stocks;
    SynthStream rng(config.seed);

    std::vector<double> market(T);
    for (auto& m : market) m = config.sigma_mkt * rng.normal();

    const double stationary_sd = config.sigma_idio / std::sqrt(1.0 - config.phi * config.phi);
    std::vector<StockId> ids;
    ids.reserve(N);
    std::vector<double> returns(N * T);
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < N; ++i) {
        ids.push_back(synth_stock_id(i, N));
        double s = stationary_sd * rng.normal();
        for (std::size_t t = 0; t < T; ++t) {
            if (t > 0) s = config.phi * s + config.sigma_idio * rng.normal();
            double r = config.mu + market[t] + s;
            if (r <= kSynthReturnFloor) {
                r = kSynthReturnFloor;
                ++clamped;
            }
            returns[i * T + t] = r;
        }
    }
    std::vector<std::uint8_t> present(N * T, 1);
    return {ReturnPanel(kSynthEpoch, T, std::move(ids), std::move(returns), std::move(present)), clamped};
}

inline ReturnPanel generate(const SynthConfig& config) { return generate_detailed(config).panel; }

/// Masks each cell independently with probability `rate` using the same
/// stream construction as the generator (one uniform per cell, stock-major).
/// A stock left with no present cell has its whole row redrawn.
inline ReturnPanel inject_missing(const ReturnPanel& panel, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate < 1.0)) throw Error(ErrorKind::invalid_argument, "missing rate must lie in [0, 1)");
    SynthStream rng(seed);
    const std::size_t T = panel.n_months();
    std::vector<double> returns;
    std::vector<std::uint8_t> present;
    returns.reserve(panel.n_stocks() * T);
    present.reserve(panel.n_stocks() * T);
    for (StockIndex s = 0; s < panel.n_stocks(); ++s) {
        const auto vals = panel.row(s);
        const auto mask = panel.mask_row(s);
        std::vector<std::uint8_t> keep(T);
        bool any = false;
        while (!any) {
            for (std::size_t t = 0; t < T; ++t) {
                const bool masked = rng.uniform() < rate;
                keep[t] = (mask[t] != 0 && !masked) ? 1 : 0;
                any = any || keep[t] != 0;
            }
        }
        returns.insert(returns.end(), vals.begin(), vals.end());
        present.insert(present.end(), keep.begin(), keep.end());
    }
    return ReturnPanel(panel.first_month(), T, panel.stocks(), std::move(returns), std::move(present));
}

} // namespace contrarian
