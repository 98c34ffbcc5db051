#pragma once
// Liouville-Green turning-point map and the rescaled oscillator waves.

#include <cmath>
#include <numbers>
#include <vector>

#include "twedge/errors.hpp"
#include "twedge/specfun.hpp"

namespace twedge::lg {

namespace detail {

inline constexpr double kSeriesRadius = 0.25;
inline constexpr int kSeriesTerms = 40;

// S(d) = sum c_n d^n with c_n = binom(1/2, n) 2^{-n} / (n + 3/2), so that
// (2/3) zeta^{3/2} = sqrt(2) d^{3/2} S(d) for xi = 1 + d.
struct SeriesValue {
    double s, ds;
};

inline SeriesValue turning_series(double d) {
    double binom = 1.0, half_pow = 1.0, dp = 1.0, dpm1 = 0.0;
    double s = 0.0, ds = 0.0;
    for (int n = 0; n < kSeriesTerms; ++n) {
        if (n > 0) {
            binom *= (0.5 - (n - 1)) / n;
            half_pow *= 0.5;
            dpm1 = dp;
            dp *= d;
        }
        const double c = binom * half_pow / (n + 1.5);
        s += c * dp;
        if (n > 0) ds += n * c * dpm1;
    }
    return {s, ds};
}

struct ZetaPair {
    double zeta, zeta_dot;
};

inline ZetaPair zeta_pair(double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw domain_error("lg: xi must be finite and > 0");
    const double d = xi - 1.0;
    if (std::abs(d) < kSeriesRadius) {
        const auto [s, ds] = turning_series(d);
        const double k = 3.0 / std::numbers::sqrt2;
        const double g = std::cbrt(k * s) * std::cbrt(k * s);
        const double dg = 2.0 / 3.0 * std::cbrt(k) * std::cbrt(k) / std::cbrt(s) * ds;
        return {d * g, g + d * dg};
    }
    const double f = xi * xi - 1.0;
    double zeta;
    if (xi > 1.0) {
        const double root = std::sqrt(f);
        const double a = 0.5 * xi * root - 0.5 * std::log(xi + root);
        zeta = std::pow(1.5 * a, 2.0 / 3.0);
    } else {
        const double b = 0.5 * (std::acos(xi) - xi * std::sqrt(-f));
        zeta = -std::pow(1.5 * b, 2.0 / 3.0);
    }
    return {zeta, std::sqrt(f / zeta)};
}

}  // namespace detail

/// Turning-point map: zeta(1) = 0, zeta > 0 to the right.
inline double lg_zeta(double xi) { return detail::zeta_pair(xi).zeta; }

/// d zeta / d xi; equals 2^{1/3} at the turning point.
inline double lg_zeta_dot(double xi) { return detail::zeta_pair(xi).zeta_dot; }

/// r(xi) = (zeta_dot(xi) / 2^{1/3})^{-1/2}.
inline double lg_r(double xi) { return 1.0 / std::sqrt(lg_zeta_dot(xi) / std::cbrt(2.0)); }

/// c_N = 2 sqrt(pi) kappa^{1/6} h_N^{-1/2} (2N_+)^{N/2} e^{-N_+/2} 2^{N-N_+}, h_N = sqrt(pi) 2^N N!.
inline double lg_c_N(int N) {
    if (N < 1) throw domain_error("lg_c_N: N must be >= 1");
    const double n = N, np = n + 0.5, kappa = 2.0 * n + 1.0;
    const double log_h = 0.5 * std::log(std::numbers::pi) + n * std::numbers::ln2 + std::lgamma(n + 1.0);
    const double lc = std::numbers::ln2 + 0.5 * std::log(std::numbers::pi) + std::log(kappa) / 6.0 -
                      0.5 * log_h + 0.5 * n * std::log(2.0 * np) - 0.5 * np + (n - np) * std::numbers::ln2;
    return std::exp(lc);
}

/// Leading LG approximant r(xi) Ai(kappa_N^{2/3} zeta(xi)) of (2N)^{1/4} tau_N phi_N(u_N + s tau_N),
/// with xi = 1 + s tau_N / u_N.
inline double lg_phi_approx(int N, double s) {
    const auto w = specfun::wave_context(N);
    const double xi = 1.0 + w.tau_N / w.u_N * s;
    if (!(xi > 0.0)) throw domain_error("lg_phi_approx: xi <= 0");
    const auto [zeta, zeta_dot] = detail::zeta_pair(xi);
    const double r = 1.0 / std::sqrt(zeta_dot / std::cbrt(2.0));
    return r * specfun::airy_ai(std::pow(w.kappa_N, 2.0 / 3.0) * zeta);
}

enum class Wave { phi, psi };

struct ShiftedWaveSpec {
    Wave which = Wave::phi;
    double k = 0.0;  // shift in units of delta_N
    int N = 1;
};

/// phi_tau(s;k) = (2N)^{1/4} tau_N phi_N(u_N + tau_N (s + k delta_N)); psi uses degree N-1 about u_{N-1}.
inline double shifted_wave(const ShiftedWaveSpec& spec, double s) {
    const auto w = specfun::wave_context(spec.N);
    const double scale = std::pow(2.0 * spec.N, 0.25) * w.tau_N;
    const double arg = s + spec.k * w.delta_N;
    if (spec.which == Wave::phi) return scale * specfun::oscillator_phi(spec.N, w.u_N + w.tau_N * arg);
    return scale * specfun::oscillator_phi(spec.N - 1, w.u_Nm1 + w.tau_N * arg);
}

/// Derivative in s of the shifted wave.
inline double shifted_wave_prime(const ShiftedWaveSpec& spec, double s) {
    const auto w = specfun::wave_context(spec.N);
    const double scale = std::pow(2.0 * spec.N, 0.25) * w.tau_N * w.tau_N;
    const double arg = s + spec.k * w.delta_N;
    if (spec.which == Wave::phi) return scale * specfun::oscillator_phi_prime(spec.N, w.u_N + w.tau_N * arg);
    return scale * specfun::oscillator_phi_prime(spec.N - 1, w.u_Nm1 + w.tau_N * arg);
}

struct RateRow {
    int N;
    double value;       // max_s N^{p} e^{s/2} |phi_bar - Ai|
    double derivative;  // same with tau_N phi_bar' and Ai'
};

/// Scaled sup-errors of the rescaled wave against Ai on s_grid, for each N.
inline std::vector<RateRow> rate_scan(const std::vector<int>& N_list, const std::vector<double>& s_grid,
                                      double exponent = 2.0 / 3.0) {
    std::vector<RateRow> rows;
    rows.reserve(N_list.size());
    for (int N : N_list) {
        const ShiftedWaveSpec spec{Wave::phi, 0.0, N};
        const double np = std::pow(static_cast<double>(N), exponent);
        RateRow row{N, 0.0, 0.0};
        for (double s : s_grid) {
            const double weight = np * std::exp(s / 2.0);
            row.value = std::max(row.value, weight * std::abs(shifted_wave(spec, s) - specfun::airy_ai(s)));
            row.derivative =
                std::max(row.derivative, weight * std::abs(shifted_wave_prime(spec, s) - specfun::airy_ai_prime(s)));
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace twedge::lg
