#pragma once
// Airy function, oscillator wave functions and the scalar constants of the
// edge-scaling problem (centering, scaling, wave shifts).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "twedge/errors.hpp"

namespace twedge::specfun {

inline constexpr double kAiZero = 0.35502805388781723926;        // Ai(0)
inline constexpr double kAiPrimeZero = -0.25881940379280679840;  // Ai'(0)

namespace detail {

inline double flush_subnormal(double v) {
    return std::abs(v) < std::numeric_limits<double>::min() ? 0.0 : v;
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw domain_error(std::string(what) + ": non-finite argument");
}

struct AiryStep {
    double ai;
    double aip;
    double integral;  // integral of Ai from x0 to x0 + h
};

// Taylor series of the Airy equation y'' = x y about x0, evaluated at x0 + h.
// Coefficients follow a_n = (x0 a_{n-2} + a_{n-3}) / (n (n-1)).
inline AiryStep airy_taylor_step(double x0, double ai, double aip, double h) {
    double a3 = 0.0, a2 = ai, a1 = aip;  // a_{n-3}, a_{n-2}, a_{n-1} for the next n
    double y = ai + aip * h;
    double dy = aip;
    double integ = ai * h + aip * h * h / 2.0;
    double hp = h;  // h^{n-1}
    int small = 0;
    for (int n = 2; n < 200; ++n) {
        const double an = (x0 * a2 + a3) / (static_cast<double>(n) * (n - 1));
        a3 = a2;
        a2 = a1;
        a1 = an;
        const double dterm = n * an * hp;
        hp *= h;
        const double term = an * hp;
        y += term;
        dy += dterm;
        integ += term * h / (n + 1);
        const double scale = std::abs(y) + std::abs(dy * h) + 1e-300;
        if (std::abs(term) + std::abs(dterm * h) < 1e-18 * scale) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
    }
    return {y, dy, integ};
}

// u_k coefficients of the Airy asymptotic expansions; v_k = -(6k+1)/(6k-1) u_k.
inline double airy_u(int k, double prev) {
    return prev * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
}

// Exponentially small regime (used from x >= 40): optimal truncation error below e^{-2 zeta}.
inline std::pair<double, double> airy_asymptotic_right(double x) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    double su = 1.0, sv = 1.0, u = 1.0, zp = 1.0, last = 1.0;
    for (int k = 1; k < 80; ++k) {
        u = airy_u(k, u);
        zp *= zeta;
        const double tu = u / zp;
        if (tu > last) break;
        last = tu;
        const double sign = (k % 2) ? -1.0 : 1.0;
        su += sign * tu;
        sv += sign * (-(6.0 * k + 1) / (6.0 * k - 1)) * tu;
        if (tu < 1e-17) break;
    }
    const double pref = std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi));
    const double q = std::sqrt(std::sqrt(x));
    return {flush_subnormal(pref / q * su), flush_subnormal(-pref * q * sv)};
}

// Oscillatory regime x <= -40 (modulus/phase form).
inline std::pair<double, double> airy_asymptotic_left(double x) {
    const double z = -x;
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    double p = 1.0, q = 0.0, r = 1.0, s = 0.0, u = 1.0, zp = 1.0, last = 1.0;
    for (int k = 1; k < 120; ++k) {
        u = airy_u(k, u);
        zp *= zeta;
        const double tu = u / zp;
        if (tu > last) break;
        last = tu;
        const double tv = -(6.0 * k + 1) / (6.0 * k - 1) * tu;
        // k odd feeds Q/S with sign (-1)^{(k-1)/2}, k even feeds P/R with sign (-1)^{k/2}
        if (k % 2) {
            const double sign = ((k - 1) / 2 % 2) ? -1.0 : 1.0;
            q += sign * tu;
            s += sign * tv;
        } else {
            const double sign = (k / 2 % 2) ? -1.0 : 1.0;
            p += sign * tu;
            r += sign * tv;
        }
        if (tu < 1e-17) break;
    }
    const double theta = zeta - std::numbers::pi / 4.0;
    const double c = std::cos(theta), sn = std::sin(theta);
    const double quart = std::sqrt(std::sqrt(z));
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    return {inv_sqrt_pi / quart * (c * p + sn * q), inv_sqrt_pi * quart * (sn * r - c * s)};
}

// Anchor table for Ai, Ai' and the right-tail integral on [-40, 40], built once.
// The right half is propagated downward from the asymptotic regime (Ai is dominant
// in that direction); the left half is propagated from the exact values at 0.
class AiryTable {
public:
    static constexpr double kLo = -40.0;
    static constexpr double kHi = 40.0;
    static constexpr double kStep = 0.25;

    static const AiryTable& instance() {
        static const AiryTable table;
        return table;
    }

    struct Values {
        double ai, aip, tail;
    };

    Values eval(double x) const {
        auto i = static_cast<std::ptrdiff_t>(std::lround((x - kLo) / kStep));
        if (i < 0) i = 0;
        if (i >= static_cast<std::ptrdiff_t>(ai_.size())) i = static_cast<std::ptrdiff_t>(ai_.size()) - 1;
        const double x0 = kLo + kStep * static_cast<double>(i);
        const auto st = airy_taylor_step(x0, ai_[i], aip_[i], x - x0);
        return {st.ai, st.aip, tail_[i] - st.integral};
    }

private:
    AiryTable() {
        const auto n = static_cast<std::size_t>(std::lround((kHi - kLo) / kStep)) + 1;
        ai_.resize(n);
        aip_.resize(n);
        tail_.resize(n);
        const std::size_t top = n - 1;
        const auto zero = static_cast<std::size_t>(std::lround(-kLo / kStep));

        auto [a8, ap8] = airy_asymptotic_right(kHi);
        ai_[top] = a8;
        aip_[top] = ap8;
        tail_[top] = march_right_tail(kHi);

        for (std::size_t i = top; i > zero; --i) {
            const double x = kLo + kStep * static_cast<double>(i);
            const auto st = airy_taylor_step(x, ai_[i], aip_[i], -kStep);
            ai_[i - 1] = st.ai;
            aip_[i - 1] = st.aip;
            tail_[i - 1] = tail_[i] - st.integral;
        }
        ai_[zero] = kAiZero;
        aip_[zero] = kAiPrimeZero;
        tail_[zero] = 1.0 / 3.0;
        for (std::size_t i = zero; i > 0; --i) {
            const double x = kLo + kStep * static_cast<double>(i);
            const auto st = airy_taylor_step(x, ai_[i], aip_[i], -kStep);
            ai_[i - 1] = st.ai;
            aip_[i - 1] = st.aip;
            tail_[i - 1] = tail_[i] - st.integral;
        }
    }

public:
    // Integral of Ai over [x, inf) for x >= kHi, by stepping through the asymptotic regime.
    static double march_right_tail(double x) {
        double sum = 0.0;
        auto [a, ap] = airy_asymptotic_right(x);
        const double first = std::abs(a);
        for (int j = 0; j < 400 && a != 0.0; ++j) {
            const auto st = airy_taylor_step(x, a, ap, kStep);
            sum += st.integral;
            x += kStep;
            std::tie(a, ap) = airy_asymptotic_right(x);
            if (std::abs(a) < 1e-19 * first) break;
        }
        return sum;
    }

private:
    std::vector<double> ai_, aip_, tail_;
};

inline AiryTable::Values airy_all(double s) {
    require_finite(s, "airy");
    if (s > AiryTable::kHi) {
        auto [a, ap] = airy_asymptotic_right(s);
        return {a, ap, AiryTable::march_right_tail(s)};
    }
    if (s < AiryTable::kLo) {
        auto [a, ap] = airy_asymptotic_left(s);
        // integral over [s, -40] by marching upward through asymptotic values
        double sum = 0.0, x = s, ca = a, cap = ap;
        while (x < AiryTable::kLo) {
            const double h = std::min(AiryTable::kStep, AiryTable::kLo - x);
            sum += airy_taylor_step(x, ca, cap, h).integral;
            x += h;
            if (x < AiryTable::kLo) std::tie(ca, cap) = airy_asymptotic_left(x);
        }
        return {a, ap, sum + AiryTable::instance().eval(AiryTable::kLo).tail};
    }
    const auto v = AiryTable::instance().eval(s);
    return {flush_subnormal(v.ai), flush_subnormal(v.aip), v.tail};
}

}  // namespace detail

/// Airy function Ai(s).
inline double airy_ai(double s) { return detail::airy_all(s).ai; }

/// Derivative Ai'(s).
inline double airy_ai_prime(double s) { return detail::airy_all(s).aip; }

/// Right-tail integral of Ai over [s, inf); tends to 1 as s -> -inf and equals 1/3 at 0.
inline double airy_tail_integral(double s) { return detail::airy_all(s).tail; }

struct AiryValues {
    double ai;
    double aip;
};

inline AiryValues airy(double s) {
    const auto v = detail::airy_all(s);
    return {v.ai, v.aip};
}

// ---------------------------------------------------------------------------
// Oscillator wave functions phi_k(x) = h_k^{-1/2} e^{-x^2/2} H_k(x).

namespace detail {

inline const double kPiMinusQuarter = std::pow(std::numbers::pi, -0.25);

// Values are carried as mantissa * 2^{500 p} * exp(-x^2/2) so that neither the
// Gaussian factor nor the growth through the turning region leaves double range.
class ScaledGaussian {
public:
    explicit ScaledGaussian(double x) {
        const double g = -0.5 * x * x;
        q_ = static_cast<int>(std::floor(g / std::numbers::ln2));
        er_ = std::exp(g - q_ * std::numbers::ln2);
    }
    double to_value(double mantissa, int p) const {
        if (mantissa == 0.0) return 0.0;
        return flush_subnormal(std::ldexp(mantissa * er_, q_ + 500 * p));
    }

private:
    int q_;
    double er_;
};

inline constexpr double kRescaleUp = 0x1p500;
inline constexpr double kRescaleDown = 0x1p-500;

}  // namespace detail

/// Pair (phi_n(x), phi_{n-1}(x)); phi_{-1} is taken as 0.
struct PhiPair {
    double phi;
    double phi_prev;
};

/// Normalized three-term recurrence
/// phi_{k+1} = x sqrt(2/(k+1)) phi_k - sqrt(k/(k+1)) phi_{k-1}, seeded at pi^{-1/4} e^{-x^2/2}.
inline PhiPair oscillator_pair(std::size_t n, double x) {
    detail::require_finite(x, "oscillator_phi");
    const detail::ScaledGaussian sg(x);
    double prev = 0.0, cur = detail::kPiMinusQuarter;
    int p = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double kd = static_cast<double>(k);
        const double next = x * std::sqrt(2.0 / (kd + 1.0)) * cur - std::sqrt(kd / (kd + 1.0)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > detail::kRescaleUp) {
            cur *= detail::kRescaleDown;
            prev *= detail::kRescaleDown;
            ++p;
        }
    }
    return {sg.to_value(cur, p), sg.to_value(prev, p)};
}

inline double oscillator_phi(std::size_t k, double x) { return oscillator_pair(k, x).phi; }

/// Ladder relation phi_k' = -x phi_k + sqrt(2k) phi_{k-1}.
inline double oscillator_phi_prime(std::size_t k, double x) {
    const auto pr = oscillator_pair(k, x);
    return -x * pr.phi + std::sqrt(2.0 * static_cast<double>(k)) * pr.phi_prev;
}

/// phi_0(x) .. phi_n(x).
inline std::vector<double> oscillator_table(std::size_t n, double x) {
    detail::require_finite(x, "oscillator_table");
    std::vector<double> out(n + 1);
    const detail::ScaledGaussian sg(x);
    double prev = 0.0, cur = detail::kPiMinusQuarter;
    int p = 0;
    out[0] = sg.to_value(cur, p);
    for (std::size_t k = 0; k < n; ++k) {
        const double kd = static_cast<double>(k);
        const double next = x * std::sqrt(2.0 / (kd + 1.0)) * cur - std::sqrt(kd / (kd + 1.0)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > detail::kRescaleUp) {
            cur *= detail::kRescaleDown;
            prev *= detail::kRescaleDown;
            ++p;
        }
        out[k + 1] = sg.to_value(cur, p);
    }
    return out;
}

/// Scaled complementary error function e^{z^2} erfc(z), z >= 0.
inline double erfcx(double z) {
    if (z < 4.0) return std::exp(z * z) * std::erfc(z);
    // continued fraction 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    double k = z;
    for (int n = 80; n >= 1; --n) k = z + 0.5 * n / k;
    return 1.0 / (std::sqrt(std::numbers::pi) * k);
}

/// Full-line integral of phi_k: zero for odd k, sqrt(2) pi^{1/4} sqrt((2j)!)/(2^j j!) for k = 2j.
inline double oscillator_integral(std::size_t k) {
    if (k % 2) return 0.0;
    const double j = static_cast<double>(k / 2);
    const double lg = 0.5 * std::lgamma(2.0 * j + 1.0) - j * std::numbers::ln2 - std::lgamma(j + 1.0);
    return std::sqrt(2.0) * std::pow(std::numbers::pi, 0.25) * std::exp(lg);
}

struct HermiteTails {
    std::vector<double> phi;   // phi_k(x)
    std::vector<double> tail;  // integral of phi_k over [x, inf)
};

/// phi_k(x) and their right-tail integrals for k = 0..n. The tails obey
/// T_{k+1} = sqrt(k/(k+1)) T_{k-1} + sqrt(2/(k+1)) phi_k(x), T_0 = pi^{-1/4} sqrt(pi/2) erfc(x/sqrt 2),
/// T_1 = sqrt(2) phi_0(x); for x < 0 the reflection phi_k(-x) = (-1)^k phi_k(x) is used.
inline HermiteTails hermite_tails(std::size_t n, double x) {
    detail::require_finite(x, "hermite_tails");
    if (x < 0.0) {
        auto r = hermite_tails(n, -x);
        for (std::size_t k = 0; k <= n; ++k) {
            const double sign = (k % 2) ? -1.0 : 1.0;
            r.phi[k] *= sign;
            r.tail[k] = oscillator_integral(k) - sign * r.tail[k];
        }
        return r;
    }
    HermiteTails out{std::vector<double>(n + 1), std::vector<double>(n + 1)};
    const detail::ScaledGaussian sg(x);
    const double c0 = detail::kPiMinusQuarter;
    double phi_prev = 0.0, phi_cur = c0;
    double tail_prev = 0.0;
    double tail_cur = c0 * std::sqrt(std::numbers::pi / 2.0) * erfcx(x / std::numbers::sqrt2);
    int p = 0;
    out.phi[0] = sg.to_value(phi_cur, p);
    out.tail[0] = sg.to_value(tail_cur, p);
    for (std::size_t k = 0; k < n; ++k) {
        const double kd = static_cast<double>(k);
        const double phi_next =
            x * std::sqrt(2.0 / (kd + 1.0)) * phi_cur - std::sqrt(kd / (kd + 1.0)) * phi_prev;
        const double tail_next = std::sqrt(kd / (kd + 1.0)) * tail_prev + std::sqrt(2.0 / (kd + 1.0)) * phi_cur;
        phi_prev = phi_cur;
        phi_cur = phi_next;
        tail_prev = tail_cur;
        tail_cur = tail_next;
        if (std::max(std::abs(phi_cur), std::abs(tail_cur)) > detail::kRescaleUp) {
            phi_cur *= detail::kRescaleDown;
            phi_prev *= detail::kRescaleDown;
            tail_cur *= detail::kRescaleDown;
            tail_prev *= detail::kRescaleDown;
            ++p;
        }
        out.phi[k + 1] = sg.to_value(phi_cur, p);
        out.tail[k + 1] = sg.to_value(tail_cur, p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Wave context and centering constants.

struct WaveContext {
    int N = 1;
    double u_N = 0;        // sqrt(2N+1)
    double u_Nm1 = 0;      // sqrt(2N-1)
    double tau_N = 0;      // 2^{-1/2} N^{-1/6}
    double delta_N = 0;    // (u_N - u_{N-1}) / tau_N
    std::optional<double> beta_Nm1;  // half the integral of psi_tau; only for N-1 even
    double kappa_N = 0;    // 2N+1
    double kappa_Nm1 = 0;  // 2N-1
};

inline double tau_of(double n) { return std::pow(n, -1.0 / 6.0) / std::numbers::sqrt2; }

/// (pi N/2)^{1/4} sqrt((N-1)!) / (2^{(N-1)/2} ((N-1)/2)!), via log-gamma. Requires N-1 even.
inline std::optional<double> beta_constant(int N) {
    if (N < 1 || (N - 1) % 2 != 0) return std::nullopt;
    const double n = N;
    const double lg = 0.25 * std::log(std::numbers::pi * n / 2.0) + 0.5 * std::lgamma(n) -
                      0.5 * (n - 1.0) * std::numbers::ln2 - std::lgamma((n + 1.0) / 2.0);
    return std::exp(lg);
}

inline WaveContext wave_context(int N) {
    if (N < 1) throw domain_error("wave_context: N must be >= 1");
    WaveContext w;
    w.N = N;
    w.kappa_N = 2.0 * N + 1.0;
    w.kappa_Nm1 = 2.0 * N - 1.0;
    w.u_N = std::sqrt(w.kappa_N);
    w.u_Nm1 = std::sqrt(w.kappa_Nm1);
    w.tau_N = tau_of(N);
    w.delta_N = 2.0 / (w.u_N + w.u_Nm1) / w.tau_N;
    w.beta_Nm1 = beta_constant(N);
    return w;
}

enum class Ensemble { GUE, GOE };
enum class Variant { theorem, averaged, tuned };

inline const char* to_string(Ensemble e) { return e == Ensemble::GUE ? "GUE" : "GOE"; }
inline const char* to_string(Variant v) {
    switch (v) {
        case Variant::theorem: return "theorem";
        case Variant::averaged: return "averaged";
        case Variant::tuned: return "tuned";
    }
    return "?";
}

struct CenteringSpec {
    Ensemble ensemble = Ensemble::GUE;
    Variant variant = Variant::theorem;
    double gamma = 0.2;  // tuned GOE only
    double c = 1.0;      // tuned GOE only
};

struct Scaling {
    double mu;
    double tau;
};

/// Centering mu_N and scale tau_N for the chosen ensemble/variant. GOE constants
/// carry subscript N for a matrix of size N+1.
inline Scaling centering(const CenteringSpec& spec, int N) {
    if (N < 1) throw usage_error("centering: N must be >= 1");
    const double n = N;
    switch (spec.variant) {
        case Variant::theorem:
            if (spec.ensemble == Ensemble::GUE) return {std::sqrt(2.0 * n), tau_of(n)};
            return {std::sqrt(2.0 * n + 1.0), tau_of(n)};
        case Variant::averaged:
            if (spec.ensemble != Ensemble::GUE) throw usage_error("averaged centering is defined for GUE only");
            return {(std::sqrt(2.0 * n - 1.0) + std::sqrt(2.0 * n + 1.0)) / 2.0, tau_of(n)};
        case Variant::tuned: {
            if (spec.ensemble != Ensemble::GOE) throw usage_error("tuned centering is defined for GOE only");
            const double np = n + 0.5;
            const double arg = 2.0 * np - spec.gamma * std::pow(np, -1.0 / 3.0);
            if (!(arg > 0.0)) throw usage_error("tuned centering: gamma too large for this N");
            if (!(n + spec.c > 0.0)) throw usage_error("tuned centering: N + c must be positive");
            return {std::sqrt(arg), tau_of(n + spec.c)};
        }
    }
    throw usage_error("centering: unknown variant");
}

}  // namespace twedge::specfun
