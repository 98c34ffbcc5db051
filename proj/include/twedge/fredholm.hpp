#pragma once
// Nyström Fredholm determinants, Tracy-Widom CDFs/quantiles and finite-N edge CDFs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "twedge/errors.hpp"
#include "twedge/kernels.hpp"
#include "twedge/quadrature.hpp"
#include "twedge/specfun.hpp"

namespace twedge::fredholm {

using kernels::MatrixKernel2;
using kernels::ScalarKernel;

struct CdfResult {
    double value = 0.0;
    int m = 0;
    double convergence = 0.0;  // |value_m - value_{m/2}|
    bool flagged = false;      // convergence above the accuracy contract, or argument clamped
};

inline constexpr double kAccuracyFlag = 1e-6;

/// Symmetrized Nyström matrix sqrt(w_i w_j) K(s_i, s_j) on (s0, inf).
inline Eigen::MatrixXd nystrom_matrix(const ScalarKernel& kernel, const QuadratureRule& rule) {
    const auto n = static_cast<Eigen::Index>(rule.size());
    Eigen::MatrixXd k = kernel.matrix(rule.nodes);
    Eigen::VectorXd sw(n);
    for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(rule.weights[i]);
    return sw.asDiagonal() * k * sw.asDiagonal();
}

/// det(I - K) on (s0, inf) with an m-node rule.
inline double det_scalar(const ScalarKernel& kernel, double s0, int m) {
    const auto rule = semi_infinite_rule(s0, m);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m) - nystrom_matrix(kernel, rule);
    return a.partialPivLu().determinant();
}

inline CdfResult fredholm_det_scalar(const ScalarKernel& kernel, double s0, int m) {
    if (m < 8) throw usage_error("fredholm_det_scalar: m must be >= 8");
    CdfResult r;
    r.m = m;
    r.value = det_scalar(kernel, s0, m);
    r.convergence = std::abs(r.value - det_scalar(kernel, s0, m / 2));
    r.flagged = r.convergence > kAccuracyFlag;
    return r;
}

/// How the -sgn(s-t)/2 term of entry (2,1) enters the discretization.
enum class SignTreatment {
    reduced,  // eliminated analytically by a block row operation (smooth entries only)
    sampled,  // sampled at node pairs as sgn(s_i - s_j)/2, zero on the diagonal
};

// Beyond this |s| the weight is held constant (still a similarity, avoids overflow).
inline constexpr double kWeightCap = 60.0;

/// 2m x 2m Nyström matrix of a matrix kernel, conjugated by diag(e^{g|s|/2}, e^{-g|s|/2}) and
/// sqrt(w); both are similarities so the determinant is unchanged.
inline Eigen::MatrixXd nystrom_block(const MatrixKernel2& kernel, const QuadratureRule& rule, double gamma,
                                     SignTreatment treatment) {
    const auto m = static_cast<Eigen::Index>(rule.size());
    kernels::BlockMatrices b;
    if (treatment == SignTreatment::reduced && kernel.has_eps) {
        auto pts = rule.nodes;
        pts.push_back(rule.lo);
        b = kernels::assemble_reduced_blocks(kernel.ingredients(pts));
    } else {
        b = kernels::assemble_blocks(kernel.ingredients(rule.nodes));
        if (kernel.has_eps) {
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < m; ++j)
                    if (i != j) b.k21(i, j) -= rule.nodes[i] > rule.nodes[j] ? 0.5 : -0.5;
        }
    }
    Eigen::VectorXd sw(m), up(m), down(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        sw(i) = std::sqrt(rule.weights[i]);
        up(i) = std::exp(0.5 * gamma * std::min(std::abs(rule.nodes[i]), kWeightCap));
        down(i) = 1.0 / up(i);
    }
    const Eigen::VectorXd r1 = (sw.array() * up.array()).matrix(), r2 = (sw.array() * down.array()).matrix();
    const Eigen::VectorXd c1 = (sw.array() * down.array()).matrix(), c2 = (sw.array() * up.array()).matrix();
    Eigen::MatrixXd out(2 * m, 2 * m);
    out.topLeftCorner(m, m) = r1.asDiagonal() * b.k11 * c1.asDiagonal();
    out.topRightCorner(m, m) = r1.asDiagonal() * b.k12 * c2.asDiagonal();
    out.bottomLeftCorner(m, m) = r2.asDiagonal() * b.k21 * c1.asDiagonal();
    out.bottomRightCorner(m, m) = r2.asDiagonal() * b.k22 * c2.asDiagonal();
    return out;
}

inline constexpr double kNegativeDetTolerance = 1e-8;

/// det(I - K) for a 2x2 matrix kernel on (s0, inf); tiny negative values are clamped to 0.
inline double det_block(const MatrixKernel2& kernel, double s0, int m, double gamma = 1.0,
                        SignTreatment treatment = SignTreatment::reduced) {
    if (!(gamma >= 0.0 && gamma < 2.0)) throw usage_error("fredholm_det_block2: gamma must lie in [0, 2)");
    const auto rule = semi_infinite_rule(s0, m);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2 * m, 2 * m) - nystrom_block(kernel, rule, gamma, treatment);
    const double d = a.partialPivLu().determinant();
    if (d < -kNegativeDetTolerance) throw numerical_failure("block determinant is negative: " + std::to_string(d));
    return std::max(d, 0.0);
}

inline CdfResult fredholm_det_block2(const MatrixKernel2& kernel, double s0, int m, double gamma = 1.0,
                                     SignTreatment treatment = SignTreatment::reduced) {
    if (m < 8) throw usage_error("fredholm_det_block2: m must be >= 8");
    CdfResult r;
    r.m = m;
    r.value = det_block(kernel, s0, m, gamma, treatment);
    r.convergence = std::abs(r.value - det_block(kernel, s0, m / 2, gamma, treatment));
    r.flagged = r.convergence > kAccuracyFlag;
    return r;
}

/// Sum of singular values of the symmetrized Nyström matrix.
inline double trace_norm(const ScalarKernel& kernel, double s0, int m) {
    const auto rule = semi_infinite_rule(s0, m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(nystrom_matrix(kernel, rule));
    return svd.singularValues().sum();
}

// ---------------------------------------------------------------------------
// Tracy-Widom laws.

inline constexpr double kTwLo = -12.0;
inline constexpr double kTwHi = 10.0;

namespace detail {

inline double tw_det(int beta, double s, int m) {
    if (beta == 2) {
        static const ScalarKernel airy = kernels::airy_scalar_kernel();
        return det_scalar(airy, s, m);
    }
    static const MatrixKernel2 goe = kernels::goe_matrix_kernel_limit();
    return std::sqrt(det_block(goe, s, m));
}

}  // namespace detail

/// F_beta(s) with m doubled from 24 until successive values agree to 1e-8 (beta = 2) or
/// 1e-6 (beta = 1); s outside [-12, 10] is clamped and flagged.
inline CdfResult tw_cdf_result(int beta, double s) {
    if (beta != 1 && beta != 2) throw usage_error("tw_cdf: beta must be 1 or 2");
    specfun::detail::require_finite(s, "tw_cdf");
    CdfResult r;
    if (s < kTwLo || s > kTwHi) {
        r.flagged = true;
        s = std::clamp(s, kTwLo, kTwHi);
    }
    const double tol = beta == 2 ? 1e-8 : 1e-6;
    int m = 24;
    double prev = detail::tw_det(beta, s, m);
    for (;;) {
        const int next = 2 * m;
        const double cur = detail::tw_det(beta, s, next);
        r.value = cur;
        r.m = next;
        r.convergence = std::abs(cur - prev);
        if (r.convergence < tol * 1e-1 || next >= 384) break;
        prev = cur;
        m = next;
    }
    if (r.convergence > tol) r.flagged = true;
    r.value = std::clamp(r.value, 0.0, 1.0);
    return r;
}

inline double tw_cdf(int beta, double s) { return tw_cdf_result(beta, s).value; }

/// Generic bracketed root of F(s) = alpha on [lo, hi], F nondecreasing: secant steps
/// safeguarded by bisection.
template <class F>
double invert_cdf(F&& cdf, double alpha, double lo, double hi, double tol = 1e-8) {
    double flo = cdf(lo) - alpha, fhi = cdf(hi) - alpha;
    if (flo > 0.0 || fhi < 0.0) throw usage_error("quantile: alpha outside the bracket's CDF range");
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double cand = fhi != flo ? hi - fhi * (hi - lo) / (fhi - flo) : 0.5 * (lo + hi);
        // fall back to bisection when the secant step lands near an end
        const double w = hi - lo;
        if (!(cand > lo + 0.05 * w && cand < hi - 0.05 * w)) cand = 0.5 * (lo + hi);
        x = cand;
        const double fx = cdf(x) - alpha;
        if (std::abs(fx) <= tol) return x;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (hi - lo < 1e-13) return x;
    }
    return x;
}

/// s with F_beta(s) = alpha, to |F - alpha| <= 1e-8. Results are memoized.
inline double tw_quantile(int beta, double alpha) {
    if (beta != 1 && beta != 2) throw usage_error("tw_quantile: beta must be 1 or 2");
    if (!(alpha >= 1e-6 && alpha <= 1.0 - 1e-6)) throw usage_error("tw_quantile: alpha must lie in [1e-6, 1-1e-6]");
    static std::mutex mu;
    static std::map<std::pair<int, double>, double> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find({beta, alpha}); it != cache.end()) return it->second;
    }
    const double q = invert_cdf([beta](double s) { return tw_cdf(beta, s); }, alpha, kTwLo, kTwHi);
    std::lock_guard<std::mutex> lock(mu);
    cache[{beta, alpha}] = q;
    return q;
}

// ---------------------------------------------------------------------------
// Finite-N laws.

inline constexpr int kDefaultNodes = 160;

/// P{(x_max - mu)/tau <= s0}: GUE of size N, or GOE of size N+1 (constants indexed by N).
inline CdfResult finite_cdf(specfun::Ensemble ensemble, int N, const specfun::CenteringSpec& spec, double s0,
                            int m = kDefaultNodes, double gamma = 1.0) {
    if (spec.ensemble != ensemble) throw usage_error("finite_cdf: centering spec is for a different ensemble");
    if (ensemble == specfun::Ensemble::GUE) {
        auto r = fredholm_det_scalar(kernels::rescaled_gue_scalar_kernel(N, spec), s0, m);
        r.value = std::clamp(r.value, 0.0, 1.0);
        return r;
    }
    const auto kernel = kernels::goe_matrix_kernel_finite(N, spec);
    CdfResult r;
    r.m = m;
    r.value = std::sqrt(det_block(kernel, s0, m, gamma));
    r.convergence = std::abs(r.value - std::sqrt(det_block(kernel, s0, m / 2, gamma)));
    r.flagged = r.convergence > kAccuracyFlag;
    r.value = std::min(r.value, 1.0);
    return r;
}

}  // namespace twedge::fredholm
