#pragma once
// Two-point kernels: finite-N GUE, the Airy kernel, and the 2x2 GOE matrix kernels
// (finite N and the edge limit), with the right-tail and diamond integrals they use.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "twedge/errors.hpp"
#include "twedge/quadrature.hpp"
#include "twedge/specfun.hpp"

namespace twedge::kernels {

using specfun::CenteringSpec;
using specfun::Ensemble;
using specfun::Scaling;

struct KernelMeta {
    Ensemble ensemble = Ensemble::GUE;
    std::string variant = "limit";
    int N = 0;  // 0 for the edge limit
    double mu = 0.0;
    double tau = 1.0;
};

// ---------------------------------------------------------------------------
// Diamond product and tail integrals.

/// (a <> b)(s,t) = integral over z >= 0 of a(s+z) b(t+z). The ray is split into
/// panels up to `zc` (past every oscillation) and a mapped tail beyond.
template <class A, class B>
double diamond(A&& a, B&& b, double s, double t, double zc, int per_panel = 20) {
    auto run = [&](int pp) {
        const auto rule = fredholm::ray_rule(zc, pp, 2 * pp + 8);
        double sum = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) sum += rule.weights[k] * a(s + rule.nodes[k]) * b(t + rule.nodes[k]);
        return sum;
    };
    const double coarse = run(per_panel);
    const double fine = run(2 * per_panel);
    if (std::abs(fine - coarse) > 1e-8 * std::max(1.0, std::abs(fine)))
        throw accuracy_error("diamond: quadrature did not converge");
    return fine;
}

/// Diamond product with the oscillation cutoff chosen for Airy-type factors.
template <class A, class B>
double diamond(A&& a, B&& b, double s, double t) {
    return diamond(a, b, s, t, std::max(0.0, -std::min(s, t)) + 6.0);
}

// ---------------------------------------------------------------------------
// Airy kernel.

namespace detail {

// h^{(n)}(s) for h(t) = Ai(s) Ai'(t) - Ai'(s) Ai(t), n = 0..count-1, using
// Ai^{(n)} = p_n Ai + q_n Ai' with p_{n+1} = p_n' + s q_n, q_{n+1} = p_n + q_n'.
inline std::vector<double> airy_cross_derivatives(double s, double ai, double aip, int count) {
    using Poly = std::vector<double>;
    auto eval = [s](const Poly& p) {
        double v = 0.0;
        for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * s + *it;
        return v;
    };
    auto deriv = [](const Poly& p) {
        Poly d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
        for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = i * p[i];
        return d;
    };
    auto add = [](Poly x, const Poly& y) {
        if (y.size() > x.size()) x.resize(y.size(), 0.0);
        for (std::size_t i = 0; i < y.size(); ++i) x[i] += y[i];
        return x;
    };
    auto shift = [](const Poly& p) {  // s * p
        Poly r(p.size() + 1, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) r[i + 1] = p[i];
        return r;
    };
    std::vector<Poly> p{{1.0}}, q{{0.0}};
    for (int n = 0; n <= count; ++n) {
        p.push_back(add(deriv(p[n]), shift(q[n])));
        q.push_back(add(p[n], deriv(q[n])));
    }
    std::vector<double> h(count);
    for (int n = 0; n < count; ++n) {
        h[n] = eval(p[n + 1]) * ai * ai + (eval(q[n + 1]) - eval(p[n])) * ai * aip - eval(q[n]) * aip * aip;
    }
    return h;
}

inline constexpr double kAiryNearDiagonal = 0.05;
inline constexpr int kAirySeriesTerms = 18;

struct AiryKernelValue {
    double value, dt;
};

inline AiryKernelValue airy_kernel_both(double s, double t) {
    const auto as = specfun::airy(s);
    const double d = t - s;
    if (std::abs(d) < kAiryNearDiagonal) {
        const auto h = airy_cross_derivatives(s, as.ai, as.aip, kAirySeriesTerms);
        // S = -sum_{n>=1} h^{(n)} d^{n-1}/n!,  d_t S = -sum_{n>=2} (n-1) h^{(n)} d^{n-2}/n!
        double v = 0.0, dv = 0.0, fact = 1.0, dp = 1.0, dq = 1.0;
        for (int n = 1; n < kAirySeriesTerms; ++n) {
            fact *= n;
            v -= h[n] * dp / fact;
            dp *= d;
            if (n >= 2) {
                dv -= h[n] * (n - 1) * dq / fact;
                dq *= d;
            }
        }
        return {v, dv};
    }
    const auto at = specfun::airy(t);
    const double num = as.ai * at.aip - as.aip * at.ai;
    const double diff = s - t;
    const double dnum = as.ai * t * at.ai - as.aip * at.aip;
    return {num / diff, (dnum * diff + num) / (diff * diff)};
}

}  // namespace detail

/// S_A(s,t) = (Ai(s)Ai'(t) - Ai'(s)Ai(t)) / (s - t), diagonal Ai'(s)^2 - s Ai(s)^2.
inline double airy_kernel(double s, double t) {
    if (s < -40.0 || t < -40.0) throw domain_error("airy_kernel: arguments must be >= -40");
    return detail::airy_kernel_both(s, t).value;
}

/// Partial derivative of S_A in its second argument; -Ai(s)^2/2 on the diagonal.
inline double airy_kernel_dt(double s, double t) {
    if (s < -40.0 || t < -40.0) throw domain_error("airy_kernel_dt: arguments must be >= -40");
    return detail::airy_kernel_both(s, t).dt;
}

/// E(i,j) = integral over [s_i, inf) of S_A(u, t_j) du, written as (tail-Ai <> Ai)(s_i, t_j)
/// on one shared ray rule so the whole block is a single matrix product.
inline Eigen::MatrixXd airy_kernel_tail_s(const std::vector<double>& s, const std::vector<double>& t) {
    double lo = 0.0;
    for (double v : s) lo = std::min(lo, v);
    for (double v : t) lo = std::min(lo, v);
    const auto rule = fredholm::ray_rule(-lo + 6.0, 24, 56);
    const auto K = static_cast<Eigen::Index>(rule.size());
    Eigen::MatrixXd left(static_cast<Eigen::Index>(s.size()), K), right(static_cast<Eigen::Index>(t.size()), K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const double z = rule.nodes[k], w = rule.weights[k];
        for (std::size_t i = 0; i < s.size(); ++i) left(i, k) = w * specfun::airy_tail_integral(s[i] + z);
        for (std::size_t j = 0; j < t.size(); ++j) right(j, k) = specfun::airy_ai(t[j] + z);
    }
    return left * right.transpose();
}

// ---------------------------------------------------------------------------
// Finite-N GUE kernel.

enum class GueMethod { sum, cd, diamond };

namespace detail {

inline double gue_sum(int N, double x, double y) {
    const auto px = specfun::oscillator_table(N - 1, x);
    const auto py = specfun::oscillator_table(N - 1, y);
    double s = 0.0;
    for (int k = 0; k < N; ++k) s += px[k] * py[k];
    return s;
}

inline constexpr double kGueNearDiagonal = 1e-2;

}  // namespace detail

/// S_{N,2}(x,y) = sum_{k<N} phi_k(x) phi_k(y), by the chosen representation.
inline double gue_kernel(int N, double x, double y, GueMethod method = GueMethod::cd) {
    if (N < 1) throw domain_error("gue_kernel: N must be >= 1");
    const double rn = std::sqrt(N / 2.0);
    switch (method) {
        case GueMethod::sum:
            return detail::gue_sum(N, x, y);
        case GueMethod::cd: {
            if (std::abs(x - y) < detail::kGueNearDiagonal) return detail::gue_sum(N, x, y);
            const auto px = specfun::oscillator_pair(N, x);
            const auto py = specfun::oscillator_pair(N, y);
            return rn * (px.phi * py.phi_prev - px.phi_prev * py.phi) / (x - y);
        }
        case GueMethod::diamond: {
            const double c = std::pow(2.0 * N, 0.25);
            auto phi = [&](double u) { return c * specfun::oscillator_phi(N, u); };
            auto psi = [&](double u) { return c * specfun::oscillator_phi(N - 1, u); };
            const double zc = std::max(0.0, std::sqrt(2.0 * N + 1.0) + 8.0 - std::min(x, y));
            const int pp = 20 + static_cast<int>(4.0 * std::sqrt(static_cast<double>(N)));
            return 0.5 * (diamond(phi, psi, x, y, zc, pp) + diamond(psi, phi, x, y, zc, pp));
        }
    }
    throw usage_error("gue_kernel: unknown method");
}

/// S_tau(s,t) = tau S_{N,2}(mu + tau s, mu + tau t).
inline double rescaled_gue_kernel(int N, const CenteringSpec& spec, double s, double t) {
    const auto sc = specfun::centering(spec, N);
    return sc.tau * gue_kernel(N, sc.mu + sc.tau * s, sc.mu + sc.tau * t);
}

// ---------------------------------------------------------------------------
// Scalar kernels as Nyström-ready objects.

struct ScalarKernel {
    KernelMeta meta;
    std::function<double(double, double)> eval;
    // K(p_i, p_j) for a whole point set at once; falls back to eval when empty.
    std::function<Eigen::MatrixXd(const std::vector<double>&)> gram;

    Eigen::MatrixXd matrix(const std::vector<double>& pts) const {
        if (gram) return gram(pts);
        const auto n = static_cast<Eigen::Index>(pts.size());
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = eval(pts[i], pts[j]);
        return m;
    }
};

inline ScalarKernel airy_scalar_kernel() {
    ScalarKernel k;
    k.meta = KernelMeta{Ensemble::GUE, "limit", 0, 0.0, 1.0};
    k.eval = [](double s, double t) { return airy_kernel(s, t); };
    return k;
}

/// tau S_{N,2}(mu + tau s, mu + tau t) for an explicit (mu, tau); the Gram matrix is
/// Phi Phi^T with Phi the table of phi_0..phi_{N-1} at the mapped points.
inline ScalarKernel gue_scaled_kernel(int N, Scaling sc, std::string variant = "custom") {
    if (N < 1) throw domain_error("gue kernel: N must be >= 1");
    ScalarKernel k;
    k.meta = KernelMeta{Ensemble::GUE, std::move(variant), N, sc.mu, sc.tau};
    k.eval = [N, sc](double s, double t) { return sc.tau * gue_kernel(N, sc.mu + sc.tau * s, sc.mu + sc.tau * t); };
    k.gram = [N, sc](const std::vector<double>& pts) {
        const auto n = static_cast<Eigen::Index>(pts.size());
        Eigen::MatrixXd phi(n, N);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto row = specfun::oscillator_table(N - 1, sc.mu + sc.tau * pts[i]);
            for (int j = 0; j < N; ++j) phi(i, j) = row[j];
        }
        Eigen::MatrixXd g = sc.tau * (phi * phi.transpose());
        return g;
    };
    return k;
}

inline ScalarKernel rescaled_gue_scalar_kernel(int N, const CenteringSpec& spec) {
    return gue_scaled_kernel(N, specfun::centering(spec, N), specfun::to_string(spec.variant));
}

// ---------------------------------------------------------------------------
// GOE scalar kernel.

/// (eps psi)(y) = beta_{N-1} - integral of psi over [y, inf), psi = (2N)^{1/4} phi_{N-1}.
inline double eps_psi(int N, double y) {
    const auto beta = specfun::beta_constant(N);
    if (!beta) throw usage_error("eps_psi: N-1 must be even");
    const auto ht = specfun::hermite_tails(N - 1, y);
    return *beta - std::pow(2.0 * N, 0.25) * ht.tail[N - 1];
}

/// S_{N+1,1}(x,y) = S_{N,2}(x,y) + phi(x) (eps psi)(y) / 2, phi = (2N)^{1/4} phi_N.
inline double goe_scalar_kernel(int N, double x, double y) {
    if (!specfun::beta_constant(N)) throw usage_error("goe_scalar_kernel: N-1 must be even");
    const double phi = std::pow(2.0 * N, 0.25) * specfun::oscillator_phi(N, x);
    return gue_kernel(N, x, y) + 0.5 * phi * eps_psi(N, y);
}

// ---------------------------------------------------------------------------
// 2x2 GOE matrix kernels.
//
// Both kernels share one shape, built from a core C(s,t) = S(s,t) - a(s) eb(t)/2 where S is
// a symmetric kernel with (d_s + d_t) S = -(a(s) b(t) + b(s) a(t))/2, a and b are the two
// edge waves, ea and eb their right-tail integrals, and beta a constant:
//   K11 = C(s,t) + beta a(s)/2            K12 = -d_t C(s,t)
//   K21 = -I_s C(s,t) - beta ea(s)/2 + beta ea(t)/2 - eps(s-t)
//   K22 = C(t,s) + beta a(t)/2
// with I_s the right-tail integral in the first argument.

struct GoeIngredients {
    Eigen::VectorXd a, b, ea, eb;
    Eigen::MatrixXd S, dS, tailS;  // S(p_i,p_j), d_t S(p_i,p_j), I_s S(p_i,p_j)
    double beta = 1.0;
};

struct BlockMatrices {
    Eigen::MatrixXd k11, k12, k21, k22;
};

/// Entries at all point pairs; k21 excludes the -eps(s-t) term.
inline BlockMatrices assemble_blocks(const GoeIngredients& g) {
    const double hb = 0.5 * g.beta;
    const auto n = g.a.size();
    const Eigen::MatrixXd C = g.S - 0.5 * g.a * g.eb.transpose();
    const Eigen::MatrixXd tailC = g.tailS - 0.5 * g.ea * g.eb.transpose();
    const Eigen::MatrixXd dC = g.dS + 0.5 * g.a * g.b.transpose();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    BlockMatrices out;
    out.k11 = C + hb * g.a * ones.transpose();
    out.k12 = -dC;
    out.k21 = -tailC - hb * g.ea * ones.transpose() + hb * ones * g.ea.transpose();
    out.k22 = C.transpose() + hb * ones * g.a.transpose();
    return out;
}

/// Entries after the row operation row2 -= E row1, E the integral operator with kernel
/// -sgn(s-u)/2 on (s0, inf). The ingredient points are the m nodes followed by s0 itself.
/// The new lower-left block becomes beta ea(t)/2 - T11(s0,t)/2 (constant in s), and the
/// lower-right block K22 - T12(s0,t)/2 + T12(s,t), with T1j(s,t) the right-tail integral of
/// K1j in its first argument:
///   T11(s,t) = I_s C(s,t) + beta ea(s)/2,   T12(s,t) = -S(s,t) + eb(s) a(t)/2.
inline BlockMatrices assemble_reduced_blocks(const GoeIngredients& g) {
    const auto n = g.a.size();
    const auto m = n - 1;
    const double hb = 0.5 * g.beta;
    const auto full = assemble_blocks(g);
    const Eigen::MatrixXd tailC = g.tailS - 0.5 * g.ea * g.eb.transpose();
    const Eigen::MatrixXd T12 = -g.S + 0.5 * g.eb * g.a.transpose();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    Eigen::RowVectorXd tail11_s0 = tailC.row(m).head(m).array() + hb * g.ea(m);
    BlockMatrices out;
    out.k11 = full.k11.topLeftCorner(m, m);
    out.k12 = full.k12.topLeftCorner(m, m);
    out.k21 = ones * (hb * g.ea.head(m).transpose() - 0.5 * tail11_s0);
    out.k22 = full.k22.topLeftCorner(m, m) - 0.5 * ones * T12.row(m).head(m) + T12.topLeftCorner(m, m);
    return out;
}

struct MatrixKernel2 {
    KernelMeta meta;
    bool has_eps = true;  // entry (2,1) carries -eps(s-t) = -sgn(s-t)/2 on top of k21
    std::function<GoeIngredients(const std::vector<double>&)> ingredients;

    double entry(int row, int col, double s, double t) const {
        const auto b = assemble_blocks(ingredients({s, t}));
        const Eigen::MatrixXd& mat = row == 1 ? (col == 1 ? b.k11 : b.k12) : (col == 1 ? b.k21 : b.k22);
        return mat(0, 1);
    }
    double k11(double s, double t) const { return entry(1, 1, s, t); }
    double k12(double s, double t) const { return entry(1, 2, s, t); }
    double k21(double s, double t) const { return entry(2, 1, s, t); }  // smooth part
    double k22(double s, double t) const { return entry(2, 2, s, t); }
};

/// Edge-limit matrix kernel: S = S_A, a = b = Ai, ea = eb = tail of Ai, beta = 1.
inline MatrixKernel2 goe_matrix_kernel_limit() {
    MatrixKernel2 k;
    k.meta = KernelMeta{Ensemble::GOE, "limit", 0, 0.0, 1.0};
    k.ingredients = [](const std::vector<double>& pts) {
        const auto n = static_cast<Eigen::Index>(pts.size());
        GoeIngredients g;
        g.beta = 1.0;
        g.a.resize(n);
        g.ea.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            g.a(i) = specfun::airy_ai(pts[i]);
            g.ea(i) = specfun::airy_tail_integral(pts[i]);
        }
        g.b = g.a;
        g.eb = g.ea;
        g.S.resize(n, n);
        g.dS.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const auto v = detail::airy_kernel_both(pts[i], pts[j]);
                g.S(i, j) = v.value;
                g.dS(i, j) = v.dt;
            }
        }
        g.tailS = airy_kernel_tail_s(pts, pts);
        return g;
    };
    return k;
}

/// Finite-N matrix kernel for a GOE matrix of size N+1 under the given centering, at
/// x = mu + tau s: S = tau S_{N,2}, a = tau (2N)^{1/4} phi_N, b = tau (2N)^{1/4} phi_{N-1},
/// ea, eb their tails, beta = beta_{N-1}; I_s S(s,t) = sum_{k<N} Phi_k(x) phi_k(y) with Phi_k
/// the right tail of phi_k.
inline MatrixKernel2 goe_matrix_kernel_finite(int N, const CenteringSpec& spec) {
    if (spec.ensemble != Ensemble::GOE) throw usage_error("goe_matrix_kernel_finite: spec must be GOE");
    const auto beta = specfun::beta_constant(N);
    if (!beta) throw usage_error("goe_matrix_kernel_finite: N-1 must be even (matrix size N+1 even)");
    const auto sc = specfun::centering(spec, N);
    MatrixKernel2 k;
    k.meta = KernelMeta{Ensemble::GOE, specfun::to_string(spec.variant), N, sc.mu, sc.tau};
    const double bval = *beta;
    k.ingredients = [N, sc, bval](const std::vector<double>& pts) {
        const auto n = static_cast<Eigen::Index>(pts.size());
        const double c = std::pow(2.0 * N, 0.25);
        GoeIngredients g;
        g.beta = bval;
        g.a.resize(n);
        g.b.resize(n);
        g.ea.resize(n);
        g.eb.resize(n);
        Eigen::MatrixXd phi(n, N), dphi(n, N), tail(n, N);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = sc.mu + sc.tau * pts[i];
            const auto ht = specfun::hermite_tails(N, x);
            for (int j = 0; j < N; ++j) {
                phi(i, j) = ht.phi[j];
                dphi(i, j) = -x * ht.phi[j] + (j > 0 ? std::sqrt(2.0 * j) * ht.phi[j - 1] : 0.0);
                tail(i, j) = ht.tail[j];
            }
            g.a(i) = sc.tau * c * ht.phi[N];
            g.b(i) = sc.tau * c * ht.phi[N - 1];
            g.ea(i) = c * ht.tail[N];
            g.eb(i) = c * ht.tail[N - 1];
        }
        g.S = sc.tau * (phi * phi.transpose());
        g.dS = sc.tau * sc.tau * (phi * dphi.transpose());
        g.tailS = tail * phi.transpose();
        return g;
    };
    return k;
}

}  // namespace twedge::kernels
