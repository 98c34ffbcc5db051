#pragma once
// Largest-eigenvalue sampling for GOE/GUE (dense and tridiagonal models) and Monte Carlo
// estimates of the rescaled edge law.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "twedge/errors.hpp"
#include "twedge/fredholm.hpp"
#include "twedge/specfun.hpp"

namespace twedge::ensembles {

using specfun::Ensemble;

enum class Model { automatic, dense, tridiagonal };

inline constexpr int kDenseLimit = 64;  // automatic model switches to tridiagonal above this size

struct SampleConfig {
    Ensemble ensemble = Ensemble::GOE;
    int n = 2;  // matrix dimension (N+1 for GOE in the edge indexing)
    Model model = Model::automatic;
    std::uint64_t seed = 1;
    std::int64_t replications = 1000;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// splitmix64 finalizer; used to derive independent per-replication seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 replication_engine(std::uint64_t seed, std::uint64_t rep) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(rep + 0x632be59bd9b4e019ULL)));
}

/// Largest eigenvalue of the symmetric tridiagonal matrix (diag d, off-diagonal e) by
/// Sturm-count bisection to 1e-12 * ||T||.
inline double largest_eigenvalue_tridiagonal(const std::vector<double>& d, const std::vector<double>& e) {
    const std::size_t n = d.size();
    double lo = d[0], hi = d[0], norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
        norm = std::max(norm, std::abs(d[i]) + r);
    }
    // number of eigenvalues below x
    auto below = [&](double x) {
        int count = 0;
        double q = d[0] - x;
        for (std::size_t i = 0;;) {
            if (q == 0.0) q = -1e-300;
            if (q < 0.0) ++count;
            if (++i == n) break;
            q = d[i] - x - e[i - 1] * e[i - 1] / q;
        }
        return count;
    };
    const auto target = static_cast<int>(n) - 1;
    const double tol = 1e-12 * std::max(norm, 1e-300);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (below(mid) > target) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

// One draw of the largest eigenvalue. Density exp(-(beta/2) tr M^2): GOE diagonal N(0,1),
// off-diagonal N(0,1/2); GUE diagonal N(0,1/2), real and imaginary parts N(0,1/4).
inline double draw(const SampleConfig& cfg, std::mt19937_64& gen) {
    const int n = cfg.n;
    const bool tri = cfg.model == Model::tridiagonal || (cfg.model == Model::automatic && n > kDenseLimit);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> d(n), e(n > 1 ? n - 1 : 0);
    if (tri) {
        // beta-Hermite tridiagonal model with the same eigenvalue law
        const bool goe = cfg.ensemble == Ensemble::GOE;
        const double dscale = goe ? 1.0 : std::sqrt(0.5);
        for (int i = 0; i < n; ++i) d[i] = dscale * normal(gen);
        for (int i = 0; i + 1 < n; ++i) {
            const int k = n - 1 - i;
            std::chi_squared_distribution<double> chi2(goe ? k : 2.0 * k);
            e[i] = std::sqrt(chi2(gen)) / (goe ? std::sqrt(2.0) : 2.0);
        }
        return largest_eigenvalue_tridiagonal(d, e);
    }
    if (cfg.ensemble == Ensemble::GOE) {
        Eigen::MatrixXd m(n, n);
        const double off = std::sqrt(0.5);
        for (int i = 0; i < n; ++i) {
            m(i, i) = normal(gen);
            for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = off * normal(gen);
        }
        Eigen::Tridiagonalization<Eigen::MatrixXd> tri_form(m);
        const Eigen::VectorXd dd = tri_form.diagonal();
        const Eigen::VectorXd ee = tri_form.subDiagonal();
        for (int i = 0; i < n; ++i) d[i] = dd(i);
        for (int i = 0; i + 1 < n; ++i) e[i] = ee(i);
        return largest_eigenvalue_tridiagonal(d, e);
    }
    Eigen::MatrixXcd m(n, n);
    const double dsd = std::sqrt(0.5), osd = 0.5;
    for (int i = 0; i < n; ++i) {
        m(i, i) = dsd * normal(gen);
        for (int j = i + 1; j < n; ++j) {
            const double re = osd * normal(gen), im = osd * normal(gen);
            m(i, j) = {re, im};
            m(j, i) = {re, -im};
        }
    }
    Eigen::Tridiagonalization<Eigen::MatrixXcd> tri_form(m);
    const Eigen::VectorXd dd = tri_form.diagonal().real();
    const Eigen::VectorXd ee = tri_form.subDiagonal();
    for (int i = 0; i < n; ++i) d[i] = dd(i);
    for (int i = 0; i + 1 < n; ++i) e[i] = ee(i);
    return largest_eigenvalue_tridiagonal(d, e);
}

}  // namespace detail

/// R largest eigenvalues; replication r always uses the engine derived from (seed, r), so the
/// output is independent of the thread count.
inline std::vector<double> largest_eigenvalue_sample(const SampleConfig& cfg) {
    if (cfg.n < 2) throw usage_error("sampler: n must be >= 2");
    if (cfg.replications < 1) throw usage_error("sampler: replications must be >= 1");
    const auto R = static_cast<std::size_t>(cfg.replications);
    std::vector<double> out(R);
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, R));
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            auto gen = replication_engine(cfg.seed, r);
            out[r] = detail::draw(cfg, gen);
        }
    };
    if (threads <= 1) {
        work(0, R);
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, R * t / threads, R * (t + 1) / threads);
    for (auto& th : pool) th.join();
    return out;
}

/// (mu, tau) for the sampled dimension: GUE uses N = n, GOE uses N = n - 1.
inline specfun::Scaling edge_scaling(const SampleConfig& cfg, const specfun::CenteringSpec& spec) {
    if (spec.ensemble != cfg.ensemble) throw usage_error("centering spec is for a different ensemble");
    const int N = cfg.ensemble == Ensemble::GOE ? cfg.n - 1 : cfg.n;
    return specfun::centering(spec, N);
}

inline std::vector<double> rescaled_sample(const SampleConfig& cfg, const specfun::CenteringSpec& spec) {
    const auto sc = edge_scaling(cfg, spec);
    auto xs = largest_eigenvalue_sample(cfg);
    for (double& x : xs) x = (x - sc.mu) / sc.tau;
    return xs;
}

struct McEstimate {
    std::vector<double> alphas;
    std::vector<double> s_values;
    std::vector<double> p_hat;
    std::vector<double> stderr_;
    std::vector<std::int64_t> counts;
    std::int64_t R = 0;
    std::uint64_t seed = 0;
};

/// Empirical CDF of the rescaled sample at thresholds s.
inline McEstimate empirical_cdf(const std::vector<double>& rescaled, const std::vector<double>& s_values,
                                std::uint64_t seed) {
    McEstimate est;
    est.s_values = s_values;
    est.R = static_cast<std::int64_t>(rescaled.size());
    est.seed = seed;
    auto sorted = rescaled;
    std::sort(sorted.begin(), sorted.end());
    for (double s : s_values) {
        const auto c = static_cast<std::int64_t>(std::upper_bound(sorted.begin(), sorted.end(), s) - sorted.begin());
        const double p = static_cast<double>(c) / static_cast<double>(est.R);
        est.counts.push_back(c);
        est.p_hat.push_back(p);
        est.stderr_.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(est.R)));
    }
    return est;
}

/// Fraction of replications with (x_max - mu)/tau <= the Tracy-Widom alpha-quantile
/// (beta = 1 for GOE, 2 for GUE).
inline McEstimate mc_cdf(const SampleConfig& cfg, const specfun::CenteringSpec& spec, const std::vector<double>& alphas) {
    const int beta = cfg.ensemble == Ensemble::GOE ? 1 : 2;
    std::vector<double> s_values;
    for (double a : alphas) s_values.push_back(fredholm::tw_quantile(beta, a));
    if (alphas.empty()) {
        McEstimate est;
        est.R = cfg.replications;
        est.seed = cfg.seed;
        return est;
    }
    auto est = empirical_cdf(rescaled_sample(cfg, spec), s_values, cfg.seed);
    est.alphas = alphas;
    return est;
}

struct Histogram {
    double lo = -6.0, hi = 4.0;
    std::vector<double> heights;  // density units: count / (R * width)
    double width() const { return (hi - lo) / static_cast<double>(heights.size()); }
    double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
    double mass() const {
        double m = 0.0;
        for (double h : heights) m += h * width();
        return m;
    }
};

inline Histogram histogram(const std::vector<double>& xs, int bins, double lo = -6.0, double hi = 4.0) {
    if (bins < 10) throw usage_error("histogram: bins must be >= 10");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.heights.assign(bins, 0.0);
    const double w = h.width();
    for (double x : xs) {
        if (!(x >= lo && x < hi)) continue;
        const auto i = std::min<std::size_t>(static_cast<std::size_t>((x - lo) / w), bins - 1);
        h.heights[i] += 1.0;
    }
    for (double& v : h.heights) v /= static_cast<double>(xs.size()) * w;
    return h;
}

inline Histogram mc_density(const SampleConfig& cfg, const specfun::CenteringSpec& spec, int bins) {
    return histogram(rescaled_sample(cfg, spec), bins);
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

}  // namespace twedge::ensembles
