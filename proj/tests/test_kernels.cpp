#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "twedge/fredholm.hpp"
#include "twedge/kernels.hpp"
#include "twedge/lg.hpp"

using namespace twedge;
using namespace twedge::kernels;
using specfun::Ensemble;
using specfun::Variant;

namespace {

double ai(double x) { return specfun::airy_ai(x); }
double aip(double x) { return specfun::airy_ai_prime(x); }

// Independent Airy kernel: integral over z >= 0 of Ai(s+z) Ai(t+z) with Boost Airy values.
double airy_kernel_quadrature(double s, double t) {
    return twedge_test::integrate_tail([s, t](double z) { return twedge_test::boost_ai(s + z) * twedge_test::boost_ai(t + z); },
                                       0.0, 30.0 + std::max(0.0, -std::min(s, t)));
}

// (eps f)(y) = integral of sgn(y-u)/2 f(u) du over the line, by quadrature.
double eps_direct(const std::function<double(double)>& f, double y, double half_width) {
    return 0.5 * (twedge_test::integrate(f, -half_width, y) - twedge_test::integrate(f, y, half_width));
}

const CenteringSpec kGoeTheorem{Ensemble::GOE, Variant::theorem};

}  // namespace

TEST(GueKernel, SingleTerm) { EXPECT_NEAR(gue_kernel(1, 0.0, 0.0, GueMethod::sum), 1.0 / std::sqrt(std::numbers::pi), 1e-15); }

TEST(GueKernel, RepresentationsAgreeAtOnePair) {
    const double sum = gue_kernel(5, 3.0, 3.1, GueMethod::sum);
    EXPECT_NEAR(gue_kernel(5, 3.0, 3.1, GueMethod::cd), sum, 1e-10);
    EXPECT_NEAR(gue_kernel(5, 3.0, 3.1, GueMethod::diamond), sum, 1e-6);
}

TEST(GueKernel, RepresentationsAgreeOnGrid) {
    for (int N : {3, 10}) {
        const auto w = specfun::wave_context(N);
        const double R = w.u_N + 6 * w.tau_N;
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 7; ++j) {
                const double x = -R + 2 * R * i / 6.0, y = -R + 2 * R * j / 6.0;
                const double sum = gue_kernel(N, x, y, GueMethod::sum);
                EXPECT_NEAR(gue_kernel(N, x, y, GueMethod::cd), sum, 1e-10) << N << " " << x << " " << y;
                EXPECT_NEAR(gue_kernel(N, x, y, GueMethod::diamond), sum, 1e-6) << N << " " << x << " " << y;
            }
        }
    }
}

TEST(GueKernel, NearDiagonalContinuity) {
    for (double d : {1e-12, 1e-8, 1e-4, 9e-3, 1.1e-2}) {
        EXPECT_NEAR(gue_kernel(40, 2.0, 2.0 + d, GueMethod::cd), gue_kernel(40, 2.0, 2.0 + d, GueMethod::sum), 1e-10) << d;
    }
}

TEST(RescaledGueKernel, SymmetryAndEdgeLimit) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    const CenteringSpec spec{Ensemble::GUE, Variant::theorem};
    for (int i = 0; i < 20; ++i) {
        const double s = u(gen), t = u(gen);
        EXPECT_NEAR(rescaled_gue_kernel(12, spec, s, t), rescaled_gue_kernel(12, spec, t, s), 1e-10);
    }
    double prev = 1e300;
    for (int N : {8, 32, 128}) {
        const double err = std::abs(rescaled_gue_kernel(N, spec, 0.0, 0.0) - airy_kernel(0.0, 0.0));
        EXPECT_LT(err, prev) << N;
        prev = err;
    }
}

TEST(AiryKernel, ClosedFormAndQuadrature) {
    const double d0 = twedge_test::boost_ai_prime(0.0);
    EXPECT_NEAR(airy_kernel(0.0, 0.0), d0 * d0, 1e-16);
    EXPECT_NEAR(airy_kernel(0.0, 0.0), airy_kernel_quadrature(0.0, 0.0), 1e-12);
    EXPECT_NEAR(airy_kernel(1.0, 2.0), airy_kernel_quadrature(1.0, 2.0), 1e-9);
    EXPECT_EQ(airy_kernel(1.0, 2.0), airy_kernel(2.0, 1.0));
    for (auto [s, t] : std::vector<std::pair<double, double>>{{-6.0, -5.99}, {-3.0, 0.5}, {0.3, 0.31}, {2.0, 2.04}, {-10.0, 4.0}})
        EXPECT_NEAR(airy_kernel(s, t), airy_kernel_quadrature(s, t), 1e-9) << s << " " << t;
    EXPECT_THROW(airy_kernel(-41.0, 0.0), domain_error);
}

TEST(AiryKernel, SymmetricOnGrid) {
    for (double s = -8.0; s <= 6.0; s += 0.7)
        for (double t = -8.0; t <= 6.0; t += 0.45) EXPECT_NEAR(airy_kernel(s, t), airy_kernel(t, s), 1e-10);
}

TEST(AiryKernel, SecondArgumentDerivative) {
    for (auto [s, t] : std::vector<std::pair<double, double>>{{-4.0, 1.0}, {0.5, 0.52}, {1.0, 1.0}, {-2.0, -2.0}, {3.0, -1.0}}) {
        const double h = 1e-5;
        const double fd = (airy_kernel(s, t + h) - airy_kernel(s, t - h)) / (2 * h);
        EXPECT_NEAR(airy_kernel_dt(s, t), fd, 1e-8) << s << " " << t;
    }
    EXPECT_NEAR(airy_kernel_dt(0.7, 0.7), -0.5 * ai(0.7) * ai(0.7), 1e-14);
}

TEST(Diamond, AiryIdentities) {
    EXPECT_NEAR(diamond(ai, ai, 0.0, 0.0), airy_kernel(0.0, 0.0), 1e-9);
    const double s = 0.5, t = 1.5;
    EXPECT_NEAR(diamond(ai, aip, s, t) + diamond(aip, ai, s, t), -ai(s) * ai(t), 1e-9);
    const double d = specfun::wave_context(16).delta_N;
    auto an = [d](double x) { return ai(x) + d * aip(x); };
    const double san = 0.5 * (diamond(ai, an, 0.0, 1.0) + diamond(an, ai, 0.0, 1.0));
    EXPECT_NEAR(san, airy_kernel(0.0, 1.0) - 0.5 * d * ai(0.0) * ai(1.0), 1e-9);
}

TEST(Diamond, NonConvergenceIsReported) {
    auto wild = [](double x) { return std::cos(40.0 * x * x); };
    auto one = [](double) { return 1.0; };
    EXPECT_THROW(diamond(wild, one, 0.0, 0.0, 30.0, 4), accuracy_error);
}

TEST(TailCalculus, AiryDerivativeAndLinearity) {
    auto one = [](double) { return 1.0; };
    for (double s : {-2.0, 0.0, 2.0}) EXPECT_NEAR(diamond(aip, one, s, 0.0), -ai(s), 1e-9) << s;
    const double d = 0.1;
    auto f = [d](double x) { return ai(x) + d * aip(x); };
    EXPECT_NEAR(diamond(f, one, 0.0, 0.0), specfun::airy_tail_integral(0.0) - d * ai(0.0), 1e-12);
}

TEST(TailCalculus, AiryKernelTailInFirstArgument) {
    const std::vector<double> s{-5.0, -1.0, 0.0, 2.5}, t{-3.0, 0.4, 1.0};
    const auto E = airy_kernel_tail_s(s, t);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j) {
            const double tj = t[j];
            const double ref =
                twedge_test::integrate([tj](double u) { return airy_kernel(u, tj); }, s[i], s[i] + 30.0);
            EXPECT_NEAR(E(i, j), ref, 1e-9) << s[i] << " " << t[j];
        }
}

TEST(EpsPsi, LimitsAndDirectQuadrature) {
    const int N = 9;
    const double beta = *specfun::beta_constant(N);
    EXPECT_NEAR(eps_psi(N, 40.0), beta, 1e-14);
    EXPECT_NEAR(eps_psi(N, -40.0), -beta, 1e-12);
    const double c = std::pow(2.0 * N, 0.25);
    auto psi = [c, N](double u) { return c * specfun::oscillator_phi(N - 1, u); };
    const double y = specfun::wave_context(N).u_N;  // t = 0 under theorem centering
    EXPECT_NEAR(eps_psi(N, y), eps_direct(psi, y, 20.0), 1e-7);
    EXPECT_THROW(eps_psi(8, 0.0), usage_error);
}

TEST(GoeScalarKernel, DecompositionMatchesDirectDefinition) {
    const int N = 9;
    const double r = std::sqrt((N + 1) / 2.0);
    auto direct = [&](double x, double y) {
        double s = 0.0;
        for (int n = 0; n <= N; ++n) s += specfun::oscillator_phi(n, x) * specfun::oscillator_phi(n, y);
        auto f = [N](double u) { return specfun::oscillator_phi(N + 1, u); };
        return s + r * specfun::oscillator_phi(N, x) * eps_direct(f, y, 20.0);
    };
    EXPECT_NEAR(goe_scalar_kernel(N, 4.0, 4.0), direct(4.0, 4.0), 1e-7);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double x = -4.0 + 2.0 * i, y = -4.0 + 2.0 * j;
            EXPECT_NEAR(goe_scalar_kernel(N, x, y), direct(x, y), 1e-7) << x << " " << y;
        }
}

TEST(GoeScalarKernel, AsymmetryAndFarLimit) {
    const int N = 9;
    EXPECT_GT(std::abs(goe_scalar_kernel(N, 1.0, 2.5) - goe_scalar_kernel(N, 2.5, 1.0)), 1e-3);
    const double x = 3.0;
    const double phi = std::pow(2.0 * N, 0.25) * specfun::oscillator_phi(N, x);
    EXPECT_NEAR(goe_scalar_kernel(N, x, 30.0), 0.5 * phi * *specfun::beta_constant(N), 1e-12);
    EXPECT_THROW(goe_scalar_kernel(10, 0.0, 0.0), usage_error);
}

TEST(GoeMatrixKernel, TransposeStructure) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    const auto fin = goe_matrix_kernel_finite(9, kGoeTheorem);
    const auto lim = goe_matrix_kernel_limit();
    for (int i = 0; i < 10; ++i) {
        const double s = u(gen), t = u(gen);
        EXPECT_NEAR(fin.k22(s, t), fin.k11(t, s), 1e-9);
        EXPECT_NEAR(lim.k22(s, t), lim.k11(t, s), 1e-9);
    }
}

TEST(GoeMatrixKernel, EntriesAreDerivativesAndTailsOfEachOther) {
    // k12 = -d_t k11 and d_s k21 = k11 for both kernels
    const auto fin = goe_matrix_kernel_finite(21, kGoeTheorem);
    const auto lim = goe_matrix_kernel_limit();
    const double h = 1e-5;
    for (const auto* k : {&fin, &lim}) {
        for (auto [s, t] : std::vector<std::pair<double, double>>{{-2.0, 1.0}, {0.5, 0.5}, {1.5, -3.0}}) {
            EXPECT_NEAR(k->k12(s, t), -(k->k11(s, t + h) - k->k11(s, t - h)) / (2 * h), 1e-7);
            EXPECT_NEAR((k->k21(s + h, t) - k->k21(s - h, t)) / (2 * h), k->k11(s, t), 1e-7);
        }
    }
}

TEST(GoeMatrixKernel, LimitEntryUnrolled) {
    const auto lim = goe_matrix_kernel_limit();
    const double expect = airy_kernel(0.0, 0.0) - 0.5 * ai(0.0) * specfun::airy_tail_integral(0.0) + 0.5 * ai(0.0);
    EXPECT_NEAR(lim.k11(0.0, 0.0), expect, 1e-14);
    EXPECT_NEAR(specfun::airy_tail_integral(-8.0), twedge_test::integrate_tail(twedge_test::boost_ai, -8.0), 1e-12);
}

TEST(GoeMatrixKernel, FiniteTailMatchesQuadrature) {
    const int N = 9;
    const auto fin = goe_matrix_kernel_finite(N, kGoeTheorem);
    const auto sc = specfun::centering(kGoeTheorem, N);
    const auto g = fin.ingredients({-1.0, 0.7});
    const double ref = twedge_test::integrate(
        [&](double u) { return sc.tau * gue_kernel(N, sc.mu + sc.tau * u, sc.mu + sc.tau * 0.7); }, -1.0, 40.0);
    EXPECT_NEAR(g.tailS(0, 1), ref, 1e-10);
}

TEST(GoeMatrixKernel, FiniteEntryApproachesLimit) {
    const auto lim = goe_matrix_kernel_limit().k11(0.0, 0.0);
    std::vector<double> scaled;
    for (int N : {17, 65, 257, 1025})
        scaled.push_back(std::pow(N, 2.0 / 3.0) * std::abs(goe_matrix_kernel_finite(N, kGoeTheorem).k11(0.0, 0.0) - lim));
    for (double v : scaled) EXPECT_LE(v, 2.0 * scaled[2]);
    EXPECT_THROW(goe_matrix_kernel_finite(16, kGoeTheorem), usage_error);
    EXPECT_THROW(goe_matrix_kernel_finite(17, {Ensemble::GUE, Variant::theorem}), usage_error);
}

TEST(EdgeWaves, AveragedCenteringCancellation) {
    // phi_tau = phi(s; -1/2), psi_tau = psi(s; +1/2)
    std::vector<double> sum23, phi13, phi23;
    for (int N : {16, 64, 256}) {
        double a = 0, b = 0, c = 0;
        for (double s = -4.0; s <= 8.0 + 1e-12; s += 0.05) {
            const double p = lg::shifted_wave({lg::Wave::phi, -0.5, N}, s), q = lg::shifted_wave({lg::Wave::psi, 0.5, N}, s);
            const double env = std::exp(s / 2);
            a = std::max(a, std::pow(N, 2.0 / 3.0) * env * std::abs(p + q - 2 * ai(s)));
            b = std::max(b, std::pow(N, 1.0 / 3.0) * env * std::abs(p - ai(s)));
            c = std::max(c, std::pow(N, 2.0 / 3.0) * env * std::abs(p - ai(s)));
        }
        sum23.push_back(a);
        phi13.push_back(b);
        phi23.push_back(c);
    }
    auto ratio = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end()); };
    EXPECT_LE(ratio(sum23), 2.0);
    EXPECT_LE(ratio(phi13), 2.0);
    EXPECT_GE(phi13.back(), 0.5 * phi13.front());  // not decaying at the slower rate
    EXPECT_GE(phi23.back() / phi23.front(), 2.0);   // the single wave is not O(N^{-2/3})
}

TEST(Diagnostics, HilbertSchmidtEnvelope) {
    // C calibrated at the left end of the range, then held fixed
    const auto A = airy_scalar_kernel();
    auto hs = [&A](double s0) { return fredholm::nystrom_matrix(A, fredholm::semi_infinite_rule(s0, 60)).norm(); };
    const double C = 2.0 * hs(0.0);
    for (double s0 : {0.0, 0.5, 1.0, 2.0, 3.0}) EXPECT_LE(hs(s0), C * std::exp(-2 * s0) / 2 * (1 + 1e-12)) << s0;
}
