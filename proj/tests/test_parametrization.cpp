#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spinorbit/kepler.hpp"
#include "spinorbit/parametrization.hpp"

using namespace spinorbit;
using namespace spinorbit::parametrization;

namespace {

// eta_2 worked out by hand from the three harmonics of V: with u_1 from the real-form inversion
// of -V_x, the mean of -V_xx u_1 is -2 mu sum_j a_j^2 / (d_j (d_j^2 + mu^2)) where a_j is twice
// the potential amplitude and d_j = 2 omega - n_j.
double eta2_closed_form(double omega, double e, double mu) {
    const double a = 1.0 - 2.5 * e * e + 13.0 / 16.0 * std::pow(e, 4);
    const double b = 3.5 * e - 123.0 / 16.0 * std::pow(e, 3);
    const double c = -(1.0 / 6.0) * e * e * (115.0 * e * e - 51.0);
    auto term = [&](double amp, double d) { return amp * amp / (d * (d * d + mu * mu)); };
    return term(a, 2 * omega - 2) + term(b, 2 * omega - 3) + term(c, 2 * omega - 4);
}

// The closed form exactly as typeset in the source publication.
double eta2_printed(double w, double e, double mu) {
    const double a = 1.0 - 2.5 * e * e + 13.0 / 16.0 * std::pow(e, 4);
    const double b = 3.5 * e - 123.0 / 16.0 * std::pow(e, 3);
    const double c = -(1.0 / 6.0) * e * e * (115.0 * e * e - 51.0);
    return -a * a / (2 * (w - 1) * (mu * mu + 4 * (w - 1) * (w - 1))) -
           b * b / ((2 * w - 3) * (mu * mu + (3 - 2 * w) * (3 - 2 * w))) -
           c * c / ((2 * w - 1) * (mu * mu + 4 * (1 - 2 * w) * (1 - 2 * w)));
}

struct Sample {
    double omega, e, mu;
};

std::vector<Sample> random_nonresonant(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> wd(0.8, 2.4), ed(0.0, 0.3), lmu(-4.0, -2.0);
    std::vector<Sample> out;
    while (static_cast<int>(out.size()) < n) {
        const double w = wd(rng);
        // keep every low-order divisor 2w - n, 4w - n, 6w - n away from zero
        bool ok = true;
        for (int m : {2, 4, 6, 8}) ok = ok && std::abs(m * w - std::round(m * w)) > 0.02;
        if (!ok) continue;
        out.push_back({w, ed(rng), std::pow(10.0, lmu(rng))});
    }
    return out;
}

const double kOmega50 = 1.0 + 1.0 / (50.0 + kGamma);

}  // namespace

TEST(SolveEmbedding, FirstOrder) {
    const auto sol = solve_embedding(kOmega50, 0.1, 1e-3, 1);
    ASSERT_EQ(sol.u.size(), 1u);
    EXPECT_EQ(sol.eta[0], kOmega50);
    EXPECT_EQ(sol.eta[1], 0.0);
    std::set<std::pair<int, int>> support;
    for (const auto& [w, h] : sol.u[0].terms()) support.insert({w.m, w.n});
    EXPECT_EQ(support, (std::set<std::pair<int, int>>{{2, -2}, {2, -3}, {2, -4}}));
    // circular orbit keeps only the synchronous harmonic
    EXPECT_EQ(solve_embedding(1.3, 0.0, 1e-3, 1).u[0].size(), 1u);
}

TEST(SolveEmbedding, SecondOrderDriftMatchesClosedForm) {
    EXPECT_NEAR(solve_embedding(kOmega50, 0.1, 1e-3, 2).eta[2] / eta2_closed_form(kOmega50, 0.1, 1e-3), 1.0, 1e-10);
    for (const auto& s : random_nonresonant(20, 42)) {
        const auto sol = solve_embedding(s.omega, s.e, s.mu, 3);
        const double ref = eta2_closed_form(s.omega, s.e, s.mu);
        EXPECT_NEAR(sol.eta[2], ref, 1e-10 * std::abs(ref)) << s.omega << " " << s.e << " " << s.mu;
        EXPECT_NEAR(sol.eta[1], 0.0, 1e-12);
        EXPECT_NEAR(sol.eta[3], 0.0, 1e-12);
    }
}

TEST(SolveEmbedding, PrintedSecondOrderDriftHasFlippedSign) {
    // The typeset formula disagrees with the solver: its first two terms carry the opposite
    // sign, and its last denominator uses 2w-1 where the (2, -4) harmonic gives 2w-4.
    for (const auto& s : random_nonresonant(5, 7)) {
        const double w = s.omega, mu = s.mu;
        const double solver = solve_embedding(w, s.e, mu, 2).eta[2];
        EXPECT_GT(std::abs(solver - eta2_printed(w, s.e, mu)), 1e-6 * std::abs(solver));
        const double a = 1.0 - 2.5 * s.e * s.e + 13.0 / 16.0 * std::pow(s.e, 4);
        const double b = 3.5 * s.e - 123.0 / 16.0 * std::pow(s.e, 3);
        const double printed_first_two = -a * a / (2 * (w - 1) * (mu * mu + 4 * (w - 1) * (w - 1))) -
                                         b * b / ((2 * w - 3) * (mu * mu + (3 - 2 * w) * (3 - 2 * w)));
        const double derived_first_two = a * a / ((2 * w - 2) * ((2 * w - 2) * (2 * w - 2) + mu * mu)) +
                                         b * b / ((2 * w - 3) * ((2 * w - 3) * (2 * w - 3) + mu * mu));
        EXPECT_NEAR(printed_first_two, -derived_first_two, 1e-12 * std::abs(derived_first_two));
    }
}

TEST(SolveEmbedding, OrderResidualsZeroMeansAndSupport) {
    for (const auto& s : random_nonresonant(10, 3)) {
        const auto sol = solve_embedding(s.omega, s.e, s.mu, 4);
        ASSERT_EQ(sol.u.size(), 4u);
        ASSERT_EQ(sol.eta.size(), 5u);
        for (int k = 1; k <= 4; ++k) {
            const auto& uk = sol.u[static_cast<std::size_t>(k - 1)];
            EXPECT_LE(sol.residual[static_cast<std::size_t>(k - 1)], 1e-12);
            // independent recheck of the order-k equation
            const auto& rhs = sol.rhs[static_cast<std::size_t>(k - 1)];
            EXPECT_LE((apply_D2_muD(uk, s.omega, s.mu) - rhs).max_abs_coeff(), 1e-12 * rhs.max_abs_coeff());
            EXPECT_EQ(uk.average(), 0.0);
            EXPECT_EQ(rhs.average(), 0.0);
            for (const auto& [w, h] : uk.terms()) {
                EXPECT_EQ(w.m % 2, 0);
                EXPECT_LE(w.m, 2 * k);
                EXPECT_LE(std::abs(w.n), 4 * k);
            }
        }
    }
}

TEST(SolveEmbedding, SourceIsTheEpsExpansionOfTheForce) {
    // S_k is the eps^(k-1) coefficient of F(eps) = -V_x(theta + U(eps), t); its mean is -mu eta_k.
    const double w = 1.3, e = 0.2, mu = 1e-3;
    const auto sol = solve_embedding(w, e, mu, 3);
    const auto a = potential_coeffs(e);
    auto vx = [&](double x, double t) {
        return 2.0 * (a.a2 * std::sin(2 * x - 2 * t) + a.a3 * std::sin(2 * x - 3 * t) + a.a4 * std::sin(2 * x - 4 * t));
    };
    for (double th : {0.3, 2.0}) {
        for (double t : {0.1, 4.0}) {
            auto F = [&](double eps) {
                double u = 0.0, p = eps;
                for (const auto& uk : sol.u) {
                    u += p * uk.evaluate(th, t);
                    p *= eps;
                }
                return -vx(th + u, t);
            };
            auto diffs = [&](double h) {
                return std::pair{(F(h) - F(-h)) / (2 * h), (F(h) - 2 * F(0) + F(-h)) / (h * h)};
            };
            const auto [a1, a2] = diffs(1e-3);
            const auto [b1, b2] = diffs(5e-4);
            const double d1 = (4 * b1 - a1) / 3, d2 = (4 * b2 - a2) / 3;
            const double s2 = sol.rhs[1].evaluate(th, t) - mu * sol.eta[2];
            const double s3 = sol.rhs[2].evaluate(th, t) - mu * sol.eta[3];
            EXPECT_NEAR(F(0), sol.rhs[0].evaluate(th, t), 1e-12);
            EXPECT_NEAR(d1, s2, 1e-6 * (1.0 + std::abs(d1)));
            EXPECT_NEAR(d2 / 2, s3, 1e-5 * (1.0 + std::abs(d2)));
        }
    }
}

TEST(SolveEmbedding, Errors) {
    EXPECT_THROW(solve_embedding(1.3, 0.1, 1e-3, 0), DomainError);
    EXPECT_THROW(solve_embedding(1.3, 0.1, 1e-3, 5), DomainError);
    EXPECT_THROW(solve_embedding(1.3, 1.2, 1e-3, 2), DomainError);
    EXPECT_THROW(solve_embedding(1.3, 0.1, -1.0, 2), DomainError);
    EXPECT_NO_THROW(solve_embedding(1.3, 0.1, 0.0, 1));
    EXPECT_THROW(solve_embedding(1.3, 0.1, 0.0, 2), DriftUndetermined);
    EXPECT_THROW(solve_embedding(1.5, 0.1, 1e-3, 1), SmallDivisor);
    EXPECT_THROW(solve_embedding(1.5 + 1e-5, 0.1, 1e-3, 1), SmallDivisor);
    EXPECT_NO_THROW(solve_embedding(1.5 + 1e-5, 0.1, 1e-3, 1, 1e-6));
}

TEST(EtaOf, Values) {
    EXPECT_EQ(eta_of(1.37, 0.2, 0.0, 1e-3, 4), 1.37);
    const double w = 1.5 + 1.0 / (50.0 + kGamma);
    const double eps = 1e-3, mu = 1e-3;
    EXPECT_NEAR(eta_of(w, 0.285, eps, mu, 2), w + eta2_closed_form(w, 0.285, mu) * eps * eps, 1e-12);
    // K=4 departs from K=2 by eta_4 eps^4 (eta_3 vanishes)
    const auto sol = solve_embedding(1.3, 0.2, mu, 4);
    const double k4 = eta_of(1.3, 0.2, eps, mu, 4), k2 = eta_of(1.3, 0.2, eps, mu, 2);
    EXPECT_NEAR(k4 - k2, sol.eta[4] * std::pow(eps, 4), 1e-15);
    EXPECT_NEAR(k2, 1.3 + sol.eta[2] * eps * eps, 1e-15);
}

TEST(ConstraintC, ReducesToDriftMismatchWithoutEllipticity) {
    // e with eta_exact(e) = 1.3 by bisection on the exact quotient
    double lo = 0.0, hi = 0.3;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kepler::eta_exact(mid) < 1.3 ? lo : hi) = mid;
    }
    EXPECT_NEAR(constraint_C(1.3, lo, 0.0, 1e-3), 0.0, 1e-14);
    // bracketing the 2:1 drift root e ~ 0.3924
    const double w = 2.0 - 1.0 / (100.0 + kGamma);
    EXPECT_LT(constraint_C(w, 0.385, 0.0, 1e-3), 0.0);
    EXPECT_GT(constraint_C(w, 0.395, 0.0, 1e-3), 0.0);
}

TEST(ConstraintC, ContinuousAcrossTheGrid) {
    const double w = 4.0 / 3.0 + 1.0 / (60.0 + kGamma);
    for (int i = 0; i < 200; ++i) {
        const double e = 0.3 * i / 200;
        for (double eps : {0.0, 5e-4, 1e-3}) {
            const double c0 = constraint_C(w, e, eps, 1e-3);
            const double c1 = constraint_C(w, e + 1e-6, eps, 1e-3);
            ASSERT_LT(std::abs(c1 - c0), 1e-4) << e << " " << eps;
        }
    }
}

TEST(ResonanceApproximant, Values) {
    const auto a = resonance_approximant(3, 2, 50, ApproachSide::above);
    EXPECT_NEAR(a.omega, 1.5197558048228869355, 1e-15);
    EXPECT_FALSE(a.warning);
    EXPECT_TRUE(resonance_approximant(1, 1, 60, ApproachSide::below).warning);
    EXPECT_FALSE(resonance_approximant(1, 1, 60, ApproachSide::above).warning);
    double prev = 1.0;
    for (int k = 1; k < 200; ++k) {
        for (auto side : {ApproachSide::above, ApproachSide::below}) {
            const auto r = resonance_approximant(2, 1, k, side);
            EXPECT_NEAR(std::abs(r.omega - 2.0), 1.0 / (k + kGamma), 1e-15);
        }
        const double gap = std::abs(resonance_approximant(2, 1, k, ApproachSide::above).omega - 2.0);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_THROW(resonance_approximant(1, 0, 50, ApproachSide::above), DomainError);
    EXPECT_THROW(resonance_approximant(1, 1, 0, ApproachSide::above), DomainError);
}

TEST(Contour, ZeroEllipticityRowMatchesExactRoot) {
    const double w = 2.0 - 1.0 / (100.0 + kGamma);
    ContourConfig c;
    c.e_range = {0.3, 0.45};
    c.eps_range = {0.0, 1e-4};
    c.n_e = 32;
    c.n_eps = 16;
    const auto res = contour_zero_level(w, 1e-3, c);
    EXPECT_TRUE(res.failed_rows.empty());
    bool seen = false;
    for (const auto& p : res.points) {
        if (p.eps != 0.0) continue;
        EXPECT_NEAR(p.e, 0.39064402027615619266, 1e-6);  // mpmath root of eta_exact(e) = w
        seen = true;
    }
    EXPECT_TRUE(seen);
}

TEST(Contour, RowsWithoutSignChangeAndFailures) {
    ContourConfig c;
    c.e_range = {0.0, 0.1};
    c.n_e = 16;
    c.n_eps = 16;
    // eta_exact < 1.06 on this range, far below omega = 1.9
    EXPECT_TRUE(contour_zero_level(1.9, 1e-3, c).points.empty());
    // exact 3:2 resonance: every column hits a zero divisor
    const auto res = contour_zero_level(1.5, 1e-3, c);
    EXPECT_EQ(res.failed_rows.size(), 16u);
    c.n_e = 8;
    EXPECT_THROW(contour_zero_level(1.9, 1e-3, c), DomainError);
}

TEST(Diffeomorphism, PositiveOnGrid) {
    const double g = kGamma;
    for (double w : {1.2, 1.381966, 1.618034, 2.236068, 1.0 + 1 / (50 + g), 1.5 + 1 / (50 + g), 2.0 + 1 / (50 + g)}) {
        for (double e : {0.0, 0.15, 0.3}) {
            const auto sol = solve_embedding(w, e, 1e-3, 3);
            EXPECT_GT(sol.min_diffeo_margin(1e-3, 64), 0.0) << w << " " << e;
        }
    }
}
