#pragma once

// Keplerian two-body geometry and the orbit-averaged tidal torque factors.

#include <cmath>
#include <numbers>

#include "spinorbit/errors.hpp"

namespace spinorbit::kepler {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kKeplerTolerance = 1e-13;

struct KeplerPoint {
    double ell;       // mean anomaly
    double u;         // eccentric anomaly
    double r_over_a;  // orbital radius in units of the semimajor axis
    double f;         // true anomaly, lifted to be continuous in ell
};

struct TidalAverages {
    double lbar;
    double nbar;
    double eta;
};

inline void check_eccentricity(double e) {
    if (!(e >= 0.0 && e < 1.0)) {
        throw DomainError("eccentricity must lie in [0,1), got " + std::to_string(e));
    }
}

namespace detail {

// Root of u - e sin u = ell for ell in [0, pi].
inline double solve_reduced(double ell, double e) {
    auto g = [&](double u) { return u - e * std::sin(u) - ell; };
    double u = ell + e * std::sin(ell);
    for (int it = 0; it < 50; ++it) {
        const double gu = g(u);
        const double step = gu / (1.0 - e * std::cos(u));
        u -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(u))) {
            if (std::abs(g(u)) <= kKeplerTolerance) return u;
            break;
        }
    }
    // Newton did not settle; g is monotone on the bracket so bisection always converges.
    double lo = ell - e;
    double hi = ell + e;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Eccentric anomaly u solving Kepler's equation ell = u - e sin u.
///
/// The mean anomaly is first reduced to [-pi, pi]; the solution is then shifted back by
/// the same whole number of revolutions, so u - ell is exactly 2pi-periodic and odd in ell.
inline double solve_kepler(double ell, double e) {
    check_eccentricity(e);
    if (!std::isfinite(ell)) throw DomainError("mean anomaly must be finite");
    if (e == 0.0) return ell;
    const double revs = std::round(ell / kTwoPi);
    const double reduced = ell - revs * kTwoPi;
    const double u = reduced < 0.0 ? -detail::solve_reduced(-reduced, e)
                                   : detail::solve_reduced(reduced, e);
    return u + revs * kTwoPi;
}

inline KeplerPoint orbit_point(double ell, double e) {
    const double u = solve_kepler(ell, e);
    if (e == 0.0) return {ell, u, 1.0, ell};
    const double r = 1.0 - e * std::cos(u);
    // f and u always lie in the same half-plane, so the lift follows the revolutions of u.
    const double f0 = std::atan2(std::sqrt(1.0 - e * e) * std::sin(u), std::cos(u) - e);
    const double f = f0 + kTwoPi * std::round((u - f0) / kTwoPi);
    return {ell, u, r, f};
}

inline TidalAverages tidal_averages(double e) {
    check_eccentricity(e);
    const double e2 = e * e;
    const double one_minus = 1.0 - e2;
    const double lbar = (1.0 + 3.0 * e2 + 0.375 * e2 * e2) / std::pow(one_minus, 4.5);
    const double nbar = (1.0 + 7.5 * e2 + 5.625 * e2 * e2 + 0.3125 * e2 * e2 * e2) /
                        std::pow(one_minus, 6.0);
    return {lbar, nbar, nbar / lbar};
}

/// Drift N(e)/L(e) written as the single quotient with the (1-e^2)^(3/2) factor.
inline double eta_quotient(double e) {
    check_eccentricity(e);
    const double e2 = e * e;
    return (1.0 + 7.5 * e2 + 5.625 * e2 * e2 + 0.3125 * e2 * e2 * e2) /
           (std::pow(1.0 - e2, 1.5) * (1.0 + 3.0 * e2 + 0.375 * e2 * e2));
}

inline double eta_exact(double e) { return tidal_averages(e).eta; }

/// Sixth-order eccentricity expansion of the drift.
inline double drift_series(double e) {
    const double e2 = e * e;
    return 1.0 + 6.0 * e2 + 0.375 * e2 * e2 + (173.0 / 8.0) * e2 * e2 * e2;
}

}  // namespace spinorbit::kepler
