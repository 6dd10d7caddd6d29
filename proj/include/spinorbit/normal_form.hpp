#pragma once

// Third-order normalized frequency of the dissipative spin-orbit normal form, with the
// eccentricity dependence expanded to sixth order.

#include <algorithm>
#include <array>
#include <cmath>

#include "spinorbit/errors.hpp"
#include "spinorbit/kepler.hpp"

namespace spinorbit::normal_form {

inline constexpr double kGuardRadius = 1e-3;
inline constexpr std::array<double, 3> kPoles{1.0, 1.5, 2.0};

struct NormalFormFrequency {
    double value;
    double singular_distance;  // min |Y - pole| over the poles {1, 3/2, 2}
};

inline double singular_distance(double y) {
    double d = std::abs(y - kPoles[0]);
    for (double p : kPoles) d = std::min(d, std::abs(y - p));
    return d;
}

/// Omega(Y; eps) for eccentricity e. Throws NearResonance when Y is within
/// `guard` of one of the poles.
inline NormalFormFrequency omega_normalized(double Y, double eps, double e,
                                            double guard = kGuardRadius) {
    const double dist = singular_distance(Y);
    if (dist < guard) {
        double pole = kPoles[0];
        for (double p : kPoles) {
            if (std::abs(Y - p) < std::abs(Y - pole)) pole = p;
        }
        throw NearResonance(Y, pole);
    }
    const double c1 = 1.0 / std::pow(Y - 1.0, 3);
    const double c2 = 1.0 / std::pow(Y - 2.0, 3);
    const double c32 = 1.0 / std::pow(3.0 - 2.0 * Y, 3);  // = -1/(2Y-3)^3
    const double e2 = e * e;
    const double e4 = e2 * e2;
    const double e6 = e4 * e2;
    const double eps2 = eps * eps;
    const double bracket = e2 / 8.0 * (5.0 * c1 + 98.0 * c32) +
                           e4 / 64.0 * (-63.0 * c1 - 3444.0 * c32 - 578.0 * c2) +
                           e6 / 768.0 * (31280.0 * c2 + 390.0 * c1 + 45387.0 * c32);
    return {Y - eps2 / 8.0 * c1 + eps2 * bracket, dist};
}

/// Normalized frequency on the limiting action Y = eta, with eta from its
/// eccentricity series. Independent of mu.
inline double omega_app(double eps, double e, double guard = kGuardRadius) {
    kepler::check_eccentricity(e);
    return omega_normalized(kepler::drift_series(e), eps, e, guard).value;
}

}  // namespace spinorbit::normal_form
