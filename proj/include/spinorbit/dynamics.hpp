#pragma once

// Dissipative spin-orbit equations of motion and the stroboscopic RK4 integrator.
//
//   x' = y
//   y' = -eps * V_x(x, t) - mu * (y - eta)
//
// Both potentials reduce to  V_x = sin(2x) P(t) - cos(2x) Q(t)  for 2pi-periodic P, Q,
// which the integrator tabulates once per period.

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "spinorbit/errors.hpp"
#include "spinorbit/kepler.hpp"

namespace spinorbit {

enum class PotentialModel { exact_keplerian, trig_truncated };

inline std::string_view to_string(PotentialModel m) {
    return m == PotentialModel::exact_keplerian ? "exact" : "trig";
}

inline PotentialModel parse_model(std::string_view s) {
    if (s == "exact") return PotentialModel::exact_keplerian;
    if (s == "trig") return PotentialModel::trig_truncated;
    throw DomainError("unknown model '" + std::string(s) + "' (expected exact|trig)");
}

struct SpinOrbitParams {
    double eps = 0.0;
    double e = 0.0;
    double mu = 0.0;
    double eta = 1.0;
    PotentialModel model = PotentialModel::trig_truncated;

    /// Parameters with the drift fixed by the eccentricity, eta = N(e)/L(e).
    static SpinOrbitParams natural(double eps, double e, double mu,
                                   PotentialModel model = PotentialModel::trig_truncated) {
        SpinOrbitParams p{eps, e, mu, kepler::eta_exact(e), model};
        p.validate();
        return p;
    }

    void validate() const {
        kepler::check_eccentricity(e);
        if (!(eps >= 0.0)) throw DomainError("eps must be >= 0");
        if (!(mu >= 0.0)) throw DomainError("mu must be >= 0");
        if (!std::isfinite(eta)) throw DomainError("eta must be finite");
    }
};

struct SpinState {
    double x = 0.0;  // lifted rotation angle
    double y = 0.0;  // angular velocity
    double t = 0.0;

    double x_mod_2pi() const {
        const double r = std::fmod(x, kepler::kTwoPi);
        return r < 0.0 ? r + kepler::kTwoPi : r;
    }
};

struct Derivative {
    double dx;
    double dy;
};

struct HarmonicAmplitudes {
    double a2;
    double a3;
    double a4;
};

/// Amplitudes of cos(2x-2t), cos(2x-3t), cos(2x-4t) in the truncated potential
/// V(x,t) = -[a2 cos(2x-2t) + a3 cos(2x-3t) + a4 cos(2x-4t)].
inline HarmonicAmplitudes potential_coeffs(double e) {
    const double e2 = e * e;
    return {0.5 - 1.25 * e2 + (13.0 / 32.0) * e2 * e2,
            1.75 * e - (123.0 / 32.0) * e2 * e,
            4.25 * e2 - (115.0 / 12.0) * e2 * e2};
}

namespace detail {

// (P, Q) with V_x = sin(2x) P - cos(2x) Q.
inline std::array<double, 2> forcing(double t, const SpinOrbitParams& p) {
    if (p.model == PotentialModel::trig_truncated) {
        const auto a = potential_coeffs(p.e);
        const double pp = 2.0 * (a.a2 * std::cos(2.0 * t) + a.a3 * std::cos(3.0 * t) +
                                 a.a4 * std::cos(4.0 * t));
        const double qq = 2.0 * (a.a2 * std::sin(2.0 * t) + a.a3 * std::sin(3.0 * t) +
                                 a.a4 * std::sin(4.0 * t));
        return {pp, qq};
    }
    const auto k = kepler::orbit_point(t, p.e);
    const double inv_r3 = 1.0 / (k.r_over_a * k.r_over_a * k.r_over_a);
    return {inv_r3 * std::cos(2.0 * k.f), inv_r3 * std::sin(2.0 * k.f)};
}

inline Derivative rhs_from_forcing(double x, double y, std::array<double, 2> pq,
                                   const SpinOrbitParams& p) {
    const double s2 = std::sin(2.0 * x);
    const double c2 = std::cos(2.0 * x);
    return {y, -p.eps * (s2 * pq[0] - c2 * pq[1]) - p.mu * (y - p.eta)};
}

}  // namespace detail

/// Right-hand side evaluated directly from its definition at the given state.
inline Derivative rhs(const SpinState& s, const SpinOrbitParams& p) {
    if (p.model == PotentialModel::trig_truncated) {
        const auto a = potential_coeffs(p.e);
        const double vx = 2.0 * (a.a2 * std::sin(2.0 * s.x - 2.0 * s.t) +
                                 a.a3 * std::sin(2.0 * s.x - 3.0 * s.t) +
                                 a.a4 * std::sin(2.0 * s.x - 4.0 * s.t));
        return {s.y, -p.eps * vx - p.mu * (s.y - p.eta)};
    }
    const auto k = kepler::orbit_point(s.t, p.e);
    const double inv_r = 1.0 / k.r_over_a;
    return {s.y, -p.eps * inv_r * inv_r * inv_r * std::sin(2.0 * s.x - 2.0 * k.f) -
                     p.mu * (s.y - p.eta)};
}

struct StroboscopicSample {
    long k;
    double x;
    double y;
};

struct StroboscopicOrbit {
    std::vector<StroboscopicSample> samples;  // k = 0..T
    SpinOrbitParams params;
    int steps_per_period = 256;
    double x0 = 0.0;
    double y0 = 0.0;

    long periods() const { return static_cast<long>(samples.size()) - 1; }
};

inline constexpr int kDefaultStepsPerPeriod = 256;

/// Classical RK4 with h = 2pi/steps_per_period, sampled every full period.
///
/// Stage times repeat modulo 2pi because the step count per period is an integer, so the
/// time-dependent forcing is tabulated at the 2*steps_per_period stage abscissae of one
/// period and reused; the state never sees a large time argument.
class StroboscopicIntegrator {
public:
    StroboscopicIntegrator(const SpinOrbitParams& params, int steps_per_period)
        : params_(params), steps_(steps_per_period) {
        params_.validate();
        if (steps_ < 16) throw DomainError("steps_per_period must be >= 16");
        h_ = kepler::kTwoPi / steps_;
        table_.resize(2 * static_cast<std::size_t>(steps_) + 1);
        for (int j = 0; j <= 2 * steps_; ++j) {
            table_[static_cast<std::size_t>(j)] = detail::forcing(0.5 * h_ * j, params_);
        }
    }

    double step_size() const { return h_; }

    /// Advance one RK4 step starting at stage index j (time j*h within the period).
    void step(double& x, double& y, int j) const {
        const auto& p0 = table_[2 * static_cast<std::size_t>(j)];
        const auto& ph = table_[2 * static_cast<std::size_t>(j) + 1];
        const auto& p1 = table_[2 * static_cast<std::size_t>(j) + 2];
        const auto k1 = detail::rhs_from_forcing(x, y, p0, params_);
        const auto k2 = detail::rhs_from_forcing(x + 0.5 * h_ * k1.dx, y + 0.5 * h_ * k1.dy, ph, params_);
        const auto k3 = detail::rhs_from_forcing(x + 0.5 * h_ * k2.dx, y + 0.5 * h_ * k2.dy, ph, params_);
        const auto k4 = detail::rhs_from_forcing(x + h_ * k3.dx, y + h_ * k3.dy, p1, params_);
        x += h_ / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
        y += h_ / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
    }

    /// Map (x, y) at t = 2pi k to t = 2pi (k+1).
    void period(double& x, double& y) const {
        for (int j = 0; j < steps_; ++j) step(x, y, j);
    }

    StroboscopicOrbit run(double x0, double y0, long periods) const {
        if (periods < 1) throw DomainError("T must be >= 1");
        if (!std::isfinite(x0) || !std::isfinite(y0)) throw DomainError("initial condition must be finite");
        StroboscopicOrbit orbit{{}, params_, steps_, x0, y0};
        orbit.samples.reserve(static_cast<std::size_t>(periods) + 1);
        orbit.samples.push_back({0, x0, y0});
        double x = x0;
        double y = y0;
        for (long k = 1; k <= periods; ++k) {
            period(x, y);
            if (!std::isfinite(x) || !std::isfinite(y)) throw IntegrationBlowup(k);
            orbit.samples.push_back({k, x, y});
        }
        return orbit;
    }

private:
    SpinOrbitParams params_;
    int steps_;
    double h_ = 0.0;
    std::vector<std::array<double, 2>> table_;
};

inline StroboscopicOrbit integrate(double x0, double y0, const SpinOrbitParams& params, long periods,
                                   int steps_per_period = kDefaultStepsPerPeriod) {
    return StroboscopicIntegrator(params, steps_per_period).run(x0, y0, periods);
}

}  // namespace spinorbit
