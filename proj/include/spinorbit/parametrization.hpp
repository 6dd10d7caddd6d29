#pragma once

// Order-by-order solution of the invariant-attractor embedding equation
//
//   D^2 u + mu D u = -eps V_x(theta + u, t) - mu (omega0 - eta),   x = theta + u(theta, t),
//
// with u = sum_k u_k eps^k and eta = sum_k eta_k eps^k. Each eta_k is fixed by requiring
// the order-k right-hand side to have zero average.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "spinorbit/dynamics.hpp"
#include "spinorbit/errors.hpp"
#include "spinorbit/frequency.hpp"
#include "spinorbit/kepler.hpp"
#include "spinorbit/parallel.hpp"
#include "spinorbit/trig_series.hpp"

namespace spinorbit::parametrization {

inline constexpr int kMaxOrder = 4;
inline constexpr int kDefaultOrder = 3;
/// Golden-ratio conjugate (sqrt(5) - 1) / 2.
inline constexpr double kGamma = std::numbers::phi - 1.0;

/// The truncated potential V(theta, t) as a series.
inline TrigSeries2D potential_series(double e) {
    const auto a = potential_coeffs(e);
    TrigSeries2D v;
    v.add_term(2, -2, -a.a2, 0.0);
    v.add_term(2, -3, -a.a3, 0.0);
    v.add_term(2, -4, -a.a4, 0.0);
    return v.pruned();
}

struct EmbeddingSolution {
    double omega0 = 0.0;
    int order = 0;
    double e = 0.0;
    double mu = 0.0;
    std::vector<TrigSeries2D> u;       // u[0] is u_1
    std::vector<double> eta;           // eta[k] = eta_k, k = 0..order
    std::vector<TrigSeries2D> rhs;     // zero-average right-hand side of order k (rhs[0] is order 1)
    std::vector<double> residual;      // relative residual of (D^2+mu D) u_k vs rhs_k

    /// sum_k eta_k eps^k
    double eta_at(double eps) const {
        double sum = 0.0;
        for (int k = order; k >= 0; --k) sum = sum * eps + eta[static_cast<std::size_t>(k)];
        return sum;
    }

    /// sum_k eps^k u_k
    TrigSeries2D u_at(double eps) const {
        TrigSeries2D sum;
        double p = eps;
        for (const auto& uk : u) {
            sum += uk * p;
            p *= eps;
        }
        return sum;
    }

    /// min over a grid of 1 + d/dtheta (sum_k eps^k u_k)
    double min_diffeo_margin(double eps, int grid = 64) const {
        const auto du = d_theta(u_at(eps));
        double mn = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid; ++i) {
            for (int j = 0; j < grid; ++j) {
                const double th = kepler::kTwoPi * i / grid;
                const double t = kepler::kTwoPi * j / grid;
                mn = std::min(mn, 1.0 + du.evaluate(th, t));
            }
        }
        return mn;
    }
};

/// u_1..u_K and eta_0..eta_K for the frequency omega0.
///
/// The order-k source is the eps^(k-1) coefficient of -V_x(theta + U, t), expanded as
///   -sum_p (1/p!) d^(p+1)V/dtheta^(p+1) [eps^(k-1)] U^p,
/// with the theta-derivatives of V taken exactly on its three harmonics.
inline EmbeddingSolution solve_embedding(double omega0, double e, double mu, int order,
                                         double divisor_floor = kDefaultDivisorFloor) {
    if (order < 1 || order > kMaxOrder) {
        throw DomainError("order must lie in 1.." + std::to_string(kMaxOrder));
    }
    kepler::check_eccentricity(e);
    if (!(mu >= 0.0)) throw DomainError("mu must be >= 0");
    if (!std::isfinite(omega0)) throw DomainError("omega0 must be finite");

    // dv[p] = d^p V / dtheta^p, p = 0..order
    std::vector<TrigSeries2D> dv{potential_series(e)};
    for (int p = 1; p <= order; ++p) dv.push_back(d_theta(dv.back()));

    EmbeddingSolution sol;
    sol.omega0 = omega0;
    sol.order = order;
    sol.e = e;
    sol.mu = mu;
    sol.eta.push_back(omega0);

    for (int k = 1; k <= order; ++k) {
        // powers[p][n] = [eps^n] U^p for p, n <= k-1; only u_1..u_(k-1) enter.
        std::vector<std::vector<TrigSeries2D>> powers(static_cast<std::size_t>(k));
        powers[0].assign(static_cast<std::size_t>(k), TrigSeries2D{});
        powers[0][0] = TrigSeries2D::constant(1.0);
        for (int p = 1; p < k; ++p) {
            auto& row = powers[static_cast<std::size_t>(p)];
            row.assign(static_cast<std::size_t>(k), TrigSeries2D{});
            for (int n = p; n < k; ++n) {
                for (int j = 1; j <= n - (p - 1); ++j) {
                    const auto& prev = powers[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(n - j)];
                    if (prev.empty()) continue;
                    row[static_cast<std::size_t>(n)] += sol.u[static_cast<std::size_t>(j - 1)] * prev;
                }
            }
        }

        TrigSeries2D source;
        double factorial = 1.0;
        for (int p = 0; p <= k - 1; ++p) {
            if (p > 0) factorial *= p;
            const auto& up = powers[static_cast<std::size_t>(p)][static_cast<std::size_t>(k - 1)];
            if (up.empty()) continue;
            source += dv[static_cast<std::size_t>(p + 1)] * up * (-1.0 / factorial);
        }
        const double avg = source.average();
        double eta_k = 0.0;
        if (mu > 0.0) {
            eta_k = -avg / mu;
        } else if (k >= 2) {
            throw DriftUndetermined("drift coefficient of order " + std::to_string(k) +
                                    " is undetermined for mu = 0");
        }
        auto rhs = source.without_average();
        auto uk = invert_D2_muD(rhs, omega0, mu, divisor_floor);
        const auto back = apply_D2_muD(uk, omega0, mu);
        const double scale = std::max(rhs.max_abs_coeff(), std::numeric_limits<double>::min());
        sol.residual.push_back((back - rhs).max_abs_coeff() / scale);
        sol.eta.push_back(eta_k);
        sol.rhs.push_back(std::move(rhs));
        sol.u.push_back(std::move(uk));
    }
    return sol;
}

inline double eta_of(double omega, double e, double eps, double mu, int order = kDefaultOrder,
                     double divisor_floor = kDefaultDivisorFloor) {
    return solve_embedding(omega, e, mu, order, divisor_floor).eta_at(eps);
}

/// C = N(e)/L(e) - eta(omega, e, eps, mu)
inline double constraint_C(double omega, double e, double eps, double mu, int order = kDefaultOrder,
                           double divisor_floor = kDefaultDivisorFloor) {
    return kepler::eta_exact(e) - eta_of(omega, e, eps, mu, order, divisor_floor);
}

enum class ApproachSide { above, below };

inline std::string_view to_string(ApproachSide s) { return s == ApproachSide::above ? "above" : "below"; }

struct ResonanceApproximant {
    int p;
    int q;
    int k;
    ApproachSide side;
    double omega;
    /// Set for the 1:1 resonance approached from below, which is not physically reached.
    bool warning;
};

/// omega_k = p/q +- 1/(k + gamma)
inline ResonanceApproximant resonance_approximant(int p, int q, int k, ApproachSide side) {
    if (q <= 0) throw DomainError("q must be positive");
    if (k < 1) throw DomainError("k must be >= 1");
    const double offset = 1.0 / (k + kGamma);
    const double base = static_cast<double>(p) / q;
    const double omega = side == ApproachSide::above ? base + offset : base - offset;
    return {p, q, k, side, omega, p == q && side == ApproachSide::below};
}

struct ContourPoint {
    double e;
    double eps;
};

struct ContourResult {
    std::vector<ContourPoint> points;
    std::vector<double> failed_rows;  // eps values whose row hit a small divisor
};

struct ContourConfig {
    int order = kDefaultOrder;
    frequency::Range e_range{0.0, 0.45};
    frequency::Range eps_range{0.0, 1e-3};
    int n_e = 64;
    int n_eps = 16;
    double divisor_floor = kDefaultDivisorFloor;
    double e_tolerance = 1e-6;
    unsigned jobs = 0;
};

namespace detail {

// Drift coefficients at eccentricity e; C(e, eps) = eta_exact(e) - sum eta_k eps^k.
struct DriftColumn {
    double e = 0.0;
    double eta_exact = 0.0;
    std::vector<double> eta;
    bool failed = false;

    double C(double eps) const {
        double s = 0.0;
        for (std::size_t k = eta.size(); k-- > 0;) s = s * eps + eta[k];
        return eta_exact - s;
    }
};

inline DriftColumn drift_column(double omega, double mu, double e, const ContourConfig& c) {
    DriftColumn col;
    col.e = e;
    col.eta_exact = kepler::eta_exact(e);
    try {
        col.eta = solve_embedding(omega, e, mu, c.order, c.divisor_floor).eta;
    } catch (const SmallDivisor&) {
        col.failed = true;
    }
    return col;
}

}  // namespace detail

/// Points of the zero level set of C on the (e, eps) grid: each eps row is scanned in e
/// for sign changes and every bracketed root is refined by bisection.
inline ContourResult contour_zero_level(double omega, double mu, const ContourConfig& c) {
    if (c.n_e < 16 || c.n_eps < 16) throw DomainError("contour grid must be at least 16x16");
    const auto es = frequency::linspace(c.e_range, c.n_e);
    const auto epss = frequency::linspace(c.eps_range, c.n_eps);
    if (c.e_range.hi >= 1.0 || c.e_range.lo < 0.0) throw DomainError("e range must lie in [0,1)");

    // The drift coefficients do not depend on eps, so each e column is solved once.
    const auto columns = parallel_map<detail::DriftColumn>(
        es.size(), c.jobs, [&](std::size_t i) { return detail::drift_column(omega, mu, es[i], c); });

    struct Row {
        std::vector<ContourPoint> points;
        bool failed = false;
    };
    const auto rows = parallel_map<Row>(epss.size(), c.jobs, [&](std::size_t r) {
        Row row;
        const double eps = epss[r];
        for (std::size_t i = 0; i + 1 < columns.size(); ++i) {
            const auto& a = columns[i];
            const auto& b = columns[i + 1];
            if (a.failed || b.failed) {
                row.failed = true;
                continue;
            }
            const double ca = a.C(eps);
            const double cb = b.C(eps);
            if (ca == 0.0) {
                row.points.push_back({a.e, eps});
                continue;
            }
            if ((ca < 0.0) == (cb < 0.0) || cb == 0.0) continue;
            double lo = a.e, hi = b.e;
            bool lo_negative = ca < 0.0;
            bool ok = true;
            while (hi - lo > c.e_tolerance) {
                const double mid = 0.5 * (lo + hi);
                const auto col = detail::drift_column(omega, mu, mid, c);
                if (col.failed) {
                    ok = false;
                    break;
                }
                const double cm = col.C(eps);
                if (cm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((cm < 0.0) == lo_negative) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if (!ok) {
                row.failed = true;
                continue;
            }
            row.points.push_back({0.5 * (lo + hi), eps});
        }
        // A root exactly on the last grid node.
        if (!columns.back().failed && columns.back().C(eps) == 0.0) {
            row.points.push_back({columns.back().e, eps});
        }
        return row;
    });

    ContourResult out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].failed) out.failed_rows.push_back(epss[r]);
        out.points.insert(out.points.end(), rows[r].points.begin(), rows[r].points.end());
    }
    return out;
}

}  // namespace spinorbit::parametrization
