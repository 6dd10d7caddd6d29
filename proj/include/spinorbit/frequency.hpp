#pragma once

// Transient-time diagnostics: tail-averaged frequency and tail slope of the stroboscopic
// frequency sequence, and parameter sweeps of both over an (e, eps) grid.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "spinorbit/dynamics.hpp"
#include "spinorbit/errors.hpp"
#include "spinorbit/parallel.hpp"

namespace spinorbit::frequency {

struct FrequencyEstimate {
    double omega_num;
    double sigma;
    long window_begin;  // first stroboscopic index in the fit window
    long window_end;    // last index (inclusive) = T
};

/// Frequency reading of each stroboscopic sample. At zeroth order in the perturbation
/// the frequency of a state is its angular velocity, so omega_k = y_k.
inline std::vector<double> omega_sequence(const StroboscopicOrbit& orbit) {
    if (orbit.samples.empty()) throw DomainError("empty orbit");
    std::vector<double> out;
    out.reserve(orbit.samples.size());
    for (const auto& s : orbit.samples) out.push_back(s.y);
    return out;
}

/// Mean and least-squares slope of omega_k over k in [ceil(9T/10), T].
/// `omega` holds omega_0..omega_M with M >= T; entries past T are ignored.
inline FrequencyEstimate estimate(std::span<const double> omega, long T) {
    if (T < 10) throw DomainError("T must be >= 10");
    if (static_cast<long>(omega.size()) < T + 1) throw DomainError("sequence shorter than T+1");
    const long begin = (9 * T + 9) / 10;
    const long count = T - begin + 1;
    if (count < 2) throw DomainError("fit window shorter than 2 samples");

    // Centered sums keep the slope exact for affine input up to rounding.
    const double kbar = 0.5 * static_cast<double>(begin + T);
    double sum = 0.0;
    for (long k = begin; k <= T; ++k) sum += omega[static_cast<std::size_t>(k)];
    const double mean = sum / static_cast<double>(count);
    double sxy = 0.0;
    double sxx = 0.0;
    for (long k = begin; k <= T; ++k) {
        const double dk = static_cast<double>(k) - kbar;
        sxy += dk * (omega[static_cast<std::size_t>(k)] - mean);
        sxx += dk * dk;
    }
    return {mean, sxy / sxx, begin, T};
}

inline FrequencyEstimate estimate(const StroboscopicOrbit& orbit) {
    const auto omega = omega_sequence(orbit);
    return estimate(omega, orbit.periods());
}

struct Range {
    double lo;
    double hi;
};

/// n uniformly spaced values from lo to hi inclusive.
inline std::vector<double> linspace(Range r, int n) {
    if (n < 1) throw DomainError("grid size must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(n));
    if (n == 1) {
        v[0] = r.lo;
        return v;
    }
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = i == n - 1 ? r.hi : r.lo + (r.hi - r.lo) * i / (n - 1);
    }
    return v;
}

struct SweepConfig {
    double mu = 1e-3;
    long T = 12800;
    Range e_range{0.0, 0.3};
    Range eps_range{0.0, 1e-3};
    int n_e = 30;
    int n_eps = 30;
    int steps_per_period = kDefaultStepsPerPeriod;
    PotentialModel model = PotentialModel::trig_truncated;
    double x0 = 0.0;
    // Initial velocity; NaN selects the cell's own drift eta(e).
    double y0 = std::numeric_limits<double>::quiet_NaN();
    unsigned jobs = 0;
};

struct SweepCell {
    double e = 0.0;
    double eps = 0.0;
    double omega_num = std::numeric_limits<double>::quiet_NaN();
    double sigma = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    long failed_at_k = -1;
};

namespace detail {

struct CellGrid {
    std::vector<double> e;
    std::vector<double> eps;
    std::size_t size() const { return e.size() * eps.size(); }
    // Row-major: e is the outer (slow) index, eps the inner one.
    double e_at(std::size_t i) const { return e[i / eps.size()]; }
    double eps_at(std::size_t i) const { return eps[i % eps.size()]; }
};

inline CellGrid make_grid(const SweepConfig& c) {
    if (c.n_e < 2 || c.n_eps < 2) throw DomainError("sweep grids need at least 2 points per axis");
    return {linspace(c.e_range, c.n_e), linspace(c.eps_range, c.n_eps)};
}

inline StroboscopicOrbit run_cell(const SweepConfig& c, double e, double eps, long T) {
    const auto params = SpinOrbitParams::natural(eps, e, c.mu, c.model);
    const double y0 = std::isnan(c.y0) ? params.eta : c.y0;
    return integrate(c.x0, y0, params, T, c.steps_per_period);
}

}  // namespace detail

/// omega_num and sigma on every cell of the uniform (e, eps) grid, in row-major order
/// (e outer). A blow-up marks the cell as failed and the sweep continues.
inline std::vector<SweepCell> sweep(const SweepConfig& c) {
    const auto grid = detail::make_grid(c);
    return parallel_map<SweepCell>(grid.size(), c.jobs, [&](std::size_t i) {
        SweepCell cell;
        cell.e = grid.e_at(i);
        cell.eps = grid.eps_at(i);
        try {
            const auto est = estimate(detail::run_cell(c, cell.e, cell.eps, c.T));
            cell.omega_num = est.omega_num;
            cell.sigma = est.sigma;
        } catch (const IntegrationBlowup& b) {
            cell.failed = true;
            cell.failed_at_k = b.k();
        }
        return cell;
    });
}

struct SigmaAtT {
    long T;
    double max_abs_sigma;
    int failed_cells;
};

/// max |sigma| over the grid for each T in T_list (strictly increasing).
///
/// The integrator is deterministic, so an orbit of length T is the prefix of the orbit of
/// length max(T_list); each cell is integrated once and estimated at every T.
inline std::vector<SigmaAtT> sigma_vs_T(const SweepConfig& c, const std::vector<long>& T_list) {
    if (T_list.empty()) throw DomainError("T list is empty");
    for (std::size_t i = 0; i < T_list.size(); ++i) {
        if (T_list[i] < 10) throw DomainError("every T must be >= 10");
        if (i > 0 && T_list[i] <= T_list[i - 1]) throw DomainError("T list must be increasing");
    }
    const auto grid = detail::make_grid(c);
    const long t_max = T_list.back();
    // Per cell: |sigma| at each T, NaN for failed prefixes.
    auto per_cell = parallel_map<std::vector<double>>(grid.size(), c.jobs, [&](std::size_t i) {
        std::vector<double> out(T_list.size(), std::numeric_limits<double>::quiet_NaN());
        try {
            const auto omega = omega_sequence(detail::run_cell(c, grid.e_at(i), grid.eps_at(i), t_max));
            for (std::size_t j = 0; j < T_list.size(); ++j) {
                out[j] = std::abs(estimate(omega, T_list[j]).sigma);
            }
        } catch (const IntegrationBlowup& b) {
            // Prefixes that ended before the blow-up are still valid.
            for (std::size_t j = 0; j < T_list.size() && T_list[j] < b.k(); ++j) {
                out[j] = std::abs(estimate(detail::run_cell(c, grid.e_at(i), grid.eps_at(i), T_list[j])).sigma);
            }
        }
        return out;
    });
    std::vector<SigmaAtT> rows;
    for (std::size_t j = 0; j < T_list.size(); ++j) {
        SigmaAtT row{T_list[j], 0.0, 0};
        for (const auto& cell : per_cell) {
            if (std::isnan(cell[j])) {
                ++row.failed_cells;
            } else {
                row.max_abs_sigma = std::max(row.max_abs_sigma, cell[j]);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace spinorbit::frequency
