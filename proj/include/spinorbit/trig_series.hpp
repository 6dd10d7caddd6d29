#pragma once

// Finite real trigonometric series in two angles (theta, t):
//
//   f(theta, t) = sum over (m, n) of  c_mn cos(m theta + n t) + s_mn sin(m theta + n t)
//
// Each harmonic class is stored once under its canonical wave (m > 0, or m = 0 and n >= 0).

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>

#include "spinorbit/errors.hpp"

namespace spinorbit {

struct Wave {
    int m = 0;
    int n = 0;
    auto operator<=>(const Wave&) const = default;

    bool canonical() const { return m > 0 || (m == 0 && n >= 0); }
    /// omega0 * m + n
    double divisor(double omega0) const { return omega0 * m + n; }
};

struct Harmonic {
    double c = 0.0;
    double s = 0.0;
};

inline constexpr double kPruneRelative = 1e-16;
inline constexpr double kDefaultDivisorFloor = 1e-4;

class TrigSeries2D {
public:
    using Terms = std::map<Wave, Harmonic>;

    TrigSeries2D() = default;

    static TrigSeries2D constant(double value) {
        TrigSeries2D r;
        r.add_term(0, 0, value, 0.0);
        return r;
    }
    static TrigSeries2D cosine(int m, int n, double amplitude = 1.0) {
        TrigSeries2D r;
        r.add_term(m, n, amplitude, 0.0);
        return r.pruned();
    }
    static TrigSeries2D sine(int m, int n, double amplitude = 1.0) {
        TrigSeries2D r;
        r.add_term(m, n, 0.0, amplitude);
        return r.pruned();
    }

    /// Accumulate c cos(m theta + n t) + s sin(m theta + n t), folding into canonical form.
    void add_term(int m, int n, double c, double s) {
        Wave w{m, n};
        if (!w.canonical()) {
            w = {-m, -n};
            s = -s;
        }
        if (w.m == 0 && w.n == 0) s = 0.0;  // sin(0) vanishes
        auto& h = terms_[w];
        h.c += c;
        h.s += s;
    }

    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    Harmonic coeff(int m, int n) const {
        const Wave w{m, n};
        if (w.canonical()) {
            const auto it = terms_.find(w);
            return it == terms_.end() ? Harmonic{} : it->second;
        }
        const auto it = terms_.find({-m, -n});
        return it == terms_.end() ? Harmonic{} : Harmonic{it->second.c, -it->second.s};
    }

    double average() const { return coeff(0, 0).c; }

    double max_abs_coeff() const {
        double mx = 0.0;
        for (const auto& [w, h] : terms_) mx = std::max({mx, std::abs(h.c), std::abs(h.s)});
        return mx;
    }

    double evaluate(double theta, double t) const {
        double sum = 0.0;
        for (const auto& [w, h] : terms_) {
            const double phase = w.m * theta + w.n * t;
            sum += h.c * std::cos(phase) + h.s * std::sin(phase);
        }
        return sum;
    }

    /// Drop harmonics whose coefficients are below kPruneRelative of the largest one.
    TrigSeries2D pruned() const { return pruned(max_abs_coeff()); }

    /// Same, relative to an explicit scale (used after cancellation in sums).
    TrigSeries2D pruned(double scale) const {
        const double floor = kPruneRelative * scale;
        TrigSeries2D r;
        for (const auto& [w, h] : terms_) {
            const bool keep_c = std::abs(h.c) > floor;
            const bool keep_s = std::abs(h.s) > floor;
            if (keep_c || keep_s) r.terms_[w] = {keep_c ? h.c : 0.0, keep_s ? h.s : 0.0};
        }
        return r;
    }

    /// Same series with the constant term removed.
    TrigSeries2D without_average() const {
        TrigSeries2D r = *this;
        r.terms_.erase({0, 0});
        return r;
    }

    TrigSeries2D operator-() const { return *this * -1.0; }

    friend TrigSeries2D operator+(const TrigSeries2D& a, const TrigSeries2D& b) {
        TrigSeries2D r = a;
        for (const auto& [w, h] : b.terms_) r.add_term(w.m, w.n, h.c, h.s);
        return r.pruned(std::max(a.max_abs_coeff(), b.max_abs_coeff()));
    }
    friend TrigSeries2D operator-(const TrigSeries2D& a, const TrigSeries2D& b) {
        TrigSeries2D r = a;
        for (const auto& [w, h] : b.terms_) r.add_term(w.m, w.n, -h.c, -h.s);
        return r.pruned(std::max(a.max_abs_coeff(), b.max_abs_coeff()));
    }

    friend TrigSeries2D operator*(const TrigSeries2D& a, double k) {
        TrigSeries2D r;
        for (const auto& [w, h] : a.terms_) r.terms_[w] = {h.c * k, h.s * k};
        return r.pruned();
    }
    friend TrigSeries2D operator*(double k, const TrigSeries2D& a) { return a * k; }

    /// Product by product-to-sum expansion.
    friend TrigSeries2D operator*(const TrigSeries2D& a, const TrigSeries2D& b) {
        TrigSeries2D r;
        for (const auto& [wa, ha] : a.terms_) {
            for (const auto& [wb, hb] : b.terms_) {
                r.add_term(wa.m + wb.m, wa.n + wb.n, 0.5 * (ha.c * hb.c - ha.s * hb.s),
                           0.5 * (ha.c * hb.s + ha.s * hb.c));
                r.add_term(wa.m - wb.m, wa.n - wb.n, 0.5 * (ha.c * hb.c + ha.s * hb.s),
                           0.5 * (ha.s * hb.c - ha.c * hb.s));
            }
        }
        return r.pruned();
    }

    TrigSeries2D& operator+=(const TrigSeries2D& b) { return *this = *this + b; }

    /// One term per line: "m n c s".
    std::string dump() const {
        std::string out;
        char line[128];
        for (const auto& [w, h] : terms_) {
            std::snprintf(line, sizeof line, "%d %d %.17e %.17e\n", w.m, w.n, h.c, h.s);
            out += line;
        }
        return out;
    }

    static TrigSeries2D parse(const std::string& text) {
        TrigSeries2D r;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::istringstream ls(line);
            int m = 0, n = 0;
            double c = 0.0, s = 0.0;
            if (!(ls >> m >> n >> c >> s)) {
                throw DomainError("malformed series dump at line " + std::to_string(lineno));
            }
            r.add_term(m, n, c, s);
        }
        return r.pruned();
    }

private:
    Terms terms_;
};

/// Partial derivative in theta: cos(phi) -> -m sin(phi), sin(phi) -> m cos(phi).
inline TrigSeries2D d_theta(const TrigSeries2D& a) {
    TrigSeries2D r;
    for (const auto& [w, h] : a.terms()) {
        if (w.m != 0) r.add_term(w.m, w.n, w.m * h.s, -w.m * h.c);
    }
    return r.pruned();
}

/// D = omega0 d/dtheta + d/dt.
inline TrigSeries2D apply_D(const TrigSeries2D& a, double omega0) {
    TrigSeries2D r;
    for (const auto& [w, h] : a.terms()) {
        const double d = w.divisor(omega0);
        r.add_term(w.m, w.n, d * h.s, -d * h.c);
    }
    return r.pruned();
}

/// (D^2 + mu D) a
inline TrigSeries2D apply_D2_muD(const TrigSeries2D& a, double omega0, double mu) {
    const auto da = apply_D(a, omega0);
    return apply_D(da, omega0) + mu * da;
}

/// Solve (D^2 + mu D) u = S for zero-average S; the result has zero average.
///
/// Each harmonic with divisor d = omega0 m + n maps as
///   c cos + s sin  ->  -[c (d cos - mu sin) + s (d sin + mu cos)] / (d (d^2 + mu^2)).
inline TrigSeries2D invert_D2_muD(const TrigSeries2D& S, double omega0, double mu,
                                  double divisor_floor = kDefaultDivisorFloor) {
    if (!(divisor_floor > 0.0)) throw DomainError("divisor floor must be positive");
    const double avg = S.average();
    if (avg != 0.0 && std::abs(avg) > 1e-13 * S.max_abs_coeff()) {
        throw PreconditionError("right-hand side must have zero average, got " + std::to_string(avg));
    }
    TrigSeries2D u;
    for (const auto& [w, h] : S.terms()) {
        if (w.m == 0 && w.n == 0) continue;
        const double d = w.divisor(omega0);
        if (std::abs(d) < divisor_floor) throw SmallDivisor(w.m, w.n, d);
        const double den = d * (d * d + mu * mu);
        u.add_term(w.m, w.n, -(h.c * d + h.s * mu) / den, -(h.s * d - h.c * mu) / den);
    }
    return u.pruned();
}

}  // namespace spinorbit
