#pragma once

#include <stdexcept>
#include <string>

namespace spinorbit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (e.g. e >= 1).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite state produced by the integrator at stroboscopic index k.
class IntegrationBlowup : public Error {
public:
    explicit IntegrationBlowup(long k)
        : Error("integration blow-up at k=" + std::to_string(k)), k_(k) {}
    long k() const noexcept { return k_; }

private:
    long k_;
};

/// Y within the guard radius of a pole of the normalized frequency.
class NearResonance : public Error {
public:
    NearResonance(double y, double pole)
        : Error("near-resonance: Y=" + std::to_string(y) + " is within the guard radius of " +
                std::to_string(pole)),
          y_(y), pole_(pole) {}
    double y() const noexcept { return y_; }
    double pole() const noexcept { return pole_; }

private:
    double y_;
    double pole_;
};

/// |omega0*m + n| fell below the divisor floor for harmonic (m, n).
class SmallDivisor : public Error {
public:
    SmallDivisor(int m, int n, double divisor)
        : Error("small divisor " + std::to_string(divisor) + " at harmonic (m,n)=(" +
                std::to_string(m) + "," + std::to_string(n) + ")"),
          m_(m), n_(n), divisor_(divisor) {}
    int m() const noexcept { return m_; }
    int n() const noexcept { return n_; }
    double divisor() const noexcept { return divisor_; }

private:
    int m_;
    int n_;
    double divisor_;
};

/// The dissipative solvability condition cannot fix the drift (mu = 0).
class DriftUndetermined : public Error {
public:
    using Error::Error;
};

/// An operation was called on an argument violating its precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace spinorbit
