#ifndef EXTSPEC_EXPONENTS_HPP
#define EXTSPEC_EXPONENTS_HPP

#include <cmath>
#include <stdexcept>

#include "extspec/numerics.hpp"

namespace extspec {

// Dimension/exponent bundle used throughout: N >= 2, p in (1, inf),
// with the derived scalars p* (only for N > p), p', N' and omega_N.
struct ExponentContext {
    int N = 3;
    double p = 2.0;

    double p_conj = 2.0;      // p' = p/(p-1)
    double n_conj = 1.5;      // N' = N/(N-1)
    double omega_n = 0.0;     // measure of the unit ball
    double p_star = kInf;     // Np/(N-p) when N > p, +inf otherwise

    ExponentContext() { *this = ExponentContext(3, 2.0); }

    ExponentContext(int dim, double exponent) : N(dim), p(exponent) {
        if (N < 2) throw std::invalid_argument("ExponentContext: N must be >= 2");
        if (!(p > 1.0) || !std::isfinite(p))
            throw std::invalid_argument("ExponentContext: p must lie in (1, inf)");
        p_conj = p / (p - 1.0);
        n_conj = static_cast<double>(N) / (N - 1.0);
        omega_n = unit_ball_volume(N);
        p_star = (N > p) ? N * p / (N - p) : kInf;
    }

    bool subcritical() const { return static_cast<double>(N) > p; }   // N > p
    bool critical() const { return static_cast<double>(N) == p; }     // N = p
    bool supercritical() const { return static_cast<double>(N) < p; } // N < p
};

} // namespace extspec

#endif
