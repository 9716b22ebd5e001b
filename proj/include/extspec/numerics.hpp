#ifndef EXTSPEC_NUMERICS_HPP
#define EXTSPEC_NUMERICS_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace extspec {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Gamma function, Lanczos approximation (g=7, 9 terms).
// Good to ~1e-13 relative on the real axis away from poles.
double gamma_lanczos(double x);

// Measure of the unit ball in R^N: pi^{N/2} / Gamma(N/2 + 1).
double unit_ball_volume(int dim);

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

// Fixed-order panel integral of f over [a, b].
double integrate_panel(const std::function<double(double)>& f, double a, double b, int order = 16);

// Adaptive panel-splitting integral of f over [a, b] (finite interval).
// Splits until the 16- vs 32-point estimates agree to rel_tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, int max_depth = 40);

// Golden-section maximization of a unimodal-ish f on [a, b].
// Returns the argmax; *fmax receives the value if non-null.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double x_tol = 1e-10, double* fmax = nullptr);

// Golden-section (Fibonacci-style) minimization over integer indices [lo, hi].
// f is evaluated lazily and memoized by the caller if needed.
long golden_min_int(const std::function<double(long)>& f, long lo, long hi);

// FNV-1a 64-bit digest of a byte string, hex-encoded.
std::string fnv1a64_hex(const std::string& bytes);

// sign(x) * |x|^{p-1}, the derivative kernel of |x|^p / p.
double signed_pow(double x, double pm1);

// Relative difference |a-b| / max(|a|, |b|, floor).
double rel_diff(double a, double b, double floor = 1e-300);

} // namespace extspec

#endif
