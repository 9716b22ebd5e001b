#include "extspec/numerics.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace extspec {

double gamma_lanczos(double x) {
    // Lanczos coefficients, g = 7.
    static const std::array<double, 9> coef = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection formula.
        return M_PI / (std::sin(M_PI * x) * gamma_lanczos(1.0 - x));
    }
    x -= 1.0;
    double a = coef[0];
    double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
    return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double unit_ball_volume(int dim) {
    if (dim < 1) throw std::invalid_argument("unit_ball_volume: dim must be >= 1");
    return std::pow(M_PI, 0.5 * dim) / gamma_lanczos(0.5 * dim + 1.0);
}

namespace {

GaussRule make_gauss_rule(int n) {
    // Newton iteration on Legendre polynomials; standard construction.
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_rule(n)).first;
    return it->second;
}

double integrate_panel(const std::function<double(double)>& f, double a, double b, int order) {
    const GaussRule& rule = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

namespace {

double integrate_rec(const std::function<double(double)>& f, double a, double b, double coarse,
                     double rel_tol, int depth, double scale) {
    const double mid = 0.5 * (a + b);
    const double left = integrate_panel(f, a, mid, 16);
    const double right = integrate_panel(f, mid, b, 16);
    const double fine = left + right;
    if (depth <= 0 || std::abs(fine - coarse) <= rel_tol * std::max(scale, std::abs(fine)))
        return fine;
    return integrate_rec(f, a, mid, left, rel_tol, depth - 1, scale) +
           integrate_rec(f, mid, b, right, rel_tol, depth - 1, scale);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_depth) {
    if (!(b > a)) return 0.0;
    const double coarse = integrate_panel(f, a, b, 16);
    return integrate_rec(f, a, b, coarse, rel_tol, max_depth, std::abs(coarse));
}

double golden_max(const std::function<double(double)>& f, double a, double b, double x_tol,
                  double* fmax) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > x_tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    double xm = 0.5 * (a + b);
    double fm = f(xm);
    if (f1 > fm) { xm = x1; fm = f1; }
    if (f2 > fm) { xm = x2; fm = f2; }
    if (fmax) *fmax = fm;
    return xm;
}

long golden_min_int(const std::function<double(long)>& f, long lo, long hi) {
    if (lo > hi) throw std::invalid_argument("golden_min_int: empty range");
    std::map<long, double> memo;
    auto eval = [&](long i) {
        auto it = memo.find(i);
        if (it != memo.end()) return it->second;
        double v = f(i);
        memo.emplace(i, v);
        return v;
    };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    long a = lo, b = hi;
    while (b - a > 2) {
        long x1 = a + static_cast<long>(std::floor((1.0 - phi) * (b - a)));
        long x2 = a + static_cast<long>(std::ceil(phi * (b - a)));
        if (x1 <= a) x1 = a + 1;
        if (x2 >= b) x2 = b - 1;
        if (x1 >= x2) { x1 = a + (b - a) / 3 + ((b - a) % 3 ? 1 : 0); x2 = b - (b - a) / 3; }
        if (x1 >= x2) break;
        if (eval(x1) <= eval(x2)) b = x2; else a = x1;
    }
    long best = a;
    for (long i = a; i <= b; ++i)
        if (eval(i) < eval(best)) best = i;
    return best;
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

double signed_pow(double x, double pm1) {
    if (x == 0.0) return 0.0;
    return (x > 0 ? 1.0 : -1.0) * std::pow(std::abs(x), pm1);
}

double rel_diff(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace extspec
