#include "extspec/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

namespace extspec::rearrange {

namespace {

constexpr double kTiny = 1e-300;

double pow_int(double x, int n) { return std::pow(x, static_cast<double>(n)); }

// Head scan of a profile on [r_inner, tail_start]: radii and cached values,
// used for level-set bracketing. Between consecutive scan points the profile
// is treated as monotone.
struct ProfileScan {
    const RadialProfile* pr = nullptr;
    double omega = 0.0;
    std::vector<double> radii;
    std::vector<double> vals;
    double head_max = 0.0;
    bool head_monotone = true;

    explicit ProfileScan(const RadialProfile& p, int points = 1024) : pr(&p) {
        omega = unit_ball_volume(p.dim);
        const double a = p.r_inner, b = p.tail_start;
        if (b > a) {
            std::vector<double> grid;
            grid.push_back(a);
            grid.push_back(b);
            for (double bp : p.breakpoints)
                if (bp > a && bp < b) {
                    grid.push_back(bp);
                    grid.push_back(std::nextafter(bp, a));
                    grid.push_back(std::nextafter(bp, b));
                }
            const double lo = std::max(a, 1e-12 * b);
            if (b / std::max(a, 1e-6) > 50.0 && lo < b) {
                for (int i = 0; i <= points; ++i)
                    grid.push_back(lo * std::pow(b / lo, i / static_cast<double>(points)));
                for (int i = 1; i < 256; ++i) grid.push_back(a + (b - a) * i / 256.0);
            } else {
                for (int i = 1; i < points; ++i)
                    grid.push_back(a + (b - a) * i / static_cast<double>(points));
            }
            std::sort(grid.begin(), grid.end());
            grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
            radii = std::move(grid);
            vals.reserve(radii.size());
            for (double r : radii) vals.push_back(p.abs_value(r));
            for (double v : vals) head_max = std::max(head_max, v);
            for (std::size_t i = 1; i < vals.size(); ++i)
                if (vals[i] > vals[i - 1] * (1.0 + 1e-10) + 1e-300) {
                    head_monotone = false;
                    break;
                }
            if (head_monotone && p.tail_coef > 0.0) {
                const double vt = p.abs_value(b);
                if (!vals.empty() && vals.back() < vt * (1.0 - 1e-10) - 1e-300)
                    head_monotone = false;
            }
        }
    }

    bool head_empty() const { return radii.empty(); }
    bool head_zero() const { return head_max <= 0.0; }

    // Measure (with omega factor) of { r in head : |f(r)| > s }.
    double head_measure(double s) const {
        if (head_empty() || head_max <= s) return 0.0;
        double total = 0.0;
        bool above = vals[0] > s;
        double open_at = above ? radii[0] : 0.0;
        for (std::size_t i = 1; i < radii.size(); ++i) {
            const bool now = vals[i] > s;
            if (now == above) continue;
            const double rc = refine_crossing(radii[i - 1], radii[i], s);
            if (above) total += pow_int(rc, pr->dim) - pow_int(open_at, pr->dim);
            else open_at = rc;
            above = now;
        }
        if (above) total += pow_int(radii.back(), pr->dim) - pow_int(open_at, pr->dim);
        return omega * total;
    }

    double refine_crossing(double a, double b, double s) const {
        double fa = pr->abs_value(a) - s;
        for (int it = 0; it < 90; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = pr->abs_value(m) - s;
            if ((fm > 0) == (fa > 0)) { a = m; fa = fm; }
            else b = m;
            if (b - a <= 1e-14 * b) break;
        }
        return 0.5 * (a + b);
    }

    // Crossing radius of the (monotone) tail, inf when the level set is
    // unbounded, tail_start when empty.
    double tail_crossing(double s) const {
        const RadialProfile& p = *pr;
        if (p.tail_coef <= 0.0) return p.tail_start;
        if (p.tail_exp <= 0.0) return kInf; // non-decaying tail
        const double rho_env = std::pow(p.tail_coef / s, 1.0 / p.tail_exp);
        if (p.tail_exact) return std::max(rho_env, p.tail_start);
        // f <= envelope, so the crossing lies in [tail_start, rho_env]
        if (p.abs_value(p.tail_start) <= s || rho_env <= p.tail_start) return p.tail_start;
        return refine_crossing_tail(std::max(p.tail_start, kTiny), rho_env, s);
    }

    double refine_crossing_tail(double a, double b, double s) const {
        // f > s at a, f <= s at b (envelope); bisect
        for (int it = 0; it < 110; ++it) {
            const double m = std::sqrt(a * b);
            if (pr->abs_value(m) > s) a = m;
            else b = m;
            if (b - a <= 1e-14 * b) break;
        }
        return 0.5 * (a + b);
    }

    double dist(double s) const {
        const RadialProfile& p = *pr;
        double total = head_measure(s);
        const double rho = tail_crossing(s);
        if (std::isinf(rho)) return kInf;
        if (rho > p.tail_start)
            total += omega * (pow_int(rho, p.dim) - pow_int(p.tail_start, p.dim));
        return total;
    }

    double sup_abs() const {
        double s = head_max;
        const RadialProfile& p = *pr;
        if (p.tail_coef > 0.0) {
            if (p.tail_start <= p.r_inner && p.r_inner == 0.0) return kInf; // pure power at 0
            s = std::max(s, p.abs_value(std::max(p.tail_start, p.r_inner)));
        }
        return s;
    }
};

} // namespace

SampledFunction SampledFunction::from_cells(std::vector<Cell> cells) {
    for (const Cell& c : cells) {
        if (!(c.measure > 0.0) || !std::isfinite(c.measure))
            throw std::invalid_argument("SampledFunction: cell measures must be positive and finite");
        if (!std::isfinite(c.value))
            throw std::invalid_argument("SampledFunction: cell values must be finite");
    }
    SampledFunction f;
    f.cells_ = std::move(cells);
    return f;
}

SampledFunction SampledFunction::indicator(double measure) {
    return from_cells({{1.0, measure}});
}

SampledFunction SampledFunction::from_profile(RadialProfile profile) {
    if (!profile.abs_value) throw std::invalid_argument("SampledFunction: profile needs a value map");
    if (profile.r_inner < 0.0) throw std::invalid_argument("SampledFunction: r_inner must be >= 0");
    if (profile.tail_start < profile.r_inner)
        throw std::invalid_argument("SampledFunction: tail_start must be >= r_inner");
    if (profile.dim < 1) throw std::invalid_argument("SampledFunction: profile dim must be >= 1");
    SampledFunction f;
    f.profile_ = std::move(profile);
    return f;
}

SampledFunction SampledFunction::power_profile(double coef, double expo, int dim, double r_inner) {
    if (!(coef > 0.0) || !(expo > 0.0))
        throw std::invalid_argument("SampledFunction::power_profile: coef, expo must be positive");
    RadialProfile p;
    p.abs_value = [coef, expo](double r) { return coef * std::pow(r, -expo); };
    p.dim = dim;
    p.r_inner = r_inner;
    p.tail_start = r_inner;
    p.tail_coef = coef;
    p.tail_exp = expo;
    p.tail_exact = true;
    return from_profile(p);
}

double SampledFunction::cell_measure() const {
    double m = 0.0;
    for (const Cell& c : cells_) m += c.measure;
    return m;
}

double distribution(const SampledFunction& f, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("distribution: s must be positive");
    double total = 0.0;
    for (const Cell& c : f.cells())
        if (std::abs(c.value) > s) total += c.measure;
    if (f.profile()) total += ProfileScan(*f.profile()).dist(s);
    return total;
}

// ---------------------------------------------------------------------------
// RearrangedFunction
// ---------------------------------------------------------------------------

void RearrangedFunction::finalize() {
    prefix_.assign(breaks_.size(), 0.0);
    for (std::size_t i = 1; i < breaks_.size(); ++i)
        prefix_[i] = prefix_[i - 1] + vals_[i - 1] * (breaks_[i] - breaks_[i - 1]);
}

RearrangedFunction RearrangedFunction::from_steps(std::vector<double> breaks,
                                                  std::vector<double> values) {
    if (breaks.size() != values.size() + 1 || breaks.empty() || breaks.front() != 0.0)
        throw std::invalid_argument("RearrangedFunction: breaks must start at 0 and bound values");
    for (std::size_t i = 1; i < breaks.size(); ++i)
        if (!(breaks[i] > breaks[i - 1]))
            throw std::invalid_argument("RearrangedFunction: breaks must increase");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[i - 1] * (1.0 + 1e-14))
            throw std::invalid_argument("RearrangedFunction: values must be non-increasing");
    RearrangedFunction r;
    r.breaks_ = std::move(breaks);
    r.vals_ = std::move(values);
    r.finalize();
    return r;
}

RearrangedFunction RearrangedFunction::pure_power(double coef, double expo) {
    RearrangedFunction r;
    r.breaks_ = {0.0};
    Tail t;
    t.t_begin = 0.0;
    t.coef = coef;
    t.shift = 0.0;
    t.expo = expo;
    t.exact = true;
    r.tail_ = t;
    r.finalize();
    return r;
}

RearrangedFunction RearrangedFunction::constant(double value) {
    RearrangedFunction r;
    r.breaks_ = {0.0};
    Tail t;
    t.t_begin = 0.0;
    t.coef = value;
    t.shift = 1.0;
    t.expo = 0.0;
    t.exact = true;
    r.tail_ = t;
    r.finalize();
    return r;
}

double RearrangedFunction::value(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("RearrangedFunction::value: t must be positive");
    if (!breaks_.empty() && t < breaks_.back()) {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
        return vals_[i - 1];
    }
    if (tail_) {
        const Tail& tl = *tail_;
        if (t >= tl.t_begin) {
            if (tl.exact) return tl.coef * std::pow(t + tl.shift, -tl.expo);
            return tl.value(t);
        }
        // smooth region between steps and tail
        if (smooth_) return smooth_(t);
    }
    return 0.0;
}

double RearrangedFunction::sup_value() const {
    if (!vals_.empty()) return vals_.front();
    if (tail_ && tail_->t_begin <= 0.0) {
        const Tail& tl = *tail_;
        if (tl.coef <= 0.0) return 0.0;
        if (tl.exact && tl.shift == 0.0 && tl.expo > 0.0) return kInf;
        if (tl.exact) return tl.coef * std::pow(tl.shift, -tl.expo);
        return tl.value(kTiny);
    }
    if (smooth_) return smooth_(kTiny);
    if (tail_) return value(std::max(tail_->t_begin, kTiny));
    return 0.0;
}

double RearrangedFunction::support_measure() const { return support_; }

double RearrangedFunction::integral0(double t) const {
    if (!(t > 0.0)) return 0.0;
    double acc = 0.0;
    double covered = 0.0;
    if (!breaks_.empty()) {
        if (t <= breaks_.back()) {
            auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
            return prefix_[i - 1] + vals_[i - 1] * (t - breaks_[i - 1]);
        }
        acc = prefix_.back();
        covered = breaks_.back();
    }
    if (!tail_) return acc;
    const Tail& tl = *tail_;
    const double smooth_hi = std::min(t, tl.t_begin);
    if (smooth_hi > covered && smooth_) {
        if (covered > 0.0) {
            acc += integrate_adaptive(
                [this](double u) { const double x = std::exp(u); return smooth_(x) * x; },
                std::log(covered), std::log(smooth_hi), 1e-10);
        } else {
            // dyadic panels toward 0; the integrand is bounded there
            double hi = smooth_hi;
            for (int k = 0; k < 320; ++k) {
                const double half = hi * 0.5;
                const double part = integrate_adaptive(
                    [this](double u) { const double x = std::exp(u); return smooth_(x) * x; },
                    std::log(half), std::log(hi), 1e-10);
                acc += part;
                hi = half;
                if (part < 1e-13 * std::max(acc, 1e-300) && k > 6) break;
            }
        }
        covered = smooth_hi;
    }
    if (t <= tl.t_begin || tl.coef <= 0.0) return acc;
    const double a = std::max(covered, tl.t_begin);
    if (tl.exact) {
        if (a <= 0.0 && tl.shift == 0.0 && tl.expo >= 1.0) return kInf;
        const double lo = a + tl.shift, hi = t + tl.shift;
        if (tl.expo == 1.0) acc += tl.coef * std::log(hi / lo);
        else acc += tl.coef * (std::pow(hi, 1.0 - tl.expo) - std::pow(lo, 1.0 - tl.expo)) / (1.0 - tl.expo);
        return acc;
    }
    // numeric tail integral under log substitution x = a * e^u
    if (t > a) {
        const double umax = std::log(t / a);
        acc += integrate_adaptive([&](double u) { const double x = a * std::exp(u);
                                                  return tl.value(x) * x; },
                                  0.0, umax, 1e-9);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// decreasing_rearrangement
// ---------------------------------------------------------------------------

namespace {

// Sorted descending steps from cells; zero-valued cells are dropped.
void steps_from_cells(const std::vector<Cell>& cells, std::vector<double>& breaks,
                      std::vector<double>& vals) {
    std::vector<Cell> sorted;
    sorted.reserve(cells.size());
    for (const Cell& c : cells)
        if (std::abs(c.value) > 0.0) sorted.push_back({std::abs(c.value), c.measure});
    std::sort(sorted.begin(), sorted.end(),
              [](const Cell& a, const Cell& b) { return a.value > b.value; });
    breaks = {0.0};
    vals.clear();
    for (const Cell& c : sorted) {
        if (!vals.empty() && vals.back() == c.value) {
            breaks.back() += c.measure;
        } else {
            vals.push_back(c.value);
            breaks.push_back(breaks.back() + c.measure);
        }
    }
}

// Inversion table for a general (possibly non-monotone) alpha function.
struct InversionTable {
    std::vector<double> svals; // descending
    std::vector<double> tvals; // ascending (alpha at svals)

    double value(double t) const {
        if (svals.empty()) return 0.0;
        if (t <= tvals.front()) return svals.front();
        if (t >= tvals.back()) return svals.back();
        auto it = std::upper_bound(tvals.begin(), tvals.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - tvals.begin());
        const double t0 = tvals[i - 1], t1 = tvals[i];
        const double s0 = svals[i - 1], s1 = svals[i];
        if (!(t1 > t0)) return s1;
        if (s0 > 0 && s1 > 0 && t0 > 0) {
            // log-log interpolation
            const double w = std::log(t / t0) / std::log(t1 / t0);
            return s0 * std::pow(s1 / s0, w);
        }
        const double w = (t - t0) / (t1 - t0);
        return s0 + w * (s1 - s0);
    }
};

} // namespace

RearrangedFunction decreasing_rearrangement(const SampledFunction& f) {
    RearrangedFunction out;
    if (!f.profile()) {
        steps_from_cells(f.cells(), out.breaks_, out.vals_);
        out.support_ = out.breaks_.back();
        out.finalize();
        return out;
    }

    const RadialProfile& pr = *f.profile();
    auto scan = std::make_shared<ProfileScan>(pr);
    const double omega = scan->omega;
    const int dim = pr.dim;
    const bool cells_present = !f.cells().empty();

    const bool head_trivial = scan->head_empty() || scan->head_zero();
    const bool invert_directly = !cells_present && (head_trivial || scan->head_monotone);

    if (invert_directly) {
        // f is non-increasing past an inner shell, so f*(t) = f(rho(t)) with
        // rho(t) = ((t + omega*base^N)/omega)^{1/N}.
        const double base = head_trivial ? (scan->head_zero() && !scan->head_empty()
                                                ? pr.tail_start
                                                : pr.r_inner)
                                         : pr.r_inner;
        const double shift = omega * pow_int(base, dim);
        const double t_tail = omega * (pow_int(pr.tail_start, dim) - pow_int(base, dim));
        out.breaks_ = {0.0};
        if (t_tail > 0.0) {
            auto prof = pr; // copy for lifetime safety
            out.smooth_ = [prof, omega, shift, dim](double t) {
                const double rho = std::pow((t + shift) / omega, 1.0 / dim);
                return prof.abs_value(std::min(std::max(rho, prof.r_inner), prof.tail_start));
            };
        }
        RearrangedFunction::Tail tl;
        tl.t_begin = t_tail;
        if (pr.tail_coef <= 0.0) {
            tl.coef = 0.0;
            tl.expo = 1.0;
            tl.exact = true;
            out.support_ = scan->head_measure(kTiny);
        } else {
            tl.expo = pr.tail_exp / dim;
            tl.shift = shift;
            if (pr.tail_exact) {
                tl.exact = true;
                tl.coef = pr.tail_coef * std::pow(omega, pr.tail_exp / dim);
            } else {
                tl.exact = false;
                tl.coef = 2.0 * pr.tail_coef * std::pow(omega, pr.tail_exp / dim); // envelope
                auto prof = pr;
                tl.value = [prof, omega, shift, dim](double t) {
                    const double rho = std::pow((t + shift) / omega, 1.0 / dim);
                    return prof.abs_value(std::max(rho, prof.tail_start));
                };
            }
            out.support_ = kInf;
        }
        out.tail_ = tl;
        out.finalize();
        return out;
    }

    // General path: tabulated inversion of the combined distribution.
    std::vector<double> cell_breaks, cell_vals;
    steps_from_cells(f.cells(), cell_breaks, cell_vals);
    auto alpha = [&](double s) {
        double total = scan->dist(s);
        for (std::size_t i = 0; i < cell_vals.size(); ++i)
            if (cell_vals[i] > s) total += cell_breaks[i + 1] - cell_breaks[i];
        return total;
    };

    double s_max = scan->sup_abs();
    for (double v : cell_vals) s_max = std::max(s_max, v);
    if (std::isinf(s_max)) {
        // unbounded only through a pure power at the origin; fall back to a
        // large finite cap (values above it occupy negligible measure)
        s_max = 1e30;
    }
    auto table = std::make_shared<InversionTable>();
    const int knots = 2048;
    double prev_t = -1.0;
    for (int i = 0; i <= knots; ++i) {
        const double s = s_max * std::pow(10.0, -20.0 * i / knots) * 1.0000001;
        const double t = alpha(s);
        if (std::isinf(t)) break;
        if (t > prev_t) {
            table->svals.push_back(s);
            table->tvals.push_back(t);
            prev_t = t;
        }
    }
    for (double v : cell_vals) {
        // exact knots at cell values keep the step structure sharp
        const double below = alpha(v);
        if (!table->tvals.empty() && below > table->tvals.back()) {
            table->svals.push_back(v);
            table->tvals.push_back(below);
        }
    }
    out.breaks_ = {0.0};
    const double t_grid_end = table->tvals.empty() ? 0.0 : table->tvals.back();
    out.smooth_ = [table](double t) { return table->value(t); };
    RearrangedFunction::Tail tl;
    tl.t_begin = t_grid_end;
    if (pr.tail_coef > 0.0 && pr.tail_exp > 0.0) {
        tl.exact = false;
        tl.expo = pr.tail_exp / dim;
        tl.shift = 0.0;
        tl.coef = 4.0 * pr.tail_coef * std::pow(omega, pr.tail_exp / dim);
        tl.value = [table](double t) { return table->value(t); };
        out.support_ = kInf;
    } else {
        tl.exact = true;
        tl.coef = 0.0;
        tl.expo = 1.0;
        out.support_ = alpha(kTiny);
    }
    out.tail_ = tl;
    out.finalize();
    return out;
}

double maximal_function(const RearrangedFunction& fstar, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("maximal_function: t must be positive");
    const double I = fstar.integral0(t);
    if (std::isinf(I)) return kInf;
    return I / t;
}

RadialProfile schwarz_symmetrization(const SampledFunction& f, const ExponentContext& ctx) {
    auto fs = std::make_shared<RearrangedFunction>(decreasing_rearrangement(f));
    const double omega = ctx.omega_n;
    const int dim = ctx.N;
    RadialProfile out;
    out.dim = dim;
    out.r_inner = 0.0;
    out.abs_value = [fs, omega, dim](double r) {
        const double t = omega * pow_int(r, dim);
        return t <= 0.0 ? fs->sup_value() : fs->value(t);
    };
    const double support = fs->support_measure();
    if (std::isinf(support)) {
        const auto& tl = fs->tail();
        out.tail_start = tl && tl->t_begin > 0.0
                             ? std::pow(tl->t_begin / omega, 1.0 / dim)
                             : 0.0;
        if (tl) {
            out.tail_exp = tl->expo * dim;
            out.tail_coef = tl->coef * std::pow(omega, -tl->expo) * (tl->exact && tl->shift == 0.0 ? 1.0 : 2.0);
            out.tail_exact = tl->exact && tl->shift == 0.0;
        }
    } else {
        out.tail_start = std::pow(support / omega, 1.0 / dim);
        out.tail_coef = 0.0;
        out.tail_exact = true;
    }
    for (double b : fs->step_breaks())
        if (b > 0.0) out.breakpoints.push_back(std::pow(b / omega, 1.0 / dim));
    return out;
}

// ---------------------------------------------------------------------------
// Lorentz functionals
// ---------------------------------------------------------------------------

namespace {

void check_index(const LorentzIndex& idx) {
    if (!(idx.p > 1.0) || std::isinf(idx.p))
        throw std::invalid_argument("LorentzIndex: p must lie in (1, inf)");
    if (!(idx.q >= 1.0)) throw std::invalid_argument("LorentzIndex: q must be >= 1 or inf");
}

// sup over [a, b] of h on a log grid plus golden refinement
double log_grid_sup(const std::function<double(double)>& h, double a, double b, int n = 256) {
    if (!(b > a) || !(a > 0.0)) return 0.0;
    double best = -kInf;
    double best_x = a;
    for (int i = 0; i <= n; ++i) {
        const double x = a * std::pow(b / a, i / static_cast<double>(n));
        const double v = h(x);
        if (v > best) { best = v; best_x = x; }
    }
    const double lo = best_x / std::pow(b / a, 1.0 / n);
    const double hi = best_x * std::pow(b / a, 1.0 / n);
    double fm = best;
    golden_max([&](double u) { return h(std::exp(u)); }, std::log(std::max(lo, a)),
               std::log(std::min(hi, b)), 1e-12, &fm);
    return std::max(best, fm);
}

// \int_a^b t^{c-1} f(t)^q dt by adaptive panels in log t (a > 0)
double weighted_integral(const RearrangedFunction& fs, double c, double q, double a, double b) {
    if (!(b > a)) return 0.0;
    return integrate_adaptive(
        [&](double u) {
            const double t = std::exp(u);
            const double v = fs.value(t);
            return std::pow(t, c) * std::pow(v, q); // extra t from dt = t du
        },
        std::log(a), std::log(b), 1e-9);
}

} // namespace

double lorentz_quasinorm(const RearrangedFunction& fs, const LorentzIndex& idx) {
    check_index(idx);
    const double p = idx.p;
    const auto& breaks = fs.step_breaks();
    const auto& vals = fs.step_values();
    const auto& tail = fs.tail();

    if (std::isinf(idx.q)) {
        double best = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            best = std::max(best, std::pow(breaks[i + 1], 1.0 / p) * vals[i]);
        const double steps_end = fs.steps_end();
        if (tail) {
            const auto& tl = *tail;
            if (tl.t_begin > steps_end) {
                const double lo = std::max(steps_end, 1e-14 * tl.t_begin);
                best = std::max(best, log_grid_sup(
                    [&](double t) { return std::pow(t, 1.0 / p) * fs.value(t); }, lo, tl.t_begin));
            }
            if (tl.coef > 0.0) {
                if (tl.exact) {
                    const double e = tl.expo;
                    if (tl.shift == 0.0) {
                        if (e < 1.0 / p) return kInf;               // grows at infinity
                        if (tl.t_begin == 0.0 && e > 1.0 / p) return kInf; // blows up at 0
                        if (e == 1.0 / p) best = std::max(best, tl.coef);
                        if (tl.t_begin > 0.0)
                            best = std::max(best, std::pow(tl.t_begin, 1.0 / p) * fs.value(tl.t_begin));
                    } else {
                        if (e < 1.0 / p) return kInf;
                        if (e == 1.0 / p) best = std::max(best, tl.coef); // limit at infinity
                        const double tb = std::max(tl.t_begin, kTiny);
                        best = std::max(best, std::pow(tb, 1.0 / p) * fs.value(tb));
                        if (p * e > 1.0) {
                            const double tc = tl.shift / (p * e - 1.0);
                            if (tc > tl.t_begin)
                                best = std::max(best, std::pow(tc, 1.0 / p) * fs.value(tc));
                        }
                    }
                } else {
                    if (tl.expo < 1.0 / p) return kInf;
                    const double lo = std::max(tl.t_begin, kTiny);
                    best = std::max(best, log_grid_sup(
                        [&](double t) { return std::pow(t, 1.0 / p) * fs.value(t); }, lo, lo * 1e24, 512));
                }
            }
        }
        return best;
    }

    const double q = idx.q;
    const double c = q / p; // integrand t^{c-1} v^q
    double acc = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        acc += std::pow(vals[i], q) * (std::pow(breaks[i + 1], c) - std::pow(breaks[i], c)) / c;
    const auto root = [q](double x) { return std::isinf(x) ? x : std::pow(x, 1.0 / q); };
    if (!tail) return root(acc);
    const auto& tl = *tail;
    const double steps_end = fs.steps_end();
    // smooth region
    if (tl.t_begin > steps_end) {
        double lo = steps_end;
        if (lo == 0.0) {
            // dyadic panels toward 0; bounded value near 0 in this regime
            double hi = tl.t_begin;
            for (int k = 0; k < 300; ++k) {
                const double half = hi * 0.5;
                const double part = weighted_integral(fs, c, q, half, hi);
                acc += part;
                hi = half;
                if (part < 1e-12 * std::max(acc, 1e-300) && k > 6) break;
            }
        } else {
            acc += weighted_integral(fs, c, q, lo, tl.t_begin);
        }
    }
    if (tl.coef <= 0.0) return root(acc);
    if (tl.exact) {
        const double e = tl.expo;
        if (e <= 1.0 / p) return kInf;
        if (tl.shift == 0.0) {
            if (tl.t_begin <= 0.0) return kInf; // diverges at the origin
            return root(acc + std::pow(tl.coef, q) * std::pow(tl.t_begin, c - e * q) / (e * q - c));
        }
        const double split = std::max({tl.t_begin, tl.shift * 1e8, 1.0});
        acc += weighted_integral(fs, c, q, std::max(tl.t_begin, kTiny), split);
        acc += std::pow(tl.coef, q) * std::pow(split, c - e * q) / (e * q - c);
        return root(acc);
    }
    // non-exact tail: expanding log panels; contributions behave like a power
    // of u = log t for the profiles handled here
    if (tl.expo < 1.0 / p) return kInf;
    double lo = std::max(tl.t_begin, kTiny);
    double prev = -1.0;
    for (int k = 0; k < 2000; ++k) {
        const double hi = lo * std::exp(2.0);
        const double part = weighted_integral(fs, c, q, lo, hi);
        acc += part;
        if (part < 1e-11 * std::max(acc, 1e-300)) return root(acc);
        if (prev > 0.0 && part >= prev && k > 60) return kInf; // no decay
        if (k >= 500 && prev > 0.0 && part < prev) {
            // fit part(u) ~ A u^{-m} between the last two panel midpoints
            const double u_cur = std::log(lo) + 1.0;
            const double u_prev = u_cur - 2.0;
            const double m = std::log(prev / part) / std::log(u_cur / u_prev);
            if (m > 1.01) return root(acc + part * u_cur / ((m - 1.0) * 2.0));
            return kInf;
        }
        prev = part;
        lo = hi;
    }
    return root(acc);
}

double lorentz_norm(const RearrangedFunction& fs, const LorentzIndex& idx) {
    check_index(idx);
    const double p = idx.p;
    const double quasi = lorentz_quasinorm(fs, idx);
    if (std::isinf(quasi) || quasi == 0.0) return quasi;

    const auto& breaks = fs.step_breaks();
    const auto& vals = fs.step_values();
    const auto& tail = fs.tail();
    auto fss = [&](double t) {
        const double I = fs.integral0(t);
        return std::isinf(I) ? kInf : I / t;
    };

    if (std::isinf(idx.q)) {
        // sup t^{1/p-1} F(t)
        double best = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double b0 = breaks[i], b1 = breaks[i + 1];
            const double F0 = fs.integral0(std::max(b0, kTiny));
            const double A = F0 - vals[i] * b0;
            auto h = [&](double t) { return std::pow(t, 1.0 / p - 1.0) * (A + vals[i] * t); };
            best = std::max(best, h(b1));
            if (vals[i] > 0.0) {
                const double tc = (p - 1.0) * A / vals[i];
                if (tc > b0 && tc < b1) best = std::max(best, h(tc));
            }
            if (b0 > 0.0) best = std::max(best, h(b0));
        }
        double t_hi = std::max({fs.steps_end(), tail ? tail->t_begin : 0.0,
                                tail ? tail->shift : 0.0, 1.0}) * 1e10;
        double t_lo = fs.steps_end();
        if (t_lo <= 0.0) t_lo = std::max(1e-14 * t_hi, kTiny);
        best = std::max(best, log_grid_sup(
            [&](double t) { return std::pow(t, 1.0 / p) * fss(t); }, t_lo, t_hi, 512));
        if (tail && tail->coef > 0.0 && tail->exact && tail->expo == 1.0 / p)
            best = std::max(best, tail->coef / (1.0 - 1.0 / p)); // limit at infinity
        return best;
    }

    const double q = idx.q;
    const double c = q / p;
    double acc = 0.0;
    double lo = 0.0;
    if (!vals.empty()) {
        acc += std::pow(vals[0], q) * std::pow(breaks[1], c) / c; // f** = v1 on [0, b1)
        lo = breaks[1];
        for (std::size_t i = 1; i < vals.size(); ++i) {
            acc += integrate_adaptive(
                [&](double t) { return std::pow(t, c - 1.0) * std::pow(fss(t), q); },
                breaks[i], breaks[i + 1], 1e-9);
            lo = breaks[i + 1];
        }
    }
    if (lo <= 0.0) {
        // profile-backed: start from a small fraction of the tail scale
        const double scale = tail && tail->t_begin > 0 ? tail->t_begin : 1.0;
        double hi = scale;
        for (int k = 0; k < 260; ++k) {
            const double half = hi * 0.5;
            const double part = integrate_adaptive(
                [&](double u) { const double t = std::exp(u);
                                return std::pow(t, c) * std::pow(fss(t), q); },
                std::log(half), std::log(hi), 1e-9);
            acc += part;
            hi = half;
            if (part < 1e-12 * std::max(acc, 1e-300) && k > 6) break;
        }
        lo = scale;
    }
    // expanding panels until the far field is captured
    double prev = -1.0;
    for (int k = 0; k < 2000; ++k) {
        const double hi = lo * std::exp(2.0);
        const double part = integrate_adaptive(
            [&](double u) { const double t = std::exp(u);
                            return std::pow(t, c) * std::pow(fss(t), q); },
            std::log(lo), std::log(hi), 1e-9);
        acc += part;
        if (part < 1e-11 * std::max(acc, 1e-300)) break;
        if (k >= 500 && prev > 0.0 && part < prev) {
            const double u_cur = std::log(lo) + 1.0;
            const double m = std::log(prev / part) / std::log(u_cur / (u_cur - 2.0));
            if (m > 1.01) acc += part * u_cur / ((m - 1.0) * 2.0);
            break;
        }
        prev = part;
        lo = hi;
    }
    return std::pow(acc, 1.0 / q);
}

double lorentz_quasinorm(const SampledFunction& f, const LorentzIndex& idx) {
    check_index(idx);
    if (std::isinf(idx.q)) return weak_quasinorm_from_distribution(f, idx.p);
    return lorentz_quasinorm(decreasing_rearrangement(f), idx);
}

double lorentz_norm(const SampledFunction& f, const LorentzIndex& idx) {
    return lorentz_norm(decreasing_rearrangement(f), idx);
}

double weak_quasinorm_from_distribution(const SampledFunction& f, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("weak quasinorm: p must exceed 1");
    double best = 0.0;
    // cells: alpha is a right-continuous step function of s; the sup over
    // each plateau is attained at the cell value
    std::vector<Cell> sorted;
    for (const Cell& c : f.cells())
        if (std::abs(c.value) > 0.0) sorted.push_back({std::abs(c.value), c.measure});
    std::sort(sorted.begin(), sorted.end(),
              [](const Cell& a, const Cell& b) { return a.value > b.value; });
    if (!f.profile()) {
        double m = 0.0;
        for (const Cell& c : sorted) {
            m += c.measure;
            best = std::max(best, c.value * std::pow(m, 1.0 / p));
        }
        return best;
    }
    ProfileScan scan(*f.profile());
    auto alpha = [&](double s) {
        double total = scan.dist(s);
        for (const Cell& c : sorted)
            if (c.value > s) total += c.measure;
        return total;
    };
    auto h = [&](double s) {
        const double a = alpha(s);
        return std::isinf(a) ? kInf : s * std::pow(a, 1.0 / p);
    };
    double s_hi = scan.sup_abs();
    for (const Cell& c : sorted) s_hi = std::max(s_hi, c.value);
    const RadialProfile& pr = *f.profile();
    // analytic behaviour as s -> 0 driven by the power tail
    if (pr.tail_coef > 0.0 && pr.tail_exp > 0.0) {
        const double theta = 1.0 - pr.dim / (pr.tail_exp * p);
        if (theta < 0.0) return kInf;
        if (theta == 0.0 && pr.tail_exact)
            best = std::max(best, std::pow(scan.omega, 1.0 / p) *
                                      std::pow(pr.tail_coef, pr.dim / (pr.tail_exp * p)));
    } else if (pr.tail_coef > 0.0) {
        return kInf; // non-decaying tail of positive size
    }
    if (std::isinf(s_hi)) s_hi = 1e30;
    const double s_lo = s_hi * 1e-24;
    best = std::max(best, log_grid_sup(h, s_lo, s_hi, 600));
    for (const Cell& c : sorted) best = std::max(best, h(c.value));
    return best;
}

// ---------------------------------------------------------------------------
// Inequality checkers
// ---------------------------------------------------------------------------

InequalityCheck check_hardy_littlewood(const SampledFunction& f, const SampledFunction& g,
                                       double rel_tol) {
    if (f.profile() || g.profile())
        throw std::invalid_argument("check_hardy_littlewood: cell decompositions only");
    const auto& fc = f.cells();
    const auto& gc = g.cells();
    if (fc.size() != gc.size())
        throw std::invalid_argument("check_hardy_littlewood: decompositions differ in size");
    double lhs = 0.0;
    for (std::size_t i = 0; i < fc.size(); ++i) {
        if (fc[i].value < 0.0 || gc[i].value < 0.0)
            throw std::invalid_argument("check_hardy_littlewood: inputs must be nonnegative");
        if (rel_diff(fc[i].measure, gc[i].measure) > 1e-12)
            throw std::invalid_argument("check_hardy_littlewood: cell measures must match");
        lhs += fc[i].value * gc[i].value * fc[i].measure;
    }
    // rhs: integral of the product of the two step rearrangements
    std::vector<double> fb, fv, gb, gv;
    steps_from_cells(fc, fb, fv);
    steps_from_cells(gc, gb, gv);
    double rhs = 0.0;
    std::size_t i = 0, j = 0;
    double t = 0.0;
    while (i < fv.size() && j < gv.size()) {
        const double next = std::min(fb[i + 1], gb[j + 1]);
        rhs += fv[i] * gv[j] * (next - t);
        t = next;
        if (fb[i + 1] <= t) ++i;
        if (gb[j + 1] <= t) ++j;
    }
    InequalityCheck out{lhs, rhs, false};
    out.holds = lhs <= rhs + rel_tol * std::max(1.0, std::abs(rhs));
    return out;
}

namespace {

struct LinearPiece {
    double r_a, r_b; // radii
    double v_a, v_b; // |phi| values at the ends
    double slope;    // (v_b - v_a)/(r_b - r_a)
};

} // namespace

InequalityCheck check_polya_szego(const fem::DiscreteField& phi, const fem::RadialGrid& grid,
                                  const ExponentContext& ctx, double rel_tol) {
    if (phi.size() != grid.points())
        throw std::invalid_argument("check_polya_szego: field/grid size mismatch");
    if (grid.dim() != ctx.N)
        throw std::invalid_argument("check_polya_szego: grid dimension differs from context");
    const double scale = [&] {
        double m = 0.0;
        for (double v : phi.values) m = std::max(m, std::abs(v));
        return m;
    }();
    if (std::abs(phi.values.back()) > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("check_polya_szego: field must vanish at the outer radius");
    if (grid.inner() > 0.0 && std::abs(phi.values.front()) > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("check_polya_szego: field must vanish at the inner radius");

    const double p = ctx.p;
    const int N = ctx.N;
    const double omega = ctx.omega_n;

    // split each element at sign changes so pieces carry |phi|
    std::vector<LinearPiece> pieces;
    for (std::size_t e = 0; e < grid.elements(); ++e) {
        const double ra = grid.node(e), rb = grid.node(e + 1);
        const double va = phi.values[e], vb = phi.values[e + 1];
        auto push = [&](double a, double b, double fa, double fb) {
            if (!(b > a)) return;
            LinearPiece pc{a, b, std::abs(fa), std::abs(fb), 0.0};
            pc.slope = (pc.v_b - pc.v_a) / (b - a);
            pieces.push_back(pc);
        };
        if (va * vb < 0.0) {
            const double rz = ra + (rb - ra) * va / (va - vb);
            push(ra, rz, va, 0.0);
            push(rz, rb, 0.0, vb);
        } else {
            push(ra, rb, va, vb);
        }
    }

    // rhs: full-measure gradient energy
    double rhs = 0.0;
    for (const LinearPiece& pc : pieces)
        rhs += std::pow(std::abs(pc.slope), p) *
               (pow_int(pc.r_b, N) - pow_int(pc.r_a, N)) / N;
    rhs *= N * omega;

    if (scale == 0.0) return {0.0, 0.0, true};

    // level bands between distinct piece endpoint values
    std::vector<double> levels;
    levels.push_back(0.0);
    for (const LinearPiece& pc : pieces) {
        levels.push_back(pc.v_a);
        levels.push_back(pc.v_b);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(),
                             [](double a, double b) { return rel_diff(a, b, 1e-30) < 1e-13; }),
                 levels.end());

    auto alpha = [&](double s) {
        double total = 0.0;
        for (const LinearPiece& pc : pieces) {
            const double lo = std::min(pc.v_a, pc.v_b), hi = std::max(pc.v_a, pc.v_b);
            if (s >= hi) continue;
            if (s < lo || pc.slope == 0.0) {
                total += pow_int(pc.r_b, N) - pow_int(pc.r_a, N);
                continue;
            }
            const double rc = std::clamp(pc.r_a + (s - pc.v_a) / pc.slope, pc.r_a, pc.r_b);
            if (pc.slope > 0.0) total += pow_int(pc.r_b, N) - pow_int(rc, N);
            else total += pow_int(rc, N) - pow_int(pc.r_a, N);
        }
        return omega * total;
    };
    auto alpha_prime_abs = [&](double s) {
        double total = 0.0;
        for (const LinearPiece& pc : pieces) {
            const double lo = std::min(pc.v_a, pc.v_b), hi = std::max(pc.v_a, pc.v_b);
            if (pc.slope == 0.0 || s <= lo || s >= hi) continue;
            const double rc = std::clamp(pc.r_a + (s - pc.v_a) / pc.slope, pc.r_a, pc.r_b);
            total += std::pow(rc, N - 1) / std::abs(pc.slope);
        }
        return omega * N * total;
    };

    double lhs = 0.0;
    const double expo_alpha = p - p / N;
    for (std::size_t b = 0; b + 1 < levels.size(); ++b) {
        const double s0 = levels[b], s1 = levels[b + 1];
        if (!(s1 > s0)) continue;
        lhs += integrate_adaptive(
            [&](double s) {
                const double ap = alpha_prime_abs(s);
                if (ap <= 0.0) return 0.0;
                return std::pow(alpha(s), expo_alpha) * std::pow(ap, 1.0 - p);
            },
            s0, s1, 1e-9);
    }
    lhs *= std::pow(static_cast<double>(N), p) * std::pow(omega, p / N);

    InequalityCheck out{lhs, rhs, false};
    out.holds = lhs <= rhs + rel_tol * std::max(std::abs(rhs), 1e-30);
    return out;
}

} // namespace extspec::rearrange
