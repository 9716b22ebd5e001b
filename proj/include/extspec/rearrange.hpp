#ifndef EXTSPEC_REARRANGE_HPP
#define EXTSPEC_REARRANGE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "extspec/exponents.hpp"
#include "extspec/grid.hpp"
#include "extspec/numerics.hpp"

namespace extspec::rearrange {

// One level cell of a simple function: |value| held on a set of the given
// Lebesgue measure.
struct Cell {
    double value;
    double measure;
};

// Radial profile of |f| on [r_inner, inf) in R^dim.
//
// Beyond tail_start the profile must be non-increasing and bounded by
// tail_coef * r^{-tail_exp}; when tail_exact is set that bound is an equality
// (pure power tail), which unlocks closed-form handling. tail_coef = 0 means
// the function vanishes beyond tail_start (compact support).
struct RadialProfile {
    std::function<double(double)> abs_value;
    int dim = 3;
    double r_inner = 1.0;
    double tail_start = 1.0;
    double tail_coef = 0.0;
    double tail_exp = 0.0;
    bool tail_exact = false;
    std::vector<double> breakpoints; // kinks/jumps in [r_inner, tail_start]

    double eval(double r) const { return r < r_inner ? 0.0 : abs_value(r); }
};

// Value/measure cell list, optionally combined with a radial profile part
// (the two live on disjoint pieces of the underlying measure space).
class SampledFunction {
public:
    static SampledFunction from_cells(std::vector<Cell> cells);
    static SampledFunction indicator(double measure);
    static SampledFunction from_profile(RadialProfile profile);
    // |f(x)| = coef * |x|^{-expo} on {|x| > r_inner} in R^dim (r_inner = 0
    // gives the whole space).
    static SampledFunction power_profile(double coef, double expo, int dim, double r_inner);

    const std::vector<Cell>& cells() const { return cells_; }
    const std::optional<RadialProfile>& profile() const { return profile_; }
    double cell_measure() const; // total measure of the cell part

private:
    std::vector<Cell> cells_;
    std::optional<RadialProfile> profile_;
};

// alpha_f(s) = |{ |f| > s }|; +inf when the level set has infinite measure.
// Rejects s <= 0.
double distribution(const SampledFunction& f, double s);

// Non-increasing rearrangement f^* on (0, inf), represented as exact steps
// plus (for profile-backed inputs) an analytic tail region.
class RearrangedFunction {
public:
    struct Tail {
        double t_begin = 0.0;
        double coef = 0.0;   // value(t) = coef*(t+shift)^{-expo} when exact
        double shift = 0.0;
        double expo = 0.0;
        bool exact = true;
        std::function<double(double)> value; // used when !exact (asymptotics still ~ the power)
    };

    static RearrangedFunction from_steps(std::vector<double> breaks, std::vector<double> values);
    static RearrangedFunction pure_power(double coef, double expo); // value = coef * t^{-expo}
    static RearrangedFunction constant(double value);               // value = const on (0, inf)

    double value(double t) const;     // f*(t), t > 0
    double integral0(double t) const; // \int_0^t f*; +inf on divergence
    double sup_value() const;         // f*(0+), may be +inf
    double support_measure() const;   // |{f* > 0}|, may be +inf

    const std::vector<double>& step_breaks() const { return breaks_; } // leading 0 included
    const std::vector<double>& step_values() const { return vals_; }
    double steps_end() const { return breaks_.empty() ? 0.0 : breaks_.back(); }
    const std::optional<Tail>& tail() const { return tail_; }

private:
    friend RearrangedFunction decreasing_rearrangement(const SampledFunction&);
    std::vector<double> breaks_; // b0 = 0 < b1 < ... ; vals_[i] on [b_i, b_{i+1})
    std::vector<double> vals_;
    std::vector<double> prefix_; // \int_0^{b_i} f* over the step region
    std::function<double(double)> smooth_; // on [steps_end, tail_->t_begin)
    std::optional<Tail> tail_;
    double support_ = 0.0;
    void finalize();
};

RearrangedFunction decreasing_rearrangement(const SampledFunction& f);

// f**(t) = (1/t) \int_0^t f*; returns +inf when the integral diverges.
double maximal_function(const RearrangedFunction& fstar, double t);

// f^\star as a radial profile on the ball of matching measure:
// value(r) = f*(omega_N r^N).
RadialProfile schwarz_symmetrization(const SampledFunction& f, const ExponentContext& ctx);

struct LorentzIndex {
    double p;
    double q; // kInf for the weak index
};

// Quasi-norm |f|_{(p,q)} built from f*; +inf signals divergence.
double lorentz_quasinorm(const SampledFunction& f, const LorentzIndex& idx);
double lorentz_quasinorm(const RearrangedFunction& fstar, const LorentzIndex& idx);

// Norm ||f||_{(p,q)} built from f**; requires idx.p > 1.
double lorentz_norm(const SampledFunction& f, const LorentzIndex& idx);
double lorentz_norm(const RearrangedFunction& fstar, const LorentzIndex& idx);

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// \int f g <= \int_0^{|Omega|} f* g* for nonnegative f, g on a shared cell
// decomposition. Exact cell arithmetic; rel_tol covers roundoff only.
InequalityCheck check_hardy_littlewood(const SampledFunction& f, const SampledFunction& g,
                                       double rel_tol = 1e-8);

// N^p omega_N^{p/N} \int t^{p-p/N} |(phi*)'|^p dt  <=  \int |grad phi|^p
// for a compactly supported radial field on a ball/annulus grid. Both sides
// carry the full surface measure factor.
InequalityCheck check_polya_szego(const fem::DiscreteField& phi, const fem::RadialGrid& grid,
                                  const ExponentContext& ctx, double rel_tol = 1e-3);

// s-side identity value sup_s s * alpha(s)^{1/p} (equals the (p,inf)
// quasinorm); exposed for cross-checking.
double weak_quasinorm_from_distribution(const SampledFunction& f, double p);

} // namespace extspec::rearrange

#endif
