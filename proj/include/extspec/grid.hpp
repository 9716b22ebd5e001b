#ifndef EXTSPEC_GRID_HPP
#define EXTSPEC_GRID_HPP

#include <cstddef>
#include <vector>

namespace extspec::fem {

// 1D radial mesh with geometrically graded elements.
// Exterior grids span [1, R]; ball grids [0, R]; subrange grids are used
// internally for the two-sided nodal splits.
class RadialGrid {
public:
    // n elements on [1, R], element lengths growing by the factor gamma.
    // gamma = 1 gives a uniform mesh. Throws on R <= 1 or n < 2.
    static RadialGrid exterior(std::size_t n, double R, double gamma, int N);

    // n elements on [0, R] (ball); same grading rule.
    static RadialGrid ball(std::size_t n, double R, double gamma, int N);

    // n elements on [r_lo, r_hi], r_lo >= 0.
    static RadialGrid span(double r_lo, double r_hi, std::size_t n, double gamma, int N);

    // Explicit nodes (used for subranges of an existing grid).
    RadialGrid(std::vector<double> nodes, int N, double gamma);

    std::size_t elements() const { return nodes_.size() - 1; }
    std::size_t points() const { return nodes_.size(); }
    double node(std::size_t i) const { return nodes_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }
    double inner() const { return nodes_.front(); }
    double outer() const { return nodes_.back(); }
    double length(std::size_t e) const { return nodes_[e + 1] - nodes_[e]; }
    int dim() const { return dim_; }
    double gamma() const { return gamma_; }

    // exact \int_{r_e}^{r_{e+1}} r^{N-1} dr
    double element_moment(std::size_t e) const;

    // Subgrid over node indices [i_lo, i_hi].
    RadialGrid subrange(std::size_t i_lo, std::size_t i_hi) const;

private:
    std::vector<double> nodes_;
    int dim_ = 3;
    double gamma_ = 1.0;
};

// Continuous piecewise-linear nodal function on a RadialGrid.
struct DiscreteField {
    std::vector<double> values;
    bool dirichlet_at_outer = false; // when set, the last value is pinned to 0
    bool dirichlet_at_inner = false; // used by interval sub-solves

    DiscreteField() = default;
    DiscreteField(std::size_t points, double fill = 0.0) : values(points, fill) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    // Re-apply the boundary pins (call after bulk writes).
    void enforce_bc();
    // Value at radius r by linear interpolation (0 outside the grid).
    double eval(const RadialGrid& grid, double r) const;
    double slope(const RadialGrid& grid, std::size_t e) const {
        return (values[e + 1] - values[e]) / grid.length(e);
    }
};

} // namespace extspec::fem

#endif
