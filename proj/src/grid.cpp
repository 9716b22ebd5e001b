#include "extspec/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace extspec::fem {

namespace {

std::vector<double> graded_nodes(double a, double b, std::size_t n, double gamma) {
    if (n < 2) throw std::invalid_argument("RadialGrid: need at least 2 elements");
    if (!(b > a)) throw std::invalid_argument("RadialGrid: outer radius must exceed inner");
    if (!(gamma >= 1.0)) throw std::invalid_argument("RadialGrid: gamma must be >= 1");
    std::vector<double> nodes(n + 1);
    nodes[0] = a;
    nodes[n] = b;
    if (gamma == 1.0) {
        const double h = (b - a) / static_cast<double>(n);
        for (std::size_t i = 1; i < n; ++i) nodes[i] = a + h * static_cast<double>(i);
    } else {
        // h0 * (gamma^n - 1)/(gamma - 1) = b - a
        const double h0 = (b - a) * (gamma - 1.0) / (std::pow(gamma, static_cast<double>(n)) - 1.0);
        for (std::size_t i = 1; i < n; ++i)
            nodes[i] = a + h0 * (std::pow(gamma, static_cast<double>(i)) - 1.0) / (gamma - 1.0);
    }
    return nodes;
}

} // namespace

RadialGrid::RadialGrid(std::vector<double> nodes, int N, double gamma)
    : nodes_(std::move(nodes)), dim_(N), gamma_(gamma) {
    if (nodes_.size() < 3) throw std::invalid_argument("RadialGrid: need at least 2 elements");
    if (dim_ < 2) throw std::invalid_argument("RadialGrid: N must be >= 2");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1]))
            throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
    if (nodes_.front() < 0.0) throw std::invalid_argument("RadialGrid: negative inner radius");
}

RadialGrid RadialGrid::exterior(std::size_t n, double R, double gamma, int N) {
    if (!(R > 1.0)) throw std::invalid_argument("RadialGrid::exterior: R must exceed 1");
    return RadialGrid(graded_nodes(1.0, R, n, gamma), N, gamma);
}

RadialGrid RadialGrid::ball(std::size_t n, double R, double gamma, int N) {
    if (!(R > 0.0)) throw std::invalid_argument("RadialGrid::ball: R must be positive");
    return RadialGrid(graded_nodes(0.0, R, n, gamma), N, gamma);
}

RadialGrid RadialGrid::span(double r_lo, double r_hi, std::size_t n, double gamma, int N) {
    return RadialGrid(graded_nodes(r_lo, r_hi, n, gamma), N, gamma);
}

double RadialGrid::element_moment(std::size_t e) const {
    const double a = nodes_[e], b = nodes_[e + 1];
    return (std::pow(b, dim_) - std::pow(a, dim_)) / static_cast<double>(dim_);
}

RadialGrid RadialGrid::subrange(std::size_t i_lo, std::size_t i_hi) const {
    if (i_hi <= i_lo + 1 || i_hi >= nodes_.size() + 0 || i_hi > nodes_.size() - 1)
        throw std::invalid_argument("RadialGrid::subrange: bad index range");
    std::vector<double> sub(nodes_.begin() + static_cast<long>(i_lo),
                            nodes_.begin() + static_cast<long>(i_hi) + 1);
    return RadialGrid(std::move(sub), dim_, gamma_);
}

void DiscreteField::enforce_bc() {
    if (values.empty()) return;
    if (dirichlet_at_outer) values.back() = 0.0;
    if (dirichlet_at_inner) values.front() = 0.0;
}

double DiscreteField::eval(const RadialGrid& grid, double r) const {
    const auto& nodes = grid.nodes();
    if (r <= nodes.front() || r >= nodes.back()) {
        if (r == nodes.front()) return values.front();
        if (r == nodes.back()) return values.back();
        return 0.0;
    }
    auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
    std::size_t e = static_cast<std::size_t>(it - nodes.begin()) - 1;
    const double w = (r - nodes[e]) / (nodes[e + 1] - nodes[e]);
    return values[e] * (1.0 - w) + values[e + 1] * w;
}

} // namespace extspec::fem
