#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "semiclassical/grid.hpp"

namespace semiclassical {

using complex = std::complex<double>;

/// Reduced Planck constant and particle mass, both strictly positive.
struct PhysicalConstants {
    double hbar = 1.0;
    double mass = 1.0;

    PhysicalConstants() = default;
    PhysicalConstants(double hbar_, double mass_);
};

/// Real samples on a grid. Immutable; every value is finite.
class ScalarField {
public:
    ScalarField(Grid grid, std::vector<double> values);

    static ScalarField filled(const Grid& grid, double value);
    static ScalarField zeros(const Grid& grid) { return filled(grid, 0.0); }
    static ScalarField sample(const Grid& grid, const std::function<double(const Point3&)>& fn);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    double max_abs() const;
    double min() const;
    double max() const;

    /// Every second node per axis, on grid().coarsened().
    ScalarField coarsened() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
ScalarField operator+(const ScalarField& a, double c);

/// Complex samples on a grid with the discrete L2 norm cached at construction.
class ComplexField {
public:
    ComplexField(Grid grid, std::vector<complex> values);

    static ComplexField sample(const Grid& grid, const std::function<complex(const Point3&)>& fn);
    /// R * exp(i*phase/hbar), nodewise.
    static ComplexField from_polar(const ScalarField& amplitude, const ScalarField& phase, double hbar);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const complex> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    complex operator[](std::size_t i) const { return values_[i]; }

    /// sqrt(sum |psi|^2 * cell volume)
    double norm() const noexcept { return norm_; }
    ComplexField normalized() const;
    ScalarField modulus() const;

private:
    Grid grid_;
    std::vector<complex> values_;
    double norm_ = 0.0;
};

double discrete_norm(const Grid& grid, std::span<const complex> values);

/// Per-node exclusion flags (nodal set of an amplitude).
class NodeMask {
public:
    NodeMask() = default;
    explicit NodeMask(std::vector<std::uint8_t> flags) : flags_(std::move(flags)) {}

    static NodeMask none(std::size_t n) { return NodeMask(std::vector<std::uint8_t>(n, 0)); }
    /// Nodes with |f| < eps.
    static NodeMask below(const ScalarField& f, double eps);
    static NodeMask below(const ComplexField& f, double eps);

    bool operator[](std::size_t i) const { return flags_[i] != 0; }
    std::size_t size() const noexcept { return flags_.size(); }
    std::size_t count() const;
    double fraction() const;
    bool all() const { return count() == flags_.size(); }
    std::span<const std::uint8_t> flags() const noexcept { return flags_; }

    NodeMask coarsened(const Grid& fine) const;
    friend NodeMask operator|(const NodeMask& a, const NodeMask& b);
    friend bool operator==(const NodeMask& a, const NodeMask& b) = default;

private:
    std::vector<std::uint8_t> flags_;
};

/// Nodes of `fine` with every index even, in coarse-grid order.
std::vector<std::size_t> coarse_node_indices(const Grid& fine);

/// Default nodal threshold: 1e-6 * max|R|.
double default_eps_node(const ScalarField& amplitude);
double default_eps_node(const ComplexField& psi);

/// Copy of f where masked nodes take the value of the nearest unmasked node
/// (breadth-first over axis neighbours).
ScalarField fill_masked(const ScalarField& f, const NodeMask& mask);

}  // namespace semiclassical
