#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "semiclassical/field.hpp"

namespace semiclassical {

/// Second-order finite differences on a Grid.
///
/// Interior nodes use central differences. On dirichlet_zero grids the end
/// nodes of each axis use one-sided second-order closures:
///   f'  ~ (-3 f0 + 4 f1 - f2) / 2h
///   f'' ~ ( 2 f0 - 5 f1 + 4 f2 - f3) / h^2
/// Periodic grids wrap around.

using VectorField = std::vector<ScalarField>;

VectorField gradient(const ScalarField& f);
ScalarField partial(const ScalarField& f, int axis);
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(std::span<const ScalarField> v);

/// Componentwise derivatives of complex samples (same stencils).
std::vector<std::vector<complex>> gradient(const ComplexField& psi);
std::vector<complex> laplacian(const ComplexField& psi);

/// Raw-array entry points for code that assembles intermediate quantities.
void partial_into(const Grid& g, std::span<const double> f, int axis, std::span<double> out);
void laplacian_into(const Grid& g, std::span<const double> f, std::span<double> out);

/// Central (2n+1)-point Laplacian weights at a node with full stencil support,
/// as (neighbour node, weight) pairs including the node itself.
std::vector<std::pair<std::size_t, double>> central_laplacian_stencil(const Grid& g, std::size_t node);

}  // namespace semiclassical
