#include "semiclassical/operators.hpp"

#include <string>

#include "semiclassical/error.hpp"

namespace semiclassical {

namespace {

void require_stencil(const Grid& g)
{
    for (int a = 0; a < g.dim(); ++a) {
        if (g.extent(a) < Grid::kMinExtent) {
            throw GridError("grid too small for second-order stencils on axis " + std::to_string(a));
        }
    }
}

template <class T>
void first_derivative(const Grid& g, std::span<const T> f, int axis, std::span<T> out)
{
    require_stencil(g);
    const std::size_t n = g.extent(axis);
    const std::size_t s = g.stride(axis);
    const double inv2h = 1.0 / (2.0 * g.spacing(axis));
    const bool periodic = g.periodic();
    for (std::size_t node = 0; node < g.size(); ++node) {
        const std::size_t i = (node / s) % n;
        const std::size_t base = node - i * s;
        auto at = [&](std::size_t k) { return f[base + k * s]; };
        T d;
        if (i > 0 && i + 1 < n) {
            d = (at(i + 1) - at(i - 1)) * inv2h;
        } else if (periodic) {
            const std::size_t lo = i == 0 ? n - 1 : i - 1;
            const std::size_t hi = i + 1 == n ? 0 : i + 1;
            d = (at(hi) - at(lo)) * inv2h;
        } else if (i == 0) {
            d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
        } else {
            d = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv2h;
        }
        out[node] = d;
    }
}

template <class T>
void second_derivative_add(const Grid& g, std::span<const T> f, int axis, std::span<T> out)
{
    const std::size_t n = g.extent(axis);
    const std::size_t s = g.stride(axis);
    const double h = g.spacing(axis);
    const double invh2 = 1.0 / (h * h);
    const bool periodic = g.periodic();
    for (std::size_t node = 0; node < g.size(); ++node) {
        const std::size_t i = (node / s) % n;
        const std::size_t base = node - i * s;
        auto at = [&](std::size_t k) { return f[base + k * s]; };
        T d;
        if (i > 0 && i + 1 < n) {
            d = (at(i + 1) - 2.0 * at(i) + at(i - 1)) * invh2;
        } else if (periodic) {
            const std::size_t lo = i == 0 ? n - 1 : i - 1;
            const std::size_t hi = i + 1 == n ? 0 : i + 1;
            d = (at(hi) - 2.0 * at(i) + at(lo)) * invh2;
        } else if (i == 0) {
            d = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) * invh2;
        } else {
            d = (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) * invh2;
        }
        out[node] += d;
    }
}

template <class T>
void laplacian_impl(const Grid& g, std::span<const T> f, std::span<T> out)
{
    require_stencil(g);
    for (auto& v : out) v = T{};
    for (int a = 0; a < g.dim(); ++a) second_derivative_add(g, f, a, out);
}

}  // namespace

void partial_into(const Grid& g, std::span<const double> f, int axis, std::span<double> out)
{
    first_derivative<double>(g, f, axis, out);
}

void laplacian_into(const Grid& g, std::span<const double> f, std::span<double> out)
{
    laplacian_impl<double>(g, f, out);
}

ScalarField partial(const ScalarField& f, int axis)
{
    if (axis < 0 || axis >= f.grid().dim()) throw GridError("axis out of range");
    std::vector<double> out(f.size());
    first_derivative<double>(f.grid(), f.values(), axis, out);
    return ScalarField(f.grid(), std::move(out));
}

VectorField gradient(const ScalarField& f)
{
    VectorField g;
    g.reserve(f.grid().dim());
    for (int a = 0; a < f.grid().dim(); ++a) g.push_back(partial(f, a));
    return g;
}

ScalarField laplacian(const ScalarField& f)
{
    std::vector<double> out(f.size());
    laplacian_impl<double>(f.grid(), f.values(), out);
    return ScalarField(f.grid(), std::move(out));
}

ScalarField divergence(std::span<const ScalarField> v)
{
    if (v.empty()) throw GridError("divergence of an empty vector field");
    const Grid& g = v.front().grid();
    if (static_cast<int>(v.size()) != g.dim()) {
        throw GridError("divergence needs one component per axis (" + std::to_string(g.dim()) + "), got " +
                        std::to_string(v.size()));
    }
    std::vector<double> acc(g.size(), 0.0);
    std::vector<double> tmp(g.size());
    for (int a = 0; a < g.dim(); ++a) {
        require_same_grid(g, v[a].grid(), "divergence");
        first_derivative<double>(g, v[a].values(), a, tmp);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += tmp[i];
    }
    return ScalarField(g, std::move(acc));
}

std::vector<std::vector<complex>> gradient(const ComplexField& psi)
{
    const Grid& g = psi.grid();
    std::vector<std::vector<complex>> out(g.dim(), std::vector<complex>(g.size()));
    for (int a = 0; a < g.dim(); ++a) first_derivative<complex>(g, psi.values(), a, out[a]);
    return out;
}

std::vector<complex> laplacian(const ComplexField& psi)
{
    std::vector<complex> out(psi.size());
    laplacian_impl<complex>(psi.grid(), psi.values(), out);
    return out;
}

std::vector<std::pair<std::size_t, double>> central_laplacian_stencil(const Grid& g, std::size_t node)
{
    if (!g.interior(node)) throw GridError("central stencil requested at a boundary node");
    std::vector<std::pair<std::size_t, double>> w;
    w.reserve(2 * g.dim() + 1);
    double diag = 0.0;
    const Index3 idx = g.unflatten(node);
    for (int a = 0; a < g.dim(); ++a) {
        const double invh2 = 1.0 / (g.spacing(a) * g.spacing(a));
        const std::size_t n = g.extent(a);
        Index3 lo = idx, hi = idx;
        lo[a] = idx[a] == 0 ? n - 1 : idx[a] - 1;
        hi[a] = idx[a] + 1 == n ? 0 : idx[a] + 1;
        w.emplace_back(g.flatten(lo), invh2);
        w.emplace_back(g.flatten(hi), invh2);
        diag -= 2.0 * invh2;
    }
    w.emplace_back(node, diag);
    return w;
}

}  // namespace semiclassical
