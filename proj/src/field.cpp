#include "semiclassical/field.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "semiclassical/error.hpp"

namespace semiclassical {

PhysicalConstants::PhysicalConstants(double hbar_, double mass_) : hbar(hbar_), mass(mass_)
{
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw Error("hbar must be positive and finite");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw Error("mass must be positive and finite");
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != grid_.size()) {
        throw FieldError("field has " + std::to_string(values_.size()) + " samples, grid has " +
                         std::to_string(grid_.size()) + " nodes");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) throw FieldError("non-finite sample at node " + std::to_string(i));
    }
}

ScalarField ScalarField::filled(const Grid& grid, double value)
{
    return ScalarField(grid, std::vector<double>(grid.size(), value));
}

ScalarField ScalarField::sample(const Grid& grid, const std::function<double(const Point3&)>& fn)
{
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.position(i));
    return ScalarField(grid, std::move(v));
}

double ScalarField::max_abs() const
{
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField ScalarField::coarsened() const
{
    Grid coarse = grid_.coarsened();
    const auto idx = coarse_node_indices(grid_);
    std::vector<double> v(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) v[i] = values_[idx[i]];
    return ScalarField(std::move(coarse), std::move(v));
}

namespace {

template <class Op>
ScalarField zip(const ScalarField& a, const ScalarField& b, Op op, const char* what)
{
    require_same_grid(a.grid(), b.grid(), what);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a[i], b[i]);
    return ScalarField(a.grid(), std::move(v));
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b)
{
    return zip(a, b, std::plus<>{}, "field addition");
}

ScalarField operator-(const ScalarField& a, const ScalarField& b)
{
    return zip(a, b, std::minus<>{}, "field subtraction");
}

ScalarField operator*(double s, const ScalarField& a)
{
    std::vector<double> v(a.values().begin(), a.values().end());
    for (double& x : v) x *= s;
    return ScalarField(a.grid(), std::move(v));
}

ScalarField operator+(const ScalarField& a, double c)
{
    std::vector<double> v(a.values().begin(), a.values().end());
    for (double& x : v) x += c;
    return ScalarField(a.grid(), std::move(v));
}

double discrete_norm(const Grid& grid, std::span<const complex> values)
{
    double s = 0.0;
    for (const complex& z : values) s += std::norm(z);
    return std::sqrt(s * grid.cell_volume());
}

ComplexField::ComplexField(Grid grid, std::vector<complex> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != grid_.size()) {
        throw FieldError("complex field has " + std::to_string(values_.size()) + " samples, grid has " +
                         std::to_string(grid_.size()) + " nodes");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag())) {
            throw FieldError("non-finite complex sample at node " + std::to_string(i));
        }
    }
    norm_ = discrete_norm(grid_, values_);
}

ComplexField ComplexField::sample(const Grid& grid, const std::function<complex(const Point3&)>& fn)
{
    std::vector<complex> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.position(i));
    return ComplexField(grid, std::move(v));
}

ComplexField ComplexField::from_polar(const ScalarField& amplitude, const ScalarField& phase, double hbar)
{
    require_same_grid(amplitude.grid(), phase.grid(), "from_polar");
    std::vector<complex> v(amplitude.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::polar(1.0, phase[i] / hbar) * amplitude[i];
    return ComplexField(amplitude.grid(), std::move(v));
}

ComplexField ComplexField::normalized() const
{
    if (norm_ == 0.0) throw FieldError("cannot normalize a zero wavefunction");
    std::vector<complex> v(values_);
    for (complex& z : v) z /= norm_;
    return ComplexField(grid_, std::move(v));
}

ScalarField ComplexField::modulus() const
{
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(values_[i]);
    return ScalarField(grid_, std::move(v));
}

NodeMask NodeMask::below(const ScalarField& f, double eps)
{
    std::vector<std::uint8_t> m(f.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(f[i]) < eps ? 1 : 0;
    return NodeMask(std::move(m));
}

NodeMask NodeMask::below(const ComplexField& f, double eps)
{
    std::vector<std::uint8_t> m(f.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(f[i]) < eps ? 1 : 0;
    return NodeMask(std::move(m));
}

std::size_t NodeMask::count() const
{
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

double NodeMask::fraction() const
{
    return flags_.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(flags_.size());
}

NodeMask NodeMask::coarsened(const Grid& fine) const
{
    const auto idx = coarse_node_indices(fine);
    std::vector<std::uint8_t> m(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) m[i] = flags_[idx[i]];
    return NodeMask(std::move(m));
}

NodeMask operator|(const NodeMask& a, const NodeMask& b)
{
    if (a.size() != b.size()) throw FieldError("mask size mismatch");
    std::vector<std::uint8_t> m(a.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = (a.flags_[i] | b.flags_[i]) ? 1 : 0;
    return NodeMask(std::move(m));
}

std::vector<std::size_t> coarse_node_indices(const Grid& fine)
{
    const Grid coarse = fine.coarsened();
    std::vector<std::size_t> out(coarse.size());
    for (std::size_t c = 0; c < coarse.size(); ++c) {
        Index3 idx = coarse.unflatten(c);
        for (int a = 0; a < fine.dim(); ++a) idx[a] *= 2;
        out[c] = fine.flatten(idx);
    }
    return out;
}

double default_eps_node(const ScalarField& amplitude) { return 1e-6 * amplitude.max_abs(); }

double default_eps_node(const ComplexField& psi)
{
    double m = 0.0;
    for (const complex& z : psi.values()) m = std::max(m, std::abs(z));
    return 1e-6 * m;
}

ScalarField fill_masked(const ScalarField& f, const NodeMask& mask)
{
    const Grid& g = f.grid();
    if (mask.size() != f.size()) throw FieldError("mask size does not match field");
    if (mask.count() == 0) return f;
    if (mask.all()) throw DegenerateAmplitudeError("cannot fill a field whose every node is masked");

    std::vector<double> v(f.values().begin(), f.values().end());
    std::vector<std::uint8_t> done(f.size(), 0);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!mask[i]) {
            done[i] = 1;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        const std::size_t node = queue.front();
        queue.pop_front();
        const Index3 idx = g.unflatten(node);
        for (int a = 0; a < g.dim(); ++a) {
            const std::size_t n = g.extent(a);
            for (int step : {-1, 1}) {
                Index3 nb = idx;
                if (step < 0) {
                    if (idx[a] == 0 && !g.periodic()) continue;
                    nb[a] = idx[a] == 0 ? n - 1 : idx[a] - 1;
                } else {
                    if (idx[a] + 1 == n && !g.periodic()) continue;
                    nb[a] = idx[a] + 1 == n ? 0 : idx[a] + 1;
                }
                const std::size_t j = g.flatten(nb);
                if (done[j]) continue;
                done[j] = 1;
                v[j] = v[node];
                queue.push_back(j);
            }
        }
    }
    return ScalarField(g, std::move(v));
}

}  // namespace semiclassical
