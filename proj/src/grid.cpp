#include "semiclassical/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "semiclassical/error.hpp"

namespace semiclassical {

std::string_view to_string(Boundary b)
{
    return b == Boundary::periodic ? "periodic" : "dirichlet_zero";
}

Boundary boundary_from_string(std::string_view s)
{
    if (s == "periodic") return Boundary::periodic;
    if (s == "dirichlet_zero") return Boundary::dirichlet_zero;
    throw GridError("unknown boundary '" + std::string(s) + "' (expected dirichlet_zero or periodic)");
}

std::size_t node_cap_from_env()
{
    const char* raw = std::getenv(kNodeCapEnv);
    if (raw == nullptr || *raw == '\0') return kDefaultNodeCap;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || v == 0) {
        throw GridError(std::string(kNodeCapEnv) + " must be a positive integer, got '" + raw + "'");
    }
    return static_cast<std::size_t>(v);
}

Grid::Grid(std::vector<std::size_t> extents,
           std::vector<double> origin,
           std::vector<double> spacing,
           Boundary boundary,
           std::size_t node_cap)
    : boundary_(boundary)
{
    const std::size_t d = extents.size();
    if (d < 1 || d > 3) throw GridError("grid dimension must be 1, 2 or 3, got " + std::to_string(d));
    if (origin.size() != d || spacing.size() != d) {
        throw GridError("grid extents, origin and spacing must have the same length");
    }
    dim_ = static_cast<int>(d);
    size_ = 1;
    for (std::size_t a = 0; a < d; ++a) {
        if (extents[a] < kMinExtent) {
            throw GridError("grid too small: extent " + std::to_string(extents[a]) + " on axis " +
                            std::to_string(a) + " is below the stencil minimum of " +
                            std::to_string(kMinExtent));
        }
        if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) {
            throw GridError("grid spacing must be positive and finite on axis " + std::to_string(a));
        }
        if (!std::isfinite(origin[a])) throw GridError("grid origin must be finite");
        extents_[a] = extents[a];
        origin_[a] = origin[a];
        spacing_[a] = spacing[a];
        if (size_ > node_cap / extents[a]) {
            throw GridError("grid exceeds the node cap of " + std::to_string(node_cap) + " (set " +
                            kNodeCapEnv + " to raise it)");
        }
        size_ *= extents[a];
    }
    if (size_ > node_cap) {
        throw GridError("grid exceeds the node cap of " + std::to_string(node_cap));
    }
    strides_ = {1, 1, 1};
    for (int a = dim_ - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * extents_[a + 1];
}

std::vector<std::size_t> Grid::extents() const { return {extents_.begin(), extents_.begin() + dim_}; }
std::vector<double> Grid::origins() const { return {origin_.begin(), origin_.begin() + dim_}; }
std::vector<double> Grid::spacings() const { return {spacing_.begin(), spacing_.begin() + dim_}; }

double Grid::length(int axis) const
{
    const auto n = static_cast<double>(extents_[axis]);
    return periodic() ? n * spacing_[axis] : (n - 1.0) * spacing_[axis];
}

double Grid::cell_volume() const
{
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing_[a];
    return v;
}

Index3 Grid::unflatten(std::size_t node) const
{
    Index3 idx{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
        idx[a] = node / strides_[a];
        node -= idx[a] * strides_[a];
    }
    return idx;
}

std::size_t Grid::flatten(const Index3& idx) const
{
    std::size_t node = 0;
    for (int a = 0; a < dim_; ++a) node += idx[a] * strides_[a];
    return node;
}

Point3 Grid::position(std::size_t node) const
{
    const Index3 idx = unflatten(node);
    Point3 p{0, 0, 0};
    for (int a = 0; a < dim_; ++a) p[a] = coordinate(a, idx[a]);
    return p;
}

bool Grid::interior(std::size_t node) const
{
    if (periodic()) return true;
    const Index3 idx = unflatten(node);
    for (int a = 0; a < dim_; ++a) {
        if (idx[a] == 0 || idx[a] + 1 == extents_[a]) return false;
    }
    return true;
}

std::size_t Grid::interior_count() const
{
    if (periodic()) return size_;
    std::size_t n = 1;
    for (int a = 0; a < dim_; ++a) n *= extents_[a] - 2;
    return n;
}

bool Grid::can_coarsen() const
{
    for (int a = 0; a < dim_; ++a) {
        const std::size_t coarse = periodic() ? extents_[a] / 2 : (extents_[a] + 1) / 2;
        if (coarse < kMinExtent) return false;
        if (periodic() && extents_[a] % 2 != 0) return false;
    }
    return true;
}

Grid Grid::coarsened() const
{
    if (!can_coarsen()) throw GridError("grid " + describe() + " cannot be coarsened");
    std::vector<std::size_t> ext(dim_);
    std::vector<double> h(dim_);
    for (int a = 0; a < dim_; ++a) {
        ext[a] = periodic() ? extents_[a] / 2 : (extents_[a] + 1) / 2;
        h[a] = 2.0 * spacing_[a];
    }
    return Grid(std::move(ext), origins(), std::move(h), boundary_, size_);
}

std::string Grid::describe() const
{
    std::ostringstream os;
    os << dim_ << "D [";
    for (int a = 0; a < dim_; ++a) os << (a ? "x" : "") << extents_[a];
    os << "] h=(";
    for (int a = 0; a < dim_; ++a) os << (a ? "," : "") << spacing_[a];
    os << ") " << to_string(boundary_);
    return os.str();
}

bool operator==(const Grid& a, const Grid& b)
{
    if (a.dim_ != b.dim_ || a.boundary_ != b.boundary_) return false;
    for (int i = 0; i < a.dim_; ++i) {
        if (a.extents_[i] != b.extents_[i]) return false;
        if (std::abs(a.origin_[i] - b.origin_[i]) > 1e-12 * std::max(1.0, std::abs(a.origin_[i]))) return false;
        if (std::abs(a.spacing_[i] - b.spacing_[i]) > 1e-12 * a.spacing_[i]) return false;
    }
    return true;
}

void require_same_grid(const Grid& a, const Grid& b, std::string_view context)
{
    if (a != b) {
        throw GridError(std::string(context) + ": grid mismatch (" + a.describe() + " vs " + b.describe() + ")");
    }
}

}  // namespace semiclassical
