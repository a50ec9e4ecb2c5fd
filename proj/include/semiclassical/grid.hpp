#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace semiclassical {

enum class Boundary { dirichlet_zero, periodic };

std::string_view to_string(Boundary b);
Boundary boundary_from_string(std::string_view s);

/// Environment variable that overrides the default node cap.
inline constexpr const char* kNodeCapEnv = "SEMICLASSICAL_MAX_NODES";
inline constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 22;

/// Node cap from SEMICLASSICAL_MAX_NODES, or kDefaultNodeCap when unset.
std::size_t node_cap_from_env();

using Index3 = std::array<std::size_t, 3>;
using Point3 = std::array<double, 3>;

/// Rectangular sampling domain in 1 to 3 dimensions.
///
/// Nodes sit at origin + i*spacing along every axis. Storage is row-major in
/// axis order (x, y, z): the last axis varies fastest. For periodic grids the
/// box length along an axis is extent*spacing and node extent-1 neighbours
/// node 0. For dirichlet_zero grids the first and last node of every axis are
/// boundary nodes; differential operators use one-sided stencils there and the
/// Helmholtz solver pins them to zero.
class Grid {
public:
    static constexpr std::size_t kMinExtent = 4;

    Grid(std::vector<std::size_t> extents,
         std::vector<double> origin,
         std::vector<double> spacing,
         Boundary boundary,
         std::size_t node_cap = node_cap_from_env());

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return size_; }
    Boundary boundary() const noexcept { return boundary_; }
    bool periodic() const noexcept { return boundary_ == Boundary::periodic; }

    std::size_t extent(int axis) const { return extents_[axis]; }
    double origin(int axis) const { return origin_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    std::size_t stride(int axis) const { return strides_[axis]; }

    std::vector<std::size_t> extents() const;
    std::vector<double> origins() const;
    std::vector<double> spacings() const;

    /// Length of the box along an axis (periodic: n*h, dirichlet: (n-1)*h).
    double length(int axis) const;
    double upper(int axis) const { return origin_[axis] + length(axis); }
    double cell_volume() const;

    Index3 unflatten(std::size_t node) const;
    std::size_t flatten(const Index3& idx) const;

    double coordinate(int axis, std::size_t i) const { return origin_[axis] + spacing_[axis] * static_cast<double>(i); }
    Point3 position(std::size_t node) const;

    /// True where the central (2n+1)-point stencil fits without one-sided closure.
    bool interior(std::size_t node) const;
    std::size_t interior_count() const;

    /// Every second node per axis; spacing doubles. Periodic extents must be even.
    Grid coarsened() const;
    bool can_coarsen() const;

    std::string describe() const;

    friend bool operator==(const Grid& a, const Grid& b);
    friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

private:
    int dim_ = 1;
    std::array<std::size_t, 3> extents_{1, 1, 1};
    std::array<double, 3> origin_{0, 0, 0};
    std::array<double, 3> spacing_{1, 1, 1};
    std::array<std::size_t, 3> strides_{1, 1, 1};
    std::size_t size_ = 0;
    Boundary boundary_ = Boundary::dirichlet_zero;
};

/// Throws GridError unless the two grids are identical.
void require_same_grid(const Grid& a, const Grid& b, std::string_view context);

}  // namespace semiclassical
