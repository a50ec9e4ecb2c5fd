#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "semiclassical/field.hpp"
#include "semiclassical/grid.hpp"

namespace testing {

using namespace semiclassical;

inline constexpr double pi = std::numbers::pi;

inline Grid line(std::size_t n, double lo, double hi, Boundary b = Boundary::dirichlet_zero)
{
    const double cells = b == Boundary::periodic ? static_cast<double>(n) : static_cast<double>(n - 1);
    return Grid({n}, {lo}, {(hi - lo) / cells}, b);
}

inline Grid square(std::size_t n, double lo, double hi, Boundary b = Boundary::dirichlet_zero)
{
    const double cells = b == Boundary::periodic ? static_cast<double>(n) : static_cast<double>(n - 1);
    const double h = (hi - lo) / cells;
    return Grid({n, n}, {lo, lo}, {h, h}, b);
}

inline Grid cube(std::size_t n, double lo, double hi, Boundary b = Boundary::dirichlet_zero)
{
    const double cells = b == Boundary::periodic ? static_cast<double>(n) : static_cast<double>(n - 1);
    const double h = (hi - lo) / cells;
    return Grid({n, n, n}, {lo, lo, lo}, {h, h, h}, b);
}

template <class F>
ScalarField sample(const Grid& g, F f)
{
    return ScalarField::sample(g, [&](const Point3& p) { return f(p[0], p[1], p[2]); });
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Deterministic generator for hand-rolled property tests.
inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20240611ULL);
    return gen;
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline std::size_t uniform_int(std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng());
}

inline std::filesystem::path scratch_dir(const std::string& name)
{
    const char* base = std::getenv("SEMICLASSICAL_TEST_TMP");
    std::filesystem::path root = base ? base : std::filesystem::temp_directory_path() / "semiclassical_tests";
    std::filesystem::path dir = root / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
