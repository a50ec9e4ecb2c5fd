#include <catch_amalgamated.hpp>

#include "semiclassical/error.hpp"
#include "support.hpp"

using namespace semiclassical;
using testing::line;
using testing::square;

TEST_CASE("grid geometry in 1D", "[grid]")
{
    const Grid g = line(11, 0.0, 1.0);
    CHECK(g.dim() == 1);
    CHECK(g.size() == 11);
    CHECK(g.length(0) == Catch::Approx(1.0));
    CHECK(g.coordinate(0, 10) == Catch::Approx(1.0));
    CHECK_FALSE(g.interior(0));
    CHECK_FALSE(g.interior(10));
    CHECK(g.interior(5));
    CHECK(g.interior_count() == 9);
}

TEST_CASE("periodic grids have no boundary nodes", "[grid]")
{
    const Grid g = line(8, 0.0, 1.0, Boundary::periodic);
    CHECK(g.spacing(0) == Catch::Approx(0.125));
    CHECK(g.length(0) == Catch::Approx(1.0));
    CHECK(g.interior_count() == g.size());
}

TEST_CASE("flatten and unflatten are inverse", "[grid][property]")
{
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = static_cast<int>(testing::uniform_int(1, 3));
        std::vector<std::size_t> ext;
        std::vector<double> org, sp;
        for (int d = 0; d < dim; ++d) {
            ext.push_back(testing::uniform_int(4, 9));
            org.push_back(testing::uniform(-1, 1));
            sp.push_back(testing::uniform(0.1, 1));
        }
        const Grid g(ext, org, sp, Boundary::dirichlet_zero);
        for (std::size_t n = 0; n < g.size(); ++n) {
            REQUIRE(g.flatten(g.unflatten(n)) == n);
            const auto p = g.position(n);
            const auto idx = g.unflatten(n);
            for (int d = 0; d < dim; ++d) REQUIRE(p[d] == Catch::Approx(g.coordinate(d, idx[d])));
        }
        REQUIRE(g.stride(dim - 1) == 1);
    }
}

TEST_CASE("coarsening keeps every second node", "[grid]")
{
    const Grid g = line(9, -1.0, 1.0);
    REQUIRE(g.can_coarsen());
    const Grid c = g.coarsened();
    CHECK(c.extent(0) == 5);
    CHECK(c.spacing(0) == Catch::Approx(2 * g.spacing(0)));
    CHECK(c.upper(0) == Catch::Approx(g.upper(0)));

    const Grid p = line(16, 0.0, 1.0, Boundary::periodic);
    CHECK(p.coarsened().extent(0) == 8);
    CHECK(p.coarsened().length(0) == Catch::Approx(1.0));
    CHECK_FALSE(line(15, 0.0, 1.0, Boundary::periodic).can_coarsen());
}

TEST_CASE("invalid grids are rejected", "[grid]")
{
    CHECK_THROWS_AS(Grid({3}, {0.0}, {0.1}, Boundary::dirichlet_zero), GridError);
    CHECK_THROWS_AS(Grid({8}, {0.0}, {-0.1}, Boundary::dirichlet_zero), GridError);
    CHECK_THROWS_AS(Grid({8, 8}, {0.0}, {0.1, 0.1}, Boundary::dirichlet_zero), GridError);
    CHECK_THROWS_AS(Grid({8}, {0.0}, {0.1}, Boundary::dirichlet_zero, 4), GridError);
    CHECK_THROWS(boundary_from_string("neumann"));
    CHECK(boundary_from_string(to_string(Boundary::periodic)) == Boundary::periodic);
}

TEST_CASE("mismatched grids are reported", "[grid]")
{
    CHECK_NOTHROW(require_same_grid(square(8, 0, 1), square(8, 0, 1), "same"));
    CHECK_THROWS_AS(require_same_grid(square(8, 0, 1), square(9, 0, 1), "extent"), GridError);
}
