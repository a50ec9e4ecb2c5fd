#include <catch_amalgamated.hpp>

#include "semiclassical/error.hpp"
#include "semiclassical/potentials.hpp"
#include "support.hpp"

using namespace semiclassical;
using testing::line;
using testing::square;

namespace {

const PhysicalConstants unit{};

double sec(double x) { return 1.0 / std::cos(x); }

}  // namespace

TEST_CASE("quantum potential of cos 2x is the constant 2", "[potentials][q]")
{
    const Grid g = line(256, 0, testing::pi, Boundary::periodic);
    const auto R = testing::sample(g, [](double x, double, double) { return std::cos(2 * x); });
    const auto q = quantum_potential(R, unit, default_eps_node(R));
    double err = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!q.mask[i]) err = std::max(err, std::abs(q.Q[i] - 2.0));
    // Discrete symbol: (2/h^2)(1 - cos 2h) = 4 - (4/3) h^2 + ...
    const double h = g.spacing(0);
    CHECK(err == Catch::Approx(2.0 - (1.0 - std::cos(2 * h)) / (h * h)).margin(1e-9));
    CHECK(err < 2 * h * h);
}

TEST_CASE("quantum potential of a Gaussian", "[potentials][q]")
{
    const Grid g = line(601, -3, 3);
    const auto R = testing::sample(g, [](double x, double, double) { return std::exp(-x * x / 2); });
    const auto q = quantum_potential(R, unit, default_eps_node(R));
    REQUIRE(q.mask.count() == 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.interior(i)) continue;
        const double x = g.coordinate(0, i);
        REQUIRE(q.Q[i] == Catch::Approx((1 - x * x) / 2).margin(1e-3));
    }
}

TEST_CASE("quantum potential scales with hbar^2 / m", "[potentials][q][property]")
{
    const Grid g = line(64, -1, 1);
    const auto R = testing::sample(g, [](double x, double, double) { return 2 + std::cos(3 * x); });
    const auto base = quantum_potential(R, unit, 1e-9);
    for (int trial = 0; trial < 20; ++trial) {
        const PhysicalConstants c(testing::uniform(0.1, 3), testing::uniform(0.1, 3));
        const double a = testing::uniform(0.1, 10);
        const auto q = quantum_potential(a * R, c, 1e-9);
        for (std::size_t i = 0; i < g.size(); ++i)
            REQUIRE(q.Q[i] == Catch::Approx(base.Q[i] * c.hbar * c.hbar / c.mass).epsilon(1e-10).margin(1e-12));
    }
}

TEST_CASE("degenerate amplitudes are rejected", "[potentials][q]")
{
    const Grid g = line(16, 0, 1);
    CHECK_THROWS_AS(quantum_potential(ScalarField::zeros(g), unit, 1e-6), DegenerateAmplitudeError);
    CHECK_THROWS_AS(construct_stationary(ScalarField::zeros(g), ScalarField::zeros(g), 0, 0, unit),
                    DegenerateAmplitudeError);
}

TEST_CASE("stationary potential of R = cos x, S~ = sin x", "[potentials][stationary]")
{
    const Grid g = line(481, -1.2, 1.2);
    const auto R = testing::sample(g, [](double x, double, double) { return std::cos(x); });
    const auto St = testing::sample(g, [](double x, double, double) { return std::sin(x); });
    const auto s = construct_stationary(R, St, 0.0, 1.0, unit);
    REQUIRE(s.stationary());
    REQUIRE(s.slices() == 1);
    double err = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coordinate(0, i);
        err = std::max(err, std::abs(s.potential[0][i] + 0.5 * (1 + std::pow(sec(x), 4))));
        REQUIRE(s.phase[0][i] == Catch::Approx(std::tan(x)).margin(1e-12));
    }
    CHECK(err <= 1e-3);
    CHECK(s.quantum_constant(0) == Catch::Approx(0.5));
}

TEST_CASE("proportional phase numerator gives a constant potential", "[potentials][stationary][property]")
{
    const Grid g = square(48, 0, 2 * testing::pi, Boundary::periodic);
    for (int trial = 0; trial < 10; ++trial) {
        const double c = testing::uniform(-2, 2), E = testing::uniform(-1, 1);
        const PhysicalConstants pc(testing::uniform(0.5, 2), testing::uniform(0.5, 2));
        const auto R = testing::sample(g, [](double x, double y, double) { return std::cos(x) * std::cos(y) + 3 * std::cos(x + y); });
        // (Laplacian + 2) annihilates cos(x + y) and cos x cos y.
        const auto s = construct_stationary(R, c * R, E, std::sqrt(2.0), pc, {.eps_node = 1e-8, .tolerances = {0.1, 0.1}});
        const double K = quantum_potential_constant(std::sqrt(2.0), pc);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (s.mask[0][i]) continue;
            REQUIRE(s.phase[0][i] == Catch::Approx(c).margin(1e-12));
            REQUIRE(s.potential[0][i] == Catch::Approx(E - K).margin(1e-9));
        }
    }
}

TEST_CASE("free particle: constant amplitude and linear phase", "[potentials][stationary]")
{
    const Grid g = line(32, -1, 1);
    const double p = 0.7;
    const auto R = evaluate_mode(HelmholtzMode::affine(1.0), g);
    const auto St = evaluate_mode(HelmholtzMode::affine(0.0, {p}), g);
    const auto s = construct_stationary(R, St, p * p / 2, 0.0, unit);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(s.potential[0][i] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("Helmholtz preconditions name the failing field", "[potentials][stationary]")
{
    const Grid g = line(200, -1, 1);
    const auto good = testing::sample(g, [](double x, double, double) { return std::cos(x); });
    const auto bad = testing::sample(g, [](double x, double, double) { return std::cos(1.3 * x); });
    try {
        construct_stationary(bad, good, 0, 1, unit);
        FAIL("expected a precondition error");
    } catch (const HelmholtzPreconditionError& e) {
        CHECK(e.field() == "R");
        CHECK(e.residual() > 0.1);
    }
    try {
        construct_stationary(good, bad, 0, 1, unit);
        FAIL("expected a precondition error");
    } catch (const HelmholtzPreconditionError& e) {
        CHECK(e.field() == "S_tilde");
    }
    CHECK_THROWS_AS(construct_stationary(good, testing::sample(line(201, -1, 1), [](double, double, double) { return 1.0; }),
                                         0, 1, unit),
                    GridError);
}

TEST_CASE("time-dependent potential against a closed form", "[potentials][time]")
{
    // R = a(t) cos x with a = 1 + t/2 and phi~ = -a' x sin x, so
    // phi = -(a'/a) x tan x.
    const Grid g = line(401, -1, 1);
    const std::size_t nt = 41;
    std::vector<double> times(nt);
    for (std::size_t k = 0; k < nt; ++k) times[k] = static_cast<double>(k) / (nt - 1);
    std::vector<ScalarField> R, num;
    for (double t : times) {
        const double a = 1 + 0.5 * t;
        R.push_back(testing::sample(g, [&](double x, double, double) { return a * std::cos(x); }));
        num.push_back(testing::sample(g, [&](double x, double, double) { return -0.5 * x * std::sin(x); }));
    }
    const auto s = construct_time_dependent(R, num, LambdaSchedule::constant(1.0, times), unit);
    REQUIRE(s.slices() == nt);
    double err = 0;
    for (std::size_t k = 0; k < nt; ++k) {
        const double r = 0.5 / (1 + 0.5 * times[k]);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.coordinate(0, i);
            const double grad = -r * (std::tan(x) + x * sec(x) * sec(x));
            const double V = -r * r * x * std::tan(x) - 0.5 * (1 + grad * grad);
            err = std::max(err, std::abs(s.potential[k][i] - V));
        }
    }
    CHECK(err < 1e-3);
}

TEST_CASE("solved phase numerators satisfy the inhomogeneous equation", "[potentials][time]")
{
    const Grid g = line(201, -1, 1);
    std::vector<double> times;
    std::vector<ScalarField> R;
    for (int k = 0; k <= 10; ++k) {
        const double t = 0.1 * k;
        times.push_back(t);
        R.push_back(testing::sample(g, [&](double x, double, double) { return (1 + t) * std::cos(x); }));
    }
    const LambdaSchedule lambda = LambdaSchedule::constant(1.0, times);
    const auto num = solve_phase_numerators(R, lambda, unit);
    REQUIRE(num.size() == R.size());
    const auto s = construct_time_dependent(R, num, lambda, unit, {.eps_node = 0, .tolerances = {1e-2, 1e-8}});
    CHECK_FALSE(s.stationary());

    std::vector<ScalarField> wrong(num.begin(), num.end());
    wrong[3] = wrong[3] + 0.1;
    CHECK_THROWS_AS(construct_time_dependent(R, wrong, lambda, unit), HelmholtzPreconditionError);
    CHECK_THROWS_AS(construct_time_dependent(std::span(R).first(2), std::span(num).first(2),
                                             LambdaSchedule::constant(1.0, {0.0, 0.1}), unit),
                    TimeMeshError);
}

TEST_CASE("restricted ansatz numerator", "[potentials][ansatz]")
{
    const Grid g = line(1001, -1.2, 1.2);
    const auto R = testing::sample(g, [](double x, double, double) { return std::cos(x); });
    const double flux = 0.4;
    const auto St = restricted_ansatz_numerator(R, flux);
    const double t0 = std::tan(-1.2);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coordinate(0, i);
        REQUIRE(St[i] / R[i] == Catch::Approx(flux * (std::tan(x) - t0)).margin(1e-4));
    }
    const auto nodal = testing::sample(line(65, -testing::pi / 2, testing::pi / 2), [](double x, double, double) { return std::cos(x); });
    CHECK_THROWS_AS(restricted_ansatz_numerator(nodal, 1.0), DegenerateAmplitudeError);
    CHECK_THROWS_AS(restricted_ansatz_numerator(ScalarField::filled(square(8, 0, 1), 1.0), 1.0), GridError);
}

TEST_CASE("gauge phase is the integral of f", "[potentials][gauge]")
{
    const GaugeShift unit_shift = GaugeShift::constant(1.0, {0.0, 0.5, 1.0}, 1.0);
    CHECK(unit_shift.zeta_at(1.0) == Catch::Approx(-1.0));
    CHECK(unit_shift.is_constant());

    std::vector<double> times, f;
    for (int k = 0; k <= 20; ++k) {
        times.push_back(0.05 * k);
        f.push_back(0.05 * k);
    }
    const GaugeShift linear(times, f, 2.0);
    for (double t : times) CHECK(linear.zeta_at(t) == Catch::Approx(-t * t / 4).margin(1e-14));
    CHECK_THROWS_AS(linear.index_of(0.123), TimeMeshError);
    CHECK_THROWS_AS(GaugeShift({0.1, 0.2}, {1, 1}, 1.0), TimeMeshError);
}

TEST_CASE("constant shift of a stationary scenario", "[potentials][gauge]")
{
    const Grid g = line(128, -1.2, 1.2);
    const auto R = testing::sample(g, [](double x, double, double) { return std::cos(x); });
    const auto s = construct_stationary(R, 0.5 * testing::sample(g, [](double x, double, double) { return std::sin(x); }),
                                        0.25, 1.0, unit);
    const auto shifted = gauge_shift(s, GaugeShift::constant(1.0, {0.0, 1.0}, 1.0));
    REQUIRE(shifted.stationary());
    CHECK(shifted.energy == Catch::Approx(1.25));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(shifted.potential[0][i] - s.potential[0][i] == Catch::Approx(1.0));
    REQUIRE(shifted.gauge_zeta.size() == 1);
    CHECK(shifted.gauge_zeta[0] == Catch::Approx(-1.0));

    const auto psi = s.wavefunction(0);
    const auto psi1 = gauge_shift(psi, 1.0, GaugeShift::constant(1.0, {0.0, 1.0}, 1.0));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(psi1[i] - psi[i] * std::polar(1.0, -1.0)) < 1e-15);
}

TEST_CASE("non-constant shift makes a stationary scenario time-dependent", "[potentials][gauge]")
{
    const Grid g = line(64, -1.2, 1.2);
    const auto R = testing::sample(g, [](double x, double, double) { return std::cos(x); });
    const auto s = construct_stationary(R, R, 0.0, 1.0, unit);
    const GaugeShift shift({0.0, 0.5, 1.0}, {0.0, 1.0, 2.0}, 1.0);
    const auto out = gauge_shift(s, shift);
    REQUIRE_FALSE(out.stationary());
    REQUIRE(out.slices() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            REQUIRE(out.amplitude[k][i] == R[i]);
            REQUIRE(out.potential[k][i] == Catch::Approx(s.potential[0][i] + shift.f()[k]));
        }
        CHECK(out.gauge_zeta[k] == shift.zeta()[k]);
    }
    const auto sign = quantum_potential_gauge(s, {0.0, 1.0}, -1.0);
    CHECK(sign.f()[0] == Catch::Approx(-0.5));
}

TEST_CASE("coarsening a scenario", "[potentials][coarsen]")
{
    const Grid g = line(129, -1.2, 1.2);
    const auto R = testing::sample(g, [](double x, double, double) { return std::cos(x); });
    const auto s = construct_stationary(R, R, 0.0, 1.0, unit);
    const auto c = coarsen(s);
    CHECK(c.grid == g.coarsened());
    CHECK(c.potential[0].size() == 65);
    CHECK(c.mask[0].size() == 65);
    CHECK(c.eps_node == s.eps_node);
}
