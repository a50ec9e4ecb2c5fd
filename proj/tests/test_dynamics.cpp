#include <catch_amalgamated.hpp>

#include <fstream>

#include "semiclassical/dynamics.hpp"
#include "semiclassical/error.hpp"
#include "semiclassical/verify.hpp"
#include "support.hpp"

using namespace semiclassical;
using testing::line;

namespace {

const PhysicalConstants unit{};

/// One Crank-Nicolson step multiplies an eigenmode of energy e by this factor.
complex cn_factor(double e, double dt, double hbar)
{
    const complex a(0, dt * e / (2 * hbar));
    return (1.0 - a) / (1.0 + a);
}

EvolutionOptions options(double dt, double T, std::size_t stride = 1)
{
    EvolutionOptions o;
    o.dt = dt;
    o.T = T;
    o.snapshot_stride = stride;
    return o;
}

std::vector<InitialCondition> at_rest(std::span<const Point3> x0)
{
    std::vector<InitialCondition> ic;
    for (const auto& x : x0) ic.push_back({x, {0, 0, 0}});
    return ic;
}

double oscillator_error(double dt)
{
    const Grid g = line(201, -3, 3);
    const auto V = testing::sample(g, [](double x, double, double) { return 0.5 * x * x; });
    const std::vector<InitialCondition> ic{{{1.0, 0, 0}, {0.5, 0, 0}}};
    const auto set = integrate_classical(PotentialSchedule(V), unit, ic, dt, 2.0);
    const double t = set.times.back();
    return std::abs(set.paths[0].back()[0] - (std::cos(t) + 0.5 * std::sin(t)));
}

}  // namespace

TEST_CASE("plane wave keeps its modulus and picks up the discrete phase", "[dynamics][cn]")
{
    const std::size_t n = 64;
    const Grid g = line(n, 0, 2 * testing::pi, Boundary::periodic);
    const int k = 3;
    const auto psi0 = ComplexField::sample(g, [&](const Point3& p) { return std::exp(complex(0, k * p[0])); });
    const double h = g.spacing(0);
    const double e = 0.5 * 4 / (h * h) * std::pow(std::sin(k * h / 2), 2);
    const double dt = 0.01;
    const auto ev = evolve_schrodinger(psi0, PotentialSchedule(ScalarField::zeros(g)), unit, options(dt, 1.0, 100));
    const complex factor = std::pow(cn_factor(e, dt, 1.0), 100);
    for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(std::abs(ev.psi_history.back()[i]) == Catch::Approx(1.0).epsilon(1e-12));
        REQUIRE(std::abs(ev.psi_history.back()[i] - factor * psi0[i]) < 1e-10);
    }
}

TEST_CASE("constant potential shifts the discrete energy", "[dynamics][cn]")
{
    const Grid g = line(32, 0, 2 * testing::pi, Boundary::periodic);
    const auto psi0 = ComplexField::sample(g, [](const Point3& p) { return std::exp(complex(0, 2 * p[0])); });
    const double h = g.spacing(0);
    const double e = 0.5 * 4 / (h * h) * std::pow(std::sin(h), 2);
    const double V0 = 2.5;
    const auto ev = evolve_schrodinger(psi0, PotentialSchedule(ScalarField::filled(g, V0)), unit, options(0.01, 0.5, 50));
    const complex factor = std::pow(cn_factor(e + V0, 0.01, 1.0), 50);
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(std::abs(ev.psi_history.back()[i] - factor * psi0[i]) < 1e-10);
}

TEST_CASE("closed evolution conserves the norm", "[dynamics][cn][property]")
{
    for (int trial = 0; trial < 5; ++trial) {
        const Grid g = line(testing::uniform_int(30, 80), -1, 1);
        std::vector<complex> v(g.size(), 0.0);
        for (std::size_t i = 1; i + 1 < g.size(); ++i) v[i] = complex(testing::uniform(-1, 1), testing::uniform(-1, 1));
        const ComplexField psi0(g, v);
        const double a = testing::uniform(-5, 5);
        const auto V = testing::sample(g, [&](double x, double, double) { return a * x * x; });
        const auto ev = evolve_schrodinger(psi0, PotentialSchedule(V), unit, options(1e-3, 0.2, 200));
        REQUIRE_FALSE(ev.driven);
        REQUIRE(ev.norm_drift_rate() <= 1e-10 * psi0.norm());
        REQUIRE(ev.times.size() == 2);
    }
}

TEST_CASE("snapshot stride must divide the step count", "[dynamics][cn]")
{
    const Grid g = line(16, -1, 1);
    const auto psi0 = ComplexField::sample(g, [](const Point3&) { return complex(0, 0); });
    CHECK_THROWS_AS(evolve_schrodinger(psi0, PotentialSchedule(ScalarField::zeros(g)), unit, options(0.1, 1.0, 3)), Error);
    CHECK_THROWS_AS(evolve_schrodinger(psi0, PotentialSchedule(ScalarField::zeros(line(17, -1, 1))), unit, options(0.1, 1.0)),
                    GridError);
}

TEST_CASE("stationary scenario keeps its amplitude", "[dynamics][cn]")
{
    const Grid g = line(256, -1.2, 1.2);
    const auto R = testing::sample(g, [](double x, double, double) { return std::cos(x); });
    const auto St = testing::sample(g, [](double x, double, double) { return 0.5 * std::sin(x); });
    const auto s = construct_stationary(R, St, 0.0, 1.0, unit);
    EvolutionOptions o = options(1e-3, 0.5, 50);
    o.drive = scenario_drive(s);
    const auto ev = evolve_schrodinger(s.wavefunction(0), potential_schedule(s), unit, o);
    CHECK(ev.driven);
    CHECK(amplitude_drift(ev, s) < 1e-4);
}

TEST_CASE("potential schedule interpolates linearly", "[dynamics]")
{
    const Grid g = line(8, 0, 1);
    const PotentialSchedule V({0.0, 1.0}, {ScalarField::filled(g, 1.0), ScalarField::filled(g, 3.0)});
    CHECK(V.at(0.25)[3] == Catch::Approx(1.5));
    const auto b = V.bracket(1.0);
    CHECK(b.w == Catch::Approx(1.0));
    CHECK_THROWS_AS(V.at(1.5), TimeMeshError);
    CHECK(PotentialSchedule(ScalarField::filled(g, 2.0)).at(7.0)[0] == 2.0);
}

TEST_CASE("polar decomposition unwraps a fast phase", "[dynamics][polar]")
{
    const Grid g = line(200, 0, 4);
    const auto psi = ComplexField::sample(g, [](const Point3& p) { return 0.5 * std::exp(complex(0, 5 * p[0] * p[0])); });
    const auto pd = polar_decompose(psi, PhysicalConstants(2.0, 1.0));
    CHECK(pd.components == 1);
    CHECK_FALSE(pd.disconnected);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double x0 = g.coordinate(0, i - 1), x1 = g.coordinate(0, i);
        REQUIRE(pd.phi[i] - pd.phi[i - 1] == Catch::Approx(2.0 * 5 * (x1 * x1 - x0 * x0)).margin(1e-9));
        REQUIRE(pd.R[i] == Catch::Approx(0.5));
    }
}

TEST_CASE("polar decomposition reports disconnected components", "[dynamics][polar]")
{
    const Grid g = line(101, -2, 2);
    const auto psi = ComplexField::sample(g, [](const Point3& p) { return complex(p[0] == 0.0 ? 0.0 : std::tanh(50 * p[0]), 0); });
    const auto pd = polar_decompose(psi, unit, 0.1);
    CHECK(pd.components == 2);
    CHECK(pd.disconnected);
    CHECK(pd.phi[g.size() / 2] == 0.0);
}

TEST_CASE("plane-wave guidance moves at the discrete group speed", "[dynamics][bohmian]")
{
    const std::size_t n = 64;
    const Grid g = line(n, 0, 2 * testing::pi, Boundary::periodic);
    const auto psi0 = ComplexField::sample(g, [](const Point3& p) { return std::exp(complex(0, p[0])); });
    const auto ev = evolve_schrodinger(psi0, PotentialSchedule(ScalarField::zeros(g)), unit, options(0.01, 1.0, 10));
    const double h = g.spacing(0);
    const double speed = std::sin(h) / h;
    const std::vector<Point3> x0{{0.3, 0, 0}, {6.0, 0, 0}};
    const auto set = integrate_bohmian(ev, x0, unit);
    REQUIRE(set.paths[0].size() == ev.times.size());
    for (std::size_t p = 0; p < x0.size(); ++p) {
        CHECK(set.status[p] == PathStatus::ok);
        CHECK(set.paths[p].back()[0] == Catch::Approx(x0[p][0] + speed).margin(1e-10));
    }
}

TEST_CASE("real wavefunctions have resting Bohmian particles", "[dynamics][bohmian]")
{
    const Grid g = line(128, -1, 1);
    const auto psi0 = ComplexField::sample(g, [](const Point3& p) { return complex(std::cos(testing::pi * p[0] / 2), 0); });
    const auto vel = bohmian_velocity(psi0, unit);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!vel.mask[i]) REQUIRE(vel.v[0][i] == 0.0);
    EvolutionOptions o = options(0.01, 0.1, 10);
    const auto ev = evolve_schrodinger(psi0, PotentialSchedule(ScalarField::zeros(g)), unit, o);
    // Stationary real eigenfunction of the continuum: velocities stay tiny.
    const std::vector<Point3> x0{{0.0, 0, 0}, {0.5, 0, 0}};
    const auto set = integrate_bohmian(ev, x0, unit);
    CHECK(set.paths[0].back()[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(set.paths[1].back()[0] == Catch::Approx(0.5).margin(1e-3));
}

TEST_CASE("classical motion under a constant potential is uniform", "[dynamics][classical]")
{
    const Grid g = testing::square(32, -2, 2);
    const std::vector<InitialCondition> ic{{{0.1, -0.3, 0}, {0.4, 0.2, 0}}, {{0, 0, 0}, {0, 0, 0}}};
    const auto set = integrate_classical(PotentialSchedule(ScalarField::filled(g, 4.0)), unit, ic, 0.01, 1.0);
    CHECK(set.paths[0].back()[0] == Catch::Approx(0.5));
    CHECK(set.paths[0].back()[1] == Catch::Approx(-0.1));
    CHECK(set.paths[1].back()[0] == 0.0);
}

TEST_CASE("harmonic oscillator paths", "[dynamics][classical]")
{
    CHECK(oscillator_error(0.01) < 1e-6);

    const Grid g = line(201, -3, 3);
    const auto V = testing::sample(g, [](double x, double, double) { return 0.5 * x * x; });
    const std::vector<InitialCondition> ic{{{1.0, 0, 0}, {0, 0, 0}}};
    const auto a = integrate_classical(PotentialSchedule(V), unit, ic, 0.01, 1.0);
    const auto b = integrate_classical(PotentialSchedule(V + 17.0), unit, ic, 0.01, 1.0);
    // Only rounding in the force separates the two runs.
    CHECK(compare_trajectories(a, b, 1e-12).passed());
}

TEST_CASE("RK4 converges at fourth order", "[dynamics][classical][order]")
{
    std::vector<double> steps, errors;
    for (double dt : {0.2, 0.1, 0.05, 0.025}) {
        steps.push_back(dt);
        errors.push_back(oscillator_error(dt));
    }
    const auto fit = fit_convergence(steps, errors);
    INFO("order " << fit.fitted_order);
    CHECK(fit.fitted_order >= 3.8);
    CHECK(fit.fitted_order <= 4.2);
}

TEST_CASE("particles leaving a Dirichlet box are truncated", "[dynamics][classical]")
{
    const Grid g = line(32, -1, 1);
    const std::vector<InitialCondition> ic{{{0.5, 0, 0}, {2.0, 0, 0}}};
    const auto set = integrate_classical(PotentialSchedule(ScalarField::zeros(g)), unit, ic, 0.01, 1.0);
    CHECK(set.status[0] == PathStatus::escaped);
    CHECK(set.paths[0].size() < set.times.size());

    const auto other = integrate_classical(PotentialSchedule(ScalarField::zeros(g)), unit, at_rest(std::vector<Point3>{{0.5, 0, 0}}),
                                           0.01, 1.0);
    const auto entry = compare_trajectories(set, other, 10.0);
    CHECK_FALSE(entry.passed());
    CHECK(measure_deviation(set, other).truncated == 1);

    std::vector<std::uint8_t> flags(g.size(), 0);
    flags[24] = 1;
    const NodeMask mask(flags);
    const std::vector<InitialCondition> towards{{{0.0, 0, 0}, {1.0, 0, 0}}};
    const auto masked = integrate_classical(PotentialSchedule(ScalarField::zeros(g)), unit, towards, 0.01, 1.0, &mask);
    CHECK(masked.status[0] == PathStatus::masked);
}

TEST_CASE("locate wraps periodic positions", "[dynamics]")
{
    const Grid g = line(10, 0, 1, Boundary::periodic);
    const auto values = testing::sample(g, [](double x, double, double) { return x; });
    const auto cell = locate(g, {1.05, 0, 0});
    REQUIRE(cell);
    CHECK(interpolate(values.values(), *cell) == Catch::Approx(0.05));
    CHECK_FALSE(locate(line(10, 0, 1), {1.05, 0, 0}));
    const auto inside = locate(line(11, 0, 1), {0.35, 0, 0});
    REQUIRE(inside);
    CHECK(interpolate(testing::sample(line(11, 0, 1), [](double x, double, double) { return 3 * x; }).values(), *inside) ==
          Catch::Approx(1.05));
}

TEST_CASE("identical trajectory sets have zero deviation", "[dynamics][compare][property]")
{
    const Grid g = line(64, -2, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = testing::uniform(0.1, 2);
        const auto V = testing::sample(g, [&](double x, double, double) { return a * x * x; });
        std::vector<InitialCondition> ic;
        for (int p = 0; p < 4; ++p) ic.push_back({{testing::uniform(-0.5, 0.5), 0, 0}, {testing::uniform(-0.3, 0.3), 0, 0}});
        const auto s = integrate_classical(PotentialSchedule(V), unit, ic, 0.01, 0.5);
        const auto e = compare_trajectories(s, s, 0.0);
        REQUIRE(e.passed());
        REQUIRE(e.measured == 0.0);
    }
}

TEST_CASE("trajectory CSV layout", "[dynamics][io]")
{
    const Grid g = testing::square(16, -1, 1);
    const std::vector<InitialCondition> ic{{{0.1, 0.2, 0}, {0.1, 0, 0}}};
    const auto set = integrate_classical(PotentialSchedule(ScalarField::zeros(g)), unit, ic, 0.1, 0.3);
    const auto dir = testing::scratch_dir("trajectory_csv");
    io::write_trajectories_csv(dir / "t.csv", set);
    std::ifstream in(dir / "t.csv");
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "particle_id,t,x,y,flag");
    std::size_t rows = 0;
    while (std::getline(in, row)) ++rows;
    CHECK(rows == set.times.size());
}

TEST_CASE("gauge phase leaves Bohmian velocities unchanged", "[dynamics][gauge]")
{
    const Grid g = line(64, 0, 2 * testing::pi, Boundary::periodic);
    const auto psi0 = ComplexField::sample(g, [](const Point3& p) { return std::exp(complex(0, p[0])) * (1.5 + std::cos(p[0])); });
    const auto ev = evolve_schrodinger(psi0, PotentialSchedule(ScalarField::zeros(g)), unit, options(0.01, 0.2, 10));
    const GaugeShift shift = GaugeShift::constant(3.0, ev.times, 1.0);
    const auto shifted = gauge_shift(ev, shift);
    const auto v0 = bohmian_velocity(ev.psi_history.back(), unit);
    const auto v1 = bohmian_velocity(shifted.psi_history.back(), unit);
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(std::abs(v0.v[0][i] - v1.v[0][i]) < 1e-12);
    const auto Vs = gauge_shift(PotentialSchedule(ScalarField::zeros(g)), shift);
    CHECK(Vs.at(0.1)[0] == Catch::Approx(3.0));
}
