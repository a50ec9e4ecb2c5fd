#include "semiclassical/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semiclassical/error.hpp"
#include "semiclassical/operators.hpp"

namespace semiclassical {

std::string_view to_string(ScenarioCase c)
{
    return c == ScenarioCase::stationary ? "stationary" : "time_dependent";
}

ScenarioCase scenario_case_from_string(std::string_view s)
{
    if (s == "stationary") return ScenarioCase::stationary;
    if (s == "time_dependent") return ScenarioCase::time_dependent;
    throw Error("unknown scenario case '" + std::string(s) + "'");
}

QuantumPotential quantum_potential(const ScalarField& R, const PhysicalConstants& c, double eps_node)
{
    NodeMask mask = NodeMask::below(R, eps_node);
    if (mask.all()) {
        throw DegenerateAmplitudeError("every node has |R| < eps_node = " + std::to_string(eps_node));
    }
    std::vector<double> lap(R.size());
    laplacian_into(R.grid(), R.values(), lap);
    const double pref = -c.hbar * c.hbar / (2.0 * c.mass);
    std::vector<double> q(R.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!mask[i]) q[i] = pref * lap[i] / R[i];
    }
    return {ScalarField(R.grid(), std::move(q)), std::move(mask)};
}

double SemiclassicalScenario::quantum_constant(std::size_t k) const
{
    return quantum_potential_constant(lambda_at_slice(k), constants);
}

ScalarField SemiclassicalScenario::phase_at(std::size_t k, double t) const
{
    if (!stationary()) return phase.at(k);
    if (t == 0.0) return phase.at(k);
    return phase.at(k) + (-energy * t);
}

ComplexField SemiclassicalScenario::wavefunction(std::size_t k, double t) const
{
    return ComplexField::from_polar(amplitude.at(k), phase_at(k, t), constants.hbar);
}

double SemiclassicalScenario::mask_fraction() const
{
    if (mask.empty()) return 0.0;
    NodeMask any = mask.front();
    for (std::size_t k = 1; k < mask.size(); ++k) any = any | mask[k];
    return any.fraction();
}

namespace {

double resolve_eps(double requested, std::span<const ScalarField> R)
{
    if (requested > 0.0) return requested;
    double m = 0.0;
    for (const auto& r : R) m = std::max(m, r.max_abs());
    if (m == 0.0) throw DegenerateAmplitudeError("amplitude is identically zero");
    return 1e-6 * m;
}

void require_helmholtz(const ScalarField& f, double lambda, double tol, const std::string& name)
{
    const double res = helmholtz_residual(f, lambda);
    if (!(res <= tol)) {
        throw HelmholtzPreconditionError(name + " fails the Helmholtz constraint with lambda = " +
                                             std::to_string(lambda) + ": residual " + std::to_string(res) +
                                             " > tolerance " + std::to_string(tol),
                                         name, res);
    }
}

ScalarField masked_ratio(const ScalarField& num, const ScalarField& den, const NodeMask& mask)
{
    std::vector<double> v(num.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!mask[i]) v[i] = num[i] / den[i];
    }
    return ScalarField(num.grid(), std::move(v));
}

std::vector<double> squared_norm(const VectorField& v, std::size_t n)
{
    std::vector<double> g2(n, 0.0);
    for (const auto& comp : v) {
        for (std::size_t i = 0; i < n; ++i) g2[i] += comp[i] * comp[i];
    }
    return g2;
}

}  // namespace

VectorField phase_gradient(const ScalarField& numerator, const ScalarField& R, const NodeMask& mask)
{
    require_same_grid(numerator.grid(), R.grid(), "phase_gradient");
    const Grid& g = R.grid();
    std::vector<double> dn(g.size()), dr(g.size());
    VectorField out;
    out.reserve(g.dim());
    for (int a = 0; a < g.dim(); ++a) {
        partial_into(g, numerator.values(), a, dn);
        partial_into(g, R.values(), a, dr);
        std::vector<double> v(g.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!mask[i]) v[i] = (R[i] * dn[i] - numerator[i] * dr[i]) / (R[i] * R[i]);
        }
        out.emplace_back(g, std::move(v));
    }
    return out;
}

SemiclassicalScenario construct_stationary(const ScalarField& R, const ScalarField& S_tilde, double E, double lambda,
                                           const PhysicalConstants& c, const ScenarioOptions& options)
{
    require_same_grid(R.grid(), S_tilde.grid(), "construct_stationary");
    if (!std::isfinite(E)) throw Error("energy must be finite");
    const double tol = options.tolerances.helmholtz;
    require_helmholtz(R, lambda, tol, "R");
    require_helmholtz(S_tilde, lambda, tol, "S_tilde");

    const double eps = resolve_eps(options.eps_node, std::span(&R, 1));
    NodeMask mask = NodeMask::below(R, eps);
    if (mask.all()) throw DegenerateAmplitudeError("every node of R lies below eps_node");

    ScalarField S = masked_ratio(S_tilde, R, mask);
    const auto g2 = squared_norm(phase_gradient(S_tilde, R, mask), R.size());
    const double K2 = (c.hbar * lambda) * (c.hbar * lambda);
    const double inv2m = 1.0 / (2.0 * c.mass);
    std::vector<double> V(R.size(), 0.0);
    for (std::size_t i = 0; i < V.size(); ++i) {
        if (!mask[i]) V[i] = E - inv2m * (K2 + g2[i]);
    }

    return SemiclassicalScenario{
        .constants = c,
        .grid = R.grid(),
        .kind = ScenarioCase::stationary,
        .times = {0.0},
        .amplitude = {R},
        .phase_numerator = {S_tilde},
        .phase = {std::move(S)},
        .potential = {ScalarField(R.grid(), std::move(V))},
        .mask = {std::move(mask)},
        .energy = E,
        .lambda = LambdaSchedule::constant(lambda, {0.0}),
        .eps_node = eps,
        .tolerances = options.tolerances,
        .gauge_zeta = {},
        .id = {},
        .config_hash = {},
    };
}

std::vector<ScalarField> solve_phase_numerators(std::span<const ScalarField> R, const LambdaSchedule& lambda,
                                                const PhysicalConstants& c)
{
    if (R.size() != lambda.size()) throw TimeMeshError("one amplitude slice per schedule time is required");
    const auto dR = time_derivative(R, lambda.dt());
    std::vector<ScalarField> out;
    out.reserve(R.size());
    for (std::size_t k = 0; k < R.size(); ++k) {
        out.push_back(solve_inhomogeneous(R[k].grid(), lambda.values()[k], (-2.0 * c.mass) * dR[k]).field);
    }
    return out;
}

SemiclassicalScenario construct_time_dependent(std::span<const ScalarField> R, std::span<const ScalarField> phi_tilde,
                                               const LambdaSchedule& lambda, const PhysicalConstants& c,
                                               const ScenarioOptions& options)
{
    const std::size_t nt = lambda.size();
    if (nt < 3) throw TimeMeshError("time-dependent scenarios need at least 3 time samples");
    if (R.size() != nt || phi_tilde.size() != nt) {
        throw TimeMeshError("R and phi_tilde need one slice per schedule time (" + std::to_string(nt) + ")");
    }
    const Grid& g = R.front().grid();
    for (std::size_t k = 0; k < nt; ++k) {
        require_same_grid(g, R[k].grid(), "construct_time_dependent");
        require_same_grid(g, phi_tilde[k].grid(), "construct_time_dependent");
    }
    const double dt = lambda.dt();
    const auto& tol = options.tolerances;
    for (std::size_t k = 0; k < nt; ++k) {
        require_helmholtz(R[k], lambda.values()[k], tol.helmholtz, "R[" + std::to_string(k) + "]");
    }

    // (Laplacian + lambda^2) phi~ = -2m dR/dt
    const auto dR = time_derivative(R, dt);
    std::vector<double> lap(g.size());
    for (std::size_t k = 0; k < nt; ++k) {
        laplacian_into(g, phi_tilde[k].values(), lap);
        const double l2 = lambda.values()[k] * lambda.values()[k];
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g.interior(i)) continue;
            worst = std::max(worst, std::abs(lap[i] + l2 * phi_tilde[k][i] + 2.0 * c.mass * dR[k][i]));
        }
        if (!(worst <= tol.inhomogeneous)) {
            throw HelmholtzPreconditionError("phi_tilde[" + std::to_string(k) +
                                                 "] violates (Laplacian + lambda^2) phi~ = -2m dR/dt: residual " +
                                                 std::to_string(worst) + " > tolerance " +
                                                 std::to_string(tol.inhomogeneous),
                                             "phi_tilde[" + std::to_string(k) + "]", worst);
        }
    }

    const double eps = resolve_eps(options.eps_node, R);
    std::vector<NodeMask> masks;
    masks.reserve(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        masks.push_back(NodeMask::below(R[k], eps));
        if (masks.back().all()) {
            throw DegenerateAmplitudeError("every node of R[" + std::to_string(k) + "] lies below eps_node");
        }
        if (k > 0) {
            std::size_t flips = 0;
            for (std::size_t i = 0; i < g.size(); ++i) flips += masks[k][i] != masks[k - 1][i];
            const double frac = static_cast<double>(flips) / static_cast<double>(g.size());
            if (frac > kMaxMaskChange) {
                throw Error("nodal mask changes on " + std::to_string(100.0 * frac) + "% of nodes between slices " +
                            std::to_string(k - 1) + " and " + std::to_string(k));
            }
        }
    }

    std::vector<ScalarField> phi;
    phi.reserve(nt);
    for (std::size_t k = 0; k < nt; ++k) phi.push_back(masked_ratio(phi_tilde[k], R[k], masks[k]));
    const auto dphi = time_derivative(phi, dt);

    const double inv2m = 1.0 / (2.0 * c.mass);
    std::vector<ScalarField> V;
    V.reserve(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        const auto g2 = squared_norm(phase_gradient(phi_tilde[k], R[k], masks[k]), g.size());
        const double hl = c.hbar * lambda.values()[k];
        std::vector<double> v(g.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!masks[k][i]) v[i] = -dphi[k][i] - inv2m * (hl * hl + g2[i]);
        }
        V.emplace_back(g, std::move(v));
    }

    return SemiclassicalScenario{
        .constants = c,
        .grid = g,
        .kind = ScenarioCase::time_dependent,
        .times = {lambda.times().begin(), lambda.times().end()},
        .amplitude = {R.begin(), R.end()},
        .phase_numerator = {phi_tilde.begin(), phi_tilde.end()},
        .phase = std::move(phi),
        .potential = std::move(V),
        .mask = std::move(masks),
        .energy = 0.0,
        .lambda = lambda,
        .eps_node = eps,
        .tolerances = tol,
        .gauge_zeta = {},
        .id = {},
        .config_hash = {},
    };
}

ScalarField restricted_ansatz_numerator(const ScalarField& R, double flux)
{
    const Grid& g = R.grid();
    if (g.dim() != 1) throw GridError("the restricted ansatz is one-dimensional");
    const double eps = default_eps_node(R);
    for (std::size_t i = 0; i < R.size(); ++i) {
        if (std::abs(R[i]) < eps) throw DegenerateAmplitudeError("R has a node; 1/R^2 is not integrable across it");
    }
    const double h = g.spacing(0);
    std::vector<double> S(R.size(), 0.0);
    for (std::size_t i = 1; i < S.size(); ++i) {
        const double a = 1.0 / (R[i - 1] * R[i - 1]);
        const double b = 1.0 / (R[i] * R[i]);
        S[i] = S[i - 1] + 0.5 * h * flux * (a + b);
    }
    for (std::size_t i = 0; i < S.size(); ++i) S[i] *= R[i];
    return ScalarField(g, std::move(S));
}

GaugeShift::GaugeShift(std::vector<double> times, std::vector<double> f, double hbar)
    : times_(std::move(times)), f_(std::move(f))
{
    if (times_.empty() || times_.size() != f_.size()) throw Error("gauge shift needs matching time and f samples");
    if (!(hbar > 0.0)) throw Error("hbar must be positive");
    for (std::size_t i = 0; i < f_.size(); ++i) {
        if (!std::isfinite(f_[i]) || !std::isfinite(times_[i])) throw Error("gauge samples must be finite");
        if (i > 0 && !(times_[i] > times_[i - 1])) throw TimeMeshError("gauge times must be strictly increasing");
    }
    if (times_.front() != 0.0) throw TimeMeshError("gauge mesh must start at t = 0 (zeta(0) = 0)");
    zeta_.assign(f_.size(), 0.0);
    for (std::size_t i = 1; i < f_.size(); ++i) {
        zeta_[i] = zeta_[i - 1] - 0.5 * (times_[i] - times_[i - 1]) * (f_[i] + f_[i - 1]) / hbar;
    }
}

GaugeShift GaugeShift::constant(double value, std::vector<double> times, double hbar)
{
    std::vector<double> f(times.size(), value);
    return GaugeShift(std::move(times), std::move(f), hbar);
}

bool GaugeShift::is_constant() const
{
    return std::all_of(f_.begin(), f_.end(), [&](double v) { return v == f_[0]; });
}

std::size_t GaugeShift::index_of(double t) const
{
    const double span = times_.back() - times_.front();
    const double slack = 1e-9 * std::max(1.0, span);
    auto it = std::lower_bound(times_.begin(), times_.end(), t - slack);
    if (it == times_.end() || std::abs(*it - t) > slack) {
        throw TimeMeshError("time " + std::to_string(t) + " is not on the gauge mesh");
    }
    return static_cast<std::size_t>(it - times_.begin());
}

GaugeShift quantum_potential_gauge(const SemiclassicalScenario& s, std::vector<double> times, double sign)
{
    std::vector<double> f(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) f[i] = sign * s.lambda.quantum_potential_at(times[i], s.constants);
    return GaugeShift(std::move(times), std::move(f), s.constants.hbar);
}

ComplexField gauge_shift(const ComplexField& psi, double t, const GaugeShift& shift)
{
    const complex phase = std::polar(1.0, shift.zeta_at(t));
    std::vector<complex> v(psi.values().begin(), psi.values().end());
    for (complex& z : v) z *= phase;
    return ComplexField(psi.grid(), std::move(v));
}

SemiclassicalScenario gauge_shift(const SemiclassicalScenario& s, const GaugeShift& shift)
{
    const double hbar = s.constants.hbar;
    if (s.stationary() && shift.is_constant()) {
        const double f0 = shift.f()[0];
        SemiclassicalScenario out = s;
        out.energy = s.energy + f0;
        out.potential = {s.potential[0] + f0};
        out.gauge_zeta = {shift.zeta().back()};
        return out;
    }

    std::vector<double> times;
    std::vector<ScalarField> R, num, phi, V;
    std::vector<NodeMask> masks;
    std::vector<double> lambdas;
    std::vector<double> zetas;
    if (s.stationary()) {
        times.assign(shift.times().begin(), shift.times().end());
        for (double t : times) {
            const double zeta = shift.zeta_at(t);
            ScalarField p = s.phase_at(0, t) + hbar * zeta;
            std::vector<double> pn(s.grid.size());
            for (std::size_t i = 0; i < pn.size(); ++i) pn[i] = s.amplitude[0][i] * p[i];
            R.push_back(s.amplitude[0]);
            num.emplace_back(s.grid, std::move(pn));
            phi.push_back(std::move(p));
            V.push_back(s.potential[0] + shift.f_at(t));
            masks.push_back(s.mask[0]);
            lambdas.push_back(s.lambda.values()[0]);
            zetas.push_back(zeta);
        }
    } else {
        if (shift.times().size() != s.times.size()) {
            throw TimeMeshError("gauge mesh does not match the scenario time mesh");
        }
        times = s.times;
        for (std::size_t k = 0; k < s.slices(); ++k) {
            const std::size_t j = shift.index_of(s.times[k]);
            const double zeta = shift.zeta()[j];
            ScalarField p = s.phase[k] + hbar * zeta;
            std::vector<double> pn(s.grid.size());
            for (std::size_t i = 0; i < pn.size(); ++i) pn[i] = s.amplitude[k][i] * p[i];
            R.push_back(s.amplitude[k]);
            num.emplace_back(s.grid, std::move(pn));
            phi.push_back(std::move(p));
            V.push_back(s.potential[k] + shift.f()[j]);
            masks.push_back(s.mask[k]);
            lambdas.push_back(s.lambda.values()[k]);
            const double prior = s.gauge_zeta.empty() ? 0.0 : s.gauge_zeta[k];
            zetas.push_back(prior + zeta);
        }
    }

    return SemiclassicalScenario{
        .constants = s.constants,
        .grid = s.grid,
        .kind = ScenarioCase::time_dependent,
        .times = times,
        .amplitude = std::move(R),
        .phase_numerator = std::move(num),
        .phase = std::move(phi),
        .potential = std::move(V),
        .mask = std::move(masks),
        .energy = 0.0,
        .lambda = LambdaSchedule(times, std::move(lambdas)),
        .eps_node = s.eps_node,
        .tolerances = s.tolerances,
        .gauge_zeta = std::move(zetas),
        .id = s.id,
        .config_hash = s.config_hash,
    };
}

SemiclassicalScenario coarsen(const SemiclassicalScenario& s)
{
    std::vector<std::size_t> keep;
    const bool coarsen_time = !s.stationary() && s.slices() >= 5;
    for (std::size_t k = 0; k < s.slices(); k += coarsen_time ? 2 : 1) keep.push_back(k);

    auto pick = [&](const std::vector<ScalarField>& v) {
        std::vector<ScalarField> out;
        for (std::size_t k : keep) out.push_back(v[k].coarsened());
        return out;
    };
    std::vector<double> times, lambdas, zetas;
    std::vector<NodeMask> masks;
    std::vector<ScalarField> R = pick(s.amplitude);
    for (std::size_t j = 0; j < keep.size(); ++j) {
        times.push_back(s.times[keep[j]]);
        lambdas.push_back(s.lambda.values()[keep[j]]);
        if (!s.gauge_zeta.empty()) zetas.push_back(s.gauge_zeta[keep[j]]);
        masks.push_back(NodeMask::below(R[j], s.eps_node));
    }
    Grid coarse = s.grid.coarsened();
    return SemiclassicalScenario{
        .constants = s.constants,
        .grid = coarse,
        .kind = s.kind,
        .times = times,
        .amplitude = std::move(R),
        .phase_numerator = pick(s.phase_numerator),
        .phase = pick(s.phase),
        .potential = pick(s.potential),
        .mask = std::move(masks),
        .energy = s.energy,
        .lambda = LambdaSchedule(std::move(times), std::move(lambdas)),
        .eps_node = s.eps_node,
        .tolerances = s.tolerances,
        .gauge_zeta = std::move(zetas),
        .id = s.id,
        .config_hash = s.config_hash,
    };
}

}  // namespace semiclassical
