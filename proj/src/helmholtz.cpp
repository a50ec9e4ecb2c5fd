#include "semiclassical/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "semiclassical/error.hpp"
#include "semiclassical/field_io.hpp"
#include "semiclassical/operators.hpp"

namespace semiclassical {

std::string_view to_string(ModeKind k)
{
    switch (k) {
    case ModeKind::plane_wave_superposition: return "plane_wave_superposition";
    case ModeKind::separable_trig: return "separable_trig";
    case ModeKind::radial_sinc: return "radial_sinc";
    case ModeKind::harmonic: return "harmonic";
    }
    return "plane_wave_superposition";
}

ModeKind mode_kind_from_string(std::string_view s)
{
    for (ModeKind k : {ModeKind::plane_wave_superposition, ModeKind::separable_trig, ModeKind::radial_sinc,
                       ModeKind::harmonic}) {
        if (to_string(k) == s) return k;
    }
    throw Error("unknown mode kind '" + std::string(s) + "'");
}

int HelmholtzMode::implied_dim() const
{
    if (!wavevectors.empty()) return static_cast<int>(wavevectors.front().size());
    if (!slope.empty()) return static_cast<int>(slope.size());
    if (!center.empty()) return static_cast<int>(center.size());
    return 0;
}

void HelmholtzMode::validate() const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("mode lambda must be finite and >= 0");
    const int dim = implied_dim();
    if (dim < 0 || dim > 3) throw Error("mode dimension must be at most 3");
    auto check_dim = [&](const std::vector<double>& v, const char* what) {
        if (!v.empty() && static_cast<int>(v.size()) != dim) {
            throw Error(std::string("mode ") + what + " has dimension " + std::to_string(v.size()) + ", expected " +
                        std::to_string(dim));
        }
    };
    check_dim(center, "center");
    check_dim(slope, "slope");
    const bool any_amplitude = std::any_of(amplitudes.begin(), amplitudes.end(), [](double a) { return a != 0.0; });

    switch (kind) {
    case ModeKind::plane_wave_superposition:
    case ModeKind::separable_trig: {
        if (wavevectors.empty()) throw Error("trigonometric mode needs at least one wavevector");
        if (amplitudes.size() != wavevectors.size()) throw Error("mode needs one amplitude per wavevector");
        if (!phases.empty() && phases.size() != wavevectors.size()) {
            throw Error("mode needs one phase per wavevector (or none)");
        }
        for (const auto& k : wavevectors) {
            check_dim(k, "wavevector");
            double norm2 = 0.0;
            for (double c : k) norm2 += c * c;
            const double mismatch = std::abs(std::sqrt(norm2) - lambda);
            if (mismatch > 1e-12 * std::max(1.0, lambda)) {
                throw Error("wavevector norm " + std::to_string(std::sqrt(norm2)) + " differs from lambda " +
                            std::to_string(lambda));
            }
        }
        if (!any_amplitude) throw Error("mode has no nonzero amplitude");
        break;
    }
    case ModeKind::radial_sinc:
        if (!(lambda > 0.0)) throw Error("radial_sinc mode needs lambda > 0");
        if (amplitudes.size() != 1) throw Error("radial_sinc mode takes exactly one amplitude");
        if (!any_amplitude) throw Error("mode has no nonzero amplitude");
        break;
    case ModeKind::harmonic: {
        if (lambda != 0.0) throw Error("harmonic mode requires lambda = 0");
        if (amplitudes.size() != 1) throw Error("harmonic mode takes exactly one amplitude (the constant term)");
        const bool any_slope = std::any_of(slope.begin(), slope.end(), [](double s) { return s != 0.0; });
        if (!any_amplitude && !any_slope) throw Error("harmonic mode is identically zero");
        break;
    }
    }
}

HelmholtzMode HelmholtzMode::plane_wave(std::vector<double> k, double amplitude, double phase)
{
    HelmholtzMode m;
    m.kind = ModeKind::plane_wave_superposition;
    double norm2 = 0.0;
    for (double c : k) norm2 += c * c;
    m.lambda = std::sqrt(norm2);
    m.wavevectors = {std::move(k)};
    m.amplitudes = {amplitude};
    m.phases = {phase};
    return m;
}

HelmholtzMode HelmholtzMode::affine(double constant, std::vector<double> slope)
{
    HelmholtzMode m;
    m.kind = ModeKind::harmonic;
    m.lambda = 0.0;
    m.amplitudes = {constant};
    m.slope = std::move(slope);
    return m;
}

double sinc(double z)
{
    const double az = std::abs(z);
    if (az < 1e-3) {
        const double z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0;
    }
    return std::sin(z) / z;
}

double mode_value(const HelmholtzMode& mode, const Point3& x, int dim)
{
    Point3 rel{0, 0, 0};
    for (int a = 0; a < dim; ++a) rel[a] = x[a] - (mode.center.empty() ? 0.0 : mode.center[a]);
    switch (mode.kind) {
    case ModeKind::plane_wave_superposition: {
        double s = 0.0;
        for (std::size_t j = 0; j < mode.wavevectors.size(); ++j) {
            double arg = mode.phases.empty() ? 0.0 : mode.phases[j];
            for (int a = 0; a < dim; ++a) arg += mode.wavevectors[j][a] * rel[a];
            s += mode.amplitudes[j] * std::cos(arg);
        }
        return s;
    }
    case ModeKind::separable_trig: {
        double s = 0.0;
        for (std::size_t j = 0; j < mode.wavevectors.size(); ++j) {
            const double theta = mode.phases.empty() ? 0.0 : mode.phases[j];
            double p = mode.amplitudes[j];
            for (int a = 0; a < dim; ++a) p *= std::cos(mode.wavevectors[j][a] * rel[a] + theta);
            s += p;
        }
        return s;
    }
    case ModeKind::radial_sinc: {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += rel[a] * rel[a];
        const double z = mode.lambda * std::sqrt(r2);
        const double a0 = mode.amplitudes[0];
        if (dim == 1) return a0 * std::cos(z);
        if (dim == 2) return a0 * std::cyl_bessel_j(0.0, z);
        return a0 * sinc(z);
    }
    case ModeKind::harmonic: {
        double s = mode.amplitudes[0];
        if (!mode.slope.empty()) {
            for (int a = 0; a < dim; ++a) s += mode.slope[a] * rel[a];
        }
        return s;
    }
    }
    return 0.0;
}

ScalarField evaluate_mode(const HelmholtzMode& mode, const Grid& grid)
{
    mode.validate();
    const int md = mode.implied_dim();
    if (md != 0 && md != grid.dim()) {
        throw GridError("mode dimension " + std::to_string(md) + " does not match grid dimension " +
                        std::to_string(grid.dim()));
    }
    return ScalarField::sample(grid, [&](const Point3& x) { return mode_value(mode, x, grid.dim()); });
}

double helmholtz_residual(const ScalarField& f, double lambda)
{
    const Grid& g = f.grid();
    std::vector<double> lap(f.size());
    laplacian_into(g, f.values(), lap);
    const double l2 = lambda * lambda;
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!g.interior(i)) continue;
        worst = std::max(worst, std::abs(lap[i] + l2 * f[i]));
    }
    return worst;
}

ReportEntry verify_helmholtz(const ScalarField& f, double lambda, double tol)
{
    ReportEntry e = ReportEntry::compare("helmholtz_residual", helmholtz_residual(f, lambda), tol);
    e.metadata["lambda"] = lambda;
    e.metadata["grid"] = io::grid_to_json(f.grid());
    return e;
}

double dirichlet_spectral_gap(const Grid& grid, double lambda)
{
    if (grid.periodic()) throw GridError("spectral gap is defined for dirichlet_zero grids");
    // 1D interior operator on n-2 nodes: mu_k = (4/h^2) sin^2(k pi / (2 (n-1))).
    std::vector<std::vector<double>> axis_mu(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
        const std::size_t n = grid.extent(a);
        const double h = grid.spacing(a);
        for (std::size_t k = 1; k + 1 < n; ++k) {
            const double s = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * static_cast<double>(n - 1)));
            axis_mu[a].push_back(4.0 / (h * h) * s * s);
        }
    }
    const double target = lambda * lambda;
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](double mu) { best = std::min(best, std::abs(target - mu) / std::max(mu, target)); };
    const auto& m0 = axis_mu[0];
    if (grid.dim() == 1) {
        for (double a : m0) consider(a);
    } else if (grid.dim() == 2) {
        for (double a : m0)
            for (double b : axis_mu[1]) consider(a + b);
    } else {
        for (double a : m0)
            for (double b : axis_mu[1])
                for (double c : axis_mu[2]) consider(a + b + c);
    }
    return best;
}

HelmholtzSolution solve_inhomogeneous(const Grid& grid, double lambda, const ScalarField& rhs)
{
    if (grid.periodic()) throw GridError("solve_inhomogeneous requires a dirichlet_zero grid");
    require_same_grid(grid, rhs.grid(), "solve_inhomogeneous");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("lambda must be finite and >= 0");

    const double gap = dirichlet_spectral_gap(grid, lambda);
    if (gap <= kResonanceTolerance) {
        throw ResonanceError("lambda = " + std::to_string(lambda) +
                                 " is resonant with the discrete Dirichlet spectrum of the grid (relative gap " +
                                 std::to_string(gap) + ")",
                             lambda);
    }

    // Interior unknown numbering.
    std::vector<std::ptrdiff_t> unknown(grid.size(), -1);
    std::vector<std::size_t> node_of;
    node_of.reserve(grid.interior_count());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.interior(i)) {
            unknown[i] = static_cast<std::ptrdiff_t>(node_of.size());
            node_of.push_back(i);
        }
    }
    const auto n = static_cast<Eigen::Index>(node_of.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(node_of.size() * (2 * grid.dim() + 1));
    Eigen::VectorXd b(n);
    const double l2 = lambda * lambda;
    for (Eigen::Index row = 0; row < n; ++row) {
        const std::size_t node = node_of[row];
        for (const auto& [nb, w] : central_laplacian_stencil(grid, node)) {
            const double weight = w + (nb == node ? l2 : 0.0);
            if (unknown[nb] >= 0) trip.emplace_back(row, unknown[nb], weight);
        }
        b[row] = rhs[node];
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
        throw ResonanceError("sparse factorization failed for lambda = " + std::to_string(lambda) + " (singular system)",
                             lambda);
    }
    const Eigen::VectorXd x = lu.solve(b);

    std::vector<double> u(grid.size(), 0.0);
    for (Eigen::Index row = 0; row < n; ++row) {
        if (!std::isfinite(x[row])) {
            throw ResonanceError("non-finite solution for lambda = " + std::to_string(lambda), lambda);
        }
        u[node_of[row]] = x[row];
    }
    ScalarField solution(grid, std::move(u));

    // Residual through the field operator, independent of the assembled matrix.
    std::vector<double> lap(grid.size());
    laplacian_into(grid, solution.values(), lap);
    double worst = 0.0, scale = 0.0;
    for (std::size_t node : node_of) {
        worst = std::max(worst, std::abs(lap[node] + l2 * solution[node] - rhs[node]));
        scale = std::max(scale, std::abs(rhs[node]));
    }
    const double rel = scale > 0.0 ? worst / scale : worst;
    if (rel > kResonanceTolerance) {
        throw ResonanceError("post-solve residual " + std::to_string(rel) + " exceeds " +
                                 std::to_string(kResonanceTolerance) + " for lambda = " + std::to_string(lambda) +
                                 " (near-resonant system)",
                             lambda);
    }
    return {std::move(solution), rel};
}

std::vector<ScalarField> time_derivative(std::span<const ScalarField> fields, double dt)
{
    if (fields.size() < 3) throw Error("time_derivative needs at least 3 samples, got " + std::to_string(fields.size()));
    if (!(dt > 0.0)) throw Error("time step must be positive");
    const Grid& g = fields.front().grid();
    for (const auto& f : fields) require_same_grid(g, f.grid(), "time_derivative");
    const std::size_t nt = fields.size();
    const double inv2 = 1.0 / (2.0 * dt);
    std::vector<ScalarField> out;
    out.reserve(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        std::vector<double> d(g.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (k == 0) {
                d[i] = (-3.0 * fields[0][i] + 4.0 * fields[1][i] - fields[2][i]) * inv2;
            } else if (k + 1 == nt) {
                d[i] = (3.0 * fields[nt - 1][i] - 4.0 * fields[nt - 2][i] + fields[nt - 3][i]) * inv2;
            } else {
                d[i] = (fields[k + 1][i] - fields[k - 1][i]) * inv2;
            }
        }
        out.emplace_back(g, std::move(d));
    }
    return out;
}

LambdaSchedule::LambdaSchedule(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values))
{
    if (times_.empty() || times_.size() != values_.size()) {
        throw Error("lambda schedule needs matching, non-empty time and value arrays");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) throw Error("lambda(t) must be finite and >= 0");
        if (!std::isfinite(times_[i])) throw Error("lambda schedule times must be finite");
        if (i > 0 && !(times_[i] > times_[i - 1])) throw Error("lambda schedule times must be strictly increasing");
    }
    if (!uniform()) throw Error("lambda schedule must use a uniform time mesh");
}

LambdaSchedule LambdaSchedule::constant(double lambda, std::vector<double> times)
{
    std::vector<double> v(times.size(), lambda);
    return LambdaSchedule(std::move(times), std::move(v));
}

LambdaSchedule LambdaSchedule::from_quantum_potential(std::vector<double> times, std::span<const double> K,
                                                      const PhysicalConstants& c)
{
    std::vector<double> v(K.size());
    for (std::size_t i = 0; i < K.size(); ++i) {
        if (K[i] < 0.0) {
            throw Error("K(t) < 0 at sample " + std::to_string(i) + ": imaginary lambda is not supported");
        }
        v[i] = std::sqrt(2.0 * c.mass * K[i]) / c.hbar;
    }
    return LambdaSchedule(std::move(times), std::move(v));
}

double LambdaSchedule::at(double t) const
{
    if (times_.size() == 1) return values_[0];
    const double span = times_.back() - times_.front();
    const double slack = 1e-9 * std::max(1.0, span);
    if (t < times_.front() - slack || t > times_.back() + slack) {
        throw TimeMeshError("time " + std::to_string(t) + " outside the lambda schedule");
    }
    t = std::clamp(t, times_.front(), times_.back());
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t k = it == times_.end() ? times_.size() - 1 : static_cast<std::size_t>(it - times_.begin());
    k = std::max<std::size_t>(k, 1);
    const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
    return (1.0 - w) * values_[k - 1] + w * values_[k];
}

double LambdaSchedule::quantum_potential_at(double t, const PhysicalConstants& c) const
{
    return quantum_potential_constant(at(t), c);
}

double LambdaSchedule::dt() const { return times_.size() < 2 ? 0.0 : times_[1] - times_[0]; }

bool LambdaSchedule::uniform() const
{
    if (times_.size() < 3) return true;
    const double d = dt();
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (std::abs((times_[i] - times_[i - 1]) - d) > 1e-9 * d) return false;
    }
    return true;
}

bool LambdaSchedule::is_constant() const
{
    return std::all_of(values_.begin(), values_.end(), [&](double v) { return v == values_[0]; });
}

double quantum_potential_constant(double lambda, const PhysicalConstants& c)
{
    const double p = c.hbar * lambda;
    return p * p / (2.0 * c.mass);
}

}  // namespace semiclassical
