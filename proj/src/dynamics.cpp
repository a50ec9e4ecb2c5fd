#include "semiclassical/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "semiclassical/error.hpp"

namespace semiclassical {

// ---------------------------------------------------------------------------
// Potential schedules and boundary drives

PotentialSchedule::PotentialSchedule(ScalarField v) : times_{0.0}, slices_{std::move(v)} {}

PotentialSchedule::PotentialSchedule(std::vector<double> times, std::vector<ScalarField> slices)
    : times_(std::move(times)), slices_(std::move(slices))
{
    if (slices_.empty() || times_.size() != slices_.size()) {
        throw TimeMeshError("potential schedule needs one time per slice");
    }
    for (std::size_t k = 1; k < times_.size(); ++k) {
        if (!(times_[k] > times_[k - 1])) throw TimeMeshError("potential schedule times must increase");
        require_same_grid(slices_[0].grid(), slices_[k].grid(), "potential schedule");
    }
}

PotentialSchedule::Bracket PotentialSchedule::bracket(double t) const
{
    if (is_static()) return {0, 0, 0.0};
    const double span = times_.back() - times_.front();
    const double slack = 1e-9 * std::max(1.0, span);
    if (t < times_.front() - slack || t > times_.back() + slack) {
        throw TimeMeshError("time " + std::to_string(t) + " outside the potential schedule [" +
                            std::to_string(times_.front()) + ", " + std::to_string(times_.back()) + "]");
    }
    t = std::clamp(t, times_.front(), times_.back());
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t hi = it == times_.end() ? times_.size() - 1 : static_cast<std::size_t>(it - times_.begin());
    hi = std::max<std::size_t>(hi, 1);
    const double w = (t - times_[hi - 1]) / (times_[hi] - times_[hi - 1]);
    return {hi - 1, hi, w};
}

ScalarField PotentialSchedule::at(double t) const
{
    const Bracket b = bracket(t);
    if (b.w == 0.0) return slices_[b.lo];
    if (b.w == 1.0) return slices_[b.hi];
    return (1.0 - b.w) * slices_[b.lo] + b.w * slices_[b.hi];
}

PotentialSchedule potential_schedule(const SemiclassicalScenario& s)
{
    if (s.stationary()) return PotentialSchedule(fill_masked(s.potential[0], s.mask[0]));
    std::vector<ScalarField> v;
    v.reserve(s.slices());
    for (std::size_t k = 0; k < s.slices(); ++k) v.push_back(fill_masked(s.potential[k], s.mask[k]));
    return PotentialSchedule(s.times, std::move(v));
}

BoundaryDrive stationary_drive(const ComplexField& psi0, double E, double hbar)
{
    auto values = std::make_shared<std::vector<complex>>(psi0.values().begin(), psi0.values().end());
    return [values, E, hbar](std::size_t node, double t) { return (*values)[node] * std::polar(1.0, -E * t / hbar); };
}

BoundaryDrive scenario_drive(const SemiclassicalScenario& s)
{
    const double hbar = s.constants.hbar;
    if (s.stationary()) {
        return stationary_drive(s.wavefunction(0, 0.0), s.energy, hbar);
    }
    auto R = std::make_shared<std::vector<ScalarField>>(s.amplitude);
    auto phi = std::make_shared<std::vector<ScalarField>>(s.phase);
    auto sched = std::make_shared<PotentialSchedule>(s.times, s.amplitude);
    return [R, phi, sched, hbar](std::size_t node, double t) {
        const auto b = sched->bracket(t);
        const double r = (1.0 - b.w) * (*R)[b.lo][node] + b.w * (*R)[b.hi][node];
        const double p = (1.0 - b.w) * (*phi)[b.lo][node] + b.w * (*phi)[b.hi][node];
        return std::polar(r, p / hbar);
    };
}

// ---------------------------------------------------------------------------
// Crank-Nicolson

double EvolutionResult::norm_drift_rate() const
{
    if (norm_history.empty()) return 0.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < norm_history.size(); ++k) {
        const double t = static_cast<double>(k) * dt;
        worst = std::max(worst, std::abs(norm_history[k] - norm_history[0]) / std::max(1.0, t));
    }
    return worst;
}

namespace {

std::size_t step_count(double T, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("time step must be positive and finite");
    if (!(T > 0.0) || !std::isfinite(T)) throw Error("horizon must be positive and finite");
    const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    return std::max<std::size_t>(n, 1);
}

}  // namespace

EvolutionResult evolve_schrodinger(const ComplexField& psi0, const PotentialSchedule& V, const PhysicalConstants& c,
                                   const EvolutionOptions& options)
{
    using Mat = Eigen::SparseMatrix<complex>;
    using Vec = Eigen::VectorXcd;

    const Grid& g = psi0.grid();
    require_same_grid(g, V.grid(), "evolve_schrodinger");
    const std::size_t steps = step_count(options.T, options.dt);
    const double dt = options.T / static_cast<double>(steps);
    const std::size_t stride = std::max<std::size_t>(options.snapshot_stride, 1);
    if (steps % stride != 0) {
        throw Error("snapshot stride " + std::to_string(stride) + " does not divide the " + std::to_string(steps) +
                    " time steps");
    }
    const bool driven = static_cast<bool>(options.drive) && !g.periodic();

    // Unknowns: every node (periodic) or interior nodes (dirichlet).
    std::vector<std::ptrdiff_t> unknown(g.size(), -1);
    std::vector<std::size_t> node_of;
    std::vector<std::size_t> boundary_nodes;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.interior(i)) {
            unknown[i] = static_cast<std::ptrdiff_t>(node_of.size());
            node_of.push_back(i);
        } else {
            boundary_nodes.push_back(i);
        }
    }
    const auto n = static_cast<Eigen::Index>(node_of.size());
    const double kinetic = -c.hbar * c.hbar / (2.0 * c.mass);
    const complex a(0.0, dt / (2.0 * c.hbar));

    std::vector<Eigen::Triplet<complex>> lap_trip;
    // Per unknown row: (boundary node, kinetic * weight).
    std::vector<std::vector<std::pair<std::size_t, double>>> coupling(node_of.size());
    for (Eigen::Index row = 0; row < n; ++row) {
        for (const auto& [nb, w] : central_laplacian_stencil(g, node_of[row])) {
            if (unknown[nb] >= 0) {
                lap_trip.emplace_back(row, unknown[nb], kinetic * w);
            } else {
                coupling[row].emplace_back(nb, kinetic * w);
            }
        }
    }
    Mat kin(n, n);
    kin.setFromTriplets(lap_trip.begin(), lap_trip.end());
    kin.makeCompressed();
    Mat identity(n, n);
    identity.setIdentity();

    auto potential_diag = [&](const ScalarField& v) {
        Vec d(n);
        for (Eigen::Index r = 0; r < n; ++r) d[r] = v[node_of[r]];
        return d;
    };

    Eigen::SparseLU<Mat, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    Vec vdiag;
    auto factorize = [&](const ScalarField& v) {
        vdiag = potential_diag(v);
        Mat H = kin;
        for (Eigen::Index r = 0; r < n; ++r) H.coeffRef(r, r) += vdiag[r];
        Mat A = identity + a * H;
        A.makeCompressed();
        if (!analyzed) {
            lu.analyzePattern(A);
            analyzed = true;
        }
        lu.factorize(A);
        if (lu.info() != Eigen::Success) throw Error("Crank-Nicolson factorization failed");
    };

    std::vector<complex> full(psi0.values().begin(), psi0.values().end());
    for (std::size_t b : boundary_nodes) full[b] = driven ? options.drive(b, 0.0) : complex{};
    Vec psi(n);
    for (Eigen::Index r = 0; r < n; ++r) psi[r] = full[node_of[r]];

    EvolutionResult result;
    result.dt = dt;
    result.driven = driven;
    result.times.push_back(0.0);
    result.psi_history.emplace_back(g, full);
    const double norm0 = discrete_norm(g, full);
    result.norm_history.push_back(norm0);

    if (V.is_static()) factorize(V.slices()[0]);

    std::vector<complex> boundary_old(g.size()), boundary_new(g.size());
    for (std::size_t b : boundary_nodes) boundary_old[b] = full[b];

    for (std::size_t step = 1; step <= steps; ++step) {
        const double t_old = static_cast<double>(step - 1) * dt;
        const double t_new = static_cast<double>(step) * dt;
        if (!V.is_static()) factorize(V.at(t_old + 0.5 * dt));

        Vec rhs = psi - a * (kin * psi + vdiag.cwiseProduct(psi));
        if (driven) {
            for (std::size_t b : boundary_nodes) boundary_new[b] = options.drive(b, t_new);
            for (Eigen::Index r = 0; r < n; ++r) {
                complex acc{};
                for (const auto& [b, w] : coupling[r]) acc += w * (boundary_old[b] + boundary_new[b]);
                rhs[r] -= a * acc;
            }
        }
        psi = lu.solve(rhs);

        for (Eigen::Index r = 0; r < n; ++r) full[node_of[r]] = psi[r];
        if (driven) {
            for (std::size_t b : boundary_nodes) {
                full[b] = boundary_new[b];
                boundary_old[b] = boundary_new[b];
            }
        }
        const double norm = discrete_norm(g, full);
        result.norm_history.push_back(norm);
        if (!driven) {
            const double drift = std::abs(norm - norm0);
            if (!(drift <= options.unitarity_tolerance * std::max(1.0, t_new))) {
                throw UnitarityError("norm drift " + std::to_string(drift) + " at step " + std::to_string(step) +
                                         " exceeds the unitarity bound",
                                     step);
            }
        }
        if (step % stride == 0) {
            result.times.push_back(t_new);
            result.psi_history.emplace_back(g, full);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Polar decomposition and guidance velocity

namespace {

double resolve_eps(double eps, const ComplexField& psi)
{
    return eps > 0.0 ? eps : default_eps_node(psi);
}

template <class Visit>
void for_each_neighbour(const Grid& g, std::size_t node, Visit&& visit)
{
    const Index3 idx = g.unflatten(node);
    for (int a = 0; a < g.dim(); ++a) {
        const std::size_t n = g.extent(a);
        if (idx[a] > 0 || g.periodic()) {
            Index3 nb = idx;
            nb[a] = idx[a] == 0 ? n - 1 : idx[a] - 1;
            visit(g.flatten(nb));
        }
        if (idx[a] + 1 < n || g.periodic()) {
            Index3 nb = idx;
            nb[a] = idx[a] + 1 == n ? 0 : idx[a] + 1;
            visit(g.flatten(nb));
        }
    }
}

double wrap_angle(double d)
{
    d = std::remainder(d, 2.0 * std::numbers::pi);
    return d;
}

}  // namespace

PolarDecomposition polar_decompose(const ComplexField& psi, const PhysicalConstants& c, double eps_node)
{
    const Grid& g = psi.grid();
    const double eps = resolve_eps(eps_node, psi);
    NodeMask mask = NodeMask::below(psi, eps);
    std::vector<double> R(g.size()), phi(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) R[i] = std::abs(psi[i]);

    // Seeds in order of decreasing |psi| so each component starts at its maximum.
    std::vector<std::size_t> order(g.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return R[x] > R[y]; });

    std::vector<std::uint8_t> seen(g.size(), 0);
    std::size_t components = 0;
    std::deque<std::size_t> queue;
    for (std::size_t seed : order) {
        if (mask[seed] || seen[seed]) continue;
        ++components;
        seen[seed] = 1;
        phi[seed] = c.hbar * std::arg(psi[seed]);
        queue.push_back(seed);
        while (!queue.empty()) {
            const std::size_t node = queue.front();
            queue.pop_front();
            const double base_arg = std::arg(psi[node]);
            for_each_neighbour(g, node, [&](std::size_t nb) {
                if (mask[nb] || seen[nb]) return;
                seen[nb] = 1;
                phi[nb] = phi[node] + c.hbar * wrap_angle(std::arg(psi[nb]) - base_arg);
                queue.push_back(nb);
            });
        }
    }
    return {ScalarField(g, std::move(R)), ScalarField(g, std::move(phi)), std::move(mask), components,
            components > 1};
}

VelocityField bohmian_velocity(const ComplexField& psi, const PhysicalConstants& c, double eps_node)
{
    const Grid& g = psi.grid();
    const double eps = resolve_eps(eps_node, psi);
    NodeMask mask = NodeMask::below(psi, eps);
    const auto grad = gradient(psi);
    const double pref = c.hbar / c.mass;
    VectorField v;
    v.reserve(g.dim());
    for (int a = 0; a < g.dim(); ++a) {
        std::vector<double> comp(g.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (mask[i]) continue;
            comp[i] = pref * std::imag(std::conj(psi[i]) * grad[a][i]) / std::norm(psi[i]);
        }
        v.emplace_back(g, std::move(comp));
    }
    return {std::move(v), std::move(mask)};
}

// ---------------------------------------------------------------------------
// Interpolation

std::optional<CellWeights> locate(const Grid& g, const Point3& x)
{
    std::array<std::size_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
    std::array<double, 3> w{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) {
        const std::size_t n = g.extent(a);
        double u = (x[a] - g.origin(a)) / g.spacing(a);
        if (!std::isfinite(u)) return std::nullopt;
        if (g.periodic()) {
            const double nn = static_cast<double>(n);
            u = std::fmod(u, nn);
            if (u < 0.0) u += nn;
            auto i0 = static_cast<std::size_t>(std::floor(u));
            if (i0 >= n) i0 = 0;
            lo[a] = i0;
            hi[a] = (i0 + 1) % n;
            w[a] = u - static_cast<double>(i0);
        } else {
            const double top = static_cast<double>(n - 1);
            if (u < -1e-12 || u > top + 1e-12) return std::nullopt;
            u = std::clamp(u, 0.0, top);
            auto i0 = std::min(static_cast<std::size_t>(std::floor(u)), n - 2);
            lo[a] = i0;
            hi[a] = i0 + 1;
            w[a] = u - static_cast<double>(i0);
        }
    }
    CellWeights cell;
    cell.count = 1 << g.dim();
    for (int corner = 0; corner < cell.count; ++corner) {
        Index3 idx{0, 0, 0};
        double weight = 1.0;
        for (int a = 0; a < g.dim(); ++a) {
            const bool upper = (corner >> a) & 1;
            idx[a] = upper ? hi[a] : lo[a];
            weight *= upper ? w[a] : 1.0 - w[a];
        }
        cell.nodes[corner] = g.flatten(idx);
        cell.weights[corner] = weight;
    }
    return cell;
}

double interpolate(std::span<const double> values, const CellWeights& cell)
{
    double s = 0.0;
    for (int k = 0; k < cell.count; ++k) s += cell.weights[k] * values[cell.nodes[k]];
    return s;
}

std::string_view to_string(PathStatus s)
{
    switch (s) {
    case PathStatus::ok: return "ok";
    case PathStatus::escaped: return "escaped";
    case PathStatus::masked: return "masked";
    }
    return "ok";
}

namespace {

bool touches_mask(const CellWeights& cell, const NodeMask& mask)
{
    for (int k = 0; k < cell.count; ++k) {
        if (cell.weights[k] > 0.0 && mask[cell.nodes[k]]) return true;
    }
    return false;
}

struct Sample {
    Point3 value{0, 0, 0};
    PathStatus status = PathStatus::ok;
};

Point3 axpy(const Point3& x, double s, const Point3& y)
{
    return {x[0] + s * y[0], x[1] + s * y[1], x[2] + s * y[2]};
}

/// Interpolated vector field blended between two time slices.
Sample sample_blend(const Grid& g, const VectorField& lo, const NodeMask& mlo, const VectorField& hi,
                    const NodeMask& mhi, double w, const Point3& x)
{
    Sample s;
    const auto cell = locate(g, x);
    if (!cell) {
        s.status = PathStatus::escaped;
        return s;
    }
    if ((w < 1.0 && touches_mask(*cell, mlo)) || (w > 0.0 && touches_mask(*cell, mhi))) {
        s.status = PathStatus::masked;
        return s;
    }
    for (int a = 0; a < g.dim(); ++a) {
        const double vlo = w < 1.0 ? interpolate(lo[a].values(), *cell) : 0.0;
        const double vhi = w > 0.0 ? interpolate(hi[a].values(), *cell) : 0.0;
        s.value[a] = (1.0 - w) * vlo + w * vhi;
    }
    return s;
}

std::vector<double> uniform_times(std::size_t steps, double dt)
{
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) t[k] = static_cast<double>(k) * dt;
    return t;
}

}  // namespace

std::vector<InitialCondition> guidance_matched_conditions(const ComplexField& psi0, std::span<const Point3> x0,
                                                          const PhysicalConstants& c, double eps_node)
{
    const auto vel = bohmian_velocity(psi0, c, eps_node);
    std::vector<InitialCondition> out;
    out.reserve(x0.size());
    for (std::size_t p = 0; p < x0.size(); ++p) {
        const Sample s = sample_blend(psi0.grid(), vel.v, vel.mask, vel.v, vel.mask, 0.0, x0[p]);
        if (s.status != PathStatus::ok) {
            throw Error("initial position of particle " + std::to_string(p) + " is " +
                        std::string(to_string(s.status)));
        }
        out.push_back({x0[p], s.value});
    }
    return out;
}

TrajectorySet integrate_bohmian(const EvolutionResult& evolution, std::span<const Point3> x0,
                                const PhysicalConstants& c, double eps_node)
{
    if (evolution.psi_history.size() < 2) throw Error("evolution history needs at least two snapshots");
    const Grid& g = evolution.psi_history.front().grid();
    const auto& times = evolution.times;

    TrajectorySet set;
    set.kind = TrajectoryKind::bohmian;
    set.dim = g.dim();
    set.times = times;
    set.initial = guidance_matched_conditions(evolution.psi_history.front(), x0, c, eps_node);
    set.paths.assign(x0.size(), {});
    set.status.assign(x0.size(), PathStatus::ok);
    for (std::size_t p = 0; p < x0.size(); ++p) set.paths[p].push_back(x0[p]);

    VelocityField v_lo = bohmian_velocity(evolution.psi_history[0], c, eps_node);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        VelocityField v_hi = bohmian_velocity(evolution.psi_history[k + 1], c, eps_node);
        const double h = times[k + 1] - times[k];
        for (std::size_t p = 0; p < x0.size(); ++p) {
            if (set.status[p] != PathStatus::ok) continue;
            const Point3 x = set.paths[p].back();
            auto f = [&](const Point3& at, double w) { return sample_blend(g, v_lo.v, v_lo.mask, v_hi.v, v_hi.mask, w, at); };
            const Sample k1 = f(x, 0.0);
            const Sample k2 = k1.status == PathStatus::ok ? f(axpy(x, 0.5 * h, k1.value), 0.5) : k1;
            const Sample k3 = k2.status == PathStatus::ok ? f(axpy(x, 0.5 * h, k2.value), 0.5) : k2;
            const Sample k4 = k3.status == PathStatus::ok ? f(axpy(x, h, k3.value), 1.0) : k3;
            if (k4.status != PathStatus::ok) {
                set.status[p] = k4.status;
                continue;
            }
            Point3 next = x;
            for (int a = 0; a < g.dim(); ++a) {
                next[a] += h / 6.0 * (k1.value[a] + 2.0 * k2.value[a] + 2.0 * k3.value[a] + k4.value[a]);
            }
            if (!locate(g, next)) {
                set.status[p] = PathStatus::escaped;
                continue;
            }
            set.paths[p].push_back(next);
        }
        v_lo = std::move(v_hi);
    }
    return set;
}

TrajectorySet integrate_classical(const PotentialSchedule& V, const PhysicalConstants& c,
                                  std::span<const InitialCondition> ic, double dt, double T, const NodeMask* mask)
{
    const Grid& g = V.grid();
    const std::size_t steps = step_count(T, dt);
    const double h = T / static_cast<double>(steps);

    // a = -grad V / m per potential slice
    std::vector<VectorField> accel;
    accel.reserve(V.slices().size());
    for (const auto& slice : V.slices()) {
        VectorField gv = gradient(slice);
        for (auto& comp : gv) comp = (-1.0 / c.mass) * comp;
        accel.push_back(std::move(gv));
    }
    const NodeMask no_mask = NodeMask::none(g.size());
    const NodeMask& m = mask ? *mask : no_mask;
    if (m.size() != g.size()) throw Error("classical mask does not match the potential grid");

    auto acceleration = [&](const Point3& x, double t) {
        const auto b = V.bracket(t);
        return sample_blend(g, accel[b.lo], m, accel[b.hi], m, b.w, x);
    };

    TrajectorySet set;
    set.kind = TrajectoryKind::classical;
    set.dim = g.dim();
    set.times = uniform_times(steps, h);
    set.initial.assign(ic.begin(), ic.end());
    set.paths.assign(ic.size(), {});
    set.status.assign(ic.size(), PathStatus::ok);

    for (std::size_t p = 0; p < ic.size(); ++p) {
        Point3 x = ic[p].position;
        Point3 v = ic[p].velocity;
        const Sample start = acceleration(x, 0.0);
        if (start.status != PathStatus::ok) {
            throw Error("initial position of particle " + std::to_string(p) + " is " +
                        std::string(to_string(start.status)));
        }
        auto& path = set.paths[p];
        path.reserve(steps + 1);
        path.push_back(x);
        for (std::size_t k = 0; k < steps; ++k) {
            const double t = set.times[k];
            const Sample a1 = acceleration(x, t);
            const Point3 x2 = axpy(x, 0.5 * h, v), v2 = axpy(v, 0.5 * h, a1.value);
            const Sample a2 = a1.status == PathStatus::ok ? acceleration(x2, t + 0.5 * h) : a1;
            const Point3 x3 = axpy(x, 0.5 * h, v2), v3 = axpy(v, 0.5 * h, a2.value);
            const Sample a3 = a2.status == PathStatus::ok ? acceleration(x3, t + 0.5 * h) : a2;
            const Point3 x4 = axpy(x, h, v3), v4 = axpy(v, h, a3.value);
            const Sample a4 = a3.status == PathStatus::ok ? acceleration(x4, t + h) : a3;
            if (a4.status != PathStatus::ok) {
                set.status[p] = a4.status;
                break;
            }
            for (int d = 0; d < g.dim(); ++d) {
                x[d] += h / 6.0 * (v[d] + 2.0 * v2[d] + 2.0 * v3[d] + v4[d]);
                v[d] += h / 6.0 * (a1.value[d] + 2.0 * a2.value[d] + 2.0 * a3.value[d] + a4.value[d]);
            }
            if (!locate(g, x)) {
                set.status[p] = PathStatus::escaped;
                break;
            }
            path.push_back(x);
        }
    }
    return set;
}

// ---------------------------------------------------------------------------
// Comparison

TrajectoryComparison measure_deviation(const TrajectorySet& a, const TrajectorySet& b)
{
    if (a.particles() != b.particles()) {
        throw Error("trajectory sets hold " + std::to_string(a.particles()) + " and " + std::to_string(b.particles()) +
                    " particles");
    }
    if (a.times.size() != b.times.size()) throw TimeMeshError("trajectory time meshes differ in length");
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        if (std::abs(a.times[k] - b.times[k]) > 1e-9 * std::max(1.0, std::abs(a.times[k]))) {
            throw TimeMeshError("trajectory time meshes differ at sample " + std::to_string(k));
        }
    }
    TrajectoryComparison out;
    for (std::size_t p = 0; p < a.particles(); ++p) {
        const std::size_t len = std::min(a.paths[p].size(), b.paths[p].size());
        if (a.paths[p].size() != a.times.size() || b.paths[p].size() != b.times.size()) ++out.truncated;
        double sup = 0.0, sum = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            double d2 = 0.0;
            for (int d = 0; d < a.dim; ++d) {
                const double diff = a.paths[p][k][d] - b.paths[p][k][d];
                d2 += diff * diff;
            }
            const double dist = std::sqrt(d2);
            sup = std::max(sup, dist);
            sum += dist;
        }
        out.sup_deviation.push_back(sup);
        out.mean_deviation.push_back(len ? sum / static_cast<double>(len) : 0.0);
        out.max_deviation = std::max(out.max_deviation, sup);
    }
    return out;
}

ReportEntry compare_trajectories(const TrajectorySet& a, const TrajectorySet& b, double tolerance)
{
    const TrajectoryComparison cmp = measure_deviation(a, b);
    ReportEntry e = ReportEntry::compare("trajectory_deviation", cmp.max_deviation, tolerance);
    if (cmp.truncated > 0) e.status = CheckStatus::fail;
    e.metadata["particles"] = a.particles();
    e.metadata["sup_deviation"] = cmp.sup_deviation;
    e.metadata["mean_deviation"] = cmp.mean_deviation;
    e.metadata["truncated"] = cmp.truncated;
    e.metadata["dt"] = a.times.size() > 1 ? a.times[1] - a.times[0] : 0.0;
    e.metadata["T"] = a.times.empty() ? 0.0 : a.times.back();
    return e;
}

// ---------------------------------------------------------------------------
// Gauge shift of dynamical objects

EvolutionResult gauge_shift(const EvolutionResult& evolution, const GaugeShift& shift)
{
    EvolutionResult out;
    out.times = evolution.times;
    out.norm_history = evolution.norm_history;
    out.dt = evolution.dt;
    out.scheme = evolution.scheme;
    out.driven = evolution.driven;
    out.psi_history.reserve(evolution.psi_history.size());
    for (std::size_t k = 0; k < evolution.times.size(); ++k) {
        out.psi_history.push_back(gauge_shift(evolution.psi_history[k], evolution.times[k], shift));
    }
    return out;
}

PotentialSchedule gauge_shift(const PotentialSchedule& V, const GaugeShift& shift)
{
    std::vector<double> times(shift.times().begin(), shift.times().end());
    std::vector<ScalarField> slices;
    slices.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) slices.push_back(V.at(times[k]) + shift.f()[k]);
    return PotentialSchedule(std::move(times), std::move(slices));
}

namespace io {

void write_trajectories_csv(const std::filesystem::path& path, const TrajectorySet& set)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    static const char* names[] = {"x", "y", "z"};
    out << "particle_id,t";
    for (int a = 0; a < set.dim; ++a) out << ',' << names[a];
    out << ",flag\n" << std::setprecision(17);
    for (std::size_t p = 0; p < set.particles(); ++p) {
        const auto& path_p = set.paths[p];
        for (std::size_t k = 0; k < path_p.size(); ++k) {
            out << p << ',' << set.times[k];
            for (int a = 0; a < set.dim; ++a) out << ',' << path_p[k][a];
            const bool last = k + 1 == path_p.size();
            out << ',' << (last ? to_string(set.status[p]) : std::string_view("ok")) << '\n';
        }
    }
}

}  // namespace io

}  // namespace semiclassical
