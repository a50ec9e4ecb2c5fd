#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semiclassical/field.hpp"
#include "semiclassical/helmholtz.hpp"
#include "semiclassical/operators.hpp"

namespace semiclassical {

struct QuantumPotential {
    ScalarField Q;  ///< zero on masked nodes
    NodeMask mask;  ///< |R| < eps_node
};

/// Q = -hbar^2 Laplacian(R) / (2 m R) on nodes with |R| >= eps_node.
/// Throws DegenerateAmplitudeError when every node is masked.
QuantumPotential quantum_potential(const ScalarField& R, const PhysicalConstants& c, double eps_node);

enum class ScenarioCase { stationary, time_dependent };

std::string_view to_string(ScenarioCase c);
ScenarioCase scenario_case_from_string(std::string_view s);

struct ScenarioTolerances {
    /// max interior |(Laplacian + lambda^2) f| for R and S~ (stationary) or R(t).
    double helmholtz = 1e-2;
    /// max interior |(Laplacian + lambda^2) phi~ + 2m dR/dt| (time-dependent).
    double inhomogeneous = 1e-2;
};

struct ScenarioOptions {
    /// Nodal threshold; <= 0 selects 1e-6 * max|R|.
    double eps_node = 0.0;
    ScenarioTolerances tolerances{};
};

/// A potential with a purely time-dependent quantum potential, together with
/// the amplitude and phase that realise it.
///
/// Stationary scenarios hold a single slice: amplitude R, phase_numerator S~,
/// phase S and V, with phi(x,t) = -E t + S(x). Time-dependent scenarios hold one
/// slice per time of the lambda schedule.
struct SemiclassicalScenario {
    PhysicalConstants constants;
    Grid grid;
    ScenarioCase kind = ScenarioCase::stationary;
    std::vector<double> times;
    std::vector<ScalarField> amplitude;
    std::vector<ScalarField> phase_numerator;
    std::vector<ScalarField> phase;
    std::vector<ScalarField> potential;
    std::vector<NodeMask> mask;
    double energy = 0.0;
    LambdaSchedule lambda;
    double eps_node = 0.0;
    ScenarioTolerances tolerances;
    /// Accumulated gauge phase zeta(t) per slice (empty when never shifted).
    std::vector<double> gauge_zeta;
    std::string id;
    std::string config_hash;

    bool stationary() const noexcept { return kind == ScenarioCase::stationary; }
    std::size_t slices() const noexcept { return amplitude.size(); }
    double dt() const { return lambda.dt(); }
    double lambda_at_slice(std::size_t k) const { return lambda.values()[k]; }
    /// K(t_k) = (hbar lambda(t_k))^2 / 2m
    double quantum_constant(std::size_t k) const;
    /// Full phase phi(x, t): stationary -E t + S, otherwise the stored slice.
    ScalarField phase_at(std::size_t k, double t = 0.0) const;
    ComplexField wavefunction(std::size_t k, double t = 0.0) const;
    /// Fraction of nodes masked in any slice.
    double mask_fraction() const;
};

/// grad(num / R) by the quotient rule, (R grad num - num grad R) / R^2, so only
/// the smooth Helmholtz fields are differenced. Zero on masked nodes.
VectorField phase_gradient(const ScalarField& numerator, const ScalarField& R, const NodeMask& mask);

/// V = E - (1/2m) [ (hbar lambda)^2 + |grad(S~/R)|^2 ] on unmasked nodes.
/// Throws HelmholtzPreconditionError naming R or S_tilde when either fails
/// its Helmholtz constraint at options.tolerances.helmholtz.
SemiclassicalScenario construct_stationary(const ScalarField& R, const ScalarField& S_tilde, double E, double lambda,
                                           const PhysicalConstants& c, const ScenarioOptions& options = {});

/// V(t) = -d/dt(phi~/R) - (1/2m) [ (hbar lambda(t))^2 + |grad(phi~/R)|^2 ], one
/// slice per schedule time. Requires R(t) to satisfy the Helmholtz constraint
/// with lambda(t) and phi~(t) to satisfy (Laplacian + lambda^2) phi~ = -2m dR/dt.
SemiclassicalScenario construct_time_dependent(std::span<const ScalarField> R, std::span<const ScalarField> phi_tilde,
                                               const LambdaSchedule& lambda, const PhysicalConstants& c,
                                               const ScenarioOptions& options = {});

/// Max fraction of nodes whose mask flag may flip between adjacent slices.
inline constexpr double kMaxMaskChange = 0.05;

/// phi~ for a time-dependent amplitude: solves (Laplacian + lambda(t)^2) phi~ = -2m dR/dt
/// slice by slice on a dirichlet_zero grid.
std::vector<ScalarField> solve_phase_numerators(std::span<const ScalarField> R, const LambdaSchedule& lambda,
                                                const PhysicalConstants& c);

/// 1D phase numerator of the restricted family R^2 dS/dx = flux:
/// S(x) = flux * int_{x0}^{x} dx'/R^2 (trapezoid), returned as S~ = R S.
ScalarField restricted_ansatz_numerator(const ScalarField& R, double flux);

/// Time-dependent multiple of the identity added to the Hamiltonian.
/// zeta(t) = -(1/hbar) int_0^t f, cumulative trapezoid on the shared mesh.
class GaugeShift {
public:
    GaugeShift(std::vector<double> times, std::vector<double> f, double hbar);

    static GaugeShift constant(double value, std::vector<double> times, double hbar);

    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> f() const noexcept { return f_; }
    std::span<const double> zeta() const noexcept { return zeta_; }
    bool is_constant() const;

    /// Index of a mesh time; throws TimeMeshError when t is not on the mesh.
    std::size_t index_of(double t) const;
    double f_at(double t) const { return f_[index_of(t)]; }
    double zeta_at(double t) const { return zeta_[index_of(t)]; }

private:
    std::vector<double> times_;
    std::vector<double> f_;
    std::vector<double> zeta_;
};

/// f(t) = K(t) = (hbar lambda(t))^2/2m sampled on `times`; sign = -1 gives the
/// shift that removes the quantum potential.
GaugeShift quantum_potential_gauge(const SemiclassicalScenario& s, std::vector<double> times, double sign = 1.0);

/// psi' = exp(i zeta(t)) psi
ComplexField gauge_shift(const ComplexField& psi, double t, const GaugeShift& shift);

/// V' = V + f(t), phi' = phi + hbar zeta(t), R and Q unchanged. A stationary
/// scenario under a constant f stays stationary with E' = E + f; otherwise the
/// result is time-dependent on the shift's mesh.
SemiclassicalScenario gauge_shift(const SemiclassicalScenario& s, const GaugeShift& shift);

/// Every second node per axis (and every second time slice when time-dependent
/// with at least five slices); masks recomputed with the same eps_node.
SemiclassicalScenario coarsen(const SemiclassicalScenario& s);

}  // namespace semiclassical
