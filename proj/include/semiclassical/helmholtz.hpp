#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "semiclassical/field.hpp"
#include "semiclassical/report.hpp"

namespace semiclassical {

enum class ModeKind { plane_wave_superposition, separable_trig, radial_sinc, harmonic };

std::string_view to_string(ModeKind k);
ModeKind mode_kind_from_string(std::string_view s);

/// Closed-form solution of (Laplacian + lambda^2) u = 0.
///
///   plane_wave_superposition  sum_j a_j cos(k_j . (x - c) + theta_j),  |k_j| = lambda
///   separable_trig            sum_j a_j prod_d cos(k_jd (x_d - c_d) + theta_j),  |k_j| = lambda
///   radial_sinc               a * u(lambda |x - c|), the regular radial solution:
///                             cos in 1D, J0 in 2D, sin(z)/z in 3D
///   harmonic                  a + slope . (x - c),  lambda = 0
///
/// `center` and `slope` may be left empty (treated as zero vectors).
struct HelmholtzMode {
    ModeKind kind = ModeKind::plane_wave_superposition;
    double lambda = 0.0;
    std::vector<std::vector<double>> wavevectors;
    std::vector<double> amplitudes;
    std::vector<double> phases;
    std::vector<double> center;
    std::vector<double> slope;

    /// Throws Error when an invariant is violated.
    void validate() const;
    /// Spatial dimension implied by the vectors, or 0 when any dimension fits.
    int implied_dim() const;

    static HelmholtzMode plane_wave(std::vector<double> k, double amplitude = 1.0, double phase = 0.0);
    static HelmholtzMode affine(double constant, std::vector<double> slope = {});
};

/// Value of the mode at a point of a `dim`-dimensional space.
double mode_value(const HelmholtzMode& mode, const Point3& x, int dim);

ScalarField evaluate_mode(const HelmholtzMode& mode, const Grid& grid);

/// sin(z)/z with the removable singularity handled by its Taylor series.
double sinc(double z);

/// Max over interior nodes of |Laplacian f + lambda^2 f| (entry "helmholtz_residual").
ReportEntry verify_helmholtz(const ScalarField& f, double lambda, double tol);
double helmholtz_residual(const ScalarField& f, double lambda);

struct HelmholtzSolution {
    ScalarField field;
    /// max interior |(Laplacian + lambda^2) field - rhs| / max(|rhs|)
    double relative_residual = 0.0;
};

/// Relative distance below which lambda^2 counts as a discrete eigenvalue.
inline constexpr double kResonanceTolerance = 1e-8;

/// Solves (Laplacian + lambda^2) u = rhs on the interior of a dirichlet_zero
/// grid with u = 0 on the boundary, by sparse LU of the central stencil.
/// Throws ResonanceError when lambda^2 collides with the discrete Dirichlet
/// spectrum or the post-solve residual exceeds kResonanceTolerance.
HelmholtzSolution solve_inhomogeneous(const Grid& grid, double lambda, const ScalarField& rhs);

/// Eigenvalues of -Laplacian (discrete, Dirichlet) nearest to lambda^2, relative gap.
double dirichlet_spectral_gap(const Grid& grid, double lambda);

/// Second-order central time differences, one-sided at both ends.
std::vector<ScalarField> time_derivative(std::span<const ScalarField> fields, double dt);

/// lambda(t) sampled on a uniform mesh, piecewise-linear in between.
class LambdaSchedule {
public:
    LambdaSchedule(std::vector<double> times, std::vector<double> values);

    static LambdaSchedule constant(double lambda, std::vector<double> times);
    /// lambda = sqrt(2 m K) / hbar; negative K is rejected.
    static LambdaSchedule from_quantum_potential(std::vector<double> times, std::span<const double> K,
                                                 const PhysicalConstants& c);

    double at(double t) const;
    /// K = (hbar lambda)^2 / 2m
    double quantum_potential_at(double t, const PhysicalConstants& c) const;

    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return times_.size(); }
    double dt() const;
    bool uniform() const;
    bool is_constant() const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

double quantum_potential_constant(double lambda, const PhysicalConstants& c);

}  // namespace semiclassical
