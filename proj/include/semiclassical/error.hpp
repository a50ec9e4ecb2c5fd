#pragma once

#include <stdexcept>
#include <string>

namespace semiclassical {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid grid geometry, mismatched grids, or stencil support too small.
class GridError : public Error {
public:
    using Error::Error;
};

/// Non-finite samples or malformed field payloads.
class FieldError : public Error {
public:
    using Error::Error;
};

/// (Laplacian + lambda^2) is singular or numerically singular on the grid.
class ResonanceError : public Error {
public:
    ResonanceError(const std::string& what, double lambda) : Error(what), lambda_(lambda) {}
    double lambda() const noexcept { return lambda_; }

private:
    double lambda_;
};

/// An amplitude or phase numerator fails its Helmholtz constraint.
class HelmholtzPreconditionError : public Error {
public:
    HelmholtzPreconditionError(const std::string& what, std::string field, double residual)
        : Error(what), field_(std::move(field)), residual_(residual) {}
    const std::string& field() const noexcept { return field_; }
    double residual() const noexcept { return residual_; }

private:
    std::string field_;
    double residual_;
};

/// Every node of the amplitude lies on the nodal set.
class DegenerateAmplitudeError : public Error {
public:
    using Error::Error;
};

/// Crank-Nicolson norm drift above the unitarity bound.
class UnitarityError : public Error {
public:
    UnitarityError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Time meshes that should coincide do not.
class TimeMeshError : public Error {
public:
    using Error::Error;
};

/// Scenario configuration failed validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace semiclassical
