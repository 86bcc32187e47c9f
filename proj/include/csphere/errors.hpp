#pragma once
#include <stdexcept>
#include <string>

namespace csphere {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// A series or continued fraction failed to reach tolerance within its cap.
class NonConvergent : public Error {
public:
    explicit NonConvergent(const std::string& what) : Error(what) {}
};

/// Gamma-type pole hit without a cancelling factor.
class PoleError : public Error {
public:
    explicit PoleError(const std::string& what) : Error(what) {}
};

/// Hypergeometric c-parameter hit a non-positive integer without termination.
class PoleAtC : public PoleError {
public:
    explicit PoleAtC(const std::string& what) : PoleError(what) {}
};

/// Evaluation too close to a coordinate pole (theta = 0 or pi).
class NearPole : public Error {
public:
    explicit NearPole(const std::string& what) : Error(what) {}
};

/// sin(pi(l-|m|)) vanished: spectral-weight / dual-function pole.
class IntegerDifferencePole : public Error {
public:
    explicit IntegerDifferencePole(const std::string& what) : Error(what) {}
};

/// Complex order requested outside the small-argument series path.
class ComplexOrderUnsupported : public Error {
public:
    explicit ComplexOrderUnsupported(const std::string& what) : Error(what) {}
};

/// Bessel evaluation under/overflowed.
class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& what) : Error(what) {}
};

/// 1/sin^2-type integral failed to converge under node refinement.
class SingularIntegrand : public Error {
public:
    explicit SingularIntegrand(const std::string& what) : Error(what) {}
};

/// Quadrature panel refinement failed to reduce the error estimate.
class QuadratureStall : public Error {
public:
    explicit QuadratureStall(const std::string& what) : Error(what) {}
};

/// Extracted singular model does not match the integrand.
class ModelMismatch : public Error {
public:
    explicit ModelMismatch(const std::string& what) : Error(what) {}
};

/// Fixed-point iteration is expanding instead of contracting.
class NotContractive : public Error {
public:
    explicit NotContractive(const std::string& what) : Error(what) {}
};

/// Iteration cap exceeded.
class MaxIterExceeded : public Error {
public:
    explicit MaxIterExceeded(const std::string& what) : Error(what) {}
};

/// Sampling grid too coarse for the requested reconstruction.
class GridTooCoarse : public Error {
public:
    explicit GridTooCoarse(const std::string& what) : Error(what) {}
};

/// Gram/mass matrix indefinite beyond tolerance.
class IndefiniteMass : public Error {
public:
    explicit IndefiniteMass(const std::string& what) : Error(what) {}
};

/// Eigen/optimizer solver failed to converge.
class NonConvergence : public Error {
public:
    explicit NonConvergence(const std::string& what) : Error(what) {}
};

/// Least-squares fit had no usable spread in the data.
class FitDegenerate : public Error {
public:
    explicit FitDegenerate(const std::string& what) : Error(what) {}
};

/// Interpolation requested outside the tabulated hull.
class AlphaTableMiss : public Error {
public:
    explicit AlphaTableMiss(const std::string& what) : Error(what) {}
};

/// Constraint violated at or before a barrier boundary.
class ConstraintViolation : public Error {
public:
    explicit ConstraintViolation(const std::string& what) : Error(what) {}
};

/// Barrier evaluated at or below its domain boundary.
class OutsideDomain : public Error {
public:
    explicit OutsideDomain(const std::string& what) : Error(what) {}
};

/// Line search found no acceptable step along a descent direction.
class NoDescentStep : public Error {
public:
    explicit NoDescentStep(const std::string& what) : Error(what) {}
};

/// R^alpha factor underflowed below representable range.
class TinyRadialFactor : public Error {
public:
    explicit TinyRadialFactor(const std::string& what) : Error(what) {}
};

/// Pole order outside the supported residue formulas.
class UnsupportedPoleOrder : public Error {
public:
    explicit UnsupportedPoleOrder(const std::string& what) : Error(what) {}
};

} // namespace csphere
