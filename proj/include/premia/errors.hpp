#pragma once

#include <stdexcept>
#include <string>

namespace premia {

/// Argument outside the domain of a function (e.g. theta >= Theta_L).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Parameter set violating a model invariant; raised before any computation.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Iterative scheme (bisection, quadrature, ODE step control) missed its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// (theta, beta) is outside D_b(a), so no zero of Lambda exists below u^m.
class NotInDbError : public DomainError {
public:
    using DomainError::DomainError;
};

/// E_P[S(T)] is infinite: the argument of kappa_L reaches Theta_L.
class NotFiniteError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Requested maturity lies beyond the solved Riccati horizon.
class HorizonExceededError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Pricing attempted on a Riccati solution whose guard fired.
class BlowUpUpstreamError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Long-run limit requested but Psi_1 has not decayed by the maximal horizon.
class NotConvergedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Simulation requested for a model the exact scheme does not cover.
class UnsupportedModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace premia
