#ifndef WISHART_ERRORS_HPP
#define WISHART_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wishart {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input failed a structural or schema check (bad JSON, broken invariant).
class ValidationError : public Error {
public:
  using Error::Error;
};

class SchemaError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// Numerical failure: the computation itself could not be completed.
class NumericalError : public Error {
public:
  using Error::Error;
};

class PoleProximityError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class UnsupportedOrderError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class NoConvergenceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class RootBracketFailureError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NonRegularGeometryError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class EmptyIndexSetError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class DomainOverflowError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class ContourOverlapError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class ContourOrderError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class ContourPoleCollisionError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NumericalOverflowError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class QuadratureDivergenceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class EigensolverFailureError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class ShapeMismatchError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class ModeMismatchError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class OutlierPresentError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class DistinctEdgesRequiredError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class EmptySamplesError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

} // namespace wishart

#endif // WISHART_ERRORS_HPP
