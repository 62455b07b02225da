#pragma once

#include <stdexcept>
#include <string>

namespace ellipsefit {

/// Base class of every failure raised by the fitting library.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The conic violates the ellipse condition b^2 - ac < 0.
struct NotAnEllipse : FitError {
  using FitError::FitError;
};

/// Algebraically an ellipse but without a real locus (imaginary or a point).
struct DegenerateConic : FitError {
  using FitError::FitError;
};

/// Design matrix numerically lost column rank (collinear or degenerate data).
struct RankDeficient : FitError {
  using FitError::FitError;
};

/// The 5x5 interpolation system is singular.
struct SingularSystem : FitError {
  using FitError::FitError;
};

/// Foot-point Jacobian is numerically singular.
struct SingularJacobian : FitError {
  using FitError::FitError;
};

/// An iteration exhausted its budget without meeting its tolerance.
struct NoConvergence : FitError {
  using FitError::FitError;
};

/// Initial parameters do not describe a valid ellipse.
struct BadInitial : FitError {
  using FitError::FitError;
};

/// Stacked Jacobian lost rank during a parameter update.
struct DegenerateStep : FitError {
  using FitError::FitError;
};

/// Every random subset failed to produce a usable ellipse.
struct NoValidSubset : FitError {
  using FitError::FitError;
};

/// CSV input could not be parsed; carries the offending 1-based line number.
struct MalformedFile : FitError {
  MalformedFile(int line_number, const std::string& message)
      : FitError("line " + std::to_string(line_number) + ": " + message),
        line(line_number) {}
  int line;
};

struct IoError : FitError {
  using FitError::FitError;
};

}  // namespace ellipsefit
