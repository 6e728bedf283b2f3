#pragma once

#include <stdexcept>
#include <string>

namespace swarmcso {

/// Agent and target coincide: range is zero and no measurement is defined.
struct DegenerateGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Line of sight is on (or numerically at) the vertical axis: the azimuth and
/// polar-angle partials are undefined.
struct GimbalSingularity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Innovation covariance is not usably invertible; the caller skips the update.
struct SingularInnovation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Covariance matrix cannot be inverted to a Fisher information matrix.
struct SingularCovariance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A Fisher information total is not positive definite; its log-determinant is undefined.
struct NonPositiveDefiniteInformation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scenario configuration failed validation; message names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace swarmcso
