#pragma once

#include <array>

#include "swarmcso/types.hpp"

namespace swarmcso {

/// Range, azimuth and polar angle of a target as seen from an agent.
/// r >= 0, phi in (-pi, pi], theta in [0, pi].
struct Measurement {
  double r = 0.0;
  double phi = 0.0;
  double theta = 0.0;

  Vec3 vec() const { return Vec3(r, phi, theta); }
};

/// 3x6 sensitivity of (r, phi, theta) to the target state. Velocity columns are zero.
using MeasurementJacobian = Mat36;

/// Second derivatives of each measurement component with respect to the target
/// state; velocity rows and columns are zero.
struct MeasurementHessians {
  std::array<Mat66, 3> h;
  const Mat66& operator[](int i) const { return h[static_cast<std::size_t>(i)]; }
  Mat66& operator[](int i) { return h[static_cast<std::size_t>(i)]; }
};

// Below these margins the azimuth/polar partials blow up; the affected
// measurement is treated as a missed detection.
inline constexpr double kMinHorizontalRange = 1e-9;   // on sqrt(dE^2 + dN^2)
inline constexpr double kMinPolarMargin = 1e-12;      // on 1 - (dU/r)^2

/// Wrap an angle into (-pi, pi].
double wrap_angle(double a);

/// Measure a target from an agent position. Throws DegenerateGeometry when the
/// positions coincide. On the vertical axis phi is 0 by convention and theta is
/// 0 or pi.
Measurement measure(const EnuVector& target_pos, const EnuVector& agent_pos);

/// True if the relative vector is too close to zero range or the vertical axis
/// for the Jacobian/Hessians to be evaluated.
bool singular_geometry(const EnuVector& rel);

/// Analytic Jacobian of the measurement at relative position rel = target - agent.
/// Throws GimbalSingularity when singular_geometry(rel).
MeasurementJacobian jacobian(const EnuVector& rel);

/// Analytic per-component Hessians at rel. Same singularities as jacobian().
MeasurementHessians hessians(const EnuVector& rel);

/// Derivative of jacobian(rel(p)) along d(rel)/dp = drel. Used for the heading
/// and vertical action gradients, where the sensor moves and drel = -dy/dp.
MeasurementJacobian jacobian_directional_derivative(const EnuVector& rel, const Vec3& drel);

}  // namespace swarmcso
