#pragma once

#include <array>

#include "swarmcso/measurement.hpp"
#include "swarmcso/types.hpp"

namespace swarmcso {

enum class Stage { predicted, updated };

/// One agent's Kalman estimate of one target: 6-state (E, N, U, Edot, Ndot, Udot)
/// and its covariance, tagged with the filter stage (k|k-1 vs k|k).
struct TrackEstimate {
  Vec6 x = Vec6::Zero();
  Mat66 p = Mat66::Identity();
  Stage stage = Stage::updated;
};

/// Constant-velocity transition and process noise assumed by every agent.
struct MotionModel {
  Mat66 phi = Mat66::Identity();
  Mat66 q = Mat66::Zero();

  static MotionModel constant_velocity(double dt, const Vec6& q_diag);
};

/// Diagonal measurement noise covariance (sigma_r^2, sigma_phi^2, sigma_theta^2).
struct NoiseModel {
  Vec3 variances = Vec3::Ones();

  static NoiseModel from_sigmas(double sigma_r, double sigma_phi, double sigma_theta);
  Mat33 covariance() const { return variances.asDiagonal(); }
  Vec3 inverse_variances() const { return variances.cwiseInverse(); }
};

/// Measurement model evaluated at the predicted state: value, Jacobian and
/// per-component Hessians. Decouples the filter algebra from the
/// range/azimuth/polar model so tests can substitute e.g. a linear model.
struct MeasurementLinearization {
  Vec3 h = Vec3::Zero();
  Mat36 jac = Mat36::Zero();
  MeasurementHessians hess{};
};

/// Time update: x' = Phi x, P' = Phi P Phi^T + Q (symmetrized).
TrackEstimate predict(const TrackEstimate& est, const MotionModel& model);

/// Second-order measurement update with explicit linearization.
/// S[l,m] = (H P H^T + R)[l,m] + tr(Hess_l P Hess_m P)/2
/// u[l]   = z[l] - h[l] - tr(Hess_l P)/2, wrapped into (-pi, pi] where
/// wrap_component is true. Covariance update (I - K H) P, symmetrized and
/// eigenvalue-floored at 1e-12. Throws SingularInnovation when S is not usably
/// invertible (condition number above 1e12); the caller skips the update.
TrackEstimate update_linearized(const TrackEstimate& est, const Vec3& z,
                                const MeasurementLinearization& lin, const Mat33& r_cov,
                                const std::array<bool, 3>& wrap_component = {false, false, false});

/// Range/azimuth/polar update. When not detected (or the geometry is at a
/// singularity) the estimate passes through unchanged at the updated stage.
TrackEstimate update(const TrackEstimate& est, const Measurement& z, const EnuVector& agent_pos,
                     const NoiseModel& noise, bool detected);

/// Pre-action Fisher information F = P^-1, symmetrized. Throws SingularCovariance.
Mat66 fisher_contribution(const TrackEstimate& est);

inline constexpr double kCovarianceEigenFloor = 1e-12;
inline constexpr double kMaxInnovationCondition = 1e12;

}  // namespace swarmcso
