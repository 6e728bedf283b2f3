#include "swarmcso/ekf2.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "swarmcso/errors.hpp"
#include "swarmcso/linalg.hpp"

namespace swarmcso {

MotionModel MotionModel::constant_velocity(double dt, const Vec6& q_diag) {
  MotionModel m;
  m.phi = Mat66::Identity();
  m.phi(0, 3) = dt;
  m.phi(1, 4) = dt;
  m.phi(2, 5) = dt;
  m.q = q_diag.asDiagonal();
  return m;
}

NoiseModel NoiseModel::from_sigmas(double sigma_r, double sigma_phi, double sigma_theta) {
  NoiseModel n;
  n.variances = Vec3(sigma_r * sigma_r, sigma_phi * sigma_phi, sigma_theta * sigma_theta);
  return n;
}

TrackEstimate predict(const TrackEstimate& est, const MotionModel& model) {
  TrackEstimate out;
  out.x = model.phi * est.x;
  out.p = symmetrize(model.phi * est.p * model.phi.transpose() + model.q);
  out.stage = Stage::predicted;
  return out;
}

TrackEstimate update_linearized(const TrackEstimate& est, const Vec3& z,
                                const MeasurementLinearization& lin, const Mat33& r_cov,
                                const std::array<bool, 3>& wrap_component) {
  const Mat66& p = est.p;

  // Hessian trace corrections: tr(Hess_l P Hess_m P) and tr(Hess_l P).
  std::array<Mat66, 3> hp;
  for (int l = 0; l < 3; ++l) hp[static_cast<std::size_t>(l)] = lin.hess[l] * p;

  Mat33 s = symmetrize3(lin.jac * p * lin.jac.transpose() + r_cov);
  for (int l = 0; l < 3; ++l) {
    for (int m = l; m < 3; ++m) {
      const double corr =
          0.5 * (hp[static_cast<std::size_t>(l)] * hp[static_cast<std::size_t>(m)]).trace();
      s(l, m) += corr;
      if (m != l) s(m, l) += corr;
    }
  }

  Eigen::SelfAdjointEigenSolver<Mat33> es(s);
  const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(2);
  if (!(lo > 0.0) || hi / lo > kMaxInnovationCondition) {
    throw SingularInnovation("innovation covariance not invertible");
  }

  Vec3 innovation;
  for (int l = 0; l < 3; ++l) {
    innovation(l) = z(l) - lin.h(l) - 0.5 * hp[static_cast<std::size_t>(l)].trace();
    if (wrap_component[static_cast<std::size_t>(l)]) innovation(l) = wrap_angle(innovation(l));
  }

  const Eigen::LLT<Mat33> llt(s);
  const Eigen::Matrix<double, 6, 3> gain = llt.solve(lin.jac * p).transpose();

  TrackEstimate out;
  out.x = est.x + gain * innovation;
  out.p = floor_eigenvalues(symmetrize((Mat66::Identity() - gain * lin.jac) * p),
                            kCovarianceEigenFloor);
  out.stage = Stage::updated;
  return out;
}

TrackEstimate update(const TrackEstimate& est, const Measurement& z, const EnuVector& agent_pos,
                     const NoiseModel& noise, bool detected) {
  TrackEstimate pass{est.x, est.p, Stage::updated};
  if (!detected) return pass;

  const EnuVector pred_pos{est.x(0), est.x(1), est.x(2)};
  const EnuVector rel = pred_pos - agent_pos;
  if (singular_geometry(rel)) return pass;  // skipped as a missed detection

  MeasurementLinearization lin;
  lin.h = measure(pred_pos, agent_pos).vec();
  lin.jac = jacobian(rel);
  lin.hess = hessians(rel);
  return update_linearized(est, z.vec(), lin, noise.covariance(), {false, true, false});
}

Mat66 fisher_contribution(const TrackEstimate& est) { return spd_inverse(est.p); }

}  // namespace swarmcso
