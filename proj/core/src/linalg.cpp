#include "swarmcso/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "swarmcso/errors.hpp"

namespace swarmcso {

Mat66 floor_eigenvalues(const Mat66& m, double floor) {
  const Mat66 sym = symmetrize(m);
  // fast path: if m - floor*I admits a Cholesky factorization, no eigenvalue
  // needs clamping
  const Eigen::LLT<Mat66> shifted(sym - floor * Mat66::Identity());
  if (shifted.info() == Eigen::Success) return sym;
  Eigen::SelfAdjointEigenSolver<Mat66> es(sym);
  Vec6 ev = es.eigenvalues();
  for (int i = 0; i < 6; ++i) ev[i] = std::max(ev[i], floor);
  return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

Mat66 psd_sqrt(const Mat66& m) {
  const Mat66 sym = symmetrize(m);
  // the Cholesky factor is a valid matrix square root; fall back to the
  // eigendecomposition for semidefinite input
  const Eigen::LLT<Mat66> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Mat66> es(sym);
  Vec6 ev = es.eigenvalues();
  for (int i = 0; i < 6; ++i) ev[i] = ev[i] > 0.0 ? std::sqrt(ev[i]) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double log_det_spd(const Mat66& m) {
  Eigen::LLT<Mat66> llt(symmetrize(m));
  if (llt.info() != Eigen::Success) {
    throw NonPositiveDefiniteInformation("log-determinant of a non positive definite matrix");
  }
  double acc = 0.0;
  const Mat66 l = llt.matrixL();
  for (int i = 0; i < 6; ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

Mat66 spd_inverse(const Mat66& m) {
  Eigen::LLT<Mat66> llt(symmetrize(m));
  if (llt.info() != Eigen::Success) {
    throw SingularCovariance("covariance is not positive definite");
  }
  return symmetrize(llt.solve(Mat66::Identity()));
}

}  // namespace swarmcso
