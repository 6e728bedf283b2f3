#pragma once

#include "swarmcso/types.hpp"

namespace swarmcso {

inline Mat66 symmetrize(const Mat66& m) { return 0.5 * (m + m.transpose()); }
inline Mat33 symmetrize3(const Mat33& m) { return 0.5 * (m + m.transpose()); }

/// Clamp the eigenvalues of a symmetric matrix from below. Used to keep
/// covariances positive definite after the (I - KH)P update.
Mat66 floor_eigenvalues(const Mat66& m, double floor);

/// A matrix square root S with S S^T = m: the Cholesky factor when m is
/// positive definite, else the symmetric eigendecomposition root with negative
/// eigenvalues clamped to zero.
Mat66 psd_sqrt(const Mat66& m);

/// log|M| of a symmetric positive definite matrix via Cholesky.
/// Throws NonPositiveDefiniteInformation if the factorization fails.
double log_det_spd(const Mat66& m);

/// Inverse of a symmetric positive definite matrix via Cholesky, symmetrized.
/// Throws SingularCovariance if the factorization fails.
Mat66 spd_inverse(const Mat66& m);

}  // namespace swarmcso
