#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace swarmcso {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat33 = Eigen::Matrix3d;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using Mat66 = Eigen::Matrix<double, 6, 6>;

/// East/North/Up position or displacement in the scenario's generic distance units.
struct EnuVector {
  double e = 0.0;
  double n = 0.0;
  double u = 0.0;

  Vec3 vec() const { return Vec3(e, n, u); }
  static EnuVector from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

  EnuVector operator-(const EnuVector& o) const { return {e - o.e, n - o.n, u - o.u}; }
  EnuVector operator+(const EnuVector& o) const { return {e + o.e, n + o.n, u + o.u}; }

  double squared_norm() const { return e * e + n * n + u * u; }
  double norm() const { return std::sqrt(squared_norm()); }
};

inline double distance(const EnuVector& a, const EnuVector& b) { return (a - b).norm(); }

}  // namespace swarmcso
