#include "swarmcso/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "swarmcso/errors.hpp"

namespace swarmcso {

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * M_PI);  // [-pi, pi]
  if (w <= -M_PI) w += 2.0 * M_PI;           // boundary convention: -pi maps to pi
  return w;
}

Measurement measure(const EnuVector& target_pos, const EnuVector& agent_pos) {
  const EnuVector d = target_pos - agent_pos;
  const double r = d.norm();
  if (r == 0.0) throw DegenerateGeometry("coincident target and agent positions");
  Measurement z;
  z.r = r;
  z.phi = (d.e == 0.0 && d.n == 0.0) ? 0.0 : std::atan2(d.n, d.e);
  z.theta = std::acos(std::clamp(d.u / r, -1.0, 1.0));
  return z;
}

bool singular_geometry(const EnuVector& rel) {
  const double r2 = rel.squared_norm();
  if (r2 == 0.0) return true;
  const double f2 = rel.e * rel.e + rel.n * rel.n;
  if (f2 < kMinHorizontalRange * kMinHorizontalRange) return true;
  return 1.0 - rel.u * rel.u / r2 < kMinPolarMargin;
}

MeasurementJacobian jacobian(const EnuVector& rel) {
  if (singular_geometry(rel)) {
    throw GimbalSingularity("measurement Jacobian undefined at or near the vertical axis");
  }
  const double e = rel.e, n = rel.n, u = rel.u;
  const double r2 = rel.squared_norm();
  const double r = std::sqrt(r2);
  const double f2 = e * e + n * n;
  const double f = std::sqrt(f2);

  MeasurementJacobian h = MeasurementJacobian::Zero();
  // range
  h(0, 0) = e / r;
  h(0, 1) = n / r;
  h(0, 2) = u / r;
  // azimuth: atan2(n, e)
  h(1, 0) = -n / f2;
  h(1, 1) = e / f2;
  // polar: acos(u / r), equivalently atan2(f, u)
  h(2, 0) = u * e / (f * r2);
  h(2, 1) = u * n / (f * r2);
  h(2, 2) = -f / r2;
  return h;
}

MeasurementHessians hessians(const EnuVector& rel) {
  if (singular_geometry(rel)) {
    throw GimbalSingularity("measurement Hessians undefined at or near the vertical axis");
  }
  const double e = rel.e, n = rel.n, u = rel.u;
  const double r2 = rel.squared_norm();
  const double r = std::sqrt(r2);
  const double f2 = e * e + n * n;
  const double f = std::sqrt(f2);
  const double f4 = f2 * f2;
  const double r4 = r2 * r2;

  MeasurementHessians out;
  out[0] = Mat66::Zero();
  out[1] = Mat66::Zero();
  out[2] = Mat66::Zero();

  // range: (I - dd^T/r^2) / r on the position block
  {
    const Vec3 d(e, n, u);
    const Mat33 block = (Mat33::Identity() - d * d.transpose() / r2) / r;
    out[0].topLeftCorner<3, 3>() = block;
  }

  // azimuth
  {
    Mat33 block = Mat33::Zero();
    block(0, 0) = 2.0 * e * n / f4;
    block(0, 1) = (n * n - e * e) / f4;
    block(1, 0) = block(0, 1);
    block(1, 1) = -2.0 * e * n / f4;
    out[1].topLeftCorner<3, 3>() = block;
  }

  // polar: theta = atan2(f, u)
  {
    Mat33 block = Mat33::Zero();
    const double c = u / (f * r2);
    block(0, 0) = c * (1.0 - e * e / f2 - 2.0 * e * e / r2);
    block(1, 1) = c * (1.0 - n * n / f2 - 2.0 * n * n / r2);
    block(0, 1) = -u * e * n * (1.0 / (f2 * f * r2) + 2.0 / (f * r4));
    block(1, 0) = block(0, 1);
    block(0, 2) = e / (f * r2) - 2.0 * u * u * e / (f * r4);
    block(2, 0) = block(0, 2);
    block(1, 2) = n / (f * r2) - 2.0 * u * u * n / (f * r4);
    block(2, 1) = block(1, 2);
    block(2, 2) = 2.0 * f * u / r4;
    out[2].topLeftCorner<3, 3>() = block;
  }
  return out;
}

MeasurementJacobian jacobian_directional_derivative(const EnuVector& rel, const Vec3& drel) {
  if (singular_geometry(rel)) {
    throw GimbalSingularity("measurement Jacobian derivative undefined near the vertical axis");
  }
  const double e = rel.e, n = rel.n, u = rel.u;
  const double de = drel.x(), dn = drel.y(), du = drel.z();
  const double r2 = rel.squared_norm();
  const double r = std::sqrt(r2);
  const double f2 = e * e + n * n;
  const double f = std::sqrt(f2);

  const double dr = (e * de + n * dn + u * du) / r;
  const double df = (e * de + n * dn) / f;

  MeasurementJacobian dh = MeasurementJacobian::Zero();
  // d(range row): d(c/r) = dc/r - c dr/r^2
  dh(0, 0) = de / r - e * dr / r2;
  dh(0, 1) = dn / r - n * dr / r2;
  dh(0, 2) = du / r - u * dr / r2;
  // d(azimuth row)
  dh(1, 0) = -dn / f2 + 2.0 * n * df / (f2 * f);
  dh(1, 1) = de / f2 - 2.0 * e * df / (f2 * f);
  // d(polar row): h20 = u e / (f r^2), h22 = -f / r^2
  const double g = f * r2;
  const double dg = df * r2 + 2.0 * f * r * dr;
  dh(2, 0) = (du * e + u * de) / g - u * e * dg / (g * g);
  dh(2, 1) = (du * n + u * dn) / g - u * n * dg / (g * g);
  dh(2, 2) = -df / r2 + 2.0 * f * dr / (r2 * r);
  return dh;
}

}  // namespace swarmcso
