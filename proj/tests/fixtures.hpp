#pragma once

#include <cmath>

#include "speclab/sample.hpp"
#include "speclab/spectra.hpp"

// Shared test representations. The generator choices are strongly
// ping-pong: the gap-sanity tests in test_sample.cpp keep them honest.
namespace fixtures {

inline Eigen::Matrix2d rot2(double t) {
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

inline Eigen::Matrix2d hyp2(double len, double axis_angle) {
  // translation length len along the axis rotated by axis_angle
  Eigen::Matrix2d d;
  double l = std::exp(len / 2);
  d << l, 0, 0, 1 / l;
  return rot2(axis_angle) * d * rot2(-axis_angle);
}

inline speclab::spectra::Representation sl2_first() {
  return speclab::spectra::Representation::make(
      "sl2_first", {hyp2(2.2, 0.0), hyp2(2.6, M_PI / 4)});
}

inline speclab::spectra::Representation sl2_second() {
  return speclab::spectra::Representation::make(
      "sl2_second", {hyp2(3.0, 0.15), hyp2(2.0, M_PI / 4 + 0.35)});
}

inline Eigen::Matrix3d rot3(double t, int axis) {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  int i = (axis + 1) % 3, j = (axis + 2) % 3;
  r(i, i) = std::cos(t);
  r(j, j) = std::cos(t);
  r(i, j) = -std::sin(t);
  r(j, i) = std::sin(t);
  return r;
}

inline speclab::spectra::Representation sl3_pingpong() {
  Eigen::Matrix3d d1 = Eigen::Vector3d(9.0, 1.0, 1.0 / 9).asDiagonal();
  Eigen::Matrix3d r = rot3(0.8, 0) * rot3(0.5, 2);
  Eigen::Matrix3d d2 = r * d1 * r.transpose();
  return speclab::spectra::Representation::make("sl3_pingpong", {d1, d2});
}

inline speclab::sample::ProductRep pair_product() {
  speclab::sample::ProductRep p;
  p.reps = {sl2_first(), sl2_second()};
  return p;
}

inline speclab::sample::ProductRep mixed_product() {
  speclab::sample::ProductRep p;
  p.reps = {sl2_first(), sl3_pingpong()};
  return p;
}

inline speclab::sample::ProductRep sl3_single() {
  speclab::sample::ProductRep p;
  p.reps = {sl3_pingpong()};
  return p;
}

}  // namespace fixtures
