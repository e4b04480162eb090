#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "speclab/sample.hpp"

namespace speclab::cone {

struct LinearFunctional {
  Eigen::VectorXd coeffs;

  double operator()(const Eigen::VectorXd& v) const { return coeffs.dot(v); }
};

// d linear forms on the concatenated chamber space, one row each.
struct LinearMapPhi {
  Eigen::MatrixXd rows;  // d x ambient

  int d() const { return static_cast<int>(rows.rows()); }
  Eigen::VectorXd operator()(const Eigen::VectorXd& v) const { return rows * v; }
};

struct LimitConeEstimate {
  Eigen::MatrixXd directions;  // ambient x N, unit columns
  Eigen::MatrixXd hull_rays;   // ambient x K, extreme rays of the conic hull
  Eigen::MatrixXd basis;       // ambient x intrinsic; identity when plain
  int min_length = 1;

  // Rays mapped into intrinsic coordinates (basis^T columns).
  Eigen::MatrixXd intrinsic_rays() const { return basis.transpose() * hull_rays; }
};

// Directions of loxodromic classes with word length >= min_length; hull via
// extreme-ray reduction in intrinsic coordinates.
LimitConeEstimate estimate_limit_cone(const sample::SpectrumSample& s,
                                      int min_length);

// Synthetic estimates for tests and fixed geometry.
LimitConeEstimate cone_from_rays(const Eigen::MatrixXd& rays,
                                 const Eigen::MatrixXd& basis);
LimitConeEstimate cone_from_rays(const Eigen::MatrixXd& rays);

enum class Projection { jordan, cartan };

struct Window {
  double tmin = 0;
  double tmax = 0;
  bool automatic = true;

  static Window of(double lo, double hi) { return {lo, hi, false}; }
};

// Entries of the chosen projection inside the open cone of the given
// half-angle about the direction, with norm at most T. Jordan counts classes,
// Cartan counts elements.
long directional_count(const sample::SpectrumSample& s,
                       const Eigen::VectorXd& direction, double aperture,
                       double T, Projection proj);

// Least-squares slope of log count against T; the automatic window is the
// top half of the data range, starting no earlier than the 30th entry.
double estimate_growth_indicator(const sample::SpectrumSample& s,
                                 const Eigen::VectorXd& direction,
                                 double aperture, Window window = {});

double estimate_delta(const sample::SpectrumSample& s,
                      const LinearFunctional& psi, Projection proj,
                      Window window = {});

// Homogeneous degree-1 empirical growth indicator.
struct GrowthIndicatorEstimate {
  const sample::SpectrumSample* samples = nullptr;
  double aperture = 0.15;
  Window window = {};
  Projection proj = Projection::jordan;

  double operator()(const Eigen::VectorXd& w) const;
};

// Gradient of the homogeneous extension at v by central differences on the
// sphere, stepped inside span(basis); satisfies result(v) = psi(v) exactly.
LinearFunctional estimate_tangent_form(const GrowthIndicatorEstimate& gi,
                                       const Eigen::VectorXd& v,
                                       const Eigen::MatrixXd& basis,
                                       double step = 1e-3);
LinearFunctional tangent_form_of(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& v,
                                 const Eigen::MatrixXd& basis,
                                 double step = 1e-3);

// True when the kernel of phi misses the estimated cone: the minimum of
// |phi u|/|u| over the conic hull stays above tol.
bool check_properness(const LinearMapPhi& phi, const LimitConeEstimate& cone,
                      double tol);

// JSON cone report: hull rays, growth indicator on a grid, deltas.
std::string cone_report(const sample::SpectrumSample& s,
                        const LimitConeEstimate& cone,
                        const std::vector<LinearFunctional>& functionals,
                        double aperture);

}  // namespace speclab::cone
