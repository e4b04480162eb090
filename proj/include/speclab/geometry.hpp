#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace speclab::geometry {

// Nonnegative least squares min ||A t - b||, t >= 0 (Lawson-Hanson active set).
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     double tol = 1e-12);

// Euclidean distance from u to the conic hull of the ray columns.
double cone_distance(const Eigen::MatrixXd& rays, const Eigen::VectorXd& u);

// Extreme rays of the conic hull of the given unit column vectors.
// Assumes the cone is salient (contained in an open half space), which holds
// for chamber data. Input should be deduplicated.
Eigen::MatrixXd extreme_rays(const Eigen::MatrixXd& dirs);

// Orthonormal basis of the null space of A (columns), within tolerance.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& A, double tol = 1e-10);

// Orthonormal basis of the column span.
Eigen::MatrixXd column_space(const Eigen::MatrixXd& A, double tol = 1e-10);

// min over the cone cross-section of ||phi u|| / ||u||, via projected
// gradient on the generator simplex with deterministic multistart.
double min_phi_ratio_on_cone(const Eigen::MatrixXd& phi,
                             const Eigen::MatrixXd& rays);

// Finitely generated closed convex cone with both a generator and a facet
// description. Facets live in span coordinates; points off the span are
// outside. Facet enumeration is combinatorial over ray subsets, fine for the
// small ray counts produced by hull estimation.
struct ConvexCone {
  Eigen::MatrixXd rays;        // m x K, unit columns
  Eigen::MatrixXd span_basis;  // m x s, orthonormal
  Eigen::MatrixXd facets;      // F x s rows; inside iff facets * (span coords) <= 0

  int ambient_dim() const { return static_cast<int>(rays.rows()); }
  int span_dim() const { return static_cast<int>(span_basis.cols()); }

  static ConvexCone from_rays(const Eigen::MatrixXd& rays);

  bool contains(const Eigen::VectorXd& u, double tol = 1e-9) const;
  // > 0 outside, < 0 strictly inside; magnitude is a margin estimate scaled
  // to unit facet normals / off-span distance.
  double signed_distance(const Eigen::VectorXd& u) const;

  // Blend rays away from their mean direction by the given factor and
  // rebuild. Used both for the enclosing cone C and for independence checks.
  ConvexCone dilated(double factor) const;
};

// Compact convex polytope in dimension q <= 2 with vertex and facet data.
// q = 0 is a single point, q = 1 an interval, q = 2 a convex polygon with
// counterclockwise-ordered vertices.
struct Polytope {
  int dim = 0;
  Eigen::MatrixXd vertices;  // q x V
  Eigen::MatrixXd A;         // F x q, A x <= b
  Eigen::VectorXd b;

  static Polytope point();
  static Polytope interval(double lo, double hi);
  // Vertex enumeration from inequalities; q <= 2 only.
  static Polytope from_inequalities(const Eigen::MatrixXd& A,
                                    const Eigen::VectorXd& b);

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
  double signed_distance(const Eigen::VectorXd& x) const;  // max(Ax - b), unit rows
  double volume() const;  // counting measure for q = 0
  Eigen::VectorXd centroid() const;
  // Largest s >= 0 with s*d inside (ray from origin); requires 0 inside.
  double ray_exit(const Eigen::VectorXd& d) const;
  Eigen::VectorXd bounding_box_lo() const;
  Eigen::VectorXd bounding_box_hi() const;
};

// Gauss-Legendre nodes/weights on [-1, 1].
struct Quadrature {
  Eigen::VectorXd nodes, weights;
};
Quadrature gauss_legendre(int n);
// Gauss-Hermite for weight exp(-x^2) on the real line.
Quadrature gauss_hermite(int n);

// Integral of f over the polytope: exact point evaluation for q = 0,
// Gauss-Legendre for q = 1 (optionally split at breakpoints), fan
// triangulation with a collapsed tensor rule for q = 2.
double integrate_polytope(const Polytope& p,
                          const std::function<double(const Eigen::VectorXd&)>& f,
                          int points_per_dim = 64,
                          const std::vector<double>& breakpoints = {});

}  // namespace speclab::geometry
