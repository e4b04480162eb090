#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "speclab/words.hpp"

namespace speclab::spectra {

// Chamber vectors are log-spectral data: entries sorted nonincreasing and
// summing to zero (determinant-one normalization).
struct ChamberVector {
  Eigen::VectorXd entries;

  int dim() const { return static_cast<int>(entries.size()); }
};

struct Representation {
  std::string name;
  int dimension = 0;
  std::vector<Eigen::MatrixXd> generators;      // |det| = 1 after normalization
  std::vector<Eigen::MatrixXd> generator_invs;
  std::vector<int> det_signs;

  int rank() const { return static_cast<int>(generators.size()); }

  // Scales each generator to |det| = 1 and precomputes inverses. Throws on a
  // singular generator or a determinant further than 1e-9 from unit modulus
  // after scaling.
  static Representation make(std::string name,
                             std::vector<Eigen::MatrixXd> gens);

  const Eigen::MatrixXd& generator(words::Letter l) const {
    return l > 0 ? generators[l - 1] : generator_invs[-l - 1];
  }

  std::uint64_t content_hash() const;
};

// Entry magnitude ceiling before evaluate() reports overflow and callers
// should move to the scaled form.
constexpr double kOverflowCeiling = 1e120;

struct ScaledMatrix {
  Eigen::MatrixXd m;       // max |entry| kept near 1
  double log_scale = 0.0;  // true matrix = exp(log_scale) * m
  int det_sign = 1;        // sign of det of the true matrix
};

// Forward and inverse products of the same word. A single floating-point
// matrix does not determine its small spectral values once the condition
// number passes 1/eps; the inverse product recovers them with full relative
// accuracy, and the middle value (n = 3) follows from the zero-sum constraint.
struct ScaledPair {
  ScaledMatrix fwd, inv;
};

Eigen::MatrixXd evaluate(const Representation& rep, const words::Word& w);
ScaledMatrix evaluate_scaled(const Representation& rep, const words::Word& w);
ScaledPair evaluate_scaled_pair(const Representation& rep, const words::Word& w);

// Single-matrix overloads are accurate up to moderate condition numbers
// (n = 2 is exact at any scale via the trace/determinant identities); the
// pair overloads are robust at all word lengths. The accumulated scale factor
// drops out of the trace-zero normalization.
ChamberVector cartan_projection(const Eigen::MatrixXd& g);
ChamberVector cartan_projection(const ScaledMatrix& g);
ChamberVector cartan_projection(const ScaledPair& g);
ChamberVector jordan_projection(const Eigen::MatrixXd& g);
ChamberVector jordan_projection(const ScaledMatrix& g);
ChamberVector jordan_projection(const ScaledPair& g);

bool is_loxodromic(const ChamberVector& lambda, double gap_tol);
bool is_loxodromic(const Eigen::MatrixXd& g, double gap_tol);

// Projective sign pattern of the real eigenvalues, ordered by decreasing
// modulus; canonical form has leading sign +1. Requires a loxodromic input.
struct HolonomySign {
  std::vector<std::int8_t> signs;

  std::string str() const;
  static HolonomySign from_str(const std::string& s);
  bool operator==(const HolonomySign& o) const { return signs == o.signs; }
};

HolonomySign holonomy_sign(const Eigen::MatrixXd& g, double gap_tol = 1e-6);
HolonomySign holonomy_sign(const ScaledMatrix& g, double gap_tol = 1e-6);
HolonomySign holonomy_sign(const ScaledPair& g, double gap_tol = 1e-6);

ChamberVector opposition_involution(const ChamberVector& x);

// (lambda_1 - lambda_3)/2; dimension must be 3.
double hilbert_length(const ChamberVector& lambda);

// Cross-ratio distance between x and y for boundary points w, z with
// w, x, y, z collinear in that order.
double hilbert_distance(const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y, const Eigen::VectorXd& z);

// Induced action on symmetric 2-tensors; maps SL2 into SO(2,1) up to
// conjugacy. Eigenvalue logs double, which is what the Hilbert-length
// cross-checks rely on.
Eigen::Matrix3d sym2(const Eigen::Matrix2d& a);

}  // namespace speclab::spectra
