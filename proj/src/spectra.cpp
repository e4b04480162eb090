#include "speclab/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace speclab::spectra {

Representation Representation::make(std::string name,
                                    std::vector<Eigen::MatrixXd> gens) {
  Representation rep;
  rep.name = std::move(name);
  if (gens.empty()) throw std::invalid_argument("representation needs generators");
  rep.dimension = static_cast<int>(gens.front().rows());
  for (auto& g : gens) {
    if (g.rows() != rep.dimension || g.cols() != rep.dimension)
      throw std::invalid_argument("generator dimensions inconsistent");
    double det = g.determinant();
    if (std::abs(det) < 1e-14)
      throw std::invalid_argument("singular generator in representation");
    g /= std::pow(std::abs(det), 1.0 / rep.dimension);
    if (std::abs(std::abs(g.determinant()) - 1.0) > 1e-9)
      throw std::invalid_argument("determinant normalization failed");
    rep.det_signs.push_back(det > 0 ? 1 : -1);
    rep.generator_invs.push_back(g.inverse());
    rep.generators.push_back(std::move(g));
  }
  return rep;
}

std::uint64_t Representation::content_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  mix(name.data(), name.size());
  mix(&dimension, sizeof(dimension));
  for (const auto& g : generators)
    mix(g.data(), sizeof(double) * g.size());
  return h;
}

Eigen::MatrixXd evaluate(const Representation& rep, const words::Word& w) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(rep.dimension, rep.dimension);
  for (words::Letter l : w.letters) {
    int idx = l > 0 ? l : -l;
    if (idx > rep.rank())
      throw std::invalid_argument("word letter beyond representation rank");
    m = m * rep.generator(l);
    if (m.cwiseAbs().maxCoeff() > kOverflowCeiling)
      throw std::overflow_error(
          "matrix entries exceeded the magnitude ceiling; use evaluate_scaled");
  }
  return m;
}

ScaledMatrix evaluate_scaled(const Representation& rep, const words::Word& w) {
  ScaledMatrix sm;
  sm.m = Eigen::MatrixXd::Identity(rep.dimension, rep.dimension);
  sm.log_scale = 0.0;
  sm.det_sign = 1;
  for (words::Letter l : w.letters) {
    int idx = l > 0 ? l : -l;
    if (idx > rep.rank())
      throw std::invalid_argument("word letter beyond representation rank");
    sm.m = sm.m * rep.generator(l);
    sm.det_sign *= rep.det_signs[idx - 1];
    double peak = sm.m.cwiseAbs().maxCoeff();
    if (peak > 1e30 || (peak > 0 && peak < 1e-30)) {
      sm.m /= peak;
      sm.log_scale += std::log(peak);
    }
  }
  return sm;
}

ScaledPair evaluate_scaled_pair(const Representation& rep,
                                const words::Word& w) {
  ScaledPair p;
  const int n = rep.dimension;
  p.fwd.m = Eigen::MatrixXd::Identity(n, n);
  p.inv.m = Eigen::MatrixXd::Identity(n, n);
  for (words::Letter l : w.letters) {
    int idx = l > 0 ? l : -l;
    if (idx > rep.rank())
      throw std::invalid_argument("word letter beyond representation rank");
    p.fwd.m = p.fwd.m * rep.generator(l);
    p.inv.m = rep.generator(words::inverse(l)) * p.inv.m;
    p.fwd.det_sign *= rep.det_signs[idx - 1];
    for (auto* sm : {&p.fwd, &p.inv}) {
      double peak = sm->m.cwiseAbs().maxCoeff();
      if (peak > 1e30 || (peak > 0 && peak < 1e-30)) {
        sm->m /= peak;
        sm->log_scale += std::log(peak);
      }
    }
  }
  p.inv.det_sign = p.fwd.det_sign;
  return p;
}

namespace {

Eigen::VectorXd centered_sorted_desc(Eigen::VectorXd logs) {
  logs.array() -= logs.mean();
  std::sort(logs.data(), logs.data() + logs.size(), std::greater<double>());
  return logs;
}

Eigen::Matrix3d adjugate3(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d a;
  a(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  a(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  a(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  a(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  a(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  a(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  a(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  a(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  a(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return a;
}

double top_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

std::complex<double> top_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue solver failed");
  int best = 0;
  for (int i = 1; i < m.rows(); ++i)
    if (std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[best]))
      best = i;
  return es.eigenvalues()[best];
}

// Log singular values of m * exp(s) assuming |det| = 1 for the true matrix.
Eigen::VectorXd singular_logs(const Eigen::MatrixXd& m, double s) {
  const int n = static_cast<int>(m.rows());
  double top = top_singular_value(m);
  if (!(top > 0))
    throw std::invalid_argument("cartan projection of a singular matrix");
  if (n == 1) return Eigen::VectorXd::Zero(1);
  if (n == 2) {
    double l = std::log(top) + s;
    Eigen::Vector2d out(l, -l);
    return out;
  }
  if (n == 3) {
    double l1 = std::log(top) + s;
    double l3 = -(std::log(top_singular_value(adjugate3(m))) + 2 * s);
    double l2 = -l1 - l3;
    return centered_sorted_desc(Eigen::Vector3d(l1, l2, l3));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  Eigen::VectorXd sv = svd.singularValues();
  if (sv.minCoeff() <= 0.0)
    throw std::invalid_argument("cartan projection of a singular matrix");
  return centered_sorted_desc(sv.array().log());
}

// Log eigenvalue moduli under the same conventions.
Eigen::VectorXd eigen_logs(const Eigen::MatrixXd& m, double s, int det_sign) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return Eigen::VectorXd::Zero(1);
  if (n == 2) {
    double t = m.trace();
    double d = det_sign * std::exp(-2 * s);  // det of the scaled matrix
    double disc = t * t - 4 * d;
    if (disc <= 0) return Eigen::Vector2d::Zero();  // elliptic, moduli equal
    double topmod = 0.5 * (std::abs(t) + std::sqrt(disc));
    if (!(topmod > 0))
      throw std::invalid_argument("jordan projection of a singular matrix");
    double l = std::log(topmod) + s;
    if (l < 0) l = 0;  // |lambda_1| >= 1 when |det| = 1
    return Eigen::Vector2d(l, -l);
  }
  if (n == 3) {
    double topmod = std::abs(top_eigenvalue(m));
    if (!(topmod > 0))
      throw std::invalid_argument("jordan projection of a singular matrix");
    double l1 = std::log(topmod) + s;
    double l3 = -(std::log(std::abs(top_eigenvalue(adjugate3(m)))) + 2 * s);
    double l2 = -l1 - l3;
    return centered_sorted_desc(Eigen::Vector3d(l1, l2, l3));
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue solver failed");
  Eigen::VectorXd logs(n);
  for (int i = 0; i < n; ++i) {
    double mod = std::abs(es.eigenvalues()[i]);
    if (mod <= 0.0)
      throw std::invalid_argument("jordan projection of a singular matrix");
    logs[i] = std::log(mod);
  }
  logs = centered_sorted_desc(logs);
  // Average near-ties; only non-loxodromic inputs are affected.
  int i = 0;
  while (i < logs.size()) {
    int j = i;
    while (j + 1 < logs.size() && logs[i] - logs[j + 1] < 1e-12) ++j;
    if (j > i) {
      double avg = logs.segment(i, j - i + 1).mean();
      for (int k = i; k <= j; ++k) logs[k] = avg;
    }
    i = j + 1;
  }
  return logs;
}

// Express a general invertible matrix as (scaled unit-determinant, log offset).
ScaledMatrix normalize_det(const Eigen::MatrixXd& g) {
  double det = g.determinant();
  if (det == 0.0 || !std::isfinite(det))
    throw std::invalid_argument("projection of a singular matrix");
  ScaledMatrix sm;
  sm.m = g;
  sm.log_scale = -std::log(std::abs(det)) / g.rows();
  sm.det_sign = det > 0 ? 1 : -1;
  return sm;
}

}  // namespace

ChamberVector cartan_projection(const ScaledMatrix& g) {
  return ChamberVector{singular_logs(g.m, g.log_scale)};
}

ChamberVector cartan_projection(const Eigen::MatrixXd& g) {
  return cartan_projection(normalize_det(g));
}

ChamberVector jordan_projection(const ScaledMatrix& g) {
  return ChamberVector{eigen_logs(g.m, g.log_scale, g.det_sign)};
}

ChamberVector jordan_projection(const Eigen::MatrixXd& g) {
  return jordan_projection(normalize_det(g));
}

namespace {

Eigen::VectorXd combine_end_logs(double l_top, double l_bot, int n) {
  if (n == 2) {
    double l = 0.5 * (l_top - l_bot);
    return Eigen::Vector2d(l, -l);
  }
  return centered_sorted_desc(Eigen::Vector3d(l_top, -l_top - l_bot, l_bot));
}

}  // namespace

ChamberVector cartan_projection(const ScaledPair& g) {
  const int n = static_cast<int>(g.fwd.m.rows());
  if (n == 1) return ChamberVector{Eigen::VectorXd::Zero(1)};
  double l1 = std::log(top_singular_value(g.fwd.m)) + g.fwd.log_scale;
  double ln = -(std::log(top_singular_value(g.inv.m)) + g.inv.log_scale);
  if (n <= 3) return ChamberVector{combine_end_logs(l1, ln, n)};
  Eigen::JacobiSVD<Eigen::MatrixXd> f(g.fwd.m), b(g.inv.m);
  Eigen::VectorXd logs(n);
  const int kf = (n + 1) / 2;
  for (int j = 0; j < kf; ++j)
    logs[j] = std::log(f.singularValues()[j]) + g.fwd.log_scale;
  for (int j = 0; j < n - kf; ++j)
    logs[n - 1 - j] = -(std::log(b.singularValues()[j]) + g.inv.log_scale);
  return ChamberVector{centered_sorted_desc(logs)};
}

ChamberVector jordan_projection(const ScaledPair& g) {
  const int n = static_cast<int>(g.fwd.m.rows());
  if (n == 1) return ChamberVector{Eigen::VectorXd::Zero(1)};
  if (n == 2)
    return ChamberVector{eigen_logs(g.fwd.m, g.fwd.log_scale, g.fwd.det_sign)};
  if (n == 3) {
    double l1 = std::log(std::abs(top_eigenvalue(g.fwd.m))) + g.fwd.log_scale;
    double ln = -(std::log(std::abs(top_eigenvalue(g.inv.m))) + g.inv.log_scale);
    return ChamberVector{combine_end_logs(l1, ln, 3)};
  }
  Eigen::EigenSolver<Eigen::MatrixXd> ef(g.fwd.m, false), eb(g.inv.m, false);
  if (ef.info() != Eigen::Success || eb.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue solver failed");
  Eigen::VectorXd lf = ef.eigenvalues().cwiseAbs().array().log();
  Eigen::VectorXd lb = eb.eigenvalues().cwiseAbs().array().log();
  std::sort(lf.data(), lf.data() + n, std::greater<double>());
  std::sort(lb.data(), lb.data() + n, std::greater<double>());
  Eigen::VectorXd logs(n);
  const int kf = (n + 1) / 2;
  for (int j = 0; j < kf; ++j) logs[j] = lf[j] + g.fwd.log_scale;
  for (int j = 0; j < n - kf; ++j)
    logs[n - 1 - j] = -(lb[j] + g.inv.log_scale);
  return ChamberVector{centered_sorted_desc(logs)};
}

bool is_loxodromic(const ChamberVector& lambda, double gap_tol) {
  for (int i = 0; i + 1 < lambda.dim(); ++i)
    if (lambda.entries[i] - lambda.entries[i + 1] <= gap_tol) return false;
  return true;
}

bool is_loxodromic(const Eigen::MatrixXd& g, double gap_tol) {
  return is_loxodromic(jordan_projection(g), gap_tol);
}

std::string HolonomySign::str() const {
  std::string s;
  for (auto v : signs) s += (v > 0 ? '+' : '-');
  return s;
}

HolonomySign HolonomySign::from_str(const std::string& s) {
  HolonomySign h;
  for (char c : s) {
    if (c == '+')
      h.signs.push_back(1);
    else if (c == '-')
      h.signs.push_back(-1);
    else
      throw std::invalid_argument("holonomy pattern must be + and - only");
  }
  return h;
}

namespace {

HolonomySign canonicalize(std::vector<std::int8_t> signs) {
  if (!signs.empty() && signs.front() < 0)
    for (auto& s : signs) s = -s;
  return HolonomySign{std::move(signs)};
}

std::int8_t real_sign(const std::complex<double>& ev, double gap_tol) {
  if (std::abs(ev.imag()) > gap_tol * std::max(1.0, std::abs(ev)))
    throw std::invalid_argument(
        "non-real eigenvalue; holonomy sign needs a loxodromic matrix");
  return ev.real() >= 0 ? 1 : -1;
}

}  // namespace

HolonomySign holonomy_sign(const ScaledMatrix& g, double gap_tol) {
  const int n = static_cast<int>(g.m.rows());
  // Small-eigenvalue signs come from determinant identities, which stay exact
  // at any condition number.
  if (n == 2) {
    double t = g.m.trace();
    double d = g.det_sign * std::exp(-2 * g.log_scale);
    if (t * t - 4 * d <= gap_tol * gap_tol)
      throw std::invalid_argument(
          "non-real or parabolic element; holonomy sign needs a loxodromic matrix");
    std::int8_t s1 = t >= 0 ? 1 : -1;
    return canonicalize({s1, static_cast<std::int8_t>(g.det_sign * s1)});
  }
  if (n == 3) {
    std::int8_t s1 = real_sign(top_eigenvalue(g.m), gap_tol);
    std::int8_t s3 = static_cast<std::int8_t>(
        g.det_sign * real_sign(top_eigenvalue(adjugate3(g.m)), gap_tol));
    std::int8_t s2 = static_cast<std::int8_t>(g.det_sign * s1 * s3);
    return canonicalize({s1, s2, s3});
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(g.m, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue solver failed");
  std::vector<std::pair<double, std::int8_t>> eigs(n);
  for (int i = 0; i < n; ++i) {
    auto ev = es.eigenvalues()[i];
    eigs[i] = {std::abs(ev), real_sign(ev, gap_tol)};
  }
  std::sort(eigs.begin(), eigs.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::int8_t> signs;
  signs.reserve(n);
  for (const auto& [mod, sg] : eigs) signs.push_back(sg);
  return canonicalize(std::move(signs));
}

HolonomySign holonomy_sign(const Eigen::MatrixXd& g, double gap_tol) {
  return holonomy_sign(normalize_det(g), gap_tol);
}

HolonomySign holonomy_sign(const ScaledPair& g, double gap_tol) {
  const int n = static_cast<int>(g.fwd.m.rows());
  if (n != 3) return holonomy_sign(g.fwd, gap_tol);
  std::int8_t s1 = real_sign(top_eigenvalue(g.fwd.m), gap_tol);
  std::int8_t s3 = real_sign(top_eigenvalue(g.inv.m), gap_tol);
  std::int8_t s2 = static_cast<std::int8_t>(g.fwd.det_sign * s1 * s3);
  return canonicalize({s1, s2, s3});
}

ChamberVector opposition_involution(const ChamberVector& x) {
  ChamberVector out;
  out.entries = -x.entries.reverse();
  return out;
}

double hilbert_length(const ChamberVector& lambda) {
  if (lambda.dim() != 3)
    throw std::invalid_argument("hilbert_length expects dimension 3");
  return 0.5 * (lambda.entries[0] - lambda.entries[2]);
}

double hilbert_distance(const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
  if ((x - y).norm() == 0.0) return 0.0;
  double wx = (w - x).norm(), yz = (y - z).norm();
  double wy = (w - y).norm(), xz = (x - z).norm();
  if (wx == 0.0 || yz == 0.0)
    throw std::invalid_argument("degenerate hilbert distance configuration");
  // Collinearity and ordering: x and y must sit between w and z.
  Eigen::VectorXd axis = z - w;
  double len = axis.norm();
  if (len == 0.0) throw std::invalid_argument("boundary points coincide");
  axis /= len;
  double tx = axis.dot(x - w), ty = axis.dot(y - w);
  auto off_axis = [&](const Eigen::VectorXd& p, double t) {
    return ((p - w) - t * axis).norm() > 1e-9 * std::max(1.0, len);
  };
  if (off_axis(x, tx) || off_axis(y, ty))
    throw std::invalid_argument("hilbert distance points are not collinear");
  if (!(tx > -1e-12 && ty >= tx && ty < len + 1e-12))
    throw std::invalid_argument("hilbert distance points out of order");
  return 0.5 * std::log((wy * xz) / (wx * yz));
}

Eigen::Matrix3d sym2(const Eigen::Matrix2d& m) {
  double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  Eigen::Matrix3d s;
  s << a * a, a * b, b * b,
      2 * a * c, a * d + b * c, 2 * b * d,
      c * c, c * d, d * d;
  return s;
}

}  // namespace speclab::spectra
