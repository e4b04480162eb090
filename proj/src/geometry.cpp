#include "speclab/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace speclab::geometry {

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     double tol) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  Eigen::VectorXd w = A.transpose() * (b - A * x);
  const double wtol = tol * std::max(1.0, b.norm()) * std::max(1.0, A.norm());

  for (int outer = 0; outer < 3 * n + 30; ++outer) {
    int best = -1;
    double bestw = wtol;
    for (int i = 0; i < n; ++i)
      if (!passive[i] && w[i] > bestw) {
        bestw = w[i];
        best = i;
      }
    if (best < 0) break;
    passive[best] = true;

    for (int inner = 0; inner < 3 * n + 30; ++inner) {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i)
        if (passive[i]) idx.push_back(i);
      Eigen::MatrixXd Ap(A.rows(), idx.size());
      for (size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
      Eigen::VectorXd z =
          Ap.colPivHouseholderQr().solve(b);
      bool feasible = true;
      for (int k = 0; k < z.size(); ++k)
        if (z[k] <= 0) feasible = false;
      if (feasible) {
        x.setZero();
        for (size_t k = 0; k < idx.size(); ++k) x[idx[k]] = z[k];
        break;
      }
      // Step back to the boundary of the feasible region.
      double alpha = 1.0;
      for (size_t k = 0; k < idx.size(); ++k) {
        double xi = x[idx[k]];
        if (z[k] <= 0 && xi - z[k] > 0)
          alpha = std::min(alpha, xi / (xi - z[k]));
      }
      for (size_t k = 0; k < idx.size(); ++k) {
        double xi = x[idx[k]];
        x[idx[k]] = xi + alpha * (z[k] - xi);
        if (x[idx[k]] <= tol) {
          x[idx[k]] = 0;
          passive[idx[k]] = false;
        }
      }
    }
    w = A.transpose() * (b - A * x);
  }
  return x;
}

double cone_distance(const Eigen::MatrixXd& rays, const Eigen::VectorXd& u) {
  if (rays.cols() == 0) return u.norm();
  Eigen::VectorXd t = nnls(rays, u);
  return (rays * t - u).norm();
}

Eigen::MatrixXd extreme_rays(const Eigen::MatrixXd& dirs) {
  const int m = static_cast<int>(dirs.rows());
  std::vector<int> kept;
  // Grow a generating set, then prune interior members.
  for (int c = 0; c < dirs.cols(); ++c) {
    Eigen::MatrixXd R(m, kept.size());
    for (size_t k = 0; k < kept.size(); ++k) R.col(k) = dirs.col(kept[k]);
    if (kept.empty() || cone_distance(R, dirs.col(c)) > 1e-9) kept.push_back(c);
  }
  std::vector<int> final_set = kept;
  for (size_t i = 0; i < final_set.size();) {
    Eigen::MatrixXd R(m, final_set.size() - 1);
    int col = 0;
    for (size_t k = 0; k < final_set.size(); ++k)
      if (k != i) R.col(col++) = dirs.col(final_set[k]);
    if (R.cols() > 0 && cone_distance(R, dirs.col(final_set[i])) <= 1e-9)
      final_set.erase(final_set.begin() + i);
    else
      ++i;
  }
  Eigen::MatrixXd out(m, final_set.size());
  for (size_t k = 0; k < final_set.size(); ++k)
    out.col(k) = dirs.col(final_set[k]).normalized();
  return out;
}

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& A, double tol) {
  if (A.rows() == 0)
    return Eigen::MatrixXd::Identity(A.cols(), A.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double thresh = tol * std::max<double>(1.0, sv.size() ? sv[0] : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

Eigen::MatrixXd column_space(const Eigen::MatrixXd& A, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  double thresh = tol * std::max<double>(1.0, sv.size() ? sv[0] : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++rank;
  return svd.matrixU().leftCols(rank);
}

namespace {

Eigen::VectorXd project_simplex(Eigen::VectorXd v) {
  // Euclidean projection onto { t >= 0, sum t = 1 }.
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0, theta = 0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  for (int i = 0; i < n; ++i) v[i] = std::max(0.0, v[i] - theta);
  return v;
}

}  // namespace

double min_phi_ratio_on_cone(const Eigen::MatrixXd& phi,
                             const Eigen::MatrixXd& rays) {
  const int K = static_cast<int>(rays.cols());
  if (K == 0) throw std::invalid_argument("empty cone");
  Eigen::MatrixXd PR = phi * rays;  // d x K
  double best = std::numeric_limits<double>::infinity();
  auto value = [&](const Eigen::VectorXd& t) {
    Eigen::VectorXd u = rays * t;
    double nu = u.norm();
    return nu < 1e-14 ? 0.0 : (PR * t).norm() / nu;
  };
  std::vector<Eigen::VectorXd> seeds;
  seeds.push_back(Eigen::VectorXd::Constant(K, 1.0 / K));
  for (int k = 0; k < K; ++k) seeds.push_back(Eigen::VectorXd::Unit(K, k));
  for (auto t : seeds) {
    double step = 0.5;
    double f = value(t);
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd u = rays * t;
      double nu = u.norm();
      if (nu < 1e-14) break;
      Eigen::VectorXd pu = PR * t;
      // gradient of ||phi u|| / ||u|| in t
      Eigen::VectorXd g;
      double pn = pu.norm();
      if (pn < 1e-15)
        g = Eigen::VectorXd::Zero(K);
      else
        g = (PR.transpose() * pu) / (pn * nu) -
            (pn / (nu * nu * nu)) * (rays.transpose() * u);
      Eigen::VectorXd tn = project_simplex(t - step * g);
      double fn = value(tn);
      if (fn < f - 1e-15) {
        t = tn;
        f = fn;
      } else {
        step *= 0.5;
        if (step < 1e-8) break;
      }
    }
    best = std::min(best, f);
  }
  return best;
}

namespace {

Eigen::MatrixXd dedupe_unit_columns(const Eigen::MatrixXd& in) {
  std::vector<int> keep;
  for (int c = 0; c < in.cols(); ++c) {
    bool dup = false;
    for (int k : keep)
      if (in.col(c).normalized().dot(in.col(k).normalized()) > 1.0 - 1e-12)
        dup = true;
    if (!dup) keep.push_back(c);
  }
  Eigen::MatrixXd out(in.rows(), keep.size());
  for (size_t k = 0; k < keep.size(); ++k)
    out.col(k) = in.col(keep[k]).normalized();
  return out;
}

void combinations(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k == 0) {
    f(idx);
    return;
  }
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

ConvexCone ConvexCone::from_rays(const Eigen::MatrixXd& raw_rays) {
  ConvexCone c;
  c.rays = dedupe_unit_columns(raw_rays);
  if (c.rays.cols() == 0) throw std::invalid_argument("cone needs rays");
  c.span_basis = column_space(c.rays);
  const int s = c.span_dim();
  const int K = static_cast<int>(c.rays.cols());
  Eigen::MatrixXd R = c.span_basis.transpose() * c.rays;  // s x K

  std::vector<Eigen::VectorXd> normals;
  auto try_normal = [&](Eigen::VectorXd n) {
    n.normalize();
    double mx = (n.transpose() * R).maxCoeff();
    if (mx > 1e-10) {
      n = -n;
      mx = (n.transpose() * R).maxCoeff();
    }
    if (mx > 1e-10) return;  // rays on both sides, not a facet
    for (const auto& m : normals)
      if (m.dot(n) > 1.0 - 1e-10) return;
    normals.push_back(n);
  };

  if (s == 1) {
    try_normal(-Eigen::VectorXd::Ones(1) * (R(0, 0) > 0 ? 1.0 : -1.0));
  } else {
    double combos = 1;
    for (int i = 0; i < s - 1; ++i) combos *= (K - i) / double(i + 1);
    if (combos > 300000)
      throw std::runtime_error("cone facet enumeration too large");
    combinations(K, s - 1, [&](const std::vector<int>& idx) {
      Eigen::MatrixXd sub(s - 1, s);
      for (size_t r = 0; r < idx.size(); ++r) sub.row(r) = R.col(idx[r]).transpose();
      Eigen::MatrixXd ns = nullspace(sub, 1e-9);
      if (ns.cols() != 1) return;
      try_normal(ns.col(0));
    });
  }
  c.facets.resize(normals.size(), s);
  for (size_t i = 0; i < normals.size(); ++i)
    c.facets.row(i) = normals[i].transpose();
  return c;
}

double ConvexCone::signed_distance(const Eigen::VectorXd& u) const {
  Eigen::VectorXd y = span_basis.transpose() * u;
  double off = (u - span_basis * y).norm();
  double margin = -std::numeric_limits<double>::infinity();
  if (facets.rows() > 0) margin = (facets * y).maxCoeff();
  if (off > 0) margin = std::max(margin, off);
  return margin;
}

bool ConvexCone::contains(const Eigen::VectorXd& u, double tol) const {
  return signed_distance(u) <= tol * std::max(1.0, u.norm());
}

ConvexCone ConvexCone::dilated(double factor) const {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(rays.rows());
  for (int c = 0; c < rays.cols(); ++c) mean += rays.col(c);
  mean.normalize();
  Eigen::MatrixXd out = rays;
  for (int c = 0; c < rays.cols(); ++c) {
    Eigen::VectorXd r = rays.col(c) + factor * (rays.col(c) - mean);
    out.col(c) = r.normalized();
  }
  return from_rays(out);
}

Polytope Polytope::point() {
  Polytope p;
  p.dim = 0;
  p.vertices = Eigen::MatrixXd::Zero(0, 1);
  p.A = Eigen::MatrixXd::Zero(0, 0);
  p.b = Eigen::VectorXd::Zero(0);
  return p;
}

Polytope Polytope::interval(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("empty interval");
  Polytope p;
  p.dim = 1;
  p.vertices.resize(1, 2);
  p.vertices << lo, hi;
  p.A.resize(2, 1);
  p.A << 1, -1;
  p.b.resize(2);
  p.b << hi, -lo;
  return p;
}

Polytope Polytope::from_inequalities(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& b) {
  Polytope p;
  p.dim = static_cast<int>(A.cols());
  p.A = A;
  p.b = b;
  // Unit-normalize rows so margins are distances.
  for (int i = 0; i < p.A.rows(); ++i) {
    double n = p.A.row(i).norm();
    if (n < 1e-14) throw std::invalid_argument("zero facet row");
    p.A.row(i) /= n;
    p.b[i] /= n;
  }
  if (p.dim == 0) {
    p.vertices = Eigen::MatrixXd::Zero(0, 1);
    return p;
  }
  if (p.dim == 1) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p.A.rows(); ++i) {
      double a = p.A(i, 0);
      if (a > 0) hi = std::min(hi, p.b[i] / a);
      else if (a < 0) lo = std::max(lo, p.b[i] / a);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi + 1e-12)
      throw std::invalid_argument("interval from inequalities empty or unbounded");
    hi = std::max(hi, lo);
    p.vertices.resize(1, 2);
    p.vertices << lo, hi;
    return p;
  }
  if (p.dim != 2)
    throw std::invalid_argument("polytope vertex enumeration supports dim <= 2");
  std::vector<Eigen::Vector2d> verts;
  const int F = static_cast<int>(p.A.rows());
  for (int i = 0; i < F; ++i)
    for (int j = i + 1; j < F; ++j) {
      Eigen::Matrix2d M;
      M.row(0) = p.A.row(i);
      M.row(1) = p.A.row(j);
      if (std::abs(M.determinant()) < 1e-12) continue;
      Eigen::Vector2d x = M.inverse() * Eigen::Vector2d(p.b[i], p.b[j]);
      if (((p.A * x - p.b).array() <= 1e-9).all()) {
        bool dup = false;
        for (const auto& v : verts)
          if ((v - x).norm() < 1e-9) dup = true;
        if (!dup) verts.push_back(x);
      }
    }
  if (verts.size() < 3)
    throw std::invalid_argument("polygon from inequalities degenerate");
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& v : verts) c += v;
  c /= verts.size();
  std::sort(verts.begin(), verts.end(),
            [&](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
              return std::atan2(u.y() - c.y(), u.x() - c.x()) <
                     std::atan2(v.y() - c.y(), v.x() - c.x());
            });
  p.vertices.resize(2, verts.size());
  for (size_t k = 0; k < verts.size(); ++k) p.vertices.col(k) = verts[k];
  return p;
}

bool Polytope::contains(const Eigen::VectorXd& x, double tol) const {
  if (dim == 0) return true;
  return ((A * x - b).array() <= tol).all();
}

double Polytope::signed_distance(const Eigen::VectorXd& x) const {
  if (dim == 0) return -std::numeric_limits<double>::infinity();
  return (A * x - b).maxCoeff();
}

double Polytope::volume() const {
  if (dim == 0) return 1.0;
  if (dim == 1) return vertices(0, 1) - vertices(0, 0);
  double s = 0;
  const int V = static_cast<int>(vertices.cols());
  for (int i = 0; i < V; ++i) {
    auto a = vertices.col(i);
    auto b2 = vertices.col((i + 1) % V);
    s += a.x() * b2.y() - b2.x() * a.y();
  }
  return 0.5 * std::abs(s);
}

Eigen::VectorXd Polytope::centroid() const {
  if (dim == 0) return Eigen::VectorXd::Zero(0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < vertices.cols(); ++i) c += vertices.col(i);
  return c / vertices.cols();
}

double Polytope::ray_exit(const Eigen::VectorXd& d) const {
  if (dim == 0) return std::numeric_limits<double>::infinity();
  double s = std::numeric_limits<double>::infinity();
  Eigen::VectorXd ad = A * d;
  for (int i = 0; i < A.rows(); ++i)
    if (ad[i] > 1e-14) s = std::min(s, b[i] / ad[i]);
  return s;
}

Eigen::VectorXd Polytope::bounding_box_lo() const {
  if (dim == 0) return Eigen::VectorXd::Zero(0);
  return vertices.rowwise().minCoeff();
}

Eigen::VectorXd Polytope::bounding_box_hi() const {
  if (dim == 0) return Eigen::VectorXd::Zero(0);
  return vertices.rowwise().maxCoeff();
}

Quadrature gauss_legendre(int n) {
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

Quadrature gauss_hermite(int n) {
  // Golub-Welsch on the Jacobi matrix for the exp(-x^2) weight.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double v = std::sqrt(i / 2.0);
    J(i, i - 1) = v;
    J(i - 1, i) = v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Quadrature q;
  q.nodes = es.eigenvalues();
  q.weights.resize(n);
  const double mu0 = std::sqrt(M_PI);
  for (int i = 0; i < n; ++i) {
    double v = es.eigenvectors()(0, i);
    q.weights[i] = mu0 * v * v;
  }
  return q;
}

double integrate_polytope(const Polytope& p,
                          const std::function<double(const Eigen::VectorXd&)>& f,
                          int points_per_dim,
                          const std::vector<double>& breakpoints) {
  if (p.dim == 0) return f(Eigen::VectorXd::Zero(0));
  Quadrature gl = gauss_legendre(points_per_dim);
  if (p.dim == 1) {
    double lo = p.vertices(0, 0), hi = p.vertices(0, 1);
    std::vector<double> cuts{lo, hi};
    for (double c : breakpoints)
      if (c > lo + 1e-14 && c < hi - 1e-14) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double total = 0;
    Eigen::VectorXd x(1);
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
      double a = cuts[k], b2 = cuts[k + 1], h = 0.5 * (b2 - a);
      if (h <= 0) continue;
      double mid = 0.5 * (a + b2), acc = 0;
      for (int i = 0; i < gl.nodes.size(); ++i) {
        x[0] = mid + h * gl.nodes[i];
        acc += gl.weights[i] * f(x);
      }
      total += acc * h;
    }
    return total;
  }
  if (p.dim != 2)
    throw std::invalid_argument("integrate_polytope supports dim <= 2");
  Eigen::VectorXd c = p.centroid();
  double total = 0;
  const int V = static_cast<int>(p.vertices.cols());
  Eigen::VectorXd x(2);
  for (int tri = 0; tri < V; ++tri) {
    Eigen::Vector2d a = p.vertices.col(tri);
    Eigen::Vector2d b2 = p.vertices.col((tri + 1) % V);
    Eigen::Vector2d cc(c[0], c[1]);
    double two_area = std::abs((b2 - cc).x() * (a - cc).y() -
                               (a - cc).x() * (b2 - cc).y());
    if (two_area < 1e-300) continue;
    double acc = 0;
    for (int i = 0; i < gl.nodes.size(); ++i) {
      double u = 0.5 * (gl.nodes[i] + 1.0);
      for (int j = 0; j < gl.nodes.size(); ++j) {
        double v = 0.5 * (gl.nodes[j] + 1.0);
        Eigen::Vector2d pt = cc + u * ((1 - v) * (a - cc) + v * (b2 - cc));
        x[0] = pt.x();
        x[1] = pt.y();
        acc += 0.25 * gl.weights[i] * gl.weights[j] * u * f(x);
      }
    }
    total += acc * two_area;
  }
  return total;
}

}  // namespace speclab::geometry
