#include "speclab/cone_model.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <stdexcept>
#include <unordered_set>

#include "speclab/geometry.hpp"

namespace speclab::cone {

namespace {

// 2D convex hull, monotone chain; returns indices of hull vertices.
std::vector<int> hull2d(const std::vector<Eigen::Vector2d>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    return pts[a].y() < pts[b].y();
  });
  auto cross = [&](int o, int a, int b) {
    return (pts[a].x() - pts[o].x()) * (pts[b].y() - pts[o].y()) -
           (pts[a].y() - pts[o].y()) * (pts[b].x() - pts[o].x());
  };
  if (n <= 2) return idx;
  std::vector<int> h(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], idx[i]) <= 1e-14) --k;
    h[k++] = idx[i];
  }
  int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && cross(h[k - 2], h[k - 1], idx[i]) <= 1e-14) --k;
    h[k++] = idx[i];
  }
  h.resize(k - 1);
  if (h.size() < 2) {  // fully degenerate: keep the two sort-extremes
    return {idx.front(), idx.back()};
  }
  return h;
}

Eigen::MatrixXd extreme_rays_intrinsic(const Eigen::MatrixXd& dirs) {
  const int r = static_cast<int>(dirs.rows());
  const int N = static_cast<int>(dirs.cols());
  if (N == 0) throw std::invalid_argument("empty direction sample");
  if (r == 1 || N == 1) {
    Eigen::MatrixXd out(r, 1);
    out.col(0) = dirs.col(0).normalized();
    return out;
  }
  if (r == 2) {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (int c = 0; c < N; ++c) mean += dirs.col(c).normalized();
    mean.normalize();
    double base = std::atan2(mean.y(), mean.x());
    int lo = 0, hi = 0;
    double alo = 0, ahi = 0;
    for (int c = 0; c < N; ++c) {
      double a = std::atan2(dirs(1, c), dirs(0, c)) - base;
      while (a > M_PI) a -= 2 * M_PI;
      while (a < -M_PI) a += 2 * M_PI;
      if (a < alo) { alo = a; lo = c; }
      if (a > ahi) { ahi = a; hi = c; }
    }
    if (lo == hi) {
      Eigen::MatrixXd out(2, 1);
      out.col(0) = dirs.col(lo).normalized();
      return out;
    }
    Eigen::MatrixXd out(2, 2);
    out.col(0) = dirs.col(lo).normalized();
    out.col(1) = dirs.col(hi).normalized();
    return out;
  }
  if (r == 3) {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int c = 0; c < N; ++c) mean += dirs.col(c).normalized();
    mean.normalize();
    Eigen::Vector3d t1 = mean.unitOrthogonal();
    Eigen::Vector3d t2 = mean.cross(t1);
    std::vector<Eigen::Vector2d> pts(N);
    for (int c = 0; c < N; ++c) {
      Eigen::Vector3d u = dirs.col(c);
      double h = u.dot(mean);
      if (h <= 1e-9 * u.norm())
        throw std::invalid_argument("direction sample is not salient");
      Eigen::Vector3d p = u / h - mean;  // radial slice through mean
      pts[c] = Eigen::Vector2d(p.dot(t1), p.dot(t2));
    }
    auto hull = hull2d(pts);
    Eigen::MatrixXd out(3, hull.size());
    for (std::size_t i = 0; i < hull.size(); ++i)
      out.col(i) = dirs.col(hull[i]).normalized();
    return out;
  }
  return geometry::extreme_rays(dirs);
}

}  // namespace

LimitConeEstimate estimate_limit_cone(const sample::SpectrumSample& s,
                                      int min_length) {
  const int D = s.prod.total_dim();
  Eigen::MatrixXd basis = s.prod.chamber_basis();
  std::vector<Eigen::VectorXd> dirs;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < s.class_count(); ++i) {
    if (static_cast<int>(s.class_word(i).size()) < min_length) continue;
    if (!s.class_all_lox(i)) continue;
    Eigen::VectorXd lam = s.class_lambda_vec(i);
    double n = lam.norm();
    if (n <= 0) continue;
    lam /= n;
    std::string key;
    key.reserve(8 * D);
    for (int j = 0; j < D; ++j) {
      long q = std::lround(lam[j] * 2e4);
      key.append(reinterpret_cast<const char*>(&q), sizeof(q));
    }
    if (seen.insert(std::move(key)).second) dirs.push_back(lam);
  }
  if (dirs.empty())
    throw std::invalid_argument("no loxodromic classes above min_length");
  LimitConeEstimate est;
  est.basis = basis;
  est.min_length = min_length;
  est.directions.resize(D, dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) est.directions.col(i) = dirs[i];
  Eigen::MatrixXd intr = basis.transpose() * est.directions;
  Eigen::MatrixXd hull_i = extreme_rays_intrinsic(intr);
  est.hull_rays.resize(D, hull_i.cols());
  for (int c = 0; c < hull_i.cols(); ++c)
    est.hull_rays.col(c) = (basis * hull_i.col(c)).normalized();
  return est;
}

LimitConeEstimate cone_from_rays(const Eigen::MatrixXd& rays,
                                 const Eigen::MatrixXd& basis) {
  LimitConeEstimate est;
  est.basis = basis;
  est.directions = rays;
  for (int c = 0; c < est.directions.cols(); ++c)
    est.directions.col(c).normalize();
  Eigen::MatrixXd intr = basis.transpose() * est.directions;
  Eigen::MatrixXd hull_i = extreme_rays_intrinsic(intr);
  est.hull_rays.resize(rays.rows(), hull_i.cols());
  for (int c = 0; c < hull_i.cols(); ++c)
    est.hull_rays.col(c) = (basis * hull_i.col(c)).normalized();
  return est;
}

LimitConeEstimate cone_from_rays(const Eigen::MatrixXd& rays) {
  return cone_from_rays(
      rays, Eigen::MatrixXd::Identity(rays.rows(), rays.rows()));
}

long directional_count(const sample::SpectrumSample& s,
                       const Eigen::VectorXd& direction, double aperture,
                       double T, Projection proj) {
  if (!(aperture > 0)) throw std::invalid_argument("aperture must be positive");
  Eigen::VectorXd d = direction.normalized();
  const double ca = std::cos(std::min(aperture, M_PI));
  const bool everything = aperture >= M_PI;
  const int D = s.prod.total_dim();
  const std::size_t n =
      proj == Projection::jordan ? s.class_count() : s.elem_count();
  const double* data =
      proj == Projection::jordan ? s.class_lambda.data() : s.elem_mu.data();
  long count = 0;
#pragma omp parallel for reduction(+ : count) schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Map<const Eigen::VectorXd> v(data + i * D, D);
    double nv = v.norm();
    if (nv <= 0 || nv > T) continue;
    if (everything || v.dot(d) > ca * nv) ++count;
  }
  return count;
}

namespace {

struct SlopeData {
  std::vector<double> values;  // sorted
};

double regression_slope(const SlopeData& sd, Window window) {
  if (sd.values.size() < 8)
    throw std::invalid_argument("insufficient data for growth regression");
  double tmax = sd.values.back();
  double tlo, thi;
  if (window.automatic) {
    tlo = tmax / 2;
    if (sd.values.size() >= 30) tlo = std::max(tlo, sd.values[29]);
    thi = tmax;
  } else {
    tlo = window.tmin;
    thi = window.tmax;
  }
  if (!(thi > tlo))
    throw std::invalid_argument("empty regression window");
  const int G = 16;
  std::vector<double> ts, ls;
  for (int j = 0; j < G; ++j) {
    double T = tlo + (thi - tlo) * j / (G - 1);
    auto it = std::upper_bound(sd.values.begin(), sd.values.end(), T);
    long N = it - sd.values.begin();
    if (N <= 0) continue;
    ts.push_back(T);
    ls.push_back(std::log(static_cast<double>(N)));
  }
  if (ts.size() < 4)
    throw std::invalid_argument("regression window has too few populated points");
  double mt = 0, ml = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    ml += ls[i];
  }
  mt /= ts.size();
  ml /= ts.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - mt) * (ls[i] - ml);
    den += (ts[i] - mt) * (ts[i] - mt);
  }
  if (den <= 0) throw std::invalid_argument("degenerate regression window");
  return num / den;
}

}  // namespace

double estimate_growth_indicator(const sample::SpectrumSample& s,
                                 const Eigen::VectorXd& direction,
                                 double aperture, Window window) {
  Eigen::VectorXd d = direction.normalized();
  const double ca = std::cos(std::min(aperture, M_PI));
  const int D = s.prod.total_dim();
  SlopeData sd;
  for (std::size_t i = 0; i < s.class_count(); ++i) {
    Eigen::Map<const Eigen::VectorXd> v(s.class_lambda.data() + i * D, D);
    double nv = v.norm();
    if (nv <= 0) continue;
    if (v.dot(d) > ca * nv) sd.values.push_back(nv);
  }
  std::sort(sd.values.begin(), sd.values.end());
  return regression_slope(sd, window);
}

double estimate_delta(const sample::SpectrumSample& s,
                      const LinearFunctional& psi, Projection proj,
                      Window window) {
  const int D = s.prod.total_dim();
  const std::size_t n =
      proj == Projection::jordan ? s.class_count() : s.elem_count();
  const double* data =
      proj == Projection::jordan ? s.class_lambda.data() : s.elem_mu.data();
  SlopeData sd;
  sd.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Map<const Eigen::VectorXd> v(data + i * D, D);
    if (v.norm() <= 0) continue;  // trivial element sits at the apex
    double t = psi.coeffs.dot(v);
    if (t <= 0)
      throw std::invalid_argument(
          "functional is nonpositive on a sample entry; properness violated");
    sd.values.push_back(t);
  }
  std::sort(sd.values.begin(), sd.values.end());
  return regression_slope(sd, window);
}

double GrowthIndicatorEstimate::operator()(const Eigen::VectorXd& w) const {
  double n = w.norm();
  if (n <= 0) return 0;
  return n * estimate_growth_indicator(*samples, w / n, aperture, window);
}

LinearFunctional tangent_form_of(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& v, const Eigen::MatrixXd& basis, double step) {
  Eigen::VectorXd vhat = v.normalized();
  // orthonormal tangent directions inside span(basis)
  Eigen::MatrixXd proj =
      basis * basis.transpose() -
      vhat * vhat.transpose();  // assumes vhat in span(basis)
  Eigen::MatrixXd tang = geometry::column_space(proj, 1e-9);
  double fv = f(vhat);
  Eigen::VectorXd g = fv * vhat;
  for (int j = 0; j < tang.cols(); ++j) {
    double fp = f((vhat + step * tang.col(j)).eval());
    double fm = f((vhat - step * tang.col(j)).eval());
    g += ((fp - fm) / (2 * step)) * tang.col(j);
  }
  return LinearFunctional{g};
}

LinearFunctional estimate_tangent_form(const GrowthIndicatorEstimate& gi,
                                       const Eigen::VectorXd& v,
                                       const Eigen::MatrixXd& basis,
                                       double step) {
  return tangent_form_of([&gi](const Eigen::VectorXd& w) { return gi(w); }, v,
                         basis, step);
}

bool check_properness(const LinearMapPhi& phi, const LimitConeEstimate& cone,
                      double tol) {
  return geometry::min_phi_ratio_on_cone(phi.rows, cone.hull_rays) > tol;
}

std::string cone_report(const sample::SpectrumSample& s,
                        const LimitConeEstimate& cone,
                        const std::vector<LinearFunctional>& functionals,
                        double aperture) {
  nlohmann::json j;
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  j["min_length"] = cone.min_length;
  j["direction_count"] = cone.directions.cols();
  for (int c = 0; c < cone.hull_rays.cols(); ++c)
    j["hull_rays"].push_back(vec(cone.hull_rays.col(c)));
  GrowthIndicatorEstimate gi{&s, aperture, Window{}, Projection::jordan};
  // growth indicator on hull rays and pairwise midpoints
  std::vector<Eigen::VectorXd> grid;
  for (int c = 0; c < cone.hull_rays.cols(); ++c)
    grid.push_back(cone.hull_rays.col(c));
  for (int a = 0; a < cone.hull_rays.cols(); ++a)
    for (int b = a + 1; b < cone.hull_rays.cols(); ++b)
      grid.push_back((cone.hull_rays.col(a) + cone.hull_rays.col(b)).normalized());
  for (const auto& dir : grid) {
    nlohmann::json row;
    row["direction"] = vec(dir);
    try {
      row["psi_hat"] = gi(dir);
    } catch (const std::exception& e) {
      row["psi_hat"] = nullptr;
      row["error"] = e.what();
    }
    j["growth_indicator"].push_back(row);
  }
  for (const auto& f : functionals) {
    nlohmann::json row;
    row["coeffs"] = vec(f.coeffs);
    try {
      row["delta_hat"] = estimate_delta(s, f, Projection::cartan, Window{});
    } catch (const std::exception& e) {
      row["delta_hat"] = nullptr;
      row["error"] = e.what();
    }
    j["delta"].push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace speclab::cone
