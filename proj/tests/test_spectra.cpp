#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "speclab/spectra.hpp"
#include "test_util.hpp"

using namespace speclab;
using namespace speclab::spectra;
using Eigen::MatrixXd;
using Eigen::Matrix2d;
using Eigen::VectorXd;

namespace {

Representation sl2_pair() {
  Matrix2d a, b;
  a << 3, 0, 0, 1.0 / 3;
  b << std::cosh(1.4), std::sinh(1.4), std::sinh(1.4), std::cosh(1.4);
  return Representation::make("sl2", {a, b});
}

VectorXd chamber3(double x, double y, double z) {
  VectorXd v(3);
  v << x, y, z;
  return v;
}

}  // namespace

TEST_CASE("evaluate basics") {
  auto rep = sl2_pair();
  words::Word empty;
  CHECK(evaluate(rep, empty).isApprox(MatrixXd::Identity(2, 2)));
  words::Word a{{1}};
  CHECK(evaluate(rep, a).isApprox(rep.generators[0]));
  words::Word aa_inv{{1, -1}};
  CHECK((evaluate(rep, aa_inv) - MatrixXd::Identity(2, 2)).norm() < 1e-12);

  words::Word bad{{3}};
  CHECK_THROWS(evaluate(rep, bad));
}

TEST_CASE("scaled evaluation agrees and survives long words") {
  auto rep = sl2_pair();
  auto g = testutil::rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto w = testutil::random_reduced_word(g, 2, 6);
    auto plain = evaluate(rep, w);
    auto scaled = evaluate_scaled(rep, w);
    CHECK((scaled.m * std::exp(scaled.log_scale) - plain).norm() <
          1e-9 * plain.norm());
  }
  // 400 letters of the diagonal generator would overflow the plain path.
  words::Word longw;
  longw.letters.assign(400, 1);
  CHECK_THROWS_AS(evaluate(rep, longw), std::overflow_error);
  auto sm = evaluate_scaled(rep, longw);
  auto mu = cartan_projection(sm);
  CHECK(std::abs(mu.entries[0] - 400 * std::log(3.0)) < 1e-6 * 400);
  auto lam = jordan_projection(sm);
  CHECK(std::abs(lam.entries[0] - 400 * std::log(3.0)) < 1e-6 * 400);
}

TEST_CASE("cartan projection") {
  CHECK(cartan_projection(MatrixXd::Identity(3, 3)).entries.norm() < 1e-12);

  MatrixXd d = Eigen::Vector3d(3, 1, 1.0 / 3).asDiagonal();
  auto mu = cartan_projection(d);
  CHECK(std::abs(mu.entries[0] - std::log(3.0)) < 1e-12);
  CHECK(std::abs(mu.entries[1]) < 1e-12);
  CHECK(std::abs(mu.entries[2] + std::log(3.0)) < 1e-12);

  auto g = testutil::rng(7);
  auto q = testutil::random_orthogonal(g, 3);
  CHECK(cartan_projection(q).entries.norm() < 1e-10);
}

TEST_CASE("jordan projection") {
  CHECK(jordan_projection(MatrixXd::Identity(3, 3)).entries.norm() < 1e-12);

  MatrixXd d = Eigen::Vector3d(2, 1, 0.5).asDiagonal();
  auto lam = jordan_projection(d);
  CHECK(std::abs(lam.entries[0] - std::log(2.0)) < 1e-12);
  CHECK(std::abs(lam.entries[2] + std::log(2.0)) < 1e-12);

  MatrixXd u = MatrixXd::Identity(3, 3);
  u(0, 1) = 5;
  u(1, 2) = -2;
  CHECK(jordan_projection(u).entries.norm() < 1e-10);
}

TEST_CASE("loxodromic predicate") {
  MatrixXd d = Eigen::Vector3d(2, 1, 0.5).asDiagonal();
  CHECK(is_loxodromic(d, 0.1));
  CHECK_FALSE(is_loxodromic(MatrixXd::Identity(3, 3), 1e-6));
  double nearly = 2.0001;
  MatrixXd d2 = Eigen::Vector3d(2, nearly, 1.0 / (2 * nearly)).asDiagonal();
  CHECK_FALSE(is_loxodromic(d2, 0.01));
}

TEST_CASE("holonomy signs") {
  MatrixXd d = Eigen::Vector3d(2, 1, 0.5).asDiagonal();
  CHECK(holonomy_sign(d).str() == "+++");

  MatrixXd d2 = Eigen::Vector3d(-2, 1, -0.5).asDiagonal();
  CHECK(holonomy_sign(d2).str() == "+-+");

  // Hitchin-type: all eigenvalues positive.
  MatrixXd d3 = Eigen::Vector3d(4, 1.5, 1 / 6.0).asDiagonal();
  CHECK(holonomy_sign(d3).str() == "+++");

  // Conjugation must not change the pattern.
  auto g = testutil::rng(9);
  MatrixXd h = testutil::random_matrix(g, 3) + 3 * MatrixXd::Identity(3, 3);
  MatrixXd c = h * d2 * h.inverse();
  CHECK(holonomy_sign(c).str() == "+-+");
}

TEST_CASE("opposition involution") {
  ChamberVector v1{chamber3(1, 0, -1)};
  CHECK(opposition_involution(v1).entries.isApprox(v1.entries));

  ChamberVector v2{chamber3(2, 1, -3)};
  auto iv2 = opposition_involution(v2);
  CHECK(iv2.entries.isApprox(chamber3(3, -1, -2)));

  auto g = testutil::rng(3);
  std::normal_distribution<double> d;
  for (int t = 0; t < 50; ++t) {
    VectorXd v(4);
    for (int i = 0; i < 4; ++i) v[i] = d(g);
    std::sort(v.data(), v.data() + 4, std::greater<double>());
    ChamberVector cv{v};
    CHECK(opposition_involution(opposition_involution(cv))
              .entries.isApprox(cv.entries));
  }
}

TEST_CASE("projection symmetries and limits") {
  auto rep = sl2_pair();
  auto g = testutil::rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    auto w = testutil::random_reduced_word(g, 2, 4 + trial % 4);
    MatrixXd m = evaluate(rep, w);
    auto lam = jordan_projection(m);
    auto mu = cartan_projection(m);
    if (lam.entries[0] < 1e-3) continue;  // near-parabolic word, gaps drown in roundoff

    // conjugation invariance of lambda
    MatrixXd h = testutil::random_matrix(g, 2) + 2.5 * MatrixXd::Identity(2, 2);
    auto lam_c = jordan_projection(h * m * h.inverse());
    CHECK((lam_c.entries - lam.entries).norm() < 1e-8);

    // homogeneity under powers, through the pair path the pipeline uses
    for (int mm = 2; mm <= 8; ++mm) {
      words::Word wp;
      for (int i = 0; i < mm; ++i)
        wp.letters.insert(wp.letters.end(), w.letters.begin(), w.letters.end());
      auto lam_p = jordan_projection(evaluate_scaled_pair(rep, words::reduce_letters(wp.letters)));
      CHECK((lam_p.entries - mm * lam.entries).norm() < 1e-8 * mm);
    }

    // inverse symmetry through the opposition involution
    auto lam_i = jordan_projection(m.inverse());
    CHECK((lam_i.entries - opposition_involution(lam).entries).norm() < 1e-8);
    auto mu_i = cartan_projection(m.inverse());
    CHECK((mu_i.entries - opposition_involution(mu).entries).norm() < 1e-8);
  }
}

TEST_CASE("cartan over powers approaches jordan") {
  // Near-normal test elements: the 1e-3 bound at the 64th power holds there.
  auto grng = testutil::rng(33);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd logs(n);
      for (int i = 0; i < n; ++i) logs[i] = (n - 1 - 2.0 * i) * (0.3 + 0.1 * trial);
      logs.array() -= logs.mean();
      MatrixXd d = logs.array().exp().matrix().asDiagonal();
      MatrixXd q = testutil::random_orthogonal(grng, n);
      MatrixXd g = q * d * q.transpose();
      auto rep1 = Representation::make("pow", {g});
      words::Word w64;
      w64.letters.assign(64, 1);
      auto lam = jordan_projection(g);
      auto mu64 = cartan_projection(evaluate_scaled_pair(rep1, w64));
      CHECK((mu64.entries / 64 - lam.entries).norm() < 1e-3);
    }
  }

  // For generic group elements the gap decays like 1/m; check the trend.
  auto rep = sl2_pair();
  for (int trial = 0; trial < 10; ++trial) {
    auto w = testutil::random_reduced_word(grng, 2, 5);
    MatrixXd m = evaluate(rep, w);
    auto lam = jordan_projection(m);
    if (!is_loxodromic(lam, 0.5)) continue;
    auto power_err = [&](int reps) {
      words::Word wp;
      for (int i = 0; i < reps; ++i)
        wp.letters.insert(wp.letters.end(), w.letters.begin(), w.letters.end());
      auto pr = evaluate_scaled_pair(rep, words::reduce_letters(wp.letters));
      return (cartan_projection(pr).entries / reps - lam.entries).norm();
    };
    double e16 = power_err(16), e64 = power_err(64);
    CHECK(e64 < e16 / 2.5 + 1e-12);
  }
}

TEST_CASE("hilbert length") {
  CHECK(hilbert_length(ChamberVector{chamber3(0.7, 0, -0.7)}) ==
        doctest::Approx(0.7).epsilon(1e-12));
  double l4 = std::log(4.0);
  CHECK(hilbert_length(ChamberVector{chamber3(l4, 0, -l4)}) ==
        doctest::Approx(l4).epsilon(1e-12));
  CHECK_THROWS(hilbert_length(ChamberVector{Eigen::Vector2d(1, -1)}));
}

TEST_CASE("hilbert length matches the sl2 translation-length oracle") {
  auto grng = testutil::rng(44);
  std::normal_distribution<double> nd;
  int done = 0;
  while (done < 50) {
    Matrix2d a;
    a << nd(grng), nd(grng), nd(grng), nd(grng);
    double det = a.determinant();
    if (det < 0.05) continue;  // orientation-preserving, away from singular
    a /= std::sqrt(det);
    double tr = std::abs(a.trace());
    if (tr <= 2.05) continue;  // keep clearly hyperbolic elements
    // translation length of a in H^2 from the top eigenvalue
    double top = (tr + std::sqrt(tr * tr - 4)) / 2;
    double len = 2 * std::log(top);
    auto lam3 = jordan_projection(sym2(a));
    CHECK(std::abs(hilbert_length(lam3) - len) < 1e-8);
    ++done;
  }
}

TEST_CASE("hilbert distance") {
  VectorXd w(1), x(1), y(1), z(1);
  w << -1;
  x << 0;
  y << 0.5;
  z << 1;
  CHECK(hilbert_distance(w, x, y, z) ==
        doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-12));
  CHECK(hilbert_distance(w, x, x, z) == 0.0);

  // unit-disk diameter: d(0, s) = (1/2) log((1+s)/(1-s))
  for (double s : {0.1, 0.5, 0.9, 0.99}) {
    VectorXd pw(2), px(2), py(2), pz(2);
    pw << -1, 0;
    px << 0, 0;
    py << s, 0;
    pz << 1, 0;
    double expect = 0.5 * std::log((1 + s) / (1 - s));
    CHECK(std::abs(hilbert_distance(pw, px, py, pz) - expect) < 1e-12);
  }

  VectorXd bad(1);
  bad << 2;  // beyond z
  CHECK_THROWS(hilbert_distance(w, x, bad, z));
}

TEST_CASE("representation content hash is stable and content sensitive") {
  auto rep = sl2_pair();
  auto rep2 = sl2_pair();
  CHECK(rep.content_hash() == rep2.content_hash());
  Matrix2d a = rep.generators[0], b = rep.generators[1];
  a(0, 0) += 1e-9;
  auto rep3 = Representation::make("sl2", {a, b});
  CHECK(rep.content_hash() != rep3.content_hash());
}
