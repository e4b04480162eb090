#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "speclab/sample.hpp"

using namespace speclab;
using namespace speclab::sample;

namespace {

bool samples_equal(const SpectrumSample& a, const SpectrumSample& b) {
  return a.elem_pool == b.elem_pool && a.elem_offset == b.elem_offset &&
         a.elem_mu == b.elem_mu && a.class_pool == b.class_pool &&
         a.class_offset == b.class_offset && a.class_lambda == b.class_lambda &&
         a.class_mu == b.class_mu && a.class_signs == b.class_signs &&
         a.class_lox == b.class_lox;
}

}  // namespace

TEST_CASE("chamber basis is orthonormal and block trace free") {
  auto prod = fixtures::mixed_product();
  Eigen::MatrixXd B = prod.chamber_basis();
  CHECK(B.rows() == 5);
  CHECK(B.cols() == 3);
  CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  // block sums vanish
  CHECK(B.block(0, 0, 2, 3).colwise().sum().norm() < 1e-12);
  CHECK(B.block(2, 0, 3, 3).colwise().sum().norm() < 1e-12);
  // intrinsic columns do not mix blocks
  CHECK(B.block(0, 1, 2, 2).norm() < 1e-12);
  CHECK(B.block(2, 0, 3, 1).norm() < 1e-12);
}

TEST_CASE("serial reference and parallel builds agree") {
  auto prod = fixtures::pair_product();
  auto ref = build_sample_serial(prod, 5);
  CHECK(ref.elem_count() == words::reduced_word_count(2, 5));
  CHECK(ref.class_count() ==
        words::enumerate_conjugacy_classes(words::GeneratorAlphabet::standard(2), 5)
            .size());
  for (int S : {1, 3, 8}) {
    BuildOptions opt;
    opt.shard_count = S;
    auto got = build_sample(prod, 5, opt);
    CHECK(samples_equal(ref, got));
  }
}

TEST_CASE("records match the one-off evaluation path") {
  auto prod = fixtures::mixed_product();
  auto s = build_sample_serial(prod, 4);
  for (std::size_t i = 0; i < s.elem_count(); i += 37) {
    auto sp = s.elem_word(i);
    words::Word w;
    w.letters.assign(sp.begin(), sp.end());
    Eigen::VectorXd mu = s.elem_mu_vec(i);
    int at = 0;
    for (const auto& rep : prod.reps) {
      auto pr = spectra::evaluate_scaled_pair(rep, w);
      auto expect = spectra::cartan_projection(pr);
      CHECK((mu.segment(at, rep.dimension) - expect.entries).norm() < 1e-10);
      at += rep.dimension;
    }
  }
  for (std::size_t i = 0; i < s.class_count(); i += 17) {
    auto sp = s.class_word(i);
    words::Word w;
    w.letters.assign(sp.begin(), sp.end());
    CHECK(words::is_cyclically_reduced(sp));
    CHECK(words::canonical_rotation(w) == w);
    Eigen::VectorXd lam = s.class_lambda_vec(i);
    int at = 0;
    for (int r = 0; r < prod.factor_count(); ++r) {
      auto pr = spectra::evaluate_scaled_pair(prod.reps[r], w);
      auto expect = spectra::jordan_projection(pr);
      CHECK((lam.segment(at, prod.reps[r].dimension) - expect.entries).norm() <
            1e-10);
      if (s.class_lox[i] & (1u << r)) {
        auto h = spectra::holonomy_sign(pr);
        CHECK(s.class_signs[i].substr(at, prod.reps[r].dimension) == h.str());
      }
      at += prod.reps[r].dimension;
    }
  }
}

TEST_CASE("gap sanity: projections grow linearly in word length") {
  // Empirical lower constant for the bundled generators; guards the
  // ping-pong quality of the fixtures.
  for (auto prod : {fixtures::pair_product(), fixtures::mixed_product()}) {
    auto s = build_sample_serial(prod, 7);
    double worst = 1e9;
    for (std::size_t i = 0; i < s.elem_count(); ++i) {
      auto w = s.elem_word(i);
      if (w.empty()) continue;
      Eigen::VectorXd mu = s.elem_mu_vec(i);
      int at = 0;
      for (const auto& rep : prod.reps) {
        for (int j = 0; j + 1 < rep.dimension; ++j)
          worst = std::min(worst,
                           (mu[at + j] - mu[at + j + 1]) / double(w.size()));
        at += rep.dimension;
      }
    }
    CHECK(worst > 0.05);
  }
  // every nontrivial class of the bundles is loxodromic in every factor
  auto s = build_sample_serial(fixtures::mixed_product(), 6);
  for (std::size_t i = 0; i < s.class_count(); ++i) CHECK(s.class_all_lox(i));
}

TEST_CASE("spectrum cache round trips bit for bit") {
  auto prod = fixtures::pair_product();
  auto dir = std::filesystem::temp_directory_path() / "speclab_speccache_test";
  std::filesystem::remove_all(dir);

  BuildOptions opt;
  opt.shard_count = 3;
  opt.cache_dir = dir.string();
  auto first = build_sample(prod, 4, opt);

  auto path = spectrum_cache_path(dir.string(), prod.content_hash(), 4);
  REQUIRE(std::filesystem::exists(path));
  auto stamp1 = std::filesystem::last_write_time(path);

  // second run must hit the cache and reproduce the sample exactly
  auto second = build_sample(prod, 4, opt);
  CHECK(samples_equal(first, second));
  CHECK(std::filesystem::last_write_time(path) == stamp1);

  // rewrite from the loaded sample and compare bytes
  auto bytes_of = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  std::string original = bytes_of(path);
  write_spectrum_cache(second, dir.string());
  CHECK(bytes_of(path) == original);
  std::filesystem::remove_all(dir);
}
