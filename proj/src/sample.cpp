#include "speclab/sample.hpp"

#include <omp.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "speclab/geometry.hpp"

namespace speclab::sample {

using spectra::ScaledMatrix;
using words::Letter;

int ProductRep::total_dim() const {
  int d = 0;
  for (const auto& r : reps) d += r.dimension;
  return d;
}

int ProductRep::intrinsic_dim() const {
  int d = 0;
  for (const auto& r : reps) d += r.dimension - 1;
  return d;
}

int ProductRep::rank() const {
  if (reps.empty()) throw std::invalid_argument("empty product representation");
  int k = reps.front().rank();
  for (const auto& r : reps)
    if (r.rank() != k)
      throw std::invalid_argument("factors disagree on generator count");
  return k;
}

Eigen::MatrixXd ProductRep::chamber_basis() const {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(total_dim(), intrinsic_dim());
  int row = 0, col = 0;
  for (const auto& r : reps) {
    int n = r.dimension;
    Eigen::MatrixXd ones(1, n);
    ones.setOnes();
    Eigen::MatrixXd blk = geometry::nullspace(ones);  // n x (n-1), orthonormal
    B.block(row, col, n, n - 1) = blk;
    row += n;
    col += n - 1;
  }
  return B;
}

std::uint64_t ProductRep::content_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& r : reps) {
    std::uint64_t rh = r.content_hash();
    for (int b = 0; b < 8; ++b) {
      h ^= (rh >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

Eigen::VectorXd SpectrumSample::elem_mu_vec(std::size_t i) const {
  return Eigen::Map<const Eigen::VectorXd>(elem_mu.data() + i * prod.total_dim(),
                                           prod.total_dim());
}

Eigen::VectorXd SpectrumSample::class_lambda_vec(std::size_t i) const {
  return Eigen::Map<const Eigen::VectorXd>(
      class_lambda.data() + i * prod.total_dim(), prod.total_dim());
}

namespace {

// Closed-form top singular value for 2x2; SVD otherwise.
double top_sv(const Eigen::MatrixXd& m) {
  if (m.rows() == 2) {
    double f = m.squaredNorm();
    double d = m.determinant();
    double disc = f * f - 4 * d * d;
    if (disc < 0) disc = 0;
    return std::sqrt(0.5 * (f + std::sqrt(disc)));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

struct TopEig {
  double log_mod;
  std::int8_t sign;  // 0 when not real
};

TopEig top_eig(const Eigen::MatrixXd& m, double det_scaled) {
  if (m.rows() == 2) {
    double t = m.trace();
    double disc = t * t - 4 * det_scaled;
    if (disc <= 0) {
      // complex pair; modulus^2 = |det|
      return {0.5 * std::log(std::abs(det_scaled)), 0};
    }
    double mod = 0.5 * (std::abs(t) + std::sqrt(disc));
    return {std::log(mod), static_cast<std::int8_t>(t >= 0 ? 1 : -1)};
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue solver failed");
  int best = 0;
  for (int i = 1; i < m.rows(); ++i)
    if (std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[best]))
      best = i;
  auto ev = es.eigenvalues()[best];
  double mod = std::abs(ev);
  std::int8_t sign = 0;
  if (std::abs(ev.imag()) <= 1e-9 * std::max(1.0, mod))
    sign = ev.real() >= 0 ? 1 : -1;
  return {std::log(mod), sign};
}

// One factor's evaluation stacks along the search path.
struct FactorStack {
  const spectra::Representation* rep = nullptr;
  std::vector<ScaledMatrix> fwd, inv;

  void init(const spectra::Representation& r, int max_depth) {
    rep = &r;
    ScaledMatrix id;
    id.m = Eigen::MatrixXd::Identity(r.dimension, r.dimension);
    fwd.assign(max_depth + 1, id);
    inv.assign(max_depth + 1, id);
  }

  static void rescale(ScaledMatrix& sm) {
    double peak = sm.m.cwiseAbs().maxCoeff();
    if (peak > 1e30 || (peak > 0 && peak < 1e-30)) {
      sm.m /= peak;
      sm.log_scale += std::log(peak);
    }
  }

  void push(int depth, Letter l) {
    int idx = l > 0 ? l : -l;
    fwd[depth].m.noalias() = fwd[depth - 1].m * rep->generator(l);
    fwd[depth].log_scale = fwd[depth - 1].log_scale;
    fwd[depth].det_sign = fwd[depth - 1].det_sign * rep->det_signs[idx - 1];
    rescale(fwd[depth]);
    inv[depth].m.noalias() = rep->generator(words::inverse(l)) * inv[depth - 1].m;
    inv[depth].log_scale = inv[depth - 1].log_scale;
    inv[depth].det_sign = fwd[depth].det_sign;
    rescale(inv[depth]);
  }

  // Cartan logs of the element at this depth, centered and sorted.
  Eigen::VectorXd mu(int depth) const {
    const int n = rep->dimension;
    double l1 = std::log(top_sv(fwd[depth].m)) + fwd[depth].log_scale;
    double ln = -(std::log(top_sv(inv[depth].m)) + inv[depth].log_scale);
    if (n == 2) {
      double l = 0.5 * (l1 - ln);
      return Eigen::Vector2d(l, -l);
    }
    if (n == 3) {
      Eigen::Vector3d v(l1, -l1 - ln, ln);
      std::sort(v.data(), v.data() + 3, std::greater<double>());
      v.array() -= v.mean();
      return v;
    }
    spectra::ScaledPair p{fwd[depth], inv[depth]};
    return spectra::cartan_projection(p).entries;
  }

  struct ClassData {
    Eigen::VectorXd lambda;
    std::string signs;
    bool loxodromic = false;
  };

  ClassData jordan(int depth, double gap_tol) const {
    const int n = rep->dimension;
    ClassData out;
    double det_f = fwd[depth].det_sign * std::exp(-n * fwd[depth].log_scale);
    if (n == 2) {
      TopEig te = top_eig(fwd[depth].m, det_f);
      double l = te.log_mod + fwd[depth].log_scale;
      if (l < 0) l = 0;
      out.lambda = Eigen::Vector2d(l, -l);
      out.loxodromic = 2 * l > gap_tol && te.sign != 0;
      std::int8_t s1 = te.sign == 0 ? std::int8_t{1} : te.sign;
      std::int8_t s2 = static_cast<std::int8_t>(fwd[depth].det_sign * s1);
      spectra::HolonomySign h{{s1, s2}};
      if (h.signs.front() < 0)
        for (auto& s : h.signs) s = static_cast<std::int8_t>(-s);
      out.signs = h.str();
      return out;
    }
    if (n == 3) {
      double det_i = inv[depth].det_sign * std::exp(-n * inv[depth].log_scale);
      TopEig tf = top_eig(fwd[depth].m, det_f);
      TopEig ti = top_eig(inv[depth].m, det_i);
      double l1 = tf.log_mod + fwd[depth].log_scale;
      double l3 = -(ti.log_mod + inv[depth].log_scale);
      Eigen::Vector3d v(l1, -l1 - l3, l3);
      std::sort(v.data(), v.data() + 3, std::greater<double>());
      v.array() -= v.mean();
      out.lambda = v;
      out.loxodromic = tf.sign != 0 && ti.sign != 0 &&
                       v[0] - v[1] > gap_tol && v[1] - v[2] > gap_tol;
      std::int8_t s1 = tf.sign == 0 ? std::int8_t{1} : tf.sign;
      std::int8_t s3 = ti.sign == 0 ? std::int8_t{1} : ti.sign;
      std::int8_t s2 = static_cast<std::int8_t>(fwd[depth].det_sign * s1 * s3);
      spectra::HolonomySign h{{s1, s2, s3}};
      if (h.signs.front() < 0)
        for (auto& s : h.signs) s = static_cast<std::int8_t>(-s);
      out.signs = h.str();
      return out;
    }
    spectra::ScaledPair p{fwd[depth], inv[depth]};
    auto lam = spectra::jordan_projection(p);
    out.lambda = lam.entries;
    out.loxodromic = spectra::is_loxodromic(lam, gap_tol);
    if (out.loxodromic)
      out.signs = spectra::holonomy_sign(p, gap_tol).str();
    else
      out.signs = std::string(n, '+');
    return out;
  }
};

struct Chunk {
  std::vector<Letter> elem_pool;
  std::vector<std::uint64_t> elem_off{0};
  std::vector<double> elem_mu;
  std::vector<Letter> class_pool;
  std::vector<std::uint64_t> class_off{0};
  std::vector<double> class_lambda, class_mu;
  std::vector<std::string> class_signs;
  std::vector<std::uint32_t> class_lox;
};

Chunk run_shard(const ProductRep& prod, int max_len, words::Shard shard,
                double gap_tol) {
  Chunk out;
  const int d = prod.factor_count();
  const int D = prod.total_dim();
  std::vector<FactorStack> stacks(d);
  for (int i = 0; i < d; ++i) stacks[i].init(prod.reps[i], max_len);
  int depth = 0;

  words::EnumVisitor vis;
  vis.push = [&](Letter l) {
    ++depth;
    for (auto& st : stacks) st.push(depth, l);
  };
  vis.pop = [&]() { --depth; };
  vis.emit = [&](std::span<const Letter> w) {
    out.elem_pool.insert(out.elem_pool.end(), w.begin(), w.end());
    out.elem_off.push_back(out.elem_pool.size());
    size_t base = out.elem_mu.size();
    out.elem_mu.resize(base + D);
    int at = 0;
    for (auto& st : stacks) {
      Eigen::VectorXd mu = st.mu(depth);
      for (int j = 0; j < mu.size(); ++j) out.elem_mu[base + at + j] = mu[j];
      at += static_cast<int>(mu.size());
    }
    if (w.empty() || !words::is_cyclically_reduced(w)) return;
    words::Word ww;
    ww.letters.assign(w.begin(), w.end());
    if (!(words::canonical_rotation(ww) == ww)) return;
    out.class_pool.insert(out.class_pool.end(), w.begin(), w.end());
    out.class_off.push_back(out.class_pool.size());
    size_t cbase = out.class_lambda.size();
    out.class_lambda.resize(cbase + D);
    out.class_mu.resize(cbase + D);
    std::copy(out.elem_mu.begin() + base, out.elem_mu.begin() + base + D,
              out.class_mu.begin() + cbase);
    std::string signs;
    std::uint32_t lox = 0;
    at = 0;
    for (int i = 0; i < d; ++i) {
      auto cd = stacks[i].jordan(depth, gap_tol);
      for (int j = 0; j < cd.lambda.size(); ++j)
        out.class_lambda[cbase + at + j] = cd.lambda[j];
      at += static_cast<int>(cd.lambda.size());
      signs += cd.signs;
      if (cd.loxodromic) lox |= 1u << i;
    }
    out.class_signs.push_back(std::move(signs));
    out.class_lox.push_back(lox);
  };

  words::enumerate_reduced_words(words::GeneratorAlphabet::standard(prod.rank()),
                                 max_len, shard, vis);
  return out;
}

void sort_section(std::vector<Letter>& pool, std::vector<std::uint64_t>& off,
                  const std::function<void(const std::vector<std::size_t>&)>& apply) {
  const std::size_t n = off.size() - 1;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto word_at = [&](std::size_t i) {
    return std::span<const Letter>(pool.data() + off[i],
                                   static_cast<std::size_t>(off[i + 1] - off[i]));
  };
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return words::word_less(word_at(a), word_at(b));
  });
  std::vector<Letter> new_pool(pool.size());
  std::vector<std::uint64_t> new_off(n + 1);
  new_off[0] = 0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto w = word_at(perm[i]);
    std::copy(w.begin(), w.end(), new_pool.begin() + at);
    at += w.size();
    new_off[i + 1] = at;
  }
  pool = std::move(new_pool);
  off = std::move(new_off);
  apply(perm);
}

template <typename T>
std::vector<T> permuted_rows(const std::vector<T>& flat,
                             const std::vector<std::size_t>& perm, int width) {
  std::vector<T> out(flat.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    std::copy(flat.begin() + perm[i] * width,
              flat.begin() + (perm[i] + 1) * width, out.begin() + i * width);
  return out;
}

SpectrumSample assemble(const ProductRep& prod, int max_len, double gap_tol,
                        std::vector<Chunk>&& chunks) {
  SpectrumSample s;
  s.prod = prod;
  s.max_word_length = max_len;
  s.gap_tol = gap_tol;
  const int D = prod.total_dim();

  s.elem_offset.push_back(0);
  s.class_offset.push_back(0);
  for (auto& c : chunks) {
    std::uint64_t shift = s.elem_pool.size();
    s.elem_pool.insert(s.elem_pool.end(), c.elem_pool.begin(), c.elem_pool.end());
    for (std::size_t i = 1; i < c.elem_off.size(); ++i)
      s.elem_offset.push_back(c.elem_off[i] + shift);
    s.elem_mu.insert(s.elem_mu.end(), c.elem_mu.begin(), c.elem_mu.end());
    shift = s.class_pool.size();
    s.class_pool.insert(s.class_pool.end(), c.class_pool.begin(),
                        c.class_pool.end());
    for (std::size_t i = 1; i < c.class_off.size(); ++i)
      s.class_offset.push_back(c.class_off[i] + shift);
    s.class_lambda.insert(s.class_lambda.end(), c.class_lambda.begin(),
                          c.class_lambda.end());
    s.class_mu.insert(s.class_mu.end(), c.class_mu.begin(), c.class_mu.end());
    s.class_signs.insert(s.class_signs.end(),
                         std::make_move_iterator(c.class_signs.begin()),
                         std::make_move_iterator(c.class_signs.end()));
    s.class_lox.insert(s.class_lox.end(), c.class_lox.begin(),
                       c.class_lox.end());
    c = Chunk{};
  }

  sort_section(s.elem_pool, s.elem_offset,
               [&](const std::vector<std::size_t>& p) {
                 s.elem_mu = permuted_rows(s.elem_mu, p, D);
               });
  sort_section(s.class_pool, s.class_offset,
               [&](const std::vector<std::size_t>& p) {
                 s.class_lambda = permuted_rows(s.class_lambda, p, D);
                 s.class_mu = permuted_rows(s.class_mu, p, D);
                 std::vector<std::string> signs(p.size());
                 std::vector<std::uint32_t> lox(p.size());
                 for (std::size_t i = 0; i < p.size(); ++i) {
                   signs[i] = std::move(s.class_signs[p[i]]);
                   lox[i] = s.class_lox[p[i]];
                 }
                 s.class_signs = std::move(signs);
                 s.class_lox = std::move(lox);
               });
  return s;
}

}  // namespace

SpectrumSample build_sample(const ProductRep& prod, int max_len,
                            const BuildOptions& opts) {
  if (!opts.cache_dir.empty()) {
    SpectrumSample cached;
    if (try_read_spectrum_cache(cached, prod, max_len, opts.gap_tol,
                                opts.cache_dir))
      return cached;
  }
  const int S = std::max(1, opts.shard_count);
  std::vector<Chunk> chunks(S);
  if (opts.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int sh = 0; sh < S; ++sh)
      chunks[sh] = run_shard(prod, max_len, words::Shard{sh, S}, opts.gap_tol);
  } else {
    for (int sh = 0; sh < S; ++sh)
      chunks[sh] = run_shard(prod, max_len, words::Shard{sh, S}, opts.gap_tol);
  }
  SpectrumSample s = assemble(prod, max_len, opts.gap_tol, std::move(chunks));
  if (!opts.cache_dir.empty()) write_spectrum_cache(s, opts.cache_dir);
  return s;
}

SpectrumSample build_sample_serial(const ProductRep& prod, int max_len,
                                   double gap_tol) {
  std::vector<Chunk> chunks;
  chunks.push_back(run_shard(prod, max_len, words::Shard{0, 1}, gap_tol));
  return assemble(prod, max_len, gap_tol, std::move(chunks));
}

std::string spectrum_cache_path(const std::string& dir, std::uint64_t hash,
                                int max_len) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "spectra_%016llx_L%d.txt",
                static_cast<unsigned long long>(hash), max_len);
  return (std::filesystem::path(dir) / buf).string();
}

namespace {

void put_doubles(std::FILE* f, std::span<const double> v) {
  char buf[40];
  for (double x : v) {
    std::snprintf(buf, sizeof(buf), " %.17g", x);
    std::fputs(buf, f);
  }
}

}  // namespace

void write_spectrum_cache(const SpectrumSample& s, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::string path =
      spectrum_cache_path(dir, s.prod.content_hash(), s.max_word_length);
  std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open spectrum cache for writing");
  std::fprintf(f, "speclab-spectrum-cache v1\n");
  std::fprintf(f, "hash %016llx max_len %d gap_tol %.17g dim %d\n",
               static_cast<unsigned long long>(s.prod.content_hash()),
               s.max_word_length, s.gap_tol, s.prod.total_dim());
  for (std::size_t i = 0; i < s.elem_count(); ++i) {
    words::Word w;
    auto sp = s.elem_word(i);
    w.letters.assign(sp.begin(), sp.end());
    std::fprintf(f, "E %s :", w.token().c_str());
    put_doubles(f, s.elem_mu_row(i));
    std::fputc('\n', f);
  }
  for (std::size_t i = 0; i < s.class_count(); ++i) {
    words::Word w;
    auto sp = s.class_word(i);
    w.letters.assign(sp.begin(), sp.end());
    std::fprintf(f, "C %s %s %u :", w.token().c_str(), s.class_signs[i].c_str(),
                 s.class_lox[i]);
    put_doubles(f, s.class_lambda_row(i));
    std::fputs(" ;", f);
    put_doubles(f, s.class_mu_row(i));
    std::fputc('\n', f);
  }
  std::fclose(f);
  std::filesystem::rename(tmp, path);
}

bool try_read_spectrum_cache(SpectrumSample& out, const ProductRep& prod,
                             int max_len, double gap_tol,
                             const std::string& dir) {
  std::string path = spectrum_cache_path(dir, prod.content_hash(), max_len);
  std::ifstream f(path);
  if (!f) return false;
  std::string line;
  if (!std::getline(f, line) || line != "speclab-spectrum-cache v1")
    return false;
  if (!std::getline(f, line)) return false;
  {
    char hash[32];
    int ml = 0, dim = 0;
    double gt = 0;
    if (std::sscanf(line.c_str(), "hash %16s max_len %d gap_tol %lg dim %d",
                    hash, &ml, &gt, &dim) != 4)
      return false;
    if (ml != max_len || gt != gap_tol || dim != prod.total_dim()) return false;
  }
  out = SpectrumSample{};
  out.prod = prod;
  out.max_word_length = max_len;
  out.gap_tol = gap_tol;
  out.elem_offset.push_back(0);
  out.class_offset.push_back(0);
  const int D = prod.total_dim();
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string kind, token;
    ss >> kind >> token;
    words::Word w =
        (token == ":") ? words::Word{} : words::Word::from_token(token);
    if (kind == "E") {
      std::string colon;
      if (token != ":") ss >> colon;
      out.elem_pool.insert(out.elem_pool.end(), w.letters.begin(),
                           w.letters.end());
      out.elem_offset.push_back(out.elem_pool.size());
      for (int j = 0; j < D; ++j) {
        double x;
        ss >> x;
        out.elem_mu.push_back(x);
      }
    } else if (kind == "C") {
      std::string signs, colon;
      std::uint32_t lox;
      ss >> signs >> lox >> colon;
      out.class_pool.insert(out.class_pool.end(), w.letters.begin(),
                            w.letters.end());
      out.class_offset.push_back(out.class_pool.size());
      out.class_signs.push_back(signs);
      out.class_lox.push_back(lox);
      for (int j = 0; j < D; ++j) {
        double x;
        ss >> x;
        out.class_lambda.push_back(x);
      }
      std::string semi;
      ss >> semi;
      for (int j = 0; j < D; ++j) {
        double x;
        ss >> x;
        out.class_mu.push_back(x);
      }
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace speclab::sample
