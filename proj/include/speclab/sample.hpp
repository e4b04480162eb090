#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "speclab/spectra.hpp"
#include "speclab/words.hpp"

namespace speclab::sample {

// A tuple of representations of the same free group. Chamber data is
// concatenated per block; the intrinsic space is the product of the per-block
// trace-zero subspaces.
struct ProductRep {
  std::vector<spectra::Representation> reps;

  int factor_count() const { return static_cast<int>(reps.size()); }
  int total_dim() const;
  int intrinsic_dim() const;
  int rank() const;  // free-group rank, must agree across factors

  // total_dim x intrinsic_dim, orthonormal columns, block diagonal.
  Eigen::MatrixXd chamber_basis() const;
  std::uint64_t content_hash() const;
};

// Canonically ordered spectral data for all elements and conjugacy classes up
// to a word length. Element records store the Cartan projection; class
// records store Jordan and Cartan projections of the canonical representative
// plus holonomy signs and per-factor loxodromy flags. Order is lexicographic
// in letter codes, which equals the serial enumeration order, so the content
// is independent of the shard layout.
struct SpectrumSample {
  ProductRep prod;
  int max_word_length = 0;
  double gap_tol = 1e-6;

  std::vector<words::Letter> elem_pool;
  std::vector<std::uint64_t> elem_offset;  // size count+1
  std::vector<double> elem_mu;             // flat, row = total_dim

  std::vector<words::Letter> class_pool;
  std::vector<std::uint64_t> class_offset;
  std::vector<double> class_lambda;
  std::vector<double> class_mu;
  std::vector<std::string> class_signs;   // concatenated per-factor patterns
  std::vector<std::uint32_t> class_lox;   // bit i set = factor i loxodromic

  std::size_t elem_count() const { return elem_offset.empty() ? 0 : elem_offset.size() - 1; }
  std::size_t class_count() const { return class_offset.empty() ? 0 : class_offset.size() - 1; }

  std::span<const words::Letter> elem_word(std::size_t i) const {
    return {elem_pool.data() + elem_offset[i],
            static_cast<std::size_t>(elem_offset[i + 1] - elem_offset[i])};
  }
  std::span<const words::Letter> class_word(std::size_t i) const {
    return {class_pool.data() + class_offset[i],
            static_cast<std::size_t>(class_offset[i + 1] - class_offset[i])};
  }
  std::span<const double> elem_mu_row(std::size_t i) const {
    return {elem_mu.data() + i * prod.total_dim(), static_cast<std::size_t>(prod.total_dim())};
  }
  std::span<const double> class_lambda_row(std::size_t i) const {
    return {class_lambda.data() + i * prod.total_dim(), static_cast<std::size_t>(prod.total_dim())};
  }
  std::span<const double> class_mu_row(std::size_t i) const {
    return {class_mu.data() + i * prod.total_dim(), static_cast<std::size_t>(prod.total_dim())};
  }
  bool class_all_lox(std::size_t i) const {
    return class_lox[i] == (1u << prod.factor_count()) - 1;
  }

  Eigen::VectorXd elem_mu_vec(std::size_t i) const;
  Eigen::VectorXd class_lambda_vec(std::size_t i) const;
};

struct BuildOptions {
  int shard_count = 1;
  bool parallel = true;
  double gap_tol = 1e-6;
  std::string cache_dir;  // consulted and refreshed when nonempty
};

// Sharded, OpenMP-parallel pipeline: enumerate, evaluate along the search
// tree, project, merge, canonical sort.
SpectrumSample build_sample(const ProductRep& prod, int max_len,
                            const BuildOptions& opts = {});

// Straight-line single-pass reference used by tests and the benchmark.
SpectrumSample build_sample_serial(const ProductRep& prod, int max_len,
                                   double gap_tol = 1e-6);

std::string spectrum_cache_path(const std::string& dir, std::uint64_t hash,
                                int max_len);
void write_spectrum_cache(const SpectrumSample& s, const std::string& dir);
bool try_read_spectrum_cache(SpectrumSample& out, const ProductRep& prod,
                             int max_len, double gap_tol,
                             const std::string& dir);

}  // namespace speclab::sample
