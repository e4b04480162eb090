#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace speclab::words {

// Letters are signed 1-based generator indices: +i is the i-th generator,
// -i its inverse. Rank is limited to 127 by the storage type.
using Letter = std::int8_t;

inline Letter inverse(Letter l) { return static_cast<Letter>(-l); }

// Fixed total order on letters: a < a^-1 < b < b^-1 < ...
inline int letter_code(Letter l) {
  int idx = l > 0 ? l : -l;
  return (idx - 1) * 2 + (l < 0 ? 1 : 0);
}

struct GeneratorAlphabet {
  int rank = 0;
  std::vector<std::string> labels;

  static GeneratorAlphabet standard(int k);
};

struct Word {
  std::vector<Letter> letters;

  int length() const { return static_cast<int>(letters.size()); }
  bool empty() const { return letters.empty(); }
  Word inverse_word() const;
  std::string str(const GeneratorAlphabet& ab) const;
  std::string token() const;  // "1,-2,1" style, parseable
  static Word from_token(const std::string& tok);

  bool operator==(const Word& o) const { return letters == o.letters; }
};

// Lexicographic order on letter codes, shorter prefix first. Matches the
// serial depth-first enumeration order.
bool word_less(std::span<const Letter> a, std::span<const Letter> b);

bool is_reduced(std::span<const Letter> w);
bool is_cyclically_reduced(std::span<const Letter> w);

// Free reduction of a raw signed-index sequence. Throws std::invalid_argument
// on indices outside [1, rank].
Word reduce(std::span<const int> raw, int rank);
Word reduce_letters(std::span<const Letter> raw);

// w = conjugator . core . conjugator^-1 with core cyclically reduced.
struct CyclicReduction {
  Word core;
  Word conjugator;
};
CyclicReduction cyclic_reduce(const Word& w);

// Minimum of the rotation orbit under word_less. Input must be cyclically
// reduced. Inversion is deliberately not quotiented.
Word canonical_rotation(const Word& cyc_reduced);

struct ConjugacyClass {
  Word representative;  // cyclically reduced, rotation-minimal
  int length() const { return representative.length(); }
};

ConjugacyClass conjugacy_class_of(const Word& w);

// True iff the representative is not a proper power u^m, m >= 2.
bool is_primitive(const ConjugacyClass& c);

struct Shard {
  int index = 0;
  int count = 1;
};

// Shard assignment by FNV-1a hash of the length-capped prefix. Words shorter
// than the prefix depth hash in full, so assignment depends only on the word
// and the shard count.
constexpr int kShardPrefixDepth = 4;
std::uint64_t shard_hash(std::span<const Letter> prefix);
int shard_of(std::span<const Letter> w, int shard_count);

// Depth-first enumeration of all freely reduced words of length <= max_len
// belonging to the given shard. Subtrees with a settled foreign prefix are
// pruned. The visitor sees push/pop around every tree edge that is explored
// and emit(word) for words in the shard, in depth-first order.
struct EnumVisitor {
  std::function<void(Letter)> push;
  std::function<void()> pop;
  std::function<void(std::span<const Letter>)> emit;
};
void enumerate_reduced_words(const GeneratorAlphabet& ab, int max_len,
                             Shard shard, const EnumVisitor& v);

// Convenience collectors.
std::vector<Word> enumerate_words(const GeneratorAlphabet& ab, int max_len,
                                  Shard shard = {});
std::vector<ConjugacyClass> enumerate_conjugacy_classes(
    const GeneratorAlphabet& ab, int max_len, Shard shard = {});

// Counts 1 + sum_n 2k(2k-1)^(n-1) of reduced words of length <= max_len.
std::uint64_t reduced_word_count(int rank, int max_len);

// Enumeration cache: one line per word, "<length>:<letters-token>".
void write_word_cache(const std::string& dir, const GeneratorAlphabet& ab,
                      int max_len, Shard shard,
                      const std::vector<Word>& words);
std::vector<Word> read_word_cache(const std::string& dir,
                                  const GeneratorAlphabet& ab, int max_len,
                                  Shard shard);
std::string word_cache_path(const std::string& dir, int rank, int max_len,
                            Shard shard);

}  // namespace speclab::words
