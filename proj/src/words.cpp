#include "speclab/words.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace speclab::words {

GeneratorAlphabet GeneratorAlphabet::standard(int k) {
  if (k < 1 || k > 127) throw std::invalid_argument("rank must be in [1,127]");
  GeneratorAlphabet ab;
  ab.rank = k;
  for (int i = 0; i < k; ++i) {
    std::string name;
    name += static_cast<char>('a' + (i % 26));
    if (i >= 26) name += std::to_string(i / 26);
    ab.labels.push_back(name);
  }
  return ab;
}

Word Word::inverse_word() const {
  Word r;
  r.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it)
    r.letters.push_back(inverse(*it));
  return r;
}

std::string Word::str(const GeneratorAlphabet& ab) const {
  if (letters.empty()) return "e";
  std::string s;
  for (Letter l : letters) {
    int idx = (l > 0 ? l : -l) - 1;
    s += ab.labels.at(idx);
    if (l < 0) s += "'";
  }
  return s;
}

std::string Word::token() const {
  std::string s;
  for (size_t i = 0; i < letters.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(static_cast<int>(letters[i]));
  }
  return s;
}

Word Word::from_token(const std::string& tok) {
  Word w;
  std::stringstream ss(tok);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    int v = std::stoi(part);
    if (v == 0 || v > 127 || v < -127)
      throw std::invalid_argument("bad letter in word token: " + part);
    w.letters.push_back(static_cast<Letter>(v));
  }
  return w;
}

bool word_less(std::span<const Letter> a, std::span<const Letter> b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    int ca = letter_code(a[i]), cb = letter_code(b[i]);
    if (ca != cb) return ca < cb;
  }
  return a.size() < b.size();
}

bool is_reduced(std::span<const Letter> w) {
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] == inverse(w[i + 1])) return false;
  return true;
}

bool is_cyclically_reduced(std::span<const Letter> w) {
  if (!is_reduced(w)) return false;
  if (w.size() >= 2 && w.front() == inverse(w.back())) return false;
  return true;
}

Word reduce_letters(std::span<const Letter> raw) {
  Word out;
  out.letters.reserve(raw.size());
  for (Letter l : raw) {
    if (!out.letters.empty() && out.letters.back() == inverse(l))
      out.letters.pop_back();
    else
      out.letters.push_back(l);
  }
  return out;
}

Word reduce(std::span<const int> raw, int rank) {
  std::vector<Letter> ls;
  ls.reserve(raw.size());
  for (int v : raw) {
    int idx = v > 0 ? v : -v;
    if (idx < 1 || idx > rank)
      throw std::invalid_argument("generator index out of range: " +
                                  std::to_string(v));
    ls.push_back(static_cast<Letter>(v));
  }
  return reduce_letters(ls);
}

CyclicReduction cyclic_reduce(const Word& w) {
  CyclicReduction r;
  std::vector<Letter> core(w.letters);
  std::vector<Letter> conj;
  size_t lo = 0, hi = core.size();
  while (hi - lo >= 2 && core[lo] == inverse(core[hi - 1])) {
    conj.push_back(core[lo]);
    ++lo;
    --hi;
  }
  r.core.letters.assign(core.begin() + lo, core.begin() + hi);
  r.conjugator.letters = std::move(conj);
  return r;
}

Word canonical_rotation(const Word& w) {
  if (!is_cyclically_reduced(w.letters))
    throw std::invalid_argument("canonical_rotation needs a cyclically reduced word");
  const int n = w.length();
  if (n <= 1) return w;
  int best = 0;
  std::vector<Letter> doubled(w.letters);
  doubled.insert(doubled.end(), w.letters.begin(), w.letters.end());
  for (int s = 1; s < n; ++s) {
    std::span<const Letter> cand(doubled.data() + s, n);
    std::span<const Letter> cur(doubled.data() + best, n);
    if (word_less(cand, cur)) best = s;
  }
  Word out;
  out.letters.assign(doubled.begin() + best, doubled.begin() + best + n);
  return out;
}

ConjugacyClass conjugacy_class_of(const Word& w) {
  auto cr = cyclic_reduce(w);
  return ConjugacyClass{canonical_rotation(cr.core)};
}

bool is_primitive(const ConjugacyClass& c) {
  const auto& ls = c.representative.letters;
  const int n = static_cast<int>(ls.size());
  if (n == 0) throw std::invalid_argument("trivial class has no primitivity");
  for (int p = 1; p <= n / 2; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (int i = p; i < n && periodic; ++i)
      if (ls[i] != ls[i - p]) periodic = false;
    if (periodic) return false;
  }
  return true;
}

std::uint64_t shard_hash(std::span<const Letter> prefix) {
  std::uint64_t h = 1469598103934665603ull;
  for (Letter l : prefix) {
    h ^= static_cast<std::uint8_t>(l);
    h *= 1099511628211ull;
  }
  return h;
}

int shard_of(std::span<const Letter> w, int shard_count) {
  size_t p = std::min<size_t>(w.size(), kShardPrefixDepth);
  return static_cast<int>(shard_hash(w.subspan(0, p)) %
                          static_cast<std::uint64_t>(shard_count));
}

namespace {

struct DfsState {
  const GeneratorAlphabet* ab;
  int max_len;
  Shard shard;
  const EnumVisitor* vis;
  std::vector<Letter> cur;

  void run() {
    if (shard_of(cur, shard.count) == shard.index) vis->emit(cur);
    descend(shard.count == 1);
  }

  // Once the prefix is settled the whole subtree shares one shard: prune
  // foreign subtrees, stop hashing inside our own.
  void descend(bool all_mine) {
    const int depth = static_cast<int>(cur.size());
    if (depth >= max_len) return;
    const Letter last = cur.empty() ? 0 : cur.back();
    for (int idx = 1; idx <= ab->rank; ++idx) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        Letter l = static_cast<Letter>(sgn == 0 ? idx : -idx);
        if (!cur.empty() && l == inverse(last)) continue;
        cur.push_back(l);
        bool mine = all_mine;
        bool settled = all_mine;
        if (!all_mine) {
          settled = static_cast<int>(cur.size()) >= kShardPrefixDepth;
          mine = shard_of(cur, shard.count) == shard.index;
          if (settled && !mine) {
            cur.pop_back();
            continue;
          }
        }
        if (vis->push) vis->push(l);
        if (mine) vis->emit(cur);
        descend(settled && mine);
        if (vis->pop) vis->pop();
        cur.pop_back();
      }
    }
  }
};

}  // namespace

void enumerate_reduced_words(const GeneratorAlphabet& ab, int max_len,
                             Shard shard, const EnumVisitor& v) {
  if (max_len < 0) throw std::invalid_argument("max_len must be >= 0");
  if (shard.count < 1 || shard.index < 0 || shard.index >= shard.count)
    throw std::invalid_argument("bad shard spec");
  DfsState st;
  st.ab = &ab;
  st.max_len = max_len;
  st.shard = shard;
  st.vis = &v;
  st.run();
}

std::vector<Word> enumerate_words(const GeneratorAlphabet& ab, int max_len,
                                  Shard shard) {
  std::vector<Word> out;
  EnumVisitor v;
  v.emit = [&out](std::span<const Letter> w) {
    Word ww;
    ww.letters.assign(w.begin(), w.end());
    out.push_back(std::move(ww));
  };
  enumerate_reduced_words(ab, max_len, shard, v);
  return out;
}

std::vector<ConjugacyClass> enumerate_conjugacy_classes(
    const GeneratorAlphabet& ab, int max_len, Shard shard) {
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  std::vector<ConjugacyClass> out;
  EnumVisitor v;
  v.emit = [&out](std::span<const Letter> w) {
    if (w.empty()) return;
    if (!is_cyclically_reduced(w)) return;
    Word ww;
    ww.letters.assign(w.begin(), w.end());
    Word canon = canonical_rotation(ww);
    if (canon == ww) out.push_back(ConjugacyClass{std::move(ww)});
  };
  enumerate_reduced_words(ab, max_len, shard, v);
  return out;
}

std::uint64_t reduced_word_count(int rank, int max_len) {
  std::uint64_t total = 1;
  std::uint64_t level = 2ull * rank;
  for (int n = 1; n <= max_len; ++n) {
    total += level;
    level *= (2ull * rank - 1);
  }
  return total;
}

std::string word_cache_path(const std::string& dir, int rank, int max_len,
                            Shard shard) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "words_k%d_L%d_s%dof%d.txt", rank, max_len,
                shard.index, shard.count);
  return (std::filesystem::path(dir) / buf).string();
}

void write_word_cache(const std::string& dir, const GeneratorAlphabet& ab,
                      int max_len, Shard shard,
                      const std::vector<Word>& words) {
  std::filesystem::create_directories(dir);
  std::ofstream f(word_cache_path(dir, ab.rank, max_len, shard));
  if (!f) throw std::runtime_error("cannot open word cache for writing");
  for (const Word& w : words) f << w.length() << ":" << w.token() << "\n";
}

std::vector<Word> read_word_cache(const std::string& dir,
                                  const GeneratorAlphabet& ab, int max_len,
                                  Shard shard) {
  std::ifstream f(word_cache_path(dir, ab.rank, max_len, shard));
  if (!f) throw std::runtime_error("word cache not found");
  std::vector<Word> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("malformed word cache line: " + line);
    Word w = Word::from_token(line.substr(colon + 1));
    if (w.length() != std::stoi(line.substr(0, colon)))
      throw std::runtime_error("word cache length mismatch: " + line);
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace speclab::words
