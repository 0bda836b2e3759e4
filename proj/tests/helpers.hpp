#pragma once

#include <random>
#include <string>
#include <vector>

#include "catrace/core.hpp"

namespace testing_helpers {

using catrace::Letter;
using catrace::Word;

/// Digit word: "0120" -> {0,1,2,0}.
inline Word w(const std::string& s) {
  Word out;
  for (char c : s) out.push_back(static_cast<Letter>(c - '0'));
  return out;
}

inline std::string str(const Word& x) {
  std::string s;
  for (Letter a : x) s += static_cast<char>('0' + a);
  return s;
}

inline std::vector<std::string> strs(const std::vector<Word>& ws) {
  std::vector<std::string> out;
  for (const auto& x : ws) out.push_back(str(x));
  return out;
}

inline std::vector<Word> ws(std::initializer_list<const char*> l) {
  std::vector<Word> out;
  for (const char* s : l) out.push_back(w(s));
  return out;
}

/// All words of length n over q letters in lexicographic order.
inline std::vector<Word> all_words(std::size_t q, std::size_t n) {
  std::vector<Word> out;
  Word cur(n, 0);
  while (true) {
    out.push_back(cur);
    std::size_t j = n;
    while (j > 0) {
      if (++cur[j - 1] < q) break;
      cur[--j] = 0;
    }
    if (j == 0) break;
  }
  return out;
}

inline catrace::CellularAutomaton random_ca(std::mt19937_64& rng, std::size_t q, int anchor, int d) {
  std::uint64_t n = 1;
  for (int i = 0; i < d; ++i) n *= q;
  std::vector<Letter> table(n);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(q) - 1);
  for (auto& t : table) t = static_cast<Letter>(pick(rng));
  return catrace::CellularAutomaton(catrace::LocalRule::dense(catrace::Alphabet::digits(q), anchor, d, table));
}

}  // namespace testing_helpers
