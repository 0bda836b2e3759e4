#pragma once

// Freezing word sets and borders (static, dynamical, ξ-separated) together
// with their radius-0 endomap automata.

#include "catrace/core.hpp"

namespace catrace {

struct FreezeReport {
  bool freezing = true;
  /// On failure: a word of length h+i that starts and ends with W-words,
  /// with the smallest offending i and then lexicographically least.
  std::optional<Word> counterexample;
  std::size_t offset = 0;
};

inline std::size_t common_length(const std::vector<Word>& w) {
  if (w.empty()) throw UsageError("word set is empty");
  const std::size_t h = w.front().size();
  for (const Word& x : w)
    if (x.size() != h) throw UsageError("word set has mixed lengths");
  return h;
}

/// W is p-freezing when A^i W ∩ W A^i = ∅ for every i in [1, p].
inline FreezeReport check_freezing(const std::vector<Word>& words, std::size_t p) {
  const std::size_t h = common_length(words);
  if (p >= h) throw UsageError("freezing depth p must be smaller than the word length");
  std::vector<Word> w = words;
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  FreezeReport rep;
  for (std::size_t i = 1; i <= p; ++i) {
    // u starts the word, v ends it: u[i..h) = v[0..h−i).
    std::unordered_map<Word, std::vector<const Word*>, WordHash> by_prefix;
    for (const Word& v : w) by_prefix[Word(v.begin(), v.end() - static_cast<std::ptrdiff_t>(i))].push_back(&v);
    std::optional<Word> best;
    for (const Word& u : w) {
      auto it = by_prefix.find(Word(u.begin() + static_cast<std::ptrdiff_t>(i), u.end()));
      if (it == by_prefix.end()) continue;
      for (const Word* v : it->second) {
        Word z = u;
        z.insert(z.end(), v->end() - static_cast<std::ptrdiff_t>(i), v->end());
        if (!best || z < *best) best = std::move(z);
      }
    }
    if (best) {
      rep.freezing = false;
      rep.counterexample = std::move(best);
      rep.offset = i;
      return rep;
    }
  }
  return rep;
}

inline bool is_freezing(const std::vector<Word>& words, std::size_t p) { return check_freezing(words, p).freezing; }

/// All concatenations u·v with u ∈ U, v ∈ V, sorted.
inline std::vector<Word> concat_sets(const std::vector<Word>& u, const std::vector<Word>& v) {
  std::vector<Word> out;
  out.reserve(u.size() * v.size());
  for (const Word& a : u)
    for (const Word& b : v) {
      Word z = a;
      z.insert(z.end(), b.begin(), b.end());
      out.push_back(std::move(z));
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Borders

/// A border (Υ, δ_Υ) for blocks of length `block_length`: Υ ⊆ A^l sorted,
/// δ given as an index map on Υ.
struct Border {
  Alphabet alphabet;
  std::vector<Word> words;
  std::vector<std::size_t> delta;
  std::size_t block_length = 0;

  std::size_t length() const { return words.empty() ? 0 : words.front().size(); }
  std::size_t required_freezing() const { return (block_length + length()) / 2; }
  std::size_t index_of(const Word& w) const {
    auto it = std::lower_bound(words.begin(), words.end(), w);
    if (it == words.end() || *it != w) throw UsageError("word is not in the border");
    return static_cast<std::size_t>(it - words.begin());
  }
};

/// Checks δ closure and ⌊(k+l)/2⌋-freezing; throws PreconditionError.
inline void validate_border(const Border& b) {
  common_length(b.words);
  if (!std::is_sorted(b.words.begin(), b.words.end()) ||
      std::adjacent_find(b.words.begin(), b.words.end()) != b.words.end())
    throw UsageError("border words must be sorted and distinct");
  if (b.delta.size() != b.words.size()) throw PreconditionError("border endomap is not total");
  for (std::size_t j : b.delta)
    if (j >= b.words.size()) throw PreconditionError("border endomap leaves the border");
  const std::size_t p = b.required_freezing();
  if (p >= b.length()) throw PreconditionError("border too short for its block length");
  auto rep = check_freezing(b.words, p);
  if (!rep.freezing)
    throw PreconditionError("border is not " + std::to_string(p) + "-freezing (overlap " +
                            format_word(b.alphabet, *rep.counterexample) + ")");
}

namespace detail {

inline Border make_border(const Alphabet& alph, std::vector<Word> words, const std::vector<std::size_t>& next_in_input,
                          std::size_t k) {
  std::vector<std::size_t> order(words.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return words[a] < words[b]; });
  std::vector<std::size_t> rank(words.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  Border b;
  b.alphabet = alph;
  b.block_length = k;
  b.delta.resize(words.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    b.words.push_back(words[order[r]]);
    b.delta[r] = rank[next_in_input[order[r]]];
  }
  validate_border(b);
  return b;
}

}  // namespace detail

/// Υ = {one·zero^k}, δ = id.
inline Border static_border(const Alphabet& alph, Letter zero, Letter one, std::size_t k) {
  if (zero == one) throw UsageError("static border needs two distinct letters");
  if (k < 1) throw UsageError("static border needs k >= 1");
  Word w{one};
  w.insert(w.end(), k, zero);
  return detail::make_border(alph, {w}, {0}, k);
}

/// Υ = { u_i^{k+3n} · rev(γ^i u) · γ^i u · u_i^n : 0 ≤ i < n }, n = |u|, with
/// δ sending the i-th word to the (i+1 mod n)-th.
inline Border dynamic_border(const Alphabet& alph, const Word& u, std::size_t k) {
  const std::size_t n = u.size();
  if (n < 2 || !is_primitive(u) || is_uniform(u))
    throw UsageError("dynamic border needs a primitive non-uniform word of length >= 2");
  std::vector<Word> words;
  std::vector<std::size_t> next;
  for (std::size_t i = 0; i < n; ++i) {
    const Word g = rotate_word(u, i);
    Word w(k + 3 * n, u[i]);
    const Word r = reversed(g);
    w.insert(w.end(), r.begin(), r.end());
    w.insert(w.end(), g.begin(), g.end());
    w.insert(w.end(), n, u[i]);
    words.push_back(std::move(w));
    next.push_back((i + 1) % n);
  }
  return detail::make_border(alph, std::move(words), next, k);
}

/// Υ = { a·b^{k+pad} : ξ^j(a) ≠ ξ^j(b) for all j }, δ = ξ letterwise.
inline Border xi_border(const Alphabet& alph, const LetterMap& xi, std::size_t k, std::size_t pad = 3) {
  if (!xi.is_total() || xi.alphabet_size() != alph.size()) throw UsageError("xi border needs a total letter map");
  std::vector<Word> words;
  for (std::size_t a = 0; a < alph.size(); ++a)
    for (std::size_t b = 0; b < alph.size(); ++b)
      if (a != b && xi.separates_forever(static_cast<Letter>(a), static_cast<Letter>(b))) {
        Word w{static_cast<Letter>(a)};
        w.insert(w.end(), k + pad, static_cast<Letter>(b));
        words.push_back(std::move(w));
      }
  if (words.empty()) throw PreconditionError("empty border: the letter map is nilpotent");
  std::sort(words.begin(), words.end());
  std::vector<std::size_t> next;
  for (const Word& w : words) {
    Word img(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) img[j] = xi(w[j]);
    next.push_back(static_cast<std::size_t>(std::lower_bound(words.begin(), words.end(), img) - words.begin()));
  }
  return detail::make_border(alph, std::move(words), next, k);
}

/// Product alphabet Υ ⊆ A^l whose letters are the border words.
inline Alphabet border_alphabet(const Border& b) { return Alphabet::product(b.alphabet, b.words); }

/// Δ_Υ: radius-0 automaton on Υ applying δ.
inline CellularAutomaton border_delta_ca(const Border& b) {
  const Alphabet alph = border_alphabet(b);
  std::vector<Letter> table(b.words.size());
  for (std::size_t i = 0; i < b.words.size(); ++i) table[*alph.encode(b.words[i])] = *alph.encode(b.words[b.delta[i]]);
  return CellularAutomaton(LocalRule::dense(alph, 0, 1, std::move(table)));
}

}  // namespace catrace
