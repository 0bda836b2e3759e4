#pragma once

// Semifinite automata: one-sided CA acting on finite words through end
// markers L and R, and their extension of a one-sided CA.

#include <optional>
#include <vector>

#include "catrace/core.hpp"

namespace catrace {

/// A CA over A ⊔ {L, R} whose configurations carry L only on the left of
/// the word and R only on its right. Letters of A keep their indices; L and
/// R are the two last letters.
struct SemifiniteAutomaton {
  Alphabet base;
  CellularAutomaton base_ca;
  CellularAutomaton extended;

  Letter left_marker() const { return static_cast<Letter>(base.size()); }
  Letter right_marker() const { return static_cast<Letter>(base.size() + 1); }
  int diameter() const { return extended.diameter(); }
};

/// Extension of a one-sided CA G: away from R the rule is g; when the first
/// R sits at position k+1, the window is cut there and padded with its last
/// letter before applying g. Marker cells stay markers.
inline SemifiniteAutomaton extend_onesided(const CellularAutomaton& g, std::uint64_t cap = kDefaultTableCap) {
  if (!is_onesided(g)) throw UsageError("semifinite extension needs a one-sided automaton");
  CellularAutomaton g0 = to_anchor_zero(g, cap);
  const Alphabet& a = g0.alphabet();
  if (a.find("L") || a.find("R")) throw UsageError("letters L and R are reserved for end markers");
  std::vector<std::string> names = a.names();
  names.push_back("L");
  names.push_back("R");
  const auto q = static_cast<Letter>(a.size());
  const LocalRule inner = g0.rule();
  auto rule = LocalRule::tabulate(
      Alphabet(names), 0, g0.diameter(),
      [inner, q](std::span<const Letter> w) {
        if (w[0] >= q) return w[0];
        Word x(w.begin(), w.end());
        for (std::size_t j = 1; j < x.size(); ++j)
          if (x[j] >= q) {
            std::fill(x.begin() + static_cast<std::ptrdiff_t>(j), x.end(), x[j - 1]);
            break;
          }
        return inner(x);
      },
      cap);
  return SemifiniteAutomaton{a, g0, CellularAutomaton(std::move(rule))};
}

/// One step on a finite nonempty word over the base alphabet.
inline Word sf_step(const SemifiniteAutomaton& f, const Word& u) {
  if (u.empty()) throw UsageError("semifinite step needs a nonempty word");
  const auto d = static_cast<std::size_t>(f.diameter());
  Word padded = u;
  padded.insert(padded.end(), d - 1, f.right_marker());
  Word out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = f.extended.rule()(std::span<const Letter>(padded).subspan(i, d));
  return out;
}

/// Columns of every cell of u over `depth` rows: result[i] is the column of
/// cell i.
inline std::vector<Word> sf_trace(const SemifiniteAutomaton& f, const Word& u, std::size_t depth) {
  std::vector<Word> cols(u.size());
  Word row = u;
  for (std::size_t t = 0; t < depth; ++t) {
    for (std::size_t i = 0; i < row.size(); ++i) cols[i].push_back(row[i]);
    if (t + 1 < depth) row = sf_step(f, row);
  }
  return cols;
}

/// The extension seen as a rule on a cell and its optional right neighbour:
/// g̃(a, b) and g̃(a, λ). Needs an extension of diameter at most 2.
class BlockRule {
 public:
  BlockRule() = default;

  explicit BlockRule(const SemifiniteAutomaton& f) : alphabet_(f.base) {
    if (f.diameter() > 2) throw UsageError("block rule needs a semifinite automaton of diameter at most 2");
    const std::size_t q = alphabet_.size();
    pair_.resize(q * q);
    end_.resize(q);
    for (std::size_t a = 0; a < q; ++a) {
      end_[a] = sf_step(f, Word{static_cast<Letter>(a)}).front();
      for (std::size_t b = 0; b < q; ++b)
        pair_[a * q + b] = sf_step(f, Word{static_cast<Letter>(a), static_cast<Letter>(b)}).front();
    }
  }

  /// From explicit tables: pairs indexed [a·|A| + b], ends indexed [a].
  static BlockRule from_tables(Alphabet alphabet, std::vector<Letter> pairs, std::vector<Letter> ends) {
    const std::size_t q = alphabet.size();
    if (pairs.size() != q * q || ends.size() != q) throw UsageError("block rule tables have the wrong size");
    for (Letter a : pairs)
      if (a >= q) throw UsageError("block rule output outside alphabet");
    for (Letter a : ends)
      if (a >= q) throw UsageError("block rule output outside alphabet");
    BlockRule r;
    r.alphabet_ = std::move(alphabet);
    r.pair_ = std::move(pairs);
    r.end_ = std::move(ends);
    return r;
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<Letter>& pair_table() const noexcept { return pair_; }
  const std::vector<Letter>& end_table() const noexcept { return end_; }

  Letter operator()(Letter a, std::optional<Letter> b) const {
    return b ? pair_[a * alphabet_.size() + *b] : end_[a];
  }

 private:
  Alphabet alphabet_;
  std::vector<Letter> pair_;
  std::vector<Letter> end_;
};

inline BlockRule block_rule(const SemifiniteAutomaton& f) { return BlockRule(f); }

}  // namespace catrace
