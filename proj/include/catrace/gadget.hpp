#pragma once

// Spreading-controlled products, the four-layer trace gadget, and bounded
// mortality and nilpotency checks.

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "catrace/trace.hpp"

namespace catrace {

/// H on (A1 ⊔ A2) × B: (f2(a), n2(b)) when a ∈ A2^d and b ∈ (B2∖{0})^d,
/// (f1∘φ(a), n(b)) otherwise. B2 ⊆ B by letter names; φ sends A2 letters
/// to the least letter of A1.
struct ControlledProductSpec {
  CellularAutomaton f1, f2, n, n2;
  std::string zero = "0";
};

namespace detail {

/// Union of two alphabets: a product alphabet when both are products of the
/// same height over the same base, otherwise plain names (A1 first).
inline Alphabet union_alphabet(const Alphabet& a1, const Alphabet& a2) {
  for (const auto& x : a1.names())
    if (a2.find(x)) throw UsageError("controlled product needs disjoint alphabets (shared letter " + x + ")");
  if (a1.is_product() && a2.is_product() && a1.base() == a2.base() && a1.height() == a2.height()) {
    std::vector<Word> tuples;
    for (std::size_t x = 0; x < a1.size(); ++x) tuples.push_back(a1.tracks(static_cast<Letter>(x)));
    for (std::size_t b = 0; b < a2.size(); ++b) tuples.push_back(a2.tracks(static_cast<Letter>(b)));
    return Alphabet::product(a1.base(), tuples);
  }
  std::vector<std::string> names = a1.names();
  names.insert(names.end(), a2.names().begin(), a2.names().end());
  return Alphabet(names);
}

inline std::vector<int> letter_map_by_name(const Alphabet& from, const Alphabet& to) {
  std::vector<int> out(from.size(), -1);
  for (std::size_t a = 0; a < from.size(); ++a)
    if (auto b = to.find(from.name(static_cast<Letter>(a)))) out[a] = *b;
  return out;
}

}  // namespace detail

inline CellularAutomaton controlled_product(const ControlledProductSpec& spec, std::uint64_t cap = kDefaultTableCap) {
  const Alphabet& a1 = spec.f1.alphabet();
  const Alphabet& a2 = spec.f2.alphabet();
  const Alphabet& b = spec.n.alphabet();
  const Alphabet& b2 = spec.n2.alphabet();
  const Alphabet a = detail::union_alphabet(a1, a2);
  const auto zero2 = b2.find(spec.zero);
  if (!zero2) throw UsageError("spreading state '" + spec.zero + "' is not a letter of N2");
  if (!is_spreading_state(spec.n2, *zero2, cap)) throw PreconditionError("state " + spec.zero + " is not spreading for N2");
  const auto b2_in_b = detail::letter_map_by_name(b2, b);
  for (int x : b2_in_b)
    if (x < 0) throw UsageError("alphabet of N2 must be contained in that of N");

  const std::array<CellularAutomaton, 4> all{spec.f1, spec.f2, spec.n, spec.n2};
  const auto [m, d] = common_geometry(all);
  const CellularAutomaton f1 = pad_geometry(spec.f1, m, d, cap);
  const CellularAutomaton f2 = pad_geometry(spec.f2, m, d, cap);
  const CellularAutomaton n = pad_geometry(spec.n, m, d, cap);
  const CellularAutomaton n2 = pad_geometry(spec.n2, m, d, cap);

  const auto to_a1 = detail::letter_map_by_name(a, a1);
  const auto to_a2 = detail::letter_map_by_name(a, a2);
  const auto from_b_to_b2 = detail::letter_map_by_name(b, b2);
  std::vector<Letter> a1_in_a(a1.size()), a2_in_a(a2.size());
  for (std::size_t x = 0; x < a1.size(); ++x) a1_in_a[x] = a.letter(a1.name(static_cast<Letter>(x)));
  for (std::size_t x = 0; x < a2.size(); ++x) a2_in_a[x] = a.letter(a2.name(static_cast<Letter>(x)));
  std::vector<Letter> phi(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) phi[x] = to_a1[x] >= 0 ? static_cast<Letter>(to_a1[x]) : Letter{0};

  auto [ab, pair_to] = stack_alphabets(a, b);
  const std::size_t nb = b.size();
  std::vector<std::pair<Letter, Letter>> from(ab.size());
  for (std::size_t i = 0; i < pair_to.size(); ++i)
    from[pair_to[i]] = {static_cast<Letter>(i / nb), static_cast<Letter>(i % nb)};
  const auto z = static_cast<Letter>(b.letter(spec.zero));

  const auto width = static_cast<std::size_t>(d);
  return CellularAutomaton(LocalRule::tabulate(
      ab, m, d,
      [&](std::span<const Letter> w) {
        Word x(width), y(width);
        bool controlled = true;
        for (std::size_t j = 0; j < width; ++j) {
          x[j] = from[w[j]].first;
          y[j] = from[w[j]].second;
          controlled = controlled && to_a2[x[j]] >= 0 && from_b_to_b2[y[j]] >= 0 && y[j] != z;
        }
        if (controlled) {
          for (std::size_t j = 0; j < width; ++j) {
            x[j] = static_cast<Letter>(to_a2[x[j]]);
            y[j] = static_cast<Letter>(from_b_to_b2[y[j]]);
          }
          const Letter oa = a2_in_a[f2.rule()(x)];
          const auto ob = static_cast<Letter>(b2_in_b[n2.rule()(y)]);
          return pair_to[oa * nb + ob];
        }
        for (std::size_t j = 0; j < width; ++j) x[j] = phi[x[j]];
        return pair_to[a1_in_a[f1.rule()(x)] * nb + n.rule()(y)];
      },
      cap));
}

/// Four-layer gadget on {0,1}^4: A1 = {(a,a,b)}, A2 the other triples,
/// F1 = (N×N×G)|A1, F2 = (σ×σ×G)|A2, controlled by N2 with spreading 0.
/// With N2 nilpotent its polytrace ultimately coincides with τ_G; otherwise
/// it is the full shift.
inline CellularAutomaton four_layer_gadget(const CellularAutomaton& g, const LetterMap& xi, const CellularAutomaton& n2,
                                           std::size_t validation_depth = 6, std::uint64_t cap = kDefaultTableCap) {
  const Alphabet bin = Alphabet::digits(2);
  for (const auto* c : {&g, &n2})
    if (!same_letters(c->alphabet(), bin)) throw UsageError("four-layer gadget works over {0,1}");
  if (!xi.is_total() || xi.alphabet_size() != 2) throw UsageError("letter map must be total on {0,1}");
  if (!is_spreading_state(n2, 0, cap)) throw PreconditionError("state 0 is not spreading for N2");
  const auto lang = trace(g, validation_depth);
  for (Letter a = 0; a < 2; ++a)
    if (!lang.contains(xi.orbit(a, validation_depth)))
      throw PreconditionError("orbit of " + std::to_string(a) + " under the letter map is not in the trace of G");

  const CellularAutomaton n = radius0_from_map(bin, xi);
  const CellularAutomaton s = shift_ca(bin);
  const std::array<CellularAutomaton, 3> geo{g, s, n2};
  const auto [m, d] = common_geometry(geo);
  const CellularAutomaton gp = pad_geometry(g, m, d, cap), np = pad_geometry(n, m, d, cap), sp = pad_geometry(s, m, d, cap);
  const CellularAutomaton nng = product(product(np, np, cap), gp, cap);
  const CellularAutomaton ssg = product(product(sp, sp, cap), gp, cap);
  std::vector<Letter> l1, l2;
  for (std::size_t x = 0; x < nng.alphabet().size(); ++x) {
    const Word t = nng.alphabet().tracks(static_cast<Letter>(x));
    (t[0] == t[1] ? l1 : l2).push_back(static_cast<Letter>(x));
  }
  ControlledProductSpec spec{restrict_to(nng, l1, cap), restrict_to(ssg, l2, cap), np, pad_geometry(n2, m, d, cap), "0"};
  return controlled_product(spec, cap);
}

// ---------------------------------------------------------------------------
// Spreading sets

/// U ⊆ A^k is spreading when F([U]_1) ⊆ [U]_0 ∩ [U]_1 or
/// F([U]_0) ⊆ [U]_0 ∩ [U]_1; checked exactly over all relevant windows.
inline bool is_spreading_set(const CellularAutomaton& f, const std::vector<Word>& u) {
  if (u.empty()) return false;
  const std::size_t k = common_length(u);
  const std::set<Word> us(u.begin(), u.end());
  const std::int64_t m = f.anchor(), d = f.diameter();
  const auto K = static_cast<std::int64_t>(k);
  const std::size_t q = f.alphabet().size();
  auto holds = [&](std::int64_t fixed) {
    // Initial positions [lo, hi] feeding output cells 0 .. k.
    const std::int64_t lo = std::min<std::int64_t>(-m, fixed), hi = std::max<std::int64_t>(K - m + d - 1, fixed + K - 1);
    const auto len = static_cast<std::size_t>(hi - lo + 1);
    const auto off = static_cast<std::size_t>(fixed - lo);
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < len; ++j)
      if (j < off || j >= off + k) free.push_back(j);
    if (detail::checked_pow(q, free.size(), kDefaultEvalCap) * us.size() > kDefaultEvalCap)
      throw CapExceeded("spreading-set check exceeds the evaluation cap");
    Word x(len, 0);
    for (const Word& w : us) {
      std::copy(w.begin(), w.end(), x.begin() + static_cast<std::ptrdiff_t>(off));
      for (std::size_t j : free) x[j] = 0;
      while (true) {
        Word img(k + 1);
        for (std::int64_t c = 0; c <= K; ++c)
          img[static_cast<std::size_t>(c)] =
              f.rule()(std::span<const Letter>(x).subspan(static_cast<std::size_t>(c - m - lo), static_cast<std::size_t>(d)));
        if (!us.count(Word(img.begin(), img.begin() + static_cast<std::ptrdiff_t>(k))) ||
            !us.count(Word(img.begin() + 1, img.end())))
          return false;
        std::size_t t = free.size();
        while (t > 0) {
          if (++x[free[t - 1]] < q) break;
          x[free[--t]] = 0;
        }
        if (t == 0) break;
      }
    }
    return true;
  };
  return holds(1) || holds(0);
}

// ---------------------------------------------------------------------------
// Bounded procedures

enum class MortalityVerdict { mortal_on_tested, not_mortal, inconclusive };

inline std::string verdict_name(MortalityVerdict v) {
  switch (v) {
    case MortalityVerdict::mortal_on_tested: return "MORTAL-WITNESSED-ON-TESTED";
    case MortalityVerdict::not_mortal: return "NOT-MORTAL";
    case MortalityVerdict::inconclusive: return "INCONCLUSIVE";
  }
  return "";
}

struct MortalityReport {
  MortalityVerdict verdict = MortalityVerdict::inconclusive;
  std::optional<PeriodicConfiguration> certificate;
  std::size_t tested = 0;
  std::size_t latest_hit = 0;
};

namespace detail {

/// Steps until some cell of the orbit of x lies in `target`, or nullopt
/// when the (eventually periodic) orbit never reaches it.
inline std::optional<std::size_t> first_hit(const CellularAutomaton& f, PeriodicConfiguration x,
                                            const std::vector<bool>& target) {
  std::set<Word> seen;
  for (std::size_t t = 0;; ++t) {
    for (Letter a : x.period())
      if (target[a]) return t;
    if (!seen.insert(x.segment(0, x.period().size())).second) return std::nullopt;
    x = f.step(x);
  }
}

/// Periodic configurations of period exactly n up to rotation (least
/// rotations of primitive words), lexicographic.
inline std::vector<Word> necklaces(std::size_t q, std::size_t n) {
  std::vector<Word> out;
  Word cur(n, 0);
  while (true) {
    if (is_primitive(cur) && least_rotation_index(cur) == 0) out.push_back(cur);
    std::size_t j = n;
    while (j > 0) {
      if (++cur[j - 1] < q) break;
      cur[--j] = 0;
    }
    if (j == 0) break;
  }
  return out;
}

}  // namespace detail

/// Checks every periodic configuration of period ≤ p for a cell in A′
/// within J steps; a periodic orbit avoiding A′ forever is a certificate.
inline MortalityReport mortality_bounded(const CellularAutomaton& f, const std::vector<Letter>& target, std::size_t j,
                                         std::size_t p) {
  std::vector<bool> in(f.alphabet().size(), false);
  for (Letter a : target) in.at(a) = true;
  MortalityReport rep;
  bool late = false;
  for (std::size_t n = 1; n <= p; ++n)
    for (const Word& w : detail::necklaces(f.alphabet().size(), n)) {
      ++rep.tested;
      PeriodicConfiguration x(w);
      auto hit = detail::first_hit(f, x, in);
      if (!hit) {
        rep.verdict = MortalityVerdict::not_mortal;
        rep.certificate = x;
        return rep;
      }
      rep.latest_hit = std::max(rep.latest_hit, *hit);
      late = late || *hit > j;
    }
  rep.verdict = late ? MortalityVerdict::inconclusive : MortalityVerdict::mortal_on_tested;
  return rep;
}

enum class NilpotencyVerdict { yes, not_nilpotent, not_within };

inline std::string verdict_name(NilpotencyVerdict v) {
  switch (v) {
    case NilpotencyVerdict::yes: return "YES";
    case NilpotencyVerdict::not_nilpotent: return "NO";
    case NilpotencyVerdict::not_within: return "NOT-WITHIN-J";
  }
  return "";
}

struct NilpotencyReport {
  NilpotencyVerdict verdict = NilpotencyVerdict::not_within;
  std::optional<Letter> zero;
  std::optional<Word> column;
  std::optional<PeriodicConfiguration> orbit;
};

/// Exact check of F^J(A^Z) = {∞0∞} through the depth-(J+1) trace. On
/// failure, periodic configurations of period ≤ p are searched for a second
/// cyclic configuration, which proves F is not nilpotent.
inline NilpotencyReport nilpotency_bounded(const CellularAutomaton& f, std::size_t j, std::size_t p = 6,
                                           Engine engine = Engine::automatic) {
  if (j < 1) throw UsageError("nilpotency check needs J >= 1");
  const auto lang = trace(f, j + 1, 1, engine);
  NilpotencyReport rep;
  std::set<Letter> last;
  for (const Word& c : lang.blocks) last.insert(c.back());
  if (last.size() == 1) {
    rep.verdict = NilpotencyVerdict::yes;
    rep.zero = *last.begin();
    return rep;
  }
  // Least column whose last row differs from that of the least column.
  for (const Word& c : lang.blocks)
    if (c.back() != lang.blocks.front().back()) {
      rep.column = c;
      break;
    }
  std::size_t cyclic = 0;
  for (std::size_t n = 1; n <= p && !rep.orbit; ++n)
    for (const Word& w : detail::necklaces(f.alphabet().size(), n)) {
      PeriodicConfiguration x(w);
      PeriodicConfiguration y = x;
      bool back = false;
      std::set<Word> seen;
      while (seen.insert(y.segment(0, w.size())).second) {
        y = f.step(y);
        if (y.segment(0, w.size()) == w) {
          back = true;
          break;
        }
      }
      if (back && ++cyclic == 2) {
        rep.orbit = x;
        break;
      }
    }
  rep.verdict = rep.orbit ? NilpotencyVerdict::not_nilpotent : NilpotencyVerdict::not_within;
  return rep;
}

}  // namespace catrace
