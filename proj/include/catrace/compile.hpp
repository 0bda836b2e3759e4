#pragma once

// Compilers from subshifts to automata whose (partial, poly-, ultimate)
// traces realize them, with witness recipes for every target word.

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "catrace/freeze.hpp"
#include "catrace/semifinite.hpp"
#include "catrace/trace.hpp"

namespace catrace {

/// An initial configuration whose column at `cell`, read on `track` when
/// the alphabet is a product, reproduces a target word.
struct Witness {
  PeriodicConfiguration config;
  std::int64_t cell = 0;
  std::size_t track = 0;
};

using WitnessFn = std::function<std::optional<Witness>(const Word&)>;

/// Observed column of a witness over `depth` rows.
inline Word witness_column(const CellularAutomaton& f, const Witness& w, std::size_t depth) {
  Word col = f.column(w.config, w.cell, depth);
  if (f.alphabet().is_product())
    for (Letter& a : col) a = f.alphabet().tracks(a).at(w.track);
  return col;
}

/// Result of a compiler. `domain` is set for partial automata; `offset` is
/// the number of leading rows dropped for ultimate coincidence.
struct CompiledArtifact {
  CellularAutomaton ca;
  std::optional<Subshift> domain;
  std::string provenance;
  std::vector<std::pair<std::string, std::string>> details;
  WitnessFn witness;
  std::string witness_recipe;
  std::size_t offset = 0;

  PartialCA partial() const { return PartialCA{ca, domain ? *domain : detail::full_shift(ca.alphabet())}; }
};

namespace detail {

inline std::string join_words(const Alphabet& alph, const std::vector<Word>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ", ";
    out += format_word(alph, words[i]);
  }
  return out;
}

inline std::vector<Word> split_words(const Alphabet& alph, const std::string& text) {
  std::vector<Word> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(parse_word(alph, item.substr(b, e - b + 1)));
  }
  return out;
}

inline std::string join_indices(const std::vector<Letter>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

inline std::vector<Letter> split_indices(const std::string& text) {
  std::vector<Letter> out;
  std::stringstream ss(text);
  int x;
  while (ss >> x) {
    if (x < 0 || x > 255) throw UsageError("recipe index out of range");
    out.push_back(static_cast<Letter>(x));
  }
  return out;
}

inline const std::string& field(const Recipe& r, const std::string& key) {
  for (const auto& [k, v] : r.fields)
    if (k == key) return v;
  throw UsageError("recipe '" + r.kind + "' lacks field '" + key + "'");
}

/// Dense when the table fits the cap, procedural with its recipe otherwise.
inline LocalRule finish_rule(const Alphabet& alph, int anchor, int diameter, LocalRule::Evaluator f, Recipe recipe,
                             std::uint64_t cap) {
  const std::uint64_t n = checked_pow(alph.size(), static_cast<std::uint64_t>(diameter), cap);
  if (n <= cap) return LocalRule::tabulate(alph, anchor, diameter, f, cap);
  return LocalRule::procedural(alph, anchor, diameter, std::move(f), std::move(recipe));
}

/// Block automaton written with anchor 1 and diameter 3.
inline CellularAutomaton radius_one(const CellularAutomaton& g, std::uint64_t cap) {
  if (g.anchor() > 1 || g.diameter() - g.anchor() > 2)
    throw UsageError("block automaton must have radius at most 1");
  return pad_geometry(g, 1, 3, cap);
}

/// Rule of ⊟_h(G): finds the macrocell u⁰ holding the center at offset i and
/// outputs track i of g(u⁻¹, u⁰, u¹); identity where no decomposition exists.
inline LocalRule::Evaluator ungroup_evaluator(std::size_t h, const Alphabet& blocks, const LocalRule& g) {
  std::unordered_map<Word, Letter, WordHash> index;
  for (std::size_t b = 0; b < blocks.size(); ++b) index.emplace(blocks.tracks(static_cast<Letter>(b)), static_cast<Letter>(b));
  return [h, blocks, g, index = std::move(index)](std::span<const Letter> w) {
    Word part(h);
    auto find = [&](std::size_t start) -> int {
      std::copy(w.begin() + static_cast<std::ptrdiff_t>(start), w.begin() + static_cast<std::ptrdiff_t>(start + h),
                part.begin());
      auto it = index.find(part);
      return it == index.end() ? -1 : it->second;
    };
    for (std::size_t i = 0; i < h; ++i) {
      const std::size_t s0 = 2 * h - 1 - i;
      const int b0 = find(s0);
      if (b0 < 0) continue;
      const int bl = find(s0 - h);
      if (bl < 0) continue;
      const int br = find(s0 + h);
      if (br < 0) continue;
      const Letter trio[3] = {static_cast<Letter>(bl), static_cast<Letter>(b0), static_cast<Letter>(br)};
      return blocks.tracks(g(trio))[i];
    }
    return w[2 * h - 1];
  };
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Grouping

/// ⊞_h: the configuration over the base alphabet spelling each block letter.
inline PeriodicConfiguration group(const Alphabet& blocks, const PeriodicConfiguration& x) {
  Word y;
  for (Letter a : x.period()) {
    Word t = blocks.tracks(a);
    y.insert(y.end(), t.begin(), t.end());
  }
  return PeriodicConfiguration(std::move(y), x.phase() * static_cast<std::int64_t>(blocks.height()));
}

/// Block words of an alphabet: the track tuples of its letters.
inline std::vector<Word> block_words(const Alphabet& blocks) {
  std::vector<Word> out;
  for (std::size_t b = 0; b < blocks.size(); ++b) out.push_back(blocks.tracks(static_cast<Letter>(b)));
  return out;
}

// ---------------------------------------------------------------------------
// Ungrouping

/// ⊟_h(G): partial CA of diameter 4h−1 and anchor 2h−1 on the macrocell SFT
/// of the block alphabet of G. Its trace is the polytrace of G.
inline CompiledArtifact ungroup_ca(const CellularAutomaton& g, WitnessFn block_witness = {},
                                   std::uint64_t cap = kDefaultTableCap) {
  const CellularAutomaton g1 = detail::radius_one(g, cap);
  const Alphabet& blocks = g1.alphabet();
  const Alphabet base = blocks.base();
  const std::size_t h = blocks.height();
  auto words = block_words(blocks);
  Subshift domain = macrocell_sft(base, words);
  const LocalRule table = g1.rule().tabulated(cap);
  Recipe recipe{"ungroup",
                {{"h", std::to_string(h)},
                 {"blocks", detail::join_words(base, words)},
                 {"table", detail::join_indices(table.table())}}};
  const int d = static_cast<int>(4 * h - 1);
  const int m = static_cast<int>(2 * h - 1);
  auto rule = detail::finish_rule(base, m, d, detail::ungroup_evaluator(h, blocks, table), std::move(recipe), cap);

  CompiledArtifact out{CellularAutomaton(std::move(rule)), std::move(domain), "ungroup", {{"h", std::to_string(h)}},
                       {}, "block witness grouped; cell = h * block cell + track", 0};
  if (block_witness)
    out.witness = [blocks, h, block_witness](const Word& z) -> std::optional<Witness> {
      auto bw = block_witness(z);
      if (!bw) return std::nullopt;
      return Witness{group(blocks, bw->config), bw->cell * static_cast<std::int64_t>(h) + static_cast<std::int64_t>(bw->track), 0};
    };
  return out;
}

/// ⊟_{k+l}(Δ_Υ × G) for G on blocks of length k and a border for length k.
/// Its trace is the union of the polytraces of G and Δ_Υ.
inline CompiledArtifact border_compose(const CellularAutomaton& g, const Border& border, WitnessFn g_witness = {},
                                       std::uint64_t cap = kDefaultTableCap) {
  const std::size_t k = g.alphabet().height();
  if (border.block_length != k)
    throw UsageError("border is built for blocks of length " + std::to_string(border.block_length) +
                     ", automaton blocks have length " + std::to_string(k));
  if (!same_letters(border.alphabet, g.alphabet().base())) throw UsageError("border and automaton use different base alphabets");
  validate_border(border);
  const CellularAutomaton g1 = detail::radius_one(g, cap);
  const CellularAutomaton delta = pad_geometry(border_delta_ca(border), 1, 3, cap);
  const CellularAutomaton composed = product(delta, g1, cap);
  auto [stacked, pair_to] = stack_alphabets(delta.alphabet(), g1.alphabet());
  const std::size_t l = border.length();

  WitnessFn block_witness;
  if (g_witness)
    block_witness = [g_witness, pair_to = pair_to, l](const Word& z) -> std::optional<Witness> {
      auto w = g_witness(z);
      if (!w) return std::nullopt;
      Word period;
      for (Letter a : w->config.period()) period.push_back(pair_to[a]);
      return Witness{PeriodicConfiguration(period, w->config.phase()), w->cell, l + w->track};
    };
  auto out = ungroup_ca(composed, block_witness, cap);
  out.provenance = "border-compose";
  out.details.push_back({"border-length", std::to_string(l)});
  out.witness_recipe = "border layer fixed to the least border word, block layer from the block witness";
  return out;
}

// ---------------------------------------------------------------------------
// SFT polytracer

namespace detail {

/// Extends a word of L(Σ) to the right up to length n with least letters.
inline std::optional<Word> extend_right(const Subshift& s, Word z, std::size_t n) {
  if (!contains_word(s, z)) return std::nullopt;
  while (z.size() < n) {
    bool grown = false;
    for (std::size_t a = 0; a < s.alphabet().size() && !grown; ++a) {
      z.push_back(static_cast<Letter>(a));
      if (contains_word(s, z))
        grown = true;
      else
        z.pop_back();
    }
    if (!grown) return std::nullopt;
  }
  return z;
}

}  // namespace detail

/// Sliding-window automaton on B = L_k(Σ), anchor 0, diameter 2:
/// g(u, v) = u_[1,k)·v_{k−1} when u_[1,k) = v_[0,k−1), else u_[1,k)·a with a
/// the least letter keeping the result in B. Its polytrace is Σ.
inline CompiledArtifact sft_polytracer(const Subshift& s, std::uint64_t cap = kDefaultTableCap) {
  if (s.kind() != Subshift::Kind::sft) throw UsageError("SFT polytracer needs an SFT");
  if (s.allowed().empty()) throw PreconditionError("SFT has an empty language");
  const std::size_t k = s.order();
  const Alphabet& a = s.alphabet();
  const Alphabet blocks = Alphabet::product(a, s.allowed());
  auto rule = LocalRule::tabulate(
      blocks, 0, 2,
      [&](std::span<const Letter> w) {
        const Word u = blocks.tracks(w[0]);
        const Word v = blocks.tracks(w[1]);
        Word next(u.begin() + 1, u.end());
        if (std::equal(next.begin(), next.end(), v.begin())) {
          next.push_back(v.back());
          return *blocks.encode(next);
        }
        next.push_back(0);
        for (std::size_t x = 0; x < a.size(); ++x) {
          next.back() = static_cast<Letter>(x);
          if (auto b = blocks.encode(next)) return *b;
        }
        throw PreconditionError("SFT is not trimmed");
      },
      cap);
  CompiledArtifact out{CellularAutomaton(std::move(rule)), std::nullopt, "sft-polytracer",
                       {{"k", std::to_string(k)}}, {}, "cell i holds z'[i, i+k) for a right extension z' of z", 0};
  out.witness = [s, blocks, k](const Word& z) -> std::optional<Witness> {
    const std::size_t cells = z.size() + 1;
    auto ext = detail::extend_right(s, z, cells + k - 1);
    if (!ext) return std::nullopt;
    Word period(cells);
    for (std::size_t i = 0; i < cells; ++i)
      period[i] = *blocks.encode(Word(ext->begin() + static_cast<std::ptrdiff_t>(i),
                                      ext->begin() + static_cast<std::ptrdiff_t>(i + k)));
    return Witness{PeriodicConfiguration(std::move(period)), 0, 0};
  };
  return out;
}

// ---------------------------------------------------------------------------
// Totalization

/// G̃ = G∘Ψ on the full power A^k, where ψ fixes B and sends every other
/// letter to the least letter of B.
inline CellularAutomaton totalize(const CellularAutomaton& g, std::uint64_t cap = kDefaultTableCap) {
  const Alphabet& b = g.alphabet();
  if (!b.is_product()) return g;
  const Alphabet full = Alphabet::full_power(b.base(), b.height());
  if (full.size() == b.size()) return g;
  std::vector<Letter> psi(full.size()), back(b.size());
  for (std::size_t x = 0; x < full.size(); ++x) psi[x] = b.encode(full.tracks(static_cast<Letter>(x))).value_or(0);
  for (std::size_t y = 0; y < b.size(); ++y) back[y] = *full.encode(b.tracks(static_cast<Letter>(y)));
  const LocalRule inner = g.rule();
  return CellularAutomaton(LocalRule::tabulate(
      full, g.anchor(), g.diameter(),
      [&](std::span<const Letter> w) {
        Word x(w.size());
        for (std::size_t j = 0; j < w.size(); ++j) x[j] = psi[w[j]];
        return back[inner(x)];
      },
      cap));
}

/// Re-encodes a witness over B into the letters of another alphabet with
/// the same tracks (e.g. after totalization).
inline WitnessFn reencode_witness(const Alphabet& from, const Alphabet& to, WitnessFn w) {
  if (!w) return {};
  return [from, to, w](const Word& z) -> std::optional<Witness> {
    auto r = w(z);
    if (!r) return std::nullopt;
    Word period;
    for (Letter a : r->config.period()) period.push_back(*to.encode(from.tracks(a)));
    return Witness{PeriodicConfiguration(period, r->config.phase()), r->cell, r->track};
  };
}

// ---------------------------------------------------------------------------
// Nilpotent subshifts

namespace detail {

struct NilpotentBlocks {
  std::size_t j = 1;
  Letter zero = 0;
  std::vector<Word> words;   // 0^{3J} rev(u) u 0^J, in the order of `u`
  std::vector<Word> images;  // δ_B of each word
};

inline Word nilpotent_block(const Word& u, std::size_t j, Letter zero) {
  Word w(3 * j, zero);
  Word r = reversed(u);
  w.insert(w.end(), r.begin(), r.end());
  w.insert(w.end(), u.begin(), u.end());
  w.insert(w.end(), j, zero);
  return w;
}

inline NilpotentBlocks nilpotent_blocks(const std::vector<Word>& lang, std::size_t j, Letter zero) {
  NilpotentBlocks nb{j, zero, {}, {}};
  for (const Word& u : lang) {
    nb.words.push_back(nilpotent_block(u, j, zero));
    Word v(u.begin() + 1, u.end());
    v.push_back(zero);
    nb.images.push_back(nilpotent_block(v, j, zero));
  }
  return nb;
}

/// Outputs δ_B(u) at the center's offset when some non-zero block u covers
/// the center, and the zero letter otherwise.
inline LocalRule::Evaluator nilpotent_evaluator(const NilpotentBlocks& nb) {
  const std::size_t h = 6 * nb.j;
  std::unordered_map<Word, std::size_t, WordHash> index;
  const Word zeros(h, nb.zero);
  for (std::size_t i = 0; i < nb.words.size(); ++i)
    if (nb.words[i] != zeros) index.emplace(nb.words[i], i);
  return [h, index = std::move(index), images = nb.images, zero = nb.zero](std::span<const Letter> w) {
    Word part(h);
    for (std::size_t i = 0; i < h; ++i) {
      std::copy(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i + h), part.begin());
      auto it = index.find(part);
      if (it != index.end()) return images[it->second][h - 1 - i];
    }
    return zero;
  };
}

}  // namespace detail

/// Partial CA of radius h−1, h = 6J, on the factor SFT of the blocks
/// 0^{3J} rev(u) u 0^J (u ∈ L_J(Σ)); its trace is Σ.
inline CompiledArtifact nilpotent_partial_ca(const Subshift& s, std::uint64_t cap = kDefaultTableCap) {
  auto idx = nilpotency_index(s);
  if (!idx) throw PreconditionError("subshift is not nilpotent");
  const Letter zero = *weak_nilpotency_letter(s);
  const std::size_t j = std::max<std::size_t>(*idx, 1);
  const std::size_t h = 6 * j;
  const Alphabet& a = s.alphabet();
  auto nb = detail::nilpotent_blocks(language(s, j), j, zero);
  Subshift domain = block_factor_sft(a, nb.words);
  Recipe recipe{"nilpotent",
                {{"j", std::to_string(j)},
                 {"zero", a.name(zero)},
                 {"language", detail::join_words(a, language(s, j))}}};
  auto rule = detail::finish_rule(a, static_cast<int>(h - 1), static_cast<int>(2 * h - 1),
                                  detail::nilpotent_evaluator(nb), std::move(recipe), cap);
  CompiledArtifact out{CellularAutomaton(std::move(rule)),
                       std::move(domain),
                       "nilpotent",
                       {{"J", std::to_string(*idx)}, {"h", std::to_string(h)}},
                       {},
                       "single block 0^{3J} rev(u) u 0^J repeated, observed at cell 4J",
                       0};
  out.witness = [s, j, zero](const Word& z) -> std::optional<Witness> {
    Word u(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(std::min(z.size(), j)));
    for (std::size_t i = j; i < z.size(); ++i)
      if (z[i] != zero) return std::nullopt;
    auto ext = detail::extend_right(s, u, j);
    if (!ext) return std::nullopt;
    return Witness{PeriodicConfiguration(detail::nilpotent_block(*ext, j, zero)), static_cast<std::int64_t>(4 * j), 0};
  };
  return out;
}


// ---------------------------------------------------------------------------
// Partial traces

/// Largest depth at which a compiler re-checks its inputs with the engines.
inline constexpr std::size_t kValidationDepth = 4;

namespace detail {

inline void check_polytrace(const CellularAutomaton& g, const Subshift& s, std::size_t depth) {
  for (std::size_t n = 1; n <= depth; ++n)
    if (polytrace(g, n).blocks != language(s, n))
      throw PreconditionError("polytrace of the automaton differs from the subshift at depth " + std::to_string(n));
}

}  // namespace detail

/// Partial automaton whose trace is Σ, from an automaton polytracing Σ:
/// nilpotent Σ, else a dynamic border on the least non-uniform periodic
/// word, else a static border on two uniform periodic words.
inline CompiledArtifact partial_trace_compile(const Subshift& s, const CellularAutomaton& polytracer,
                                              WitnessFn polytracer_witness = {},
                                              std::size_t validation_depth = kValidationDepth,
                                              std::uint64_t cap = kDefaultTableCap) {
  detail::check_polytrace(polytracer, s, validation_depth);
  if (is_weakly_nilpotent(s)) {
    if (!nilpotency_index(s))
      throw PreconditionError("subshift is weakly nilpotent but not nilpotent, so no automaton polytraces it");
    auto out = nilpotent_partial_ca(s, cap);
    out.provenance = "partial:nilpotent";
    return out;
  }
  const Alphabet& a = s.alphabet();
  const std::size_t k = polytracer.alphabet().height();
  const auto periodic = periodic_points(s, 2 * std::max<std::size_t>(s.graph().size(), 1));
  for (const Word& u : periodic)
    if (u.size() > 1) {
      auto out = border_compose(polytracer, dynamic_border(a, u, k), polytracer_witness, cap);
      out.provenance = "partial:dynamic-border";
      out.details.push_back({"u", format_word(a, u)});
      return out;
    }
  if (periodic.size() < 2) throw PreconditionError("subshift has fewer than two periodic words");
  const Letter zero = periodic[0][0], one = periodic[1][0];
  auto out = border_compose(polytracer, static_border(a, zero, one, k), polytracer_witness, cap);
  out.provenance = "partial:static-border";
  out.details.push_back({"letters", a.name(zero) + " " + a.name(one)});
  return out;
}

// ---------------------------------------------------------------------------
// Full traces

namespace detail {

/// Rule of the full-trace automaton (diameter 10p−1, anchor 2p−1):
/// execution g̃(u⁰, u¹), frontier g̃(u⁰, λ), default ξ(center).
inline LocalRule::Evaluator full_trace_evaluator(std::size_t p, const BlockRule& gt, const LetterMap& xi) {
  const Alphabet& blocks = gt.alphabet();
  const std::size_t h = 2 * p;
  std::unordered_map<Word, Letter, WordHash> index;
  for (std::size_t b = 0; b < blocks.size(); ++b) index.emplace(blocks.tracks(static_cast<Letter>(b)), static_cast<Letter>(b));
  return [h, gt, xi, blocks, index = std::move(index)](std::span<const Letter> w) {
    const std::size_t m = h - 1;
    const std::size_t starts = w.size() - h + 1;
    std::vector<int> at(starts, -1);
    Word part(h);
    for (std::size_t s = 0; s < starts; ++s) {
      std::copy(w.begin() + static_cast<std::ptrdiff_t>(s), w.begin() + static_cast<std::ptrdiff_t>(s + h), part.begin());
      auto it = index.find(part);
      if (it != index.end()) at[s] = it->second;
    }
    // A macrocell start at s followed by 2p−1 positions without B-starts.
    auto theta = [&](std::size_t s) {
      if (at[s] < 0) return false;
      for (std::size_t o = 1; o < h; ++o)
        if (at[s + o] >= 0) return false;
      return true;
    };
    for (std::size_t i = 0; i <= m; ++i) {
      const std::size_t s0 = m - i;
      if (at[s0] < 0) continue;
      const std::size_t s1 = s0 + h, s2 = s0 + 2 * h;
      if (at[s1] >= 0 && theta(s2))
        return blocks.tracks(gt(static_cast<Letter>(at[s0]), static_cast<Letter>(at[s1])))[i];
      if (theta(s1) && !theta(s2)) return blocks.tracks(gt(static_cast<Letter>(at[s0]), std::nullopt))[i];
    }
    return xi(w[m]);
  };
}

inline Recipe full_trace_recipe(std::size_t p, const BlockRule& gt, const LetterMap& xi) {
  const Alphabet& base = gt.alphabet().base();
  std::vector<Letter> image;
  for (std::size_t a = 0; a < base.size(); ++a) image.push_back(xi(static_cast<Letter>(a)));
  return Recipe{"full-trace",
                {{"p", std::to_string(p)},
                 {"xi", join_indices(image)},
                 {"blocks", join_words(base, block_words(gt.alphabet()))},
                 {"pairs", join_indices(gt.pair_table())},
                 {"ends", join_indices(gt.end_table())}}};
}

}  // namespace detail

/// Automaton on A whose trace is ∘τ_G̃ ∪ O_ξ, for a block rule g̃ on
/// B ⊆ A^{2p} with B p-freezing, (ξ^{⊗2p})^{-1}(B) ⊆ B and the first p
/// tracks of g̃ acting as ξ. `block_witness` gives witnesses over B.
inline CompiledArtifact full_trace_compile(const BlockRule& gt, const LetterMap& xi, WitnessFn block_witness = {},
                                           std::uint64_t cap = kDefaultTableCap) {
  const Alphabet& blocks = gt.alphabet();
  const Alphabet& base = blocks.base();
  if (!blocks.is_product() || blocks.height() % 2) throw UsageError("block alphabet must have even height 2p");
  if (!xi.is_total() || xi.alphabet_size() != base.size()) throw UsageError("letter map must be total on the base alphabet");
  const std::size_t h = blocks.height();
  const std::size_t p = h / 2;
  const auto words = block_words(blocks);
  auto rep = check_freezing(words, p);
  if (!rep.freezing)
    throw PreconditionError("block set is not p-freezing (overlap " + format_word(base, *rep.counterexample) + ")");
  // Preimage closure, enumerated preimage by preimage.
  std::vector<std::vector<Letter>> pre(base.size());
  for (std::size_t a = 0; a < base.size(); ++a) pre[xi(static_cast<Letter>(a))].push_back(static_cast<Letter>(a));
  for (const Word& b : words) {
    Word x(h);
    std::function<void(std::size_t)> go = [&](std::size_t j) {
      if (j == h) {
        if (!blocks.encode(x))
          throw PreconditionError("block set is not closed under preimages of the letter map (" +
                                  format_word(base, x) + " maps into it)");
        return;
      }
      for (Letter a : pre[b[j]]) {
        x[j] = a;
        go(j + 1);
      }
    };
    go(0);
  }
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    const Word ta = blocks.tracks(static_cast<Letter>(a));
    auto check = [&](Letter out) {
      const Word to = blocks.tracks(out);
      for (std::size_t j = 0; j < p; ++j)
        if (to[j] != xi(ta[j])) throw PreconditionError("first p tracks of the block rule do not act as the letter map");
    };
    check(gt(static_cast<Letter>(a), std::nullopt));
    for (std::size_t b = 0; b < blocks.size(); ++b) check(gt(static_cast<Letter>(a), static_cast<Letter>(b)));
  }

  const int d = static_cast<int>(10 * p - 1);
  const int m = static_cast<int>(2 * p - 1);
  auto rule = detail::finish_rule(base, m, d, detail::full_trace_evaluator(p, gt, xi), detail::full_trace_recipe(p, gt, xi), cap);
  CompiledArtifact out{CellularAutomaton(std::move(rule)), std::nullopt, "full-trace",
                       {{"p", std::to_string(p)}},
                       {},
                       "valid macrocell configuration from the block witness; uniform configuration for orbits of the letter map",
                       0};
  out.witness = [blocks, h, xi, block_witness](const Word& z) -> std::optional<Witness> {
    if (block_witness)
      if (auto bw = block_witness(z))
        return Witness{group(blocks, bw->config), bw->cell * static_cast<std::int64_t>(h) + static_cast<std::int64_t>(bw->track), 0};
    if (!z.empty() && xi.orbit(z[0], z.size()) == z) return Witness{PeriodicConfiguration(Word{z[0]}), 0, 0};
    return std::nullopt;
  };
  return out;
}

/// Automaton whose trace is ∘τ_G for G on the full power A^k, given a
/// non-nilpotent ξ with O_ξ ⊆ ∘τ_G: ξ-border, semifinite extension of
/// Δ_Υ × G, then the full-trace compiler.
inline CompiledArtifact polytrace_to_trace(const CellularAutomaton& g, const LetterMap& xi, WitnessFn g_witness = {},
                                           std::size_t validation_depth = kValidationDepth,
                                           std::uint64_t cap = kDefaultTableCap) {
  const Alphabet& b = g.alphabet();
  const Alphabet& base = b.base();
  const std::size_t k = b.height();
  if (detail::checked_pow(base.size(), k, 1u << 20) != b.size())
    throw UsageError("automaton must act on the full power A^k; totalize it first");
  if (xi.is_nilpotent()) throw PreconditionError("letter map is nilpotent");
  if (!xi.is_total() || xi.alphabet_size() != base.size()) throw UsageError("letter map must be total on the base alphabet");
  const auto lang = polytrace(g, validation_depth);
  for (std::size_t a = 0; a < base.size(); ++a)
    if (!lang.contains(xi.orbit(static_cast<Letter>(a), validation_depth)))
      throw PreconditionError("orbit of " + base.name(static_cast<Letter>(a)) + " under the letter map is not in the polytrace");
  CellularAutomaton g0 = to_anchor_zero(g, cap);
  if (g0.diameter() > 2) throw UsageError("polytracer must have anchor 0 and diameter at most 2");
  g0 = pad_geometry(g0, 0, 2, cap);

  const Border border = xi_border(base, xi, k);
  const CellularAutomaton delta = pad_geometry(border_delta_ca(border), 0, 2, cap);
  const CellularAutomaton composed = product(delta, g0, cap);
  const BlockRule gt = block_rule(extend_onesided(composed, cap));
  auto [stacked, pair_to] = stack_alphabets(delta.alphabet(), g0.alphabet());
  const std::size_t l = border.length();
  // Re-encode stacked letters into the block rule's alphabet (same tuples).
  const Alphabet blocks = gt.alphabet();
  WitnessFn block_witness;
  if (g_witness)
    block_witness = [g_witness, pair_to = pair_to, stacked = stacked, blocks, l](const Word& z) -> std::optional<Witness> {
      auto w = g_witness(z);
      if (!w) return std::nullopt;
      Word period;
      for (Letter a : w->config.period()) period.push_back(*blocks.encode(stacked.tracks(pair_to[a])));
      return Witness{PeriodicConfiguration(period, w->config.phase()), w->cell, l + w->track};
    };
  auto out = full_trace_compile(gt, xi, block_witness, cap);
  out.provenance = "polytrace-to-trace";
  out.details.push_back({"border-length", std::to_string(l)});
  return out;
}

// ---------------------------------------------------------------------------
// Ultimate traces

struct UltimateOutcome {
  enum class Branch { nilpotent, polytrace, unsupported };
  Branch branch = Branch::unsupported;
  std::optional<CompiledArtifact> artifact;
  std::optional<LetterMap> xi;
  std::string dependency;
};

inline std::string branch_name(UltimateOutcome::Branch b) {
  switch (b) {
    case UltimateOutcome::Branch::nilpotent: return "nilpotent";
    case UltimateOutcome::Branch::polytrace: return "polytrace";
    case UltimateOutcome::Branch::unsupported: return "UNSUPPORTED";
  }
  return "";
}

/// Automaton whose trace ultimately coincides with Σ. Without an explicit
/// ξ the canonical deterministic map contained in Σ is used. The branch for
/// a nilpotent ξ in a non-nilpotent Σ needs an external construction and is
/// reported as UNSUPPORTED.
inline UltimateOutcome ultimate_trace_compile(const Subshift& s, const CellularAutomaton& polytracer,
                                              WitnessFn polytracer_witness = {},
                                              std::optional<LetterMap> xi = std::nullopt,
                                              std::size_t validation_depth = kValidationDepth,
                                              std::uint64_t cap = kDefaultTableCap) {
  UltimateOutcome out;
  const Alphabet& a = s.alphabet();
  if (is_weakly_nilpotent(s)) {
    auto j = nilpotency_index(s);
    if (!j) throw PreconditionError("subshift is weakly nilpotent but not nilpotent, so no automaton polytraces it");
    const Letter zero = *weak_nilpotency_letter(s);
    CompiledArtifact art{constant_ca(a, zero, 2), std::nullopt, "ultimate:nilpotent", {{"J", std::to_string(*j)}},
                         {}, "uniform configuration of the first letter", *j};
    art.witness = [zero](const Word& z) -> std::optional<Witness> {
      for (std::size_t i = 1; i < z.size(); ++i)
        if (z[i] != zero) return std::nullopt;
      if (z.empty()) return std::nullopt;
      return Witness{PeriodicConfiguration(Word{z[0]}), 0, 0};
    };
    out.branch = UltimateOutcome::Branch::nilpotent;
    out.artifact = std::move(art);
    return out;
  }
  if (!xi) xi = contains_deterministic(s, true);
  if (!xi) throw PreconditionError("subshift contains no deterministic subshift");
  for (Letter b : xi->domain())
    if (!contains_word(s, xi->orbit(b, std::max<std::size_t>(validation_depth, 1))))
      throw PreconditionError("orbit of " + a.name(b) + " under the letter map is not in the subshift");
  out.xi = xi;
  if (xi->is_nilpotent()) {
    out.branch = UltimateOutcome::Branch::unsupported;
    out.dependency =
        "external construction: traceability of the union of a traceable subshift with a nilpotent deterministic subshift";
    return out;
  }
  if (!xi->is_total()) throw UsageError("non-nilpotent letter map must be total on the alphabet");
  detail::check_polytrace(polytracer, s, validation_depth);
  const CellularAutomaton t = totalize(polytracer, cap);
  auto art = polytrace_to_trace(t, *xi, reencode_witness(polytracer.alphabet(), t.alphabet(), polytracer_witness),
                                validation_depth, cap);
  art.provenance = "ultimate:polytrace";
  art.offset = 1;
  art.details.push_back({"J", "1"});
  out.branch = UltimateOutcome::Branch::polytrace;
  out.artifact = std::move(art);
  return out;
}

// ---------------------------------------------------------------------------
// Recipes

/// Rebuilds a procedural compiled rule from its recipe.
inline LocalRule rule_from_recipe(const Alphabet& alph, int anchor, int diameter, const Recipe& r) {
  auto expect_geometry = [&](int m, int d) {
    if (m != anchor || d != diameter)
      throw UsageError("recipe '" + r.kind + "' implies anchor " + std::to_string(m) + " and diameter " + std::to_string(d));
  };
  if (r.kind == "ungroup") {
    const auto h = static_cast<std::size_t>(std::stoul(detail::field(r, "h")));
    const Alphabet blocks = Alphabet::product(alph, detail::split_words(alph, detail::field(r, "blocks")));
    if (blocks.height() != h) throw UsageError("ungroup recipe blocks do not have length h");
    const LocalRule g = LocalRule::dense(blocks, 1, 3, detail::split_indices(detail::field(r, "table")));
    expect_geometry(static_cast<int>(2 * h - 1), static_cast<int>(4 * h - 1));
    return LocalRule::procedural(alph, anchor, diameter, detail::ungroup_evaluator(h, blocks, g), r);
  }
  if (r.kind == "nilpotent") {
    const auto j = static_cast<std::size_t>(std::stoul(detail::field(r, "j")));
    const Letter zero = alph.letter(detail::field(r, "zero"));
    auto nb = detail::nilpotent_blocks(detail::split_words(alph, detail::field(r, "language")), j, zero);
    expect_geometry(static_cast<int>(6 * j - 1), static_cast<int>(12 * j - 1));
    return LocalRule::procedural(alph, anchor, diameter, detail::nilpotent_evaluator(nb), r);
  }
  if (r.kind == "full-trace") {
    const auto p = static_cast<std::size_t>(std::stoul(detail::field(r, "p")));
    const Alphabet blocks = Alphabet::product(alph, detail::split_words(alph, detail::field(r, "blocks")));
    auto gt = BlockRule::from_tables(blocks, detail::split_indices(detail::field(r, "pairs")),
                                     detail::split_indices(detail::field(r, "ends")));
    auto image = detail::split_indices(detail::field(r, "xi"));
    if (image.size() != alph.size()) throw UsageError("full-trace recipe letter map has the wrong size");
    expect_geometry(static_cast<int>(2 * p - 1), static_cast<int>(10 * p - 1));
    return LocalRule::procedural(alph, anchor, diameter, detail::full_trace_evaluator(p, gt, LetterMap::total(image)), r);
  }
  throw UsageError("unknown rule recipe '" + r.kind + "'");
}

}  // namespace catrace
