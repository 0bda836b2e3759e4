#pragma once

// Subshifts presented by labeled graphs: SFTs (window graphs), sofic graphs
// (onesided or twosided) and deterministic orbits O_ξ. Exact languages by
// subset walk, periodic membership, and the decidable predicates.

#include <set>

#include "catrace/core.hpp"
#include "catrace/freeze.hpp"

namespace catrace {

/// Edge-labeled directed graph; out-edges are kept sorted by (label, target).
class LabeledGraph {
 public:
  struct Edge {
    std::uint32_t to;
    Letter label;
    friend bool operator<(const Edge& a, const Edge& b) {
      return a.label != b.label ? a.label < b.label : a.to < b.to;
    }
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  LabeledGraph() = default;
  explicit LabeledGraph(std::size_t n) : out_(n) {}

  std::size_t size() const noexcept { return out_.size(); }
  std::uint32_t add_vertex() {
    out_.emplace_back();
    return static_cast<std::uint32_t>(out_.size() - 1);
  }
  void add_edge(std::uint32_t from, Letter label, std::uint32_t to) {
    auto& v = out_.at(from);
    Edge e{to, label};
    auto it = std::lower_bound(v.begin(), v.end(), e);
    if (it == v.end() || !(*it == e)) v.insert(it, e);
  }
  const std::vector<Edge>& out(std::uint32_t v) const { return out_[v]; }
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& v : out_) n += v.size();
    return n;
  }

  /// Subgraph induced by `keep`; returns the old-to-new index map (−1 if dropped).
  std::pair<LabeledGraph, std::vector<std::int64_t>> induced(const std::vector<bool>& keep) const {
    std::vector<std::int64_t> idx(size(), -1);
    std::uint32_t n = 0;
    for (std::size_t v = 0; v < size(); ++v)
      if (keep[v]) idx[v] = n++;
    LabeledGraph g(n);
    for (std::size_t v = 0; v < size(); ++v) {
      if (!keep[v]) continue;
      for (const Edge& e : out_[v])
        if (keep[e.to]) g.out_[static_cast<std::size_t>(idx[v])].push_back({static_cast<std::uint32_t>(idx[e.to]), e.label});
    }
    return {std::move(g), std::move(idx)};
  }

  std::vector<std::vector<std::uint32_t>> predecessors() const {
    std::vector<std::vector<std::uint32_t>> pred(size());
    for (std::uint32_t v = 0; v < size(); ++v)
      for (const Edge& e : out_[v]) pred[e.to].push_back(v);
    return pred;
  }

  /// Vertices reachable from `from` (including them).
  std::vector<bool> reachable(const std::vector<std::uint32_t>& from) const {
    std::vector<bool> seen(size(), false);
    std::vector<std::uint32_t> stack;
    for (auto v : from)
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (const Edge& e : out_[v])
        if (!seen[e.to]) {
          seen[e.to] = true;
          stack.push_back(e.to);
        }
    }
    return seen;
  }

  /// Strongly connected component id per vertex (Kosaraju, iterative).
  std::vector<std::uint32_t> scc() const {
    const std::size_t n = size();
    std::vector<std::uint32_t> order;
    std::vector<bool> seen(n, false);
    for (std::uint32_t s = 0; s < n; ++s) {
      if (seen[s]) continue;
      std::vector<std::pair<std::uint32_t, std::size_t>> stack{{s, 0}};
      seen[s] = true;
      while (!stack.empty()) {
        auto& [v, i] = stack.back();
        if (i < out_[v].size()) {
          auto w = out_[v][i++].to;
          if (!seen[w]) {
            seen[w] = true;
            stack.push_back({w, 0});
          }
        } else {
          order.push_back(v);
          stack.pop_back();
        }
      }
    }
    auto pred = predecessors();
    std::vector<std::uint32_t> comp(n, ~0u);
    std::uint32_t c = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (comp[*it] != ~0u) continue;
      std::vector<std::uint32_t> stack{*it};
      comp[*it] = c;
      while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto u : pred[v])
          if (comp[u] == ~0u) {
            comp[u] = c;
            stack.push_back(u);
          }
      }
      ++c;
    }
    return comp;
  }

  /// Whether edge v→e.to lies on a cycle.
  static bool on_cycle(const std::vector<std::uint32_t>& comp, std::uint32_t v, const Edge& e) {
    return comp[v] == comp[e.to];
  }

 private:
  std::vector<std::vector<Edge>> out_;
};

/// Sorted set of words.
using WordSet = std::vector<Word>;

inline void normalize(WordSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

// ---------------------------------------------------------------------------

/// A subshift given by a trimmed labeled graph and a start set. Twosided
/// subshifts use every vertex as a start; onesided ones read right-infinite
/// paths from the starts.
class Subshift {
 public:
  enum class Kind { sft, sofic, orbit };

  Kind kind() const noexcept { return kind_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  bool onesided() const noexcept { return onesided_; }
  const LabeledGraph& graph() const noexcept { return graph_; }
  const std::vector<std::uint32_t>& starts() const noexcept { return starts_; }

  /// SFT order and trimmed allowed windows (SFT only).
  std::size_t order() const noexcept { return order_; }
  const WordSet& allowed() const noexcept { return allowed_; }
  /// Forbidden words as given, when built from them.
  const std::optional<WordSet>& forbidden() const noexcept { return forbidden_; }
  /// The letter map of an orbit subshift.
  const LetterMap& map() const noexcept { return xi_; }

  /// SFT from its allowed windows of length `order`, trimmed twosidedly.
  static Subshift sft(const Alphabet& alph, std::size_t order, WordSet windows) {
    if (order < 1) throw UsageError("SFT order must be at least 1");
    for (const Word& w : windows) {
      if (w.size() != order) throw UsageError("SFT windows must all have length " + std::to_string(order));
      for (Letter a : w)
        if (a >= alph.size()) throw UsageError("SFT window letter outside alphabet");
    }
    normalize(windows);
    // Keep windows with a left and a right extension until stable.
    for (bool changed = true; changed;) {
      changed = false;
      std::set<Word> heads, tails;
      for (const Word& w : windows) {
        heads.insert(Word(w.begin(), w.end() - 1));
        tails.insert(Word(w.begin() + 1, w.end()));
      }
      WordSet kept;
      for (const Word& w : windows)
        if (heads.count(Word(w.begin() + 1, w.end())) && tails.count(Word(w.begin(), w.end() - 1))) kept.push_back(w);
      changed = kept.size() != windows.size();
      windows = std::move(kept);
    }
    Subshift s;
    s.kind_ = Kind::sft;
    s.alphabet_ = alph;
    s.order_ = order;
    s.allowed_ = windows;
    s.graph_ = LabeledGraph(windows.size());
    std::map<Word, std::vector<std::uint32_t>> by_head;
    for (std::uint32_t i = 0; i < windows.size(); ++i)
      by_head[Word(windows[i].begin(), windows[i].end() - 1)].push_back(i);
    for (std::uint32_t i = 0; i < windows.size(); ++i) {
      auto it = by_head.find(Word(windows[i].begin() + 1, windows[i].end()));
      if (it == by_head.end()) continue;
      for (auto j : it->second) s.graph_.add_edge(i, windows[j].back(), j);
    }
    s.starts_.resize(windows.size());
    std::iota(s.starts_.begin(), s.starts_.end(), 0u);
    return s;
  }

  /// SFT from forbidden words, padded to the longest forbidden length.
  static Subshift sft_forbidden(const Alphabet& alph, WordSet forbidden) {
    normalize(forbidden);
    std::size_t k = 1;
    for (const Word& f : forbidden) {
      if (f.empty()) throw UsageError("empty forbidden word");
      k = std::max(k, f.size());
    }
    WordSet windows;
    Word cur;
    std::function<void()> dfs = [&]() {
      if (cur.size() == k) {
        windows.push_back(cur);
        return;
      }
      for (std::size_t a = 0; a < alph.size(); ++a) {
        cur.push_back(static_cast<Letter>(a));
        bool bad = false;
        for (const Word& f : forbidden)
          if (f.size() <= cur.size() && std::equal(f.begin(), f.end(), cur.end() - static_cast<std::ptrdiff_t>(f.size()))) {
            bad = true;
            break;
          }
        if (!bad) dfs();
        cur.pop_back();
      }
    };
    dfs();
    Subshift s = sft(alph, k, std::move(windows));
    s.forbidden_ = std::move(forbidden);
    return s;
  }

  /// Sofic subshift from a labeled graph. Twosided graphs are trimmed to
  /// vertices on bi-infinite paths; onesided ones to vertices reachable
  /// from `starts` that begin an infinite path.
  static Subshift sofic(const Alphabet& alph, const LabeledGraph& g, bool onesided,
                        std::vector<std::uint32_t> starts = {}) {
    for (std::uint32_t v = 0; v < g.size(); ++v)
      for (const auto& e : g.out(v))
        if (e.label >= alph.size()) throw UsageError("edge label outside alphabet");
    if (!onesided || starts.empty()) {
      starts.resize(g.size());
      std::iota(starts.begin(), starts.end(), 0u);
    }
    for (auto v : starts)
      if (v >= g.size()) throw UsageError("start vertex out of range");
    std::vector<bool> keep = onesided ? g.reachable(starts) : std::vector<bool>(g.size(), true);
    auto pred = g.predecessors();
    for (bool changed = true; changed;) {
      changed = false;
      for (std::uint32_t v = 0; v < g.size(); ++v) {
        if (!keep[v]) continue;
        bool has_out = false, has_in = onesided;
        for (const auto& e : g.out(v)) has_out = has_out || keep[e.to];
        for (auto u : pred[v]) has_in = has_in || keep[u];
        if (!has_out || !has_in) {
          keep[v] = false;
          changed = true;
        }
      }
    }
    auto [h, idx] = g.induced(keep);
    Subshift s;
    s.kind_ = Kind::sofic;
    s.alphabet_ = alph;
    s.onesided_ = onesided;
    s.graph_ = std::move(h);
    if (onesided) {
      for (auto v : starts)
        if (idx[v] >= 0) s.starts_.push_back(static_cast<std::uint32_t>(idx[v]));
      std::sort(s.starts_.begin(), s.starts_.end());
      s.starts_.erase(std::unique(s.starts_.begin(), s.starts_.end()), s.starts_.end());
    } else {
      s.starts_.resize(s.graph_.size());
      std::iota(s.starts_.begin(), s.starts_.end(), 0u);
    }
    return s;
  }

  /// O_ξ for ξ on a subalphabet A′ ⊆ A (the map's domain), onesided.
  static Subshift orbit(const Alphabet& alph, const LetterMap& xi) {
    if (xi.alphabet_size() != alph.size()) throw UsageError("letter map size differs from alphabet size");
    if (!xi.is_endomap()) throw UsageError("letter map must send its domain into itself");
    LabeledGraph g(alph.size());
    for (Letter a : xi.domain()) g.add_edge(a, a, xi(a));
    std::vector<std::uint32_t> starts;
    for (Letter a : xi.domain()) starts.push_back(a);
    Subshift s = sofic(alph, g, true, starts);
    s.kind_ = Kind::orbit;
    s.xi_ = xi;
    return s;
  }

  /// Same presentation with another start set (onesided only).
  Subshift with_starts(std::vector<std::uint32_t> starts) const {
    Subshift s = sofic(alphabet_, graph_, true, std::move(starts));
    return s;
  }

  /// Starts used for factor languages: everything reachable from the starts.
  std::vector<std::uint32_t> factor_starts() const {
    if (!onesided_) return starts_;
    auto r = graph_.reachable(starts_);
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < r.size(); ++v)
      if (r[v]) out.push_back(v);
    return out;
  }

 private:
  Kind kind_ = Kind::sofic;
  Alphabet alphabet_;
  bool onesided_ = false;
  LabeledGraph graph_;
  std::vector<std::uint32_t> starts_;
  std::size_t order_ = 0;
  WordSet allowed_;
  std::optional<WordSet> forbidden_;
  LetterMap xi_;
};

// ---------------------------------------------------------------------------
// Subset walks

namespace detail {

using VertexSet = std::vector<std::uint32_t>;  // sorted

inline VertexSet successor(const LabeledGraph& g, const VertexSet& s, Letter a) {
  VertexSet out;
  for (auto v : s) {
    const auto& es = g.out(v);
    auto it = std::lower_bound(es.begin(), es.end(), LabeledGraph::Edge{0, a});
    for (; it != es.end() && it->label == a; ++it) out.push_back(it->to);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline void language_dfs(const LabeledGraph& g, std::size_t q, const VertexSet& s, Word& cur, std::size_t n,
                         WordSet& out) {
  if (cur.size() == n) {
    out.push_back(cur);
    return;
  }
  for (std::size_t a = 0; a < q; ++a) {
    VertexSet t = successor(g, s, static_cast<Letter>(a));
    if (t.empty()) continue;
    cur.push_back(static_cast<Letter>(a));
    language_dfs(g, q, t, cur, n, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// L_n(Σ), sorted.
inline WordSet language(const Subshift& s, std::size_t n) {
  WordSet out;
  Word cur;
  auto st = s.factor_starts();
  if (st.empty()) return out;
  detail::language_dfs(s.graph(), s.alphabet().size(), st, cur, n, out);
  return out;
}

/// Whether w is a factor of some point.
inline bool contains_word(const Subshift& s, const Word& w) {
  detail::VertexSet cur = s.factor_starts();
  for (Letter a : w) {
    if (cur.empty()) return false;
    cur = detail::successor(s.graph(), cur, a);
  }
  return !cur.empty();
}

namespace detail {

/// Greatest set of (vertex, phase) pairs from which the periodic sequence
/// w_phase w_{phase+1} … can be read forever. Indexed [v * |w| + phase].
inline std::vector<bool> periodic_readers(const LabeledGraph& g, const Word& w) {
  const std::size_t n = w.size();
  std::vector<bool> in(g.size() * n, true);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::uint32_t v = 0; v < g.size(); ++v)
      for (std::size_t j = 0; j < n; ++j) {
        if (!in[v * n + j]) continue;
        bool ok = false;
        for (const auto& e : g.out(v))
          if (e.label == w[j] && in[e.to * n + (j + 1) % n]) {
            ok = true;
            break;
          }
        if (!ok) {
          in[v * n + j] = false;
          changed = true;
        }
      }
  }
  return in;
}

}  // namespace detail

/// Whether the right-infinite sequence prefix·cycle^∞ is a point (read from
/// the starts); for twosided Σ, whether it is the right half of a point.
inline bool contains_ultimately_periodic(const Subshift& s, const Word& prefix, const Word& cycle) {
  if (cycle.empty()) throw UsageError("empty cycle");
  detail::VertexSet cur = s.starts();
  for (Letter a : prefix) {
    if (cur.empty()) return false;
    cur = detail::successor(s.graph(), cur, a);
  }
  auto in = detail::periodic_readers(s.graph(), cycle);
  for (auto v : cur)
    if (in[v * cycle.size()]) return true;
  return false;
}

/// Whether ∞w∞ occurs (as a factor-level periodic point).
inline bool contains_periodic(const Subshift& s, const Word& w) {
  auto in = detail::periodic_readers(s.graph(), w);
  for (auto v : s.factor_starts())
    for (std::size_t j = 0; j < w.size(); ++j)
      if (in[v * w.size() + j]) return true;
  return false;
}

/// Primitive words w, |w| ≤ p, in least rotation, with ∞w∞ ∈ Σ; sorted
/// by length then lexicographically.
inline WordSet periodic_points(const Subshift& s, std::size_t p) {
  WordSet out;
  Word cur;
  std::function<void(const detail::VertexSet&)> dfs = [&](const detail::VertexSet& set) {
    if (!cur.empty() && is_primitive(cur) && least_rotation_index(cur) == 0 && contains_periodic(s, cur))
      out.push_back(cur);
    if (cur.size() == p) return;
    for (std::size_t a = 0; a < s.alphabet().size(); ++a) {
      auto t = detail::successor(s.graph(), set, static_cast<Letter>(a));
      if (t.empty()) continue;
      cur.push_back(static_cast<Letter>(a));
      dfs(t);
      cur.pop_back();
    }
  };
  auto st = s.factor_starts();
  if (!st.empty()) dfs(st);
  std::stable_sort(out.begin(), out.end(), [](const Word& a, const Word& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Nilpotency

/// The letter z when every cycle edge (in the part reachable from the
/// starts) is labeled z; absent otherwise.
inline std::optional<Letter> weak_nilpotency_letter(const Subshift& s) {
  const auto& g = s.graph();
  auto reach = g.reachable(s.starts());
  auto comp = g.scc();
  std::optional<Letter> z;
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    if (!reach[v]) continue;
    for (const auto& e : g.out(v)) {
      if (!LabeledGraph::on_cycle(comp, v, e)) continue;
      if (z && *z != e.label) return std::nullopt;
      z = e.label;
    }
  }
  return z;
}

inline bool is_weakly_nilpotent(const Subshift& s) { return weak_nilpotency_letter(s).has_value(); }

/// Least J with σ^J(Σ) = {z^∞}. Computed as the longest path from the starts
/// through vertices outside the zero region Z (the greatest set whose
/// out-edges are z-labeled and stay in Z).
inline std::optional<std::size_t> nilpotency_index(const Subshift& s) {
  auto z = weak_nilpotency_letter(s);
  if (!z) return std::nullopt;
  const auto& g = s.graph();
  std::vector<bool> zero(g.size(), true);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
      if (!zero[v]) continue;
      for (const auto& e : g.out(v))
        if (e.label != *z || !zero[e.to]) {
          zero[v] = false;
          changed = true;
          break;
        }
    }
  }
  // Longest path (in vertices) inside the non-zero region, from the starts.
  std::vector<std::int64_t> memo(g.size(), -1);
  std::vector<int> state(g.size(), 0);
  bool cyclic = false;
  std::function<std::int64_t(std::uint32_t)> longest = [&](std::uint32_t v) -> std::int64_t {
    if (zero[v]) return 0;
    if (state[v] == 2) return memo[v];
    if (state[v] == 1) {
      cyclic = true;
      return 0;
    }
    state[v] = 1;
    std::int64_t best = 0;
    for (const auto& e : g.out(v)) best = std::max(best, longest(e.to));
    state[v] = 2;
    memo[v] = best + 1;
    return memo[v];
  };
  std::int64_t j = 0;
  for (auto v : s.starts()) j = std::max(j, longest(v));
  if (cyclic || j > static_cast<std::int64_t>(g.size())) return std::nullopt;
  return static_cast<std::size_t>(j);
}

// ---------------------------------------------------------------------------
// Deterministic subshifts

/// Whether every orbit (ξ^j(a))_j, a in the domain of ξ, is a point of Σ.
inline bool contains_orbits(const Subshift& s, const LetterMap& xi) {
  for (Letter a : xi.domain()) {
    auto [pre, cyc] = xi.orbit_lasso(a);
    if (!contains_ultimately_periodic(s, pre, cyc)) return false;
  }
  return true;
}

namespace detail {

/// All endomaps of `domain` (a sorted subalphabet) in canonical order:
/// fewest non-fixed letters first, then lexicographic image.
inline std::vector<LetterMap> endomaps(std::size_t q, const std::vector<Letter>& domain) {
  const std::size_t n = domain.size();
  const std::uint64_t total = checked_pow(n, n, std::uint64_t{1} << 22);
  if (total > (std::uint64_t{1} << 22)) throw CapExceeded("too many letter maps to search");
  std::vector<std::pair<std::pair<std::size_t, Word>, LetterMap>> maps;
  Word img(n);
  for (std::uint64_t c = 0; c < total; ++c) {
    std::uint64_t r = c;
    for (std::size_t i = n; i-- > 0;) {
      img[i] = domain[r % n];
      r /= n;
    }
    LetterMap m(q);
    std::size_t moved = 0;
    for (std::size_t i = 0; i < n; ++i) {
      m.set(domain[i], img[i]);
      moved += img[i] != domain[i];
    }
    maps.push_back({{moved, img}, std::move(m)});
  }
  std::sort(maps.begin(), maps.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<LetterMap> out;
  for (auto& m : maps) out.push_back(std::move(m.second));
  return out;
}

}  // namespace detail

/// Every ξ on the full alphabet (or, with `subalphabets`, on every nonempty
/// A′ ⊆ A, larger domains first) with O_ξ ⊆ Σ, in canonical order.
inline std::vector<LetterMap> deterministic_maps(const Subshift& s, bool subalphabets = false) {
  const std::size_t q = s.alphabet().size();
  std::vector<std::vector<Letter>> domains;
  if (!subalphabets) {
    std::vector<Letter> all(q);
    std::iota(all.begin(), all.end(), Letter{0});
    domains.push_back(all);
  } else {
    for (std::uint64_t mask = (std::uint64_t{1} << q) - 1; mask > 0; --mask) {
      std::vector<Letter> d;
      for (std::size_t a = 0; a < q; ++a)
        if (mask >> a & 1) d.push_back(static_cast<Letter>(a));
      domains.push_back(d);
    }
    std::stable_sort(domains.begin(), domains.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
  }
  std::vector<LetterMap> out;
  for (const auto& d : domains)
    for (auto& m : detail::endomaps(q, d))
      if (contains_orbits(s, m)) out.push_back(std::move(m));
  return out;
}

inline std::optional<LetterMap> contains_deterministic(const Subshift& s, bool subalphabets = false) {
  auto maps = deterministic_maps(s, subalphabets);
  if (maps.empty()) return std::nullopt;
  return maps.front();
}

/// Some cycle reachable in the graph uses an edge labeled outside `letters`.
inline bool has_cycle_outside(const Subshift& s, const std::vector<Letter>& letters) {
  const auto& g = s.graph();
  auto reach = g.reachable(s.factor_starts());
  auto comp = g.scc();
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    if (!reach[v]) continue;
    for (const auto& e : g.out(v))
      if (LabeledGraph::on_cycle(comp, v, e) && std::find(letters.begin(), letters.end(), e.label) == letters.end())
        return true;
  }
  return false;
}

/// Contains some O_ξ plus a periodic point using a letter outside ξ(A).
inline bool is_cdd(const Subshift& s) {
  for (const auto& xi : deterministic_maps(s))
    if (has_cycle_outside(s, xi.image_set())) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Shifts, comparison, projection

/// σ^J(Σ). Onesided: starts move to the vertices reachable in exactly J
/// steps. Twosided subshifts are shift-invariant and returned unchanged.
inline Subshift shift_image(const Subshift& s, std::size_t j) {
  if (!s.onesided()) return s;
  detail::VertexSet cur = s.starts();
  for (std::size_t t = 0; t < j; ++t) {
    detail::VertexSet next;
    for (auto v : cur)
      for (const auto& e : s.graph().out(v)) next.push_back(e.to);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cur = std::move(next);
  }
  Subshift r = s.with_starts(cur);
  return r;
}

inline bool same_letters(const Alphabet& a, const Alphabet& b) { return a.names() == b.names(); }

/// L_i(Σ1) = L_i(Σ2) for every i ≤ n.
inline bool equal_up_to(const Subshift& a, const Subshift& b, std::size_t n) {
  if (!same_letters(a.alphabet(), b.alphabet())) throw UsageError("subshifts over different alphabets");
  return language(a, n) == language(b, n);  // factorial languages: level n decides all i ≤ n
}

inline std::optional<std::size_t> ultimately_coincide(const Subshift& a, const Subshift& b, std::size_t jmax,
                                                      std::size_t n) {
  for (std::size_t j = 0; j <= jmax; ++j)
    if (equal_up_to(shift_image(a, j), shift_image(b, j), n)) return j;
  return std::nullopt;
}

/// π_q(Σ) over the base alphabet; `q` absent gives the union over tracks.
inline Subshift project(const Subshift& s, std::optional<std::size_t> q = std::nullopt) {
  const Alphabet& alph = s.alphabet();
  if (!alph.is_product()) throw UsageError("projection needs a product alphabet");
  const std::size_t h = alph.height();
  std::vector<std::size_t> tracks;
  if (q) {
    if (*q >= h) throw UsageError("track index out of range");
    tracks.push_back(*q);
  } else {
    for (std::size_t i = 0; i < h; ++i) tracks.push_back(i);
  }
  const auto& g = s.graph();
  const auto n = static_cast<std::uint32_t>(g.size());
  LabeledGraph out(n * tracks.size());
  std::vector<std::uint32_t> starts;
  for (std::uint32_t t = 0; t < tracks.size(); ++t) {
    for (std::uint32_t v = 0; v < n; ++v)
      for (const auto& e : g.out(v)) out.add_edge(t * n + v, alph.tracks(e.label)[tracks[t]], t * n + e.to);
    for (auto v : s.starts()) starts.push_back(t * n + v);
  }
  return Subshift::sofic(alph.base(), out, s.onesided(), starts);
}

/// Factor SFT of order 2h for an arbitrary block set (no freezing check).
inline Subshift block_factor_sft(const Alphabet& alph, const WordSet& words) {
  const std::size_t h = common_length(words);
  std::set<Word> windows;
  for (const Word& a : words)
    for (const Word& b : words)
      for (const Word& c : words) {
        Word z = concat({a, b, c});
        for (std::size_t i = 0; i + 2 * h <= z.size(); ++i)
          windows.insert(Word(z.begin() + static_cast<std::ptrdiff_t>(i), z.begin() + static_cast<std::ptrdiff_t>(i + 2 * h)));
      }
  return Subshift::sft(alph, 2 * h, WordSet(windows.begin(), windows.end()));
}

/// Λ = ∪_{0≤i<h} σ^i(⊞_h(W^Z)) as an SFT of order 2h built from the
/// factors of W^3. Requires W to be ⌊h/2⌋-freezing.
inline Subshift macrocell_sft(const Alphabet& alph, const WordSet& words) {
  const std::size_t h = common_length(words);
  auto rep = check_freezing(words, h / 2);
  if (!rep.freezing)
    throw PreconditionError("block set is not " + std::to_string(h / 2) + "-freezing (overlap " +
                            format_word(alph, *rep.counterexample) + ")");
  return block_factor_sft(alph, words);
}

}  // namespace catrace
