#pragma once

// Exact finite-depth trace languages of cellular automata and of partial
// automata restricted to an SFT domain. Two engines: enumeration of the
// dependence cone, and a layered transducer that stacks k successive
// images of the domain presentation and reads columns off its paths.

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "catrace/subshift.hpp"

namespace catrace {

/// A CA restricted to a twosided SFT domain.
struct PartialCA {
  CellularAutomaton ca;
  Subshift domain;
};

/// Set of height-k, width-w space-time blocks. Each block is stored row
/// by row: block[t * width + c] = F^t(x)_c.
struct ColumnLanguage {
  Alphabet alphabet;
  std::size_t height = 0;
  std::size_t width = 1;
  WordSet blocks;

  std::size_t size() const noexcept { return blocks.size(); }
  bool contains(const Word& b) const { return std::binary_search(blocks.begin(), blocks.end(), b); }
  friend bool operator==(const ColumnLanguage& a, const ColumnLanguage& b) {
    return a.height == b.height && a.width == b.width && a.blocks == b.blocks && a.alphabet.names() == b.alphabet.names();
  }
};

inline constexpr std::uint64_t kDefaultEvalCap = std::uint64_t{1} << 26;
inline constexpr std::size_t kDefaultStateCap = std::size_t{1} << 25;

enum class Engine { naive, transducer, automatic };

namespace detail {

/// Positions [lo, hi] of the initial row covering the dependence cone of
/// cells [0, w) over k−1 steps.
inline std::pair<std::int64_t, std::int64_t> cone(int anchor, int diameter, std::size_t k, std::size_t w) {
  std::int64_t lo = 0, hi = static_cast<std::int64_t>(w) - 1;
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(k); ++t) {
    lo = std::min(lo, -t * anchor);
    hi = std::max(hi, -t * anchor + t * (diameter - 1) + static_cast<std::int64_t>(w) - 1);
  }
  return {lo, hi};
}

inline Subshift full_shift(const Alphabet& alph) {
  LabeledGraph g(1);
  for (std::size_t a = 0; a < alph.size(); ++a) g.add_edge(0, static_cast<Letter>(a), 0);
  return Subshift::sofic(alph, g, false);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Cone enumeration

/// Enumerates every domain word covering the cone and evaluates the block.
/// Throws CapExceeded past `cap` rule evaluations.
inline ColumnLanguage trace_naive(const CellularAutomaton& f, const Subshift& domain, std::size_t k,
                                  std::size_t w = 1, std::uint64_t cap = kDefaultEvalCap) {
  if (k < 1 || w < 1) throw UsageError("depth and width must be at least 1");
  if (!same_letters(f.alphabet(), domain.alphabet())) throw UsageError("domain alphabet differs from the CA alphabet");
  const int m = f.anchor();
  const int d = f.diameter();
  auto [lo, hi] = detail::cone(m, d, k, w);
  const auto len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<Word> rows(k, Word(len, 0));
  std::unordered_set<Word, WordHash> found;
  std::uint64_t evals = 0;
  const auto& g = domain.graph();
  const std::size_t q = f.alphabet().size();
  const LocalRule& rule = f.rule();

  std::function<void(std::size_t, const detail::VertexSet&)> dfs = [&](std::size_t n, const detail::VertexSet& set) {
    if (n == len) {
      Word block(k * w);
      for (std::size_t t = 0; t < k; ++t)
        for (std::size_t c = 0; c < w; ++c)
          block[t * w + c] = rows[t][static_cast<std::size_t>(static_cast<std::int64_t>(c) - lo -
                                                              static_cast<std::int64_t>(t) * m)];
      found.insert(std::move(block));
      return;
    }
    for (std::size_t a = 0; a < q; ++a) {
      auto next = detail::successor(g, set, static_cast<Letter>(a));
      if (next.empty()) continue;
      rows[0][n] = static_cast<Letter>(a);
      for (std::size_t t = 1; t < k; ++t) {
        const std::int64_t j = static_cast<std::int64_t>(n) - static_cast<std::int64_t>(t) * (d - 1);
        if (j < 0) break;
        if (++evals > cap) throw CapExceeded("cone enumeration exceeds the evaluation cap; use transducer engine");
        rows[t][static_cast<std::size_t>(j)] =
            rule(std::span<const Letter>(rows[t - 1]).subspan(static_cast<std::size_t>(j), static_cast<std::size_t>(d)));
      }
      dfs(n + 1, next);
    }
  };
  auto st = domain.factor_starts();
  if (!st.empty()) dfs(0, st);
  ColumnLanguage out{f.alphabet(), k, w, WordSet(found.begin(), found.end())};
  normalize(out.blocks);
  return out;
}

inline ColumnLanguage trace_naive(const CellularAutomaton& f, std::size_t k, std::size_t w = 1,
                                  std::uint64_t cap = kDefaultEvalCap) {
  return trace_naive(f, detail::full_shift(f.alphabet()), k, w, cap);
}

inline ColumnLanguage trace_naive(const PartialCA& f, std::size_t k, std::size_t w = 1,
                                  std::uint64_t cap = kDefaultEvalCap) {
  return trace_naive(f.ca, f.domain, k, w, cap);
}

// ---------------------------------------------------------------------------
// Layered transducer

namespace detail {

/// Deterministic graph with integer labels in compressed row form. Edges of
/// each state are sorted by label.
struct LayerGraph {
  std::vector<std::uint64_t> offset{0};
  std::vector<std::uint32_t> label;
  std::vector<std::uint32_t> to;

  std::size_t size() const { return offset.size() - 1; }
  std::size_t begin(std::size_t v) const { return offset[v]; }
  std::size_t end(std::size_t v) const { return offset[v + 1]; }
};

/// Open-addressing set of fixed-stride u64 keys; ids are insertion order.
class KeyTable {
 public:
  explicit KeyTable(std::size_t stride) : stride_(stride), slots_(1024, kEmpty) {}

  std::size_t size() const { return count_; }
  const std::uint64_t* key(std::size_t id) const { return &arena_[id * stride_]; }

  std::pair<std::uint32_t, bool> insert(const std::uint64_t* k) {
    if ((count_ + 1) * 2 > slots_.size()) grow();
    std::size_t i = hash(k) & (slots_.size() - 1);
    while (slots_[i] != kEmpty) {
      if (std::equal(k, k + stride_, key(slots_[i]))) return {slots_[i], false};
      i = (i + 1) & (slots_.size() - 1);
    }
    slots_[i] = static_cast<std::uint32_t>(count_);
    arena_.insert(arena_.end(), k, k + stride_);
    return {static_cast<std::uint32_t>(count_++), true};
  }

 private:
  static constexpr std::uint32_t kEmpty = ~0u;

  std::size_t hash(const std::uint64_t* k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::size_t i = 0; i < stride_; ++i) {
      h ^= k[i] + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdull;
    }
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
  void grow() {
    std::vector<std::uint32_t> old(slots_.size() * 2, kEmpty);
    old.swap(slots_);
    for (std::size_t id = 0; id < count_; ++id) {
      std::size_t i = hash(key(id)) & (slots_.size() - 1);
      while (slots_[i] != kEmpty) i = (i + 1) & (slots_.size() - 1);
      slots_[i] = static_cast<std::uint32_t>(id);
    }
  }

  std::size_t stride_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> arena_;
  std::vector<std::uint32_t> slots_;
};

/// Packed letter buffer helpers: letter i of a buffer occupies bits
/// [i*b, (i+1)*b) across consecutive u64 words.
struct Packing {
  unsigned bits = 1;
  std::size_t letters = 0;
  std::size_t words = 0;

  Packing(std::size_t q, std::size_t n) : letters(n) {
    while ((std::size_t{1} << bits) < q) ++bits;
    words = (n * bits + 63) / 64;
  }
  Letter get(const std::uint64_t* p, std::size_t i) const {
    const std::size_t bit = i * bits;
    std::uint64_t v = p[bit / 64] >> (bit % 64);
    if (bit % 64 + bits > 64) v |= p[bit / 64 + 1] << (64 - bit % 64);
    return static_cast<Letter>(v & ((std::uint64_t{1} << bits) - 1));
  }
  void set(std::uint64_t* p, std::size_t i, Letter a) const {
    const std::size_t bit = i * bits;
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    p[bit / 64] &= ~(mask << (bit % 64));
    p[bit / 64] |= static_cast<std::uint64_t>(a) << (bit % 64);
    if (bit % 64 + bits > 64) {
      const unsigned spill = static_cast<unsigned>(64 - bit % 64);
      p[bit / 64 + 1] &= ~(mask >> spill);
      p[bit / 64 + 1] |= static_cast<std::uint64_t>(a) >> spill;
    }
  }
};

inline LayerGraph layer_zero(const Subshift& domain) {
  LayerGraph g;
  const auto& lg = domain.graph();
  for (std::uint32_t v = 0; v < lg.size(); ++v) {
    for (const auto& e : lg.out(v)) {
      g.label.push_back(e.label);
      g.to.push_back(e.to);
    }
    g.offset.push_back(g.label.size());
  }
  return g;
}

inline bool is_deterministic(const LayerGraph& g) {
  for (std::size_t v = 0; v < g.size(); ++v)
    for (std::size_t i = g.begin(v) + 1; i < g.end(v); ++i)
      if (g.label[i] == g.label[i - 1]) return false;
  return true;
}

/// Moore partition refinement (all states accepting) and quotient.
inline LayerGraph minimize(const LayerGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> cls(n, 0);
  std::size_t classes = 1;
  std::vector<std::uint64_t> sig;
  std::vector<std::uint64_t> h(n);
  std::vector<std::uint32_t> order(n);
  for (;;) {
    for (std::size_t v = 0; v < n; ++v) {
      std::uint64_t x = cls[v] * 0x9e3779b97f4a7c15ull + 1;
      for (std::size_t i = g.begin(v); i < g.end(v); ++i) {
        x ^= (static_cast<std::uint64_t>(g.label[i]) << 32 | cls[g.to[i]]) + 0x9e3779b97f4a7c15ull + (x << 6) + (x >> 2);
        x *= 0xff51afd7ed558ccdull;
      }
      h[v] = x ^ (x >> 29);
    }
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return h[a] != h[b] ? h[a] < h[b] : a < b;
    });
    auto same = [&](std::uint32_t a, std::uint32_t b) {
      if (cls[a] != cls[b] || g.end(a) - g.begin(a) != g.end(b) - g.begin(b)) return false;
      for (std::size_t i = g.begin(a), j = g.begin(b); i < g.end(a); ++i, ++j)
        if (g.label[i] != g.label[j] || cls[g.to[i]] != cls[g.to[j]]) return false;
      return true;
    };
    std::vector<std::uint32_t> next(n);
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && h[order[j]] == h[order[i]]) ++j;
      // Split the hash run into exact signature classes.
      std::vector<std::uint32_t> reps;
      std::vector<std::uint32_t> rep_cls;
      for (std::size_t r = i; r < j; ++r) {
        const std::uint32_t v = order[r];
        bool placed = false;
        for (std::size_t s = 0; s < reps.size(); ++s)
          if (same(reps[s], v)) {
            next[v] = rep_cls[s];
            placed = true;
            break;
          }
        if (!placed) {
          reps.push_back(v);
          rep_cls.push_back(c);
          next[v] = c++;
        }
      }
      i = j;
    }
    const bool stable = c == classes;
    cls.swap(next);
    classes = c;
    if (stable) break;
  }
  std::vector<std::int64_t> rep(classes, -1);
  for (std::size_t v = 0; v < n; ++v)
    if (rep[cls[v]] < 0) rep[cls[v]] = static_cast<std::int64_t>(v);
  LayerGraph out;
  for (std::size_t c = 0; c < classes; ++c) {
    const auto v = static_cast<std::size_t>(rep[c]);
    for (std::size_t i = g.begin(v); i < g.end(v); ++i) {
      out.label.push_back(g.label[i]);
      out.to.push_back(cls[g.to[i]]);
    }
    out.offset.push_back(out.label.size());
  }
  return out;
}

/// Stacks one more image layer on top of `g`, whose labels carry `layers`
/// base-q digits (top layer least significant). The new top layer lags by
/// `lag` steps.
inline LayerGraph add_layer(const LayerGraph& g, const LocalRule& rule, std::size_t q, std::size_t span,
                            std::size_t win_start, std::size_t state_cap) {
  const std::size_t d = static_cast<std::size_t>(rule.diameter());
  const std::size_t buf_len = span - 1;
  const Packing pack(q, buf_len);
  const std::size_t stride = 1 + pack.words;
  std::vector<std::uint64_t> key(stride, 0);

  // Warm-up: all (state, last ℓ top letters) for ℓ = 0 .. buf_len.
  std::vector<std::vector<std::uint64_t>> level;
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::vector<std::uint64_t> k(stride, 0);
    k[0] = v;
    level.push_back(std::move(k));
  }
  for (std::size_t l = 0; l < buf_len; ++l) {
    KeyTable next(stride);
    std::vector<std::uint64_t> k(stride);
    for (const auto& s : level) {
      const auto v = static_cast<std::size_t>(s[0]);
      for (std::size_t i = g.begin(v); i < g.end(v); ++i) {
        std::copy(s.begin(), s.end(), k.begin());
        k[0] = g.to[i];
        pack.set(k.data() + 1, l, static_cast<Letter>(g.label[i] % q));
        next.insert(k.data());
        if (next.size() > state_cap) throw CapExceeded("layered presentation exceeds the state cap");
      }
    }
    level.clear();
    for (std::size_t id = 0; id < next.size(); ++id) level.emplace_back(next.key(id), next.key(id) + stride);
  }

  KeyTable states(stride);
  for (const auto& s : level) states.insert(s.data());
  level.clear();

  std::unordered_map<std::string, Letter> memo;
  Word window(d);
  std::vector<Letter> full(span);
  LayerGraph out;
  std::vector<std::uint64_t> k(stride);
  for (std::size_t id = 0; id < states.size(); ++id) {
    const std::uint64_t* s = states.key(id);
    const auto v = static_cast<std::size_t>(s[0]);
    for (std::size_t j = 0; j < buf_len; ++j) full[j] = pack.get(s + 1, j);
    for (std::size_t i = g.begin(v); i < g.end(v); ++i) {
      const auto a = static_cast<Letter>(g.label[i] % q);
      full[buf_len] = a;
      std::copy(full.begin() + static_cast<std::ptrdiff_t>(win_start),
                full.begin() + static_cast<std::ptrdiff_t>(win_start + d), window.begin());
      std::string mk(window.begin(), window.end());
      auto it = memo.find(mk);
      Letter b;
      if (it != memo.end()) {
        b = it->second;
      } else {
        b = rule(window);
        memo.emplace(std::move(mk), b);
      }
      std::fill(k.begin(), k.end(), 0);
      k[0] = g.to[i];
      for (std::size_t j = 0; j < buf_len; ++j) pack.set(k.data() + 1, j, full[j + 1]);
      auto [nid, fresh] = states.insert(k.data());
      (void)fresh;
      if (states.size() > state_cap) throw CapExceeded("layered presentation exceeds the state cap");
      const std::uint64_t lab = static_cast<std::uint64_t>(g.label[i]) * q + b;
      if (lab > 0xffffffffull) throw CapExceeded("stacked labels exceed 32 bits; lower the depth");
      out.label.push_back(static_cast<std::uint32_t>(lab));
      out.to.push_back(nid);
    }
    out.offset.push_back(out.label.size());
  }
  return out;
}

inline bool is_one_state_full(const Subshift& s, std::size_t q) {
  const auto& g = s.graph();
  if (s.onesided() || g.size() != 1) return false;
  std::vector<bool> seen(q, false);
  for (const auto& e : g.out(0))
    if (e.to == 0 && e.label < q) seen[e.label] = true;
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

/// Columns of a radius-(0,1) CA on the full shift: the column at cell i is
/// determined by x_i and the shorter column at cell i+1.
inline ColumnLanguage columns_right_radius(const CellularAutomaton& f, std::size_t k, std::size_t state_cap) {
  const std::size_t q = f.alphabet().size();
  const bool unary = f.diameter() == 1;
  std::vector<Word> cur;
  for (std::size_t a = 0; a < q; ++a) cur.push_back(Word{static_cast<Letter>(a)});
  for (std::size_t t = 1; t < k; ++t) {
    std::set<Word> next;
    Word win(f.diameter());
    for (std::size_t a = 0; a < q; ++a)
      for (const Word& c : cur) {
        Word col(t + 1);
        col[0] = static_cast<Letter>(a);
        for (std::size_t r = 1; r <= t; ++r) {
          win[0] = col[r - 1];
          if (!unary) win[1] = c[r - 1];
          col[r] = f.rule()(win);
        }
        next.insert(std::move(col));
        if (next.size() > state_cap) throw CapExceeded("column set exceeds the state cap");
      }
    cur.assign(next.begin(), next.end());
  }
  ColumnLanguage out{f.alphabet(), k, 1, std::move(cur)};
  normalize(out.blocks);
  return out;
}

}  // namespace detail

/// Transducer engine: builds the presentation of {(x, F x, …, F^{k−1} x)}
/// over the domain, minimizing after each layer, and reads every height-k,
/// width-w block off its paths.
inline ColumnLanguage trace_transducer(const CellularAutomaton& f, const Subshift& domain, std::size_t k,
                                       std::size_t w = 1, std::size_t state_cap = kDefaultStateCap) {
  if (k < 1 || w < 1) throw UsageError("depth and width must be at least 1");
  if (!same_letters(f.alphabet(), domain.alphabet())) throw UsageError("domain alphabet differs from the CA alphabet");
  if (domain.onesided()) throw UsageError("partial CA domains must be twosided");
  const std::size_t q = f.alphabet().size();
  const int m = f.anchor();
  const int d = f.diameter();
  const std::size_t lag = static_cast<std::size_t>(std::max(0, d - 1 - m));
  const std::size_t span = static_cast<std::size_t>(std::max(d, m + 1));
  const std::size_t win_start = span - 1 - lag - static_cast<std::size_t>(static_cast<std::int64_t>(m));
  if (w == 1 && m == 0 && d <= 2 && detail::is_one_state_full(domain, q))
    return detail::columns_right_radius(f, k, state_cap);

  detail::LayerGraph g = detail::layer_zero(domain);
  const bool det = detail::is_deterministic(g);
  if (det) g = detail::minimize(g);
  for (std::size_t t = 1; t < k; ++t) {
    g = detail::add_layer(g, f.rule(), q, span, win_start, state_cap);
    if (det) g = detail::minimize(g);
  }

  // Collect blocks along paths of (k−1)·lag + w steps.
  const std::size_t steps = (k - 1) * lag + w;
  const std::size_t cells = k * w;
  if (static_cast<double>(cells) * std::log2(static_cast<double>(std::max<std::size_t>(q, 2))) > 63.0)
    throw CapExceeded("block too large to encode; lower depth or width");
  std::vector<std::uint64_t> qpow(cells + 1, 1);
  for (std::size_t i = 1; i <= cells; ++i) qpow[i] = qpow[i - 1] * q;
  std::vector<std::uint64_t> layer_div(k, 1);
  for (std::size_t t = k - 1; t-- > 0;) layer_div[t] = layer_div[t + 1] * q;

  struct PairHash {
    std::size_t operator()(const std::pair<std::uint32_t, std::uint64_t>& p) const noexcept {
      std::uint64_t h = p.second * 0x9e3779b97f4a7c15ull ^ (static_cast<std::uint64_t>(p.first) + 0x632be59bd9b4e019ull);
      return static_cast<std::size_t>(h ^ (h >> 32));
    }
  };
  std::vector<std::pair<std::uint32_t, std::uint64_t>> cur;
  for (std::uint32_t v = 0; v < g.size(); ++v) cur.push_back({v, 0});
  for (std::size_t s = 0; s < steps; ++s) {
    std::unordered_set<std::pair<std::uint32_t, std::uint64_t>, PairHash> next;
    for (auto [v, code] : cur)
      for (std::size_t i = g.begin(v); i < g.end(v); ++i) {
        std::uint64_t c = code;
        for (std::size_t t = 0; t < k; ++t) {
          if (s < t * lag || s >= t * lag + w) continue;
          const std::uint64_t digit = (g.label[i] / layer_div[t]) % q;
          c += digit * qpow[t * w + (s - t * lag)];
        }
        next.insert({g.to[i], c});
      }
    if (next.size() > state_cap) throw CapExceeded("block extraction exceeds the state cap");
    cur.assign(next.begin(), next.end());
  }
  std::unordered_set<std::uint64_t> codes;
  for (auto& p : cur) codes.insert(p.second);
  ColumnLanguage out{f.alphabet(), k, w, {}};
  for (std::uint64_t c : codes) {
    Word b(cells);
    for (std::size_t i = 0; i < cells; ++i) b[i] = static_cast<Letter>((c / qpow[i]) % q);
    out.blocks.push_back(std::move(b));
  }
  normalize(out.blocks);
  return out;
}

inline ColumnLanguage trace_transducer(const CellularAutomaton& f, std::size_t k, std::size_t w = 1,
                                       std::size_t state_cap = kDefaultStateCap) {
  return trace_transducer(f, detail::full_shift(f.alphabet()), k, w, state_cap);
}

inline ColumnLanguage trace_transducer(const PartialCA& f, std::size_t k, std::size_t w = 1,
                                       std::size_t state_cap = kDefaultStateCap) {
  return trace_transducer(f.ca, f.domain, k, w, state_cap);
}

/// Naive engine when the cone fits the cap, transducer otherwise.
inline ColumnLanguage trace(const CellularAutomaton& f, const Subshift& domain, std::size_t k, std::size_t w = 1,
                            Engine engine = Engine::automatic) {
  switch (engine) {
    case Engine::naive:
      return trace_naive(f, domain, k, w);
    case Engine::transducer:
      return trace_transducer(f, domain, k, w);
    case Engine::automatic:
      try {
        return trace_naive(f, domain, k, w);
      } catch (const CapExceeded&) {
        return trace_transducer(f, domain, k, w);
      }
  }
  throw UsageError("unknown engine");
}

inline ColumnLanguage trace(const CellularAutomaton& f, std::size_t k, std::size_t w = 1,
                            Engine engine = Engine::automatic) {
  return trace(f, detail::full_shift(f.alphabet()), k, w, engine);
}

inline ColumnLanguage trace(const PartialCA& f, std::size_t k, std::size_t w = 1, Engine engine = Engine::automatic) {
  return trace(f.ca, f.domain, k, w, engine);
}

/// Whether `column` is the column of cell 0 of some configuration. Cells are
/// chosen outward through the growing cones and row t is checked as soon as
/// its cone is filled, so only consistent prefixes are explored.
inline bool trace_contains(const CellularAutomaton& f, const Word& column, std::uint64_t cap = kDefaultEvalCap) {
  const std::size_t k = column.size();
  if (k == 0) return true;
  const int m = f.anchor(), d = f.diameter();
  const auto [lo, hi] = detail::cone(m, d, k, 1);
  const std::size_t q = f.alphabet().size();
  for (Letter a : column)
    if (a >= q) return false;

  // Cells in placement order; checks[i] lists the rows decided once order[i] is placed.
  std::vector<std::int64_t> order;
  std::vector<std::vector<std::size_t>> checks;
  std::vector<bool> placed(static_cast<std::size_t>(hi - lo + 1), false);
  for (std::size_t t = 0; t < k; ++t) {
    const std::int64_t a = -static_cast<std::int64_t>(t) * m;
    const std::int64_t b = a + static_cast<std::int64_t>(t) * (d - 1);
    for (std::int64_t p = a; p <= b; ++p)
      if (!placed[static_cast<std::size_t>(p - lo)]) {
        placed[static_cast<std::size_t>(p - lo)] = true;
        order.push_back(p);
        checks.emplace_back();
      }
    checks.back().push_back(t);
  }

  Word row(placed.size(), 0);
  std::uint64_t evals = 0;
  const LocalRule& rule = f.rule();
  auto cell_at = [&](std::size_t t) {
    // Row t at cell 0 from the cone segment of the initial row.
    const std::int64_t a = -static_cast<std::int64_t>(t) * m;
    Word cur(row.begin() + (a - lo), row.begin() + (a - lo) + static_cast<std::int64_t>(t) * (d - 1) + 1);
    for (std::size_t s = 0; s < t; ++s) {
      evals += cur.size() - static_cast<std::size_t>(d) + 1;
      if (evals > cap) throw CapExceeded("column search exceeds the evaluation cap");
      Word next(cur.size() - static_cast<std::size_t>(d) + 1);
      for (std::size_t j = 0; j < next.size(); ++j)
        next[j] = rule(std::span<const Letter>(cur).subspan(j, static_cast<std::size_t>(d)));
      cur = std::move(next);
    }
    return cur.front();
  };
  std::function<bool(std::size_t)> dfs = [&](std::size_t i) {
    if (i == order.size()) return true;
    for (std::size_t a = 0; a < q; ++a) {
      row[static_cast<std::size_t>(order[i] - lo)] = static_cast<Letter>(a);
      bool ok = true;
      for (std::size_t t : checks[i]) ok = ok && cell_at(t) == column[t];
      if (ok && dfs(i + 1)) return true;
    }
    return false;
  };
  return dfs(0);
}

// ---------------------------------------------------------------------------
// Derived languages

/// Union of the track projections of a language over a product alphabet.
inline ColumnLanguage project_tracks(const ColumnLanguage& lang) {
  const Alphabet& a = lang.alphabet;
  if (!a.is_product()) throw UsageError("polytrace needs a product alphabet");
  ColumnLanguage out{a.base(), lang.height, lang.width, {}};
  for (const Word& b : lang.blocks)
    for (std::size_t q = 0; q < a.height(); ++q) {
      Word p(b.size());
      for (std::size_t i = 0; i < b.size(); ++i) p[i] = a.tracks(b[i])[q];
      out.blocks.push_back(std::move(p));
    }
  normalize(out.blocks);
  return out;
}

/// ∘τ_G at depth k: τ_G at depth k, then the union of the h projections.
inline ColumnLanguage polytrace(const CellularAutomaton& g, std::size_t k, std::size_t w = 1,
                                Engine engine = Engine::automatic) {
  // A plain alphabet is its own height-1 product.
  if (!g.alphabet().is_product()) return trace(g, k, w, engine);
  return project_tracks(trace(g, k, w, engine));
}

inline ColumnLanguage polytrace(const PartialCA& g, std::size_t k, std::size_t w = 1,
                                Engine engine = Engine::automatic) {
  if (!g.ca.alphabet().is_product()) return trace(g, k, w, engine);
  return project_tracks(trace(g, k, w, engine));
}

/// Rows [from, from + k) of a language of height ≥ from + k.
inline ColumnLanguage suffix_rows(const ColumnLanguage& lang, std::size_t from, std::size_t k) {
  if (from + k > lang.height) throw UsageError("language too shallow for the requested rows");
  ColumnLanguage out{lang.alphabet, k, lang.width, {}};
  for (const Word& b : lang.blocks)
    out.blocks.emplace_back(b.begin() + static_cast<std::ptrdiff_t>(from * lang.width),
                            b.begin() + static_cast<std::ptrdiff_t>((from + k) * lang.width));
  normalize(out.blocks);
  return out;
}

/// {z_[J, J+k) : z ∈ τ_F at depth k+J}, an over-approximation of the limit
/// trace that shrinks as J grows.
inline ColumnLanguage limit_trace_approx(const CellularAutomaton& f, std::size_t k, std::size_t j,
                                         Engine engine = Engine::automatic) {
  return suffix_rows(trace(f, k + j, 1, engine), j, k);
}

/// Language of a subshift as a height-n, width-1 column language.
inline ColumnLanguage as_columns(const Subshift& s, std::size_t n) {
  return ColumnLanguage{s.alphabet(), n, 1, language(s, n)};
}

// ---------------------------------------------------------------------------
// Space-time diagrams

struct SpaceTimeDiagram {
  Alphabet alphabet;
  std::int64_t left = 0;
  std::vector<Word> rows;
};

/// Rows F^j(x) on cells [left, right] for j = 0..steps.
inline SpaceTimeDiagram diagram(const CellularAutomaton& f, const PeriodicConfiguration& x, std::size_t steps,
                                std::int64_t left, std::int64_t right) {
  if (right < left) throw UsageError("empty viewport");
  SpaceTimeDiagram out{f.alphabet(), left, {}};
  PeriodicConfiguration y = x;
  for (std::size_t t = 0; t <= steps; ++t) {
    out.rows.push_back(y.segment(left, static_cast<std::size_t>(right - left + 1)));
    if (t < steps) y = f.step(y);
  }
  return out;
}

inline std::string diagram_text(const SpaceTimeDiagram& d) {
  std::string s;
  for (const Word& r : d.rows) s += format_word(d.alphabet, r) + "\n";
  return s;
}

/// Plain PGM (P2); letter i maps to gray level i scaled over the alphabet.
inline std::string diagram_pgm(const SpaceTimeDiagram& d) {
  const std::size_t width = d.rows.empty() ? 0 : d.rows.front().size();
  const std::size_t maxval = std::max<std::size_t>(1, d.alphabet.size() - 1);
  std::string s = "P2\n" + std::to_string(width) + " " + std::to_string(d.rows.size()) + "\n" +
                  std::to_string(maxval) + "\n";
  for (const Word& r : d.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(maxval - r[i]);
    }
    s += '\n';
  }
  return s;
}

}  // namespace catrace
