#pragma once

// Alphabets, words, periodic configurations, local rules and the global
// maps of one-dimensional cellular automata, plus the usual combinators
// (padding, powers, products, restrictions).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace catrace {

using Letter = std::uint8_t;
using Word = std::vector<Letter>;

/// Raised for malformed calls: wrong window length, unknown letters, bad geometry.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an exact computation would exceed its configured budget.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a construction's hypothesis does not hold on its input.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultTableCap = std::uint64_t{1} << 24;

struct WordHash {
  std::size_t operator()(std::span<const Letter> w) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (Letter a : w) {
      h ^= a;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
  std::size_t operator()(const Word& w) const noexcept { return (*this)(std::span<const Letter>(w)); }
};

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

inline std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Alphabet

/// A finite ordered alphabet. Letter order is index order; every "pick some
/// letter" choice in the library resolves to the least index.
///
/// A product-structured alphabet B ⊆ A^h keeps an explicit decode map from
/// each letter to its h tracks over the base alphabet A. Names of product
/// letters join track names with '.'.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw UsageError("alphabet must be nonempty");
    if (names_.size() > 256) throw UsageError("alphabet larger than 256 letters");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw UsageError("empty letter name");
      if (!index_.emplace(names_[i], static_cast<Letter>(i)).second)
        throw UsageError("duplicate letter '" + names_[i] + "'");
    }
  }

  static Alphabet digits(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return Alphabet(std::move(names));
  }

  /// Product alphabet over `base` whose letters are the given tuples, sorted
  /// lexicographically and deduplicated.
  static Alphabet product(const Alphabet& base, std::vector<Word> tuples) {
    if (tuples.empty()) throw UsageError("product alphabet must be nonempty");
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    const std::size_t h = tuples.front().size();
    if (h == 0) throw UsageError("product alphabet of height 0");
    std::vector<std::string> names;
    for (const Word& t : tuples) {
      if (t.size() != h) throw UsageError("product letters of mixed height");
      std::string n;
      for (std::size_t i = 0; i < h; ++i) {
        if (t[i] >= base.size()) throw UsageError("product track outside base alphabet");
        if (i) n += '.';
        n += base.name(t[i]);
      }
      names.push_back(std::move(n));
    }
    Alphabet a(std::move(names));
    a.base_ = std::make_shared<const Alphabet>(base.base());
    a.decode_ = std::move(tuples);
    for (std::size_t i = 0; i < a.decode_.size(); ++i) a.encode_.emplace(a.decode_[i], static_cast<Letter>(i));
    return a;
  }

  /// A^h with all |A|^h letters.
  static Alphabet full_power(const Alphabet& base, std::size_t h) {
    const std::uint64_t n = detail::checked_pow(base.size(), h, 256);
    if (n > 256) throw UsageError("full power alphabet larger than 256 letters");
    std::vector<Word> tuples;
    for (std::uint64_t c = 0; c < n; ++c) {
      Word t(h);
      std::uint64_t r = c;
      for (std::size_t i = h; i-- > 0;) {
        t[i] = static_cast<Letter>(r % base.size());
        r /= base.size();
      }
      tuples.push_back(std::move(t));
    }
    return product(base, std::move(tuples));
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(Letter a) const { return names_.at(a); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<Letter> find(std::string_view n) const {
    auto it = index_.find(std::string(n));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  Letter letter(std::string_view n) const {
    auto a = find(n);
    if (!a) throw UsageError("unknown letter '" + std::string(n) + "'");
    return *a;
  }

  bool is_product() const noexcept { return base_ != nullptr; }
  std::size_t height() const noexcept { return is_product() ? decode_.front().size() : 1; }
  const Alphabet& base() const noexcept { return is_product() ? *base_ : *this; }

  /// Tracks of a letter over base(); a plain letter is its own single track.
  Word tracks(Letter a) const {
    if (!is_product()) return Word{a};
    return decode_.at(a);
  }
  std::optional<Letter> encode(const Word& tuple) const {
    if (!is_product()) {
      if (tuple.size() == 1 && tuple[0] < size()) return tuple[0];
      return std::nullopt;
    }
    auto it = encode_.find(tuple);
    if (it == encode_.end()) return std::nullopt;
    return it->second;
  }

  bool all_names_single_char() const {
    return std::all_of(names_.begin(), names_.end(), [](const std::string& s) { return s.size() == 1; });
  }

  friend bool operator==(const Alphabet& x, const Alphabet& y) {
    if (x.names_ != y.names_ || x.is_product() != y.is_product()) return false;
    return !x.is_product() || (*x.base_ == *y.base_ && x.decode_ == y.decode_);
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Letter> index_;
  std::shared_ptr<const Alphabet> base_;
  std::vector<Word> decode_;
  std::map<Word, Letter> encode_;
};

/// Base alphabet shared by two alphabets: the common base when equal,
/// otherwise the union of their base letter names (first-seen order).
inline Alphabet common_base(const Alphabet& a, const Alphabet& b) {
  if (a.base() == b.base()) return a.base();
  std::vector<std::string> names = a.base().names();
  for (const auto& n : b.base().names())
    if (!a.base().find(n)) names.push_back(n);
  return Alphabet(std::move(names));
}

/// Tracks of `a` re-encoded over another base containing its base names.
inline Word tracks_over(const Alphabet& alph, Letter a, const Alphabet& base) {
  Word t = alph.tracks(a);
  for (Letter& x : t) x = base.letter(alph.base().name(x));
  return t;
}

/// Stacked alphabet a·b: each letter is a pair, decoded as the concatenation
/// of both track tuples over a common base. Returns the alphabet and the
/// pair-to-letter table indexed [x * |b| + y].
inline std::pair<Alphabet, std::vector<Letter>> stack_alphabets(const Alphabet& a, const Alphabet& b) {
  Alphabet base = common_base(a, b);
  std::vector<Word> tuples;
  tuples.reserve(a.size() * b.size());
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = 0; y < b.size(); ++y) {
      Word t = tracks_over(a, static_cast<Letter>(x), base);
      Word u = tracks_over(b, static_cast<Letter>(y), base);
      t.insert(t.end(), u.begin(), u.end());
      tuples.push_back(std::move(t));
    }
  }
  std::vector<Word> sorted = tuples;
  Alphabet p = Alphabet::product(base, std::move(sorted));
  std::vector<Letter> pair_to(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) pair_to[i] = *p.encode(tuples[i]);
  return {std::move(p), std::move(pair_to)};
}

// ---------------------------------------------------------------------------
// Words

inline std::string format_word(const Alphabet& alph, std::span<const Letter> w) {
  std::string out;
  const bool compact = alph.all_names_single_char();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!compact && i) out += ' ';
    out += alph.name(w[i]);
  }
  return out;
}

/// Parses a word: whitespace-separated tokens, or one letter per character
/// when the text has no whitespace and every letter name is one character.
inline Word parse_word(const Alphabet& alph, std::string_view text) {
  Word w;
  const bool has_space = text.find_first_of(" \t") != std::string_view::npos;
  if (!has_space && alph.all_names_single_char()) {
    for (char c : text) w.push_back(alph.letter(std::string_view(&c, 1)));
    return w;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    if (j > i) w.push_back(alph.letter(text.substr(i, j - i)));
    i = j;
  }
  return w;
}

inline Word rotate_word(const Word& w, std::size_t i) {
  Word r(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) r[j] = w[(j + i) % w.size()];
  return r;
}

inline Word reversed(Word w) {
  std::reverse(w.begin(), w.end());
  return w;
}

inline Word repeat_letter(Letter a, std::size_t n) { return Word(n, a); }

inline Word concat(std::initializer_list<Word> parts) {
  Word out;
  for (const Word& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

/// Length of the primitive root of w (smallest p dividing |w| with w p-periodic).
inline std::size_t primitive_period(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = w[i] == w[i - p];
    if (ok) return p;
  }
  return n;
}

inline bool is_primitive(const Word& w) { return !w.empty() && primitive_period(w) == w.size(); }

inline bool is_uniform(const Word& w) {
  return std::all_of(w.begin(), w.end(), [&](Letter a) { return a == w.front(); });
}

/// Rotation index s minimizing rotate_word(w, s) lexicographically.
inline std::size_t least_rotation_index(const Word& w) {
  std::size_t best = 0;
  for (std::size_t s = 1; s < w.size(); ++s)
    if (rotate_word(w, s) < rotate_word(w, best)) best = s;
  return best;
}

// ---------------------------------------------------------------------------
// Periodic configurations

/// x_i = period[(i + phase) mod |period|].
class PeriodicConfiguration {
 public:
  PeriodicConfiguration() = default;
  explicit PeriodicConfiguration(Word period, std::int64_t phase = 0) : period_(std::move(period)), phase_(phase) {
    if (period_.empty()) throw UsageError("periodic configuration needs a nonempty period");
    phase_ = detail::floor_mod(phase_, static_cast<std::int64_t>(period_.size()));
  }

  const Word& period() const noexcept { return period_; }
  std::int64_t phase() const noexcept { return phase_; }

  Letter at(std::int64_t i) const {
    return period_[static_cast<std::size_t>(detail::floor_mod(i + phase_, static_cast<std::int64_t>(period_.size())))];
  }

  Word segment(std::int64_t from, std::size_t len) const {
    Word w(len);
    for (std::size_t j = 0; j < len; ++j) w[j] = at(from + static_cast<std::int64_t>(j));
    return w;
  }

  /// σ^k: the configuration y with y_i = x_{i+k}.
  PeriodicConfiguration shifted(std::int64_t k) const { return PeriodicConfiguration(period_, phase_ + k); }

  /// Primitive period, least rotation, phase reduced accordingly.
  PeriodicConfiguration canonical() const {
    Word root(period_.begin(), period_.begin() + static_cast<std::ptrdiff_t>(primitive_period(period_)));
    const std::size_t s = least_rotation_index(root);
    return PeriodicConfiguration(rotate_word(root, s), phase_ - static_cast<std::int64_t>(s));
  }

  friend bool operator==(const PeriodicConfiguration& x, const PeriodicConfiguration& y) {
    auto a = x.canonical();
    auto b = y.canonical();
    return a.period_ == b.period_ && a.phase_ == b.phase_;
  }

 private:
  Word period_;
  std::int64_t phase_ = 0;
};

// ---------------------------------------------------------------------------
// Local rules

/// Serializable description of a rule that is too large to tabulate. The
/// io layer rebuilds the evaluator from `kind` and the key/value fields.
struct Recipe {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> fields;
};

/// A local rule f: A^d → A with anchor m: F(x)_i = f(x_[i−m, i−m+d)).
///
/// Small rules are dense tables indexed by the mixed-radix value of the
/// window (first letter most significant). Compiled rules whose tables
/// would exceed the cap are procedural and carry a Recipe.
class LocalRule {
 public:
  using Evaluator = std::function<Letter(std::span<const Letter>)>;

  LocalRule() = default;

  static LocalRule dense(Alphabet alphabet, int anchor, int diameter, std::vector<Letter> table) {
    LocalRule r(std::move(alphabet), anchor, diameter);
    const std::uint64_t n = detail::checked_pow(r.alphabet_.size(), static_cast<std::uint64_t>(diameter), ~0ull >> 1);
    if (table.size() != n) throw UsageError("rule table must cover all " + std::to_string(n) + " windows");
    for (Letter a : table)
      if (a >= r.alphabet_.size()) throw UsageError("rule output outside alphabet");
    r.table_ = std::make_shared<const std::vector<Letter>>(std::move(table));
    return r;
  }

  static LocalRule tabulate(Alphabet alphabet, int anchor, int diameter, const Evaluator& f,
                            std::uint64_t cap = kDefaultTableCap) {
    LocalRule r(std::move(alphabet), anchor, diameter);
    const std::uint64_t n = detail::checked_pow(r.alphabet_.size(), static_cast<std::uint64_t>(diameter), cap);
    if (n > cap) throw CapExceeded("rule table of |A|^d entries exceeds the table cap");
    std::vector<Letter> table(n);
    Word w(static_cast<std::size_t>(diameter), 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      table[i] = f(w);
      for (std::size_t j = w.size(); j-- > 0;) {
        if (++w[j] < r.alphabet_.size()) break;
        w[j] = 0;
      }
    }
    return dense(std::move(r.alphabet_), anchor, diameter, std::move(table));
  }

  static LocalRule procedural(Alphabet alphabet, int anchor, int diameter, Evaluator f,
                              std::optional<Recipe> recipe = std::nullopt) {
    LocalRule r(std::move(alphabet), anchor, diameter);
    r.eval_ = std::make_shared<const Evaluator>(std::move(f));
    if (recipe) r.recipe_ = std::make_shared<const Recipe>(std::move(*recipe));
    return r;
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  int anchor() const noexcept { return anchor_; }
  int diameter() const noexcept { return diameter_; }
  bool is_dense() const noexcept { return table_ != nullptr; }
  const std::vector<Letter>& table() const { return *table_; }
  const Recipe* recipe() const noexcept { return recipe_.get(); }

  std::uint64_t index(std::span<const Letter> w) const noexcept {
    std::uint64_t i = 0;
    for (Letter a : w) i = i * alphabet_.size() + a;
    return i;
  }

  Word window_at(std::uint64_t index) const {
    Word w(static_cast<std::size_t>(diameter_));
    for (std::size_t j = w.size(); j-- > 0;) {
      w[j] = static_cast<Letter>(index % alphabet_.size());
      index /= alphabet_.size();
    }
    return w;
  }

  /// Unchecked evaluation; `w` must have length diameter().
  Letter operator()(std::span<const Letter> w) const {
    if (table_) return (*table_)[index(w)];
    return (*eval_)(w);
  }

  /// Dense copy of this rule (identity when already dense).
  LocalRule tabulated(std::uint64_t cap = kDefaultTableCap) const {
    if (is_dense()) return *this;
    return tabulate(alphabet_, anchor_, diameter_, *eval_, cap);
  }

 private:
  LocalRule(Alphabet alphabet, int anchor, int diameter)
      : alphabet_(std::move(alphabet)), anchor_(anchor), diameter_(diameter) {
    if (diameter < 1) throw UsageError("diameter must be at least 1");
  }

  Alphabet alphabet_;
  int anchor_ = 0;
  int diameter_ = 1;
  std::shared_ptr<const std::vector<Letter>> table_;
  std::shared_ptr<const Evaluator> eval_;
  std::shared_ptr<const Recipe> recipe_;
};

// ---------------------------------------------------------------------------
// Cellular automata

class CellularAutomaton {
 public:
  CellularAutomaton() = default;
  explicit CellularAutomaton(LocalRule rule) : rule_(std::move(rule)) {}

  const LocalRule& rule() const noexcept { return rule_; }
  const Alphabet& alphabet() const noexcept { return rule_.alphabet(); }
  int anchor() const noexcept { return rule_.anchor(); }
  int diameter() const noexcept { return rule_.diameter(); }

  Letter apply_local(std::span<const Letter> window) const {
    if (window.size() != static_cast<std::size_t>(diameter()))
      throw UsageError("window length " + std::to_string(window.size()) + " differs from diameter " +
                       std::to_string(diameter()));
    for (Letter a : window)
      if (a >= alphabet().size()) throw UsageError("window letter outside alphabet");
    return rule_(window);
  }

  PeriodicConfiguration step(const PeriodicConfiguration& x) const {
    for (Letter a : x.period())
      if (a >= alphabet().size()) throw UsageError("configuration letter outside alphabet");
    const auto n = static_cast<std::int64_t>(x.period().size());
    Word y(x.period().size());
    Word w(static_cast<std::size_t>(diameter()));
    for (std::int64_t i = 0; i < n; ++i) {
      for (int j = 0; j < diameter(); ++j) w[static_cast<std::size_t>(j)] = x.at(i - anchor() + j);
      y[static_cast<std::size_t>(i)] = rule_(w);
    }
    return PeriodicConfiguration(std::move(y), 0);
  }

  PeriodicConfiguration iterate(PeriodicConfiguration x, std::size_t steps) const {
    for (std::size_t t = 0; t < steps; ++t) x = step(x);
    return x;
  }

  /// One step on a finite segment: output cell p reads input [p, p+d).
  /// If the input segment starts at position s, the output starts at s + anchor.
  Word step_segment(std::span<const Letter> row) const {
    const std::size_t d = static_cast<std::size_t>(diameter());
    if (row.size() < d) return {};
    Word out(row.size() - d + 1);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = rule_(row.subspan(p, d));
    return out;
  }

  /// Column (F^j(x)_cell)_{j<depth}.
  Word column(const PeriodicConfiguration& x, std::int64_t cell, std::size_t depth) const {
    Word col;
    PeriodicConfiguration y = x;
    for (std::size_t t = 0; t < depth; ++t) {
      col.push_back(y.at(cell));
      if (t + 1 < depth) y = step(y);
    }
    return col;
  }

 private:
  LocalRule rule_;
};

// ---------------------------------------------------------------------------
// Letter maps ξ: A′ → A′

class LetterMap {
 public:
  LetterMap() = default;
  explicit LetterMap(std::size_t alphabet_size) : image_(alphabet_size, -1) {}

  static LetterMap total(const std::vector<Letter>& image) {
    LetterMap m(image.size());
    for (std::size_t a = 0; a < image.size(); ++a) m.set(static_cast<Letter>(a), image[a]);
    return m;
  }
  static LetterMap identity(std::size_t n) {
    LetterMap m(n);
    for (std::size_t a = 0; a < n; ++a) m.set(static_cast<Letter>(a), static_cast<Letter>(a));
    return m;
  }
  static LetterMap constant(std::size_t n, Letter z) {
    LetterMap m(n);
    for (std::size_t a = 0; a < n; ++a) m.set(static_cast<Letter>(a), z);
    return m;
  }

  void set(Letter a, Letter b) {
    if (a >= image_.size() || b >= image_.size()) throw UsageError("letter map outside alphabet");
    image_[a] = b;
  }
  std::size_t alphabet_size() const noexcept { return image_.size(); }
  bool defined(Letter a) const { return a < image_.size() && image_[a] >= 0; }
  Letter operator()(Letter a) const {
    if (!defined(a)) throw UsageError("letter map undefined on letter " + std::to_string(a));
    return static_cast<Letter>(image_[a]);
  }
  std::vector<Letter> domain() const {
    std::vector<Letter> d;
    for (std::size_t a = 0; a < image_.size(); ++a)
      if (image_[a] >= 0) d.push_back(static_cast<Letter>(a));
    return d;
  }
  bool is_total() const {
    return std::all_of(image_.begin(), image_.end(), [](int v) { return v >= 0; });
  }
  /// The domain is closed under the map.
  bool is_endomap() const {
    for (int v : image_)
      if (v >= 0 && image_[static_cast<std::size_t>(v)] < 0) return false;
    return !domain().empty();
  }
  std::vector<Letter> image_set() const {
    std::vector<bool> seen(image_.size(), false);
    for (int v : image_)
      if (v >= 0) seen[static_cast<std::size_t>(v)] = true;
    std::vector<Letter> out;
    for (std::size_t a = 0; a < seen.size(); ++a)
      if (seen[a]) out.push_back(static_cast<Letter>(a));
    return out;
  }

  /// (ξ^j(a))_{j<n}.
  Word orbit(Letter a, std::size_t n) const {
    Word w;
    for (std::size_t j = 0; j < n; ++j) {
      w.push_back(a);
      if (j + 1 < n) a = (*this)(a);
    }
    return w;
  }

  /// Orbit of a as prefix · cycle^∞.
  std::pair<Word, Word> orbit_lasso(Letter a) const {
    std::vector<int> seen_at(image_.size(), -1);
    Word seq;
    while (seen_at[a] < 0) {
      seen_at[a] = static_cast<int>(seq.size());
      seq.push_back(a);
      a = (*this)(a);
    }
    const auto start = static_cast<std::size_t>(seen_at[a]);
    return {Word(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(start)),
            Word(seq.begin() + static_cast<std::ptrdiff_t>(start), seq.end())};
  }

  /// ∀j ξ^j(a) ≠ ξ^j(b), decided on the (ξ×ξ)-orbit within |A|² steps.
  bool separates_forever(Letter a, Letter b) const {
    const std::size_t bound = image_.size() * image_.size() + 1;
    for (std::size_t j = 0; j <= bound; ++j) {
      if (a == b) return false;
      a = (*this)(a);
      b = (*this)(b);
    }
    return true;
  }

  /// O_ξ is nilpotent iff ξ^J(A′) is a single letter for some J; returns it.
  std::optional<Letter> nilpotent_zero() const {
    std::vector<Letter> cur = domain();
    for (std::size_t it = 0; it <= image_.size() + 1; ++it) {
      std::vector<Letter> next;
      for (Letter a : cur) next.push_back((*this)(a));
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      if (next == cur) break;
      cur = std::move(next);
    }
    if (cur.size() == 1) return cur.front();
    return std::nullopt;
  }
  bool is_nilpotent() const { return nilpotent_zero().has_value(); }

  friend bool operator==(const LetterMap&, const LetterMap&) = default;

 private:
  std::vector<int> image_;
};

// ---------------------------------------------------------------------------
// Elementary automata

inline CellularAutomaton radius0_from_map(const Alphabet& alph, const LetterMap& xi) {
  if (!xi.is_total() || xi.alphabet_size() != alph.size()) throw UsageError("radius-0 CA needs a total letter map");
  std::vector<Letter> table(alph.size());
  for (std::size_t a = 0; a < alph.size(); ++a) table[a] = xi(static_cast<Letter>(a));
  return CellularAutomaton(LocalRule::dense(alph, 0, 1, std::move(table)));
}

inline CellularAutomaton identity_ca(const Alphabet& alph) {
  return radius0_from_map(alph, LetterMap::identity(alph.size()));
}

/// σ: anchor 0, diameter 2, f(ab) = b.
inline CellularAutomaton shift_ca(const Alphabet& alph) {
  return CellularAutomaton(
      LocalRule::tabulate(alph, 0, 2, [](std::span<const Letter> w) { return w[1]; }));
}

/// Anchor 0, diameter 2, f(ab) = min(a, b) in letter order.
inline CellularAutomaton min_ca(const Alphabet& alph) {
  return CellularAutomaton(
      LocalRule::tabulate(alph, 0, 2, [](std::span<const Letter> w) { return std::min(w[0], w[1]); }));
}

inline CellularAutomaton constant_ca(const Alphabet& alph, Letter z, int diameter = 2) {
  return CellularAutomaton(
      LocalRule::tabulate(alph, 0, diameter, [z](std::span<const Letter>) { return z; }));
}

// ---------------------------------------------------------------------------
// Combinators

/// Same global map with a wider window [i−anchor, i−anchor+diameter) that
/// contains the original one.
inline CellularAutomaton pad_geometry(const CellularAutomaton& ca, int anchor, int diameter,
                                      std::uint64_t cap = kDefaultTableCap) {
  const int offset = anchor - ca.anchor();
  if (offset < 0 || diameter - anchor < ca.diameter() - ca.anchor())
    throw UsageError("padded window must contain the original window");
  if (anchor == ca.anchor() && diameter == ca.diameter()) return ca;
  const int d = ca.diameter();
  const LocalRule inner = ca.rule();
  LocalRule::Evaluator f = [inner, offset, d](std::span<const Letter> w) {
    return inner(w.subspan(static_cast<std::size_t>(offset), static_cast<std::size_t>(d)));
  };
  if (inner.is_dense()) {
    const std::uint64_t n = detail::checked_pow(ca.alphabet().size(), static_cast<std::uint64_t>(diameter), cap);
    if (n <= cap) return CellularAutomaton(LocalRule::tabulate(ca.alphabet(), anchor, diameter, f, cap));
  }
  return CellularAutomaton(LocalRule::procedural(ca.alphabet(), anchor, diameter, std::move(f)));
}

/// Smallest geometry (anchor, diameter) whose window contains all of them.
inline std::pair<int, int> common_geometry(std::span<const CellularAutomaton> cas) {
  int anchor = cas.front().anchor();
  int right = cas.front().diameter() - cas.front().anchor();
  for (const auto& c : cas) {
    anchor = std::max(anchor, c.anchor());
    right = std::max(right, c.diameter() - c.anchor());
  }
  return {anchor, anchor + right};
}

/// F^n as a single CA: diameter n(d−1)+1, anchor n·m.
inline CellularAutomaton power(const CellularAutomaton& ca, std::size_t n, std::uint64_t cap = kDefaultTableCap) {
  if (n < 1) throw UsageError("power needs n >= 1");
  if (n == 1) return ca;
  const int d = static_cast<int>(n) * (ca.diameter() - 1) + 1;
  const int m = static_cast<int>(n) * ca.anchor();
  const std::uint64_t size = detail::checked_pow(ca.alphabet().size(), static_cast<std::uint64_t>(d), cap);
  if (size > cap) throw CapExceeded("power rule table exceeds the table cap");
  return CellularAutomaton(LocalRule::tabulate(
      ca.alphabet(), m, d,
      [&ca, n](std::span<const Letter> w) {
        Word row(w.begin(), w.end());
        for (std::size_t t = 0; t < n; ++t) row = ca.step_segment(row);
        return row.front();
      },
      cap));
}

/// Componentwise product on the stacked alphabet. Both automata must share
/// anchor and diameter (see pad_geometry / common_geometry).
inline CellularAutomaton product(const CellularAutomaton& f, const CellularAutomaton& g,
                                 std::uint64_t cap = kDefaultTableCap) {
  if (f.anchor() != g.anchor() || f.diameter() != g.diameter())
    throw UsageError("product needs equal anchors and diameters; pad first");
  auto [alph, pair_to] = stack_alphabets(f.alphabet(), g.alphabet());
  std::vector<std::pair<Letter, Letter>> from(alph.size());
  const std::size_t nb = g.alphabet().size();
  for (std::size_t i = 0; i < pair_to.size(); ++i)
    from[pair_to[i]] = {static_cast<Letter>(i / nb), static_cast<Letter>(i % nb)};
  const auto d = static_cast<std::size_t>(f.diameter());
  LocalRule::Evaluator rule = [f, g, from, pair_to, nb, d](std::span<const Letter> w) {
    Word a(d), b(d);
    for (std::size_t j = 0; j < d; ++j) {
      a[j] = from[w[j]].first;
      b[j] = from[w[j]].second;
    }
    return pair_to[static_cast<std::size_t>(f.rule()(a)) * nb + g.rule()(b)];
  };
  return CellularAutomaton(LocalRule::tabulate(alph, f.anchor(), f.diameter(), rule, cap));
}

/// Restriction to a sub-alphabet closed under the rule; letters keep their
/// names (and tracks, for product alphabets).
inline CellularAutomaton restrict_to(const CellularAutomaton& ca, const std::vector<Letter>& letters,
                                     std::uint64_t cap = kDefaultTableCap) {
  std::vector<Letter> sub = letters;
  std::sort(sub.begin(), sub.end());
  sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
  const Alphabet& full = ca.alphabet();
  Alphabet alph;
  if (full.is_product()) {
    std::vector<Word> tuples;
    for (Letter a : sub) tuples.push_back(full.tracks(a));
    alph = Alphabet::product(full.base(), tuples);
  } else {
    std::vector<std::string> names;
    for (Letter a : sub) names.push_back(full.name(a));
    alph = Alphabet(names);
  }
  std::vector<Letter> to_full(alph.size());
  std::vector<int> to_sub(full.size(), -1);
  for (std::size_t i = 0; i < alph.size(); ++i) {
    to_full[i] = full.letter(alph.name(static_cast<Letter>(i)));
    to_sub[to_full[i]] = static_cast<int>(i);
  }
  return CellularAutomaton(LocalRule::tabulate(
      alph, ca.anchor(), ca.diameter(),
      [&](std::span<const Letter> w) {
        Word x(w.size());
        for (std::size_t j = 0; j < w.size(); ++j) x[j] = to_full[w[j]];
        const int out = to_sub[ca.rule()(x)];
        if (out < 0) throw PreconditionError("sub-alphabet is not closed under the rule");
        return static_cast<Letter>(out);
      },
      cap));
}

/// Whether the rule depends only on the cell and cells to its right.
inline bool is_onesided(const CellularAutomaton& ca) {
  if (ca.anchor() <= 0) return true;
  if (!ca.rule().is_dense()) return false;
  const auto m = static_cast<std::size_t>(std::min(ca.anchor(), ca.diameter()));
  const std::uint64_t n = ca.rule().table().size();
  for (std::uint64_t i = 0; i < n; ++i) {
    Word w = ca.rule().window_at(i);
    Word v = w;
    std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), Letter{0});
    if (ca.rule()(w) != ca.rule()(v)) return false;
  }
  return true;
}

/// Equivalent one-sided automaton written with anchor 0.
inline CellularAutomaton to_anchor_zero(const CellularAutomaton& ca, std::uint64_t cap = kDefaultTableCap) {
  if (!is_onesided(ca)) throw UsageError("automaton is not one-sided");
  const int m = ca.anchor();
  const int d = ca.diameter();
  if (m == 0) return ca;
  if (m < 0) return pad_geometry(ca, 0, d - m, cap);
  if (m >= d) return constant_ca(ca.alphabet(), ca.rule()(Word(static_cast<std::size_t>(d), 0)), 1);
  const LocalRule inner = ca.rule();
  return CellularAutomaton(LocalRule::tabulate(
      ca.alphabet(), 0, d - m,
      [inner, m](std::span<const Letter> w) {
        Word x(static_cast<std::size_t>(m), 0);
        x.insert(x.end(), w.begin(), w.end());
        return inner(x);
      },
      cap));
}

/// s is spreading: d > 1 and every window containing s maps to s.
inline bool is_spreading_state(const CellularAutomaton& ca, Letter s, std::uint64_t cap = kDefaultTableCap) {
  if (ca.diameter() <= 1) return false;
  const LocalRule r = ca.rule().tabulated(cap);
  for (std::uint64_t i = 0; i < r.table().size(); ++i) {
    Word w = r.window_at(i);
    if (std::find(w.begin(), w.end(), s) != w.end() && r.table()[i] != s) return false;
  }
  return true;
}

}  // namespace catrace
