#pragma once

// Line-oriented text formats: `key: value` lines, `#` starts a comment.
//
// CA file:       alphabet, [base], anchor, diameter, then one `rule: w -> a`
//                line per window, or `recipe: kind` plus `recipe.<field>:`
//                lines for procedural rules.
// Subshift file: type sft|sofic|orbit, alphabet, [base], then
//                sft:   `forbidden: w1 w2 …` or `order:` + `allowed:`
//                sofic: [sided: one], states, [start], `edges: p a q` lines
//                orbit: `xi: a->b, …`
// Border file:   alphabet, [base], block-length, `words:` and
//                `delta: u -> v` lines.
// Word lists:    alphabet, [base], `words:` lines.
//
// Product alphabets list their letters as dotted tuples (`0.1`) and name
// the base alphabet under `base:`. Word lists are space separated when
// every letter is one character, comma separated otherwise.

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "catrace/compile.hpp"
#include "catrace/freeze.hpp"
#include "catrace/subshift.hpp"

namespace catrace {

class ParseError : public UsageError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : UsageError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (true) {
    const auto j = s.find(sep, i);
    out.push_back(trim(s.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i)));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

inline std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

inline std::vector<Entry> read_entries(std::string_view text) {
  std::vector<Entry> out;
  std::size_t n = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++n;
    std::string_view line(raw);
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    if (trim(line).empty()) continue;
    const auto c = line.find(':');
    if (c == std::string_view::npos) throw ParseError(n, "expected 'key: value'");
    Entry e{trim(line.substr(0, c)), trim(line.substr(c + 1)), n};
    if (e.key.empty()) throw ParseError(n, "empty key");
    out.push_back(std::move(e));
  }
  return out;
}

/// Entries grouped by key, rejecting keys outside `allowed` (a trailing
/// '.' in `allowed` admits any key with that prefix).
class Entries {
 public:
  Entries(std::string_view text, std::initializer_list<std::string_view> allowed) {
    for (auto& e : read_entries(text)) {
      bool ok = false;
      for (auto a : allowed)
        ok = ok || e.key == a || (a.ends_with('.') && e.key.starts_with(a) && e.key.size() > a.size());
      if (!ok) throw ParseError(e.line, "unknown key '" + e.key + "'");
      all_.push_back(e);
    }
  }

  const Entry* one(std::string_view key) const {
    const Entry* found = nullptr;
    for (const auto& e : all_)
      if (e.key == key) {
        if (found) throw ParseError(e.line, "duplicate key '" + e.key + "'");
        found = &e;
      }
    return found;
  }
  const Entry& need(std::string_view key) const {
    if (auto e = one(key)) return *e;
    throw ParseError(0, "missing key '" + std::string(key) + "'");
  }
  std::vector<const Entry*> many(std::string_view key) const {
    std::vector<const Entry*> out;
    for (const auto& e : all_)
      if (e.key == key) out.push_back(&e);
    return out;
  }
  const std::vector<Entry>& all() const { return all_; }

 private:
  std::vector<Entry> all_;
};

template <class T>
T parse_number(const Entry& e) {
  T v{};
  const char* b = e.value.data();
  auto [p, ec] = std::from_chars(b, b + e.value.size(), v);
  if (ec != std::errc{} || p != b + e.value.size()) throw ParseError(e.line, "'" + e.key + "' needs a number");
  return v;
}

/// Rethrows library errors raised while interpreting an entry with its line.
template <class F>
auto at_line(const Entry& e, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const UsageError& x) {
    throw ParseError(e.line, x.what());
  } catch (const PreconditionError& x) {
    throw ParseError(e.line, x.what());
  }
}

inline Alphabet read_alphabet(const Entries& es) {
  const Entry& a = es.need("alphabet");
  const Entry* b = es.one("base");
  return at_line(a, [&] {
    auto names = tokens(a.value);
    if (!b) return Alphabet(names);
    const Alphabet base(tokens(b->value));
    std::vector<Word> tuples;
    for (const auto& n : names) {
      Word t;
      for (const auto& part : split(n, '.')) t.push_back(base.letter(part));
      tuples.push_back(std::move(t));
    }
    Alphabet out = Alphabet::product(base, tuples);
    if (out.names() != names) throw UsageError("product letters must be distinct and listed in sorted order");
    return out;
  });
}

inline void write_alphabet(std::ostream& out, const Alphabet& a) {
  out << "alphabet:";
  for (const auto& n : a.names()) out << ' ' << n;
  out << '\n';
  if (a.is_product()) {
    out << "base:";
    for (const auto& n : a.base().names()) out << ' ' << n;
    out << '\n';
  }
}

inline std::vector<Word> read_word_list(const Alphabet& a, const Entry& e) {
  return at_line(e, [&] {
    std::vector<Word> out;
    if (e.value.find(',') != std::string::npos || !a.all_names_single_char()) {
      for (const auto& part : split(e.value, ','))
        if (!part.empty()) out.push_back(parse_word(a, part));
    } else {
      for (const auto& t : tokens(e.value)) out.push_back(parse_word(a, t));
    }
    return out;
  });
}

inline std::string format_word_list(const Alphabet& a, const std::vector<Word>& ws) {
  std::string out;
  const std::string sep = a.all_names_single_char() ? " " : ", ";
  for (std::size_t i = 0; i < ws.size(); ++i) out += (i ? sep : "") + format_word(a, ws[i]);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Letter maps: `a->b` pairs separated by commas; omitted letters undefined.

inline LetterMap parse_letter_map(const Alphabet& a, std::string_view text) {
  LetterMap m(a.size());
  for (const auto& part : detail::split(text, ',')) {
    if (part.empty()) continue;
    const auto arrow = part.find("->");
    if (arrow == std::string::npos) throw UsageError("letter map entries look like 'a->b'");
    const Letter x = a.letter(detail::trim(part.substr(0, arrow)));
    const Letter y = a.letter(detail::trim(part.substr(arrow + 2)));
    if (m.defined(x)) throw UsageError("letter '" + a.name(x) + "' mapped twice");
    m.set(x, y);
  }
  return m;
}

inline std::string format_letter_map(const Alphabet& a, const LetterMap& m) {
  std::string out;
  for (Letter x : m.domain()) out += (out.empty() ? "" : ", ") + a.name(x) + "->" + a.name(m(x));
  return out;
}

// ---------------------------------------------------------------------------
// Cellular automata

inline CellularAutomaton parse_ca(std::string_view text, std::uint64_t cap = kDefaultTableCap) {
  detail::Entries es(text, {"alphabet", "base", "anchor", "diameter", "rule", "recipe", "recipe."});
  const Alphabet a = detail::read_alphabet(es);
  const int anchor = detail::parse_number<int>(es.need("anchor"));
  const detail::Entry& de = es.need("diameter");
  const int d = detail::parse_number<int>(de);
  if (d < 1) throw ParseError(de.line, "diameter must be at least 1");
  if (const detail::Entry* r = es.one("recipe")) {
    if (!es.many("rule").empty()) throw ParseError(es.many("rule").front()->line, "rule lines and a recipe are exclusive");
    Recipe rec{r->value, {}};
    for (const auto& e : es.all())
      if (e.key.starts_with("recipe.")) rec.fields.emplace_back(e.key.substr(7), e.value);
    return detail::at_line(*r, [&] { return CellularAutomaton(rule_from_recipe(a, anchor, d, rec)); });
  }
  const std::uint64_t n = detail::checked_pow(a.size(), static_cast<std::uint64_t>(d), cap);
  if (n > cap) throw ParseError(de.line, "rule table exceeds the cap");
  std::vector<int> table(n, -1);
  const LocalRule shape = LocalRule::dense(a, anchor, d, std::vector<Letter>(n, 0));
  for (const detail::Entry* e : es.many("rule")) {
    detail::at_line(*e, [&] {
      const auto arrow = e->value.find("->");
      if (arrow == std::string::npos) throw UsageError("rule lines look like 'w -> a'");
      const Word w = parse_word(a, detail::trim(e->value.substr(0, arrow)));
      const Word out = parse_word(a, detail::trim(e->value.substr(arrow + 2)));
      if (w.size() != static_cast<std::size_t>(d)) throw UsageError("window length differs from the diameter");
      if (out.size() != 1) throw UsageError("rule output must be one letter");
      auto& slot = table[shape.index(w)];
      if (slot >= 0) throw UsageError("window '" + format_word(a, w) + "' defined twice");
      slot = out[0];
      return 0;
    });
  }
  std::vector<Letter> dense(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (table[i] < 0) throw ParseError(0, "no rule for window '" + format_word(a, shape.window_at(i)) + "'");
    dense[i] = static_cast<Letter>(table[i]);
  }
  return CellularAutomaton(LocalRule::dense(a, anchor, d, std::move(dense)));
}

/// Dense rules are written as full tables, procedural ones as recipes.
inline std::string emit_ca(const CellularAutomaton& f) {
  std::ostringstream out;
  detail::write_alphabet(out, f.alphabet());
  out << "anchor: " << f.anchor() << "\ndiameter: " << f.diameter() << '\n';
  const LocalRule& r = f.rule();
  if (!r.is_dense()) {
    if (!r.recipe()) throw UsageError("procedural rule has no recipe and cannot be serialized");
    out << "recipe: " << r.recipe()->kind << '\n';
    for (const auto& [k, v] : r.recipe()->fields) out << "recipe." << k << ": " << v << '\n';
    return out.str();
  }
  const auto& t = r.table();
  for (std::uint64_t i = 0; i < t.size(); ++i)
    out << "rule: " << format_word(f.alphabet(), r.window_at(i)) << " -> " << f.alphabet().name(t[i]) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Subshifts

inline Subshift parse_subshift(std::string_view text) {
  detail::Entries es(text, {"type", "alphabet", "base", "forbidden", "order", "allowed", "sided", "states", "start",
                            "edges", "xi"});
  const detail::Entry& te = es.need("type");
  const Alphabet a = detail::read_alphabet(es);
  auto reject = [&](std::initializer_list<std::string_view> keys) {
    for (auto k : keys)
      if (auto v = es.many(k); !v.empty())
        throw ParseError(v.front()->line, "key '" + std::string(k) + "' does not apply to type " + te.value);
  };
  if (te.value == "sft") {
    reject({"sided", "states", "start", "edges", "xi"});
    const auto forb = es.many("forbidden");
    if (!forb.empty()) {
      reject({"order", "allowed"});
      WordSet words;
      for (const detail::Entry* e : forb)
        for (Word& w : detail::read_word_list(a, *e)) words.push_back(std::move(w));
      return detail::at_line(*forb.front(), [&] { return Subshift::sft_forbidden(a, words); });
    }
    const detail::Entry& oe = es.need("order");
    const auto order = detail::parse_number<std::size_t>(oe);
    WordSet words;
    for (const detail::Entry* e : es.many("allowed"))
      for (Word& w : detail::read_word_list(a, *e)) words.push_back(std::move(w));
    return detail::at_line(oe, [&] { return Subshift::sft(a, order, words); });
  }
  if (te.value == "sofic") {
    reject({"forbidden", "order", "allowed", "xi"});
    bool onesided = false;
    if (const detail::Entry* s = es.one("sided")) {
      if (s->value != "one" && s->value != "two") throw ParseError(s->line, "sided is 'one' or 'two'");
      onesided = s->value == "one";
    }
    const detail::Entry& se = es.need("states");
    const auto n = detail::parse_number<std::uint32_t>(se);
    LabeledGraph g(n);
    for (const detail::Entry* e : es.many("edges")) {
      auto t = detail::tokens(e->value);
      if (t.size() != 3) throw ParseError(e->line, "edges lines look like 'p a q'");
      detail::Entry ep{e->key, t[0], e->line}, eq{e->key, t[2], e->line};
      const auto p = detail::parse_number<std::uint32_t>(ep);
      const auto q = detail::parse_number<std::uint32_t>(eq);
      if (p >= n || q >= n) throw ParseError(e->line, "edge endpoint out of range");
      const Letter lab = detail::at_line(*e, [&] { return a.letter(t[1]); });
      g.add_edge(p, lab, q);
    }
    std::vector<std::uint32_t> starts;
    if (const detail::Entry* s = es.one("start")) {
      if (!onesided) throw ParseError(s->line, "start states need 'sided: one'");
      for (const auto& tok : detail::tokens(s->value)) {
        detail::Entry et{s->key, tok, s->line};
        starts.push_back(detail::parse_number<std::uint32_t>(et));
      }
    }
    return detail::at_line(se, [&] { return Subshift::sofic(a, g, onesided, starts); });
  }
  if (te.value == "orbit") {
    reject({"forbidden", "order", "allowed", "sided", "states", "start", "edges"});
    const detail::Entry& xe = es.need("xi");
    return detail::at_line(xe, [&] { return Subshift::orbit(a, parse_letter_map(a, xe.value)); });
  }
  throw ParseError(te.line, "type is sft, sofic or orbit");
}

inline std::string emit_subshift(const Subshift& s) {
  std::ostringstream out;
  const Alphabet& a = s.alphabet();
  switch (s.kind()) {
    case Subshift::Kind::sft:
      out << "type: sft\n";
      detail::write_alphabet(out, a);
      if (s.forbidden()) {
        out << "forbidden: " << detail::format_word_list(a, *s.forbidden()) << '\n';
      } else {
        out << "order: " << s.order() << '\n';
        out << "allowed: " << detail::format_word_list(a, s.allowed()) << '\n';
      }
      break;
    case Subshift::Kind::orbit:
      out << "type: orbit\n";
      detail::write_alphabet(out, a);
      out << "xi: " << format_letter_map(a, s.map()) << '\n';
      break;
    case Subshift::Kind::sofic: {
      out << "type: sofic\n";
      detail::write_alphabet(out, a);
      if (s.onesided()) out << "sided: one\n";
      const auto& g = s.graph();
      out << "states: " << g.size() << '\n';
      if (s.onesided()) {
        out << "start:";
        for (auto v : s.starts()) out << ' ' << v;
        out << '\n';
      }
      for (std::uint32_t v = 0; v < g.size(); ++v)
        for (const auto& e : g.out(v)) out << "edges: " << v << ' ' << a.name(e.label) << ' ' << e.to << '\n';
      break;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Word lists and borders

struct WordList {
  Alphabet alphabet;
  std::vector<Word> words;
};

inline WordList parse_word_list(std::string_view text) {
  detail::Entries es(text, {"alphabet", "base", "words"});
  WordList out{detail::read_alphabet(es), {}};
  for (const detail::Entry* e : es.many("words"))
    for (Word& w : detail::read_word_list(out.alphabet, *e)) out.words.push_back(std::move(w));
  return out;
}

inline std::string emit_word_list(const WordList& l) {
  std::ostringstream out;
  detail::write_alphabet(out, l.alphabet);
  out << "words: " << detail::format_word_list(l.alphabet, l.words) << '\n';
  return out.str();
}

inline Border parse_border(std::string_view text) {
  detail::Entries es(text, {"alphabet", "base", "block-length", "words", "delta"});
  Border b;
  b.alphabet = detail::read_alphabet(es);
  b.block_length = detail::parse_number<std::size_t>(es.need("block-length"));
  for (const detail::Entry* e : es.many("words"))
    for (Word& w : detail::read_word_list(b.alphabet, *e)) b.words.push_back(std::move(w));
  normalize(b.words);
  if (b.words.empty()) throw ParseError(0, "border has no words");
  b.delta.assign(b.words.size(), b.words.size());
  for (const detail::Entry* e : es.many("delta")) {
    detail::at_line(*e, [&] {
      const auto arrow = e->value.find("->");
      if (arrow == std::string::npos) throw UsageError("delta lines look like 'u -> v'");
      const std::size_t from = b.index_of(parse_word(b.alphabet, detail::trim(e->value.substr(0, arrow))));
      const std::size_t to = b.index_of(parse_word(b.alphabet, detail::trim(e->value.substr(arrow + 2))));
      if (b.delta[from] != b.words.size()) throw UsageError("delta defined twice on one word");
      b.delta[from] = to;
      return 0;
    });
  }
  for (std::size_t i = 0; i < b.words.size(); ++i)
    if (b.delta[i] == b.words.size())
      throw ParseError(0, "delta undefined on '" + format_word(b.alphabet, b.words[i]) + "'");
  try {
    validate_border(b);
  } catch (const PreconditionError& x) {
    throw ParseError(0, x.what());
  }
  return b;
}

inline std::string emit_border(const Border& b) {
  std::ostringstream out;
  detail::write_alphabet(out, b.alphabet);
  out << "block-length: " << b.block_length << '\n';
  out << "words: " << detail::format_word_list(b.alphabet, b.words) << '\n';
  for (std::size_t i = 0; i < b.words.size(); ++i)
    out << "delta: " << format_word(b.alphabet, b.words[i]) << " -> " << format_word(b.alphabet, b.words[b.delta[i]])
        << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Provenance sidecar: flat `key: value` lines.

inline std::string emit_provenance(const CompiledArtifact& art) {
  std::ostringstream out;
  out << "provenance: " << art.provenance << '\n';
  out << "offset: " << art.offset << '\n';
  out << "partial: " << (art.domain ? "yes" : "no") << '\n';
  for (const auto& [k, v] : art.details) out << k << ": " << v << '\n';
  if (!art.witness_recipe.empty()) out << "witness: " << art.witness_recipe << '\n';
  return out.str();
}

inline std::vector<std::pair<std::string, std::string>> parse_provenance(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& e : detail::read_entries(text)) out.emplace_back(e.key, e.value);
  return out;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
  if (!out) throw UsageError("failed writing '" + path + "'");
}

}  // namespace catrace
