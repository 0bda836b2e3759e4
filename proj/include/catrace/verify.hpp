#pragma once

// Harness comparing traces of automata and compiled artifacts against
// target subshifts, replaying witnesses and cross-checking the engines.

#include <charconv>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "catrace/compile.hpp"
#include "catrace/trace.hpp"

namespace catrace {

enum class Verdict { pass, fail, partial };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "PASS";
    case Verdict::fail:
      return "FAIL";
    case Verdict::partial:
      return "PARTIAL";
  }
  return "?";
}

/// Exit code convention of the command line: 0 pass, 1 fail, 2 partial.
inline int exit_code(Verdict v) { return v == Verdict::pass ? 0 : v == Verdict::fail ? 1 : 2; }

struct CheckMode {
  enum Kind { exact, ultimate, inclusion } kind = exact;
  std::size_t offset = 0;

  std::string name() const {
    if (kind == exact) return "exact";
    if (kind == inclusion) return "inclusion";
    return "ultimate:" + std::to_string(offset);
  }
};

/// Parses `exact`, `inclusion`, `ultimate:J` or `ultimate` (J = 0).
inline CheckMode parse_mode(std::string_view text) {
  if (text == "exact") return {CheckMode::exact, 0};
  if (text == "inclusion") return {CheckMode::inclusion, 0};
  if (text == "ultimate") return {CheckMode::ultimate, 0};
  if (text.starts_with("ultimate:")) {
    std::string_view num = text.substr(9);
    std::size_t j = 0;
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), j);
    if (ec == std::errc{} && p == num.data() + num.size() && !num.empty()) return {CheckMode::ultimate, j};
  }
  throw UsageError("unknown mode '" + std::string(text) + "'; expected exact, inclusion or ultimate:J");
}

struct TraceReport {
  Verdict verdict = Verdict::pass;
  CheckMode mode;
  std::size_t requested_depth = 0;
  std::size_t achieved_depth = 0;
  bool polytrace = false;
  /// Shortest, then least, word of the symmetric difference.
  std::optional<Word> certificate;
  /// True when the certificate is a column absent from the target.
  bool certificate_in_trace = false;
  Alphabet alphabet;

  std::string describe() const {
    std::string s = std::string(verdict_name(verdict)) + " mode=" + mode.name() +
                    " depth=" + std::to_string(achieved_depth) + "/" + std::to_string(requested_depth);
    if (certificate)
      s += " certificate=" + format_word(alphabet, *certificate) +
           (certificate_in_trace ? " (in trace, not in target)" : " (in target, not in trace)");
    return s;
  }
};

namespace detail {

/// Deepest language at most `depth` the engine reaches, or nullopt.
inline std::optional<ColumnLanguage> deepest_trace(const PartialCA& f, bool poly, std::size_t depth, Engine engine) {
  auto at = [&](std::size_t k) { return poly ? polytrace(f, k, 1, engine) : trace(f, k, 1, engine); };
  try {
    return at(depth);
  } catch (const CapExceeded&) {
  }
  // Costs grow geometrically with depth, so climbing wastes little.
  std::optional<ColumnLanguage> best;
  for (std::size_t k = 1; k < depth; ++k) {
    try {
      best = at(k);
    } catch (const CapExceeded&) {
      break;
    }
  }
  return best;
}

inline WordSet prefixes(const WordSet& s, std::size_t n) {
  WordSet out;
  for (const Word& w : s) out.emplace_back(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n));
  normalize(out);
  return out;
}

}  // namespace detail

/// Compares the trace (polytrace when the automaton stacks copies of the
/// target alphabet) with the language of `target` for every length up to
/// `depth`. Ultimate mode compares σ^J of both sides, J = `mode.offset`.
inline TraceReport check_trace(const PartialCA& f, const Subshift& target, std::size_t depth, CheckMode mode,
                               Engine engine = Engine::automatic) {
  if (depth < 1) throw UsageError("depth must be at least 1");
  const Alphabet& a = f.ca.alphabet();
  const bool poly = !same_letters(a, target.alphabet()) && a.is_product() && same_letters(a.base(), target.alphabet());
  if (!poly && !same_letters(a, target.alphabet())) throw UsageError("target alphabet differs from the automaton's");
  const std::size_t skip = mode.kind == CheckMode::ultimate ? mode.offset : 0;
  const Subshift goal = shift_image(target, skip);

  TraceReport r;
  r.mode = mode;
  r.requested_depth = depth;
  r.polytrace = poly;
  r.alphabet = target.alphabet();
  auto lang = detail::deepest_trace(f, poly, depth + skip, engine);
  if (!lang || lang->height <= skip) {
    r.verdict = Verdict::partial;
    return r;
  }
  const ColumnLanguage cols = skip ? suffix_rows(*lang, skip, lang->height - skip) : *lang;
  r.achieved_depth = cols.height;
  for (std::size_t n = 1; n <= cols.height; ++n) {
    const WordSet got = detail::prefixes(cols.blocks, n);
    const WordSet want = language(goal, n);
    std::optional<Word> extra, missing;
    for (const Word& w : got)
      if (!std::binary_search(want.begin(), want.end(), w)) {
        extra = w;
        break;
      }
    if (mode.kind != CheckMode::inclusion)
      for (const Word& w : want)
        if (!std::binary_search(got.begin(), got.end(), w)) {
          missing = w;
          break;
        }
    if (extra || missing) {
      r.verdict = Verdict::fail;
      r.certificate_in_trace = extra && (!missing || *extra < *missing);
      r.certificate = r.certificate_in_trace ? extra : missing;
      return r;
    }
  }
  r.verdict = cols.height < depth ? Verdict::partial : Verdict::pass;
  return r;
}

inline TraceReport check_trace(const CellularAutomaton& f, const Subshift& target, std::size_t depth, CheckMode mode,
                               Engine engine = Engine::automatic) {
  return check_trace(PartialCA{f, detail::full_shift(f.alphabet())}, target, depth, mode, engine);
}

inline TraceReport check_trace(const CompiledArtifact& art, const Subshift& target, std::size_t depth, CheckMode mode,
                               Engine engine = Engine::automatic) {
  return check_trace(art.partial(), target, depth, mode, engine);
}

struct WitnessReport {
  Verdict verdict = Verdict::pass;
  std::size_t checked = 0;
  std::size_t failures = 0;
  /// First word whose witness is missing, leaves the domain or reads back
  /// wrong, with what was read.
  std::optional<Word> failed_word;
  std::optional<Word> observed;
  Alphabet alphabet;

  std::string describe() const {
    std::string s = std::string(verdict_name(verdict)) + " witnesses=" + std::to_string(checked - failures) + "/" +
                    std::to_string(checked);
    if (failed_word) {
      s += " word=" + format_word(alphabet, *failed_word);
      s += observed ? " observed=" + format_word(alphabet, *observed) : std::string(" (no witness)");
    }
    return s;
  }
};

/// Runs each word's witness and reads the column back. `margin` cells on
/// each side of the observed cell are checked against the domain.
inline WitnessReport run_witnesses(const CompiledArtifact& art, const std::vector<Word>& words,
                                   std::size_t margin = 64) {
  if (!art.witness) throw UsageError("artifact carries no witness recipe");
  WitnessReport r;
  r.alphabet = art.ca.alphabet().base();
  for (const Word& z : words) {
    ++r.checked;
    auto wit = art.witness(z);
    std::optional<Word> seen;
    bool ok = false;
    if (wit) {
      seen = witness_column(art.ca, *wit, z.size());
      ok = *seen == z;
      if (ok && art.domain) {
        const auto m = static_cast<std::int64_t>(margin);
        ok = contains_word(*art.domain, wit->config.segment(wit->cell - m, 2 * margin + 1));
      }
    }
    if (!ok) {
      ++r.failures;
      if (!r.failed_word) {
        r.failed_word = z;
        r.observed = seen;
      }
    }
  }
  r.verdict = r.failures ? Verdict::fail : Verdict::pass;
  return r;
}

struct CrossCheckReport {
  Verdict verdict = Verdict::pass;
  std::size_t naive_size = 0;
  std::size_t transducer_size = 0;
  /// Least word on which the engines disagree, and which engine has it.
  std::optional<Word> certificate;
  bool certificate_in_naive = false;
  Alphabet alphabet;

  std::string describe() const {
    std::string s = std::string(verdict_name(verdict)) + " " + std::to_string(naive_size) + "=" +
                    std::to_string(transducer_size);
    if (verdict == Verdict::fail) s[s.find('=')] = '!';
    if (certificate)
      s += " certificate=" + format_word(alphabet, *certificate) +
           (certificate_in_naive ? " (naive only)" : " (transducer only)");
    return s;
  }
};

inline CrossCheckReport cross_check(const PartialCA& f, std::size_t k, std::size_t w = 1) {
  CrossCheckReport r;
  r.alphabet = f.ca.alphabet();
  ColumnLanguage a, b;
  try {
    a = trace_naive(f, k, w);
    b = trace_transducer(f, k, w);
  } catch (const CapExceeded&) {
    r.verdict = Verdict::partial;
    return r;
  }
  r.naive_size = a.size();
  r.transducer_size = b.size();
  WordSet only_a, only_b;
  std::set_difference(a.blocks.begin(), a.blocks.end(), b.blocks.begin(), b.blocks.end(), std::back_inserter(only_a));
  std::set_difference(b.blocks.begin(), b.blocks.end(), a.blocks.begin(), a.blocks.end(), std::back_inserter(only_b));
  if (only_a.empty() && only_b.empty()) return r;
  r.verdict = Verdict::fail;
  r.certificate_in_naive = !only_a.empty() && (only_b.empty() || only_a.front() < only_b.front());
  r.certificate = r.certificate_in_naive ? only_a.front() : only_b.front();
  return r;
}

inline CrossCheckReport cross_check(const CellularAutomaton& f, std::size_t k, std::size_t w = 1) {
  return cross_check(PartialCA{f, detail::full_shift(f.alphabet())}, k, w);
}

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct SampleReport {
  Verdict verdict = Verdict::pass;
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// Violation of least period (then least period word) and its column.
  std::optional<PeriodicConfiguration> certificate;
  std::optional<Word> column;
  Alphabet alphabet;

  std::string describe() const {
    std::string s = std::string(verdict_name(verdict)) + " samples=" + std::to_string(samples) +
                    " violations=" + std::to_string(violations) + " seed=" + std::to_string(seed);
    if (certificate)
      s += " certificate=(" + format_word(alphabet, certificate->period()) + ")^inf column=" +
           format_word(alphabet, *column);
    return s;
  }
};

/// Soundness by sampling: random periodic configurations of period at most
/// `max_period` (rejected unless they lie in the domain); the column of cell
/// 0, rows [offset, offset + depth), must be a word of σ^offset(target) on
/// every track. Reports PARTIAL when too few domain configurations were found.
inline SampleReport sample_columns(const PartialCA& f, const Subshift& target, std::size_t depth, std::size_t offset,
                                   std::size_t samples, std::size_t max_period, std::uint64_t seed = kDefaultSeed) {
  if (max_period < 1 || depth < 1) throw UsageError("period and depth must be at least 1");
  const Alphabet& a = f.ca.alphabet();
  const bool poly = !same_letters(a, target.alphabet()) && a.is_product() && same_letters(a.base(), target.alphabet());
  if (!poly && !same_letters(a, target.alphabet())) throw UsageError("target alphabet differs from the automaton's");
  const Subshift goal = shift_image(target, offset);
  SampleReport r;
  r.seed = seed;
  r.alphabet = a;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(1, max_period);
  std::uniform_int_distribution<std::size_t> letter(0, a.size() - 1);
  const std::size_t attempts = samples * 64;
  for (std::size_t t = 0; t < attempts && r.samples < samples; ++t) {
    Word period(len(rng));
    for (Letter& x : period) x = static_cast<Letter>(letter(rng));
    if (!contains_periodic(f.domain, period)) continue;
    ++r.samples;
    const Word col = f.ca.column(PeriodicConfiguration(period), 0, offset + depth);
    bool ok = true;
    for (std::size_t tr = 0; tr < (poly ? a.height() : 1) && ok; ++tr) {
      Word z(depth);
      for (std::size_t i = 0; i < depth; ++i) z[i] = poly ? a.tracks(col[offset + i])[tr] : col[offset + i];
      ok = contains_word(goal, z);
    }
    if (ok) continue;
    ++r.violations;
    const bool better = !r.certificate || period.size() < r.certificate->period().size() ||
                        (period.size() == r.certificate->period().size() && period < r.certificate->period());
    if (better) {
      r.certificate = PeriodicConfiguration(period);
      r.column = col;
    }
  }
  r.verdict = r.violations ? Verdict::fail : r.samples < samples ? Verdict::partial : Verdict::pass;
  return r;
}

inline SampleReport sample_columns(const CompiledArtifact& art, const Subshift& target, std::size_t depth,
                                   std::size_t samples, std::size_t max_period, std::uint64_t seed = kDefaultSeed) {
  return sample_columns(art.partial(), target, depth, art.offset, samples, max_period, seed);
}

}  // namespace catrace
