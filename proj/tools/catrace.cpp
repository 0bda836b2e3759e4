// Command-line front end. Exit codes: 0 success/PASS, 1 FAIL, 2 PARTIAL or
// cap exceeded, 3 usage, parse or precondition error.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "catrace/catrace.hpp"

using namespace catrace;
using nlohmann::json;

namespace {

struct Globals {
  bool json = false;
};

Globals g_opts;

void emit(const json& j, const std::string& text) {
  if (g_opts.json)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << text;
}

CellularAutomaton load_ca(const std::string& path) {
  try {
    return parse_ca(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

Subshift load_subshift(const std::string& path) {
  try {
    return parse_subshift(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

Engine parse_engine(const std::string& s) {
  if (s == "naive") return Engine::naive;
  if (s == "transducer") return Engine::transducer;
  if (s == "auto") return Engine::automatic;
  throw UsageError("engine is naive, transducer or auto");
}

std::string block_text(const Alphabet& a, const Word& b, std::size_t width) {
  if (width == 1) return format_word(a, b);
  std::string out;
  for (std::size_t r = 0; r * width < b.size(); ++r) {
    if (r) out += '/';
    out += format_word(a, std::span<const Letter>(b).subspan(r * width, width));
  }
  return out;
}

json words_json(const Alphabet& a, const std::vector<Word>& ws, std::size_t width = 1) {
  json arr = json::array();
  for (const Word& w : ws) arr.push_back(block_text(a, w, width));
  return arr;
}

std::pair<std::int64_t, std::int64_t> parse_viewport(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw UsageError("viewport looks like a..b");
  try {
    return {std::stoll(s.substr(0, dots)), std::stoll(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError("viewport looks like a..b");
  }
}

/// SFT polytracer by default; a polytracer file carries no witness.
std::pair<CellularAutomaton, WitnessFn> polytracer_for(const Subshift& s, const std::string& path) {
  if (!path.empty()) return {load_ca(path), {}};
  if (s.kind() != Subshift::Kind::sft) throw UsageError("subshift is not an SFT; pass --polytracer");
  auto art = sft_polytracer(s);
  return {art.ca, art.witness};
}

// ---------------------------------------------------------------------------

struct TraceArgs {
  std::string ca, domain, engine = "auto";
  std::size_t depth = 0, width = 1, skip = 0;
  bool poly = false;
};

int run_trace(const TraceArgs& a) {
  const CellularAutomaton f = load_ca(a.ca);
  const PartialCA p{f, a.domain.empty() ? detail::full_shift(f.alphabet()) : load_subshift(a.domain)};
  const std::size_t k = a.depth + a.skip;
  auto run = [&](Engine e) {
    ColumnLanguage l = a.poly ? polytrace(p, k, a.width, e) : trace(p, k, a.width, e);
    return a.skip ? suffix_rows(l, a.skip, a.depth) : l;
  };
  ColumnLanguage lang;
  if (a.engine == "both") {
    lang = run(Engine::naive);
    const ColumnLanguage other = run(Engine::transducer);
    if (!(lang == other)) {
      std::cerr << "engines disagree: naive " << lang.size() << " words, transducer " << other.size() << '\n';
      return 1;
    }
  } else {
    lang = run(parse_engine(a.engine));
  }
  std::string text;
  for (const Word& b : lang.blocks) text += block_text(lang.alphabet, b, lang.width) + '\n';
  emit({{"command", "trace"},
        {"depth", a.depth},
        {"width", a.width},
        {"skip", a.skip},
        {"polytrace", a.poly},
        {"engine", a.engine},
        {"count", lang.size()},
        {"words", words_json(lang.alphabet, lang.blocks, lang.width)}},
       text);
  return 0;
}

struct DiagramArgs {
  std::string ca, config, viewport = "0..31", format = "txt", out;
  std::int64_t phase = 0;
  std::size_t steps = 16;
};

int run_diagram(const DiagramArgs& a) {
  const CellularAutomaton f = load_ca(a.ca);
  const Word period = parse_word(f.alphabet(), a.config);
  if (period.empty()) throw UsageError("configuration period is empty");
  auto [lo, hi] = parse_viewport(a.viewport);
  const auto d = diagram(f, PeriodicConfiguration(period, a.phase), a.steps, lo, hi);
  std::string body;
  if (a.format == "txt")
    body = diagram_text(d);
  else if (a.format == "pgm")
    body = diagram_pgm(d);
  else
    throw UsageError("format is txt or pgm");
  if (!a.out.empty()) {
    write_file(a.out, body);
    body.clear();
  }
  json rows = json::array();
  for (const Word& r : d.rows) rows.push_back(format_word(f.alphabet(), r));
  emit({{"command", "diagram"}, {"left", lo}, {"right", hi}, {"steps", a.steps}, {"rows", rows}}, body);
  return 0;
}

// ---------------------------------------------------------------------------

struct CompileArgs {
  std::string kind, in, out, xi, polytracer, border, provenance, make_static, make_dynamic;
  std::size_t k = 0, check = 4;
};

json details_json(const CompiledArtifact& art) {
  json d = json::object();
  for (const auto& [key, v] : art.details) d[key] = v;
  return d;
}

int write_artifact(const CompileArgs& a, const CompiledArtifact& art, const Subshift& s, json extra,
                   const std::string& extra_text) {
  if (a.out.empty()) throw UsageError("--out is required");
  write_file(a.out, emit_ca(art.ca));
  std::string prov = emit_provenance(art);
  json j = {{"command", "compile"},
            {"kind", a.kind},
            {"out", a.out},
            {"provenance", art.provenance},
            {"offset", art.offset},
            {"details", details_json(art)},
            {"alphabet-size", art.ca.alphabet().size()},
            {"anchor", art.ca.anchor()},
            {"diameter", art.ca.diameter()},
            {"dense", art.ca.rule().is_dense()}};
  if (art.domain) {
    const std::string dom = a.out + ".domain";
    write_file(dom, emit_subshift(*art.domain));
    prov += "domain-file: " + dom + "\n";
    j["domain-file"] = dom;
  }
  std::string text = "wrote " + a.out + " (" + art.provenance + ")\n";
  if (art.witness && a.check > 0) {
    const auto r = run_witnesses(art, language(shift_image(s, art.offset), a.check));
    prov += "witness-check: " + r.describe() + "\n";
    text += "witness check L_" + std::to_string(a.check) + ": " + r.describe() + '\n';
    j["witness-check"] = {{"verdict", verdict_name(r.verdict)}, {"checked", r.checked}, {"failures", r.failures}};
    if (r.verdict != Verdict::pass) {
      write_file(a.provenance.empty() ? a.out + ".prov" : a.provenance, prov);
      emit(j, text);
      return 1;
    }
  }
  const std::string prov_path = a.provenance.empty() ? a.out + ".prov" : a.provenance;
  write_file(prov_path, prov);
  j["provenance-file"] = prov_path;
  for (auto& [key, v] : extra.items()) j[key] = v;
  emit(j, text + extra_text);
  return 0;
}

int run_compile(const CompileArgs& a) {
  const Subshift s = load_subshift(a.in);
  const Alphabet& alph = s.alphabet();
  std::optional<LetterMap> xi;
  if (!a.xi.empty()) xi = parse_letter_map(alph, a.xi);

  if (a.kind == "sft-polytrace") return write_artifact(a, sft_polytracer(s), s, json::object(), "");
  if (a.kind == "nilpotent") return write_artifact(a, nilpotent_partial_ca(s), s, json::object(), "");
  // Nilpotent inputs never consult the polytracer, so sofic ones need none.
  const bool nilpotent_input = a.polytracer.empty() && s.kind() != Subshift::Kind::sft && is_weakly_nilpotent(s);
  if (a.kind == "partial") {
    if (nilpotent_input) {
      if (!nilpotency_index(s)) throw PreconditionError("subshift is weakly nilpotent but not nilpotent");
      auto art = nilpotent_partial_ca(s);
      art.provenance = "partial:nilpotent";
      return write_artifact(a, art, s, json::object(), "");
    }
    auto [g, w] = polytracer_for(s, a.polytracer);
    return write_artifact(a, partial_trace_compile(s, g, w), s, json::object(), "");
  }
  if (a.kind == "full") {
    if (!xi) xi = contains_deterministic(s, true);
    if (!xi) throw PreconditionError("subshift contains no deterministic subshift");
    auto [g, w] = polytracer_for(s, a.polytracer);
    detail::check_polytrace(g, s, kValidationDepth);
    const CellularAutomaton t = totalize(g);
    auto art = polytrace_to_trace(t, *xi, reencode_witness(g.alphabet(), t.alphabet(), w));
    return write_artifact(a, art, s, {{"xi", format_letter_map(alph, *xi)}}, "xi: " + format_letter_map(alph, *xi) + "\n");
  }
  if (a.kind == "ultimate") {
    auto [g, w] = nilpotent_input ? std::pair{identity_ca(alph), WitnessFn{}} : polytracer_for(s, a.polytracer);
    auto res = ultimate_trace_compile(s, g, w, xi);
    const std::string branch = branch_name(res.branch);
    std::string text = "branch: " + branch + "\n";
    json extra = {{"branch", branch}};
    if (res.xi) {
      extra["xi"] = format_letter_map(alph, *res.xi);
      text += "xi: " + format_letter_map(alph, *res.xi) + "\n";
    }
    if (!res.artifact) {
      extra["command"] = "compile";
      extra["kind"] = a.kind;
      extra["dependency"] = res.dependency;
      emit(extra, text + "dependency: " + res.dependency + "\n");
      return 2;
    }
    return write_artifact(a, *res.artifact, s, extra, text);
  }
  if (a.kind == "border") {
    if (!a.border.empty()) {
      const Border b = parse_border(read_file(a.border));
      auto [g, w] = polytracer_for(s, a.polytracer);
      return write_artifact(a, border_compose(g, b, w), s, json::object(), "");
    }
    if (a.out.empty()) throw UsageError("--out is required");
    Border b;
    if (!a.make_static.empty()) {
      auto parts = detail::split(a.make_static, ',');
      if (parts.size() != 2) throw UsageError("--static takes two letters 'a,b' (zero, one)");
      b = static_border(alph, alph.letter(parts[0]), alph.letter(parts[1]), a.k);
    } else if (!a.make_dynamic.empty()) {
      b = dynamic_border(alph, parse_word(alph, a.make_dynamic), a.k);
    } else if (xi) {
      b = xi_border(alph, *xi, a.k);
    } else {
      throw UsageError("border needs --border to compose, or one of --static, --dynamic, --xi to build");
    }
    write_file(a.out, emit_border(b));
    emit({{"command", "compile"},
          {"kind", "border"},
          {"out", a.out},
          {"words", b.words.size()},
          {"length", b.length()},
          {"block-length", b.block_length}},
         "wrote " + a.out + " (" + std::to_string(b.words.size()) + " words of length " +
             std::to_string(b.length()) + ")\n");
    return 0;
  }
  throw UsageError("unknown compile kind '" + a.kind + "'");
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string ca, domain, target, mode = "exact", engine = "auto";
  std::size_t depth = 0, samples = 0, max_period = 40;
  std::uint64_t seed = kDefaultSeed;
  bool cross = false;
};

int run_verify(const VerifyArgs& a) {
  const CellularAutomaton f = load_ca(a.ca);
  const PartialCA p{f, a.domain.empty() ? detail::full_shift(f.alphabet()) : load_subshift(a.domain)};
  if (a.cross) {
    const auto r = cross_check(p, a.depth);
    json j = {{"command", "verify"},
              {"check", "cross"},
              {"verdict", verdict_name(r.verdict)},
              {"naive", r.naive_size},
              {"transducer", r.transducer_size}};
    if (r.certificate) j["certificate"] = format_word(r.alphabet, *r.certificate);
    emit(j, r.describe() + '\n');
    return exit_code(r.verdict);
  }
  if (a.target.empty()) throw UsageError("--target is required unless --cross-check is given");
  const Subshift target = load_subshift(a.target);
  const CheckMode mode = parse_mode(a.mode);
  if (a.samples > 0) {
    const std::size_t offset = mode.kind == CheckMode::ultimate ? mode.offset : 0;
    const auto r = sample_columns(p, target, a.depth, offset, a.samples, a.max_period, a.seed);
    json j = {{"command", "verify"},
              {"check", "sample"},
              {"mode", mode.name()},
              {"verdict", verdict_name(r.verdict)},
              {"samples", r.samples},
              {"violations", r.violations},
              {"seed", r.seed}};
    if (r.certificate) {
      j["certificate"] = format_word(r.alphabet, r.certificate->period());
      j["column"] = format_word(r.alphabet, *r.column);
    }
    emit(j, r.describe() + '\n');
    return exit_code(r.verdict);
  }
  const auto r = check_trace(p, target, a.depth, mode, parse_engine(a.engine));
  json j = {{"command", "verify"},
            {"check", "trace"},
            {"mode", mode.name()},
            {"verdict", verdict_name(r.verdict)},
            {"depth", r.requested_depth},
            {"achieved-depth", r.achieved_depth},
            {"polytrace", r.polytrace}};
  if (r.certificate) {
    j["certificate"] = format_word(r.alphabet, *r.certificate);
    j["certificate-side"] = r.certificate_in_trace ? "trace" : "target";
  }
  emit(j, r.describe() + '\n');
  return exit_code(r.verdict);
}

int run_freeze_check(const std::string& path, std::size_t p) {
  const WordList l = parse_word_list(read_file(path));
  const auto r = check_freezing(l.words, p);
  json j = {{"command", "freeze-check"}, {"p", p}, {"verdict", r.freezing ? "PASS" : "FAIL"}};
  std::string text = r.freezing ? "PASS\n" : "FAIL";
  if (r.counterexample) {
    j["counterexample"] = format_word(l.alphabet, *r.counterexample);
    j["offset"] = r.offset;
    text += " counterexample=" + format_word(l.alphabet, *r.counterexample) + " offset=" + std::to_string(r.offset) + "\n";
  }
  emit(j, text);
  return r.freezing ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct GadgetArgs {
  std::string f1, f2, n, n2, zero = "0", g, xi, out, ca, target;
  std::size_t j = 4, p = 6;
};

int write_ca(const std::string& out, const CellularAutomaton& h, const std::string& what) {
  if (out.empty()) throw UsageError("--out is required");
  write_file(out, emit_ca(h));
  emit({{"command", "gadget"},
        {"kind", what},
        {"out", out},
        {"alphabet-size", h.alphabet().size()},
        {"anchor", h.anchor()},
        {"diameter", h.diameter()}},
       "wrote " + out + " (" + std::to_string(h.alphabet().size()) + " letters)\n");
  return 0;
}

int run_gadget_product(const GadgetArgs& a) {
  ControlledProductSpec spec{load_ca(a.f1), load_ca(a.f2), load_ca(a.n), load_ca(a.n2), a.zero};
  return write_ca(a.out, controlled_product(spec), "product");
}

int run_gadget_four_layer(const GadgetArgs& a) {
  const CellularAutomaton g = load_ca(a.g);
  const LetterMap xi = parse_letter_map(g.alphabet(), a.xi);
  return write_ca(a.out, four_layer_gadget(g, xi, load_ca(a.n2)), "four-layer");
}

int run_gadget_nilpotency(const GadgetArgs& a) {
  const CellularAutomaton f = load_ca(a.ca);
  const auto r = nilpotency_bounded(f, a.j, a.p);
  json j = {{"command", "gadget"}, {"kind", "nilpotency"}, {"j", a.j}, {"verdict", verdict_name(r.verdict)}};
  std::string text = verdict_name(r.verdict);
  if (r.zero) {
    j["zero"] = f.alphabet().name(*r.zero);
    text += " zero=" + f.alphabet().name(*r.zero);
  }
  if (r.column) {
    j["column"] = format_word(f.alphabet(), *r.column);
    text += " column=" + format_word(f.alphabet(), *r.column);
  }
  if (r.orbit) {
    j["orbit"] = format_word(f.alphabet(), r.orbit->period());
    text += " orbit=(" + format_word(f.alphabet(), r.orbit->period()) + ")^inf";
  }
  emit(j, text + '\n');
  return r.verdict == NilpotencyVerdict::yes ? 0 : r.verdict == NilpotencyVerdict::not_nilpotent ? 1 : 2;
}

int run_gadget_mortality(const GadgetArgs& a) {
  const CellularAutomaton f = load_ca(a.ca);
  const Word target = parse_word(f.alphabet(), a.target);
  const auto r = mortality_bounded(f, target, a.j, a.p);
  json j = {{"command", "gadget"},
            {"kind", "mortality"},
            {"verdict", verdict_name(r.verdict)},
            {"tested", r.tested},
            {"latest-hit", r.latest_hit}};
  std::string text = verdict_name(r.verdict) + " tested=" + std::to_string(r.tested) +
                     " latest-hit=" + std::to_string(r.latest_hit);
  if (r.certificate) {
    j["certificate"] = format_word(f.alphabet(), r.certificate->period());
    text += " certificate=(" + format_word(f.alphabet(), r.certificate->period()) + ")^inf";
  }
  emit(j, text + '\n');
  return r.verdict == MortalityVerdict::mortal_on_tested ? 0 : r.verdict == MortalityVerdict::not_mortal ? 1 : 2;
}

int run_fixture(const std::string& name, const std::string& out) {
  if (name.empty()) {
    json arr = json::array();
    std::string text;
    for (const auto& fx : fixtures()) {
      arr.push_back({{"name", fx.name}, {"description", fx.description}});
      text += fx.name + "\t" + fx.description + "\n";
    }
    emit({{"command", "fixture"}, {"fixtures", arr}}, text);
    return 0;
  }
  const Fixture fx = fixture(name);
  const std::string body = emit_subshift(fx.subshift);
  json j = {{"command", "fixture"},
            {"name", fx.name},
            {"description", fx.description},
            {"has-deterministic", fx.has_deterministic},
            {"traceable", fx.traceable_documented}};
  if (fx.nilpotency) j["nilpotency-index"] = *fx.nilpotency;
  if (!out.empty()) {
    write_file(out, body);
    emit(j, "wrote " + out + "\n");
  } else {
    j["subshift"] = body;
    emit(j, body);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traces of cellular automata: simulate, compile and verify"};
  app.require_subcommand(1);
  app.add_flag("--json", g_opts.json, "Print reports as JSON");
  int rc = 0;

  TraceArgs ta;
  auto* tr = app.add_subcommand("trace", "Print the column language of a CA");
  tr->add_option("--ca", ta.ca, "CA file")->required();
  tr->add_option("--domain", ta.domain, "Subshift file restricting initial configurations");
  tr->add_option("--depth", ta.depth, "Rows")->required()->check(CLI::PositiveNumber);
  tr->add_option("--width", ta.width, "Columns")->check(CLI::PositiveNumber);
  tr->add_option("--skip", ta.skip, "Drop this many leading rows");
  tr->add_option("--engine", ta.engine, "naive, transducer, both or auto")
      ->check(CLI::IsMember({"naive", "transducer", "both", "auto"}));
  tr->add_flag("--poly", ta.poly, "Project product letters onto their tracks");
  tr->callback([&] { rc = run_trace(ta); });

  DiagramArgs da;
  auto* di = app.add_subcommand("diagram", "Render a space-time diagram of a periodic configuration");
  di->add_option("--ca", da.ca, "CA file")->required();
  di->add_option("--config", da.config, "Period word of the initial configuration")->required();
  di->add_option("--phase", da.phase, "Cell 0 reads period[phase]");
  di->add_option("--steps", da.steps, "Number of steps");
  di->add_option("--viewport", da.viewport, "Cells a..b");
  di->add_option("--format", da.format, "txt or pgm")->check(CLI::IsMember({"txt", "pgm"}));
  di->add_option("--out", da.out, "Output file (default stdout)");
  di->callback([&] { rc = run_diagram(da); });

  CompileArgs ca;
  auto* co = app.add_subcommand("compile", "Compile a subshift into a CA");
  co->add_option("kind", ca.kind, "sft-polytrace, partial, full, ultimate, border or nilpotent")
      ->required()
      ->check(CLI::IsMember({"sft-polytrace", "partial", "full", "ultimate", "border", "nilpotent"}));
  co->add_option("--in", ca.in, "Subshift file")->required();
  co->add_option("--out", ca.out, "Output CA (or border) file");
  co->add_option("--xi", ca.xi, "Letter map 'a->b, ...'");
  co->add_option("--polytracer", ca.polytracer, "CA file polytracing the subshift (default: SFT polytracer)");
  co->add_option("--border", ca.border, "Border file to compose with the polytracer");
  co->add_option("--static", ca.make_static, "Build a static border on letters 'zero,one'");
  co->add_option("--dynamic", ca.make_dynamic, "Build a dynamic border on this word");
  co->add_option("--k", ca.k, "Block length for border builders");
  co->add_option("--provenance", ca.provenance, "Sidecar path (default <out>.prov)");
  co->add_option("--check", ca.check, "Replay witnesses for all words up to this length (0 skips)");
  co->callback([&] { rc = run_compile(ca); });

  VerifyArgs va;
  auto* ve = app.add_subcommand("verify", "Compare a CA trace with a target subshift");
  ve->add_option("--ca", va.ca, "CA file")->required();
  ve->add_option("--domain", va.domain, "Domain subshift file of a partial CA");
  ve->add_option("--target", va.target, "Target subshift file");
  ve->add_option("--depth", va.depth, "Depth")->required()->check(CLI::PositiveNumber);
  ve->add_option("--mode", va.mode, "exact, inclusion or ultimate:J");
  ve->add_option("--engine", va.engine, "naive, transducer or auto")
      ->check(CLI::IsMember({"naive", "transducer", "auto"}));
  ve->add_flag("--cross-check", va.cross, "Compare the two engines instead");
  ve->add_option("--samples", va.samples, "Check sampled periodic configurations instead of the exact language");
  ve->add_option("--max-period", va.max_period, "Largest sampled period")->check(CLI::PositiveNumber);
  ve->add_option("--seed", va.seed, "Sampling seed");
  ve->callback([&] { rc = run_verify(va); });

  std::string words_path;
  std::size_t p = 0;
  auto* fc = app.add_subcommand("freeze-check", "Check that a word set is p-freezing");
  fc->add_option("--words", words_path, "Word list file")->required();
  fc->add_option("--p", p, "Freezing parameter")->required();
  fc->callback([&] { rc = run_freeze_check(words_path, p); });

  GadgetArgs ga;
  auto* gd = app.add_subcommand("gadget", "Controlled products and bounded nilpotency/mortality checks");
  gd->require_subcommand(1);
  auto* gp = gd->add_subcommand("product", "Controlled product of F1, F2 driven by N, N2");
  gp->add_option("--f1", ga.f1, "CA on the first layer alphabet")->required();
  gp->add_option("--f2", ga.f2, "CA on the second layer alphabet")->required();
  gp->add_option("--n", ga.n, "Binary control CA used outside controlled windows")->required();
  gp->add_option("--n2", ga.n2, "Binary control CA with a spreading state")->required();
  gp->add_option("--zero", ga.zero, "Spreading state of N2");
  gp->add_option("--out", ga.out, "Output CA file")->required();
  gp->callback([&] { rc = run_gadget_product(ga); });
  auto* g4 = gd->add_subcommand("four-layer", "Four-layer gadget over {0,1}");
  g4->add_option("--g", ga.g, "Base CA")->required();
  g4->add_option("--xi", ga.xi, "Letter map 'a->b, ...'")->required();
  g4->add_option("--n2", ga.n2, "Binary control CA with a spreading state")->required();
  g4->add_option("--out", ga.out, "Output CA file")->required();
  g4->callback([&] { rc = run_gadget_four_layer(ga); });
  auto* gn = gd->add_subcommand("nilpotency", "Is F^J constant? (bounded check)");
  gn->add_option("--ca", ga.ca, "CA file")->required();
  gn->add_option("--j", ga.j, "Step bound")->check(CLI::PositiveNumber);
  gn->add_option("--p", ga.p, "Largest period searched for a certificate");
  gn->callback([&] { rc = run_gadget_nilpotency(ga); });
  auto* gm = gd->add_subcommand("mortality", "Do periodic configurations reach target letters within J steps?");
  gm->add_option("--ca", ga.ca, "CA file")->required();
  gm->add_option("--target", ga.target, "Target letters as a word")->required();
  gm->add_option("--j", ga.j, "Step bound");
  gm->add_option("--p", ga.p, "Largest tested period");
  gm->callback([&] { rc = run_gadget_mortality(ga); });

  std::string fx_name, fx_out;
  auto* fx = app.add_subcommand("fixture", "List named example subshifts or print one as a subshift file");
  fx->add_option("name", fx_name, "Fixture name (omit to list)");
  fx->add_option("--out", fx_out, "Output subshift file (default stdout)");
  fx->callback([&] { rc = run_fixture(fx_name, fx_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return rc;
}
