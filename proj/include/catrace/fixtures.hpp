#pragma once

// Named example subshifts with their documented facts.

#include "catrace/subshift.hpp"

namespace catrace {

struct Fixture {
  std::string name;
  std::string description;
  Subshift subshift;
  /// Documented facts, used as regression expectations.
  bool has_deterministic = false;
  std::optional<std::size_t> nilpotency = std::nullopt;
  bool traceable_documented = false;
};

namespace detail {

inline Subshift nilp_subshift() {
  // O_σ((λ+1+01+001+21)0^∞) over {0,1,2}: chain 0 → 0 → 1 into the zero
  // loop, plus 2 → 1.
  LabeledGraph g(5);
  const std::uint32_t p0 = 0, p1 = 1, p2 = 2, q = 3, z = 4;
  g.add_edge(p0, 0, p1);
  g.add_edge(p1, 0, p2);
  g.add_edge(p2, 1, z);
  g.add_edge(q, 2, p2);
  g.add_edge(z, 0, z);
  return Subshift::sofic(Alphabet::digits(3), g, true, {p0, p1, p2, q, z});
}

inline Subshift factptr_subshift() {
  // (0*1 + 1*)0^∞: v reads 0* then 1; c reads 1* then 0; z is the 0-tail.
  LabeledGraph g(3);
  const std::uint32_t v = 0, c = 1, z = 2;
  g.add_edge(v, 0, v);
  g.add_edge(v, 1, z);
  g.add_edge(c, 1, c);
  g.add_edge(c, 0, z);
  g.add_edge(z, 0, z);
  return Subshift::sofic(Alphabet::digits(2), g, true, {v, c, z});
}

}  // namespace detail

inline std::vector<Fixture> fixtures() {
  const Alphabet bin = Alphabet::digits(2);
  std::vector<Fixture> out;
  out.push_back({"golden", "golden mean shift, forbidding 11", Subshift::sft_forbidden(bin, {{1, 1}}), true,
                 std::nullopt, true});
  out.push_back({"full", "full shift on {0,1}", Subshift::sft_forbidden(bin, {}), true, std::nullopt, true});
  out.push_back({"x110", "orbit closure of (001)^inf; no deterministic subshift",
                 Subshift::sft(bin, 3, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}}), false, std::nullopt, false});
  out.push_back({"nilp", "orbit closure of (λ+1+01+001+21)0^inf; nilpotent, not traceable", detail::nilp_subshift(),
                 true, 3, false});
  out.push_back({"ctrex", "{0^inf, (01)^inf, (10)^inf}; not traceable, ultimately traceable",
                 Subshift::sft_forbidden(bin, {{1, 1}, {0, 0, 1}, {1, 0, 0}}), true, std::nullopt, false});
  out.push_back({"factptr", "(0*1+1*)0^inf; sofic of infinite type, traceable", detail::factptr_subshift(), true,
                 std::nullopt, true});
  return out;
}

inline Fixture fixture(std::string_view name) {
  for (auto& f : fixtures())
    if (f.name == name) return f;
  throw UsageError("unknown fixture '" + std::string(name) + "'");
}

}  // namespace catrace
