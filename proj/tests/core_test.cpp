#include <gtest/gtest.h>

#include "catrace/core.hpp"
#include "helpers.hpp"

using namespace catrace;
using namespace testing_helpers;

namespace {

const Alphabet kBin = Alphabet::digits(2);

}  // namespace

TEST(LocalRule, ApplyLocalExamples) {
  EXPECT_EQ(shift_ca(kBin).apply_local(w("01")), 1);
  EXPECT_EQ(identity_ca(kBin).apply_local(w("1")), 1);
  EXPECT_EQ(min_ca(kBin).apply_local(w("10")), 0);
}

TEST(LocalRule, WrongWindowLengthIsUsageError) {
  EXPECT_THROW(shift_ca(kBin).apply_local(w("011")), UsageError);
  EXPECT_THROW(shift_ca(kBin).apply_local(w("0")), UsageError);
}

TEST(LocalRule, DenseTableMustBeComplete) {
  EXPECT_THROW(LocalRule::dense(kBin, 0, 2, {0, 1, 1}), UsageError);
  EXPECT_THROW(LocalRule::dense(kBin, 0, 1, {0, 2}), UsageError);
}

TEST(LocalRule, MixedRadixIndexRoundTrip) {
  auto r = min_ca(Alphabet::digits(3)).rule();
  for (std::uint64_t i = 0; i < 9; ++i) EXPECT_EQ(r.index(r.window_at(i)), i);
  EXPECT_EQ(r.window_at(5), w("12"));
}

TEST(Step, Examples) {
  PeriodicConfiguration x(w("01"));
  EXPECT_EQ(min_ca(kBin).step(x), PeriodicConfiguration(w("0")));
  auto y = shift_ca(kBin).step(x);
  EXPECT_EQ(y, PeriodicConfiguration(w("01"), 1));
  EXPECT_EQ(y.at(0), 1);
  EXPECT_EQ(identity_ca(kBin).step(x), x);
}

TEST(Step, AlphabetMismatch) {
  EXPECT_THROW(min_ca(kBin).step(PeriodicConfiguration(w("02"))), UsageError);
}

TEST(PeriodicConfiguration, Canonical) {
  auto c = PeriodicConfiguration(w("1010"), 0).canonical();
  EXPECT_EQ(c.period(), w("01"));
  EXPECT_EQ(c.phase(), 1);
  EXPECT_EQ(c.at(0), 1);
  EXPECT_EQ(PeriodicConfiguration(w("001"), 5).at(0), PeriodicConfiguration(w("001"), 2).at(0));
}

TEST(Step, CommutesWithShiftExhaustively) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_ca(rng, 2, trial % 3 - 1, 3);
    for (std::size_t n = 1; n <= 6; ++n)
      for (const Word& p : all_words(2, n)) {
        PeriodicConfiguration x(p);
        EXPECT_EQ(f.step(x.shifted(1)), f.step(x).shifted(1));
      }
  }
}

TEST(Power, Examples) {
  EXPECT_EQ(power(shift_ca(kBin), 2).apply_local(w("011")), 1);
  EXPECT_EQ(power(min_ca(kBin), 2).apply_local(w("110")), 0);
  auto id5 = power(identity_ca(kBin), 5);
  EXPECT_EQ(id5.diameter(), 1);
  EXPECT_EQ(id5.rule().table(), identity_ca(kBin).rule().table());
}

TEST(Power, MatchesIteratedSteps) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    auto f = random_ca(rng, 2, trial % 2, 2);
    auto f3 = power(f, 3);
    EXPECT_EQ(f3.diameter(), 4);
    EXPECT_EQ(f3.anchor(), 3 * f.anchor());
    for (std::size_t n = 1; n <= 4; ++n)
      for (const Word& p : all_words(2, n)) {
        PeriodicConfiguration x(p);
        EXPECT_EQ(f3.step(x), f.iterate(x, 3));
      }
  }
}

TEST(Power, CapGuard) { EXPECT_THROW(power(shift_ca(kBin), 30, 1 << 10), CapExceeded); }

TEST(Product, IdentityTimesIdentity) {
  auto p = product(identity_ca(kBin), identity_ca(kBin));
  EXPECT_EQ(p.alphabet().size(), 4u);
  EXPECT_EQ(p.alphabet().height(), 2u);
  for (Letter a = 0; a < 4; ++a) EXPECT_EQ(p.apply_local(Word{a}), a);
}

TEST(Product, ShiftTimesShift) {
  auto p = product(shift_ca(kBin), shift_ca(kBin));
  const auto& a = p.alphabet();
  Word win{a.letter("0.1"), a.letter("1.0")};
  EXPECT_EQ(a.name(p.apply_local(win)), "1.0");
}

TEST(Product, ProjectionIsComponentwise) {
  std::mt19937_64 rng(3);
  auto f = random_ca(rng, 2, 0, 2);
  auto g = random_ca(rng, 2, 0, 2);
  auto p = product(f, g);
  for (std::size_t n = 1; n <= 4; ++n)
    for (const Word& code : all_words(4, n)) {
      PeriodicConfiguration x(code);
      auto y = p.step(x);
      Word top, bot;
      for (Letter c : code) {
        top.push_back(p.alphabet().tracks(c)[0]);
        bot.push_back(p.alphabet().tracks(c)[1]);
      }
      auto ft = f.step(PeriodicConfiguration(top));
      auto gb = g.step(PeriodicConfiguration(bot));
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        EXPECT_EQ(p.alphabet().tracks(y.at(i))[0], ft.at(i));
        EXPECT_EQ(p.alphabet().tracks(y.at(i))[1], gb.at(i));
      }
    }
}

TEST(Product, GeometryMismatch) { EXPECT_THROW(product(shift_ca(kBin), identity_ca(kBin)), UsageError); }

TEST(PadGeometry, SameGlobalMap) {
  auto f = pad_geometry(shift_ca(kBin), 1, 4);
  EXPECT_EQ(f.anchor(), 1);
  EXPECT_EQ(f.diameter(), 4);
  for (const Word& p : all_words(2, 5)) {
    PeriodicConfiguration x(p);
    EXPECT_EQ(f.step(x), shift_ca(kBin).step(x));
  }
  EXPECT_THROW(pad_geometry(shift_ca(kBin), 0, 1), UsageError);
}

TEST(RadiusZero, Maps) {
  auto id = radius0_from_map(kBin, LetterMap::identity(2));
  EXPECT_EQ(id.rule().table(), identity_ca(kBin).rule().table());
  auto zero = radius0_from_map(kBin, LetterMap::constant(2, 0));
  EXPECT_EQ(zero.step(PeriodicConfiguration(w("1"))), PeriodicConfiguration(w("0")));
  auto swap = radius0_from_map(kBin, LetterMap::total({1, 0}));
  EXPECT_EQ(swap.step(PeriodicConfiguration(w("0"))), PeriodicConfiguration(w("1")));
}

TEST(Predicates, OnesidedAndSpreading) {
  EXPECT_TRUE(is_onesided(shift_ca(kBin)));
  EXPECT_TRUE(is_spreading_state(min_ca(kBin), 0));
  EXPECT_FALSE(is_spreading_state(min_ca(kBin), 1));
  EXPECT_FALSE(is_spreading_state(identity_ca(kBin), 0));
  auto left = CellularAutomaton(LocalRule::tabulate(kBin, 1, 2, [](std::span<const Letter> x) { return x[0]; }));
  EXPECT_FALSE(is_onesided(left));
  auto padded = pad_geometry(shift_ca(kBin), 1, 3);
  EXPECT_TRUE(is_onesided(padded));
  auto z = to_anchor_zero(padded);
  EXPECT_EQ(z.anchor(), 0);
  EXPECT_EQ(z.diameter(), 2);
  EXPECT_EQ(z.rule().table(), shift_ca(kBin).rule().table());
}

TEST(Restrict, ClosedSubalphabet) {
  auto r = restrict_to(min_ca(Alphabet::digits(3)), {0, 2});
  EXPECT_EQ(r.alphabet().names(), (std::vector<std::string>{"0", "2"}));
  EXPECT_EQ(r.apply_local(Word{1, 0}), 0);
  EXPECT_THROW(restrict_to(radius0_from_map(Alphabet::digits(3), LetterMap::total({1, 2, 0})), {0}), PreconditionError);
}

TEST(Alphabet, ProductStructure) {
  auto a = Alphabet::full_power(kBin, 3);
  EXPECT_EQ(a.size(), 8u);
  EXPECT_EQ(a.name(*a.encode(w("010"))), "0.1.0");
  EXPECT_EQ(a.tracks(a.letter("1.1.0")), w("110"));
  EXPECT_THROW(Alphabet({"a", "a"}), UsageError);
  EXPECT_THROW(Alphabet(std::vector<std::string>{}), UsageError);
}

TEST(Words, ParseFormat) {
  auto a = Alphabet::full_power(kBin, 2);
  auto x = parse_word(a, "0.1 1.1");
  EXPECT_EQ(format_word(a, x), "0.1 1.1");
  EXPECT_EQ(parse_word(kBin, "0110"), w("0110"));
  EXPECT_THROW(parse_word(kBin, "012"), UsageError);
}

TEST(LetterMap, Orbits) {
  auto swap = LetterMap::total({1, 0});
  EXPECT_TRUE(swap.separates_forever(0, 1));
  EXPECT_FALSE(LetterMap::constant(2, 0).separates_forever(0, 1));
  EXPECT_FALSE(swap.is_nilpotent());
  EXPECT_EQ(LetterMap::constant(2, 0).nilpotent_zero(), Letter{0});
  auto m = LetterMap::total({1, 2, 2});
  auto [pre, cyc] = m.orbit_lasso(0);
  EXPECT_EQ(pre, w("01"));
  EXPECT_EQ(cyc, w("2"));
}
