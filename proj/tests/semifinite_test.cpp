#include <gtest/gtest.h>

#include "catrace/semifinite.hpp"
#include "catrace/trace.hpp"
#include "helpers.hpp"

using namespace catrace;
using namespace testing_helpers;

namespace {

const Alphabet kBin = Alphabet::digits(2);

}  // namespace

TEST(Semifinite, StepExamples) {
  auto f = extend_onesided(min_ca(kBin));
  EXPECT_EQ(str(sf_step(f, w("111"))), "111");
  EXPECT_EQ(str(sf_step(f, w("101"))), "001");
  EXPECT_EQ(sf_trace(f, w("1"), 4).front(), w("1111"));
  EXPECT_EQ(sf_trace(f, w("10"), 3).front(), w("100"));
  auto s = extend_onesided(shift_ca(kBin));
  EXPECT_EQ(sf_trace(s, w("01"), 4).front(), w("0111"));
  EXPECT_EQ(sf_trace(s, w("0110"), 1), ws({"0", "1", "1", "0"}));
  EXPECT_THROW(sf_step(s, Word{}), UsageError);
}

TEST(Semifinite, MarkersAndGeometry) {
  auto s = extend_onesided(shift_ca(kBin));
  EXPECT_EQ(s.extended.alphabet().size(), 4u);
  const Letter L = s.left_marker(), R = s.right_marker();
  EXPECT_EQ(s.extended.apply_local(Word{L, 1}), L);
  EXPECT_EQ(s.extended.apply_local(Word{R, R}), R);
  EXPECT_EQ(s.extended.apply_local(Word{0, 1}), 1);
  EXPECT_EQ(s.extended.apply_local(Word{1, R}), 1);
  EXPECT_THROW(extend_onesided(CellularAutomaton(LocalRule::tabulate(
                   kBin, 1, 2, [](std::span<const Letter> x) { return x[0]; }))),
               UsageError);
}

TEST(Semifinite, AgreesAwayFromMarkers) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = random_ca(rng, 3, 0, 3);
    auto f = extend_onesided(g);
    for (const Word& x : all_words(3, 3)) EXPECT_EQ(f.extended.apply_local(x), g.apply_local(x));
  }
}

TEST(Semifinite, ColumnsLieInTrace) {
  for (const auto& g : {min_ca(kBin), shift_ca(kBin)}) {
    auto f = extend_onesided(g);
    auto lang = trace(g, 10);
    for (std::size_t n = 1; n <= 6; ++n)
      for (const Word& u : all_words(2, n))
        for (const Word& c : sf_trace(f, u, 10)) EXPECT_TRUE(lang.contains(c)) << str(u);
  }
}

TEST(BlockRule, Arity2) {
  auto b = block_rule(extend_onesided(shift_ca(kBin)));
  EXPECT_EQ(b(0, Letter{1}), 1);
  EXPECT_EQ(b(0, std::nullopt), 0);
  EXPECT_EQ(b(1, std::nullopt), 1);
  std::mt19937_64 rng(1);
  auto wide = extend_onesided(random_ca(rng, 2, 0, 3));
  EXPECT_THROW(block_rule(wide), UsageError);
}
