#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "lyubich/errors.hpp"
#include "lyubich/preimage.hpp"
#include "oracles.hpp"

using namespace lyubich;

TEST_CASE("one-step fiber with weights") {
  const auto w = preimages(RationalMap::named("chebyshev"), SpherePoint(-2.0));
  CHECK(w.total_multiplicity() == 2);
  REQUIRE(w.atoms.size() == 1);
  CHECK(w.atoms[0].mult == 2);
}

TEST_CASE("z^2-2 from w=2 to depth 2") {
  const auto t = iterated_preimages(RationalMap::named("chebyshev"), SpherePoint(2.0), 2);
  const auto& lvl = t.level(2);
  REQUIRE(lvl.size() == 3);
  CHECK(std::abs(lvl[0].point.value() + 2.0) < 1e-12);
  CHECK(std::abs(lvl[1].point.value()) < 1e-12);
  CHECK(std::abs(lvl[2].point.value() - 2.0) < 1e-12);
  CHECK(lvl[0].mult == 1);
  CHECK(lvl[1].mult == 2);
  CHECK(lvl[2].mult == 1);
  CHECK(lvl[0].weight == Rational(1, 4));
  CHECK(lvl[1].weight == Rational(1, 2));
}

TEST_CASE("z^2 from w=1 gives roots of unity") {
  const auto t = iterated_preimages(RationalMap::named("quad"), SpherePoint(1.0), 2);
  REQUIRE(t.deepest().size() == 4);
  for (const auto& a : t.deepest()) {
    CHECK(std::abs(std::pow(a.point.value(), 4) - 1.0) < 1e-12);
    CHECK(a.weight == Rational(1, 4));
  }
}

TEST_CASE("tree agrees with brute-force square roots") {
  const Complex c(-1.0, 0.0);
  const Complex w(0.4, 0.3);
  const auto t = iterated_preimages(RationalMap::named("basilica"), SpherePoint(w), 8);
  const auto brute = oracle::quadratic_leaves(c, w, 8);
  REQUIRE(t.deepest().size() == brute.size());
  for (const auto& z : brute) {
    double best = 1e300;
    for (const auto& a : t.deepest()) best = std::min(best, std::abs(a.point.value() - z));
    CHECK(best < 1e-9);
  }
  // Parent links are consistent with the map.
  const auto r = RationalMap::named("basilica");
  for (int k = 1; k <= t.depth; ++k)
    for (const auto& a : t.level(k)) {
      const auto& p = t.level(k - 1).at(static_cast<std::size_t>(a.parent));
      CHECK(chordal_distance(evaluate(r, a.point), p.point) < 1e-9);
    }
}

TEST_CASE("weights sum to one and multiplicities to n^m") {
  const RationalMap m({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0});
  const auto t = iterated_preimages(m, SpherePoint(Complex(0.2, 0.1)), 6);
  for (int k = 0; k <= 6; ++k) {
    Rational total(0);
    std::int64_t mults = 0;
    for (const auto& a : t.level(k)) {
      total += a.weight;
      mults += a.mult;
    }
    CHECK(total == Rational(1));
    CHECK(mults == checked_pow(2, k));
  }
}

TEST_CASE("levels are sorted and deterministic") {
  const auto r = RationalMap::named("chebyshev");
  const auto a = iterated_preimages(r, SpherePoint(Complex(0.1, 0.2)), 10);
  const auto b = iterated_preimages(r, SpherePoint(Complex(0.1, 0.2)), 10);
  for (int k = 0; k <= 10; ++k) {
    const auto& la = a.level(k);
    REQUIRE(la.size() == b.level(k).size());
    for (std::size_t i = 0; i < la.size(); ++i) CHECK(la[i].point == b.level(k)[i].point);
    for (std::size_t i = 1; i < la.size(); ++i) CHECK_FALSE(lex_less(la[i].point, la[i - 1].point));
  }
}

TEST_CASE("exceptional root and budget errors") {
  CHECK_THROWS_AS(iterated_preimages(RationalMap::named("quad"), SpherePoint(0.0), 3), ExceptionalRoot);
  CHECK_THROWS_AS(iterated_preimages(RationalMap::named("quad"), SpherePoint::infinity(), 3), ExceptionalRoot);
  CHECK_THROWS_AS(iterated_preimages(RationalMap::named("quad"), SpherePoint(1.0), 12, 1000), BudgetExceeded);
}

TEST_CASE("sampled tree with one branch stays on the unit circle") {
  const auto t = sampled_tree(RationalMap::named("quad"), SpherePoint(1.0), 20, 1, 42);
  CHECK(t.sampled);
  REQUIRE(t.deepest().size() == 1);
  CHECK(std::abs(std::abs(t.deepest()[0].point.value()) - 1.0) < 1e-10);
  CHECK(t.deepest()[0].weight == Rational(1));
  const auto again = sampled_tree(RationalMap::named("quad"), SpherePoint(1.0), 20, 1, 42);
  CHECK(again.deepest()[0].point == t.deepest()[0].point);
}

TEST_CASE("sampled tree weights") {
  const auto r = RationalMap::named("basilica");
  const auto full = sampled_tree(r, SpherePoint(Complex(0.3, 0.0)), 5, 2, 1);
  const auto ref = iterated_preimages(r, SpherePoint(Complex(0.3, 0.0)), 5);
  REQUIRE(full.deepest().size() == ref.deepest().size());
  for (std::size_t i = 0; i < ref.deepest().size(); ++i) CHECK(full.deepest()[i].weight == ref.deepest()[i].weight);

  const RationalMap cube({0.1, 0.0, 0.0, 1.0}, {1.0});
  const auto s = sampled_tree(cube, SpherePoint(Complex(0.5, 0.5)), 6, 2, 9);
  Rational total(0);
  for (const auto& a : s.deepest()) total += a.weight;
  CHECK(total == Rational(1));
  CHECK(s.deepest().size() == 64);
  CHECK_THROWS_AS(sampled_tree(cube, SpherePoint(1.0), 3, 0, 1), std::invalid_argument);
}

TEST_CASE("tree csv") {
  const auto t = iterated_preimages(RationalMap::named("chebyshev"), SpherePoint(2.0), 1);
  std::ostringstream os;
  write_tree_csv(os, t);
  const std::string s = os.str();
  CHECK(s.rfind("level,re,im,cumulative_mult,parent_index\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
