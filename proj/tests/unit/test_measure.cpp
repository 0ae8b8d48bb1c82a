#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "lyubich/errors.hpp"
#include "lyubich/measure.hpp"
#include "oracles.hpp"

using namespace lyubich;

TEST_CASE("measure weights are exact") {
  const auto mu = measure_from_tree(iterated_preimages(RationalMap::named("chebyshev"), SpherePoint(2.0), 3));
  CHECK(mu.total() == Rational(1));
  CHECK(mu.depth == 3);
  for (const auto& a : mu.atoms) CHECK((a.weight == Rational(1, 8) || a.weight == Rational(1, 4)));
}

TEST_CASE("pushforward reproduces the previous level") {
  const std::vector<RationalMap> maps{RationalMap::named("quad"), RationalMap::named("chebyshev"),
                                      RationalMap({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0})};
  for (const auto& r : maps) {
    const SpherePoint w = default_root(r);
    for (int m = 1; m <= 8; ++m) {
      const auto a = measure_from_tree(iterated_preimages(r, w, m));
      const auto b = measure_from_tree(iterated_preimages(r, w, m - 1));
      const auto cmp = compare_measures(pushforward(a, r), b);
      CHECK(cmp.same_atoms);
      CHECK(cmp.weights_equal);
      CHECK(cmp.max_position_error < 1e-8);
    }
  }
}

TEST_CASE("moments against quadrature") {
  const auto quad = RationalMap::named("quad");
  const auto mu = measure_from_tree(iterated_preimages(quad, SpherePoint(1.0), 10));
  const double re2 = oracle::circle_expectation([](Complex z) { return z.real() * z.real(); });
  CHECK(std::abs(integrate(mu, TestFunction::parse("re2")).real() - re2) < 1e-12);
  CHECK(std::abs(integrate(mu, TestFunction::parse("z"))) < 1e-12);

  const auto cheb = RationalMap::named("chebyshev");
  const auto nu = measure_from_tree(iterated_preimages(cheb, default_root(cheb), 12));
  const double x2 = oracle::arcsine_expectation([](double x) { return x * x; });
  CHECK(x2 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(integrate(nu, TestFunction::parse("x^2")).real() - x2) < 0.02);
}

TEST_CASE("table functions bind to atoms") {
  const auto quad = RationalMap::named("quad");
  const auto mu = measure_from_tree(iterated_preimages(quad, SpherePoint(1.0), 2));
  std::vector<Complex> vals(mu.atoms.size(), 2.0);
  const auto t = TestFunction::table(mu.points(), vals);
  CHECK(integrate(mu, t) == Complex(2.0));
  const auto other = measure_from_tree(iterated_preimages(quad, SpherePoint(1.0), 3));
  CHECK_THROWS_AS(integrate(other, t), IncompatibleTable);
}

TEST_CASE("default roots") {
  const auto r = default_root(RationalMap::named("chebyshev"));
  CHECK(std::abs(r.value() - 2.0) < 1e-12);
  const auto q = default_root(RationalMap::named("quad"));
  CHECK(std::abs(q.value() - 1.0) < 1e-12);
}

TEST_CASE("measure csv") {
  const auto mu = measure_from_tree(iterated_preimages(RationalMap::named("chebyshev"), SpherePoint(2.0), 2));
  std::ostringstream os;
  write_measure_csv(os, mu);
  CHECK(os.str().find("re,im,weight_num,weight_depth") == 0);
  CHECK(os.str().find(",2,2\n") != std::string::npos);
}

TEST_CASE("convergence report") {
  const auto quad = RationalMap::named("quad");
  const auto rep = convergence_report(quad, {SpherePoint(1.0), SpherePoint(Complex(0.5, 0.5))}, {4, 8},
                                      {TestFunction::parse("re2")});
  CHECK(rep.entries.size() == 4);
  const auto j = to_json(rep);
  CHECK(j.is_array());
  CHECK(j[0].contains("spread_across_w"));
}

TEST_CASE("random test polynomials are bounded on the disk") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto f = random_polynomial(rng, 3, 2.0);
    for (int k = 0; k < 64; ++k) {
      const Complex z = std::polar(2.0 * (k % 8) / 7.0, 2.0 * std::numbers::pi * k / 64.0);
      CHECK(std::abs(f(SpherePoint(z))) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("quadrature oracle reproduces closed forms") {
  CHECK(oracle::adaptive_simpson([](double t) { return std::sin(t); }, 0.0, std::numbers::pi) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // Arcsine moments on [-2, 2] are the central binomial coefficients.
  CHECK(oracle::arcsine_expectation([](double x) { return x * x; }) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(oracle::arcsine_expectation([](double x) { return std::pow(x, 4); }) == doctest::Approx(6.0).epsilon(1e-10));
  CHECK(oracle::arcsine_expectation([](double x) { return std::pow(x, 6); }) == doctest::Approx(20.0).epsilon(1e-10));
  CHECK(oracle::circle_expectation([](Complex z) { return std::norm(z * z + 1.0); }) ==
        doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("invariance on random cubic rational maps") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Complex> p(4);
    std::vector<Complex> q(1 + trial % 4);
    for (auto& c : p) c = Complex(g(rng), g(rng));
    for (auto& c : q) c = Complex(g(rng), g(rng));
    const RationalMap map(p, q);
    const SpherePoint w(Complex(g(rng), g(rng)));
    for (int m = 1; m <= 4; ++m) {
      const auto cmp = compare_measures(pushforward(measure_from_tree(iterated_preimages(map, w, m)), map),
                                        measure_from_tree(iterated_preimages(map, w, m - 1)));
      CHECK(cmp.same_atoms);
      CHECK(cmp.weights_equal);
      CHECK(cmp.max_position_error < 1e-8);
    }
  }
}
