#include <doctest.h>

#include <random>

#include "lyubich/measure.hpp"
#include "lyubich/transfer.hpp"

using namespace lyubich;

TEST_CASE("transfer of constants and of b o R") {
  const RationalMap m({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0});
  const TransferOperator L(m);
  const auto b = TestFunction::parse("bump:0.3,0.1,2");
  const auto a = TestFunction::parse("z") + TestFunction::parse("abs2");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 50; ++i) {
    const SpherePoint w(Complex(u(rng), u(rng)));
    CHECK(std::abs(L.apply(TestFunction::constant(1.0), w) - 1.0) < 1e-12);
    // Module identity: L(a * (b o R)) = L(a) * b.
    const Complex lhs = L.apply(a * b.compose(m), w);
    const Complex rhs = L.apply(a, w) * b(w);
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
  CHECK(L.cache().hits() > 0);
}

TEST_CASE("transfer power equals integral over the tree") {
  const auto r = RationalMap::named("basilica");
  const auto f = TestFunction::parse("re2") + TestFunction::parse("y");
  const SpherePoint w(Complex(0.2, -0.3));
  for (int m = 0; m <= 8; ++m) {
    const auto mu = measure_from_tree(iterated_preimages(r, w, m));
    CHECK(std::abs(transfer_power(r, f, m, w) - integrate(mu, f)) < 1e-10);
  }
}

TEST_CASE("inner product is hermitian and nonnegative") {
  const auto r = RationalMap::named("chebyshev");
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    const auto xi = random_polynomial(rng);
    const auto eta = random_polynomial(rng);
    const SpherePoint w(Complex(0.1 * i, 0.2));
    const Complex a = inner_product(r, xi, eta)(w);
    const Complex b = inner_product(r, eta, xi)(w);
    CHECK(std::abs(a - std::conj(b)) < 1e-12);
    CHECK(inner_product(r, xi, xi)(w).real() >= 0.0);
  }
}

TEST_CASE("cache evicts least recently used") {
  FiberCache cache(2);
  const auto r = RationalMap::named("quad");
  cache.get(r, SpherePoint(1.0));
  cache.get(r, SpherePoint(2.0));
  cache.get(r, SpherePoint(1.0));
  cache.get(r, SpherePoint(3.0));
  CHECK(cache.size() == 2);
  CHECK(cache.hits() == 1);
  cache.get(r, SpherePoint(1.0));
  CHECK(cache.hits() == 2);
  cache.get(r, SpherePoint(2.0));
  CHECK(cache.misses() == 4);
}

TEST_CASE("closed-form transfer values on z^2") {
  const auto quad = RationalMap::named("quad");
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const Complex w(u(rng), u(rng));
    CHECK(std::abs(apply_transfer(quad, TestFunction::parse("z"), w)) < 1e-12);
    CHECK(std::abs(apply_transfer(quad, TestFunction::parse("abs2"), w) - std::abs(w)) < 1e-12);
    CHECK(std::abs(inner_product(quad, TestFunction::parse("z"), TestFunction::parse("z"))(w) - std::abs(w)) < 1e-12);
    const auto f = random_polynomial(rng);
    CHECK(transfer_power(quad, f, 0, w) == f(w));
    CHECK(std::abs(transfer_power(quad, TestFunction::constant(1.0), 5, w) - 1.0) < 1e-12);
  }
}

TEST_CASE("positivity on random rational maps") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Complex> p(3);
    std::vector<Complex> q(1 + trial % 3);
    for (auto& c : p) c = Complex(g(rng), g(rng));
    for (auto& c : q) c = Complex(g(rng), g(rng));
    const RationalMap map(p, q);
    const auto f = random_polynomial(rng);
    const auto nonneg = f.conj() * f;
    const SpherePoint w(Complex(g(rng), g(rng)));
    const Complex v = apply_transfer(map, nonneg, w);
    CHECK(v.real() >= 0.0);
    CHECK(std::abs(v.imag()) < 1e-12 * (1.0 + v.real()));
    CHECK(std::abs(apply_transfer(map, TestFunction::constant(1.0), w) - 1.0) < 1e-12);
  }
}

TEST_CASE("sup norm on samples") {
  const auto quad = RationalMap::named("quad");
  const auto coarse = iterated_preimages(quad, SpherePoint(1.0), 4).deepest();
  const auto fine = iterated_preimages(quad, SpherePoint(1.0), 6).deepest();
  std::vector<SpherePoint> cs;
  std::vector<SpherePoint> fs;
  for (const auto& a : coarse) cs.push_back(a.point);
  for (const auto& a : fine) fs.push_back(a.point);
  CHECK(sup_norm_2(quad, TestFunction::constant(1.0), cs) == doctest::Approx(1.0));
  CHECK(sup_norm_2(quad, TestFunction::parse("z"), cs) == doctest::Approx(1.0));
  const auto xi = TestFunction::parse("bump:0.9,0.3,0.5");
  CHECK(sup_norm_2(quad, xi, fs) >= sup_norm_2(quad, xi, cs) - 1e-15);
}
