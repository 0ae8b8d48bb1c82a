#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "lyubich/basis.hpp"
#include "lyubich/errors.hpp"
#include "lyubich/transfer.hpp"

using namespace lyubich;

namespace {

JuliaSample circle_sample(std::size_t count) {
  JuliaSample s;
  for (std::size_t j = 0; j < count; ++j)
    s.points.emplace_back(std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(count)));
  std::sort(s.points.begin(), s.points.end(), lex_less);
  return s;
}

}  // namespace

TEST_CASE("julia samples lie on the known Julia sets") {
  const auto q = julia_sample(RationalMap::named("quad"), 1024, 3);
  CHECK(q.points.size() == 1024);
  for (const auto& p : q.points) CHECK(std::abs(std::abs(p.value()) - 1.0) < 1e-6);

  const auto c = julia_sample(RationalMap::named("chebyshev"), 1024, 3);
  CHECK(c.points.size() == 1024);
  for (const auto& p : c.points) {
    CHECK(std::abs(p.value().imag()) < 1e-6);
    CHECK(std::abs(p.value().real()) < 2.0 + 1e-6);
  }
  CHECK(c.depth >= 10);
  for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(lex_less(c.points[i - 1], c.points[i]));

  const auto again = julia_sample(RationalMap::named("chebyshev"), 1024, 3);
  CHECK(again.points == c.points);
}

TEST_CASE("branch separation radius") {
  const auto quad = RationalMap::named("quad");
  const double rq = branch_separation_radius(quad, julia_sample(quad, 256, 1));
  CHECK(rq >= 0.4);
  CHECK(rq <= 0.5 + 1e-9);

  // Brute-force check of the defining property on the chebyshev sample.
  const auto cheb = RationalMap::named("chebyshev");
  const auto s = julia_sample(cheb, 512, 1);
  const double r = branch_separation_radius(cheb, s);
  CHECK(r > 0.0);
  for (const auto& z : s.points) {
    if (!(std::abs(z.value()) > 2.0 * r)) continue;
    const Complex x = z.value();
    CHECK(std::abs(x - (-x)) > 4.0 * r);
  }
  JuliaSample tiny;
  tiny.points.emplace_back(1.0);
  CHECK_THROWS_AS(branch_separation_radius(quad, tiny), DegenerateSample);
}

TEST_CASE("regular net on the circle") {
  const auto quad = RationalMap::named("quad");
  const auto s = circle_sample(1024);
  CHECK(build_basis(quad, s, 0.4)->size() == 8);
  CHECK(build_basis(quad, s, 0.1)->size() == 32);
  CHECK_THROWS_AS(build_basis(quad, s, 0.1, 16), CoverFailure);

  const auto b = build_basis(quad, s, 0.4);
  CHECK(b->branch_points().empty());
  for (const auto& z : s.points) {
    double sum = 0.0;
    for (double u : b->evaluate_all(z)) {
      CHECK(u >= 0.0);
      sum += u * u;
    }
    CHECK(std::abs(sum - 2.0) < 1e-10);
  }
  CHECK(injectivity_violations(quad, *b, s.points) == 0);
  const auto j = b->to_json();
  CHECK(j.size() == 8);
  CHECK(j[0]["profile"] == 2);
  CHECK(j[0]["sector"].is_null());
}

TEST_CASE("reconstruction on the circle") {
  const auto quad = RationalMap::named("quad");
  const auto s = circle_sample(512);
  const auto b = build_basis(quad, s, 0.2);
  CHECK(b->size() == 16);
  const auto one = TestFunction::constant(1.0);
  CHECK(reconstruct(quad, *b, one, b->size(), s.points).residual < 1e-3);
  CHECK(reconstruct(quad, *b, one, 0, s.points).residual == doctest::Approx(1.0));

  const auto u0 = b->as_function(0);
  CHECK(reconstruct(quad, *b, u0, b->size(), s.points).residual < 1e-10);

  const auto f = TestFunction::parse("x") + TestFunction::parse("abs2");
  double prev = 1e300;
  for (std::size_t n : {4, 8, 12, 16}) {
    const double res = reconstruct(quad, *b, f, n, s.points).residual;
    CHECK(res <= prev + 1e-12);
    prev = res;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("sector elements around the chebyshev branch point") {
  const auto cheb = RationalMap::named("chebyshev");
  const auto s = julia_sample(cheb, 1024, 5);
  const auto b = build_basis(cheb, s, 0.1);
  REQUIRE(b->branch_points().size() == 1);
  CHECK(std::abs(b->branch_points()[0]) < 1e-12);
  const std::size_t regular = b->regular_count();
  CHECK(regular > 0);
  CHECK(regular < b->size());
  for (std::size_t i = 0; i < b->size(); ++i) CHECK(b->element(i).sector.has_value() == (i >= regular));
  for (std::size_t i = regular + 2; i < b->size(); ++i)
    CHECK(b->element(i).radius <= b->element(i - 2).radius);

  // Sector supports never hold both x and -x.
  for (std::size_t i = regular; i < b->size(); ++i)
    for (const auto& z : s.points)
      CHECK_FALSE((b->element(i).raw(z) > 0.0 && b->element(i).raw(SpherePoint(-z.value())) > 0.0));
  CHECK(injectivity_violations(cheb, *b, s.points) == 0);

  for (const auto& z : s.points) {
    if (std::abs(z.value()) < 1e-12) continue;
    double sum = 0.0;
    for (double u : b->evaluate_all(z)) sum += u * u;
    CHECK(std::abs(sum - 2.0) < 1e-10);
  }

  // A bump on [0.5, 1.5] only meets regular elements.
  const auto a = VanishingFunction::bump(*b, 1.0, 0.5);
  CHECK(a.branch_distances.size() == 1);
  CHECK(a.branch_distances[0] == doctest::Approx(0.5));
  for (std::size_t i = regular; i < b->size(); ++i)
    for (const auto& z : s.points) CHECK((a.fn(z) * b->value(i, z)) == Complex{});
  CHECK_THROWS_AS(VanishingFunction::bump(*b, 0.3, 0.5), ConfigError);
}
