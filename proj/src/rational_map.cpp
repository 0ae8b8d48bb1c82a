#include "lyubich/rational_map.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>

#include "lyubich/errors.hpp"

namespace lyubich {

namespace {

std::uint64_t next_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

// Strip leading coefficients that are roundoff residue of cancellation.
Polynomial trim_cancelled(std::vector<Complex> c, const std::vector<double>& bound) {
  while (!c.empty() && std::abs(c.back()) <= 1e-12 * bound[c.size() - 1]) c.pop_back();
  return Polynomial(std::move(c));
}

Polynomial critical_numerator(const Polynomial& p, const Polynomial& q) {
  const Polynomial dp = p.derivative();
  const Polynomial dq = q.derivative();
  const std::size_t len = static_cast<std::size_t>(std::max(p.degree() + q.degree(), 0)) + 1;
  std::vector<Complex> c(len);
  std::vector<double> bound(len, 0.0);
  auto accumulate = [&](const Polynomial& a, const Polynomial& b, double sign) {
    for (int i = 0; i <= a.degree(); ++i)
      for (int j = 0; j <= b.degree(); ++j) {
        const Complex t = a.coeff(i) * b.coeff(j);
        c[static_cast<std::size_t>(i + j)] += sign * t;
        bound[static_cast<std::size_t>(i + j)] += std::abs(t);
      }
  };
  accumulate(dp, q, 1.0);
  accumulate(p, dq, -1.0);
  return trim_cancelled(std::move(c), bound);
}

std::vector<Complex> reversed_padded(const Polynomial& p, int n) {
  std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) c[static_cast<std::size_t>(j)] = p.coeff(n - j);
  return c;
}

// Multiplicity of z as a root of F, by the first Taylor coefficient that is
// not negligible relative to its own term scale.
int root_multiplicity(const Polynomial& f, Complex z) {
  for (int k = 1; k <= f.degree(); ++k) {
    const auto t = f.taylor(k, z);
    if (std::abs(t.value) > kMultiplicityTol * t.scale && t.value != Complex{}) return k;
  }
  return std::max(f.degree(), 1);
}

int local_degree_finite(const RationalMap& map, Complex z) {
  const SpherePoint w = evaluate(map, z);
  const Polynomial f = map.fiber_polynomial(w);
  return root_multiplicity(f, z);
}

}  // namespace

RationalMap::RationalMap(std::vector<Complex> num, std::vector<Complex> den, std::string name)
    : RationalMap(Polynomial(std::move(num)), Polynomial(std::move(den)), std::move(name), true) {}

RationalMap::RationalMap(Polynomial num, Polynomial den, std::string name, bool validate)
    : num_(std::move(num)), den_(std::move(den)), name_(std::move(name)), id_(next_id()) {
  if (num_.is_zero()) throw InvalidMap("numerator is identically zero");
  if (den_.is_zero()) throw InvalidMap("denominator is identically zero");
  degree_ = std::max(num_.degree(), den_.degree());
  if (degree_ < 2) throw InvalidMap("degree must be at least two");
  if (validate && den_.degree() >= 1) {
    for (const Complex& r : find_roots(den_)) {
      if (std::abs(num_(r)) < kCoprimeTol * num_.scale_at(r)) {
        throw InvalidMap("numerator and denominator share a root near " + to_string(SpherePoint(r)));
      }
    }
  }
  crit_ = critical_numerator(num_, den_);
}

RationalMap RationalMap::named(std::string_view name) {
  if (name == "quad") return RationalMap({0.0, 0.0, 1.0}, {1.0}, "quad");
  if (name == "basilica") return RationalMap({-1.0, 0.0, 1.0}, {1.0}, "basilica");
  if (name == "chebyshev") return RationalMap({-2.0, 0.0, 1.0}, {1.0}, "chebyshev");
  throw ConfigError("unknown map name '" + std::string(name) + "'");
}

SpherePoint RationalMap::operator()(const SpherePoint& z) const { return evaluate(*this, z); }

Polynomial RationalMap::fiber_polynomial(const SpherePoint& w) const {
  if (w.is_infinite()) return den_;
  const Complex wv = w.value();
  const std::size_t len = static_cast<std::size_t>(degree_) + 1;
  std::vector<Complex> c(len);
  for (std::size_t i = 0; i < len; ++i) {
    c[i] = num_.coeff(static_cast<int>(i)) - wv * den_.coeff(static_cast<int>(i));
  }
  return Polynomial(std::move(c));
}

RationalMap RationalMap::infinity_chart() const {
  RationalMap chart(Polynomial(reversed_padded(num_, degree_)), Polynomial(reversed_padded(den_, degree_)),
                    name_ + "@inf", false);
  return chart;
}

namespace detail {

SpherePoint evaluate_direct(const RationalMap& map, Complex z) {
  const Complex p = map.numerator()(z);
  const Complex q = map.denominator()(z);
  if (q == Complex{}) return SpherePoint::infinity();
  const Complex r = p / q;
  if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) return SpherePoint::infinity();
  return SpherePoint(r);
}

SpherePoint evaluate_inverted(const RationalMap& map, Complex z) {
  // P(z)/Q(z) = w^(dQ-dP) * Prev(w)/Qrev(w), w = 1/z.
  const Polynomial& p = map.numerator();
  const Polynomial& q = map.denominator();
  const Complex w = 1.0 / z;
  Complex prev{};
  for (int i = 0; i <= p.degree(); ++i) prev = prev * w + p.coeff(i);
  Complex qrev{};
  for (int i = 0; i <= q.degree(); ++i) qrev = qrev * w + q.coeff(i);
  if (qrev == Complex{}) return SpherePoint::infinity();
  const Complex r = std::pow(w, q.degree() - p.degree()) * (prev / qrev);
  if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) return SpherePoint::infinity();
  return SpherePoint(r);
}

}  // namespace detail

SpherePoint evaluate(const RationalMap& map, const SpherePoint& z) {
  const int dp = map.numerator().degree();
  const int dq = map.denominator().degree();
  if (z.is_infinite()) {
    if (dp > dq) return SpherePoint::infinity();
    if (dp < dq) return SpherePoint(Complex{});
    return SpherePoint(map.numerator().leading() / map.denominator().leading());
  }
  const Complex v = z.value();
  if (std::abs(v) > kChartSwitch) return detail::evaluate_inverted(map, v);
  return detail::evaluate_direct(map, v);
}

Complex derivative(const RationalMap& map, Complex z) {
  const Complex q = map.denominator()(z);
  return map.critical_polynomial()(z) / (q * q);
}

int branch_index(const RationalMap& map, const SpherePoint& z) {
  if (z.is_infinite()) return local_degree_finite(map.infinity_chart(), Complex{});
  return local_degree_finite(map, z.value());
}

std::vector<CriticalDatum> critical_points(const RationalMap& map) {
  // e(z) - 1 equals the order of vanishing of P'Q - PQ' at every finite z
  // (poles included); the degree deficit of that polynomial sits at infinity.
  const Polynomial& crit = map.critical_polynomial();
  const int expected = 2 * map.degree() - 2;
  std::vector<CriticalDatum> out;
  int finite_total = 0;
  if (crit.degree() >= 1) {
    for (const auto& c : solve(crit)) {
      out.push_back({SpherePoint(c.point), c.multiplicity + 1});
      finite_total += c.multiplicity;
    }
  }
  const int at_infinity = expected - finite_total;
  if (at_infinity < 0) throw RootFindingFailure("critical polynomial degree exceeds 2n-2");
  if (at_infinity > 0) out.push_back({SpherePoint::infinity(), at_infinity + 1});

  for (const auto& c : out) {
    if (branch_index(map, c.point) != c.index) {
      throw RootFindingFailure("critical multiplicity at " + to_string(c.point) +
                               " disagrees with local degree; ill-conditioned map");
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CriticalDatum& a, const CriticalDatum& b) { return lex_less(a.point, b.point); });
  return out;
}

namespace {

bool fiber_within(const RationalMap& map, const SpherePoint& w, const std::vector<SpherePoint>& set) {
  for (const auto& atom : solve_fiber(map, w)) {
    const bool found = std::any_of(set.begin(), set.end(), [&](const SpherePoint& s) {
      return chordal_distance(s, atom.point) < kClusterRadius;
    });
    if (!found) return false;
  }
  return true;
}

}  // namespace

std::vector<FiberAtom> solve_fiber(const RationalMap& map, const SpherePoint& w) {
  const Polynomial raw = map.fiber_polynomial(w);
  std::vector<Complex> c(raw.coeffs().begin(), raw.coeffs().end());
  std::vector<double> bound(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const int k = static_cast<int>(i);
    bound[i] = w.is_infinite() ? std::abs(map.denominator().coeff(k))
                               : std::abs(map.numerator().coeff(k)) +
                                     std::abs(w.value()) * std::abs(map.denominator().coeff(k));
  }
  // A leading coefficient lost to cancellation means the degree dropped and
  // the missing roots sit at infinity.
  const Polynomial f = trim_cancelled(std::move(c), bound);
  std::vector<FiberAtom> out;
  if (f.degree() >= 1) {
    for (const auto& r : solve(f)) out.push_back({SpherePoint(r.point), r.multiplicity});
  }
  const int at_infinity = map.degree() - std::max(f.degree(), 0);
  if (at_infinity > 0) out.push_back({SpherePoint::infinity(), at_infinity});
  return out;
}

std::vector<SpherePoint> exceptional_points(const RationalMap& map) {
  // An exceptional point has a one-point fiber, so it is a critical point of
  // full index n, and so is the point it maps to. Test the fixed points and
  // 2-cycles among these candidates for total invariance.
  std::vector<SpherePoint> candidates;
  for (const auto& c : critical_points(map)) {
    if (c.index == map.degree()) candidates.push_back(c.point);
  }
  std::vector<SpherePoint> out;
  auto add = [&](const SpherePoint& p) {
    for (const auto& q : out)
      if (chordal_distance(p, q) < kClusterRadius) return;
    out.push_back(p);
  };
  for (const auto& c : candidates) {
    const SpherePoint image = evaluate(map, c);
    if (chordal_distance(image, c) < kClusterRadius) {
      if (fiber_within(map, c, {c})) add(c);
      continue;
    }
    const SpherePoint back = evaluate(map, image);
    if (chordal_distance(back, c) < kClusterRadius) {
      const std::vector<SpherePoint> orbit{c, image};
      if (fiber_within(map, c, orbit) && fiber_within(map, image, orbit)) {
        add(c);
        add(image);
      }
    }
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

bool is_exceptional(const RationalMap& map, const SpherePoint& w) {
  for (const auto& e : exceptional_points(map))
    if (chordal_distance(e, w) < kClusterRadius) return true;
  return false;
}

std::vector<FixedPoint> fixed_points(const RationalMap& map) {
  // Finite fixed points solve P(z) - z Q(z) = 0.
  const Polynomial z_poly(std::vector<Complex>{0.0, 1.0});
  const Polynomial f = map.numerator() - z_poly * map.denominator();
  std::vector<FixedPoint> out;
  if (f.degree() >= 1) {
    for (const auto& r : solve(f)) out.push_back({SpherePoint(r.point), derivative(map, r.point)});
  }
  if (evaluate(map, SpherePoint::infinity()).is_infinite()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.push_back({SpherePoint::infinity(), Complex(nan, nan)});
  }
  return out;
}

Complex parse_complex(std::string_view text) {
  auto parse_double = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ConfigError("malformed number '" + std::string(s) + "'");
    }
    return v;
  };
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) return {parse_double(text), 0.0};
  return {parse_double(text.substr(0, comma)), parse_double(text.substr(comma + 1))};
}

}  // namespace lyubich
