#include "lyubich/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "lyubich/errors.hpp"
#include "lyubich/kernels.hpp"
#include "lyubich/measure.hpp"
#include "lyubich/transfer.hpp"

namespace lyubich {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double bump_profile(double t, int p) {
  if (!(std::abs(t) < 1.0)) return 0.0;
  return std::pow(1.0 - t * t, p);
}

double wrap_angle(double a) { return std::remainder(a, kTwoPi); }

std::size_t distinct_count(std::span<const TreeAtom> level) {
  std::vector<SpherePoint> pts;
  pts.reserve(level.size());
  for (const auto& a : level) pts.push_back(a.point);
  const auto labels = cluster_labels(pts);
  std::size_t count = 0;
  for (auto l : labels) count = std::max(count, l + 1);
  return count;
}

std::vector<CriticalDatum> finite_critical(const RationalMap& map) {
  std::vector<CriticalDatum> out;
  for (const auto& c : critical_points(map))
    if (c.point.is_finite()) out.push_back(c);
  return out;
}

double distance_to(const std::vector<CriticalDatum>& crit, const SpherePoint& z) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : crit) d = std::min(d, plane_distance(c.point, z));
  return d;
}

}  // namespace

JuliaSample julia_sample(const RationalMap& map, std::size_t size, std::uint64_t seed, std::size_t budget) {
  if (size == 0) throw std::invalid_argument("julia sample size must be positive");
  if (size > budget) throw BudgetExceeded("julia sample size exceeds the atom budget");
  const SpherePoint root = default_root(map);
  const auto n = static_cast<std::size_t>(map.degree());

  std::vector<TreeAtom> level{TreeAtom{root, 1, -1, Rational(1)}};
  int full = 0;
  while (distinct_count(level) < size) {
    if (level.size() > budget / n) throw BudgetExceeded("julia sample needs more atoms than the budget allows");
    level = kernels::expand_level_parallel(map, level, {0, seed, full});
    ++full;
  }
  const int depth = std::max(full, 10);
  std::vector<int> schedule(static_cast<std::size_t>(depth), 1);
  std::fill(schedule.begin(), schedule.begin() + full, 0);
  const auto tree = scheduled_tree(map, root, schedule, seed, budget);

  std::vector<SpherePoint> pts;
  for (const auto& a : tree.deepest()) pts.push_back(a.point);
  const auto labels = cluster_labels(pts);
  std::vector<SpherePoint> distinct;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (labels[i] == distinct.size()) distinct.push_back(pts[i]);
  if (distinct.size() > size) {
    std::mt19937_64 rng(seed);
    std::shuffle(distinct.begin(), distinct.end(), rng);
    distinct.resize(size);
  }
  std::sort(distinct.begin(), distinct.end(), lex_less);

  JuliaSample out;
  out.points = std::move(distinct);
  out.method = "backward-tree full=" + std::to_string(full) + " depth=" + std::to_string(depth);
  out.map_id = map.id();
  out.depth = depth;
  return out;
}

double branch_separation_radius(const RationalMap& map, const JuliaSample& sample) {
  if (sample.points.size() < 2) throw DegenerateSample("branch separation needs at least two sample points");
  const auto crit = finite_critical(map);

  struct Probe {
    double to_critical;
    double fiber_gap;
  };
  std::vector<Probe> probes;
  for (const auto& z : sample.points) {
    if (z.is_infinite()) continue;
    const auto fiber = solve_fiber(map, evaluate(map, z));
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fiber.size(); ++i) {
      if (fiber[i].mult > 1) gap = 0.0;
      for (std::size_t j = i + 1; j < fiber.size(); ++j) gap = std::min(gap, plane_distance(fiber[i].point, fiber[j].point));
    }
    probes.push_back({distance_to(crit, z), gap});
  }
  if (probes.size() < 2) throw DegenerateSample("branch separation needs at least two finite sample points");

  const auto ok = [&](double r) {
    return std::all_of(probes.begin(), probes.end(),
                       [&](const Probe& p) { return !(p.to_critical > 2.0 * r) || p.fiber_gap > 4.0 * r; });
  };
  double hi = 0.0;
  for (const auto& p : probes)
    if (std::isfinite(p.to_critical)) hi = std::max(hi, p.to_critical / 2.0);
  if (hi == 0.0 || ok(hi)) return hi;
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

double BasisElement::raw(const SpherePoint& z) const {
  if (z.is_infinite()) return 0.0;
  const Complex v = z.value();
  if (!sector) return bump_profile(std::abs(v - center) / radius, profile);
  const Sector& s = *sector;
  const Complex d = v - s.branch_point;
  const double rho = std::abs(d);
  if (rho == 0.0) return 0.0;
  const double radial = bump_profile((rho - s.radial_center) / s.radial_half_width, profile);
  if (radial == 0.0) return 0.0;
  return radial * bump_profile(wrap_angle(std::arg(d) - s.angle) / s.half_width, profile);
}

Basis::Basis(std::vector<BasisElement> elements, std::vector<Complex> branch_points, double r, int degree)
    : elements_(std::move(elements)), branch_points_(std::move(branch_points)), r_(r), degree_(degree) {
  for (std::size_t i = 0; i < elements_.size(); ++i) elements_[i].index = i;
}

std::size_t Basis::regular_count() const {
  return static_cast<std::size_t>(
      std::count_if(elements_.begin(), elements_.end(), [](const BasisElement& e) { return !e.sector; }));
}

std::vector<double> Basis::evaluate_all(const SpherePoint& z) const {
  std::vector<double> u(elements_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = elements_[i].raw(z);
    total += u[i];
  }
  if (!(total > 0.0)) return std::vector<double>(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = elements_[i].scale * std::sqrt(u[i] / total);
  return u;
}

double Basis::value(std::size_t i, const SpherePoint& z) const {
  const double own = elements_.at(i).raw(z);
  if (own == 0.0) return 0.0;
  double total = 0.0;
  for (const auto& e : elements_) total += e.raw(z);
  return elements_[i].scale * std::sqrt(own / total);
}

TestFunction Basis::as_function(std::size_t i) const {
  if (i >= elements_.size()) throw std::out_of_range("basis index");
  auto self = std::make_shared<const Basis>(*this);
  return TestFunction::analytic("u" + std::to_string(i),
                                [self, i](const SpherePoint& z) { return Complex(self->value(i, z), 0.0); });
}

nlohmann::json Basis::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : elements_) {
    nlohmann::json j{{"index", e.index},
                     {"center", {e.center.real(), e.center.imag()}},
                     {"radius", e.radius},
                     {"profile", e.profile},
                     {"scale", e.scale}};
    if (e.sector) {
      const Sector& s = *e.sector;
      j["sector"] = {{"branch_point", {s.branch_point.real(), s.branch_point.imag()}},
                     {"index", s.index},
                     {"layer", s.layer},
                     {"slot", s.slot},
                     {"angle", s.angle},
                     {"half_width", s.half_width},
                     {"radial_center", s.radial_center},
                     {"radial_half_width", s.radial_half_width}};
    } else {
      j["sector"] = nullptr;
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::shared_ptr<const Basis> build_basis(const RationalMap& map, const JuliaSample& sample, double r,
                                         std::size_t count_cap) {
  if (!(r > 0.0)) throw ConfigError("basis radius must be positive");
  const double scale = std::sqrt(static_cast<double>(map.degree()));

  std::vector<SpherePoint> finite;
  for (const auto& z : sample.points)
    if (z.is_finite()) finite.push_back(z);

  std::vector<CriticalDatum> branch;
  for (const auto& c : finite_critical(map)) {
    const bool near = std::any_of(finite.begin(), finite.end(),
                                  [&](const SpherePoint& z) { return plane_distance(c.point, z) <= r; });
    if (near) branch.push_back(c);
  }

  std::vector<Complex> eligible;
  for (const auto& z : finite)
    if (distance_to(branch, z) > 4.0 * r) eligible.push_back(z.value());

  std::vector<BasisElement> elements;
  const auto add_regular = [&](Complex c) {
    if (elements.size() >= count_cap) {
      throw CoverFailure("r-net at radius " + std::to_string(r) + " needs more than " + std::to_string(count_cap) +
                         " elements");
    }
    BasisElement e;
    e.center = c;
    e.radius = 2.0 * r;
    e.scale = scale;
    elements.push_back(e);
  };
  if (!eligible.empty()) {
    std::vector<double> gap(eligible.size(), std::numeric_limits<double>::infinity());
    std::size_t next = 0;
    while (true) {
      add_regular(eligible[next]);
      for (std::size_t i = 0; i < eligible.size(); ++i)
        gap[i] = std::min(gap[i], std::abs(eligible[i] - eligible[next]));
      next = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
      if (gap[next] <= r) break;
    }
  }

  std::vector<Complex> branch_points;
  for (const auto& c : branch) {
    const Complex cp = c.point.value();
    branch_points.push_back(cp);
    const int e = c.index;
    const double period = kTwoPi / e;
    const double half = 0.5 * (period - kSectorGap);

    std::vector<Complex> nearby;
    for (const auto& z : finite) {
      const double d = std::abs(z.value() - cp);
      if (d > 0.0 && d <= 5.0 * r) nearby.push_back(z.value() - cp);
    }
    double dmin = r;
    for (const auto& d : nearby) dmin = std::min(dmin, std::abs(d));

    double theta0 = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < 360 && !nearby.empty(); ++g) {
      const double t = period * g / 360.0;
      double score = std::numeric_limits<double>::infinity();
      for (const auto& d : nearby) {
        double phi = std::fmod(std::arg(d) - t, period);
        if (phi < 0.0) phi += period;
        score = std::min(score, half - std::min(phi, period - phi));
      }
      if (score > best) {
        best = score;
        theta0 = t;
      }
    }

    int layers = 1;
    while (layers < 60 && 0.25 * 4.0 * r * std::ldexp(1.0, -(layers - 1)) >= dmin) ++layers;
    for (int l = 0; l < layers; ++l) {
      const double rho = 4.0 * r * std::ldexp(1.0, -l);
      for (int j = 0; j < e; ++j) {
        if (elements.size() >= count_cap) {
          throw CoverFailure("branch sectors need more than " + std::to_string(count_cap) + " elements");
        }
        Sector s;
        s.branch_point = cp;
        s.index = e;
        s.layer = l;
        s.slot = j;
        s.angle = wrap_angle(theta0 + period * j);
        s.half_width = half;
        s.radial_center = 0.75 * rho;
        s.radial_half_width = 0.5 * rho;
        BasisElement el;
        el.center = cp;
        el.radius = 1.25 * rho;
        el.scale = scale;
        el.sector = s;
        elements.push_back(el);
      }
    }
  }

  auto basis = std::make_shared<const Basis>(std::move(elements), branch_points, r, map.degree());
  for (const auto& z : finite) {
    const bool covered = std::any_of(basis->elements().begin(), basis->elements().end(),
                                     [&](const BasisElement& e) { return e.raw(z) > 0.0; });
    if (!covered && distance_to(branch, z) > 5.0 * r) {
      throw CoverFailure("sample point " + to_string(z) + " is not covered at radius " + std::to_string(r));
    }
  }
  return basis;
}

std::size_t injectivity_violations(const RationalMap& map, const Basis& basis, std::span<const SpherePoint> sample) {
  std::size_t violations = 0;
  for (const auto& w : sample) {
    const auto fiber = solve_fiber(map, w);
    for (const auto& e : basis.elements()) {
      if (e.sector) continue;
      const auto inside = std::count_if(fiber.begin(), fiber.end(), [&](const FiberAtom& a) { return e.raw(a.point) > 0.0; });
      if (inside > 1) ++violations;
    }
  }
  return violations;
}

VanishingFunction VanishingFunction::zero() {
  VanishingFunction v{TestFunction::constant(0.0), {}, 0.0, {}};
  return v;
}

VanishingFunction VanishingFunction::bump(const Basis& basis, Complex center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("vanishing bump radius must be positive");
  VanishingFunction v{TestFunction::bump(center, radius), center, radius, {}};
  for (const auto& c : basis.branch_points()) {
    const double d = std::abs(c - center) - radius;
    if (!(d > 0.0)) throw ConfigError("vanishing bump meets the branch point " + to_string(SpherePoint(c)));
    v.branch_distances.push_back(d);
  }
  return v;
}

Reconstruction reconstruct(const RationalMap& map, const Basis& basis, const TestFunction& xi, std::size_t n_terms,
                           std::span<const SpherePoint> sample) {
  const std::size_t terms = std::min(n_terms, basis.size());
  const double n = map.degree();
  FiberCache cache;
  const kernels::PointFunction fn = [&](const SpherePoint& z) {
    if (terms == 0) return Complex{};
    const auto uz = basis.evaluate_all(z);
    const auto fiber = cache.get(map, evaluate(map, z));
    std::vector<Complex> inner(terms, Complex{});
    for (const auto& a : fiber->atoms) {
      const auto ua = basis.evaluate_all(a.point);
      const Complex x = xi(a.point);
      for (std::size_t i = 0; i < terms; ++i)
        if (ua[i] != 0.0) inner[i] += static_cast<double>(a.mult) * ua[i] * x;
    }
    Complex acc{};
    for (std::size_t i = 0; i < terms; ++i) acc += uz[i] * inner[i] / n;
    return acc;
  };
  Reconstruction out;
  out.values = kernels::evaluate_parallel(fn, sample);
  for (std::size_t i = 0; i < sample.size(); ++i)
    out.residual = std::max(out.residual, std::abs(out.values[i] - xi(sample[i])));
  return out;
}

}  // namespace lyubich
