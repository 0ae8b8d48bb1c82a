#include "lyubich/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lyubich::kernels {

namespace {

// Runs body(i) for i in [0, n) on the OpenMP team; the first exception is
// rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<TreeAtom> expand_node(const RationalMap& map, const TreeAtom& parent, std::size_t parent_index,
                                  const ExpandOptions& opt) {
  const WeightedPreimage fiber = preimages(map, parent.point);
  std::vector<FiberAtom> kept = fiber.atoms;

  if (opt.branches > 0 && static_cast<std::size_t>(opt.branches) < kept.size()) {
    std::mt19937_64 rng(splitmix(opt.seed ^ splitmix(static_cast<std::uint64_t>(opt.level) << 32 ^ parent_index)));
    std::vector<FiberAtom> pool = kept;
    kept.clear();
    for (int b = 0; b < opt.branches; ++b) {
      std::int64_t total = 0;
      for (const auto& a : pool) total += a.mult;
      std::uniform_int_distribution<std::int64_t> pick(0, total - 1);
      std::int64_t ticket = pick(rng);
      auto it = pool.begin();
      while (ticket >= it->mult) {
        ticket -= it->mult;
        ++it;
      }
      kept.push_back(*it);
      pool.erase(it);
    }
  }

  std::int64_t kept_total = 0;
  for (const auto& a : kept) kept_total += a.mult;
  std::vector<TreeAtom> children;
  children.reserve(kept.size());
  for (const auto& a : kept) {
    children.push_back({a.point, parent.mult * a.mult, static_cast<std::int64_t>(parent_index),
                        parent.weight * Rational(a.mult, kept_total)});
  }
  return children;
}

std::vector<TreeAtom> flatten_sorted(std::vector<std::vector<TreeAtom>>& per_parent) {
  std::size_t total = 0;
  for (const auto& c : per_parent) total += c.size();
  std::vector<TreeAtom> out;
  out.reserve(total);
  for (auto& c : per_parent) std::move(c.begin(), c.end(), std::back_inserter(out));
  std::sort(out.begin(), out.end(), [](const TreeAtom& a, const TreeAtom& b) {
    if (lex_less(a.point, b.point)) return true;
    if (lex_less(b.point, a.point)) return false;
    return a.parent < b.parent;
  });
  return out;
}

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

void check_sizes(std::span<const Complex> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw std::invalid_argument("weighted_sum: size mismatch");
}

}  // namespace

std::vector<TreeAtom> expand_level_serial(const RationalMap& map, std::span<const TreeAtom> parents,
                                          const ExpandOptions& opt) {
  std::vector<std::vector<TreeAtom>> per_parent(parents.size());
  for (std::size_t i = 0; i < parents.size(); ++i) per_parent[i] = expand_node(map, parents[i], i, opt);
  return flatten_sorted(per_parent);
}

std::vector<TreeAtom> expand_level_parallel(const RationalMap& map, std::span<const TreeAtom> parents,
                                            const ExpandOptions& opt) {
  std::vector<std::vector<TreeAtom>> per_parent(parents.size());
  parallel_for(parents.size(), [&](std::size_t i) { per_parent[i] = expand_node(map, parents[i], i, opt); });
  return flatten_sorted(per_parent);
}

std::vector<Complex> evaluate_serial(const PointFunction& f, std::span<const SpherePoint> points) {
  std::vector<Complex> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = f(points[i]);
  return out;
}

std::vector<Complex> evaluate_parallel(const PointFunction& f, std::span<const SpherePoint> points) {
  std::vector<Complex> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = f(points[i]); });
  return out;
}

std::vector<SpherePoint> map_points_serial(const RationalMap& map, std::span<const SpherePoint> points) {
  std::vector<SpherePoint> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = evaluate(map, points[i]);
  return out;
}

std::vector<SpherePoint> map_points_parallel(const RationalMap& map, std::span<const SpherePoint> points) {
  std::vector<SpherePoint> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = evaluate(map, points[i]); });
  return out;
}

Complex weighted_sum_serial(std::span<const Complex> values, std::span<const double> weights) {
  check_sizes(values, weights);
  Neumaier re;
  Neumaier im;
  for (std::size_t i = 0; i < values.size(); ++i) {
    re.add(values[i].real() * weights[i]);
    im.add(values[i].imag() * weights[i]);
  }
  return {re.value(), im.value()};
}

Complex weighted_sum_parallel(std::span<const Complex> values, std::span<const double> weights) {
  check_sizes(values, weights);
  const std::size_t blocks = (values.size() + kSumBlock - 1) / kSumBlock;
  std::vector<Complex> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t lo = b * kSumBlock;
    const std::size_t hi = std::min(values.size(), lo + kSumBlock);
    partial[b] = weighted_sum_serial(values.subspan(lo, hi - lo), weights.subspan(lo, hi - lo));
  });
  Neumaier re;
  Neumaier im;
  for (const auto& p : partial) {
    re.add(p.real());
    im.add(p.imag());
  }
  return {re.value(), im.value()};
}

}  // namespace lyubich::kernels
