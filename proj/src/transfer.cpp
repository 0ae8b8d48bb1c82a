#include "lyubich/transfer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "lyubich/kernels.hpp"

namespace lyubich {

FiberCache::FiberCache(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

std::size_t FiberCache::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<std::uint64_t>{}(k.map_id);
  auto mix = [&h](std::uint64_t v) { h ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(k.infinite ? 1 : 0);
  mix(std::bit_cast<std::uint64_t>(k.re));
  mix(std::bit_cast<std::uint64_t>(k.im));
  return h;
}

std::shared_ptr<const WeightedPreimage> FiberCache::get(const RationalMap& map, const SpherePoint& w) {
  const Key key{map.id(), w.is_infinite(), w.is_infinite() ? 0.0 : w.value().real(),
                w.is_infinite() ? 0.0 : w.value().imag()};
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      recency_.splice(recency_.begin(), recency_, it->second.second);
      ++hits_;
      return it->second.first;
    }
    ++misses_;
  }
  // Solve outside the lock; a concurrent duplicate solve yields the same fiber.
  auto fiber = std::make_shared<const WeightedPreimage>(preimages(map, w));
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second.first;
  recency_.push_front(key);
  entries_.emplace(key, Entry{fiber, recency_.begin()});
  while (entries_.size() > capacity_) {
    entries_.erase(recency_.back());
    recency_.pop_back();
  }
  return fiber;
}

std::size_t FiberCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

std::size_t FiberCache::hits() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return hits_;
}

std::size_t FiberCache::misses() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return misses_;
}

namespace {

Complex average_over_fiber(const WeightedPreimage& fiber, int degree, const auto& value_at) {
  Complex acc{};
  for (const auto& atom : fiber.atoms) acc += static_cast<double>(atom.mult) * value_at(atom.point);
  return acc / static_cast<double>(degree);
}

}  // namespace

TransferOperator::TransferOperator(RationalMap map, std::size_t cache_capacity)
    : map_(std::move(map)), cache_(std::make_shared<FiberCache>(cache_capacity)) {}

Complex TransferOperator::apply(const TestFunction& a, const SpherePoint& w) const {
  const auto fiber = cache_->get(map_, w);
  return average_over_fiber(*fiber, map_.degree(), a);
}

Complex TransferOperator::power(const TestFunction& a, int m, const SpherePoint& w) const {
  if (m < 0) throw std::invalid_argument("transfer power must be nonnegative");
  if (m == 0) return a(w);
  const auto fiber = cache_->get(map_, w);
  return average_over_fiber(*fiber, map_.degree(),
                            [&](const SpherePoint& z) { return power(a, m - 1, z); });
}

TestFunction TransferOperator::image(const TestFunction& a) const {
  const TransferOperator self = *this;
  return TestFunction::analytic("L(" + a.name() + ")", [self, a](const SpherePoint& w) { return self.apply(a, w); });
}

TestFunction TransferOperator::inner_product(const TestFunction& xi, const TestFunction& eta) const {
  const TransferOperator self = *this;
  const TestFunction integrand = xi.conj() * eta;
  return TestFunction::analytic("<" + xi.name() + "," + eta.name() + ">",
                                [self, integrand](const SpherePoint& w) { return self.apply(integrand, w); });
}

Complex apply_transfer(const RationalMap& map, const TestFunction& a, const SpherePoint& w) {
  return average_over_fiber(preimages(map, w), map.degree(), a);
}

Complex transfer_power(const RationalMap& map, const TestFunction& a, int m, const SpherePoint& w) {
  return TransferOperator(map).power(a, m, w);
}

TestFunction inner_product(const RationalMap& map, const TestFunction& xi, const TestFunction& eta) {
  return TransferOperator(map).inner_product(xi, eta);
}

double sup_norm_2(const RationalMap& map, const TestFunction& xi, std::span<const SpherePoint> sample) {
  if (sample.empty()) throw std::invalid_argument("sup_norm_2 needs a nonempty sample");
  const TestFunction norm2 = inner_product(map, xi, xi);
  const auto values = kernels::evaluate_parallel([&](const SpherePoint& w) { return norm2(w); }, sample);
  double best = 0.0;
  for (const auto& v : values) best = std::max(best, std::sqrt(std::max(v.real(), 0.0)));
  return best;
}

TransferResult transfer_table(const RationalMap& map, const TestFunction& a, std::span<const SpherePoint> points) {
  const TransferOperator op(map);
  TransferResult out{a.name(), {points.begin(), points.end()}, {}};
  out.values = kernels::evaluate_parallel([&](const SpherePoint& w) { return op.apply(a, w); }, points);
  return out;
}

}  // namespace lyubich
