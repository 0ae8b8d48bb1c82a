#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>

#include "lyubich/preimage.hpp"
#include "lyubich/test_function.hpp"

namespace lyubich {

/// Thread-safe LRU memo of fibers keyed by (map id, w).
class FiberCache {
 public:
  explicit FiberCache(std::size_t capacity = std::size_t{1} << 16);

  std::shared_ptr<const WeightedPreimage> get(const RationalMap& map, const SpherePoint& w);

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  struct Key {
    std::uint64_t map_id;
    bool infinite;
    double re;
    double im;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  using Entry = std::pair<std::shared_ptr<const WeightedPreimage>, std::list<Key>::iterator>;

  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Key> recency_;
  std::unordered_map<Key, Entry, KeyHash> entries_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

/// L_R(a)(w) = (1/n) sum_{z in R^{-1}(w)} e_R(z) a(z), sharing a fiber cache.
class TransferOperator {
 public:
  explicit TransferOperator(RationalMap map, std::size_t cache_capacity = std::size_t{1} << 16);

  const RationalMap& map() const { return map_; }
  const FiberCache& cache() const { return *cache_; }

  Complex apply(const TestFunction& a, const SpherePoint& w) const;
  /// L_R^m(a)(w) by depth-first recursion over fibers.
  Complex power(const TestFunction& a, int m, const SpherePoint& w) const;
  /// L_R(a) as a lazily evaluated function.
  TestFunction image(const TestFunction& a) const;
  /// <xi, eta>(w) = L_R(conj(xi) eta)(w).
  TestFunction inner_product(const TestFunction& xi, const TestFunction& eta) const;

 private:
  RationalMap map_;
  std::shared_ptr<FiberCache> cache_;
};

Complex apply_transfer(const RationalMap& map, const TestFunction& a, const SpherePoint& w);
Complex transfer_power(const RationalMap& map, const TestFunction& a, int m, const SpherePoint& w);
TestFunction inner_product(const RationalMap& map, const TestFunction& xi, const TestFunction& eta);

/// max over the sample of sqrt(<xi, xi>(w)).
double sup_norm_2(const RationalMap& map, const TestFunction& xi, std::span<const SpherePoint> sample);

/// Values of L_R(a) on an evaluation set.
struct TransferResult {
  std::string base;
  std::vector<SpherePoint> points;
  std::vector<Complex> values;
};

TransferResult transfer_table(const RationalMap& map, const TestFunction& a, std::span<const SpherePoint> points);

}  // namespace lyubich
