#pragma once

// Data-parallel inner loops. Every kernel has a serial reference version with
// the same contract; tests compare the two and bench/ times them.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lyubich/preimage.hpp"

namespace lyubich::kernels {

struct ExpandOptions {
  int branches = 0;  // 0 keeps every child
  std::uint64_t seed = 0;
  int level = 0;  // level of the parents, mixed into the per-node seed
};

/// Children of every parent, sorted by lex_less with ties broken by parent index.
std::vector<TreeAtom> expand_level_serial(const RationalMap& map, std::span<const TreeAtom> parents,
                                          const ExpandOptions& opt);
std::vector<TreeAtom> expand_level_parallel(const RationalMap& map, std::span<const TreeAtom> parents,
                                            const ExpandOptions& opt);

using PointFunction = std::function<Complex(const SpherePoint&)>;

std::vector<Complex> evaluate_serial(const PointFunction& f, std::span<const SpherePoint> points);
std::vector<Complex> evaluate_parallel(const PointFunction& f, std::span<const SpherePoint> points);

std::vector<SpherePoint> map_points_serial(const RationalMap& map, std::span<const SpherePoint> points);
std::vector<SpherePoint> map_points_parallel(const RationalMap& map, std::span<const SpherePoint> points);

/// sum v_i w_i with Neumaier compensation. The parallel version sums fixed
/// blocks and combines them in order, so its result is independent of the
/// thread count.
Complex weighted_sum_serial(std::span<const Complex> values, std::span<const double> weights);
Complex weighted_sum_parallel(std::span<const Complex> values, std::span<const double> weights);

inline constexpr std::size_t kSumBlock = 2048;

}  // namespace lyubich::kernels
