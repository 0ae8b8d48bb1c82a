#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "lyubich/preimage.hpp"
#include "lyubich/test_function.hpp"

namespace lyubich {

/// Deduplicated deep preimage atoms, sorted by lex_less.
struct JuliaSample {
  std::vector<SpherePoint> points;
  std::string method;
  std::uint64_t map_id = 0;
  int depth = 0;
};

/// Backward-orbit sample of the Julia set: a tree that branches fully until
/// it holds at least `size` distinct atoms, then follows one random branch
/// per node down to depth >= 10. At most `size` points are returned.
JuliaSample julia_sample(const RationalMap& map, std::size_t size, std::uint64_t seed,
                         std::size_t budget = kDefaultAtomBudget);

/// Largest r (found by bisection) such that every sample point farther than
/// 2r from all finite critical points has a fiber R^{-1}(R z) whose atoms are
/// pairwise more than 4r apart. Throws DegenerateSample for fewer than two points.
double branch_separation_radius(const RationalMap& map, const JuliaSample& sample);

inline constexpr double kSectorGap = 0.1;
inline constexpr int kBumpProfile = 2;

/// Angular sector around a branch point, used for elements that separate
/// the local branches of R there.
struct Sector {
  Complex branch_point;
  int index = 2;          // local degree at the branch point
  int layer = 0;
  int slot = 0;           // which of the `index` sectors
  double angle = 0.0;     // direction of the sector axis
  double half_width = 0.0;
  double radial_center = 0.0;
  double radial_half_width = 0.0;
};

/// One raw bump before normalization. Regular elements are (1-(d/radius)^2)_+^p
/// around `center`; sector elements are the product of a radial and an angular
/// profile of the same shape.
struct BasisElement {
  std::size_t index = 0;
  Complex center;
  double radius = 0.0;
  int profile = kBumpProfile;
  double scale = 1.0;  // sqrt(n)
  std::optional<Sector> sector;

  double raw(const SpherePoint& z) const;
  /// Closed support contains z.
  bool supports(const SpherePoint& z) const { return raw(z) > 0.0; }
};

/// Normalized basis u_i = scale * sqrt(b_i / sum_j b_j), so sum_i u_i^2 = n
/// wherever some bump is positive and 0 elsewhere.
class Basis {
 public:
  Basis(std::vector<BasisElement> elements, std::vector<Complex> branch_points, double r, int degree);

  std::size_t size() const { return elements_.size(); }
  const std::vector<BasisElement>& elements() const { return elements_; }
  const BasisElement& element(std::size_t i) const { return elements_.at(i); }
  /// Finite branch points that lie within r of the sample.
  const std::vector<Complex>& branch_points() const { return branch_points_; }
  double net_radius() const { return r_; }
  int degree() const { return degree_; }
  std::size_t regular_count() const;

  /// u_0(z), ..., u_{K-1}(z).
  std::vector<double> evaluate_all(const SpherePoint& z) const;
  double value(std::size_t i, const SpherePoint& z) const;
  /// u_i as an evaluable test function; keeps the basis alive.
  TestFunction as_function(std::size_t i) const;

  nlohmann::json to_json() const;

 private:
  std::vector<BasisElement> elements_;
  std::vector<Complex> branch_points_;
  double r_;
  int degree_;
};

/// Greedy farthest-point r-net of regular bumps of radius 2r, plus sector
/// elements around branch points of the sample. Regular elements come first,
/// then sector elements layer by layer toward the branch points. Throws
/// CoverFailure if more than `count_cap` elements are needed or a sample
/// point away from the branch points is left uncovered.
std::shared_ptr<const Basis> build_basis(const RationalMap& map, const JuliaSample& sample, double r,
                                         std::size_t count_cap = 256);

/// Number of (element, sample point w) pairs where a regular element's
/// support holds two distinct atoms of R^{-1}(w). Zero when R is injective on
/// every regular support.
std::size_t injectivity_violations(const RationalMap& map, const Basis& basis, std::span<const SpherePoint> sample);

/// A test function known to vanish near every branch point of the basis,
/// with the recorded distance from its support to each of them.
struct VanishingFunction {
  TestFunction fn;
  Complex center;
  double radius = 0.0;  // support is the closed disk; radius 0 means fn == 0
  std::vector<double> branch_distances;

  static VanishingFunction zero();
  /// Bump supported on the disk; throws ConfigError if the disk touches a branch point.
  static VanishingFunction bump(const Basis& basis, Complex center, double radius);
};

struct Reconstruction {
  std::vector<Complex> values;
  double residual = 0.0;
};

/// sum_{i<N} u_i (<u_i, xi> o R) on the sample and its sup-norm gap to xi.
Reconstruction reconstruct(const RationalMap& map, const Basis& basis, const TestFunction& xi, std::size_t n_terms,
                           std::span<const SpherePoint> sample);

}  // namespace lyubich
