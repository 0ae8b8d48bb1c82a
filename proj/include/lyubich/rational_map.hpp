#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lyubich/polynomial.hpp"
#include "lyubich/sphere.hpp"

namespace lyubich {

/// |z| above which evaluation switches to the chart w = 1/z.
inline constexpr double kChartSwitch = 1e8;
/// Relative tolerance on Taylor coefficients when counting local degree.
inline constexpr double kMultiplicityTol = 1e-7;
/// Relative tolerance for declaring a common root of numerator and denominator.
inline constexpr double kCoprimeTol = 1e-9;

/// A rational map R = P/Q of degree n = max(deg P, deg Q) >= 2 on the Riemann sphere.
/// Immutable; copies share the same id.
class RationalMap {
 public:
  /// Throws InvalidMap when the degree is below two, a coefficient list is
  /// zero, or P and Q share a root.
  RationalMap(std::vector<Complex> num, std::vector<Complex> den, std::string name = "custom");

  /// Built-in maps: "quad" (z^2), "basilica" (z^2-1), "chebyshev" (z^2-2).
  static RationalMap named(std::string_view name);

  int degree() const { return degree_; }
  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  const std::string& name() const { return name_; }
  std::uint64_t id() const { return id_; }
  bool is_polynomial() const { return den_.degree() == 0; }

  SpherePoint operator()(const SpherePoint& z) const;

  /// P - w Q for finite w, Q for w = infinity. Untrimmed.
  Polynomial fiber_polynomial(const SpherePoint& w) const;

  /// P'Q - PQ' with cancelled leading terms stripped; its roots are the
  /// finite critical points.
  const Polynomial& critical_polynomial() const { return crit_; }

  /// The same map precomposed with z -> 1/z; R at infinity is this chart at 0.
  RationalMap infinity_chart() const;

 private:
  RationalMap(Polynomial num, Polynomial den, std::string name, bool validate);

  Polynomial num_;
  Polynomial den_;
  Polynomial crit_;
  int degree_ = 0;
  std::string name_;
  std::uint64_t id_ = 0;
};

SpherePoint evaluate(const RationalMap& map, const SpherePoint& z);

namespace detail {
// Both charts exposed for cross-checking near the switch radius.
SpherePoint evaluate_direct(const RationalMap& map, Complex z);
SpherePoint evaluate_inverted(const RationalMap& map, Complex z);
}  // namespace detail

struct CriticalDatum {
  SpherePoint point;
  int index = 2;
};

/// Local degree of R at z (>= 1).
int branch_index(const RationalMap& map, const SpherePoint& z);

/// All points of local degree >= 2; sum of (index - 1) is exactly 2n - 2.
std::vector<CriticalDatum> critical_points(const RationalMap& map);

/// The set of points with finite backward orbit (at most two).
std::vector<SpherePoint> exceptional_points(const RationalMap& map);

struct FiberAtom {
  SpherePoint point;
  int mult = 1;
};

/// Solutions of R(z) = w clustered into distinct atoms; multiplicities sum
/// to the degree, counting a degree drop as an atom at infinity.
std::vector<FiberAtom> solve_fiber(const RationalMap& map, const SpherePoint& w);

bool is_exceptional(const RationalMap& map, const SpherePoint& w);

struct FixedPoint {
  SpherePoint point;
  /// R'(z); NaN for the fixed point at infinity.
  Complex multiplier;
};

std::vector<FixedPoint> fixed_points(const RationalMap& map);

/// Derivative of R at a finite point that is not a pole.
Complex derivative(const RationalMap& map, Complex z);

/// Parses "re,im" into a complex number; throws ConfigError.
Complex parse_complex(std::string_view text);

}  // namespace lyubich
