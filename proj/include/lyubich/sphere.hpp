#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lyubich {

using Complex = std::complex<double>;

/// Radius (chordal metric) below which two points are treated as one atom.
inline constexpr double kClusterRadius = 1e-6;

/// A point of the Riemann sphere: either a finite complex number or infinity.
///
/// Finite values never hold NaN. Constructing from a value with an infinite
/// component yields the point at infinity; NaN input throws std::invalid_argument.
class SpherePoint {
 public:
  SpherePoint() = default;
  SpherePoint(Complex z);  // NOLINT(google-explicit-constructor)
  SpherePoint(double x) : SpherePoint(Complex(x, 0.0)) {}  // NOLINT

  static SpherePoint infinity();

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  /// The finite value; throws std::logic_error at infinity.
  Complex value() const;

  /// Position on the unit sphere under inverse stereographic projection.
  std::array<double, 3> on_sphere() const;

  friend bool operator==(const SpherePoint& a, const SpherePoint& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.z_ == b.z_);
  }

 private:
  Complex z_{0.0, 0.0};
  bool infinite_ = false;
};

/// Chordal distance 2|a-b| / sqrt((1+|a|^2)(1+|b|^2)); equals 2 between antipodes.
double chordal_distance(const SpherePoint& a, const SpherePoint& b);

/// |a-b| for finite points, +inf if exactly one is infinite, 0 if both are.
double plane_distance(const SpherePoint& a, const SpherePoint& b);

/// Lexicographic order by (re, im) with infinity last.
bool lex_less(const SpherePoint& a, const SpherePoint& b);

/// Single-linkage clustering at chordal radius `radius`.
/// Returns a label per input point; labels are numbered by first appearance.
std::vector<std::size_t> cluster_labels(std::span<const SpherePoint> points,
                                        double radius = kClusterRadius);

std::string to_string(const SpherePoint& p);

}  // namespace lyubich
