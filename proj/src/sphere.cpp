#include "lyubich/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lyubich {

SpherePoint::SpherePoint(Complex z) {
  if (std::isnan(z.real()) || std::isnan(z.imag())) {
    throw std::invalid_argument("SpherePoint: NaN coordinate");
  }
  if (std::isinf(z.real()) || std::isinf(z.imag())) {
    infinite_ = true;
  } else {
    z_ = z;
  }
}

SpherePoint SpherePoint::infinity() {
  SpherePoint p;
  p.infinite_ = true;
  return p;
}

Complex SpherePoint::value() const {
  if (infinite_) throw std::logic_error("SpherePoint::value at infinity");
  return z_;
}

std::array<double, 3> SpherePoint::on_sphere() const {
  if (infinite_) return {0.0, 0.0, 1.0};
  const double r2 = std::norm(z_);
  const double d = 1.0 + r2;
  return {2.0 * z_.real() / d, 2.0 * z_.imag() / d, (r2 - 1.0) / d};
}

double chordal_distance(const SpherePoint& a, const SpherePoint& b) {
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite()) return 2.0 / std::sqrt(1.0 + std::norm(b.value()));
  if (b.is_infinite()) return 2.0 / std::sqrt(1.0 + std::norm(a.value()));
  const Complex za = a.value();
  const Complex zb = b.value();
  return 2.0 * std::abs(za - zb) /
         std::sqrt((1.0 + std::norm(za)) * (1.0 + std::norm(zb)));
}

double plane_distance(const SpherePoint& a, const SpherePoint& b) {
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite() || b.is_infinite()) return HUGE_VAL;
  return std::abs(a.value() - b.value());
}

bool lex_less(const SpherePoint& a, const SpherePoint& b) {
  if (a.is_infinite()) return false;
  if (b.is_infinite()) return true;
  const Complex za = a.value();
  const Complex zb = b.value();
  if (za.real() != zb.real()) return za.real() < zb.real();
  return za.imag() < zb.imag();
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<std::size_t> cluster_labels(std::span<const SpherePoint> points, double radius) {
  const std::size_t n = points.size();
  std::vector<std::array<double, 3>> xyz(n);
  for (std::size_t i = 0; i < n; ++i) xyz[i] = points[i].on_sphere();

  // Sweep along the first sphere coordinate; chordal distance is the
  // Euclidean distance on the sphere, so the window is exact.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xyz[a][0] < xyz[b][0] || (xyz[a][0] == xyz[b][0] && a < b);
  });

  DisjointSets sets(n);
  const double window = radius * (1.0 + 1e-12) + 1e-300;
  for (std::size_t oi = 0; oi < n; ++oi) {
    const std::size_t i = order[oi];
    for (std::size_t oj = oi; oj-- > 0;) {
      const std::size_t j = order[oj];
      if (xyz[i][0] - xyz[j][0] > window) break;
      if (chordal_distance(points[i], points[j]) < radius) sets.join(i, j);
    }
  }

  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> root_label(n, n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = sets.find(i);
    if (root_label[r] == n) root_label[r] = next++;
    labels[i] = root_label[r];
  }
  return labels;
}

std::string to_string(const SpherePoint& p) {
  if (p.is_infinite()) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << p.value().real() << ',' << p.value().imag();
  return os.str();
}

}  // namespace lyubich
