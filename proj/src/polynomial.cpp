#include "lyubich/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "lyubich/errors.hpp"

namespace lyubich {

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == Complex{}) coeffs_.pop_back();
}

Complex Polynomial::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(coeffs_.size())) return {};
  return coeffs_[static_cast<std::size_t>(k)];
}

Complex Polynomial::operator()(Complex z) const {
  Complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Complex> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs_[i];
  return Polynomial(std::move(d));
}

Polynomial::Taylor Polynomial::taylor(int k, Complex z) const {
  // sum_i a_i C(i,k) z^(i-k)
  Taylor t{{}, 0.0};
  const double az = std::abs(z);
  for (int i = static_cast<int>(coeffs_.size()) - 1; i >= k; --i) {
    double binom = 1.0;
    for (int j = 1; j <= k; ++j) binom = binom * (i - k + j) / j;
    t.value = t.value * z + binom * coeffs_[static_cast<std::size_t>(i)];
    t.scale = t.scale * az + binom * std::abs(coeffs_[static_cast<std::size_t>(i)]);
  }
  return t;
}

double Polynomial::scale_at(Complex z) const {
  const double az = std::abs(z);
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * az + std::abs(*it);
  return acc;
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) - b.coeff(static_cast<int>(i));
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(Complex s, const Polynomial& a) {
  std::vector<Complex> c(a.coeffs_);
  for (auto& x : c) x *= s;
  return Polynomial(std::move(c));
}

namespace {

bool converged(const Polynomial& p, Complex z, double tol) {
  return std::abs(p(z)) <= tol * p.scale_at(z);
}

std::vector<Complex> initial_guesses(const Polynomial& p) {
  const int d = p.degree();
  const Complex lead = p.leading();
  const Complex center = -p.coeff(d - 1) / (static_cast<double>(d) * lead);
  // Fujiwara-style radius bound around the centroid of the roots.
  double radius = 0.0;
  for (int k = 0; k < d; ++k) {
    const double ratio = std::abs(p.coeff(k) / lead);
    if (ratio > 0.0) radius = std::max(radius, std::pow(ratio, 1.0 / (d - k)));
  }
  radius = std::max(radius, 1e-3) * 0.9 + std::abs(center) * 0.1;
  std::vector<Complex> z(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / d + 0.4;
    z[static_cast<std::size_t>(k)] = center + std::polar(radius, angle);
  }
  return z;
}

bool aberth(const Polynomial& p, std::vector<Complex>& z, const RootFinderOptions& opt) {
  const Polynomial dp = p.derivative();
  const std::size_t d = z.size();
  std::vector<bool> done(d, false);
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    bool all = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (done[i]) continue;
      if (converged(p, z[i], opt.residual_tol)) {
        done[i] = true;
        continue;
      }
      all = false;
      const Complex pv = p(z[i]);
      Complex dv = dp(z[i]);
      if (dv == Complex{}) dv = Complex(1e-300, 0.0);
      const Complex ratio = pv / dv;
      Complex repulsion{};
      for (std::size_t j = 0; j < d; ++j) {
        if (j == i) continue;
        const Complex diff = z[i] - z[j];
        if (diff != Complex{}) repulsion += 1.0 / diff;
      }
      const Complex denom = 1.0 - ratio * repulsion;
      const Complex step = denom == Complex{} ? ratio : ratio / denom;
      z[i] -= step;
      if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) return false;
    }
    if (all) return true;
  }
  return std::all_of(z.begin(), z.end(), [&](Complex r) { return converged(p, r, opt.residual_tol); });
}

std::vector<Complex> companion_roots(const Polynomial& p) {
  const int d = p.degree();
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -p.coeff(i) / p.leading();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw RootFindingFailure("companion eigensolve failed");
  std::vector<Complex> roots(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return roots;
}

}  // namespace

std::vector<Complex> find_roots(const Polynomial& p, const RootFinderOptions& opt) {
  const int d = p.degree();
  if (d < 1) throw RootFindingFailure("find_roots: degree < 1");
  if (d == 1) return {-p.coeff(0) / p.coeff(1)};

  std::vector<Complex> z = initial_guesses(p);
  if (aberth(p, z, opt)) return z;

  z = companion_roots(p);
  // Eigenvalues of the companion matrix are backward stable; refine with
  // Aberth once more from them and accept if the residual test passes.
  std::vector<Complex> refined = z;
  if (aberth(p, refined, opt)) return refined;
  for (const Complex& r : z) {
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()) || !converged(p, r, 1e-8)) {
      throw RootFindingFailure("root finder did not converge (degree " + std::to_string(d) + ")");
    }
  }
  return z;
}

namespace {

void polish(const Polynomial& p, RootCluster& c, int steps) {
  // A root of multiplicity k is a simple root of the (k-1)th derivative.
  Polynomial target = p;
  for (int k = 1; k < c.multiplicity; ++k) target = target.derivative();
  const Polynomial dtarget = target.derivative();
  double best = std::abs(target(c.point));
  for (int s = 0; s < steps && best > 0.0; ++s) {
    const Complex dv = dtarget(c.point);
    if (dv == Complex{}) break;
    const Complex next = c.point - target(c.point) / dv;
    const double res = std::abs(target(next));
    if (!(res < best)) break;
    best = res;
    c.point = next;
  }
}

std::vector<RootCluster> group(std::span<const Complex> points, std::span<const int> mults, double radius) {
  std::vector<SpherePoint> pts(points.begin(), points.end());
  const auto labels = cluster_labels(pts, radius);
  std::size_t count = 0;
  for (auto l : labels) count = std::max(count, l + 1);
  std::vector<RootCluster> out(count, RootCluster{{}, 0});
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[labels[i]].point += static_cast<double>(mults[i]) * points[i];
    out[labels[i]].multiplicity += mults[i];
  }
  for (auto& c : out) c.point /= static_cast<double>(c.multiplicity);
  return out;
}

bool is_multiple_root(const Polynomial& p, const RootCluster& c, double tol) {
  for (int j = 1; j < c.multiplicity; ++j) {
    const auto t = p.taylor(j, c.point);
    if (std::abs(t.value) > tol * t.scale) return false;
  }
  return true;
}

}  // namespace

std::vector<RootCluster> cluster_roots(const Polynomial& p, std::span<const Complex> roots,
                                       const RootFinderOptions& opt) {
  const std::vector<int> ones(roots.size(), 1);
  auto fine = group(roots, ones, opt.cluster_radius);
  for (auto& c : fine) polish(p, c, opt.polish_steps);
  if (fine.size() < 2) return fine;

  std::vector<Complex> centers;
  std::vector<int> mults;
  for (const auto& c : fine) {
    centers.push_back(c.point);
    mults.push_back(c.multiplicity);
  }
  std::vector<SpherePoint> pts(centers.begin(), centers.end());
  const auto labels = cluster_labels(pts, opt.merge_radius);
  auto coarse = group(centers, mults, opt.merge_radius);
  std::vector<RootCluster> out;
  for (std::size_t g = 0; g < coarse.size(); ++g) {
    std::size_t members = 0;
    for (auto l : labels) members += (l == g);
    RootCluster merged = coarse[g];
    polish(p, merged, opt.polish_steps);
    if (members > 1 && is_multiple_root(p, merged, opt.multiplicity_tol)) {
      out.push_back(merged);
      continue;
    }
    for (std::size_t i = 0; i < fine.size(); ++i)
      if (labels[i] == g) out.push_back(fine[i]);
  }
  return out;
}

std::vector<RootCluster> solve(const Polynomial& p, const RootFinderOptions& opt) {
  const auto roots = find_roots(p, opt);
  return cluster_roots(p, roots, opt);
}

}  // namespace lyubich
