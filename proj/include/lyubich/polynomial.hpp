#pragma once

#include <span>
#include <vector>

#include "lyubich/sphere.hpp"

namespace lyubich {

/// Dense complex polynomial, coefficients in ascending degree.
/// Trailing exact zeros are stripped; the zero polynomial has no coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coeffs);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  std::span<const Complex> coeffs() const { return coeffs_; }
  Complex coeff(int k) const;
  Complex leading() const { return coeffs_.empty() ? Complex{} : coeffs_.back(); }

  Complex operator()(Complex z) const;
  Polynomial derivative() const;

  /// Taylor coefficient F^{(k)}(z)/k! together with the sum of the absolute
  /// values of its terms (a backward-error scale for deciding "zero").
  struct Taylor {
    Complex value;
    double scale;
  };
  Taylor taylor(int k, Complex z) const;

  /// sum |a_i| |z|^i
  double scale_at(Complex z) const;
  double max_abs_coeff() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Complex s, const Polynomial& a);

 private:
  std::vector<Complex> coeffs_;
};

/// A root with its multiplicity after clustering.
struct RootCluster {
  Complex point;
  int multiplicity = 1;
};

struct RootFinderOptions {
  int max_iterations = 200;
  double residual_tol = 1e-12;
  double cluster_radius = kClusterRadius;
  int polish_steps = 3;
  /// Clusters within this radius are merged when the Taylor test confirms a
  /// single root of the combined multiplicity (high-order roots scatter
  /// beyond cluster_radius in double precision).
  double merge_radius = 1e-3;
  double multiplicity_tol = 1e-7;
};

/// All roots (with repetition) of a polynomial of degree >= 1 with nonzero
/// leading coefficient. Simultaneous Aberth-Ehrlich iteration; falls back to
/// companion-matrix eigenvalues. Throws RootFindingFailure if neither converges.
std::vector<Complex> find_roots(const Polynomial& p, const RootFinderOptions& opt = {});

/// Merges roots closer than the clustering radius and polishes each cluster by
/// Newton steps on the derivative of order multiplicity-1. Nearby clusters
/// are merged further when they form one multiple root.
std::vector<RootCluster> cluster_roots(const Polynomial& p, std::span<const Complex> roots,
                                       const RootFinderOptions& opt = {});

/// find_roots followed by cluster_roots.
std::vector<RootCluster> solve(const Polynomial& p, const RootFinderOptions& opt = {});

}  // namespace lyubich
