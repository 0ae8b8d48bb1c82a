#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyubich/basis.hpp"
#include "lyubich/preimage.hpp"
#include "lyubich/transfer.hpp"

namespace lyubich {

inline constexpr std::size_t kDimensionCap = 4096;

/// Atoms of one tree level with the weights of mu_k^w.
struct LevelSpace {
  std::vector<SpherePoint> points;
  std::vector<Rational> exact_weights;
  Eigen::VectorXd weights;
  std::vector<std::int64_t> parent;  // index into level k-1
  std::vector<std::int64_t> local_degree;  // e_R at the atom

  std::size_t dim() const { return points.size(); }
};

struct LeveledOperator {
  enum class Kind { multiplication, composition, adjoint_composition, composite };
  Kind kind = Kind::composite;
  int from = 0;
  int to = 0;
  Eigen::MatrixXcd matrix;
};

/// Product A * B; throws std::invalid_argument if the levels do not chain.
LeveledOperator operator*(const LeveledOperator& a, const LeveledOperator& b);

/// The tower H_0, ..., H_m of weighted atom spaces of a full preimage tree.
/// Immutable after construction.
class OperatorModel {
 public:
  /// Throws ExceptionalRoot / BudgetExceeded, and BudgetExceeded when a level
  /// exceeds kDimensionCap atoms.
  static OperatorModel build(const RationalMap& map, const SpherePoint& w, int depth,
                             std::size_t budget = kDefaultAtomBudget);

  const RationalMap& map() const { return *map_; }
  const SpherePoint& root() const { return root_; }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  const LevelSpace& level(int k) const { return levels_.at(static_cast<std::size_t>(k)); }
  std::size_t dim(int k) const { return level(k).dim(); }
  const TransferOperator& transfer() const { return *transfer_; }

  /// f on the atoms of level k.
  Eigen::VectorXcd sample(const TestFunction& f, int k) const;
  /// sum f(z) conj(g(z)) weight(z) on H_k.
  Complex inner(int k, const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) const;

  LeveledOperator multiplication(const TestFunction& a, int k) const;
  /// C_R : H_{k-1} -> H_k, (Cf)(z) = f(R z).
  LeveledOperator composition(int k) const;
  /// C_R^* : H_k -> H_{k-1}, adjoint for the weighted inner products.
  LeveledOperator adjoint_composition(int k) const;

 private:
  std::shared_ptr<const RationalMap> map_;
  SpherePoint root_;
  std::vector<LevelSpace> levels_;
  std::shared_ptr<TransferOperator> transfer_;
};

/// Operator norm of A : H_from -> H_to for the weighted inner products.
double weighted_norm(const Eigen::MatrixXcd& a, const Eigen::VectorXd& to_weights, const Eigen::VectorXd& from_weights);

double verify_isometry(const OperatorModel& model, const TestFunction& f, int k);
/// |<Cf, g>_k - <f, C^* g>_{k-1}|
double verify_adjoint(const OperatorModel& model, const TestFunction& f, const TestFunction& g, int k);
/// max entry of |C^* C - I| on H_{k-1}.
double verify_coisometry(const OperatorModel& model, int k);
/// max entry of |P^2 - P| for P = C C^* on H_k.
double verify_projection(const OperatorModel& model, int k);
/// max over level k-1 atoms of |(C^* f)(y) - L_R(f)(y)|.
double verify_adjoint_transfer(const OperatorModel& model, const TestFunction& f, int k);
double verify_covariance(const OperatorModel& model, const TestFunction& a, const TestFunction& f,
                         const TestFunction& g, int k);

struct RepresentationResidual {
  double module = 0.0;       // rho(a) V_xi vs V_{a xi}
  double inner_product = 0.0;  // V_xi^* V_eta vs rho(<xi, eta>)
};
RepresentationResidual verify_representation(const OperatorModel& model, const TestFunction& xi,
                                             const TestFunction& eta, const TestFunction& a, int k);

/// sup over level-k atoms of the gap between sum_{i<N} M_{u_i} C C^* M_{u_i}^* a
/// computed with matrices and sum_{i<N} u_i (<u_i, a> o R) computed from fibers.
double verify_key_lemma(const OperatorModel& model, const Basis& basis, std::size_t n_terms, const TestFunction& a,
                        int k);

struct FrameBound {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};
/// Extreme eigenvalues of T_N = sum_{i<N} M_{u_i} C C^* M_{u_i}^* on H_k.
/// Throws EigSolverFailure.
FrameBound verify_frame_bound(const OperatorModel& model, const Basis& basis, std::size_t n_terms, int k);

struct VanishingResult {
  std::size_t terms = 0;  // M
  double residual = 0.0;
};
/// M = one past the last element meeting a on the level-k atoms, and
/// ||M_a (T_M - I)|| on H_k. Throws NoVanishingTail when a meets the last
/// branch-sector element.
VanishingResult verify_vanishing_reconstruction(const OperatorModel& model, const Basis& basis,
                                                const VanishingFunction& a, int k);

struct VerificationRecord {
  std::string identity;
  std::string map;
  std::string w;
  int m = 0;
  int k = 0;
  std::optional<std::size_t> n_terms;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};
nlohmann::json to_json(const VerificationRecord& r);

}  // namespace lyubich
