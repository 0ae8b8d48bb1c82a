#include "lyubich/operator_lab.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "lyubich/errors.hpp"

namespace lyubich {

namespace {

Eigen::MatrixXd sibling_gram(const OperatorModel& model, const Basis& basis, std::size_t n_terms, int k) {
  // Symmetric form W^{1/2} T_N W^{-1/2} of the frame operator on H_k.
  const LevelSpace& lv = model.level(k);
  const LevelSpace& up = model.level(k - 1);
  const auto dim = static_cast<Eigen::Index>(lv.dim());
  const std::size_t terms = std::min(n_terms, basis.size());
  Eigen::MatrixXd u(dim, static_cast<Eigen::Index>(terms));
  for (Eigen::Index z = 0; z < dim; ++z) {
    const auto vals = basis.evaluate_all(lv.points[static_cast<std::size_t>(z)]);
    for (std::size_t i = 0; i < terms; ++i) u(z, static_cast<Eigen::Index>(i)) = vals[i];
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index z = 0; z < dim; ++z) {
    const auto pz = lv.parent[static_cast<std::size_t>(z)];
    for (Eigen::Index y = 0; y < dim; ++y) {
      if (lv.parent[static_cast<std::size_t>(y)] != pz) continue;
      const double wy = up.weights(pz);
      t(z, y) = std::sqrt(lv.weights(z) * lv.weights(y)) / wy * u.row(z).dot(u.row(y));
    }
  }
  return t;
}

void check_level(const OperatorModel& model, int k) {
  if (k < 1 || k > model.depth()) {
    throw std::invalid_argument("level " + std::to_string(k) + " outside 1.." + std::to_string(model.depth()));
  }
}

}  // namespace

LeveledOperator operator*(const LeveledOperator& a, const LeveledOperator& b) {
  if (a.from != b.to) throw std::invalid_argument("operator levels do not chain");
  return {LeveledOperator::Kind::composite, b.from, a.to, a.matrix * b.matrix};
}

OperatorModel OperatorModel::build(const RationalMap& map, const SpherePoint& w, int depth, std::size_t budget) {
  const auto tree = iterated_preimages(map, w, depth, budget);
  OperatorModel model;
  model.map_ = std::make_shared<const RationalMap>(map);
  model.root_ = w;
  model.transfer_ = std::make_shared<TransferOperator>(map);
  for (int k = 0; k <= depth; ++k) {
    const auto& atoms = tree.level(k);
    if (atoms.size() > kDimensionCap) {
      throw BudgetExceeded("level " + std::to_string(k) + " has " + std::to_string(atoms.size()) +
                           " atoms, above the dimension cap");
    }
    LevelSpace lv;
    lv.weights.resize(static_cast<Eigen::Index>(atoms.size()));
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto& a = atoms[i];
      lv.points.push_back(a.point);
      lv.exact_weights.push_back(a.weight);
      lv.weights(static_cast<Eigen::Index>(i)) = a.weight.to_double();
      lv.parent.push_back(a.parent);
      lv.local_degree.push_back(k == 0 ? 1 : a.mult / tree.level(k - 1)[static_cast<std::size_t>(a.parent)].mult);
    }
    model.levels_.push_back(std::move(lv));
  }
  return model;
}

Eigen::VectorXcd OperatorModel::sample(const TestFunction& f, int k) const {
  const LevelSpace& lv = level(k);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(lv.dim()));
  for (std::size_t i = 0; i < lv.dim(); ++i) v(static_cast<Eigen::Index>(i)) = f(lv.points[i]);
  return v;
}

Complex OperatorModel::inner(int k, const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) const {
  const LevelSpace& lv = level(k);
  Complex acc{};
  for (Eigen::Index i = 0; i < f.size(); ++i) acc += f(i) * std::conj(g(i)) * lv.weights(i);
  return acc;
}

LeveledOperator OperatorModel::multiplication(const TestFunction& a, int k) const {
  return {LeveledOperator::Kind::multiplication, k, k, sample(a, k).asDiagonal().toDenseMatrix()};
}

LeveledOperator OperatorModel::composition(int k) const {
  check_level(*this, k);
  const LevelSpace& lv = level(k);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(lv.dim()), static_cast<Eigen::Index>(dim(k - 1)));
  for (std::size_t z = 0; z < lv.dim(); ++z) c(static_cast<Eigen::Index>(z), lv.parent[z]) = 1.0;
  return {LeveledOperator::Kind::composition, k - 1, k, std::move(c)};
}

LeveledOperator OperatorModel::adjoint_composition(int k) const {
  const LeveledOperator c = composition(k);
  const Eigen::VectorXd inv = level(k - 1).weights.cwiseInverse();
  Eigen::MatrixXcd a = inv.asDiagonal() * c.matrix.transpose() * level(k).weights.asDiagonal();
  return {LeveledOperator::Kind::adjoint_composition, k, k - 1, std::move(a)};
}

double weighted_norm(const Eigen::MatrixXcd& a, const Eigen::VectorXd& to_weights, const Eigen::VectorXd& from_weights) {
  if (a.size() == 0) return 0.0;
  const Eigen::MatrixXcd b =
      to_weights.cwiseSqrt().asDiagonal() * a * from_weights.cwiseSqrt().cwiseInverse().asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(b);
  if (svd.info() != Eigen::Success) throw EigSolverFailure("singular value decomposition did not converge");
  return svd.singularValues()(0);
}

double verify_isometry(const OperatorModel& model, const TestFunction& f, int k) {
  const auto c = model.composition(k);
  const Eigen::VectorXcd fv = model.sample(f, k - 1);
  const Eigen::VectorXcd cf = c.matrix * fv;
  return std::abs(model.inner(k, cf, cf).real() - model.inner(k - 1, fv, fv).real());
}

double verify_adjoint(const OperatorModel& model, const TestFunction& f, const TestFunction& g, int k) {
  const auto c = model.composition(k);
  const auto cs = model.adjoint_composition(k);
  const Eigen::VectorXcd fv = model.sample(f, k - 1);
  const Eigen::VectorXcd gv = model.sample(g, k);
  const Eigen::VectorXcd cf = c.matrix * fv;
  const Eigen::VectorXcd csg = cs.matrix * gv;
  return std::abs(model.inner(k, cf, gv) - model.inner(k - 1, fv, csg));
}

double verify_coisometry(const OperatorModel& model, int k) {
  const auto p = model.adjoint_composition(k) * model.composition(k);
  const auto n = p.matrix.rows();
  return (p.matrix - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double verify_projection(const OperatorModel& model, int k) {
  const auto p = model.composition(k) * model.adjoint_composition(k);
  return (p.matrix * p.matrix - p.matrix).cwiseAbs().maxCoeff();
}

double verify_adjoint_transfer(const OperatorModel& model, const TestFunction& f, int k) {
  const auto cs = model.adjoint_composition(k);
  const Eigen::VectorXcd csf = cs.matrix * model.sample(f, k);
  const LevelSpace& up = model.level(k - 1);
  double worst = 0.0;
  for (std::size_t y = 0; y < up.dim(); ++y)
    worst = std::max(worst, std::abs(csf(static_cast<Eigen::Index>(y)) - model.transfer().apply(f, up.points[y])));
  return worst;
}

double verify_covariance(const OperatorModel& model, const TestFunction& a, const TestFunction& f,
                         const TestFunction& g, int k) {
  const auto c = model.composition(k);
  const Eigen::VectorXcd fv = model.sample(f, k - 1);
  const Eigen::VectorXcd gv = model.sample(g, k - 1);
  const Eigen::VectorXcd lhs_vec = model.sample(a, k).cwiseProduct(c.matrix * fv);
  const Complex lhs = model.inner(k, lhs_vec, c.matrix * gv);
  const Eigen::VectorXcd la = model.sample(model.transfer().image(a), k - 1);
  const Complex rhs = model.inner(k - 1, la.cwiseProduct(fv), gv);
  return std::abs(lhs - rhs);
}

RepresentationResidual verify_representation(const OperatorModel& model, const TestFunction& xi,
                                             const TestFunction& eta, const TestFunction& a, int k) {
  const auto c = model.composition(k);
  const auto ma = model.multiplication(a, k);
  const auto v_xi = model.multiplication(xi, k) * c;
  const auto v_axi = model.multiplication(a * xi, k) * c;
  RepresentationResidual out;
  out.module = ((ma * v_xi).matrix - v_axi.matrix).cwiseAbs().maxCoeff();

  const auto v_eta = model.multiplication(eta, k) * c;
  const auto cs = model.adjoint_composition(k);
  const Eigen::MatrixXcd v_xi_star =
      cs.matrix * model.sample(xi, k).conjugate().asDiagonal();  // (M_xi C)^* = C^* M_{conj xi}
  const Eigen::MatrixXcd lhs = v_xi_star * v_eta.matrix;
  const Eigen::VectorXcd ip = model.sample(model.transfer().inner_product(xi, eta), k - 1);
  const Eigen::MatrixXcd gap = lhs - Eigen::MatrixXcd(ip.asDiagonal());
  out.inner_product = weighted_norm(gap, model.level(k - 1).weights, model.level(k - 1).weights);
  return out;
}

double verify_key_lemma(const OperatorModel& model, const Basis& basis, std::size_t n_terms, const TestFunction& a,
                        int k) {
  check_level(model, k);
  const std::size_t terms = std::min(n_terms, basis.size());
  if (terms == 0) return 0.0;
  const LevelSpace& lv = model.level(k);
  const auto dim = static_cast<Eigen::Index>(lv.dim());

  // Path A: matrices on the tree.
  const Eigen::MatrixXcd p = (model.composition(k) * model.adjoint_composition(k)).matrix;
  const Eigen::VectorXcd av = model.sample(a, k);
  Eigen::VectorXcd path_a = Eigen::VectorXcd::Zero(dim);
  std::vector<std::vector<double>> u(lv.dim());
  for (std::size_t z = 0; z < lv.dim(); ++z) u[z] = basis.evaluate_all(lv.points[z]);
  for (std::size_t i = 0; i < terms; ++i) {
    Eigen::VectorXd ui(dim);
    for (Eigen::Index z = 0; z < dim; ++z) ui(z) = u[static_cast<std::size_t>(z)][i];
    path_a += ui.asDiagonal() * (p * (ui.asDiagonal() * av));
  }

  // Path B: u_i(z) <u_i, a>(R z) from freshly solved fibers.
  const RationalMap& map = model.map();
  const double n = map.degree();
  double worst = 0.0;
  for (std::size_t z = 0; z < lv.dim(); ++z) {
    const auto fiber = preimages(map, evaluate(map, lv.points[z]));
    std::vector<Complex> inner(terms, Complex{});
    for (const auto& atom : fiber.atoms) {
      const auto ua = basis.evaluate_all(atom.point);
      const Complex av_atom = a(atom.point);
      for (std::size_t i = 0; i < terms; ++i) inner[i] += static_cast<double>(atom.mult) * ua[i] * av_atom / n;
    }
    Complex path_b{};
    for (std::size_t i = 0; i < terms; ++i) path_b += u[z][i] * inner[i];
    worst = std::max(worst, std::abs(path_a(static_cast<Eigen::Index>(z)) - path_b));
  }
  return worst;
}

FrameBound verify_frame_bound(const OperatorModel& model, const Basis& basis, std::size_t n_terms, int k) {
  check_level(model, k);
  if (std::min(n_terms, basis.size()) == 0) return {};
  const Eigen::MatrixXd t = sibling_gram(model, basis, n_terms, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw EigSolverFailure("frame operator eigensolve did not converge");
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

VanishingResult verify_vanishing_reconstruction(const OperatorModel& model, const Basis& basis,
                                                const VanishingFunction& a, int k) {
  check_level(model, k);
  const LevelSpace& lv = model.level(k);
  const Eigen::VectorXcd av = model.sample(a.fn, k);
  VanishingResult out;
  for (std::size_t z = 0; z < lv.dim(); ++z) {
    if (av(static_cast<Eigen::Index>(z)) == Complex{}) continue;
    const auto u = basis.evaluate_all(lv.points[z]);
    for (std::size_t i = u.size(); i > out.terms; --i)
      if (u[i - 1] != 0.0) {
        out.terms = i;
        break;
      }
  }
  if (out.terms == 0) return out;
  if (out.terms == basis.size() && basis.element(out.terms - 1).sector) {
    throw NoVanishingTail("the function meets the innermost branch-sector element");
  }
  const auto dim = static_cast<Eigen::Index>(lv.dim());
  const Eigen::MatrixXd t = sibling_gram(model, basis, out.terms, k);
  const Eigen::MatrixXcd gap = av.asDiagonal() * (t - Eigen::MatrixXd::Identity(dim, dim)).cast<Complex>();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(gap);
  if (svd.info() != Eigen::Success) throw EigSolverFailure("singular value decomposition did not converge");
  out.residual = svd.singularValues()(0);
  return out;
}

nlohmann::json to_json(const VerificationRecord& r) {
  nlohmann::json j{{"identity", r.identity}, {"map", r.map}, {"w", r.w}, {"m", r.m}, {"k", r.k}};
  if (r.n_terms) j["N"] = *r.n_terms;
  j["residual"] = r.residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  return j;
}

}  // namespace lyubich
