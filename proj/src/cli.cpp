#include "lyubich/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "lyubich/basis.hpp"
#include "lyubich/errors.hpp"
#include "lyubich/measure.hpp"
#include "lyubich/operator_lab.hpp"
#include "lyubich/transfer.hpp"

namespace lyubich::cli {

namespace {

using nlohmann::json;

struct Settings {
  std::string command;
  std::string identity = "all";
  std::string map = "quad";
  std::vector<std::string> num;
  std::vector<std::string> den;
  std::string w;  // empty: default root
  int depth = 8;
  std::uint64_t seed = 7;
  std::size_t budget = kDefaultAtomBudget;
  std::string out;
  bool json = false;
  int branches = 0;
  std::size_t size = 1024;
  double r = 0.0;  // <= 0: min(0.1, branch separation radius)
  std::size_t count_cap = 256;
  std::vector<std::string> f;
  std::string roots;
  std::vector<int> depths;
  std::string points;
  std::string csv;
  int trials = 100;
  std::string bump;
};

const std::vector<std::string> kIdentities = {"invariance", "adjoint",        "isometry",   "covariance",
                                              "unitality",  "two_path",       "module",     "representation",
                                              "key_lemma",  "frame_bound",    "vanishing"};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) parts.push_back(cur);
  return parts;
}

std::string coefficient_token(const json& v) {
  if (v.is_number()) return std::to_string(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v[0].get<double>() << ',' << v[1].get<double>();
    return os.str();
  }
  throw ConfigError("coefficient must be a number, \"re,im\" or [re, im]");
}

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

void apply_config(Settings& s, const json& cfg) {
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : cfg.items()) {
    if (key == "command") s.command = get_as<std::string>(v, key);
    else if (key == "identity") s.identity = get_as<std::string>(v, key);
    else if (key == "map") s.map = get_as<std::string>(v, key);
    else if (key == "num" || key == "den") {
      if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
      auto& dst = key == "num" ? s.num : s.den;
      dst.clear();
      for (const auto& c : v) dst.push_back(coefficient_token(c));
    } else if (key == "w") s.w = v.is_array() || v.is_number() ? coefficient_token(v) : get_as<std::string>(v, key);
    else if (key == "depth") s.depth = get_as<int>(v, key);
    else if (key == "seed") s.seed = get_as<std::uint64_t>(v, key);
    else if (key == "budget") s.budget = get_as<std::size_t>(v, key);
    else if (key == "out") s.out = get_as<std::string>(v, key);
    else if (key == "json") s.json = get_as<bool>(v, key);
    else if (key == "branches") s.branches = get_as<int>(v, key);
    else if (key == "size") s.size = get_as<std::size_t>(v, key);
    else if (key == "r") s.r = get_as<double>(v, key);
    else if (key == "count_cap") s.count_cap = get_as<std::size_t>(v, key);
    else if (key == "f") s.f = v.is_array() ? get_as<std::vector<std::string>>(v, key) : std::vector{get_as<std::string>(v, key)};
    else if (key == "roots") s.roots = get_as<std::string>(v, key);
    else if (key == "depths") s.depths = get_as<std::vector<int>>(v, key);
    else if (key == "points") s.points = get_as<std::string>(v, key);
    else if (key == "csv") s.csv = get_as<std::string>(v, key);
    else if (key == "trials") s.trials = get_as<int>(v, key);
    else if (key == "bump") s.bump = get_as<std::string>(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

void validate(const Settings& s) {
  if (s.depth < 0) throw ConfigError("depth must be nonnegative");
  if (s.depth > 62) throw ConfigError("depth too large");
  if (s.budget == 0) throw ConfigError("budget must be positive");
  if (s.size == 0) throw ConfigError("size must be positive");
  if (s.trials < 1) throw ConfigError("trials must be positive");
  if (s.branches < 0) throw ConfigError("branches must be nonnegative");
  if (s.count_cap == 0) throw ConfigError("count_cap must be positive");
  for (int d : s.depths)
    if (d < 0) throw ConfigError("depths must be nonnegative");
}

RationalMap make_map(const Settings& s) {
  if (s.num.empty() && s.den.empty()) return RationalMap::named(s.map);
  if (s.num.empty()) throw ConfigError("--den given without --num");
  std::vector<Complex> num;
  std::vector<Complex> den;
  for (const auto& t : s.num) num.push_back(parse_complex(t));
  for (const auto& t : s.den) den.push_back(parse_complex(t));
  if (den.empty()) den.push_back(1.0);
  return RationalMap(num, den, "custom");
}

SpherePoint parse_point(const std::string& text) {
  if (text == "inf" || text == "infinity") return SpherePoint::infinity();
  return SpherePoint(parse_complex(text));
}

SpherePoint root_of(const Settings& s, const RationalMap& map) {
  return s.w.empty() ? default_root(map) : parse_point(s.w);
}

void emit(const Settings& s, std::ostream& out, const std::string& text) {
  if (s.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(s.out, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + s.out + "'");
  file << text;
}

std::uint32_t fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) h = (h ^ c) * 16777619u;
  return h;
}

std::string csv_point(const SpherePoint& p) { return p.is_infinite() ? "inf,0" : to_string(p); }

int cmd_preimages(const Settings& s, std::ostream& out) {
  const auto map = make_map(s);
  const auto w = root_of(s, map);
  const auto fiber = preimages(map, w);
  json atoms = json::array();
  for (const auto& a : fiber.atoms) atoms.push_back({{"point", to_string(a.point)}, {"mult", a.mult}});
  emit(s, out, json{{"map", map.name()}, {"w", to_string(w)}, {"atoms", atoms}}.dump(2) + "\n");
  return kOk;
}

int cmd_tree(const Settings& s, std::ostream& out) {
  const auto map = make_map(s);
  const auto w = root_of(s, map);
  const auto tree = s.branches == 0 || s.branches >= map.degree()
                        ? iterated_preimages(map, w, s.depth, s.budget)
                        : sampled_tree(map, w, s.depth, s.branches, s.seed, s.budget);
  std::ostringstream os;
  write_tree_csv(os, tree);
  emit(s, out, os.str());
  return kOk;
}

int cmd_julia(const Settings& s, std::ostream& out) {
  const auto map = make_map(s);
  const auto sample = julia_sample(map, s.size, s.seed, s.budget);
  std::ostringstream os;
  os << "re,im\n";
  for (const auto& p : sample.points) os << csv_point(p) << '\n';
  emit(s, out, os.str());
  return kOk;
}

std::vector<std::string> functions_or(const Settings& s, std::vector<std::string> fallback) {
  return s.f.empty() ? fallback : s.f;
}

int cmd_measure(const Settings& s, std::ostream& out) {
  const auto map = make_map(s);
  const auto w = root_of(s, map);
  const auto mu = measure_from_tree(s.branches == 0 || s.branches >= map.degree()
                                        ? iterated_preimages(map, w, s.depth, s.budget)
                                        : sampled_tree(map, w, s.depth, s.branches, s.seed, s.budget));
  json records = json::array();
  for (const auto& spec : functions_or(s, {"x^2"})) {
    const Complex v = integrate(mu, TestFunction::parse(spec));
    records.push_back({{"map", map.name()}, {"w", to_string(w)}, {"m", s.depth}, {"f", spec},
                       {"value", v.real()}, {"value_im", v.imag()}});
  }
  if (!s.csv.empty()) {
    std::ofstream file(s.csv, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + s.csv + "'");
    write_measure_csv(file, mu);
  }
  emit(s, out, records.dump(2) + "\n");
  return kOk;
}

int cmd_converge(const Settings& s, std::ostream& out) {
  const auto map = make_map(s);
  std::vector<SpherePoint> roots;
  for (const auto& t : split(s.roots, ';')) roots.push_back(parse_point(t));
  if (roots.empty()) {
    roots.push_back(default_root(map));
    const SpherePoint alt(Complex(0.5, 0.25));
    if (!is_exceptional(map, alt)) roots.push_back(alt);
  }
  const std::vector<int> depths = s.depths.empty() ? std::vector<int>{4, 8, 12} : s.depths;
  std::vector<TestFunction> fs;
  for (const auto& spec : functions_or(s, {"re2", "x^2", "abs"})) fs.push_back(TestFunction::parse(spec));
  const auto report = convergence_report(map, roots, depths, fs, s.budget);
  emit(s, out, to_json(report).dump(2) + "\n");
  return kOk;
}

int cmd_transfer(const Settings& s, std::ostream& out) {
  const auto map = make_map(s);
  std::vector<SpherePoint> points;
  for (const auto& t : split(s.points, ';')) points.push_back(parse_point(t));
  if (points.empty()) points.push_back(root_of(s, map));
  json results = json::array();
  for (const auto& spec : functions_or(s, {"abs2"})) {
    const auto table = transfer_table(map, TestFunction::parse(spec), points);
    json values = json::array();
    for (std::size_t i = 0; i < table.points.size(); ++i)
      values.push_back({{"w", to_string(table.points[i])}, {"re", table.values[i].real()}, {"im", table.values[i].imag()}});
    results.push_back({{"map", map.name()}, {"f", spec}, {"values", values}});
  }
  emit(s, out, results.dump(2) + "\n");
  return kOk;
}

double default_radius(const Settings& s, double r_star) { return s.r > 0.0 ? s.r : std::min(0.1, r_star); }

int cmd_basis(const Settings& s, std::ostream& out) {
  const auto map = make_map(s);
  const auto sample = julia_sample(map, s.size, s.seed, s.budget);
  const double r_star = branch_separation_radius(map, sample);
  const double r = default_radius(s, r_star);
  const auto basis = build_basis(map, sample, r, s.count_cap);
  json branch = json::array();
  for (const auto& c : basis->branch_points()) branch.push_back(to_string(SpherePoint(c)));
  const json doc{{"map", map.name()},          {"r", r},
                 {"separation_radius", r_star}, {"size", basis->size()},
                 {"regular", basis->regular_count()}, {"branch_points", branch},
                 {"elements", basis->to_json()}};
  emit(s, out, doc.dump(2) + "\n");
  return kOk;
}

class Verifier {
 public:
  Verifier(const Settings& s, RationalMap map)
      : s_(s), map_(std::move(map)), w_(root_of(s, map_)), benchmark_(map_.name() != "custom") {
    if (s.depth < 1) throw ConfigError("verify needs depth >= 1");
  }

  void run(const std::string& identity) {
    if (identity == "invariance") invariance();
    else if (identity == "adjoint") adjoint();
    else if (identity == "isometry") isometry();
    else if (identity == "covariance") covariance();
    else if (identity == "unitality") unitality();
    else if (identity == "two_path") two_path();
    else if (identity == "module") module_property();
    else if (identity == "representation") representation();
    else if (identity == "key_lemma") key_lemma();
    else if (identity == "frame_bound") frame_bound();
    else if (identity == "vanishing") vanishing();
    else throw ConfigError("unknown identity '" + identity + "'");
  }

  const std::vector<VerificationRecord>& records() const { return records_; }
  const std::vector<bool>& asserted() const { return asserted_; }

 private:
  std::mt19937_64 rng_for(const std::string& identity) const {
    std::seed_seq seq{static_cast<std::uint32_t>(s_.seed), static_cast<std::uint32_t>(s_.seed >> 32),
                      fnv1a(identity)};
    return std::mt19937_64(seq);
  }

  void record(const std::string& identity, int k, std::optional<std::size_t> n, double residual, double tol,
              bool extra_ok = true, bool asserted = true) {
    VerificationRecord r{identity, map_.name(), to_string(w_), s_.depth, k, n, residual, tol, false};
    r.pass = extra_ok && (tol == 0.0 ? residual == 0.0 : residual < tol);
    records_.push_back(r);
    asserted_.push_back(asserted);
  }

  const OperatorModel& model() {
    if (!model_) model_ = OperatorModel::build(map_, w_, s_.depth, s_.budget);
    return *model_;
  }

  const JuliaSample& sample() {
    if (!sample_) sample_ = julia_sample(map_, s_.size, s_.seed, s_.budget);
    return *sample_;
  }

  const Basis& basis() {
    if (!basis_) {
      const double r = default_radius(s_, branch_separation_radius(map_, sample()));
      basis_ = build_basis(map_, sample(), r, s_.count_cap);
    }
    return *basis_;
  }

  void invariance() {
    double worst = 0.0;
    bool exact = true;
    for (int m = 1; m <= s_.depth; ++m) {
      const auto a = measure_from_tree(iterated_preimages(map_, w_, m, s_.budget));
      const auto b = measure_from_tree(iterated_preimages(map_, w_, m - 1, s_.budget));
      const auto cmp = compare_measures(pushforward(a, map_), b);
      exact = exact && cmp.same_atoms && cmp.weights_equal;
      worst = std::max(worst, cmp.max_position_error);
    }
    record("invariance", s_.depth, std::nullopt, worst, 1e-8, exact);
  }

  void adjoint() {
    auto rng = rng_for("adjoint");
    const int k = s_.depth;
    double worst = 0.0;
    double transfer = 0.0;
    for (int t = 0; t < s_.trials; ++t) {
      const auto f = random_polynomial(rng);
      const auto g = random_polynomial(rng);
      worst = std::max(worst, verify_adjoint(model(), f, g, k));
      if (t < 10) transfer = std::max(transfer, verify_adjoint_transfer(model(), g, k));
    }
    record("adjoint", k, std::nullopt, worst, 1e-12);
    record("adjoint.coisometry", k, std::nullopt, verify_coisometry(model(), k), 1e-12);
    record("adjoint.projection", k, std::nullopt, verify_projection(model(), k), 1e-10);
    record("adjoint.transfer", k, std::nullopt, transfer, 1e-10);
  }

  void isometry() {
    auto rng = rng_for("isometry");
    double worst = 0.0;
    for (int t = 0; t < s_.trials; ++t) worst = std::max(worst, verify_isometry(model(), random_polynomial(rng), s_.depth));
    record("isometry", s_.depth, std::nullopt, worst, 1e-12);
  }

  void covariance() {
    auto rng = rng_for("covariance");
    double worst = 0.0;
    for (int t = 0; t < s_.trials; ++t) {
      const auto a = random_polynomial(rng);
      const auto f = random_polynomial(rng);
      const auto g = random_polynomial(rng);
      worst = std::max(worst, verify_covariance(model(), a, f, g, s_.depth));
    }
    record("covariance", s_.depth, std::nullopt, worst, 1e-10);
  }

  void unitality() {
    const TransferOperator op(map_);
    const auto one = TestFunction::constant(1.0);
    double worst = 0.0;
    for (const auto& p : sample().points) worst = std::max(worst, std::abs(op.apply(one, p) - 1.0));
    record("unitality", 1, std::nullopt, worst, 1e-12);
  }

  void two_path() {
    auto rng = rng_for("two_path");
    std::vector<TestFunction> fs{TestFunction::constant(1.0)};
    for (int t = 0; t < std::min(s_.trials, 10); ++t) fs.push_back(random_polynomial(rng));
    double worst = 0.0;
    for (int m = 0; m <= s_.depth; ++m) {
      const auto mu = measure_from_tree(iterated_preimages(map_, w_, m, s_.budget));
      for (const auto& f : fs) worst = std::max(worst, std::abs(transfer_power(map_, f, m, w_) - integrate(mu, f)));
    }
    record("two_path", s_.depth, std::nullopt, worst, 1e-10);
  }

  void module_property() {
    auto rng = rng_for("module");
    const TransferOperator op(map_);
    const auto& pts = sample().points;
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 64);
    double worst = 0.0;
    for (int t = 0; t < s_.trials; ++t) {
      const auto a = random_polynomial(rng);
      const auto b = random_polynomial(rng);
      const auto ab = a * b.compose(map_);
      for (std::size_t i = 0; i < pts.size(); i += stride)
        worst = std::max(worst, std::abs(op.apply(ab, pts[i]) - b(pts[i]) * op.apply(a, pts[i])));
    }
    record("module", 1, std::nullopt, worst, 1e-10);
  }

  void representation() {
    auto rng = rng_for("representation");
    double inner = 0.0;
    double module = 0.0;
    const int pairs = std::max(1, s_.trials / 2);
    for (int t = 0; t < pairs; ++t) {
      const auto xi = random_polynomial(rng);
      const auto eta = random_polynomial(rng);
      const auto a = random_polynomial(rng);
      const auto res = verify_representation(model(), xi, eta, a, s_.depth);
      inner = std::max(inner, res.inner_product);
      module = std::max(module, res.module);
    }
    record("representation", s_.depth, std::nullopt, inner, 1e-10);
    record("representation.module", s_.depth, std::nullopt, module, 0.0);
  }

  void key_lemma() {
    auto rng = rng_for("key_lemma");
    const auto& b = basis();
    std::vector<TestFunction> fs{TestFunction::constant(1.0)};
    for (int t = 0; t < std::min(s_.trials, 5); ++t) fs.push_back(random_polynomial(rng));
    std::vector<std::size_t> ns{0, b.size() / 4, b.size() / 2, b.size()};
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (std::size_t n : ns) {
      double worst = 0.0;
      for (const auto& f : fs) worst = std::max(worst, verify_key_lemma(model(), b, n, f, s_.depth));
      record("key_lemma", s_.depth, n, worst, 1e-10);
    }
  }

  void frame_bound() {
    const auto& b = basis();
    double upper = 0.0;
    double lower = 0.0;
    double drop = 0.0;
    double prev = 0.0;
    for (std::size_t n = 1; n <= b.size(); ++n) {
      const auto fb = verify_frame_bound(model(), b, n, s_.depth);
      upper = std::max(upper, fb.max_eigenvalue - 1.0);
      lower = std::max(lower, -fb.min_eigenvalue);
      drop = std::max(drop, prev - fb.max_eigenvalue);
      prev = fb.max_eigenvalue;
    }
    record("frame_bound.upper", s_.depth, b.size(), upper, 1e-8, true, benchmark_);
    record("frame_bound.lower", s_.depth, b.size(), lower, 1e-10, true, benchmark_);
    record("frame_bound.monotone", s_.depth, b.size(), drop, 1e-12, true, benchmark_);
  }

  VanishingFunction default_bump() {
    const auto& b = basis();
    if (!s_.bump.empty()) {
      const auto parts = split(s_.bump, ',');
      if (parts.size() != 3) throw ConfigError("--bump expects cx,cy,r");
      const Complex c = parse_complex(parts[0] + "," + parts[1]);
      return VanishingFunction::bump(b, c, parse_complex(parts[2]).real());
    }
    const auto& pts = sample().points;
    if (b.branch_points().empty()) return VanishingFunction::bump(b, pts.front().value(), 0.5);
    // Sample point whose distance to the branch points is closest to half the largest such distance.
    std::vector<double> dist;
    for (const auto& p : pts) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& c : b.branch_points()) d = std::min(d, std::abs(p.value() - c));
      dist.push_back(d);
    }
    const double target = 0.5 * *std::max_element(dist.begin(), dist.end());
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (std::abs(dist[i] - target) < std::abs(dist[best] - target)) best = i;
    return VanishingFunction::bump(b, pts[best].value(), 0.5 * dist[best]);
  }

  void vanishing() {
    const auto a = default_bump();
    try {
      const auto res = verify_vanishing_reconstruction(model(), basis(), a, s_.depth);
      record("vanishing", s_.depth, res.terms, res.residual, 1e-2);
    } catch (const NoVanishingTail&) {
      record("vanishing", s_.depth, basis().size(), std::numeric_limits<double>::max(), 1e-2, false);
    }
  }

  const Settings& s_;
  RationalMap map_;
  SpherePoint w_;
  bool benchmark_;
  std::optional<OperatorModel> model_;
  std::optional<JuliaSample> sample_;
  std::shared_ptr<const Basis> basis_;
  std::vector<VerificationRecord> records_;
  std::vector<bool> asserted_;
};

int cmd_verify(const Settings& s, std::ostream& out) {
  Verifier v(s, make_map(s));
  if (s.identity == "all") {
    for (const auto& id : kIdentities) v.run(id);
  } else {
    v.run(s.identity);
  }
  json report = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < v.records().size(); ++i) {
    json j = to_json(v.records()[i]);
    if (!v.asserted()[i]) j["asserted"] = false;
    report.push_back(std::move(j));
    ok = ok && (v.records()[i].pass || !v.asserted()[i]);
  }
  const std::string text = report.dump(2) + "\n";
  if (!s.out.empty()) emit(s, out, text);
  if (s.json) {
    out << text;
  } else {
    for (const auto& r : v.records()) {
      out << (r.pass ? "PASS " : "FAIL ") << r.identity << " k=" << r.k;
      if (r.n_terms) out << " N=" << *r.n_terms;
      out << " residual=" << r.residual << " tolerance=" << r.tolerance << '\n';
    }
  }
  return ok ? kOk : kVerificationFailed;
}

int dispatch(const Settings& s, std::ostream& out) {
  validate(s);
  if (s.command == "preimages") return cmd_preimages(s, out);
  if (s.command == "tree") return cmd_tree(s, out);
  if (s.command == "julia") return cmd_julia(s, out);
  if (s.command == "measure") return cmd_measure(s, out);
  if (s.command == "converge") return cmd_converge(s, out);
  if (s.command == "transfer") return cmd_transfer(s, out);
  if (s.command == "basis") return cmd_basis(s, out);
  if (s.command == "verify") return cmd_verify(s, out);
  throw ConfigError(s.command.empty() ? "no command given" : "unknown command '" + s.command + "'");
}

struct Binding {
  CLI::Option* option;
  std::function<void(Settings&, const Settings&)> copy;
};

template <class T>
CLI::Option* bind_option(CLI::App& app, std::vector<Binding>& bindings, Settings& staging, const std::string& name, T Settings::*field,
          const std::string& help) {
  CLI::Option* opt = app.add_option(name, staging.*field, help);
  bindings.push_back({opt, [field](Settings& dst, const Settings& src) { dst.*field = src.*field; }});
  return opt;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Preimage measures, transfer operators and operator identities for rational maps", "lyubich-lab"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  Settings staging;
  std::vector<Binding> bindings;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  bind_option(app, bindings, staging, "--map", &Settings::map, "Built-in map: quad, basilica, chebyshev");
  bind_option(app, bindings, staging, "--num", &Settings::num, "Numerator coefficients, ascending, each re,im");
  bind_option(app, bindings, staging, "--den", &Settings::den, "Denominator coefficients, ascending, each re,im");
  bind_option(app, bindings, staging, "--w", &Settings::w, "Root point re,im or inf (default: repelling fixed point)");
  bind_option(app, bindings, staging, "--depth", &Settings::depth, "Tree depth m");
  bind_option(app, bindings, staging, "--seed", &Settings::seed, "Random seed");
  bind_option(app, bindings, staging, "--budget", &Settings::budget, "Maximum atoms per tree");
  bind_option(app, bindings, staging, "--out", &Settings::out, "Output file (default stdout)");
  bind_option(app, bindings, staging, "--branches", &Settings::branches, "Children kept per node (0 = all)");
  bind_option(app, bindings, staging, "--size", &Settings::size, "Julia sample size");
  bind_option(app, bindings, staging, "--r", &Settings::r, "Basis net radius (default min(0.1, separation radius))");
  bind_option(app, bindings, staging, "--count-cap", &Settings::count_cap, "Maximum number of basis elements");
  bind_option(app, bindings, staging, "--f", &Settings::f, "Test functions, e.g. x^2 re2 abs bump:cx,cy,r");
  bind_option(app, bindings, staging, "--roots", &Settings::roots, "Roots for converge, separated by ';'");
  bind_option(app, bindings, staging, "--depths", &Settings::depths, "Depths for converge")->delimiter(',');
  bind_option(app, bindings, staging, "--points", &Settings::points, "Evaluation points for transfer, separated by ';'");
  bind_option(app, bindings, staging, "--csv", &Settings::csv, "Atom CSV output for measure");
  bind_option(app, bindings, staging, "--trials", &Settings::trials, "Random trials per identity");
  bind_option(app, bindings, staging, "--bump", &Settings::bump, "Vanishing bump cx,cy,r for verify vanishing");
  CLI::Option* json_flag = app.add_flag("--json", staging.json, "Print JSON to stdout");
  bindings.push_back({json_flag, [](Settings& d, const Settings& s) { d.json = s.json; }});

  std::string command;
  for (const char* name : {"preimages", "tree", "julia", "measure", "converge", "transfer", "basis"}) {
    app.add_subcommand(name)->callback([&command, name] { command = name; });
  }
  std::string identity = "all";
  auto* verify = app.add_subcommand("verify", "Check operator identities");
  verify->add_option("identity", identity, "Identity name or 'all'");
  verify->callback([&command] { command = "verify"; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    Settings s;
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) throw ConfigError("cannot read config '" + config_path + "'");
      json cfg;
      try {
        cfg = json::parse(file);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
      }
      apply_config(s, cfg);
    }
    for (const auto& b : bindings)
      if (b.option->count() > 0) b.copy(s, staging);
    if (!command.empty()) s.command = command;
    if (verify->parsed()) s.identity = identity;
    return dispatch(s, out);
  } catch (const RootFindingFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const EigSolverFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace lyubich::cli
