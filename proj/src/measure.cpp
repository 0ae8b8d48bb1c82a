#include "lyubich/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "lyubich/errors.hpp"
#include "lyubich/kernels.hpp"

namespace lyubich {

Rational AtomicMeasure::total() const {
  Rational t(0);
  for (const auto& a : atoms) t += a.weight;
  return t;
}

std::vector<SpherePoint> AtomicMeasure::points() const {
  std::vector<SpherePoint> p;
  p.reserve(atoms.size());
  for (const auto& a : atoms) p.push_back(a.point);
  return p;
}

std::vector<double> AtomicMeasure::weights() const {
  std::vector<double> w;
  w.reserve(atoms.size());
  for (const auto& a : atoms) w.push_back(a.weight.to_double());
  return w;
}

AtomicMeasure measure_from_tree(const PreimageTree& tree) {
  AtomicMeasure mu;
  mu.depth = tree.depth;
  mu.degree = tree.degree;
  mu.root = tree.root;
  mu.map_id = tree.map_id;
  mu.map_name = tree.map_name;
  const auto& leaves = tree.deepest();
  mu.atoms.reserve(leaves.size());
  if (tree.sampled) {
    for (const auto& a : leaves) mu.atoms.push_back({a.point, a.weight});
  } else {
    const std::int64_t denom = checked_pow(tree.degree, tree.depth);
    for (const auto& a : leaves) mu.atoms.push_back({a.point, Rational(a.mult, denom)});
  }
  return mu;
}

Complex integrate(const AtomicMeasure& mu, const TestFunction& f) {
  const auto pts = mu.points();
  const auto values = kernels::evaluate_parallel([&f](const SpherePoint& p) { return f(p); }, pts);
  const auto w = mu.weights();
  return kernels::weighted_sum_parallel(values, w);
}

AtomicMeasure pushforward(const AtomicMeasure& mu, const RationalMap& map) {
  if (mu.depth < 1) throw std::invalid_argument("pushforward needs depth >= 1");
  const auto pts = mu.points();
  const auto images = kernels::map_points_parallel(map, pts);
  const auto labels = cluster_labels(images);

  std::vector<MeasureAtom> merged;
  std::vector<bool> seen;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::size_t l = labels[i];
    if (l >= merged.size()) {
      merged.resize(l + 1);
      seen.resize(l + 1, false);
    }
    if (!seen[l]) {
      merged[l] = {images[i], mu.atoms[i].weight};
      seen[l] = true;
    } else {
      merged[l].weight += mu.atoms[i].weight;
    }
  }
  std::sort(merged.begin(), merged.end(),
            [](const MeasureAtom& a, const MeasureAtom& b) { return lex_less(a.point, b.point); });

  AtomicMeasure out = mu;
  out.atoms = std::move(merged);
  out.depth = mu.depth - 1;
  return out;
}

MeasureComparison compare_measures(const AtomicMeasure& a, const AtomicMeasure& b) {
  std::vector<SpherePoint> all;
  all.reserve(a.atoms.size() + b.atoms.size());
  for (const auto& x : a.atoms) all.push_back(x.point);
  for (const auto& x : b.atoms) all.push_back(x.point);
  const auto labels = cluster_labels(all);

  std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto& g = groups[labels[i]];
    if (i < a.atoms.size()) {
      g.first.push_back(i);
    } else {
      g.second.push_back(i - a.atoms.size());
    }
  }

  MeasureComparison cmp;
  cmp.same_atoms = true;
  cmp.weights_equal = true;
  for (const auto& [label, g] : groups) {
    if (g.first.size() != 1 || g.second.size() != 1) {
      cmp.same_atoms = false;
      cmp.weights_equal = false;
      continue;
    }
    const auto& x = a.atoms[g.first[0]];
    const auto& y = b.atoms[g.second[0]];
    const double err = x.point.is_finite() && y.point.is_finite() ? plane_distance(x.point, y.point)
                                                                   : chordal_distance(x.point, y.point);
    cmp.max_position_error = std::max(cmp.max_position_error, err);
    if (!(x.weight == y.weight)) cmp.weights_equal = false;
  }
  return cmp;
}

SpherePoint default_root(const RationalMap& map) {
  std::optional<FixedPoint> best;
  for (const auto& fp : fixed_points(map)) {
    if (fp.point.is_infinite() || !(std::abs(fp.multiplier) > 1.0)) continue;
    if (!best || std::abs(fp.multiplier) > std::abs(best->multiplier) + 1e-12) best = fp;
  }
  if (best) return best->point;

  const auto crit = critical_points(map);
  for (const Complex c : {Complex(0.5, 0.25), Complex(-0.7, 0.3), Complex(1.3, -0.9), Complex(0.1, 1.7)}) {
    const SpherePoint p(c);
    const bool critical = std::any_of(crit.begin(), crit.end(), [&](const CriticalDatum& d) {
      return chordal_distance(d.point, p) < 1e-3;
    });
    if (!critical && !is_exceptional(map, p)) return p;
  }
  throw RootFindingFailure("no admissible default root found");
}

void write_measure_csv(std::ostream& os, const AtomicMeasure& mu) {
  const std::int64_t denom = checked_pow(mu.degree, mu.depth);
  const auto old_precision = os.precision(17);
  os << "re,im,weight_num,weight_depth\n";
  for (const auto& a : mu.atoms) {
    if (denom % a.weight.den() != 0) {
      throw std::invalid_argument("measure weight " + to_string(a.weight) + " is not a multiple of n^-depth");
    }
    if (a.point.is_infinite()) {
      os << "inf,0";
    } else {
      os << a.point.value().real() << ',' << a.point.value().imag();
    }
    os << ',' << a.weight.num() * (denom / a.weight.den()) << ',' << mu.depth << '\n';
  }
  os.precision(old_precision);
}

ConvergenceReport convergence_report(const RationalMap& map, const std::vector<SpherePoint>& roots,
                                     const std::vector<int>& depths, const std::vector<TestFunction>& fs,
                                     std::size_t budget) {
  ConvergenceReport report;
  report.map_name = map.name();
  // value[root][depth][f]
  std::vector<std::vector<std::vector<Complex>>> values(roots.size());
  for (std::size_t r = 0; r < roots.size(); ++r) {
    for (int m : depths) {
      const auto mu = measure_from_tree(iterated_preimages(map, roots[r], m, budget));
      std::vector<Complex> row;
      for (const auto& f : fs) row.push_back(integrate(mu, f));
      values[r].push_back(std::move(row));
    }
  }
  for (std::size_t r = 0; r < roots.size(); ++r) {
    for (std::size_t d = 0; d < depths.size(); ++d) {
      for (std::size_t j = 0; j < fs.size(); ++j) {
        ConvergenceEntry e;
        e.root = roots[r];
        e.depth = depths[d];
        e.function = fs[j].name();
        e.value = values[r][d][j];
        if (d > 0) e.diff_prev_m = std::abs(values[r][d][j] - values[r][d - 1][j]);
        for (std::size_t s = 0; s < roots.size(); ++s)
          for (std::size_t t = s + 1; t < roots.size(); ++t)
            e.spread_across_w = std::max(e.spread_across_w, std::abs(values[s][d][j] - values[t][d][j]));
        report.entries.push_back(std::move(e));
      }
    }
  }
  return report;
}

nlohmann::json to_json(const ConvergenceReport& report) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& e : report.entries) {
    nlohmann::json rec;
    rec["map"] = report.map_name;
    rec["w"] = to_string(e.root);
    rec["m"] = e.depth;
    rec["f"] = e.function;
    rec["value"] = e.value.real();
    rec["value_im"] = e.value.imag();
    rec["diff_prev_m"] = e.diff_prev_m ? nlohmann::json(*e.diff_prev_m) : nlohmann::json(nullptr);
    rec["spread_across_w"] = e.spread_across_w;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace lyubich
