#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyubich/preimage.hpp"
#include "lyubich/test_function.hpp"

namespace lyubich {

struct MeasureAtom {
  SpherePoint point;
  Rational weight;
};

/// Finite atomic probability measure approximating the Lyubich measure.
/// Atoms are sorted by lex_less and weights are exact.
struct AtomicMeasure {
  std::vector<MeasureAtom> atoms;
  int depth = 0;
  int degree = 2;
  SpherePoint root;
  std::uint64_t map_id = 0;
  std::string map_name;

  Rational total() const;
  std::vector<SpherePoint> points() const;
  std::vector<double> weights() const;
};

/// Deepest level of the tree with weights e_{R^m}(z)/n^m (or the sampled weights).
AtomicMeasure measure_from_tree(const PreimageTree& tree);

/// sum f(z) weight(z), compensated. Throws IncompatibleTable if f is a
/// pointwise table bound to other atoms.
Complex integrate(const AtomicMeasure& mu, const TestFunction& f);

/// Image measure under R; coincident images are merged at the clustering radius.
AtomicMeasure pushforward(const AtomicMeasure& mu, const RationalMap& map);

struct MeasureComparison {
  bool same_atoms = false;      // one-to-one matching at the clustering radius
  bool weights_equal = false;   // exact rational equality of matched weights
  double max_position_error = 0.0;
};

MeasureComparison compare_measures(const AtomicMeasure& a, const AtomicMeasure& b);

/// Reproducible root for approximating the Lyubich measure: the finite fixed
/// point of largest repelling multiplier, else a non-exceptional non-critical point.
SpherePoint default_root(const RationalMap& map);

/// CSV rows: re,im,weight_num,weight_depth with weight = weight_num / n^weight_depth.
void write_measure_csv(std::ostream& os, const AtomicMeasure& mu);

struct ConvergenceEntry {
  SpherePoint root;
  int depth = 0;
  std::string function;
  Complex value;
  std::optional<double> diff_prev_m;
  double spread_across_w = 0.0;
};

/// Values of integral f dmu_m^w over all (root, depth, f), with successive
/// differences across depth and spreads across roots. Diagnostic only.
struct ConvergenceReport {
  std::string map_name;
  std::vector<ConvergenceEntry> entries;
};

ConvergenceReport convergence_report(const RationalMap& map, const std::vector<SpherePoint>& roots,
                                     const std::vector<int>& depths, const std::vector<TestFunction>& fs,
                                     std::size_t budget = kDefaultAtomBudget);

nlohmann::json to_json(const ConvergenceReport& report);

}  // namespace lyubich
