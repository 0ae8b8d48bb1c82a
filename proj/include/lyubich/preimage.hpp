#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lyubich/rational.hpp"
#include "lyubich/rational_map.hpp"

namespace lyubich {

inline constexpr std::size_t kDefaultAtomBudget = std::size_t{1} << 22;

/// The fiber R^{-1}(w) with branch indices; multiplicities sum to deg R.
struct WeightedPreimage {
  SpherePoint target;
  std::vector<FiberAtom> atoms;  // sorted by lex_less

  int total_multiplicity() const;
};

/// One atom of a preimage tree. `mult` is the local degree of R^k at the
/// point, `parent` indexes the previous level, `weight` is its mass in the
/// level measure.
struct TreeAtom {
  SpherePoint point;
  std::int64_t mult = 1;
  std::int64_t parent = -1;
  Rational weight{1};
};

/// Levels 0..depth of iterated preimages of a root point. Each level is
/// sorted by lex_less, so the layout does not depend on thread schedule.
struct PreimageTree {
  SpherePoint root;
  int depth = 0;
  int degree = 2;
  bool sampled = false;
  std::uint64_t map_id = 0;
  std::string map_name;
  std::vector<std::vector<TreeAtom>> levels;

  const std::vector<TreeAtom>& level(int k) const { return levels.at(static_cast<std::size_t>(k)); }
  const std::vector<TreeAtom>& deepest() const { return levels.back(); }
};

WeightedPreimage preimages(const RationalMap& map, const SpherePoint& w);

/// Full tree of depth m. Throws ExceptionalRoot if w is exceptional and
/// BudgetExceeded if n^m exceeds the atom budget.
PreimageTree iterated_preimages(const RationalMap& map, const SpherePoint& w, int depth,
                                std::size_t budget = kDefaultAtomBudget);

/// Monte Carlo tree: every node keeps `branches` children drawn without
/// replacement with probability proportional to multiplicity; the kept
/// children split the parent's weight in proportion to multiplicity.
/// Deterministic for a given seed. branches >= distinct fiber size gives the full tree.
PreimageTree sampled_tree(const RationalMap& map, const SpherePoint& w, int depth, int branches,
                          std::uint64_t seed, std::size_t budget = kDefaultAtomBudget);

/// Per-level branching schedule (0 = keep every child); used for Julia sampling.
PreimageTree scheduled_tree(const RationalMap& map, const SpherePoint& w, const std::vector<int>& branches,
                            std::uint64_t seed, std::size_t budget = kDefaultAtomBudget);

/// CSV rows: level,re,im,cumulative_mult,parent_index. Infinity is written as re=inf, im=0.
void write_tree_csv(std::ostream& os, const PreimageTree& tree);

}  // namespace lyubich
