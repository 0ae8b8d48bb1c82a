#include "lyubich/preimage.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lyubich/errors.hpp"
#include "lyubich/kernels.hpp"

namespace lyubich {

int WeightedPreimage::total_multiplicity() const {
  int total = 0;
  for (const auto& a : atoms) total += a.mult;
  return total;
}

WeightedPreimage preimages(const RationalMap& map, const SpherePoint& w) {
  WeightedPreimage out{w, solve_fiber(map, w)};
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const FiberAtom& a, const FiberAtom& b) { return lex_less(a.point, b.point); });
  if (out.total_multiplicity() != map.degree()) {
    throw RootFindingFailure("fiber multiplicities do not sum to the degree");
  }
  return out;
}

PreimageTree scheduled_tree(const RationalMap& map, const SpherePoint& w, const std::vector<int>& branches,
                            std::uint64_t seed, std::size_t budget) {
  if (is_exceptional(map, w)) {
    throw ExceptionalRoot("root " + to_string(w) + " is exceptional; its preimage measures are undefined");
  }
  const int depth = static_cast<int>(branches.size());
  std::size_t bound = 1;
  for (int b : branches) {
    const std::size_t factor = static_cast<std::size_t>(b == 0 ? map.degree() : std::min(b, map.degree()));
    if (bound > budget / factor) {
      throw BudgetExceeded("tree of depth " + std::to_string(depth) + " exceeds the atom budget " +
                           std::to_string(budget));
    }
    bound *= factor;
  }

  PreimageTree tree;
  tree.root = w;
  tree.depth = depth;
  tree.degree = map.degree();
  tree.map_id = map.id();
  tree.map_name = map.name();
  tree.sampled = std::any_of(branches.begin(), branches.end(), [&](int b) { return b != 0 && b < map.degree(); });
  tree.levels.reserve(static_cast<std::size_t>(depth) + 1);
  tree.levels.push_back({TreeAtom{w, 1, -1, Rational(1)}});
  for (int k = 0; k < depth; ++k) {
    const kernels::ExpandOptions opt{branches[static_cast<std::size_t>(k)], seed, k};
    tree.levels.push_back(kernels::expand_level_parallel(map, tree.levels.back(), opt));
  }
  return tree;
}

PreimageTree iterated_preimages(const RationalMap& map, const SpherePoint& w, int depth, std::size_t budget) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  return scheduled_tree(map, w, std::vector<int>(static_cast<std::size_t>(depth), 0), 0, budget);
}

PreimageTree sampled_tree(const RationalMap& map, const SpherePoint& w, int depth, int branches,
                          std::uint64_t seed, std::size_t budget) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  if (branches < 1 || branches > map.degree()) {
    throw std::invalid_argument("branches_per_node must lie in [1, degree]");
  }
  return scheduled_tree(map, w, std::vector<int>(static_cast<std::size_t>(depth), branches), seed, budget);
}

void write_tree_csv(std::ostream& os, const PreimageTree& tree) {
  const auto old_precision = os.precision(17);
  os << "level,re,im,cumulative_mult,parent_index\n";
  for (std::size_t k = 0; k < tree.levels.size(); ++k) {
    for (const auto& a : tree.levels[k]) {
      os << k << ',';
      if (a.point.is_infinite()) {
        os << "inf,0";
      } else {
        os << a.point.value().real() << ',' << a.point.value().imag();
      }
      os << ',' << a.mult << ',' << a.parent << '\n';
    }
  }
  os.precision(old_precision);
}

}  // namespace lyubich
