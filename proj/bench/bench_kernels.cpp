// Times the serial reference kernels against their OpenMP versions and
// checks that both produce the same output.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include "lyubich/kernels.hpp"
#include "lyubich/measure.hpp"

using namespace lyubich;

namespace {

double time_best(const std::function<void()>& fn, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, std::size_t n, double serial, double parallel, bool same) {
  std::printf("%-22s %10zu %12.4f %12.4f %8.2fx %s\n", name, n, serial * 1e3, parallel * 1e3, serial / parallel,
              same ? "same" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  const int depth = argc > 1 ? std::atoi(argv[1]) : 16;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
  const auto map = RationalMap::named("basilica");
  const auto tree = iterated_preimages(map, default_root(map), depth - 1);
  const auto& parents = tree.deepest();

  std::printf("threads: %d, parent level size %zu\n", omp_get_max_threads(), parents.size());
  std::printf("%-22s %10s %12s %12s %9s\n", "kernel", "items", "serial ms", "parallel ms", "speedup");

  for (int branches : {0, 1}) {
    const kernels::ExpandOptions opt{branches, 11, depth - 1};
    std::vector<TreeAtom> a;
    std::vector<TreeAtom> b;
    const double ts = time_best([&] { a = kernels::expand_level_serial(map, parents, opt); }, reps);
    const double tp = time_best([&] { b = kernels::expand_level_parallel(map, parents, opt); }, reps);
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].point == b[i].point && a[i].weight == b[i].weight;
    row(branches == 0 ? "expand_level (full)" : "expand_level (b=1)", parents.size(), ts, tp, same);
  }

  std::vector<SpherePoint> pts;
  for (const auto& atom : parents) pts.push_back(atom.point);
  {
    std::vector<SpherePoint> a;
    std::vector<SpherePoint> b;
    const double ts = time_best([&] { a = kernels::map_points_serial(map, pts); }, reps);
    const double tp = time_best([&] { b = kernels::map_points_parallel(map, pts); }, reps);
    row("map_points", pts.size(), ts, tp, a == b);
  }

  const auto f = TestFunction::parse("bump:0.3,0.2,1.5") + TestFunction::parse("abs2");
  const kernels::PointFunction fn = [&](const SpherePoint& z) { return f(z); };
  std::vector<Complex> va;
  std::vector<Complex> vb;
  {
    const double ts = time_best([&] { va = kernels::evaluate_serial(fn, pts); }, reps);
    const double tp = time_best([&] { vb = kernels::evaluate_parallel(fn, pts); }, reps);
    row("evaluate", pts.size(), ts, tp, va == vb);
  }
  {
    std::vector<double> w(va.size());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& x : w) x = u(rng);
    Complex sa;
    Complex sb;
    const double ts = time_best([&] { sa = kernels::weighted_sum_serial(va, w); }, reps);
    const double tp = time_best([&] { sb = kernels::weighted_sum_parallel(va, w); }, reps);
    row("weighted_sum", va.size(), ts, tp, std::abs(sa - sb) <= 1e-12 * std::abs(sa));
  }
  return 0;
}
