// Re-derives the best point of the d=4, k=5 complex family by multi-start
// local maximization of its closed form, and prints src/frames_constants.cpp.
//   regen_constants [restarts] > src/frames_constants.cpp

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "nullwit/frames.hpp"
#include "nullwit/optimizer.hpp"
#include "nullwit/qcore.hpp"
#include "nullwit/witness.hpp"

using namespace nullwit;

namespace {

// Hyperspherical angles (u, v, w) for (x, y, z, t) and s for (A, B).
D4K5Params params_of(std::span<const double> q) {
  const double u = q[0], v = q[1], w = q[2], s = q[3];
  return D4K5Params{std::cos(u), std::sin(u) * std::cos(v), std::sin(u) * std::sin(v) * std::cos(w),
                    std::sin(u) * std::sin(v) * std::sin(w), std::cos(s), std::sin(s)};
}

}  // namespace

int main(int argc, char** argv) {
  const int restarts = argc > 1 ? std::atoi(argv[1]) : 64;
  const Objective f = [](std::span<const double> q) { return d4k5_complex_closed_form(params_of(q)); };

  LocalSearchOptions opts;
  opts.max_iterations = 2000;
  opts.step_tolerance = 1e-14;
  opts.value_tolerance = 1e-16;

  double best = -1.0;
  std::vector<double> best_x;
  for (int r = 0; r < restarts; ++r) {
    RngStream rng(45, static_cast<std::uint64_t>(r));
    std::vector<double> start(4);
    for (double& a : start) a = 2.0 * std::numbers::pi * rng.uniform();
    const LocalSearchOutcome o = maximize_local(f, start, opts);
    if (o.value > best) {
      best = o.value;
      best_x = o.x;
    }
  }

  const D4K5Params p = params_of(best_x);
  const auto family = d4k5_complex_family(p);
  const double w = witness_full(probability_matrix(family.first, family.second));
  std::fprintf(stderr, "closed form %.17g, witness %.17g\n", best, w);

  std::printf("// Generated by tools/regen_constants (d=4, k=5 complex family maximum).\n");
  std::printf("#include \"nullwit/frames.hpp\"\n\nnamespace nullwit {\n\n");
  std::printf("D4K5Params d4k5_complex_best() {\n");
  std::printf("  return D4K5Params{%.17g, %.17g, %.17g,\n                    %.17g, %.17g, %.17g};\n", p.x, p.y, p.z,
              p.t, p.a, p.b);
  std::printf("}\n\n}  // namespace nullwit\n");
  return 0;
}
