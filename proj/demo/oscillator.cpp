// Anharmonic oscillator in a Hermite DVR: eigenvalues and their convergence.
#include <cstdio>
#include <vector>

#include "dvrforge/dvr_core.hpp"

int main() {
  using namespace dvrforge;
  const auto v = quartic_potential(0.1);
  const std::vector<std::size_t> ladder{8, 12, 16, 24, 32};
  const auto rows = convergence_ladder(ladder, 64, v, 4);
  std::printf("%4s  %-12s %-12s %-12s %-12s %s\n", "N", "E0", "E1", "E2", "E3", "max err vs N=64");
  for (const auto& r : rows)
    std::printf("%4zu  %-12.9f %-12.9f %-12.9f %-12.9f %.3e\n", r.N, r.values[0], r.values[1], r.values[2], r.values[3],
                r.max_error);

  const auto two_d = solve_hermite(12, 2, harmonic_potential(), 6);
  std::printf("\n2D harmonic, N=12 per axis:");
  for (double e : two_d.values) std::printf(" %.10f", e);
  std::printf("\n");
}
