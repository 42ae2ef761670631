// Emulate the segmented oracle in fixed point and compare its ledger with the
// closed-form count.
#include <cstdio>

#include "dvrforge/cost_models.hpp"
#include "dvrforge/oracle_emulator.hpp"

int main() {
  using namespace dvrforge;
  const auto fam = PolynomialFamily::legendre();
  const auto ref = build_dvr(fam, 64);
  std::printf("%3s %3s  %-10s %-10s %s\n", "F", "m", "ledger", "formula", "max error");
  for (std::size_t F : {4, 8, 16}) {
    for (int m : {16, 24, 32}) {
      const auto rep = run_recursion(ref, SegmentSpec::make(64, F), Arithmetic::fixed_point(FxConfig::standard(m)));
      const auto est = cost_oracle(Method::REC, 64, static_cast<std::uint64_t>(m), F);
      std::printf("%3zu %3d  %-10llu %-10llu %.3e\n", F, m, static_cast<unsigned long long>(rep.ledger.toffoli),
                  static_cast<unsigned long long>(est.t_count), rep.max_abs_error);
    }
  }
}
