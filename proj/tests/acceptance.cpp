// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "dvrforge/cli.hpp"
#include "dvrforge/dvrforge.hpp"
#include "hand_formulas.hpp"
#include "oracles.hpp"

using namespace dvrforge;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string timing = fmt("%.2fs", secs);
  if (limit_s > 0) {
    timing += fmt(" (limit %.0fs)", limit_s);
    if (secs >= limit_s) o.pass = false;
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d %s: %s; %s; %s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), timing.c_str());
  std::fflush(stdout);
}

std::vector<PolynomialFamily> all_families() { return shipped_families(); }

}  // namespace

int main() {
  criterion(1, "unitarity", 10, [] {
    double worst = 0.0;
    for (const auto& f : all_families())
      for (std::size_t N : {8, 32, 128, 256}) {
        const auto t = build_dvr(f, N);
        worst = std::max({worst, orthogonality_defect(t.entries), orthogonality_defect(t.entries.transposed())});
      }
    return Outcome{worst < 1e-10, fmt("max|T^T T - I| = %.3g over %zu families, N in {8,32,128,256}", worst, all_families().size())};
  });

  criterion(2, "Kronecker node property", 5, [] {
    double off = 0.0, scale_dev = 0.0;
    for (const auto& f : all_families())
      for (std::size_t N = 1; N <= 64; N *= 2) {
        const auto t = build_dvr(f, N);
        off = std::max(off, kronecker_residual(t));
        for (std::size_t l = 0; l < N; ++l) {
          const double x = t.quadrature.nodes[l];
          const double expect = std::sqrt(weight_function(f, x) / t.quadrature.weights[l]);
          scale_dev = std::max(scale_dev, std::abs(dvr_basis_value(t, l, x) / expect - 1.0));
        }
      }
    return Outcome{off < 1e-9 && scale_dev < 1e-9,
                   fmt("off-diagonal / diagonal = %.3g, |d_l(x_l) / sqrt(w(x_l)/w_l) - 1| = %.3g, N <= 64", off, scale_dev)};
  });

  criterion(3, "quadrature exactness", 0, [] {
    auto fams = all_families();
    fams.push_back(PolynomialFamily::laguerre(1.5));
    fams.push_back(PolynomialFamily::jacobi(-0.5, 0.25));
    double worst = 0.0;
    for (const auto& f : fams) {
      std::vector<double> exact, scale;
      for (int d = 0; d < 64; ++d) {
        exact.push_back(oracle::to_d(oracle::moment(f, d)));
        scale.push_back(oracle::to_d(oracle::moment_scale(f, d)));
      }
      for (std::size_t N = 1; N <= 32; ++N) {
        const auto q = nodes_weights(f, N);
        for (int d = 0; d <= static_cast<int>(2 * N - 1); ++d) {
          const double got = quadrature_apply(q, [d](double x) { return std::pow(x, d); });
          worst = std::max(worst, std::abs(got - exact[d]) / scale[d]);
        }
      }
    }
    return Outcome{worst <= 1e-9, fmt("max relative moment error %.3g, degree <= 2N-1, N <= 32, %zu families", worst, fams.size())};
  });

  criterion(4, "recursive-oracle equivalence", 30, [] {
    double cheb = 0.0, leg = 0.0, herm = 0.0;
    std::size_t bad = 0;
    for (std::size_t N = 4; N <= 64; N *= 2)
      for (std::size_t F : {4, 8, 16}) {
        if (F > N) continue;
        const auto spec = SegmentSpec::make(N, F);
        auto one = [&](const PolynomialFamily& f) {
          const auto r = run_recursion(build_dvr(f, N), spec, Arithmetic::double_precision());
          bad += r.guard_violations + r.label_mismatches + (r.ledgers_consistent ? 0 : 1);
          if (!std::isfinite(r.max_abs_error)) ++bad;
          return r.max_abs_error;
        };
        cheb = std::max(cheb, one(PolynomialFamily::chebyshev_second()));
        leg = std::max(leg, one(PolynomialFamily::legendre()));
        herm = std::max(herm, one(PolynomialFamily::hermite()));
      }
    return Outcome{cheb < 1e-12 && leg < 1e-8 && bad == 0,
                   fmt("chebyshev2 %.3g (< 1e-12), legendre %.3g (< 1e-8), hermite measured %.3g, guard/label faults %zu", cheb, leg,
                       herm, bad)};
  });

  criterion(5, "cost-formula regression", 0, [] {
    std::size_t mismatches = 0;
    for (const auto& [N, m, F] : hand::pinned()) {
      for (bool parity : {false, true}) {
        std::vector<std::string> args{"estimate", "--method", parity ? "rec-parity" : "rec", "--n", std::to_string(N), "--m",
                                      std::to_string(m), "--f", std::to_string(F)};
        std::ostringstream out, err;
        if (cli::main_entry(args, out, err) != 0) {
          ++mismatches;
          continue;
        }
        const auto got = nlohmann::json::parse(out.str())["t_count"].get<std::uint64_t>();
        if (got != (parity ? hand::rec_parity_full(N, m, F) : hand::rec_full(N, m, F))) ++mismatches;
      }
    }
    struct Case {
      std::size_t N, F;
      int m;
      QromModel qrom;
      bool half;
    };
    const std::vector<Case> cases{{64, 8, 16, QromModel::Select, false},
                                  {32, 4, 8, QromModel::Select, false},
                                  {64, 16, 12, QromModel::Select, true},
                                  {32, 8, 16, QromModel::SelSwap, false},
                                  {64, 32, 10, QromModel::SelSwap, true}};
    std::size_t ledger_bad = 0;
    for (const auto& c : cases) {
      const auto r = run_recursion(build_dvr(PolynomialFamily::legendre(), c.N), SegmentSpec::make(c.N, c.F),
                                   Arithmetic::fixed_point(FxConfig::standard(c.m)), c.qrom, c.half);
      const auto model = cost_oracle(c.qrom == QromModel::SelSwap ? Method::REC_LKS : Method::REC, c.N, c.m, c.F, c.half);
      if (r.ledger.toffoli != model.t_count) ++ledger_bad;
    }
    return Outcome{mismatches == 0 && ledger_bad == 0,
                   fmt("%zu of %zu estimate values differ from hand-expanded full and parity forms; %zu of %zu emulator ledgers differ",
                       mismatches, 2 * hand::pinned().size(), ledger_bad, cases.size())};
  });

  criterion(6, "volume crossover", 5, [] {
    const auto r = volume_sweep(power_range(16, 16384), int_range(4, 32));
    std::size_t advantaged = 0;
    for (const auto& c : r.cells) advantaged += c.rec_advantage();
    const bool monotone = advantage_monotone_in_n(r);
    // "small m" is read as the bottom of the grid; wider m are reported only
    const auto& b0 = r.boundary.front();
    const bool near = r.ms.front() == 4 && b0 && *b0 >= 64 && *b0 <= 256;
    std::string wider;
    for (std::size_t j = 0; j < r.ms.size() && r.ms[j] <= 8; ++j)
      wider += fmt(" %d:%llu", static_cast<int>(r.ms[j]), r.boundary[j] ? static_cast<unsigned long long>(*r.boundary[j]) : 0ull);
    bool has_1024 = false;
    for (const auto& c : r.cells) has_1024 = has_1024 || (c.N == 1024 && c.m == 4 && c.rec_advantage());
    return Outcome{advantaged > 0 && monotone && near && has_1024,
                   fmt("%zu of %zu cells favour REC, monotone in N: %s, (N=1024, m=4) inside: %s, first advantaged N at m=4 is %llu "
                       "(2^7 +- one octave), m:N for m <= 8 is%s",
                       advantaged, r.cells.size(), monotone ? "yes" : "no", has_1024 ? "yes" : "no",
                       b0 ? static_cast<unsigned long long>(*b0) : 0ull, wider.c_str())};
  });

  criterion(7, "half-cost claim as a volume ratio", 0, [] {
    const auto c = sweep_cell(1024, 16, FStrategy::PowerOfTwo);
    const auto lks = cost_oracle(Method::LKS, 1024, 16, 0);
    const auto rec = cost_oracle(Method::REC, 1024, 16, static_cast<std::uint64_t>(c.F_opt), false, true);
    const double t_ratio = static_cast<double>(rec.t_count) / static_cast<double>(lks.t_count);
    return Outcome{c.ratio >= 0.4 && c.ratio <= 0.7,
                   fmt("REC/LKS volume at N=1024, m=16, F=%g is %.4f; the T-count ratio alone is %.1f, so the 'gate count' reading is "
                       "not supported by the T-count formulas (documented discrepancy)",
                       c.F_opt, c.ratio, t_ratio)};
  });

  criterion(8, "reflections identity", 0, [] {
    double unit = 0.0, block = 0.0, perm = 0.0;
    for (const auto& f : {PolynomialFamily::legendre(), PolynomialFamily::laguerre(0.0)})
      for (std::size_t N : {1, 2, 4, 8, 16}) {
        const auto t = build_dvr(f, N);
        const auto r = verify_reflections(t.entries);
        unit = std::max(unit, r.unitarity_defect);
        block = std::max(block, r.residual_adjoint);
        std::vector<std::size_t> order(N);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937 rng(static_cast<unsigned>(N));
        std::shuffle(order.begin(), order.end(), rng);
        perm = std::max({perm, r.permutation_delta, max_abs_diff(r.product, reflection_product(t.entries, order))});
      }
    return Outcome{unit < 1e-9 && block < 1e-9 && perm < 1e-12,
                   fmt("unitarity %.3g, |D - [[0,T^T],[T,0]]| = %.3g, order change %.3g; legendre and laguerre, N in {1,2,4,8,16}", unit,
                       block, perm)};
  });

  criterion(9, "state-prep fidelity", 0, [] {
    double worst = 1.0;
    for (const auto& f : all_families())
      for (std::size_t N = 1; N <= 32; N *= 2) {
        const auto t = build_dvr(f, N);
        worst = std::min(worst, check_state_prep(t.entries, f.is_parity_conserving() && N > 1).min_overlap);
      }
    return Outcome{worst >= 1.0 - 1e-9, fmt("min overlap %.15f over all columns, all families, N <= 32", worst)};
  });

  criterion(10, "arcsin precision", 0, [] {
    double worst = 0.0, worst_fx = 0.0;
    const auto cfg = FxConfig::standard(32);
    for (int i = 0; i <= 100000; ++i) {
      const double x = -0.5 + i * 1e-5;
      worst = std::max(worst, std::abs(arcsin_taylor_double(x, 5) - std::asin(x)));
      if (i % 100 == 0) {
        CostLedger l;
        worst_fx = std::max(worst_fx, std::abs(fx_decode(arcsin_taylor(x, 5, cfg, l).value) - std::asin(x)));
      }
    }
    const double bound = std::ldexp(1.0, -16);
    return Outcome{worst <= bound && worst_fx <= bound,
                   fmt("max |P(x) - arcsin x| = %.4g on 100001 points (bound %.4g); 32-bit fixed point %.4g", worst, bound, worst_fx)};
  });

  criterion(11, "Schroedinger solve", 0, [] {
    const auto h = solve_hermite(20, 1, harmonic_potential(), 5);
    double e1 = 0.0;
    for (std::size_t n = 0; n < 5; ++n) e1 = std::max(e1, std::abs(h.values[n] - (n + 0.5)));
    const auto g = solve_hermite(10, 2, harmonic_potential(), 1);
    const double e2 = std::abs(g.values[0] - 1.0);
    const std::vector<std::size_t> ladder{8, 12, 16, 20, 24, 28, 32};
    const auto rows = convergence_ladder(ladder, 64, quartic_potential(0.1), 3);
    bool mono = true;
    for (std::size_t i = 1; i < rows.size(); ++i) mono = mono && rows[i].max_error < rows[i - 1].max_error;
    return Outcome{e1 < 1e-8 && e2 < 1e-8 && mono,
                   fmt("1D harmonic %.3g, 2D ground state %.3g, quartic error %.3g -> %.3g monotone: %s", e1, e2, rows.front().max_error,
                       rows.back().max_error, mono ? "yes" : "no")};
  });

  criterion(12, "fixed-point cost accounting", 0, [] {
    const auto cfg = FxConfig::standard(16);
    const auto a = fx_encode(0.3, cfg), b = fx_encode(-0.45, cfg);
    CostLedger q, c;
    fx_mul(a, b, q, false, cfg);
    fx_mul(a, b, c, true, cfg);
    bool core_ok = true;
    for (int m : {8, 16, 32}) {
      const auto k = FxConfig::standard(m);
      CostLedger l;
      const auto x = fx_encode(0.4, k), bp = fx_encode(1.1, k), ap = fx_encode(-0.2, k), t = fx_encode(0.3, k);
      const auto kk = fx_add(ap, fx_mul(bp, x, l, false, k), l, false, k);
      fx_add(fx_encode(0.1, k), fx_mul(kk, t, l, false, k), l, true, k);
      fx_uncompute(l, mul_cost(m, m, false, k));
      fx_uncompute(l, add_cost(m, m, false, k));
      fx_uncompute(l, mul_cost(m, m, false, k));
      const auto mu = static_cast<std::uint64_t>(m);
      core_ok = core_ok && l.toffoli == 8 * mu * mu + 10 * mu;
    }
    return Outcome{q.toffoli == 512 && c.toffoli == 256 && core_ok,
                   fmt("16x16 mul %llu Toffoli, classical constant %llu, step core 8m^2+10m for m in {8,16,32}: %s",
                       static_cast<unsigned long long>(q.toffoli), static_cast<unsigned long long>(c.toffoli), core_ok ? "yes" : "no")};
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
