#pragma once

// Command-line front end.  Lives in a header so tests can drive the exact
// parse/run path of the tool.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dvrforge/cost_models.hpp"
#include "dvrforge/dvr_core.hpp"
#include "dvrforge/error.hpp"
#include "dvrforge/format.hpp"
#include "dvrforge/matrix_io.hpp"
#include "dvrforge/oracle_emulator.hpp"
#include "dvrforge/polyfam.hpp"
#include "dvrforge/quadrature.hpp"
#include "dvrforge/unitary_synthesis.hpp"

namespace dvrforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitTolerance = 3;
inline constexpr int kExitIo = 4;

/// Thrown by subcommands whose numerical check failed (exit 3).
class ToleranceFailure : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;  // quadrature build emulate estimate sweep synth solve
  std::string action;   // synth: verify-reflections angles arcsin
  std::string family = "hermite";
  std::size_t N = 8;
  std::size_t m = 16;
  std::size_t F = 4;
  std::size_t dims = 1;
  bool parity = false;
  bool dominant = false;
  bool general = false;  // angle trees without the parity shortcut
  bool half_load = false;
  std::string arith = "double";
  std::string convention = "section3";
  std::string unit = "toffoli";
  std::string method = "rec";
  std::string qrom = "select";
  std::string n_range = "16..16384";
  std::string m_range = "4..32";
  std::string f_strategy = "pow2";
  std::string potential = "harmonic";
  std::size_t eigs = 5;
  std::vector<std::size_t> n_ladder;
  std::size_t reference_n = 64;
  long long k = -1;  // -1: all columns
  std::size_t p_terms = 5;
  double tol = -1.0;  // negative: subcommand default
  std::uint64_t seed = 0;
  std::string out;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// ---------------------------------------------------------------------------
// Small grammars

/// `double` or `fx:m=16[,frac=14][,widening][,sum-first]`
inline Arithmetic parse_arithmetic(const std::string& s, std::size_t cost_m, CostConvention conv) {
  if (s == "double") return Arithmetic::double_precision(static_cast<int>(cost_m), conv);
  if (s.rfind("fx", 0) != 0) throw ParameterError("arith: expected 'double' or 'fx:m=<bits>[,...]', got '" + s + "'");
  int m = static_cast<int>(cost_m);
  std::optional<int> frac;
  FxMode mode = FxMode::Truncating;
  bool product_first = true;
  if (s.size() > 2) {
    if (s[2] != ':') throw ParameterError("arith: malformed '" + s + "'");
    std::stringstream ss(s.substr(3));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        if (item.rfind("m=", 0) == 0)
          m = std::stoi(item.substr(2));
        else if (item.rfind("frac=", 0) == 0)
          frac = std::stoi(item.substr(5));
        else if (item == "widening")
          mode = FxMode::Widening;
        else if (item == "truncating")
          mode = FxMode::Truncating;
        else if (item == "sum-first")
          product_first = false;
        else if (item == "product-first")
          product_first = true;
        else
          throw ParameterError("arith: unknown option '" + item + "'");
      } catch (const std::logic_error&) {
        throw ParameterError("arith: bad number in '" + item + "'");
      }
    }
  }
  return Arithmetic::fixed_point(FxConfig::make(m, frac.value_or(m - 2), mode, conv), product_first);
}

inline QromModel parse_qrom(const std::string& s) {
  if (s == "select") return QromModel::Select;
  if (s == "selswap") return QromModel::SelSwap;
  throw ParameterError("qrom: expected select or selswap, got '" + s + "'");
}

inline FStrategy parse_f_strategy(const std::string& s) {
  if (s == "pow2") return FStrategy::PowerOfTwo;
  if (s == "continuous") return FStrategy::Continuous;
  throw ParameterError("f-strategy: expected pow2 or continuous, got '" + s + "'");
}

inline std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& s, const char* what) {
  auto number = [&](std::string_view t) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
      throw ParameterError(std::string(what) + ": expected 'lo..hi', got '" + s + "'");
    return v;
  };
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const auto v = number(s);
    return {v, v};
  }
  const std::string_view sv(s);
  const auto lo = number(sv.substr(0, dots)), hi = number(sv.substr(dots + 2));
  if (lo > hi) throw ParameterError(std::string(what) + ": empty range '" + s + "'");
  return {lo, hi};
}

struct PotentialSpec {
  std::string kind;  // harmonic quartic file
  double lambda = 0.0;
  std::string path;
};

inline PotentialSpec parse_potential(const std::string& s) {
  if (s == "harmonic") return {"harmonic", 0.0, {}};
  if (s.rfind("quartic:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double l = std::stod(s.substr(8), &used);
      if (used != s.size() - 8) throw std::invalid_argument("trailing");
      return {"quartic", l, {}};
    } catch (const std::logic_error&) {
      throw ParameterError("potential: bad lambda in '" + s + "'");
    }
  }
  if (s.rfind("file:", 0) == 0 && s.size() > 5) return {"file", 0.0, s.substr(5)};
  throw ParameterError("potential: expected harmonic, quartic:<lambda> or file:<path>, got '" + s + "'");
}

/// Downstream constraints, checked before anything runs.
inline void validate(const RunConfig& c) {
  auto fam = [&] { return parse_family(c.family); };
  auto pow2 = [](std::size_t v, const char* what) {
    if (v < 1 || !std::has_single_bit(v)) throw ParameterError(std::string(what) + " must be a power of two");
  };
  if (c.command == "quadrature" || c.command == "build") {
    fam();
    if (c.N < 1) throw ParameterError("--n must be >= 1");
  } else if (c.command == "emulate") {
    const auto f = fam();
    SegmentSpec::make(c.N, c.F);
    parse_arithmetic(c.arith, c.m, parse_convention(c.convention));
    parse_qrom(c.qrom);
    if (c.half_load && !f.is_parity_conserving()) throw ParameterError("--half-load needs a parity-conserving family");
  } else if (c.command == "estimate") {
    const Method meth = parse_method(c.method);
    const Unit u = parse_unit(c.unit);
    if (meth == Method::LKS || meth == Method::REC || meth == Method::REC_LKS || meth == Method::REC_PARITY)
      cost_oracle(meth, c.N, c.m, c.F, c.parity, c.dominant, u);
    else
      cost_unitary(meth, c.N, c.m, c.p_terms, c.dominant, u);
  } else if (c.command == "sweep") {
    const auto [nlo, nhi] = parse_range(c.n_range, "--n");
    const auto [mlo, mhi] = parse_range(c.m_range, "--m");
    pow2(nlo, "--n range start");
    if (nlo < 4) throw ParameterError("--n range must start at >= 4");
    if (mlo < 1) throw ParameterError("--m range must start at >= 1");
    (void)nhi;
    (void)mhi;
    parse_f_strategy(c.f_strategy);
  } else if (c.command == "synth") {
    fam();
    pow2(c.N, "--n");
    if (c.action == "angles" && c.k >= static_cast<long long>(c.N)) throw ParameterError("--k must be < N");
    if (c.action == "arcsin" || c.action == "angles") {
      if (c.m < 3 || c.m > 62) throw ParameterError("--m must be in [3, 62]");
    }
    if (c.action == "arcsin" && c.p_terms < 1) throw ParameterError("--p-terms must be >= 1");
  } else if (c.command == "solve") {
    if (fam().kind() != FamilyKind::Hermite)
      throw ParameterError("solve: only the hermite family has a kinetic matrix (harmonic VBR)");
    if (c.N < 1 || c.dims < 1) throw ParameterError("--n and --dims must be >= 1");
    parse_potential(c.potential);
    std::size_t total = 1;
    for (std::size_t d = 0; d < c.dims; ++d) total *= c.N;
    if (c.eigs < 1 || c.eigs > total) throw ParameterError("--eigs must be in [1, N^dims]");
    if (!c.n_ladder.empty()) {
      if (c.dims != 1) throw ParameterError("--n-ladder is one-dimensional only");
      if (parse_potential(c.potential).kind == "file") throw ParameterError("--n-ladder needs an analytic potential");
      for (std::size_t n : c.n_ladder)
        if (n < c.eigs) throw ParameterError("--n-ladder entries must be >= --eigs");
      if (c.reference_n < c.eigs) throw ParameterError("--reference must be >= --eigs");
    }
  } else {
    throw ParameterError("unknown subcommand '" + c.command + "'");
  }
}

// ---------------------------------------------------------------------------
// Option binding

inline const char* kFamilyHelp =
    "Family grammar: name[:p1,p2] with name one of hermite, legendre, chebyshev1, chebyshev2, "
    "laguerre[:alpha], jacobi:alpha,beta (alpha, beta > -1).";

namespace detail {

inline void family_opt(CLI::App* s, RunConfig& c) { s->add_option("--family", c.family, kFamilyHelp)->capture_default_str(); }
inline void out_opt(CLI::App* s, RunConfig& c, const char* what) { s->add_option("--out", c.out, what); }

}  // namespace detail

/// Builds the CLI11 tree bound to `c`.
inline void bind(CLI::App& app, RunConfig& c) {
  app.description("DVR toolkit: matrices, oracle emulation, cost models, synthesis checks, Schrödinger solves.");
  app.footer(std::string(kFamilyHelp) + "\nDVRFORGE_THREADS caps worker threads.\nExit codes: 0 ok, 2 invalid input, 3 tolerance failure, 4 I/O.");
  app.require_subcommand(1);

  auto* q = app.add_subcommand("quadrature", "nodes and weights as CSV");
  detail::family_opt(q, c);
  q->add_option("--n", c.N, "number of points")->capture_default_str();
  detail::out_opt(q, c, "CSV path (default: stdout)");

  auto* b = app.add_subcommand("build", "DVR matrix: PREFIX.dvr1, PREFIX.csv, PREFIX.json");
  detail::family_opt(b, c);
  b->add_option("--n", c.N, "matrix size")->capture_default_str();
  detail::out_opt(b, c, "output prefix (default: dvr)");

  auto* e = app.add_subcommand("emulate", "segmented recursive oracle emulation");
  detail::family_opt(e, c);
  e->add_option("--n", c.N, "matrix size (power of two)")->capture_default_str();
  e->add_option("--f", c.F, "segment size F (power of two, 4 <= F <= N)")->capture_default_str();
  e->add_option("--m", c.m, "register width used for cost charging in double mode")->capture_default_str();
  e->add_option("--arith", c.arith, "double | fx:m=<bits>[,frac=<bits>][,widening][,sum-first]")->capture_default_str();
  e->add_option("--convention", c.convention, "section3 | appendixC")->capture_default_str();
  e->add_option("--qrom", c.qrom, "select | selswap")->capture_default_str();
  e->add_flag("--half-load", c.half_load, "load only rows p < N/2 (parity families)");
  e->add_option("--tol", c.tol, "max |error| (default 1e-8 in double mode, none in fixed point)");
  detail::out_opt(e, c, "output prefix (default: emulation)");

  auto* est = app.add_subcommand("estimate", "closed-form cost report (JSON)");
  est->add_option("--method", c.method, "lks | rec | rec-lks | rec-parity | reflections | be-qrom | be-arith")->capture_default_str();
  est->add_option("--n", c.N, "matrix size")->capture_default_str();
  est->add_option("--m", c.m, "bits of precision")->capture_default_str();
  est->add_option("--f", c.F, "segment size")->capture_default_str();
  est->add_option("--p-terms", c.p_terms, "Taylor terms (be-arith)")->capture_default_str();
  est->add_flag("--parity", c.parity, "parity-conserving family (halved loading)");
  est->add_flag("--dominant", c.dominant, "dominant terms only");
  est->add_option("--unit", c.unit, "toffoli | tgate")->capture_default_str();
  detail::out_opt(est, c, "JSON path (default: stdout)");

  auto* sw = app.add_subcommand("sweep", "LKS vs REC volume grid (CSV) and advantage boundary");
  sw->add_option("--n", c.n_range, "N range lo..hi, powers of two")->capture_default_str();
  sw->add_option("--m", c.m_range, "m range lo..hi, every integer")->capture_default_str();
  sw->add_option("--f-strategy", c.f_strategy, "pow2 | continuous")->capture_default_str();
  detail::out_opt(sw, c, "CSV path (default: stdout); boundary goes to PATH.boundary.json");

  auto* sy = app.add_subcommand("synth", "unitary synthesis checks");
  sy->require_subcommand(1);
  auto* vr = sy->add_subcommand("verify-reflections", "product of reflections vs the anti-block DVR matrix");
  auto* an = sy->add_subcommand("angles", "state-preparation angle trees (JSON)");
  auto* ar = sy->add_subcommand("arcsin", "arcsin oracle and Taylor-series precision");
  for (auto* s : {vr, an, ar}) {
    detail::family_opt(s, c);
    s->add_option("--n", c.N, "matrix size (power of two)")->capture_default_str();
    detail::out_opt(s, c, "JSON path (default: stdout)");
  }
  vr->add_option("--tol", c.tol, "residual tolerance (default 1e-9)");
  vr->add_option("--seed", c.seed, "seed for the shuffled-order check")->capture_default_str();
  an->add_option("--k", c.k, "column (default: all)");
  an->add_option("--m", c.m, "rotation precision for the ledger")->capture_default_str();
  an->add_flag("--general", c.general, "full-length tree without the parity mirror");
  ar->add_option("--m", c.m, "oracle register width")->capture_default_str();
  ar->add_option("--p-terms", c.p_terms, "Taylor terms")->capture_default_str();
  ar->add_option("--tol", c.tol, "Taylor error bound (default 2^-16)");

  auto* so = app.add_subcommand("solve", "Schrödinger eigenvalues in a Hermite DVR");
  detail::family_opt(so, c);
  so->add_option("--n", c.N, "points per dimension")->capture_default_str();
  so->add_option("--dims", c.dims, "dimensions")->capture_default_str();
  so->add_option("--potential", c.potential, "harmonic | quartic:<lambda> | file:<csv of grid values>")->capture_default_str();
  so->add_option("--eigs", c.eigs, "number of eigenvalues")->capture_default_str();
  so->add_option("--n-ladder", c.n_ladder, "comma-separated N values for a convergence table")->delimiter(',');
  so->add_option("--reference", c.reference_n, "reference N for the ladder")->capture_default_str();
  detail::out_opt(so, c, "CSV path (default: stdout); ladder goes to PATH.convergence.csv");
}

/// Canonical argument list (without program name) that parses back to `c`.
inline std::vector<std::string> to_args(const RunConfig& c) {
  std::vector<std::string> a{c.command};
  auto opt = [&](const char* name, const std::string& v) {
    a.push_back(name);
    a.push_back(v);
  };
  auto num = [&](const char* name, auto v) { opt(name, std::to_string(v)); };
  auto flag = [&](const char* name, bool v) {
    if (v) a.push_back(name);
  };
  auto tol = [&] {
    if (c.tol >= 0) opt("--tol", shortest_repr(c.tol));
  };
  auto out = [&] {
    if (!c.out.empty()) opt("--out", c.out);
  };
  if (c.command == "quadrature" || c.command == "build") {
    opt("--family", c.family);
    num("--n", c.N);
  } else if (c.command == "emulate") {
    opt("--family", c.family);
    num("--n", c.N);
    num("--f", c.F);
    num("--m", c.m);
    opt("--arith", c.arith);
    opt("--convention", c.convention);
    opt("--qrom", c.qrom);
    flag("--half-load", c.half_load);
    tol();
  } else if (c.command == "estimate") {
    opt("--method", c.method);
    num("--n", c.N);
    num("--m", c.m);
    num("--f", c.F);
    num("--p-terms", c.p_terms);
    flag("--parity", c.parity);
    flag("--dominant", c.dominant);
    opt("--unit", c.unit);
  } else if (c.command == "sweep") {
    opt("--n", c.n_range);
    opt("--m", c.m_range);
    opt("--f-strategy", c.f_strategy);
  } else if (c.command == "synth") {
    a.push_back(c.action);
    opt("--family", c.family);
    num("--n", c.N);
    if (c.action == "verify-reflections") {
      tol();
      num("--seed", c.seed);
    } else if (c.action == "angles") {
      if (c.k >= 0) num("--k", c.k);
      num("--m", c.m);
      flag("--general", c.general);
    } else {
      num("--m", c.m);
      num("--p-terms", c.p_terms);
      tol();
    }
  } else if (c.command == "solve") {
    opt("--family", c.family);
    num("--n", c.N);
    num("--dims", c.dims);
    opt("--potential", c.potential);
    num("--eigs", c.eigs);
    if (!c.n_ladder.empty()) {
      std::string s;
      for (std::size_t i = 0; i < c.n_ladder.size(); ++i) s += (i ? "," : "") + std::to_string(c.n_ladder[i]);
      opt("--n-ladder", s);
    }
    num("--reference", c.reference_n);
  }
  out();
  return a;
}

inline std::string to_text(const RunConfig& c) {
  std::string s;
  for (const auto& a : to_args(c)) {
    if (!s.empty()) s += ' ';
    s += a;
  }
  return s;
}

struct ParseOutcome {
  std::optional<RunConfig> config;
  int exit_code = kExitOk;
};

/// args exclude the program name.  Help or errors leave `config` empty.
inline ParseOutcome parse_command_line(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"dvrforge", "dvrforge"};
  bind(app, c);
  std::vector<std::string> storage{"dvrforge"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? kExitOk : kExitValidation};
  }
  for (auto* sub : app.get_subcommands()) {
    c.command = sub->get_name();
    for (auto* inner : sub->get_subcommands()) c.action = inner->get_name();
  }
  try {
    validate(c);
  } catch (const Error& e) {
    err << "dvrforge: " << e.what() << "\n";
    return {std::nullopt, kExitValidation};
  }
  return {c, kExitOk};
}

// ---------------------------------------------------------------------------
// Subcommands

namespace detail {

inline void write_file(const std::string& path, const std::string& content, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw IoError("write failed for '" + path + "'");
}

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty())
    out << content;
  else
    write_file(path, content);
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline double tol_or(const RunConfig& c, double d) { return c.tol >= 0 ? c.tol : d; }

}  // namespace detail

inline int cmd_quadrature(const RunConfig& c, std::ostream& out) {
  const auto q = nodes_weights(parse_family(c.family), c.N);
  std::ostringstream os;
  write_quadrature_csv(os, q);
  detail::emit(c.out, os.str(), out);
  return kExitOk;
}

inline int cmd_build(const RunConfig& c, std::ostream& out) {
  const auto fam = parse_family(c.family);
  const auto t = build_dvr(fam, c.N);
  const std::string prefix = c.out.empty() ? "dvr" : c.out;
  std::ostringstream bin, csv;
  write_dvr1(bin, t.entries, fam.tag());
  write_csv(csv, t.entries);
  nlohmann::json rep = {{"family", fam.tag()},
                        {"N", c.N},
                        {"unitarity_defect", t.unitarity_defect},
                        {"kronecker_residual", kronecker_residual(t)},
                        {"parity_conserving", fam.is_parity_conserving()},
                        {"parity_residual", fam.is_parity_conserving() ? nlohmann::json(parity_residual(t)) : nlohmann::json(nullptr)},
                        {"warnings", t.warnings},
                        {"files", {prefix + ".dvr1", prefix + ".csv", prefix + ".json"}}};
  detail::write_file(prefix + ".dvr1", bin.str(), true);
  detail::write_file(prefix + ".csv", csv.str());
  detail::write_file(prefix + ".json", detail::dump(rep));
  out << detail::dump(rep);
  return kExitOk;
}

inline int cmd_emulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto fam = parse_family(c.family);
  const auto spec = SegmentSpec::make(c.N, c.F);
  const auto arith = parse_arithmetic(c.arith, c.m, parse_convention(c.convention));
  const auto ref = build_dvr(fam, c.N);
  const auto rep = run_recursion(ref, spec, arith, parse_qrom(c.qrom), c.half_load);
  const std::string prefix = c.out.empty() ? "emulation" : c.out;
  auto j = rep.to_json();
  const std::optional<double> tol = arith.fixed ? (c.tol >= 0 ? std::optional<double>(c.tol) : std::nullopt)
                                                : std::optional<double>(detail::tol_or(c, 1e-8));
  j["tolerance"] = tol ? nlohmann::json(*tol) : nlohmann::json(nullptr);
  const bool ok = !tol || rep.max_abs_error <= *tol;
  j["within_tolerance"] = ok;
  std::ostringstream bin;
  write_dvr1(bin, rep.matrix_out, fam.tag());
  detail::write_file(prefix + ".json", detail::dump(j));
  detail::write_file(prefix + ".dvr1", bin.str(), true);
  out << detail::dump(j);
  if (!ok) {
    err << "dvrforge: emulation error " << rep.max_abs_error << " exceeds tolerance " << *tol << "\n";
    return kExitTolerance;
  }
  return kExitOk;
}

inline int cmd_estimate(const RunConfig& c, std::ostream& out) {
  const Method meth = parse_method(c.method);
  const Unit u = parse_unit(c.unit);
  CostReport r;
  if (meth == Method::LKS || meth == Method::REC || meth == Method::REC_LKS || meth == Method::REC_PARITY)
    r = cost_oracle(meth, c.N, c.m, c.F, c.parity, c.dominant, u);
  else
    r = cost_unitary(meth, c.N, c.m, c.p_terms, c.dominant, u);
  detail::emit(c.out, detail::dump(r.to_json()), out);
  return kExitOk;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto [nlo, nhi] = parse_range(c.n_range, "--n");
  const auto [mlo, mhi] = parse_range(c.m_range, "--m");
  const auto res = volume_sweep(power_range(nlo, nhi), int_range(mlo, mhi), parse_f_strategy(c.f_strategy));
  detail::emit(c.out, res.to_csv(), out);
  auto bj = res.to_json()["boundary"];
  nlohmann::json summary = {{"boundary", bj}, {"monotone_in_N", advantage_monotone_in_n(res)}};
  if (!c.out.empty())
    detail::write_file(c.out + ".boundary.json", detail::dump(summary));
  else
    err << summary.dump() << "\n";
  return kExitOk;
}

inline int cmd_synth(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto fam = parse_family(c.family);
  const auto t = build_dvr(fam, c.N);
  if (c.action == "verify-reflections") {
    const double tol = detail::tol_or(c, 1e-9);
    auto rep = verify_reflections(t.entries, tol);
    std::vector<std::size_t> order(c.N);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(c.seed);
    std::shuffle(order.begin(), order.end(), rng);
    const double shuffled = max_abs_diff(rep.product, reflection_product(t.entries, order));
    auto j = rep.to_json();
    j["family"] = fam.tag();
    j["N"] = c.N;
    j["tolerance"] = tol;
    j["shuffled_order_delta"] = shuffled;
    j["seed"] = c.seed;
    detail::emit(c.out, detail::dump(j), out);
    if (rep.residual_adjoint > tol || rep.unitarity_defect > tol) {
      err << "dvrforge: reflection product does not match the DVR anti-block matrix\n";
      return kExitTolerance;
    }
    return kExitOk;
  }
  if (c.action == "angles") {
    const bool parity = fam.is_parity_conserving() && !c.general;
    nlohmann::json cols = nlohmann::json::array();
    const std::size_t lo = c.k >= 0 ? static_cast<std::size_t>(c.k) : 0;
    const std::size_t hi = c.k >= 0 ? lo + 1 : c.N;
    double dev = 0.0;
    std::uint64_t toff = 0;
    for (std::size_t k = lo; k < hi; ++k) {
      const auto tree = angle_tree(t.entries, k, parity);
      const auto sim = simulate_state_prep(tree, static_cast<int>(c.m));
      const auto w = reflection_vector(t.entries, k);
      for (std::size_t i = 0; i < w.size(); ++i) dev = std::max(dev, std::abs(w[i] - sim.state[i]));
      toff = sim.ledger.toffoli;
      cols.push_back(tree.to_json());
    }
    nlohmann::json j = {{"family", fam.tag()},
                        {"N", c.N},
                        {"parity_mode", parity},
                        {"trees", cols},
                        {"max_state_deviation", dev},
                        {"ledger_toffoli_per_column", toff}};
    detail::emit(c.out, detail::dump(j), out);
    if (dev > 1e-8) {
      err << "dvrforge: simulated state deviates from target by " << dev << "\n";
      return kExitTolerance;
    }
    return kExitOk;
  }
  // arcsin
  const int m = static_cast<int>(c.m);
  const auto th = arcsin_oracle_values(t.entries, m);
  double rot_err = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i)
    rot_err = std::max(rot_err, std::abs(controlled_rotation_amplitude(th[i]) - t.entries.data()[i]));
  const double rot_bound = std::ldexp(1.0, -m + 2);
  const std::size_t samples = 100000;
  double poly_err = 0.0;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double x = -kArcsinTaylorXMax + 2.0 * kArcsinTaylorXMax * static_cast<double>(i) / samples;
    poly_err = std::max(poly_err, std::abs(arcsin_taylor_double(x, c.p_terms) - std::asin(x)));
  }
  const double bound = detail::tol_or(c, std::ldexp(1.0, -16));
  std::size_t above = 0;
  for (double v : t.entries.data())
    if (std::abs(v) > kArcsinTaylorXMax) ++above;
  nlohmann::json j = {{"family", fam.tag()},
                      {"N", c.N},
                      {"m", m},
                      {"rotation_max_error", rot_err},
                      {"rotation_bound", rot_bound},
                      {"p_terms", c.p_terms},
                      {"coefficients", arcsin_coefficients(c.p_terms)},
                      {"taylor_max_error", poly_err},
                      {"taylor_bound", bound},
                      {"x_max", kArcsinTaylorXMax},
                      {"entries_above_x_max", above},
                      {"samples", samples + 1}};
  detail::emit(c.out, detail::dump(j), out);
  if (rot_err > rot_bound || poly_err > bound) {
    err << "dvrforge: arcsin precision check failed\n";
    return kExitTolerance;
  }
  return kExitOk;
}

inline std::vector<double> read_potential_samples(const std::string& path, std::size_t expected) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open potential file '" + path + "'");
  const Matrix m = read_csv_matrix(f);
  std::vector<double> v(m.data().begin(), m.data().end());
  if (v.size() != expected)
    throw ShapeError("potential file has " + std::to_string(v.size()) + " values, grid has " + std::to_string(expected));
  return v;
}

inline int cmd_solve(const RunConfig& c, std::ostream& out) {
  const auto ps = parse_potential(c.potential);
  std::vector<DvrMatrix> axes;
  std::vector<Matrix> kin;
  for (std::size_t d = 0; d < c.dims; ++d) {
    axes.push_back(build_dvr(PolynomialFamily::hermite(), c.N));
    kin.push_back(harmonic_kinetic_vbr(c.N));
  }
  const Potential v = ps.kind == "quartic" ? quartic_potential(ps.lambda) : harmonic_potential();
  std::size_t total = 1;
  for (std::size_t d = 0; d < c.dims; ++d) total *= c.N;
  auto h = make_hamiltonian(std::move(axes), std::move(kin), v);
  if (ps.kind == "file") h.potential_diag = read_potential_samples(ps.path, total);
  const auto eig = solve_schrodinger(h, c.eigs);
  std::string csv = "index,eigenvalue\n";
  for (std::size_t i = 0; i < eig.values.size(); ++i) csv += std::to_string(i) + "," + shortest_repr(eig.values[i]) + "\n";
  detail::emit(c.out, csv, out);
  if (!c.n_ladder.empty()) {
    const auto rows = convergence_ladder(c.n_ladder, c.reference_n, v, c.eigs);
    std::string lc = "N,max_error";
    for (std::size_t i = 0; i < c.eigs; ++i) lc += ",e" + std::to_string(i);
    lc += "\n";
    for (const auto& r : rows) {
      lc += std::to_string(r.N) + "," + shortest_repr(r.max_error);
      for (double e : r.values) lc += "," + shortest_repr(e);
      lc += "\n";
    }
    if (c.out.empty())
      out << "# convergence vs N=" << c.reference_n << "\n" << lc;
    else
      detail::write_file(c.out + ".convergence.csv", lc);
  }
  return kExitOk;
}

inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "quadrature") return cmd_quadrature(c, out);
    if (c.command == "build") return cmd_build(c, out);
    if (c.command == "emulate") return cmd_emulate(c, out, err);
    if (c.command == "estimate") return cmd_estimate(c, out);
    if (c.command == "sweep") return cmd_sweep(c, out, err);
    if (c.command == "synth") return cmd_synth(c, out, err);
    if (c.command == "solve") return cmd_solve(c, out);
    throw ParameterError("unknown subcommand '" + c.command + "'");
  } catch (const IoError& e) {
    err << "dvrforge: " << e.what() << "\n";
    return kExitIo;
  } catch (const ToleranceFailure& e) {
    err << "dvrforge: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const SynthesisError& e) {
    err << "dvrforge: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const NumericError& e) {
    err << "dvrforge: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const Error& e) {
    err << "dvrforge: " << e.what() << "\n";
    return kExitValidation;
  }
}

inline int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto parsed = parse_command_line(args, out, err);
  if (!parsed.config) return parsed.exit_code;
  return run(*parsed.config, out, err);
}

}  // namespace dvrforge::cli
