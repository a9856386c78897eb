// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

// lbm: command-line front end for the lbmult library.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "lbmult/lbmult.hpp"

namespace {

using lbmult::io::json;
namespace io = lbmult::io;

enum ExitCode { kOk = 0, kInvalid = 2, kPrecondition = 3, kNumerical = 4 };

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string config;
  std::string out = "-";
};

void emit(const Globals& g, const json& j) {
  const std::string text = io::stable_dump(j) + "\n";
  if (g.out.empty() || g.out == "-") std::fwrite(text.data(), 1, text.size(), stdout);
  else io::write_text(g.out, text);
}

/// "LO,HI" applied to every axis.
lbmult::Box parse_box(const std::string& s, int d) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw lbmult::InvalidArgument("expected LO,HI, got '" + s + "'");
  double lo = 0.0, hi = 0.0;
  try {
    lo = std::stod(s.substr(0, comma));
    hi = std::stod(s.substr(comma + 1));
  } catch (const std::exception&) {
    throw lbmult::InvalidArgument("expected LO,HI, got '" + s + "'");
  }
  if (!(lo < hi)) throw lbmult::InvalidArgument("empty box '" + s + "'");
  return lbmult::Box::cube(d, lo, hi);
}

json sequence_or_null(const lbmult::LatticeSequence& s) { return s.empty() ? json(nullptr) : io::sequence_to_json(s); }

json complex_json(lbmult::Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

int run_bnorm(const Globals& g, const std::string& matrix, int restarts, double tol, bool oracle, std::int64_t budget) {
  const auto A = io::read_matrix(matrix);
  lbmult::AscentOptions opt;
  opt.restarts = restarts;
  opt.seed = g.seed.value_or(0);
  opt.tol = tol;
  opt.threads = g.threads;
  const auto est = lbmult::bnorm_ascent(A, opt);
  json j{{"lower", est.lower},
         {"upper", est.upper},
         {"restarts_used", est.restarts_used},
         {"converged", est.converged},
         {"witness",
          {{"F", sequence_or_null(est.witness.F)},
           {"G", sequence_or_null(est.witness.G)},
           {"H", sequence_or_null(est.witness.H)},
           {"value", est.witness.value}}}};
  if (oracle) j["oracle"] = lbmult::bnorm_oracle(A, budget, opt.seed);
  emit(g, j);
  return kOk;
}

int run_apply(const Globals& g, const std::string& matrix, const std::string& bump, const std::string& f_path,
              const std::string& g_path, int m, const std::string& xbox, int x_density, bool direct, bool raw) {
  const auto A = io::read_matrix(matrix);
  const auto Phi = io::read_bump(bump);
  const auto sigma = lbmult::assemble_sigma(A, Phi, m);
  const lbmult::BandLimitedInput f(io::read_field(f_path));
  const lbmult::BandLimitedInput h(io::read_field(g_path));
  const int density = x_density ? x_density : lbmult::default_output_density(sigma);
  const lbmult::GridBox xg =
      xbox.empty() ? lbmult::default_output_grid(sigma) : lbmult::GridBox::exact(parse_box(xbox, A.dim()), density);
  const auto T = lbmult::apply_T(sigma, f, h, xg, {direct, g.threads});
  if (g.out.empty() || g.out == "-") {
    const std::string text = io::stable_dump(io::field_to_json(T)) + "\n";
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    io::write_field(g.out, T, raw);
  }
  return kOk;
}

int run_amalgam(const Globals& g, const std::string& field, const std::string& q_text) {
  const auto f = io::read_field(field);
  const double q = io::parse_q(q_text);
  const auto a = lbmult::amalgam_norm(f, q);
  json cubes = json::array();
  for (const auto& [nu, v] : a.per_cube) cubes.push_back({{"nu", nu.coords}, {"l2", v}});
  emit(g, {{"q", io::q_to_json(q)}, {"value", a.value}, {"per_cube", cubes}});
  return kOk;
}

int run_check_a(const Globals& g, const std::string& bump, const std::string& window, int m, double tol,
                const std::string& theta_out) {
  const auto phi = io::read_bump(bump);
  const lbmult::Box w = window.empty() ? phi.support().rounded_to_half_integers() : parse_box(window, phi.dim());
  const auto r = lbmult::check_condition_a(phi, w, m, tol);
  json translates = json::array();
  for (const auto& t : r.translates) translates.push_back(t.coords);
  json j{{"verdict", lbmult::to_string(r.verdict)},
         {"window", io::box_to_json(r.window.box())},
         {"m", m},
         {"translates", translates},
         {"rank", r.rank},
         {"rank_refined", r.rank_refined},
         {"singular_values", r.rank_data},
         {"residual", r.residual},
         {"residual_refined", r.residual_refined},
         {"null_component", r.null_component},
         {"note", r.note}};
  if (r.obstruction) {
    json c = json::array();
    for (const auto& [alpha, v] : *r.obstruction) c.push_back({{"alpha", alpha.coords}, {"re", v.real()}, {"im", v.imag()}});
    j["obstruction"] = c;
    j["obstruction_period"] = r.obstruction_period;
  }
  if (r.theta && !theta_out.empty()) {
    io::write_field(theta_out, *r.theta);
    j["theta_file"] = theta_out;
  }
  emit(g, j);
  if (r.verdict == lbmult::Verdict::fails) return kPrecondition;
  return kOk;
}

int run_expand(const Globals& g, const std::string& bump, double tol, bool with_terms) {
  const auto Phi = io::read_bump(bump);
  const auto ex = lbmult::separable_expansion(Phi, tol);
  json j{{"n", ex.n}, {"T", ex.T}, {"N", ex.N}, {"cap", ex.cap}, {"error", ex.error},
         {"term_count", ex.terms.size()}, {"shell_maxima", lbmult::shell_maxima(ex)}};
  if (with_terms) {
    json t = json::array();
    for (const auto& term : ex.terms)
      t.push_back({{"k", term.k.coords}, {"l", term.l.coords}, {"re", term.b.real()}, {"im", term.b.imag()}});
    j["terms"] = t;
  }
  emit(g, j);
  return kOk;
}

int run_witness(const Globals& g, const std::string& matrix, int m, int x_m, const std::string& fs, const std::string& gs,
                const std::string& hs, int restarts) {
  const auto A = io::read_matrix(matrix);
  const lbmult::WitnessKit kit(A.dim());
  lbmult::AscentOptions opt;
  opt.restarts = restarts;
  opt.seed = g.seed.value_or(0);
  opt.threads = g.threads;
  const auto est = lbmult::bnorm_ascent(A, opt);
  lbmult::LatticeSequence F = est.witness.F, G = est.witness.G, H = est.witness.H;
  const bool custom = !fs.empty() || !gs.empty() || !hs.empty();
  if (custom) {
    if (fs.empty() || gs.empty() || hs.empty())
      throw lbmult::InvalidArgument("witness: --seq-f, --seq-g and --seq-h go together");
    F = io::read_sequence(fs);
    G = io::read_sequence(gs);
    H = io::read_sequence(hs);
  }
  if (A.empty()) {
    emit(g, {{"pairing", complex_json({})}, {"trilinear", complex_json({})}, {"abs_error", 0.0}, {"certificate", 0.0},
             {"kit_constants", {{"theta_l2", kit.theta_l2()}, {"c0", kit.c0()}, {"kappa", kit.kappa()}, {"h_l2", 0.0}}}});
    return kOk;
  }
  const lbmult::ApplyOptions ao{false, g.threads};
  const lbmult::Complex p = lbmult::pairing(A, kit, F, G, H, m, x_m, ao);
  const lbmult::Complex t = lbmult::trilinear_value(A, F, G, H);
  const auto cert = lbmult::lower_bound_certificate(A, kit, est, m, x_m, ao);
  const double h_l2 = lbmult::build_h(kit, H, x_m ? x_m : m).l2;
  emit(g, {{"pairing", complex_json(p)},
           {"trilinear", complex_json(t)},
           {"abs_error", std::abs(p - t)},
           {"certificate", cert.value},
           {"bnorm_lower", est.lower},
           {"kit_constants", {{"theta_l2", kit.theta_l2()}, {"c0", kit.c0()}, {"kappa", kit.kappa()}, {"h_l2", h_l2}}}});
  return kOk;
}

int run_verify(const Globals& g, const std::string& format) {
  lbmult::ExperimentConfig cfg;
  if (!g.config.empty()) cfg = lbmult::config_from_json(io::read_json(g.config));
  if (g.seed) cfg.seed = *g.seed;
  cfg.threads = g.threads;
  if (!format.empty()) cfg.format = format;
  if (g.out != "-") cfg.output = g.out;
  const auto rep = lbmult::run_equivalence(cfg);
  const std::string text = lbmult::emit_report(rep, cfg.format, cfg.output);
  if (cfg.output.empty() || cfg.output == "-") std::fwrite(text.data(), 1, text.size(), stdout);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lbm: lattice bump multipliers"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "experiment config (JSON)");
  app.add_option("-o,--out", g.out, "output path, - for stdout");

  std::string matrix, bump, window, field, q = "2", f_path, g_path, xbox, seq_f, seq_g, seq_h, theta_out, format;
  int restarts = 32, m = 64, x_density = 0, x_m = 0;
  double tol = 1e-10;
  bool oracle = false, direct = false, raw = false, terms = false;
  std::int64_t budget = 1000000;

  auto* bnorm = app.add_subcommand("bnorm", "estimate ||A||_B");
  bnorm->add_option("--matrix", matrix)->required();
  bnorm->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  bnorm->add_option("--tol", tol);
  bnorm->add_flag("--oracle", oracle, "also run the random-search oracle");
  bnorm->add_option("--budget", budget, "oracle sample budget");

  auto* apply = app.add_subcommand("apply", "evaluate T_sigma(f, g)");
  apply->add_option("--matrix", matrix)->required();
  apply->add_option("--bump", bump)->required();
  apply->add_option("--f", f_path)->required();
  apply->add_option("--g", g_path)->required();
  apply->add_option("--m", m);
  apply->add_option("--xbox", xbox, "LO,HI");
  apply->add_option("--x-density", x_density);
  apply->add_flag("--direct", direct, "direct quadrature instead of FFT");
  apply->add_flag("--raw", raw, "write raw float64 sidecar");

  auto* amalgam = app.add_subcommand("amalgam", "(L^2, l^q) norm of a sampled field");
  amalgam->add_option("--field", field)->required();
  amalgam->add_option("--q", q);

  auto* check_a = app.add_subcommand("check-a", "condition (A) verdict on a window");
  check_a->add_option("--bump", bump)->required();
  check_a->add_option("--window", window, "LO,HI");
  check_a->add_option("--m", m);
  check_a->add_option("--tol", tol);
  check_a->add_option("--theta-out", theta_out, "write the dual window as a sampled field");

  auto* expand = app.add_subcommand("expand", "separable Fourier expansion of Phi");
  expand->add_option("--bump", bump)->required();
  expand->add_option("--tol", tol);
  expand->add_flag("--terms", terms, "include the term list");

  auto* witness = app.add_subcommand("witness", "pairing identity and witness certificate");
  witness->add_option("--matrix", matrix)->required();
  witness->add_option("--m", m);
  witness->add_option("--x-m", x_m, "output grid density (default m)");
  witness->add_option("--seq-f", seq_f);
  witness->add_option("--seq-g", seq_g);
  witness->add_option("--seq-h", seq_h);
  witness->add_option("--restarts", restarts)->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "run the equivalence experiment");
  verify->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*bnorm) return run_bnorm(g, matrix, restarts, bnorm->count("--tol") ? tol : 1e-10, oracle, budget);
    if (*apply) return run_apply(g, matrix, bump, f_path, g_path, m, xbox, x_density, direct, raw);
    if (*amalgam) return run_amalgam(g, field, q);
    if (*check_a) return run_check_a(g, bump, window, check_a->count("--m") ? m : 128, check_a->count("--tol") ? tol : 1e-8, theta_out);
    if (*expand) return run_expand(g, bump, expand->count("--tol") ? tol : 1e-6, terms);
    if (*witness) return run_witness(g, matrix, m, x_m, seq_f, seq_g, seq_h, restarts);
    if (*verify) return run_verify(g, format);
  } catch (const lbmult::InvalidArgument& e) {
    std::cerr << "lbm: invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const lbmult::PreconditionFailure& e) {
    std::cerr << "lbm: precondition failure: " << e.what() << "\n";
    return kPrecondition;
  } catch (const lbmult::NumericalFailure& e) {
    std::cerr << "lbm: numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const lbmult::Error& e) {
    std::cerr << "lbm: " << e.what() << "\n";
    return kInvalid;
  }
  return kOk;
}
