// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lbmult/amalgam.hpp"
#include "lbmult/calibration.hpp"
#include "lbmult/condition_a.hpp"
#include "lbmult/error.hpp"
#include "lbmult/io.hpp"
#include "lbmult/lattice.hpp"
#include "lbmult/multiplier.hpp"
#include "lbmult/parallel.hpp"
#include "lbmult/trilinear.hpp"
#include "lbmult/witness.hpp"

namespace lbmult {

struct ExperimentConfig {
  /// random-complex | w-decay | diagonal | ones-block | file
  std::string family = "diagonal";
  /// Family size parameter per matrix: block side k, or truncation radius for w-decay.
  std::vector<int> sizes;
  /// Matrices generated per size (random-complex only draws distinct ones).
  int count = 1;
  double decay = 0.5;
  std::vector<std::string> matrix_files;
  /// Bump DSL; the witness kit's Phi = phi (x) phi when absent.
  std::optional<io::json> bump;
  int m = 16;
  /// Output box [lo, hi] per axis; default_output_grid when absent.
  std::optional<Box> x_box;
  int x_density = 0;
  std::vector<double> qs{1.0, 2.0, kInfinity};
  int trials = 100;
  std::uint64_t seed = 0;
  int restarts = 32;
  double bnorm_tol = 1e-10;
  int threads = 1;
  bool lower_leg = true;
  double max_upper_ratio = calibration::kMaxUpperRatio;
  double max_q_spread = calibration::kMaxQSpread;
  std::string output;
  std::string format = "json";
};

inline ExperimentConfig config_from_json(const io::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("family")) c.family = j.at("family").get<std::string>();
    if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<int>>();
    if (j.contains("count")) c.count = j.at("count").get<int>();
    if (j.contains("decay")) c.decay = j.at("decay").get<double>();
    if (j.contains("matrix_files")) c.matrix_files = j.at("matrix_files").get<std::vector<std::string>>();
    if (j.contains("bump")) c.bump = j.at("bump");
    if (j.contains("m")) c.m = j.at("m").get<int>();
    if (j.contains("x_box")) c.x_box = io::box_from_json(j.at("x_box"));
    if (j.contains("x_density")) c.x_density = j.at("x_density").get<int>();
    if (j.contains("q")) {
      c.qs.clear();
      for (const auto& q : j.at("q")) c.qs.push_back(io::q_from_json(q));
    }
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("restarts")) c.restarts = j.at("restarts").get<int>();
    if (j.contains("bnorm_tol")) c.bnorm_tol = j.at("bnorm_tol").get<double>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("lower_leg")) c.lower_leg = j.at("lower_leg").get<bool>();
    if (j.contains("max_upper_ratio")) c.max_upper_ratio = j.at("max_upper_ratio").get<double>();
    if (j.contains("max_q_spread")) c.max_q_spread = j.at("max_q_spread").get<double>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("format")) c.format = j.at("format").get<std::string>();
  } catch (const io::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

inline void validate(const ExperimentConfig& c) {
  static const std::vector<std::string> families{"random-complex", "w-decay", "diagonal", "ones-block", "file"};
  if (std::find(families.begin(), families.end(), c.family) == families.end())
    throw InvalidArgument("config: unknown family '" + c.family + "'");
  for (int s : c.sizes)
    if (s < (c.family == "w-decay" ? 0 : 1)) throw InvalidArgument("config: invalid size " + std::to_string(s));
  if (c.count < 1) throw InvalidArgument("config: count must be >= 1");
  if (c.m < 2 || c.m % 2) throw InvalidArgument("config: m must be even and >= 2");
  if (c.trials < 1) throw InvalidArgument("config: trials must be >= 1");
  if (c.restarts < 1) throw InvalidArgument("config: restarts must be >= 1");
  if (c.qs.empty()) throw InvalidArgument("config: q list is empty");
  for (double q : c.qs)
    if (!(q >= 1.0)) throw InvalidArgument("config: q list must lie in [1, inf]");
  if (c.x_density < 0 || c.x_density % 2) throw InvalidArgument("config: x_density must be even");
  if (c.format != "json" && c.format != "csv") throw InvalidArgument("config: format must be json or csv");
  if (!(c.decay > 0.0)) throw InvalidArgument("config: decay must be positive");
}

struct GeneratedMatrix {
  std::string family;
  int size = 0;
  int index = 0;
  LatticeMatrix A{1};
};

/// Complex Gaussian entries on the block {0..k-1}^2 (n = 1), drawn from `rng`.
inline LatticeMatrix random_complex_matrix(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<LatticeMatrix::Entry> e;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const double re = g(rng);
      e.push_back({LatticeIndex{i}, LatticeIndex{j}, Complex(re, g(rng))});
    }
  return LatticeMatrix(1, e);
}

inline LatticeMatrix diagonal_matrix(int k) {
  std::vector<LatticeMatrix::Entry> e;
  for (int i = 0; i < k; ++i) e.push_back({LatticeIndex{i}, LatticeIndex{i}, Complex(1.0)});
  return LatticeMatrix(1, e);
}

inline LatticeMatrix ones_block_matrix(int k) {
  std::vector<LatticeMatrix::Entry> e;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) e.push_back({LatticeIndex{i}, LatticeIndex{j}, Complex(1.0)});
  return LatticeMatrix(1, e);
}

inline std::vector<GeneratedMatrix> generate_matrices(const ExperimentConfig& c) {
  std::vector<GeneratedMatrix> out;
  if (c.family == "file") {
    int idx = 0;
    for (const auto& f : c.matrix_files) out.push_back({"file", 0, idx++, io::read_matrix(f)});
    return out;
  }
  for (int s : c.sizes) {
    const int reps = c.family == "random-complex" ? c.count : 1;
    for (int r = 0; r < reps; ++r) {
      GeneratedMatrix g{c.family, s, static_cast<int>(out.size()), LatticeMatrix(1)};
      if (c.family == "random-complex") {
        std::seed_seq seq{static_cast<std::uint64_t>(c.seed & 0xffffffffu), static_cast<std::uint64_t>(c.seed >> 32),
                          static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(r), std::uint64_t{0xa11}};
        std::mt19937_64 rng(seq);
        g.A = random_complex_matrix(s, rng);
      } else if (c.family == "w-decay") {
        g.A = w_decay_matrix(c.decay, s, 1);
      } else if (c.family == "diagonal") {
        g.A = diagonal_matrix(s);
      } else {
        g.A = ones_block_matrix(s);
      }
      out.push_back(std::move(g));
    }
  }
  return out;
}

struct ReportRow {
  int index = 0;
  std::string family;
  int size = 0;
  double bnorm_lower = 0.0;
  double bnorm_upper = 0.0;
  bool bnorm_converged = true;
  std::optional<double> certificate;
  std::map<double, double> empirical;  // q -> lower bound
  double ratio_empirical = 0.0;        // empirical at the smallest q / bnorm_lower
  std::optional<double> ratio_certificate;
  double q_spread = 0.0;               // max_q / min_q of empirical
};

struct EquivalenceReport {
  std::vector<ReportRow> rows;
  std::vector<double> qs;
  double max_ratio_empirical = 0.0;
  std::optional<double> min_ratio_certificate;
  double max_q_spread = 0.0;
  bool upper_bounded = true;
  bool q_spread_bounded = true;
  bool certificates_consistent = true;
  double max_upper_ratio = 0.0;
  double max_q_spread_threshold = 0.0;
  std::map<std::string, double> kit_constants;
};

/// Lower bound ||A||_B, sigma_{A,Phi}, witness certificate and empirical amalgam lower
/// bounds for every generated matrix, plus aggregate bounded-ratio checks.
inline EquivalenceReport run_equivalence(const ExperimentConfig& cfg) {
  validate(cfg);
  EquivalenceReport rep;
  rep.qs = cfg.qs;
  std::sort(rep.qs.begin(), rep.qs.end());
  rep.max_upper_ratio = cfg.max_upper_ratio;
  rep.max_q_spread_threshold = cfg.max_q_spread;

  const auto mats = generate_matrices(cfg);
  if (mats.empty()) return rep;

  std::optional<WitnessKit> kit;
  BumpSpec Phi;
  if (cfg.bump) {
    Phi = io::bump_from_json(*cfg.bump);
    if (cfg.lower_leg) {
      const Box w = Phi.support().rounded_to_half_integers();
      const auto ca = check_condition_a(Phi, w, std::max(32, cfg.m), 1e-8);
      if (ca.verdict != Verdict::holds) {
        std::string what = std::string("bump does not pass condition (A) on window: verdict ") + to_string(ca.verdict);
        if (ca.obstruction) {
          what += "; obstruction";
          for (const auto& [alpha, c] : *ca.obstruction) what += " c" + alpha.to_string() + "=" + io::format_double(c.real());
        }
        throw PreconditionFailure(what);
      }
    }
  } else {
    kit.emplace(1);
    Phi = kit->Phi();
    rep.kit_constants = {{"c0", kit->c0()}, {"theta_l2", kit->theta_l2()}, {"kappa", kit->kappa()}};
  }

  rep.rows.resize(mats.size());
  const int row_threads = std::min<int>(cfg.threads, static_cast<int>(mats.size()));
  parallel_for(static_cast<std::int64_t>(mats.size()), row_threads, [&](std::int64_t r) {
    const auto& gm = mats[static_cast<size_t>(r)];
    if (gm.A.dim() != 1 && !cfg.bump) throw InvalidArgument("run_equivalence: the witness kit is built for n = 1");
    ReportRow row;
    row.index = gm.index;
    row.family = gm.family;
    row.size = gm.size;
    AscentOptions ao;
    ao.restarts = cfg.restarts;
    ao.seed = cfg.seed + static_cast<std::uint64_t>(r);
    ao.tol = cfg.bnorm_tol;
    const TrilinearEstimate est = bnorm_ascent(gm.A, ao);
    row.bnorm_lower = est.lower;
    row.bnorm_upper = est.upper;
    row.bnorm_converged = est.converged;

    const MultiplierField sigma = assemble_sigma(gm.A, Phi, cfg.m);
    EmpiricalOptions eo;
    if (cfg.x_box) {
      eo.x_grid = GridBox::exact(*cfg.x_box, cfg.x_density ? cfg.x_density : default_output_density(sigma));
    } else if (cfg.x_density) {
      const double L = 0.5 * sigma.grid.m() - 0.5;
      eo.x_grid = GridBox::exact(Box::cube(sigma.n(), -L, L), cfg.x_density);
    }
    const GridBox xg = eo.x_grid ? *eo.x_grid : default_output_grid(sigma);
    if (kit && cfg.lower_leg && !gm.A.empty()) {
      const Certificate c = lower_bound_certificate(gm.A, *kit, est, cfg.m, xg.m());
      row.certificate = c.value;
      eo.extra_pairs.push_back(witness_pair(*kit, est, cfg.m));
    }
    eo.x_grid = xg;
    const auto emp = empirical_operator_lower(sigma, rep.qs, cfg.trials, cfg.seed ^ (0x9e3779b97f4a7c15ULL * (r + 1)), eo);
    double lo = kInfinity, hi = 0.0;
    for (const auto& e : emp) {
      row.empirical[e.q] = e.value;
      lo = std::min(lo, e.value);
      hi = std::max(hi, e.value);
    }
    if (row.bnorm_lower > 0.0) {
      row.ratio_empirical = emp.front().value / row.bnorm_lower;
      if (row.certificate) row.ratio_certificate = *row.certificate / row.bnorm_lower;
    }
    row.q_spread = lo > 0.0 ? hi / lo : 1.0;
    rep.rows[static_cast<size_t>(r)] = std::move(row);
  });

  for (const auto& row : rep.rows) {
    rep.max_ratio_empirical = std::max(rep.max_ratio_empirical, row.ratio_empirical);
    rep.max_q_spread = std::max(rep.max_q_spread, row.q_spread);
    if (row.ratio_certificate)
      rep.min_ratio_certificate = rep.min_ratio_certificate ? std::min(*rep.min_ratio_certificate, *row.ratio_certificate)
                                                            : *row.ratio_certificate;
    if (row.certificate && row.empirical.count(kInfinity) && *row.certificate > row.empirical.at(kInfinity) + 1e-10)
      rep.certificates_consistent = false;
  }
  rep.upper_bounded = rep.max_ratio_empirical <= cfg.max_upper_ratio;
  rep.q_spread_bounded = rep.max_q_spread <= cfg.max_q_spread;
  return rep;
}

inline io::json report_to_json(const EquivalenceReport& r) {
  using io::json;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json emp = json::object();
    for (const auto& [q, v] : row.empirical) emp[io::q_label(q)] = v;
    json jr{{"index", row.index},
            {"family", row.family},
            {"size", row.size},
            {"bnorm_lower", row.bnorm_lower},
            {"bnorm_upper", row.bnorm_upper},
            {"bnorm_converged", row.bnorm_converged},
            {"empirical_lower", emp},
            {"ratio_empirical", row.ratio_empirical},
            {"q_spread", row.q_spread}};
    jr["witness_certificate"] = row.certificate ? json(*row.certificate) : json(nullptr);
    jr["ratio_certificate"] = row.ratio_certificate ? json(*row.ratio_certificate) : json(nullptr);
    rows.push_back(jr);
  }
  json qs = json::array();
  for (double q : r.qs) qs.push_back(io::q_to_json(q));
  json agg{{"max_ratio_empirical", r.max_ratio_empirical},
           {"max_q_spread", r.max_q_spread},
           {"upper_bounded", r.upper_bounded},
           {"q_spread_bounded", r.q_spread_bounded},
           {"certificates_consistent", r.certificates_consistent},
           {"thresholds", {{"max_upper_ratio", r.max_upper_ratio}, {"max_q_spread", r.max_q_spread_threshold}}}};
  agg["min_ratio_certificate"] = r.min_ratio_certificate ? json(*r.min_ratio_certificate) : json(nullptr);
  json kc = json::object();
  for (const auto& [k, v] : r.kit_constants) kc[k] = v;
  return {{"rows", rows}, {"q", qs}, {"aggregate", agg}, {"kit_constants", kc}};
}

inline std::string report_to_csv(const EquivalenceReport& r) {
  std::string out = "index,family,size,bnorm_lower,bnorm_upper,witness_certificate";
  for (double q : r.qs) out += ",empirical_q_" + io::q_label(q);
  out += ",ratio_empirical,ratio_certificate,q_spread\n";
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& row : r.rows) {
    out += std::to_string(row.index) + "," + row.family + "," + std::to_string(row.size) + "," + num(row.bnorm_lower) + "," +
           num(row.bnorm_upper) + "," + (row.certificate ? num(*row.certificate) : "");
    for (double q : r.qs) out += "," + (row.empirical.count(q) ? num(row.empirical.at(q)) : "");
    out += "," + num(row.ratio_empirical) + "," + (row.ratio_certificate ? num(*row.ratio_certificate) : "") + "," +
           num(row.q_spread) + "\n";
  }
  return out;
}

/// Writes the report to `path` ("-" or empty: returns text only).
inline std::string emit_report(const EquivalenceReport& r, const std::string& format, const std::string& path = {}) {
  std::string text;
  if (format == "json") text = io::stable_dump(report_to_json(r)) + "\n";
  else if (format == "csv") text = report_to_csv(r);
  else throw InvalidArgument("emit_report: format must be json or csv");
  if (!path.empty() && path != "-") io::write_text(path, text);
  return text;
}

}  // namespace lbmult
