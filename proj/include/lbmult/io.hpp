// Copyright 2026 The lbmult Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbmult/bump.hpp"
#include "lbmult/error.hpp"
#include "lbmult/grid.hpp"
#include "lbmult/lattice.hpp"

namespace lbmult::io {

using json = nlohmann::json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump_to(const json& j, std::string& out, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map ordering: keys sorted
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_to(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += indent < 0 ? "," : ", ";
        dump_to(j[i], out, -1, 0);
      }
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Byte-stable JSON: sorted keys, every float printed with 17 significant digits.
inline std::string stable_dump(const json& j, int indent = 2) {
  std::string out;
  detail::dump_to(j, out, indent, 0);
  return out;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

/// "inf", "infinity", a decimal, or a fraction "p/r".
inline double parse_q(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  try {
    const auto slash = s.find('/');
    size_t used = 0;
    if (slash == std::string::npos) {
      v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } else {
      const double num = std::stod(s.substr(0, slash));
      const double den = std::stod(s.substr(slash + 1));
      v = num / den;
    }
  } catch (const std::exception&) {
    throw InvalidArgument("invalid q value '" + s + "'");
  }
  if (!(v >= 1.0)) throw InvalidArgument("q must lie in [1, inf], got '" + s + "'");
  return v;
}

inline std::string q_label(double q) { return std::isinf(q) ? "inf" : format_double(q); }

inline json q_to_json(double q) { return std::isinf(q) ? json("inf") : json(q); }

inline double q_from_json(const json& j) {
  if (j.is_string()) return parse_q(j.get<std::string>());
  if (!j.is_number()) throw InvalidArgument("q must be a number or \"inf\"");
  const double q = j.get<double>();
  if (!(q >= 1.0)) throw InvalidArgument("q must lie in [1, inf]");
  return q;
}

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw InvalidArgument("complex value must be a number, [re, im] or {re, im}");
}

inline LatticeIndex index_from_json(const json& j, int n, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an integer array");
  std::vector<int> c;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw InvalidArgument(std::string(what) + " must be an integer array");
    c.push_back(v.get<int>());
  }
  if (static_cast<int>(c.size()) != n) throw DimensionMismatch(what, n, static_cast<int>(c.size()));
  return LatticeIndex(c);
}

// ---- matrices -------------------------------------------------------------

inline LatticeMatrix matrix_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<LatticeMatrix::Entry> entries;
    for (const auto& e : j.at("entries"))
      entries.push_back({index_from_json(e.at("mu"), n, "mu"), index_from_json(e.at("nu"), n, "nu"),
                         Complex(e.value("re", 0.0), e.value("im", 0.0))});
    return LatticeMatrix(n, entries);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("matrix JSON: ") + e.what());
  }
}

inline json matrix_to_json(const LatticeMatrix& A) {
  json entries = json::array();
  for (const auto& [key, v] : A.entries())
    entries.push_back({{"mu", key.first.coords}, {"nu", key.second.coords}, {"re", v.real()}, {"im", v.imag()}});
  return {{"n", A.dim()}, {"entries", entries}};
}

inline LatticeMatrix read_matrix(const std::string& path) { return matrix_from_json(read_json(path)); }

// ---- sequences ------------------------------------------------------------

/// {"n": int, "entries": [{"k": [...], "re": x, "im": y}, ...]}
inline LatticeSequence sequence_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    LatticeSequence s(n);
    for (const auto& e : j.at("entries")) {
      const LatticeIndex k = index_from_json(e.at("k"), n, "k");
      if (s.values().count(k)) throw InvalidArgument("sequence JSON: duplicate index " + k.to_string());
      s.set(k, Complex(e.value("re", 0.0), e.value("im", 0.0)));
    }
    return s;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("sequence JSON: ") + e.what());
  }
}

inline json sequence_to_json(const LatticeSequence& s) {
  json entries = json::array();
  for (const auto& [k, v] : s.values()) entries.push_back({{"k", k.coords}, {"re", v.real()}, {"im", v.imag()}});
  return {{"n", s.dim()}, {"entries", entries}};
}

inline LatticeSequence read_sequence(const std::string& path) { return sequence_from_json(read_json(path)); }

// ---- bumps ----------------------------------------------------------------

inline Box box_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("box must be a non-empty array of [lo, hi] pairs");
  Box b;
  for (const auto& ax : j) {
    if (!ax.is_array() || ax.size() != 2) throw InvalidArgument("box axis must be [lo, hi]");
    b.axes.push_back({ax[0].get<double>(), ax[1].get<double>()});
  }
  return b;
}

inline json box_to_json(const Box& b) {
  json out = json::array();
  for (const auto& ax : b.axes) out.push_back({ax.lo, ax.hi});
  return out;
}

inline std::vector<double> doubles_from_json(const json& j, int dim_hint, const char* what) {
  if (j.is_number()) {
    if (dim_hint < 1) throw InvalidArgument(std::string(what) + ": scalar given without \"dim\"");
    return std::vector<double>(static_cast<size_t>(dim_hint), j.get<double>());
  }
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be a number or array");
  return j.get<std::vector<double>>();
}

/// Bump DSL: {"type": "std_bump", "dim": d}
///           {"type": "std_bump_scaled", "center": [..] | x, "radius": [..] | r, "dim": d}
///           {"type": "tensor", "factors": [bump, ...]}
///           {"type": "shift_sum", "base": bump, "shifts": [[..], ...], "weights": [w, ...]}
///           {"type": "plateau", "inner": [[lo, hi], ...], "outer": [[lo, hi], ...]}
inline BumpSpec bump_from_json(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "std_bump") return bumps::standard(j.value("dim", 1));
    if (type == "std_bump_scaled") {
      const int d = j.value("dim", 0);
      return bumps::standard_scaled(doubles_from_json(j.at("center"), d, "center"), doubles_from_json(j.at("radius"), d, "radius"));
    }
    if (type == "tensor") {
      std::vector<BumpSpec> factors;
      for (const auto& f : j.at("factors")) factors.push_back(bump_from_json(f));
      return bumps::tensor(std::move(factors));
    }
    if (type == "shift_sum") {
      BumpSpec base = bump_from_json(j.at("base"));
      std::vector<std::vector<double>> shifts;
      for (const auto& s : j.at("shifts")) shifts.push_back(doubles_from_json(s, base.dim(), "shift"));
      std::vector<Complex> weights;
      if (j.contains("weights")) {
        for (const auto& w : j.at("weights")) weights.push_back(complex_from_json(w));
      } else {
        weights.assign(shifts.size(), Complex(1.0));
      }
      return bumps::shift_sum(std::move(base), std::move(shifts), std::move(weights));
    }
    if (type == "plateau") return bumps::plateau(box_from_json(j.at("inner")), box_from_json(j.at("outer")));
    throw InvalidArgument("unknown bump type '" + type + "'");
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bump JSON: ") + e.what());
  }
}

inline BumpSpec read_bump(const std::string& path) { return bump_from_json(read_json(path)); }

// ---- sampled fields -------------------------------------------------------

inline json grid_to_json(const GridBox& g) {
  return {{"m", g.m()}, {"lo", g.lo_indices()}, {"hi", g.hi_indices()}};
}

inline GridBox grid_from_json(const json& j) {
  try {
    return GridBox(j.at("m").get<int>(), j.at("lo").get<std::vector<std::int64_t>>(), j.at("hi").get<std::vector<std::int64_t>>());
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("grid JSON: ") + e.what());
  }
}

/// {"grid": {"m", "lo", "hi"}, "re": [...], "im": [...]}; node k/m along each axis, row-major.
inline json field_to_json(const SampledField& f) {
  std::vector<double> re, im;
  re.reserve(f.values.size());
  im.reserve(f.values.size());
  for (const auto& v : f.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return {{"grid", grid_to_json(f.grid)}, {"re", re}, {"im", im}};
}

inline SampledField field_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  try {
    const GridBox g = grid_from_json(j.at("grid"));
    if (j.contains("raw")) {
      static_assert(std::endian::native == std::endian::little);
      const auto raw = base_dir / j.at("raw").get<std::string>();
      const std::string bytes = read_text(raw.string());
      if (bytes.size() != static_cast<size_t>(g.size()) * 16)
        throw InvalidArgument("raw field " + raw.string() + ": expected " + std::to_string(g.size() * 16) + " bytes");
      std::vector<Complex> v(static_cast<size_t>(g.size()));
      for (size_t i = 0; i < v.size(); ++i) {
        double re, im;
        std::memcpy(&re, bytes.data() + 16 * i, 8);
        std::memcpy(&im, bytes.data() + 16 * i + 8, 8);
        v[i] = {re, im};
      }
      return SampledField(g, std::move(v));
    }
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
    if (re.size() != im.size()) throw InvalidArgument("field JSON: re/im length differ");
    std::vector<Complex> v(re.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = {re[i], im[i]};
    return SampledField(g, std::move(v));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("field JSON: ") + e.what());
  }
}

inline SampledField read_field(const std::string& path) {
  return field_from_json(read_json(path), std::filesystem::path(path).parent_path());
}

/// Writes `path` as JSON, or with raw=true a little-endian float64 (re, im) file `path`.bin
/// plus a JSON sidecar at `path` naming it.
inline void write_field(const std::string& path, const SampledField& f, bool raw = false) {
  if (!raw) {
    write_text(path, stable_dump(field_to_json(f)) + "\n");
    return;
  }
  static_assert(sizeof(double) == 8 && std::endian::native == std::endian::little);
  const std::filesystem::path p(path);
  const std::string bin = p.filename().string() + ".bin";
  std::string bytes(f.values.size() * 16, '\0');
  for (size_t i = 0; i < f.values.size(); ++i) {
    const double re = f.values[i].real(), im = f.values[i].imag();
    std::memcpy(bytes.data() + 16 * i, &re, 8);
    std::memcpy(bytes.data() + 16 * i + 8, &im, 8);
  }
  write_text((p.parent_path() / bin).string(), bytes);
  write_text(path, stable_dump(json{{"grid", grid_to_json(f.grid)}, {"raw", bin}, {"format", "f64le-complex"}}) + "\n");
}

}  // namespace lbmult::io
