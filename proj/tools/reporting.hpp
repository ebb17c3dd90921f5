#pragma once

// Deterministic report writers.  Floats are printed with "%.17g" (exact
// round trip), JSON objects are emitted with sorted keys, and no report
// carries timestamps or absolute paths, so identical config + seed reruns
// produce byte-identical artifacts.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "config_view.hpp"
#include "plpot/error.hpp"
#include "plpot/estimates.hpp"
#include "plpot/solver.hpp"

namespace plcli {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(long long v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(bool v) { return v ? "1" : "0"; }

// Non-finite doubles are not representable in JSON numbers; keep them
// readable (and deterministic) as strings.
inline json json_num(double v) {
  if (std::isfinite(v)) return json(v);
  if (std::isnan(v)) return json("nan");
  return json(v > 0 ? "inf" : "-inf");
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header)
      : out_(path), ncols_(header.size()) {
    plpot::require(out_.good(), "cannot open for writing: " + path.string());
    write_cells(header);
  }

  void row(const std::vector<std::string>& cells) {
    plpot::require(cells.size() == ncols_, "CSV row width mismatch");
    write_cells(cells);
  }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  std::size_t ncols_;
};

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  plpot::require(out.good(), "cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
}

inline json to_json(const plpot::EstimateReport& r) {
  json terms = json::array();
  for (const auto& [name, value] : r.rhs_terms)
    terms.push_back({{"name", name}, {"value", json_num(value)}});
  return {{"name", r.name},
          {"lhs", json_num(r.lhs)},
          {"rhs_terms", terms},
          {"rhs_total", json_num(r.rhs_total)},
          {"empirical_constant", json_num(r.empirical_constant)},
          {"cap", json_num(r.cap)},
          {"precondition_ok", r.precondition_ok},
          {"passed", r.passed}};
}

inline json to_json(const plpot::SolveReport& r) {
  json j = {{"converged", r.converged},
            {"diverged", r.diverged},
            {"newton_iterations", r.newton_iterations},
            {"cg_iterations", r.cg_iterations},
            {"final_residual", json_num(r.final_residual)},
            {"rhs_norm", json_num(r.rhs_norm)},
            {"preconditioner", r.preconditioner},
            {"eps", json_num(r.eps)},
            {"truncation_level", json_num(r.truncation_level)},
            {"energy_trace_length", r.energy_trace.size()}};
  if (r.picard_iterations > 0 || !r.critical_label.empty()) {
    j["picard_iterations"] = r.picard_iterations;
    j["contraction_factor"] = json_num(r.contraction_factor);
    j["critical_label"] = r.critical_label;
    j["v_ln_norm"] = json_num(r.v_ln_norm);
    j["sup_potential"] = json_num(r.sup_potential);
  }
  return j;
}

// -------------------------------------------------------------- caps ------

// Caps on empirical constants, checked by the verify/hodge/sweep commands.
// The built-in values were frozen from calibration sweeps on the seeded
// desk-scale families; a cap file may override any subset.
class Caps {
 public:
  Caps() {
    m_ = {{"caccioppoli", 1.6},          {"oscillation", 0.8},
          {"degiorgi", 1.5},             {"gradient-bound", 1.5},
          {"gradient-bound-linear", 1.1}, {"subcritical", 1.0},
          {"general-growth", 1.5},       {"lorentz-lipschitz", 0.4},
          {"hodge-ratio", 0.45}};
  }

  void load_overrides(const std::string& path) {
    json j = load_json_file(path);
    View root(j, "caps");
    if (!j.is_object()) root.fail("expected an object of cap values");
    for (auto it = j.begin(); it != j.end(); ++it) {
      auto slot = m_.find(it.key());
      if (slot == m_.end())
        throw plpot::Error("config error at caps." + it.key() +
                           ": unknown cap name");
      if (!it.value().is_number())
        throw plpot::Error("config error at caps." + it.key() +
                           ": expected a number");
      const double v = it.value().get<double>();
      if (!(v > 0))
        throw plpot::Error("config error at caps." + it.key() +
                           ": cap must be positive");
      slot->second = v;
    }
  }

  double get(const std::string& name) const {
    auto it = m_.find(name);
    plpot::require(it != m_.end(), "unknown cap: " + name);
    return it->second;
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : m_) j[k] = v;
    return j;
  }

 private:
  std::map<std::string, double> m_;
};

}  // namespace plcli
