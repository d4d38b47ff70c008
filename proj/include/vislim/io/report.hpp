#pragma once

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vislim/analysis/sweep.hpp"
#include "vislim/error.hpp"
#include "vislim/io/config.hpp"
#include "vislim/io/snapshot.hpp"

#ifndef VISLIM_VERSION
#define VISLIM_VERSION "0.0.0"
#endif

namespace vislim::io {

using json = nlohmann::json;

inline std::string sha256_hex(const void* data, std::size_t n) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, n, md, &len, EVP_sha256(), nullptr) != 1) throw IoError("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned k = 0; k < len; ++k) {
    s += hex[md[k] >> 4];
    s += hex[md[k] & 15];
  }
  return s;
}

inline std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

/// Non-finite numbers become the strings "inf", "-inf", "nan".
inline json num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline json to_json(const Subdomain& U) { return json::array({U.x_lo, U.x_hi, U.y_lo, U.y_hi}); }

inline json to_json(const ZetaFit& f) {
  return {{"zeta2", num(f.zeta2)},
          {"zeta2_raw", num(f.zeta2_raw)},
          {"C_U", num(f.C_U)},
          {"eta", num(f.eta())},
          {"nu", num(f.nu)},
          {"fit_range", json::array({num(f.r_lo), num(f.r_hi)})},
          {"rms_logfit_residual", num(f.rms_logfit_residual)},
          {"iterations", f.iterations},
          {"points", f.points},
          {"out_of_range", f.out_of_range},
          {"inertial_range_unresolved", f.inertial_unresolved}};
}

inline json to_json(const NormReport& r) {
  json d = json::array();
  for (double v : r.details) d.push_back(num(v));
  return {{"kind", to_string(r.kind)},        {"exponent", num(r.exponent)},
          {"region", to_json(r.region)},      {"value", num(r.value)},
          {"base_part", num(r.base_part)},    {"difference_part", num(r.difference_part)},
          {"argmax_shift", json::array({num(r.argmax[0]), num(r.argmax[1])})},
          {"details", d}};
}

inline json to_json(const LedgerSummary& l) {
  return {{"E0", num(l.E0)},
          {"E_T", num(l.E_T)},
          {"dissipation_bulk", num(l.dissipation_bulk)},
          {"dissipation_wall", num(l.dissipation_wall)},
          {"force_work", num(l.force_work)},
          {"max_step_violation", num(l.max_step_violation)},
          {"max_cumulative_violation", num(l.max_cumulative_violation)},
          {"energy_inequality_holds", l.inequality_holds},
          {"steps", l.steps},
          {"retries", l.retries}};
}

inline json to_json(const SubDissipationVerdict& v) {
  return {{"verdict", to_string(v.verdict)},
          {"sampled_below_eta", v.sampled_below_eta},
          {"gradient_bound_holds", v.gradient_bound_holds},
          {"crossing_holds", v.crossing_holds},
          {"worst_gradient_ratio", num(v.worst_gradient_ratio)},
          {"effective_constant", num(v.effective_constant)},
          {"combined_bound_holds", v.combined_bound_holds}};
}

inline json to_json(const EquivalenceReport& e) {
  return {{"zeta2", num(e.zeta2)},           {"delta", num(e.delta)},
          {"besov_u_U", num(e.besov_u_U)},   {"vorticity_V", num(e.vort_V)},
          {"step1_ratio", num(e.step1_ratio)}, {"hdelta_u", num(e.hdelta_u)},
          {"vorticity_U", num(e.vort_U)},    {"l2_u_U", num(e.l2_u_U)},
          {"step2_ratio", num(e.step2_ratio)}};
}

inline json to_json(const NuRecord& r) {
  json j = {{"nu", num(r.nu)}, {"ok", r.ok}};
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  json P = json::array(), R = json::array();
  for (double v : r.pairing.P) P.push_back(num(v));
  for (const auto& q : r.residuals.records)
    R.push_back({{"R", num(q.R)}, {"V", num(q.V)}, {"cs_bound", num(q.cs_bound)},
                 {"grad_phi_norm", num(q.grad_phi_norm)}, {"scale", num(q.scale)}});
  j["ledger"] = to_json(r.ledger);
  j["fit"] = to_json(r.fit);
  j["sub_dissipation"] = to_json(r.sub_dissipation);
  j["besov_u"] = to_json(r.besov_u);
  j["equivalence"] = to_json(r.equivalence);
  j["pairings"] = P;
  j["u_l2l2"] = num(r.pairing.u_norm);
  j["residuals"] = R;
  j["snapshot_dissipation"] = num(r.residuals.dissipation);
  j["max_abs_V"] = num(r.max_abs_V);
  j["viscous_cs_bound_holds"] = r.cs_bound_holds;
  return j;
}

inline json to_json(const SweepReport& s) {
  json j;
  json recs = json::array();
  for (const auto& r : s.records) recs.push_back(to_json(r));
  j["records"] = recs;
  j["common_zeta2"] = num(s.common_zeta2);
  j["delta"] = num(s.delta);
  if (!s.cross_sufficient) {
    j["cross_nu"] = "insufficient data";
    return j;
  }
  json gaps = json::array();
  for (const auto& g : s.cauchy_gaps) {
    json row = json::array();
    for (double v : g) row.push_back(num(v));
    gaps.push_back(row);
  }
  json anomaly = "insufficient data";
  if (s.anomaly)
    anomaly = {{"trend", to_string(s.anomaly->trend)},
               {"slope", num(s.anomaly->slope)},
               {"limit_estimate", num(s.anomaly->limit)},
               {"dissipation", s.anomaly->dissipation},
               {"nus", s.anomaly->nus}};
  json limit = "insufficient data";
  if (s.limit_besov)
    limit = {{"proxy", to_json(s.limit_besov->proxy)},
             {"max_per_nu", num(s.limit_besov->max_per_nu)},
             {"bound", num(s.limit_besov->bound)},
             {"holds", s.limit_besov->holds}};
  j["cross_nu"] = {
      {"inertial_verdict",
       {{"verdict", to_string(s.inertial.verdict)},
        {"c_ratio", num(s.inertial.c_ratio)},
        {"min_zeta2", num(s.inertial.min_zeta)},
        {"zeta2_spread", num(s.inertial.zeta_spread)},
        {"reason", s.inertial.reason}}},
      {"vorticity_verdict",
       {{"verdict", to_string(s.vorticity.verdict)}, {"ratio", num(s.vorticity.ratio)}, {"reason", s.vorticity.reason}}},
      {"verdicts_agree", s.verdicts_agree},
      {"pairing_cauchy_gaps", gaps},
      {"dissipation_anomaly", anomaly},
      {"limit_besov_check", limit},
      {"viscous_residual_slope", num(s.viscous_slope)},
      {"viscous_residual_slope_note", "heuristic: |V_j| ~ sqrt(nu) predicts slope >= 0.5"},
      {"viscous_cs_bound_all", s.viscous_cs_all}};
  return j;
}

/// Sorted-key JSON with a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Creates `dir` (and parents), surfacing failures with the path.
inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

/// Minimal CSV writer: header then rows of already-formatted cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  std::string str() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& c) {
      for (std::size_t k = 0; k < c.size(); ++k) s += (k ? "," : "") + c[k];
      s += "\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return s;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string fmt(double v) { return format_double(v); }

/// energy.csv: t, E, D_bulk, D_wall, W_force (cumulative).
inline std::string energy_csv(const EnergyLedger& l) {
  CsvTable t({"t", "E", "D_bulk", "D_wall", "W_force"});
  for (std::size_t n = 0; n < l.rows(); ++n)
    t.row({fmt(l.times[n]), fmt(l.kinetic[n]), fmt(l.dissipation_bulk[n]), fmt(l.dissipation_wall[n]),
           fmt(l.force_work[n])});
  return t.str();
}

/// s2.csv: direction index (or "avg"), direction vector, |r|, S2.
inline std::string s2_csv(const StructureFunctionTable& tab) {
  CsvTable t({"direction", "ex", "ey", "r", "S2"});
  const auto& sh = tab.shifts;
  for (std::size_t a = 0; a < sh.directions.size(); ++a)
    for (std::size_t b = 0; b < sh.magnitudes.size(); ++b)
      t.row({std::to_string(a), fmt(sh.directions[a][0]), fmt(sh.directions[a][1]), fmt(sh.magnitudes[b]),
             fmt(tab.values[a][b])});
  for (std::size_t b = 0; b < sh.magnitudes.size(); ++b)
    t.row({"avg", "", "", fmt(sh.magnitudes[b]), fmt(tab.averaged[b])});
  return t.str();
}

/// residuals.csv: one row per (viscosity, test field).
inline std::string residuals_csv(const SweepReport& s) {
  CsvTable t({"nu_index", "nu", "field", "R", "V", "cs_bound", "grad_phi_norm", "scale", "pairing"});
  for (std::size_t k = 0; k < s.records.size(); ++k) {
    const auto& r = s.records[k];
    if (!r.ok) continue;
    for (std::size_t j = 0; j < r.residuals.records.size(); ++j) {
      const auto& q = r.residuals.records[j];
      t.row({std::to_string(k), fmt(r.nu), std::to_string(j), fmt(q.R), fmt(q.V), fmt(q.cs_bound),
             fmt(q.grad_phi_norm), fmt(q.scale), fmt(r.pairing.P[j])});
    }
  }
  return t.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& s) { write_file(p, s); }

}  // namespace vislim::io
