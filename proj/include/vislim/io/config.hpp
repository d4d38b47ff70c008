#pragma once

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vislim/analysis/sweep.hpp"
#include "vislim/error.hpp"
#include "vislim/io/snapshot.hpp"
#include "vislim/norms/embedding.hpp"

namespace vislim::io {

/// Everything a config file can set.
struct Config {
  SweepConfig sweep;  ///< sweep.base is the single-run configuration
  EmbeddingConfig embedding;
};

inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

inline std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_double(v[k]);
  return s;
}

inline std::string format_region(const Subdomain& U) {
  return format_list({U.x_lo, U.x_hi, U.y_lo, U.y_hi});
}

namespace detail {

inline std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::optional<double> parse_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_int(const std::string& s) {
  const std::string t = trim(s);
  long long v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) return std::nullopt;
  return v;
}

inline std::optional<std::vector<double>> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = parse_double(item);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

}  // namespace detail

/// One documented configuration key.  `set` returns an error text or "".
struct KeySpec {
  std::string name;
  std::string unit;
  std::string doc;
  std::function<std::string(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

namespace detail {

inline KeySpec real(std::string name, std::string unit, std::string doc, std::function<double&(Config&)> ref) {
  return {name, unit, doc,
          [ref](Config& c, const std::string& v) -> std::string {
            auto x = parse_double(v);
            if (!x) return "expected a real number, got '" + trim(v) + "'";
            ref(c) = *x;
            return "";
          },
          [ref](Config copy) { return format_double(ref(copy)); }};
}

inline KeySpec integer(std::string name, std::string doc, std::function<int&(Config&)> ref) {
  return {name, "-", doc,
          [ref](Config& c, const std::string& v) -> std::string {
            auto x = parse_int(v);
            if (!x || *x < INT32_MIN || *x > INT32_MAX) return "expected an integer, got '" + trim(v) + "'";
            ref(c) = static_cast<int>(*x);
            return "";
          },
          [ref](Config copy) { return std::to_string(ref(copy)); }};
}

inline KeySpec seed(std::string name, std::string doc, std::function<std::uint64_t&(Config&)> ref) {
  return {name, "-", doc,
          [ref](Config& c, const std::string& v) -> std::string {
            const std::string t = trim(v);
            std::uint64_t x = 0;
            auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
            if (ec != std::errc() || p != t.data() + t.size() || t.empty())
              return "expected a nonnegative integer, got '" + t + "'";
            ref(c) = x;
            return "";
          },
          [ref](Config copy) { return std::to_string(ref(copy)); }};
}

template <class E>
KeySpec choice(std::string name, std::string doc, std::vector<std::pair<std::string, E>> opts,
               std::function<E&(Config&)> ref) {
  std::string names;
  for (const auto& o : opts) names += (names.empty() ? "" : "|") + o.first;
  return {name, "-", doc + " (" + names + ")",
          [ref, opts, names](Config& c, const std::string& v) -> std::string {
            const std::string t = trim(v);
            for (const auto& o : opts)
              if (o.first == t) {
                ref(c) = o.second;
                return "";
              }
            return "expected one of " + names + ", got '" + t + "'";
          },
          [ref, opts](Config copy) {
            for (const auto& o : opts)
              if (o.second == ref(copy)) return o.first;
            return std::string("?");
          }};
}

inline KeySpec region(std::string name, std::string doc, std::function<Subdomain&(Config&)> ref) {
  return {name, "length", doc + " (x0,x1,y0,y1)",
          [ref](Config& c, const std::string& v) -> std::string {
            auto l = parse_list(v);
            if (!l || l->size() != 4) return "expected x0,x1,y0,y1, got '" + trim(v) + "'";
            ref(c) = Subdomain{(*l)[0], (*l)[1], (*l)[2], (*l)[3]};
            return "";
          },
          [ref](Config copy) { return format_region(ref(copy)); }};
}

inline KeySpec text(std::string name, std::string doc, std::function<std::string&(Config&)> ref) {
  return {name, "-", doc, [ref](Config& c, const std::string& v) -> std::string {
            ref(c) = trim(v);
            return "";
          },
          [ref](Config copy) { return ref(copy); }};
}

}  // namespace detail

/// All keys, in documentation order.
inline const std::vector<KeySpec>& config_keys() {
  using namespace detail;
  static const std::vector<KeySpec> keys = [] {
    std::vector<KeySpec> k;
    auto D = [](Config& c) -> DomainSpec& { return c.sweep.base.domain; };
    auto R = [](Config& c) -> RunConfig& { return c.sweep.base; };
    auto I = [](Config& c) -> InitSpec& { return c.sweep.base.init; };
    auto F = [](Config& c) -> ForcingSpec& { return c.sweep.base.forcing; };
    auto S = [](Config& c) -> SweepConfig& { return c.sweep; };
    auto E = [](Config& c) -> EmbeddingConfig& { return c.embedding; };
    k.push_back(real("domain.Lx", "length", "channel period in x", [=](Config& c) -> double& { return D(c).Lx; }));
    k.push_back(real("domain.H", "length", "channel height", [=](Config& c) -> double& { return D(c).H; }));
    k.push_back(integer("domain.Nx", "grid points in x (even)", [=](Config& c) -> int& { return D(c).Nx; }));
    k.push_back(integer("domain.Ny", "grid points in y, walls included", [=](Config& c) -> int& { return D(c).Ny; }));
    k.push_back(real("domain.T_final", "time", "end time", [=](Config& c) -> double& { return D(c).T_final; }));
    k.push_back(choice<BcKind>("domain.bc", "wall condition",
                               {{"no_slip", BcKind::NoSlip}, {"navier_friction", BcKind::NavierFriction}},
                               [=](Config& c) -> BcKind& { return D(c).bc; }));
    k.push_back(real("domain.alpha0", "1/length", "slip coefficient c0 in alpha = c0 nu^-beta",
                     [=](Config& c) -> double& { return D(c).alpha0; }));
    k.push_back(real("domain.beta", "-", "slip exponent, in [0,1]", [=](Config& c) -> double& { return D(c).beta; }));
    k.push_back(real("run.nu", "length^2/time", "kinematic viscosity (single runs)",
                     [=](Config& c) -> double& { return R(c).nu; }));
    k.push_back(real("run.dt", "time", "time step upper bound", [=](Config& c) -> double& { return R(c).dt; }));
    k.push_back(integer("run.snapshot_every", "steps between snapshots when snapshot_interval = 0",
                        [=](Config& c) -> int& { return R(c).snapshot_every; }));
    k.push_back(real("run.snapshot_interval", "time", "time between snapshots (0 = use snapshot_every)",
                     [=](Config& c) -> double& { return R(c).snapshot_interval; }));
    k.push_back(choice<AdvectionForm>("run.advection", "nonlinear term form",
                                      {{"rotational", AdvectionForm::Rotational},
                                       {"conservative", AdvectionForm::Conservative}},
                                      [=](Config& c) -> AdvectionForm& { return R(c).advection; }));
    k.push_back(choice<TimeScheme>("run.scheme", "advection time scheme",
                                   {{"midpoint", TimeScheme::Midpoint}, {"ab2", TimeScheme::Ab2}},
                                   [=](Config& c) -> TimeScheme& { return R(c).scheme; }));
    k.push_back(real("run.cfl_max", "-", "CFL number that triggers step halving",
                     [=](Config& c) -> double& { return R(c).cfl_max; }));
    k.push_back(integer("run.max_iterations", "midpoint fixed-point iteration cap",
                        [=](Config& c) -> int& { return R(c).max_iterations; }));
    k.push_back(real("run.iteration_tol", "-", "midpoint iteration tolerance, relative to sqrt(2E)",
                     [=](Config& c) -> double& { return R(c).iteration_tol; }));
    k.push_back(choice<InitKind>("init.kind", "initial condition",
                                 {{"random_spectrum", InitKind::RandomSpectrum},
                                  {"stokes_mode", InitKind::StokesMode},
                                  {"file", InitKind::FileSnapshot}},
                                 [=](Config& c) -> InitKind& { return I(c).kind; }));
    k.push_back(real("init.zeta", "-", "target S2 exponent of the random spectrum",
                     [=](Config& c) -> double& { return I(c).zeta; }));
    k.push_back(real("init.k_min", "1/length", "lower band limit |k|", [=](Config& c) -> double& { return I(c).k_min; }));
    k.push_back(real("init.k_max", "1/length", "upper band limit |k| (0 = none)",
                     [=](Config& c) -> double& { return I(c).k_max; }));
    k.push_back(seed("init.seed", "random seed", [=](Config& c) -> std::uint64_t& { return I(c).seed; }));
    k.push_back(real("init.amplitude", "length/time", "target rms velocity (<= 0 keeps raw scale)",
                     [=](Config& c) -> double& { return I(c).amplitude; }));
    k.push_back(integer("init.stokes_n", "wall-normal index of the Stokes mode",
                        [=](Config& c) -> int& { return I(c).stokes_n; }));
    k.push_back(text("init.path", "NSFLD1 file for init.kind = file", [=](Config& c) -> std::string& { return I(c).path; }));
    k.push_back(choice<ForcingKind>("forcing.kind", "body force",
                                    {{"none", ForcingKind::None}, {"steady_solenoidal", ForcingKind::SteadySolenoidal}},
                                    [=](Config& c) -> ForcingKind& { return F(c).kind; }));
    k.push_back(real("forcing.amplitude", "length/time^2", "force amplitude",
                     [=](Config& c) -> double& { return F(c).amplitude; }));
    k.push_back(integer("forcing.kx", "force wavenumber index in x", [=](Config& c) -> int& { return F(c).kx; }));
    k.push_back(integer("forcing.ky", "force wall-normal mode index", [=](Config& c) -> int& { return F(c).ky; }));
    k.push_back(integer("shifts.count", "log-spaced shift magnitudes requested",
                        [=](Config& c) -> int& { return S(c).shift_count; }));
    k.push_back(choice<bool>("shifts.directions", "shift directions",
                             {{"axes_diagonals", false}, {"axes", true}},
                             [=](Config& c) -> bool& { return S(c).shift_axes_only; }));
    k.push_back(real("shifts.fraction", "-", "largest |r| as a fraction of dist(U, walls)",
                     [=](Config& c) -> double& { return S(c).shift_fraction; }));
    k.push_back(region("subdomain.U", "structure-function region", [=](Config& c) -> Subdomain& { return S(c).U; }));
    k.push_back(region("regions.U", "outer equivalence region", [=](Config& c) -> Subdomain& { return S(c).regions.U; }));
    k.push_back(region("regions.W", "middle equivalence region", [=](Config& c) -> Subdomain& { return S(c).regions.W; }));
    k.push_back(region("regions.V", "inner equivalence region", [=](Config& c) -> Subdomain& { return S(c).regions.V; }));
    k.push_back({"sweep.nus", "length^2/time", "comma-separated viscosities",
                 [=](Config& c, const std::string& v) -> std::string {
                   auto l = parse_list(v);
                   if (!l) return "expected a comma-separated list of reals, got '" + trim(v) + "'";
                   S(c).nus = *l;
                   return "";
                 },
                 [=](const Config& c) { return format_list(c.sweep.nus); }});
    k.push_back(real("sweep.tol_growth", "-", "max/min C_U allowed for a uniform verdict",
                     [=](Config& c) -> double& { return S(c).thresholds.tol_growth; }));
    k.push_back(real("sweep.zeta_floor", "-", "smallest acceptable zeta2",
                     [=](Config& c) -> double& { return S(c).thresholds.zeta_floor; }));
    k.push_back(real("sweep.zeta_spread", "-", "largest pairwise zeta2 difference",
                     [=](Config& c) -> double& { return S(c).thresholds.zeta_spread; }));
    k.push_back(real("sweep.vorticity_tol_growth", "-", "max/min vorticity norm allowed for a uniform verdict",
                     [=](Config& c) -> double& { return S(c).vorticity_tol_growth; }));
    k.push_back(real("sweep.delta_offset", "-", "delta = min(zeta2/2 - offset, 0.45)",
                     [=](Config& c) -> double& { return S(c).delta_offset; }));
    k.push_back(real("sweep.limit_slack", "-", "relative slack of the limit Besov check",
                     [=](Config& c) -> double& { return S(c).limit_slack; }));
    k.push_back(real("sweep.plateau_tol", "-", "|log-log slope| below which D(nu) counts as a plateau",
                     [=](Config& c) -> double& { return S(c).plateau_tol; }));
    k.push_back(real("bank.radius", "-", "test-field radius as a fraction of min(H, Lx/2)",
                     [=](Config& c) -> double& { return S(c).bank_radius; }));
    k.push_back(real("bank.tau", "-", "test-field time half-width as a fraction of T",
                     [=](Config& c) -> double& { return S(c).bank_tau; }));
    k.push_back(region("embedding.U", "embedding outer region", [=](Config& c) -> Subdomain& { return E(c).U; }));
    k.push_back(region("embedding.V", "embedding inner region", [=](Config& c) -> Subdomain& { return E(c).V; }));
    k.push_back(real("embedding.s", "-", "smoothness s", [=](Config& c) -> double& { return E(c).s; }));
    k.push_back(real("embedding.eps", "-", "smoothness loss eps", [=](Config& c) -> double& { return E(c).eps; }));
    k.push_back(real("embedding.q", "-", "Lebesgue exponent q", [=](Config& c) -> double& { return E(c).q; }));
    k.push_back(integer("embedding.members", "ensemble size", [=](Config& c) -> int& { return E(c).members; }));
    k.push_back(real("embedding.band", "1/length", "coarse band limit (fine = 2x)",
                     [=](Config& c) -> double& { return E(c).band; }));
    k.push_back(real("embedding.field_zeta", "-", "S2 exponent of ensemble members",
                     [=](Config& c) -> double& { return E(c).field_zeta; }));
    return k;
  }();
  return keys;
}

/// Name of the environment variable overriding `key`: VISLIM_ + upper-case,
/// with '.' replaced by '_' (domain.Nx -> VISLIM_DOMAIN_NX).
inline std::string env_name(const std::string& key) {
  std::string s = "VISLIM_";
  for (char ch : key) s += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

/// All problems of a config, as lines.
inline std::vector<std::string> config_problems(const Config& c) {
  std::vector<std::string> p = c.sweep.base.problems();
  try {
    c.sweep.base.init.validate(c.sweep.base.domain);
  } catch (const InvalidArgument& e) {
    p.push_back(e.what());
  }
  try {
    c.sweep.base.forcing.validate();
  } catch (const InvalidArgument& e) {
    p.push_back(e.what());
  }
  for (auto& q : c.sweep.analysis_problems()) p.push_back(q);
  try {
    c.embedding.validate();
  } catch (const InvalidArgument& e) {
    p.push_back(e.what());
  }
  return p;
}

/// Config errors, collected and reported together on one line.
class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : InvalidArgument(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s;
    for (const auto& x : e) s += (s.empty() ? "" : "; ") + x;
    return s;
  }
  std::vector<std::string> errors_;
};

/// Parses `key = value` text.  `source` names the text in messages; keys in
/// `required` must appear.  Environment overrides apply after the file.
inline Config parse_config_text(const std::string& text, const std::string& source = "config",
                                const std::vector<std::string>& required = {}, bool use_env = true) {
  Config cfg;
  std::vector<std::string> errors;
  std::map<std::string, const KeySpec*> table;
  for (const auto& k : config_keys()) table[k.name] = &k;
  std::map<std::string, std::vector<int>> seen;

  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(no);
    if (eq == std::string::npos) {
      errors.push_back(where + ": expected 'key = value'");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = line.substr(eq + 1);
    auto it = table.find(key);
    if (it == table.end()) {
      errors.push_back(where + ": unknown key '" + key + "'");
      continue;
    }
    seen[key].push_back(no);
    if (auto e = it->second->set(cfg, val); !e.empty()) errors.push_back(where + ": " + key + ": " + e);
  }
  for (const auto& [key, lines] : seen)
    if (lines.size() > 1) {
      std::string l;
      for (int n : lines) l += (l.empty() ? "" : ", ") + std::to_string(n);
      errors.push_back(source + ": duplicate key '" + key + "' on lines " + l);
    }
  if (use_env)
    for (const auto& k : config_keys())
      if (const char* v = std::getenv(env_name(k.name).c_str())) {
        seen[k.name].push_back(0);
        if (auto e = k.set(cfg, v); !e.empty()) errors.push_back("env " + env_name(k.name) + ": " + e);
      }
  for (const auto& r : required)
    if (!seen.count(r)) errors.push_back(source + ": missing required key '" + r + "'");
  if (errors.empty())
    for (auto& p : config_problems(cfg)) errors.push_back(source + ": " + p);
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

inline Config parse_config(const std::filesystem::path& path, const std::vector<std::string>& required = {},
                           bool use_env = true) {
  std::string text;
  try {
    auto b = read_file(path);
    text.assign(b.begin(), b.end());
  } catch (const IoError&) {
    throw IoError("cannot read config " + path.string());
  }
  return parse_config_text(text, path.filename().string(), required, use_env);
}

/// Every key with its effective value, in documentation order.
inline std::string echo_config(const Config& c) {
  std::string s = "# effective configuration\n";
  for (const auto& k : config_keys()) s += k.name + " = " + k.get(c) + "\n";
  return s;
}

}  // namespace vislim::io
