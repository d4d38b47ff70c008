#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vislim/analysis.hpp"
#include "vislim/analysis/suites.hpp"
#include "vislim/io/config.hpp"
#include "vislim/io/plot.hpp"
#include "vislim/io/report.hpp"

namespace fs = std::filesystem;
using namespace vislim;
using io::json;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
  bool plots = false;
  std::string snapshots;
  std::string subdomain;
  std::string suite;
};

io::Config load_config(const Options& o, const std::vector<std::string>& required = {}) {
  io::Config c = o.config.empty() ? io::parse_config_text("", "defaults", required) : io::parse_config(o.config, required);
  if (o.seed) c.sweep.base.init.seed = *o.seed;
  c.sweep.threads = o.threads;
  if (auto p = io::config_problems(c); !p.empty()) throw io::ConfigError(p);
  return c;
}

json config_block(const io::Config& c) {
  const std::string text = io::echo_config(c);
  return {{"text", text}, {"sha256", io::sha256_hex(text)}};
}

json shifts_json(const ShiftSet& s) {
  json dirs = json::array();
  for (const auto& e : s.directions) dirs.push_back({e[0], e[1]});
  return {{"directions", dirs}, {"magnitudes", s.magnitudes}};
}

int cmd_simulate(const Options& o) {
  const io::Config c = load_config(o);
  const RunConfig& rc = c.sweep.base;
  const fs::path out = o.out, snapdir = out / "snapshots";
  io::ensure_dir(snapdir);
  io::write_text(out / "config_used.txt", io::echo_config(c));

  json files = json::array();
  auto sink = [&](const VelocityField& s, int k) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%05d.nsfld", k);
    auto bytes = io::encode_snapshot(s);
    const std::string b(bytes.begin(), bytes.end());
    io::write_file(snapdir / name, b);
    files.push_back({{"file", std::string("snapshots/") + name}, {"time", s.time()}, {"sha256", io::sha256_hex(b)}});
  };
  const RunResult r = run(rc, sink, false);
  io::write_text(out / "energy.csv", io::energy_csv(r.ledger));
  const auto& L = r.ledger;
  json j = {{"version", VISLIM_VERSION},
            {"config", config_block(c)},
            {"snapshots", files},
            {"steps", r.steps},
            {"retries", r.retries},
            {"alpha", r.alpha},
            {"ledger", io::to_json(LedgerSummary{L.E0(), L.kinetic.back(), L.dissipation_bulk.back(),
                                                 L.dissipation_wall.back(), L.force_work.back(),
                                                 L.max_step_violation(), L.max_cumulative_violation(),
                                                 L.inequality_holds(), r.steps, r.retries})}};
  io::write_text(out / "run.json", io::dump(j));
  std::cout << "simulate: " << r.steps << " steps, " << files.size() << " snapshots, energy inequality "
            << (L.inequality_holds() ? "holds" : "VIOLATED") << "\n";
  return 0;
}

Subdomain parse_region_flag(const std::string& s) {
  auto l = io::detail::parse_list(s);
  if (!l || l->size() != 4) throw InvalidArgument("--subdomain expects x0,x1,y0,y1, got '" + s + "'");
  return {(*l)[0], (*l)[1], (*l)[2], (*l)[3]};
}

int cmd_diagnose(const Options& o) {
  io::Config c = load_config(o);
  std::vector<fs::path> paths;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(o.snapshots, ec))
    if (e.path().extension() == ".nsfld") paths.push_back(e.path());
  if (ec) throw IoError("cannot list " + o.snapshots + ": " + ec.message());
  if (paths.empty()) throw IoError("no .nsfld files in " + o.snapshots);
  std::sort(paths.begin(), paths.end());

  std::vector<VelocityField> snaps;
  json inputs = json::array();
  for (const auto& p : paths) {
    auto bytes = io::read_file(p);
    snaps.push_back(io::decode_snapshot(bytes, p.string()));
    inputs.push_back({{"file", p.filename().string()},
                      {"time", snaps.back().time()},
                      {"sha256", io::sha256_hex(bytes.data(), bytes.size())}});
    const auto& a = snaps.front();
    const auto& b = snaps.back();
    if (!a.domain().same_grid(b.domain())) throw InvalidArgument(p.string() + ": grid differs from " + paths[0].string());
    if (a.nu != b.nu) throw InvalidArgument(p.string() + ": viscosity differs from " + paths[0].string());
    if (snaps.size() > 1 && !(b.time() > snaps[snaps.size() - 2].time()))
      throw InvalidArgument(p.string() + ": snapshot times must increase with file name");
  }
  const DomainSpec& d = snaps.front().domain();
  const double nu = snaps.front().nu;
  if (!(nu > 0)) throw InvalidArgument("snapshots carry nu = " + io::format_double(nu) + "; the fit needs nu > 0");
  c.sweep.base.domain = d;
  const Subdomain U = o.subdomain.empty() ? c.sweep.U : parse_region_flag(o.subdomain);
  U.validate(d);

  const ShiftSet shifts = c.sweep.shifts_for(U);
  const auto table = structure_function(snaps, U, shifts);
  const auto fit = fit_zeta2(table, nu);
  const double D = [&] {
    double s = 0;
    const auto tw = trapezoid_time_weights(snapshot_times(snaps));
    for (std::size_t n = 0; n < snaps.size(); ++n) s += tw[n] * nu * dirichlet_form(snaps[n], snaps[n]);
    return s;
  }();
  const double delta = std::clamp(std::min(fit.zeta2 / 2 - c.sweep.delta_offset, 0.45), 1e-6, 0.5 - 1e-6);
  const double mx = 0.2 * U.width(), my = 0.2 * U.height();
  const Subdomain inner{U.x_lo + mx, U.x_hi - mx, U.y_lo + my, U.y_hi - my};
  const Cutoff chi = make_cutoff(d, U, inner);
  std::vector<VorticityField> w;
  for (const auto& s : snaps) w.push_back(curl(s));

  json norms = {{"version", VISLIM_VERSION},
                {"config", config_block(c)},
                {"inputs", inputs},
                {"nu", nu},
                {"subdomain", io::to_json(U)},
                {"shifts", shifts_json(shifts)},
                {"fit", io::to_json(fit)},
                {"snapshot_dissipation", io::num(D)},
                {"sub_dissipation", io::to_json(sub_dissipation_check(table, fit, nu, D))},
                {"delta", delta},
                {"cutoff_inner_region", io::to_json(inner)},
                {"besov_u", io::to_json(besov_norm_time(snaps, fit.zeta2 / 2, U, shifts))},
                {"vorticity_sobolev", io::to_json(sobolev_norm_cutoff_time(w, snapshot_times(snaps), -1 + delta, chi))},
                {"velocity_sobolev", io::to_json(sobolev_norm_cutoff_time(snaps, snapshot_times(snaps), delta, chi))}};
  try {
    norms["equivalence"] = io::to_json(equivalence_report(snaps, c.sweep.regions, fit.zeta2, delta));
  } catch (const InvalidArgument& e) {
    norms["equivalence"] = std::string("not computed: ") + e.what();
  }

  const auto chain = verify_embedding_chain(c.embedding);
  const auto cut = verify_cutoff_inequality(c.embedding);
  json ratios = json::object();
  for (const auto& r : chain.ratios)
    ratios[r.name] = {{"max_coarse", io::num(r.max_coarse)},
                      {"max_fine", io::num(r.max_fine)},
                      {"relative_change", io::num(r.relative_change)},
                      {"finite", r.finite},
                      {"stable", r.stable}};
  json constants = {{"version", VISLIM_VERSION},
                    {"config", config_block(c)},
                    {"embedding", {{"ratios", ratios}, {"pass", chain.pass}}},
                    {"cutoff_inequality",
                     {{"holder_norm", io::num(cut.holder)},
                      {"calibration_max", io::num(cut.calibration_max)},
                      {"constant", io::num(cut.constant)},
                      {"max_coarse", io::num(cut.max_coarse)},
                      {"max_fine", io::num(cut.max_fine)},
                      {"relative_change", io::num(cut.relative_change)},
                      {"bounded", cut.bounded},
                      {"stable", cut.stable},
                      {"pass", cut.pass}}},
                    {"diagnose_cutoff_holder", io::to_json(holder_norm(chi.values, fit.zeta2 / 2, shifts))}};

  const fs::path out = o.out;
  io::ensure_dir(out);
  io::write_text(out / "s2.csv", io::s2_csv(table));
  io::write_text(out / "norms.json", io::dump(norms));
  io::write_text(out / "constants.json", io::dump(constants));
  if (o.plots) {
    io::PlotSeries s{"S2 (direction average)", shifts.magnitudes, table.averaged};
    std::vector<double> model;
    for (double r : shifts.magnitudes) model.push_back(fit.C_U * std::pow(r, fit.zeta2));
    io::write_text(out / "s2.svg", io::loglog_svg("structure function", "|r|", "S2",
                                                  {s, {"C |r|^zeta2", shifts.magnitudes, model}}));
  }
  std::cout << "diagnose: " << snaps.size() << " snapshots, zeta2 " << io::format_double(fit.zeta2) << ", C_U "
            << io::format_double(fit.C_U) << "\n";
  return 0;
}

int cmd_sweep(const Options& o) {
  const io::Config c = load_config(o, {"sweep.nus"});
  if (auto p = c.sweep.problems(); !p.empty()) throw io::ConfigError(p);
  const fs::path out = o.out;
  io::ensure_dir(out);
  io::write_text(out / "config_used.txt", io::echo_config(c));
  const SweepReport rep = run_sweep(c.sweep, [](int k, const NuRecord& r, const RunResult*) {
    std::cerr << "sweep: nu[" << k << "] = " << io::format_double(r.nu) << (r.ok ? " done" : " failed: " + r.error)
              << "\n";
  });
  json j = {{"version", VISLIM_VERSION}, {"config", config_block(c)}, {"report", io::to_json(rep)}};
  io::write_text(out / "sweep_report.json", io::dump(j));
  for (std::size_t k = 0; k < rep.records.size(); ++k)
    if (rep.records[k].ok) io::write_text(out / ("s2_nu_" + std::to_string(k) + ".csv"), io::s2_csv(rep.records[k].s2));
  io::write_text(out / "residuals.csv", io::residuals_csv(rep));
  if (o.plots) {
    std::vector<io::PlotSeries> s2;
    io::PlotSeries V{"max |V_j|"}, Dn{"D_bulk + D_wall"};
    for (const auto& r : rep.records) {
      if (!r.ok) continue;
      s2.push_back({"nu = " + io::format_double(r.nu), r.s2.shifts.magnitudes, r.s2.averaged});
      V.x.push_back(r.nu);
      V.y.push_back(r.max_abs_V);
      Dn.x.push_back(r.nu);
      Dn.y.push_back(r.ledger.dissipation_bulk + r.ledger.dissipation_wall);
    }
    io::write_text(out / "s2_loglog.svg", io::loglog_svg("structure functions", "|r|", "S2", s2));
    io::write_text(out / "residuals.svg", io::loglog_svg("viscous residual and dissipation", "nu", "", {V, Dn}));
  }
  if (rep.cross_sufficient)
    std::cout << "sweep: inertial " << to_string(rep.inertial.verdict) << ", vorticity "
              << to_string(rep.vorticity.verdict) << ", agree " << (rep.verdicts_agree ? "yes" : "no")
              << ", viscous slope " << io::format_double(rep.viscous_slope) << "\n";
  else
    std::cout << "sweep: insufficient data for cross-viscosity verdicts\n";
  for (const auto& r : rep.records)
    if (!r.ok) throw NumericalFailure("run at nu = " + io::format_double(r.nu) + " failed: " + r.error);
  return 0;
}

int cmd_verify(const Options& o) {
  const io::Config c = load_config(o);
  std::vector<SuiteCheck> checks;
  if (o.suite == "solver") {
    checks = solver_suite();
  } else if (o.suite == "embeddings") {
    checks = embedding_suite(c.embedding);
  } else {
    EquivalenceSuiteConfig e;
    if (o.seed) e.seed = *o.seed;
    checks = equivalence_suite(e);
  }
  bool ok = true;
  json arr = json::array();
  for (const auto& k : checks) {
    std::cout << (k.pass ? "PASS " : "FAIL ") << k.name << ": " << k.detail << "\n";
    arr.push_back({{"name", k.name}, {"pass", k.pass}, {"detail", k.detail}});
    ok &= k.pass;
  }
  if (!o.out.empty() && o.out != ".") {
    io::ensure_dir(o.out);
    io::write_text(fs::path(o.out) / ("verify_" + o.suite + ".json"),
                   io::dump({{"version", VISLIM_VERSION}, {"suite", o.suite}, {"checks", arr}, {"pass", ok}}));
  }
  return ok ? 0 : 1;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int fail(int code, const char* kind, const std::string& msg) {
  std::cerr << "vislim: error code=" << code << " kind=" << kind << ": " << one_line(msg) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel-flow inviscid-limit diagnostics"};
  app.set_version_flag("--version", VISLIM_VERSION);
  app.require_subcommand(1);
  Options o;
  auto global = [&](CLI::App* s) {
    s->add_option("--config", o.config, "key = value config file");
    s->add_option("--out", o.out, "output directory");
    s->add_option("--threads", o.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
    s->add_option("--seed", o.seed, "overrides init.seed");
    s->add_flag("--plots", o.plots, "also write SVG plots");
  };
  auto* sim = app.add_subcommand("simulate", "integrate one run, write snapshots and the energy ledger");
  global(sim);
  auto* dia = app.add_subcommand("diagnose", "structure functions, norms and constants from snapshots");
  global(dia);
  dia->add_option("--snapshots", o.snapshots, "directory of .nsfld files")->required();
  dia->add_option("--subdomain", o.subdomain, "x0,x1,y0,y1 (default: subdomain.U)");
  auto* swp = app.add_subcommand("sweep", "viscosity sweep with cross-viscosity verdicts");
  global(swp);
  auto* ver = app.add_subcommand("verify", "run a property suite; exit 1 on failure");
  global(ver);
  ver->add_option("--suite", o.suite, "embeddings | equivalence | solver")
      ->required()
      ->check(CLI::IsMember({"embeddings", "equivalence", "solver"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "usage", e.what());
  }

  try {
    if (*sim) return cmd_simulate(o);
    if (*dia) return cmd_diagnose(o);
    if (*swp) return cmd_sweep(o);
    return cmd_verify(o);
  } catch (const Error& e) {
    return fail(static_cast<int>(e.kind()), to_string(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(3, "numerical", "out of memory");
  } catch (const std::exception& e) {
    return fail(3, "numerical", e.what());
  }
}
