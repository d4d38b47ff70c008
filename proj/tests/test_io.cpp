#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>

#include <unistd.h>

#include "vislim/io/config.hpp"
#include "vislim/io/plot.hpp"
#include "vislim/io/report.hpp"
#include "vislim/io/snapshot.hpp"
#include "vislim/solver.hpp"

using namespace vislim;
namespace fs = std::filesystem;

namespace {

std::string parse_error(const std::string& text, const std::vector<std::string>& required = {}) {
  try {
    io::parse_config_text(text, "cfg", required, false);
  } catch (const io::ConfigError& e) {
    return e.what();
  }
  return "";
}

VelocityField sample_field() {
  DomainSpec d;
  d.Nx = 16;
  d.Ny = 17;
  d.bc = BcKind::NavierFriction;
  d.beta = 0.5;
  d.alpha0 = 2.0;
  InitSpec s;
  s.seed = 42;
  VelocityField f = make_initial(s, d);
  f.nu = 3e-3;
  f.set_time(0.125);
  return f;
}

fs::path temp_dir() {
  const fs::path p = fs::temp_directory_path() / ("vislim_test_io_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const auto c = io::parse_config_text("# nothing\n\n", "cfg", {}, false);
  EXPECT_EQ(c.sweep.base.domain.Nx, DomainSpec{}.Nx);
  EXPECT_EQ(c.sweep.base.init.seed, 1u);
}

TEST(Config, ValuesAreApplied) {
  const auto c = io::parse_config_text(
      "domain.Nx = 32   # comment\ndomain.bc = navier_friction\ndomain.beta = 0.5\nsweep.nus = 0.01, 0.005\n"
      "subdomain.U = 0.4,1.6,0.3,0.7\nshifts.directions = axes\ninit.seed = 99\n",
      "cfg", {}, false);
  EXPECT_EQ(c.sweep.base.domain.Nx, 32);
  EXPECT_EQ(c.sweep.base.domain.bc, BcKind::NavierFriction);
  EXPECT_EQ(c.sweep.base.domain.beta, 0.5);
  EXPECT_EQ(c.sweep.nus, (std::vector<double>{0.01, 0.005}));
  EXPECT_EQ(c.sweep.U.x_lo, 0.4);
  EXPECT_TRUE(c.sweep.shift_axes_only);
  EXPECT_EQ(c.sweep.base.init.seed, 99u);
}

TEST(Config, BetaOutOfRangeIsRejected) {
  const auto e = parse_error("domain.beta = 1.5\n");
  EXPECT_NE(e.find("beta ∈ [0,1]"), std::string::npos) << e;
}

TEST(Config, DuplicateKeyListsLines) {
  const auto e = parse_error("domain.Nx = 32\ndomain.H = 1\ndomain.Nx = 64\n");
  EXPECT_NE(e.find("duplicate key 'domain.Nx' on lines 1, 3"), std::string::npos) << e;
}

TEST(Config, UnknownKeyIsAHardError) {
  const auto e = parse_error("domain.nx = 32\n");
  EXPECT_NE(e.find("cfg:1: unknown key 'domain.nx'"), std::string::npos) << e;
}

TEST(Config, AllErrorsAreReported) {
  try {
    io::parse_config_text("bogus = 1\ndomain.Nx = abc\nno equals sign\n", "cfg", {"sweep.nus"}, false);
    FAIL();
  } catch (const io::ConfigError& e) {
    ASSERT_EQ(e.errors().size(), 4u);
    EXPECT_NE(e.errors()[0].find("unknown key"), std::string::npos);
    EXPECT_NE(e.errors()[1].find("cfg:2: domain.Nx"), std::string::npos);
    EXPECT_NE(e.errors()[2].find("expected 'key = value'"), std::string::npos);
    EXPECT_NE(e.errors()[3].find("missing required key 'sweep.nus'"), std::string::npos);
    EXPECT_EQ(std::string(e.what()).find('\n'), std::string::npos);
  }
}

TEST(Config, RangeErrorsAreCollected) {
  const auto e = parse_error("domain.Nx = 7\ndomain.alpha0 = -1\n");
  EXPECT_NE(e.find("Nx must be even"), std::string::npos) << e;
  EXPECT_NE(e.find("alpha0 must be > 0"), std::string::npos) << e;
}

TEST(Config, EnvironmentOverridesFile) {
  EXPECT_EQ(io::env_name("domain.Nx"), "VISLIM_DOMAIN_NX");
  ::setenv("VISLIM_DOMAIN_NX", "48", 1);
  const auto c = io::parse_config_text("domain.Nx = 32\n", "cfg");
  ::unsetenv("VISLIM_DOMAIN_NX");
  EXPECT_EQ(c.sweep.base.domain.Nx, 48);
}

TEST(Config, EchoRoundTrips) {
  const auto c = io::parse_config_text("domain.Nx = 32\nrun.nu = 0.0025\nsweep.nus = 0.01,0.005,0.0025\n", "cfg",
                                       {}, false);
  const auto text = io::echo_config(c);
  EXPECT_EQ(io::echo_config(io::parse_config_text(text, "echo", {}, false)), text);
  for (const auto& k : io::config_keys()) EXPECT_NE(text.find(k.name + " = "), std::string::npos) << k.name;
}

TEST(Config, MissingFileIsAnIoError) {
  EXPECT_THROW(io::parse_config("/nonexistent/vislim.conf"), IoError);
}

TEST(Snapshot, RoundTripIsBitwise) {
  const auto f = sample_field();
  const auto bytes = io::encode_snapshot(f);
  const auto g = io::decode_snapshot(bytes);
  EXPECT_EQ(io::encode_snapshot(g), bytes);
  EXPECT_EQ(std::memcmp(f.u.data().data(), g.u.data().data(), 8 * f.u.data().size()), 0);
  EXPECT_EQ(std::memcmp(f.v.data().data(), g.v.data().data(), 8 * f.v.data().size()), 0);
  EXPECT_EQ(g.time(), 0.125);
  EXPECT_EQ(g.nu, 3e-3);
  EXPECT_EQ(g.domain().bc, BcKind::NavierFriction);
  EXPECT_EQ(g.domain().beta, 0.5);

  const auto dir = temp_dir();
  io::save_snapshot(dir / "a.nsfld", f);
  EXPECT_EQ(io::encode_snapshot(io::load_snapshot(dir / "a.nsfld")), bytes);
  fs::remove_all(dir);
}

TEST(Snapshot, HeaderLayoutIsLittleEndian) {
  const auto b = io::encode_snapshot(sample_field());
  EXPECT_EQ(std::string(b.begin(), b.begin() + 6), "NSFLD1");
  EXPECT_EQ(b[8], 1);  // version
  EXPECT_EQ(b[9], 0);
  EXPECT_EQ(b[12], 16);  // Nx
  EXPECT_EQ(b[16], 17);  // Ny
  EXPECT_EQ(b.size(), io::kSnapshotHeaderBytes + 16u * 16 * 17);
}

TEST(Snapshot, TruncationReportsOffset) {
  auto b = io::encode_snapshot(sample_field());
  b.resize(b.size() - 5);
  try {
    io::decode_snapshot(b, "x");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("truncated payload"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("byte offset " + std::to_string(b.size())), std::string::npos) << e.what();
  }
  b.resize(20);
  EXPECT_THROW(io::decode_snapshot(b), IoError);
}

TEST(Snapshot, VersionBumpIsUnsupported) {
  auto b = io::encode_snapshot(sample_field());
  b[8] = 2;
  try {
    io::decode_snapshot(b);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported version 2"), std::string::npos);
  }
}

TEST(Snapshot, BadMagicAndNaNAreRejected) {
  auto b = io::encode_snapshot(sample_field());
  auto m = b;
  m[0] = 'X';
  EXPECT_THROW(io::decode_snapshot(m), IoError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::size_t off = io::kSnapshotHeaderBytes + 8 * 7;
  std::memcpy(b.data() + off, &nan, 8);
  try {
    io::decode_snapshot(b);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("byte offset " + std::to_string(off)), std::string::npos) << e.what();
  }
}

TEST(Report, EmptySweepIsValidJson) {
  const auto s = io::dump(io::to_json(SweepReport{}));
  EXPECT_EQ(s, io::dump(io::to_json(SweepReport{})));
  const auto j = io::json::parse(s);
  EXPECT_EQ(j["cross_nu"], "insufficient data");
  EXPECT_TRUE(j["records"].empty());
}

TEST(Report, KeysAreSortedAndNonFiniteIsText) {
  io::json j = {{"zeta", 1}, {"alpha", io::num(INFINITY)}, {"mid", io::num(std::nan(""))}};
  EXPECT_EQ(j.dump(), R"({"alpha":"inf","mid":"nan","zeta":1})");
}

TEST(Report, Sha256KnownVector) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Report, EnergyCsvColumns) {
  EnergyLedger l;
  l.start(0.0, 1.0);
  l.record(0.1, 0.9, 0.05, 0.01, 0.0);
  const auto csv = io::energy_csv(l);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,E,D_bulk,D_wall,W_force");
  EXPECT_NE(csv.find("0.1,0.9,0.05,0.01,0"), std::string::npos);
}

TEST(Report, PlotIsStaticSvg) {
  const auto svg = io::loglog_svg("t", "x", "y", {{"a", {1, 10, 100}, {1, 2, 4}}, {"b", {1, 2}, {0, -1}}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(svg.find("script"), std::string::npos);
}
