#pragma once

#include <functional>
#include <vector>

#include "vislim/solver/initial.hpp"
#include "vislim/solver/stepper.hpp"

namespace vislim {

struct RunResult {
  std::vector<VelocityField> snapshots;  ///< t = 0, each cadence point, and t = T
  EnergyLedger ledger;
  long steps = 0;
  long retries = 0;
  double alpha = 0.0;  ///< effective inverse slip length (0 under no-slip)
};

/// Called with each snapshot and its index as it is produced.
using SnapshotSink = std::function<void(const VelocityField&, int)>;

/// Integrates from the given initial field to domain.T_final.
inline RunResult run(const RunConfig& cfg, const VelocityField& initial, const SnapshotSink& sink = {},
                     bool keep_snapshots = true) {
  Stepper st(cfg, initial);
  RunResult res;
  int index = 0;
  auto emit = [&]() {
    VelocityField s = st.state();
    if (sink) sink(s, index);
    ++index;
    if (keep_snapshots) res.snapshots.push_back(std::move(s));
  };
  emit();
  const double T = cfg.domain.T_final;
  const double eps = 1e-12 * std::max(1.0, T);
  if (cfg.snapshot_interval > 0) {
    for (long k = 1; T - st.time() > eps; ++k) {
      const double target = std::min(T, k * cfg.snapshot_interval);
      if (target - st.time() <= eps) continue;
      while (target - st.time() > eps) st.step(target);
      emit();
    }
  } else {
    long since = 0;
    while (T - st.time() > eps) {
      st.step(T);
      if (++since == cfg.snapshot_every || !(T - st.time() > eps)) {
        emit();
        since = 0;
      }
    }
  }
  res.ledger = st.ledger();
  res.steps = st.steps();
  res.retries = st.retries();
  res.alpha = st.alpha();
  return res;
}

inline RunResult run(const RunConfig& cfg, const SnapshotSink& sink = {}, bool keep_snapshots = true) {
  return run(cfg, make_initial(cfg.init, cfg.domain), sink, keep_snapshots);
}

}  // namespace vislim
