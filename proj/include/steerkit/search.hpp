#pragma once

#include <cstdint>
#include <vector>

#include "steerkit/lhsm.hpp"

namespace steerkit {

struct SearchConfig {
  int restarts = 32;
  int max_iters = 400;   // probe evaluations per restart
  double tol = 1e-4;     // convergence tolerance on r
  std::uint64_t seed = 0;
  bool include_canonical = true;
};

struct SteeringRadiusReport {
  double R = 0.0;
  std::vector<MeasurementSetting> best_settings;
  Direction direction = Direction::AliceToBob;
  int k = 0;
  std::vector<double> restart_values;  // refined r per restart, index-aligned
  int best_restart = -1;
};

/// Steering radius: max over k measurement axes of the hidden-state radius,
/// by multi-start pattern search. Deterministic given config.seed; restarts
/// are independent and merged by max with ties to the lowest index. When
/// include_canonical is set, restart 0 starts from canonical_settings(k) and
/// the result never falls below the canonical value. SolverStall propagates
/// with the offending axes appended to the message. k must be 2 or 3.
SteeringRadiusReport steering_radius(const TwoQubitState& state, int k,
                                     Direction direction,
                                     const SearchConfig& config = {});

struct RefineResult {
  std::vector<MeasurementSetting> settings;
  double r = 0.0;
};

/// Coordinate pattern search on the spherical angles of each axis, with a
/// shrinking step. Probes are screened by a single feasibility call at the
/// incumbent radius before a full bisection. Returns at least the starting
/// radius (within solver tolerance). Any setting count in 1..16 is accepted.
RefineResult local_refine(const TwoQubitState& state,
                          std::vector<MeasurementSetting> start,
                          Direction direction, int max_iters = 400,
                          double tol = 1e-4);

}  // namespace steerkit
