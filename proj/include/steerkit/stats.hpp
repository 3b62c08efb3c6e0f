#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "steerkit/assemblage.hpp"

namespace steerkit {

/// Coincidence counts: for each measurement setting of the measuring party,
/// its outcome a, and each Pauli tomography basis on the steered side, the
/// counts of the steered side's +1 / -1 outcomes. Simulated counts are
/// integers; expected (infinite-statistics) counts may be fractional.
struct CountRecord {
  std::vector<MeasurementSetting> settings;
  Direction direction = Direction::AliceToBob;
  std::vector<double> counts;  // [setting][a][basis][sign], row-major

  int setting_count() const { return static_cast<int>(settings.size()); }

  /// sign_index 0 is the +1 outcome, 1 the -1 outcome; basis 0,1,2 = x,y,z.
  int cell(int setting, int a, int basis, int sign_index) const {
    return ((setting * 2 + a) * 3 + basis) * 2 + sign_index;
  }
  double& at(int setting, int a, int basis, int sign_index) {
    return counts[static_cast<std::size_t>(cell(setting, a, basis, sign_index))];
  }
  double at(int setting, int a, int basis, int sign_index) const {
    return counts[static_cast<std::size_t>(cell(setting, a, basis, sign_index))];
  }
  double total() const;
};

struct BootstrapSummary {
  double mean_r = 0.0;
  double std_r = 0.0;
  int resamples = 0;
  std::uint64_t seed = 0;
};

/// Poissonian forward model: each (setting, basis) block receives an equal
/// share mean_total_counts / (3k) of integration, and every joint-outcome
/// cell is drawn Poisson with mean share * Born probability. Deterministic
/// given seed. mean_total_counts must be >= 100.
CountRecord simulate_counts(const TwoQubitState& rho,
                            const std::vector<MeasurementSetting>& settings,
                            Direction direction, double mean_total_counts,
                            std::uint64_t seed);

/// The exact cell means of simulate_counts (the infinite-statistics limit).
CountRecord expected_counts(const TwoQubitState& rho,
                            const std::vector<MeasurementSetting>& settings,
                            Direction direction, double mean_total_counts);

/// Linear-inversion tomography of every conditional state, followed by
/// no-signalling symmetrization: the reduced state is the settings-average
/// of the outcome sums, and each setting's members are shifted by half the
/// gap so they sum to it exactly. Bloch vectors are not clamped; slightly
/// non-physical members are legal solver input. Throws InsufficientData
/// when a (setting, basis) block has no counts.
Assemblage reconstruct_assemblage(const CountRecord& counts);

/// Parametric bootstrap: resample every cell Poisson(count), reconstruct,
/// and recompute the hidden-state radius at the record's own settings.
/// k and direction must match the record (they are cross-checks, not
/// overrides). resamples >= 10; deterministic given seed.
BootstrapSummary bootstrap_radius(const CountRecord& counts, int k,
                                  Direction direction, int resamples = 100,
                                  std::uint64_t seed = 0);

/// CSV with columns setting_index,a,basis,bob_outcome,count plus comment
/// lines carrying the axes and direction, so records round-trip.
void save_counts(const CountRecord& counts, const std::string& path);
CountRecord load_counts(const std::string& path);

}  // namespace steerkit
