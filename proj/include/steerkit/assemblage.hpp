#pragma once

#include <vector>

#include "steerkit/qubit.hpp"

namespace steerkit {

/// Which party measures; the other receives the conditional states.
enum class Direction { AliceToBob, BobToAlice };

inline Side measuring_side(Direction d) {
  return d == Direction::AliceToBob ? Side::Alice : Side::Bob;
}

/// A binary projective measurement axis on the Bloch sphere.
struct MeasurementSetting {
  Eigen::Vector3d axis;

  explicit MeasurementSetting(const Eigen::Vector3d& n);  // NormalizationError
};

/// Projective effect M_{a|n} = (I + (-1)^a n . sigma) / 2.
Matrix2c effect(int outcome, const MeasurementSetting& setting);

/// Unnormalized conditional state of the steered party;
/// trace equals the outcome probability.
struct ConditionalState {
  int setting_index = 0;
  int outcome = 0;
  Matrix2c matrix;

  double probability() const { return matrix.trace().real(); }
  Eigen::Vector3d bloch_unnormalized() const {
    return steerkit::bloch_unnormalized(matrix);
  }
};

/// The full set of conditional states for one measuring party, together
/// with the steered party's reduced state. For every setting the two
/// outcomes sum to the reduced state (no-signalling).
struct Assemblage {
  std::vector<MeasurementSetting> settings;
  std::vector<ConditionalState> members;  // index 2*setting + outcome
  Matrix2c reduced;

  int setting_count() const { return static_cast<int>(settings.size()); }
  const ConditionalState& member(int setting, int outcome) const {
    return members[2 * setting + outcome];
  }
};

/// Conditional state of the non-measuring side for one (outcome, axis) pair.
ConditionalState conditional_state(const TwoQubitState& rho, int outcome,
                                   const MeasurementSetting& setting,
                                   Side measuring);

/// Builds the 2 x k assemblage. Settings must be pairwise non-equal and
/// non-antipodal (DuplicateSettingError otherwise).
Assemblage build_assemblage(const TwoQubitState& rho,
                            const std::vector<MeasurementSetting>& settings,
                            Side measuring);

inline Assemblage build_assemblage(const TwoQubitState& rho,
                                   const std::vector<MeasurementSetting>& settings,
                                   Direction direction) {
  return build_assemblage(rho, settings, measuring_side(direction));
}

/// Correlation matrix T_ij = trace(rho sigma_i (x) sigma_j) plus the two
/// local Bloch vectors. T's singular values are <= 1 for physical states.
struct CorrelationData {
  Eigen::Matrix3d T;
  Eigen::Vector3d alice;
  Eigen::Vector3d bob;
};

CorrelationData correlation_data(const TwoQubitState& rho);

}  // namespace steerkit
