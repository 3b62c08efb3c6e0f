#include "steerkit/assemblage.hpp"

#include <cmath>
#include <string>

namespace steerkit {

MeasurementSetting::MeasurementSetting(const Eigen::Vector3d& n) : axis(n) {
  if (std::abs(n.norm() - 1.0) > kUnitAxisTol) {
    throw NormalizationError("measurement axis is not unit length: |n| = " +
                             std::to_string(n.norm()));
  }
}

Matrix2c effect(int outcome, const MeasurementSetting& setting) {
  const double sign = outcome == 0 ? 1.0 : -1.0;
  return 0.5 * (Matrix2c::Identity() + sign * pauli_along(setting.axis));
}

namespace {

ConditionalState conditional_on_bob(const Matrix4c& rho, int outcome,
                                    const MeasurementSetting& setting) {
  const Matrix4c weighted = kron(effect(outcome, setting), Matrix2c::Identity()) * rho;
  ConditionalState cs;
  cs.outcome = outcome;
  cs.matrix = partial_trace(weighted, Side::Alice);
  // partial trace of M rho can pick up a tiny anti-Hermitian part; drop it
  cs.matrix = 0.5 * (cs.matrix + cs.matrix.adjoint().eval());
  return cs;
}

}  // namespace

ConditionalState conditional_state(const TwoQubitState& rho, int outcome,
                                   const MeasurementSetting& setting,
                                   Side measuring) {
  if (outcome != 0 && outcome != 1) {
    throw ParamError("outcome must be 0 or 1, got " + std::to_string(outcome));
  }
  // Side::Bob is handled by swapping factors and reusing the Alice path.
  const Matrix4c m =
      measuring == Side::Alice ? rho.matrix() : swap_sides(rho.matrix());
  return conditional_on_bob(m, outcome, setting);
}

Assemblage build_assemblage(const TwoQubitState& rho,
                            const std::vector<MeasurementSetting>& settings,
                            Side measuring) {
  if (settings.empty()) throw ParamError("assemblage needs at least one setting");
  for (size_t i = 0; i < settings.size(); ++i) {
    for (size_t j = i + 1; j < settings.size(); ++j) {
      const double dot = settings[i].axis.dot(settings[j].axis);
      if (std::abs(dot) > 1.0 - kUnitAxisTol) {
        throw DuplicateSettingError(
            "settings " + std::to_string(i) + " and " + std::to_string(j) +
            " are equal or antipodal (|dot| = " + std::to_string(std::abs(dot)) + ")");
      }
    }
  }

  Assemblage out;
  out.settings = settings;
  const Matrix4c m =
      measuring == Side::Alice ? rho.matrix() : swap_sides(rho.matrix());
  out.reduced = partial_trace(m, Side::Alice);
  for (size_t j = 0; j < settings.size(); ++j) {
    for (int a = 0; a < 2; ++a) {
      ConditionalState cs = conditional_on_bob(m, a, settings[j]);
      cs.setting_index = static_cast<int>(j);
      out.members.push_back(cs);
    }
  }
  return out;
}

CorrelationData correlation_data(const TwoQubitState& rho) {
  CorrelationData out;
  const Matrix4c& m = rho.matrix();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.T(i, j) = (m * kron(pauli(i), pauli(j))).trace().real();
    }
    out.alice[i] = (m * kron(pauli(i), Matrix2c::Identity())).trace().real();
    out.bob[i] = (m * kron(Matrix2c::Identity(), pauli(i))).trace().real();
  }
  return out;
}

}  // namespace steerkit
