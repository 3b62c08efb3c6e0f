#include "steerkit/criteria.hpp"

#include <cmath>
#include <string>

#include "steerkit/errors.hpp"

namespace steerkit {
namespace {

constexpr double kQuarterPi = 0.78539816339744830961;

void check_region_params(double p, double theta) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0)
    throw ParamError("mixing weight p must lie in [0, 1]");
  if (!std::isfinite(theta) || theta < 0.0 || theta > kQuarterPi)
    throw ParamError("angle theta must lie in [0, pi/4]");
}

}  // namespace

const char* to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::TwoWay: return "TwoWay";
    case RegionLabel::OneWayAtoB: return "OneWayAtoB";
    case RegionLabel::Unsteerable: return "Unsteerable";
  }
  return "?";
}

double upper_threshold(int k, double theta) {
  if (k != 2 && k != 3)
    throw ParamError("one-way thresholds are defined for k in {2, 3}");
  const double s = std::sin(2.0 * theta);
  return 1.0 / std::sqrt(1.0 + static_cast<double>(k - 1) * s * s);
}

double lower_threshold(int k) {
  if (k != 2 && k != 3)
    throw ParamError("one-way thresholds are defined for k in {2, 3}");
  return 1.0 / std::sqrt(static_cast<double>(k));
}

namespace {

RegionLabel classify(int k, double p, double theta) {
  check_region_params(p, theta);
  if (p > upper_threshold(k, theta)) return RegionLabel::TwoWay;
  const bool interior = theta > 0.0 && theta < kQuarterPi;
  if (interior && p > lower_threshold(k)) return RegionLabel::OneWayAtoB;
  return RegionLabel::Unsteerable;
}

}  // namespace

RegionLabel classify_two_settings(double p, double theta) {
  return classify(2, p, theta);
}

RegionLabel classify_three_settings(double p, double theta) {
  return classify(3, p, theta);
}

bool unsteerable_b_to_a_infinite(double p, double theta) {
  check_region_params(p, theta);
  if (p == 0.0) return true;  // continuity: the bound tends to -inf
  const double c = std::cos(2.0 * theta);
  return c * c >= (2.0 * p - 1.0) / ((2.0 - p) * p * p * p);
}

bool steerable_a_to_b_infinite(double p) { return p > 0.5; }

std::vector<MeasurementSetting> canonical_settings(int n) {
  std::vector<Eigen::Vector3d> axes;
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  switch (n) {
    case 2:
      axes = {{1, 0, 0}, {0, 0, 1}};
      break;
    case 3:
      axes = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
      break;
    case 4:  // cube body diagonals
      axes = {{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
      break;
    case 6:  // icosahedron vertex axes
      axes = {{0, 1, phi},  {0, 1, -phi}, {1, phi, 0},
              {1, -phi, 0}, {phi, 0, 1},  {-phi, 0, 1}};
      break;
    case 10:  // dodecahedron vertex axes
      axes = {{1, 1, 1},
              {1, 1, -1},
              {1, -1, 1},
              {1, -1, -1},
              {0, 1 / phi, phi},
              {0, 1 / phi, -phi},
              {1 / phi, phi, 0},
              {1 / phi, -phi, 0},
              {phi, 0, 1 / phi},
              {phi, 0, -1 / phi}};
      break;
    default:
      throw ParamError("canonical settings exist for n in {2, 3, 4, 6, 10}, got " +
                       std::to_string(n));
  }
  std::vector<MeasurementSetting> out;
  out.reserve(axes.size());
  for (const auto& axis : axes) out.emplace_back(axis.normalized());
  return out;
}

double linear_s(const TwoQubitState& state,
                const std::vector<MeasurementSetting>& settings,
                Direction steered_to_trusted) {
  if (settings.empty()) throw ParamError("linear witness needs at least one setting");
  const CorrelationData corr = correlation_data(state);
  Eigen::Matrix3d t = corr.T;
  if (steered_to_trusted == Direction::BobToAlice) t.transposeInPlace();
  double sum = 0.0;
  for (const auto& setting : settings)
    sum += std::abs(setting.axis.dot(t * setting.axis));
  return sum / static_cast<double>(settings.size());
}

double lhs_bound_c(const std::vector<MeasurementSetting>& settings) {
  const int n = static_cast<int>(settings.size());
  if (n < 1) throw ParamError("hidden-state bound needs at least one setting");
  if (n > 16)
    throw CapError("hidden-state bound brute force capped at 16 settings, got " +
                   std::to_string(n));
  // Global sign flip leaves the norm unchanged, so fix the last sign.
  double best = 0.0;
  const unsigned patterns = 1u << (n - 1);
  for (unsigned bits = 0; bits < patterns; ++bits) {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int j = 0; j < n; ++j) {
      const double sign = (j < n - 1 && ((bits >> j) & 1u)) ? -1.0 : 1.0;
      sum += sign * settings[static_cast<std::size_t>(j)].axis;
    }
    best = std::max(best, sum.norm());
  }
  return best / static_cast<double>(n);
}

LinearIneqResult evaluate_linear(const TwoQubitState& state,
                                 const std::vector<MeasurementSetting>& settings,
                                 Direction steered_to_trusted) {
  LinearIneqResult out;
  out.n = static_cast<int>(settings.size());
  out.s = linear_s(state, settings, steered_to_trusted);
  out.c = lhs_bound_c(settings);
  out.violation = out.s - out.c;
  return out;
}

}  // namespace steerkit
