#include "steerkit/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>

#include "steerkit/criteria.hpp"
#include "steerkit/errors.hpp"
#include "steerkit/rng.hpp"

namespace steerkit {
namespace {

constexpr double kMinAxisAngle = 0.017453292519943295;  // 1 degree
constexpr double kInitialStep = 0.35;
constexpr double kFinalStep = 5e-4;

Eigen::Vector3d axis_from_angles(double polar, double azimuth) {
  const double s = std::sin(polar);
  return {s * std::cos(azimuth), s * std::sin(azimuth), std::cos(polar)};
}

std::vector<double> angles_of(const std::vector<MeasurementSetting>& settings) {
  std::vector<double> angles(2 * settings.size());
  for (std::size_t j = 0; j < settings.size(); ++j) {
    const Eigen::Vector3d& v = settings[j].axis;
    angles[2 * j] = std::acos(std::clamp(v.z(), -1.0, 1.0));
    angles[2 * j + 1] = std::atan2(v.y(), v.x());
  }
  return angles;
}

std::vector<MeasurementSetting> settings_from_angles(const std::vector<double>& angles) {
  std::vector<MeasurementSetting> out;
  out.reserve(angles.size() / 2);
  for (std::size_t j = 0; j + 1 < angles.size(); j += 2)
    out.emplace_back(axis_from_angles(angles[j], angles[j + 1]));
  return out;
}

bool axes_too_close(const std::vector<MeasurementSetting>& settings) {
  const double cap = std::cos(kMinAxisAngle);
  for (std::size_t i = 0; i < settings.size(); ++i)
    for (std::size_t j = i + 1; j < settings.size(); ++j)
      if (std::abs(settings[i].axis.dot(settings[j].axis)) > cap) return true;
  return false;
}

std::vector<MeasurementSetting> random_settings(int k, CounterRng rng) {
  std::vector<MeasurementSetting> out;
  out.reserve(static_cast<std::size_t>(k));
  const double cap = std::cos(kMinAxisAngle);
  while (static_cast<int>(out.size()) < k) {
    Eigen::Vector3d v(rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian());
    const double norm = v.norm();
    if (norm < 1e-9) continue;
    v /= norm;
    bool clash = false;
    for (const auto& s : out)
      if (std::abs(s.axis.dot(v)) > cap) clash = true;
    if (!clash) out.emplace_back(v);
  }
  return out;
}

std::string describe_settings(const std::vector<MeasurementSetting>& settings) {
  std::string out;
  char buf[96];
  for (const auto& s : settings) {
    std::snprintf(buf, sizeof(buf), "(%.6f, %.6f, %.6f) ", s.axis.x(),
                  s.axis.y(), s.axis.z());
    out += buf;
  }
  if (!out.empty()) out.pop_back();
  return out;
}

/// Pattern search over spherical angles. The solver is reused across probes
/// so warm starts carry over; a probe is screened by one feasibility call at
/// the incumbent radius and only bisected when it can improve.
RefineResult refine_impl(const TwoQubitState& state,
                         std::vector<MeasurementSetting> start,
                         Direction direction, int max_iters, double tol,
                         std::optional<LhsmSolver>& solver) {
  const double inner_tol = std::max(1e-5, 0.25 * tol);

  std::vector<double> angles = angles_of(start);
  Assemblage assemblage = build_assemblage(state, start, direction);
  if (!solver)
    solver.emplace(assemblage);
  else
    solver->retarget(assemblage);

  RadiusResult incumbent = solver->min_max_radius(inner_tol);
  double r_best = incumbent.r;

  int evals = 0;
  double step = kInitialStep;
  while (step > kFinalStep && evals < max_iters) {
    bool improved = false;
    for (std::size_t c = 0; c < angles.size() && evals < max_iters; ++c) {
      for (double sign : {1.0, -1.0}) {
        if (evals >= max_iters) break;
        std::vector<double> probe_angles = angles;
        probe_angles[c] += sign * step;
        std::vector<MeasurementSetting> probe = settings_from_angles(probe_angles);
        if (axes_too_close(probe)) continue;
        solver->retarget(build_assemblage(state, probe, direction));
        ++evals;
        if (solver->feasible_at(r_best).feasible()) continue;  // cannot beat r_best
        RadiusResult result = solver->min_max_radius(inner_tol, r_best);
        if (result.r > r_best + 1e-9) {
          r_best = result.r;
          angles = std::move(probe_angles);
          improved = true;
          break;  // re-probe remaining coordinates from the new point
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  RefineResult out;
  out.settings = settings_from_angles(angles);
  out.r = r_best;
  return out;
}

double radius_at(const TwoQubitState& state,
                 const std::vector<MeasurementSetting>& settings,
                 Direction direction, double tol,
                 std::optional<LhsmSolver>& solver) {
  Assemblage assemblage = build_assemblage(state, settings, direction);
  if (!solver)
    solver.emplace(assemblage);
  else
    solver->retarget(assemblage);
  return solver->min_max_radius(tol).r;
}

}  // namespace

RefineResult local_refine(const TwoQubitState& state,
                          std::vector<MeasurementSetting> start,
                          Direction direction, int max_iters, double tol) {
  if (start.empty()) throw ParamError("local_refine needs at least one setting");
  if (max_iters < 1) throw ParamError("max_iters must be >= 1");
  std::optional<LhsmSolver> solver;
  try {
    return refine_impl(state, std::move(start), direction, max_iters, tol, solver);
  } catch (const SolverStall& stall) {
    throw SolverStall(std::string(stall.what()) + "; during local refinement",
                      stall.residual, stall.iterations);
  }
}

SteeringRadiusReport steering_radius(const TwoQubitState& state, int k,
                                     Direction direction,
                                     const SearchConfig& config) {
  if (k != 2 && k != 3)
    throw ParamError("outer search supports k in {2, 3}, got " + std::to_string(k));
  if (config.restarts < 1) throw ParamError("restarts must be >= 1");
  if (config.max_iters < 1) throw ParamError("max_iters must be >= 1");

  CounterRng rng(config.seed);
  SteeringRadiusReport report;
  report.direction = direction;
  report.k = k;
  report.restart_values.reserve(static_cast<std::size_t>(config.restarts));

  std::optional<LhsmSolver> solver;
  double best_r = -1.0;
  std::vector<MeasurementSetting> best_settings;

  for (int restart = 0; restart < config.restarts; ++restart) {
    std::vector<MeasurementSetting> start =
        (restart == 0 && config.include_canonical)
            ? canonical_settings(k)
            : random_settings(k, rng.derive(static_cast<std::uint64_t>(restart)));
    RefineResult refined;
    try {
      refined = refine_impl(state, std::move(start), direction,
                            config.max_iters, config.tol, solver);
    } catch (const SolverStall& stall) {
      throw SolverStall(std::string(stall.what()) + "; search restart " +
                            std::to_string(restart),
                        stall.residual, stall.iterations);
    }
    report.restart_values.push_back(refined.r);
    if (refined.r > best_r) {
      best_r = refined.r;
      best_settings = std::move(refined.settings);
      report.best_restart = restart;
    }
  }

  // Tight re-solve of the winner (kept at least at the refined estimate, so
  // R never drops below any restart value); the canonical axes act as a
  // floor so the report never regresses below them when they are searched.
  try {
    double tight = std::max(
        radius_at(state, best_settings, direction, 1e-5, solver), best_r);
    if (config.include_canonical) {
      std::vector<MeasurementSetting> canonical = canonical_settings(k);
      const double canonical_r = radius_at(state, canonical, direction, 1e-5, solver);
      if (canonical_r > tight) {
        tight = canonical_r;
        best_settings = std::move(canonical);
        report.best_restart = 0;
      }
    }
    report.R = tight;
  } catch (const SolverStall& stall) {
    throw SolverStall(std::string(stall.what()) + "; at settings " +
                          describe_settings(best_settings),
                      stall.residual, stall.iterations);
  }
  report.best_settings = std::move(best_settings);
  return report;
}

}  // namespace steerkit
