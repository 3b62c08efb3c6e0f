#include "steerkit/lhsm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "steerkit/errors.hpp"

namespace steerkit {

std::vector<DeterministicStrategy> enumerate_strategies(int k) {
  if (k < 1 || k > 16)
    throw CapError("strategy enumeration supports 1..16 settings, got " +
                   std::to_string(k));
  std::vector<DeterministicStrategy> out(std::size_t{1} << k);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<int>(i);
  return out;
}

LhsmSolver::LhsmSolver(const Assemblage& assemblage, SolverOptions opts)
    : k_(assemblage.setting_count()), opts_(opts) {
  if (k_ < 1 || k_ > 16)
    throw CapError("hidden-state solver supports 1..16 settings, got " +
                   std::to_string(k_));
  strategies_ = 1 << k_;

  // Row Gram of the strategy-incidence system; identical for the weight row
  // and each Bloch component. Entries count strategies shared by two groups:
  // all 2^k in the total row, half answer 0 on one setting, a quarter on two.
  Eigen::MatrixXd gram(k_ + 1, k_ + 1);
  const double n = static_cast<double>(strategies_);
  gram(0, 0) = n;
  for (int j = 0; j < k_; ++j) {
    gram(0, j + 1) = gram(j + 1, 0) = n / 2.0;
    for (int l = 0; l < k_; ++l)
      gram(j + 1, l + 1) = (j == l) ? n / 2.0 : n / 4.0;
  }
  gram_.compute(gram);

  scratch_rows_.resize(4 * (k_ + 1));
  scratch_corr_.resize(4 * strategies_);
  scratch_group_.resize(k_ + 1);
  scratch_sol_.resize(k_ + 1);

  retarget(assemblage);
}

void LhsmSolver::retarget(const Assemblage& assemblage) {
  if (assemblage.setting_count() != k_)
    throw ParamError("retarget requires the original setting count (" +
                     std::to_string(k_) + "), got " +
                     std::to_string(assemblage.setting_count()));

  // Members of each setting must sum to the reduced state; otherwise the
  // equality system below is contradictory and every radius looks infeasible.
  for (int j = 0; j < k_; ++j) {
    const Matrix2c gap = assemblage.member(j, 0).matrix +
                         assemblage.member(j, 1).matrix - assemblage.reduced;
    if (gap.cwiseAbs().maxCoeff() > 1e-6)
      throw ValidationError("assemblage is signalling: members of setting " +
                            std::to_string(j) +
                            " do not sum to the reduced state");
  }

  // Equality rows, four per group: [weight, Bloch x, y, z] for the total
  // ensemble and for the outcome-0 slice of each setting. Outcome-1 rows are
  // implied by the totals and omitted.
  target_.resize(4 * (k_ + 1));
  target_[0] = assemblage.reduced.trace().real();
  target_.segment<3>(1) = bloch_unnormalized(assemblage.reduced);
  for (int j = 0; j < k_; ++j) {
    const ConditionalState& member = assemblage.member(j, 0);
    target_[4 * (j + 1)] = member.probability();
    target_.segment<3>(4 * (j + 1) + 1) = member.bloch_unnormalized();
  }

  // Any hidden-state model needs radii at least as large as the conditional
  // Bloch lengths; scaling the longest by the smallest outcome probability
  // (plus slack) gives a bracket that is feasible in practice. The bisection
  // doubles it defensively if not.
  double max_norm = 0.0, min_prob = 1.0;
  for (int j = 0; j < k_; ++j) {
    for (int a = 0; a < 2; ++a) {
      const ConditionalState& member = assemblage.member(j, a);
      const double prob = member.probability();
      if (prob <= 1e-9) continue;
      min_prob = std::min(min_prob, prob);
      max_norm = std::max(max_norm, member.bloch_unnormalized().norm() / prob);
    }
  }
  upper_bound_ = std::max(1.0, max_norm / std::max(min_prob, 1e-6)) + 1.0;
}

void LhsmSolver::apply_constraints(const Eigen::VectorXd& x,
                                   Eigen::VectorXd& out) const {
  out.setZero(4 * (k_ + 1));
  double* total = out.data();
  for (int i = 0; i < strategies_; ++i) {
    const double* xi = x.data() + 4 * i;
    total[0] += xi[0];
    total[1] += xi[1];
    total[2] += xi[2];
    total[3] += xi[3];
    for (int j = 0; j < k_; ++j) {
      if ((i >> j) & 1) continue;
      double* row = out.data() + 4 * (j + 1);
      row[0] += xi[0];
      row[1] += xi[1];
      row[2] += xi[2];
      row[3] += xi[3];
    }
  }
}

void LhsmSolver::apply_constraints_adjoint(const Eigen::VectorXd& u,
                                           Eigen::VectorXd& out) const {
  const double* total = u.data();
  for (int i = 0; i < strategies_; ++i) {
    double acc[4] = {total[0], total[1], total[2], total[3]};
    for (int j = 0; j < k_; ++j) {
      if ((i >> j) & 1) continue;
      const double* row = u.data() + 4 * (j + 1);
      acc[0] += row[0];
      acc[1] += row[1];
      acc[2] += row[2];
      acc[3] += row[3];
    }
    double* xi = out.data() + 4 * i;
    xi[0] = acc[0];
    xi[1] = acc[1];
    xi[2] = acc[2];
    xi[3] = acc[3];
  }
}

void LhsmSolver::project_affine(Eigen::VectorXd& x) {
  apply_constraints(x, scratch_rows_);
  scratch_rows_ -= target_;
  // The row Gram factorizes as gram ⊗ I4, so solve per component.
  for (int c = 0; c < 4; ++c) {
    for (int g = 0; g <= k_; ++g) scratch_group_[g] = scratch_rows_[4 * g + c];
    scratch_sol_ = gram_.solve(scratch_group_);
    for (int g = 0; g <= k_; ++g) scratch_rows_[4 * g + c] = scratch_sol_[g];
  }
  apply_constraints_adjoint(scratch_rows_, scratch_corr_);
  x -= scratch_corr_;
}

void LhsmSolver::project_cones(Eigen::VectorXd& x, double t) const {
  for (int i = 0; i < strategies_; ++i) {
    double* xi = x.data() + 4 * i;
    Eigen::Map<Eigen::Vector3d> w(xi + 1);
    const double s = xi[0];
    if (t <= 0.0) {  // degenerate cone: nonnegative weight, zero vector
      xi[0] = std::max(s, 0.0);
      w.setZero();
      continue;
    }
    const double nw = w.norm();
    if (nw <= t * s) continue;  // inside (implies s >= 0)
    if (t * nw <= -s) {         // within the polar cone: nearest point is 0
      xi[0] = 0.0;
      w.setZero();
      continue;
    }
    const double lambda = (s + t * nw) / (1.0 + t * t);
    xi[0] = lambda;
    w *= lambda * t / nw;
  }
}

double LhsmSolver::residual_at(const Eigen::VectorXd& x, double* two_norm_sq) {
  apply_constraints(x, scratch_rows_);
  scratch_rows_ -= target_;
  if (two_norm_sq) *two_norm_sq = scratch_rows_.squaredNorm();
  return scratch_rows_.cwiseAbs().maxCoeff();
}

HiddenStateEnsemble LhsmSolver::extract_ensemble(const Eigen::VectorXd& x) const {
  HiddenStateEnsemble ensemble;
  ensemble.weights.resize(strategies_);
  ensemble.vectors.resize(strategies_);
  double sum = 0.0;
  for (int i = 0; i < strategies_; ++i) {
    ensemble.weights[i] = std::max(x[4 * i], 0.0);
    ensemble.vectors[i] = x.segment<3>(4 * i + 1);
    sum += ensemble.weights[i];
  }
  if (sum > 1e-9) {
    ensemble.weights /= sum;
    for (auto& v : ensemble.vectors) v /= sum;
  }
  return ensemble;
}

FeasibilityResult LhsmSolver::feasible_at(double t) {
  if (!std::isfinite(t) || t < 0.0)
    throw ParamError("candidate radius must be finite and nonnegative");

  const int n = 4 * strategies_;
  Eigen::VectorXd x;
  if (has_warm_ && warm_.size() == n) {
    x = warm_;
  } else {
    x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < strategies_; ++i) x[4 * i] = 1.0 / strategies_;
  }
  project_cones(x, t);

  Eigen::VectorXd y = x;
  Eigen::VectorXd prev = x;
  Eigen::VectorXd best_x = x;
  double best = residual_at(x, nullptr);
  double prev_obj = std::numeric_limits<double>::infinity();
  double theta = 1.0;
  const double infeasible_bar = opts_.infeasible_margin * opts_.feas_tol;

  std::vector<double> best_trace;
  best_trace.reserve(2048);

  for (int it = 1; it <= opts_.max_iterations; ++it) {
    Eigen::VectorXd z = y;
    project_affine(z);
    project_cones(z, t);

    double obj = 0.0;
    const double res = residual_at(z, &obj);
    if (res < best) {
      best = res;
      best_x = z;
    }
    best_trace.push_back(best);

    if (res <= opts_.feas_tol) {
      warm_ = z;
      has_warm_ = true;
      return {FeasibilityStatus::Feasible, res, it, extract_ensemble(z)};
    }

    // Nesterov momentum with restart on objective increase.
    if (obj > prev_obj) {
      theta = 1.0;
      y = z;
    } else {
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      y = z + ((theta - 1.0) / theta_next) * (z - prev);
      theta = theta_next;
    }
    prev = std::move(z);
    prev_obj = obj;

    // Stagnation (under one percent improvement across the trailing window)
    // means the residual has settled on its floor, which is near zero exactly
    // when the problem is feasible; the margin decides which side we are on.
    if (it >= 600) {
      const int window = std::max(200, it / 5);
      const double then = best_trace[static_cast<std::size_t>(it - window)];
      if (then - best <= 0.01 * then) {
        warm_ = best_x;
        has_warm_ = true;
        const FeasibilityStatus status = best <= infeasible_bar
                                             ? FeasibilityStatus::Feasible
                                             : FeasibilityStatus::Infeasible;
        return {status, best, it, extract_ensemble(best_x)};
      }
    }
  }

  warm_ = best_x;
  has_warm_ = true;
  if (best > infeasible_bar)
    return {FeasibilityStatus::Infeasible, best, opts_.max_iterations,
            extract_ensemble(best_x)};
  throw SolverStall("feasibility undecided at radius " + std::to_string(t) +
                        ": residual " + std::to_string(best) +
                        " after iteration cap",
                    best, opts_.max_iterations);
}

RadiusResult LhsmSolver::min_max_radius(double tol, double lo_hint) {
  if (!std::isfinite(tol) || tol < 1e-8 || tol > 1e-2)
    throw ParamError("radius tolerance must lie in [1e-8, 1e-2]");

  RadiusResult out;
  long long inner = 0;
  double lo = 0.0;

  if (lo_hint >= 0.0) {
    lo = lo_hint;
  } else {
    FeasibilityResult at_zero = feasible_at(0.0);
    inner += at_zero.iterations;
    if (at_zero.feasible()) {
      out.ensemble = std::move(at_zero.ensemble);
      out.inner_iterations = inner;
      return out;
    }
  }

  double hi = std::max(upper_bound_, lo + 1.0);
  FeasibilityResult at_hi = feasible_at(hi);
  inner += at_hi.iterations;
  int growths = 0;
  while (!at_hi.feasible()) {
    if (++growths > 8)
      throw SolverStall("no feasible hidden-state radius found up to " +
                            std::to_string(hi),
                        at_hi.residual, static_cast<int>(inner));
    hi *= 2.0;
    at_hi = feasible_at(hi);
    inner += at_hi.iterations;
  }

  FeasibilityResult witness = std::move(at_hi);
  int steps = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    FeasibilityResult at_mid = feasible_at(mid);
    inner += at_mid.iterations;
    ++steps;
    if (at_mid.feasible()) {
      hi = mid;
      witness = std::move(at_mid);
    } else {
      lo = mid;
    }
  }

  out.r = 0.5 * (lo + hi);
  out.lo = lo;
  out.hi = hi;
  out.ensemble = std::move(witness.ensemble);
  out.bisection_steps = steps;
  out.inner_iterations = inner;
  return out;
}

FeasibilityResult feasible_at(double t, const Assemblage& assemblage,
                              const SolverOptions& opts) {
  LhsmSolver solver(assemblage, opts);
  return solver.feasible_at(t);
}

RadiusResult min_max_radius(const Assemblage& assemblage, double tol,
                            const SolverOptions& opts) {
  LhsmSolver solver(assemblage, opts);
  return solver.min_max_radius(tol);
}

bool has_lhsm(const Assemblage& assemblage, double tol) {
  return min_max_radius(assemblage, tol).r <= 1.0 + tol;
}

}  // namespace steerkit
