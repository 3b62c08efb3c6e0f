#pragma once

#include <vector>

#include "steerkit/assemblage.hpp"

namespace steerkit {

/// One definite outcome per setting; bit j of index = outcome for setting j.
struct DeterministicStrategy {
  int index = 0;
  int outcome(int setting) const { return (index >> setting) & 1; }
};

/// All 2^k deterministic response strategies, sorted by index.
/// Throws CapError outside 1 <= k <= 16.
std::vector<DeterministicStrategy> enumerate_strategies(int k);

/// Hidden-state ensemble in weighted form: member i carries weight p_i and
/// weighted Bloch vector v_i = p_i * R_i. Weights are nonnegative and sum
/// to one; zero-weight members have (numerically) zero vectors.
struct HiddenStateEnsemble {
  Eigen::VectorXd weights;
  std::vector<Eigen::Vector3d> vectors;

  int size() const { return static_cast<int>(weights.size()); }

  /// |R_i| = |v_i| / p_i, with an epsilon floor for display of dead members.
  double radius(int i) const {
    return vectors[i].norm() / std::max(weights[i], 1e-12);
  }
  double max_radius() const {
    double r = 0.0;
    for (int i = 0; i < size(); ++i) r = std::max(r, radius(i));
    return r;
  }
};

enum class FeasibilityStatus { Feasible, Infeasible };

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::Infeasible;
  double residual = 0.0;  // best max-abs equality residual seen at a cone point
  int iterations = 0;
  HiddenStateEnsemble ensemble;  // witness when feasible, best attempt otherwise

  bool feasible() const { return status == FeasibilityStatus::Feasible; }
};

struct SolverOptions {
  double feas_tol = 1e-7;
  int max_iterations = 50000;
  /// Once progress stalls, a residual floor at or below
  /// infeasible_margin * feas_tol counts as feasible and anything larger as
  /// infeasible; hitting the iteration cap while still in between (and still
  /// improving) is a SolverStall.
  double infeasible_margin = 10.0;
};

struct RadiusResult {
  double r = 0.0;
  HiddenStateEnsemble ensemble;  // witness at the feasible bracket end
  double lo = 0.0, hi = 0.0;     // infeasible(lo) and feasible(hi), hi - lo <= tol
  int bisection_steps = 0;
  long long inner_iterations = 0;
};

/// Decides existence of local-hidden-state decompositions for one assemblage.
///
/// The candidate-radius-t subproblem is a convex feasibility problem: find
/// per-strategy weights p_i and weighted Bloch vectors v_i satisfying the
/// assemblage's trace and Bloch equalities with |v_i| <= t * p_i. It is
/// solved by accelerated alternating projections between the affine equality
/// subspace (precomputed least-squares projector) and the product of
/// second-order cones. min_max_radius bisects on t; monotonicity of
/// feasibility in t makes the bisection exact up to the solver tolerance.
///
/// Instances hold scratch buffers and a warm-start point; use one instance
/// per thread.
class LhsmSolver {
 public:
  explicit LhsmSolver(const Assemblage& assemblage, SolverOptions opts = {});

  /// Throws SolverStall if the iteration cap is hit without a verdict.
  FeasibilityResult feasible_at(double t);

  /// Smallest t (within tol) admitting a hidden-state decomposition.
  /// lo_hint, when >= 0, must be a known-infeasible starting bracket.
  RadiusResult min_max_radius(double tol = 1e-5, double lo_hint = -1.0);

  /// Re-point the solver at another assemblage with the same setting count,
  /// keeping the factorization and warm-start point. Useful when scanning
  /// nearby measurement settings. Throws ParamError on a count mismatch.
  void retarget(const Assemblage& assemblage);

  int setting_count() const { return k_; }

 private:
  void apply_constraints(const Eigen::VectorXd& x, Eigen::VectorXd& out) const;
  void apply_constraints_adjoint(const Eigen::VectorXd& u, Eigen::VectorXd& out) const;
  void project_affine(Eigen::VectorXd& x);
  void project_cones(Eigen::VectorXd& x, double t) const;
  double residual_at(const Eigen::VectorXd& x, double* two_norm_sq);
  HiddenStateEnsemble extract_ensemble(const Eigen::VectorXd& x) const;

  int k_ = 0;
  int strategies_ = 0;
  Eigen::VectorXd target_;              // equality right-hand side
  Eigen::LLT<Eigen::MatrixXd> gram_;    // Cholesky of the (k+1)x(k+1) row Gram
  SolverOptions opts_;
  double upper_bound_ = 0.0;

  Eigen::VectorXd warm_;
  bool has_warm_ = false;
  Eigen::VectorXd scratch_rows_, scratch_corr_, scratch_group_, scratch_sol_;
};

FeasibilityResult feasible_at(double t, const Assemblage& assemblage,
                              const SolverOptions& opts = {});

/// Inner min-max: smallest achievable maximum hidden-state Bloch radius.
/// tol must lie in [1e-8, 1e-2].
RadiusResult min_max_radius(const Assemblage& assemblage, double tol = 1e-5,
                            const SolverOptions& opts = {});

/// True iff a local-hidden-state model exists: min_max_radius(...).r <= 1 + tol.
bool has_lhsm(const Assemblage& assemblage, double tol = 1e-5);

}  // namespace steerkit
