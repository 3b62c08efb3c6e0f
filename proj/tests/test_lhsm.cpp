#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "steerkit/criteria.hpp"
#include "steerkit/errors.hpp"
#include "steerkit/lhsm.hpp"
#include "steerkit/rng.hpp"
#include "steerkit/states.hpp"
#include "test_util.hpp"

using namespace steerkit;
using testutil::random_axis;
using testutil::random_density4;
using testutil::rotation_unitary;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt3 = 1.73205080756887729353;

Assemblage bell_assemblage(int k) {
  return build_assemblage(make_family_state(1.0, kPi / 4),
                          canonical_settings(k), Direction::AliceToBob);
}

/// Max-abs violation of the equality constraints by an ensemble.
double ensemble_residual(const HiddenStateEnsemble& ens, const Assemblage& a) {
  const int k = a.setting_count();
  double worst = std::abs(ens.weights.sum() - a.reduced.trace().real());
  Eigen::Vector3d total = Eigen::Vector3d::Zero();
  for (int i = 0; i < ens.size(); ++i) total += ens.vectors[i];
  worst = std::max(worst, (total - bloch_unnormalized(a.reduced)).lpNorm<Eigen::Infinity>());
  for (int j = 0; j < k; ++j) {
    double w = 0.0;
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (int i = 0; i < ens.size(); ++i) {
      if (((i >> j) & 1) == 0) {
        w += ens.weights[i];
        v += ens.vectors[i];
      }
    }
    worst = std::max(worst, std::abs(w - a.member(j, 0).probability()));
    worst = std::max(
        worst,
        (v - a.member(j, 0).bloch_unnormalized()).lpNorm<Eigen::Infinity>());
  }
  return worst;
}
}  // namespace

TEST_CASE("deterministic strategies enumerate all outcome assignments") {
  const auto all3 = enumerate_strategies(3);
  REQUIRE(all3.size() == 8);
  CHECK(all3[5].outcome(0) == 1);
  CHECK(all3[5].outcome(1) == 0);
  CHECK(all3[5].outcome(2) == 1);
  for (int i = 0; i < 8; ++i) CHECK(all3[i].index == i);
  CHECK(enumerate_strategies(1).size() == 2);
  CHECK(enumerate_strategies(16).size() == 65536);
  CHECK_THROWS_AS(enumerate_strategies(0), CapError);
  CHECK_THROWS_AS(enumerate_strategies(17), CapError);
}

TEST_CASE("Bell assemblage radii match the square and cube constructions") {
  LhsmSolver xyz(bell_assemblage(3));
  CHECK_FALSE(xyz.feasible_at(1.0).feasible());
  CHECK(xyz.feasible_at(kSqrt3 + 0.01).feasible());

  const RadiusResult r3 = xyz.min_max_radius();
  CHECK(r3.r == doctest::Approx(kSqrt3).epsilon(2e-3 / kSqrt3));
  CHECK(r3.hi - r3.lo <= 1e-5 + 1e-12);

  const RadiusResult r2 = LhsmSolver(bell_assemblage(2)).min_max_radius();
  CHECK(r2.r == doctest::Approx(kSqrt2).epsilon(2e-3 / kSqrt2));
}

TEST_CASE("feasibility is monotone in the radius bound") {
  LhsmSolver solver(bell_assemblage(3));
  for (double t : {1.2, 1.5}) CHECK_FALSE(solver.feasible_at(t).feasible());
  for (double t : {1.8, 2.5}) CHECK(solver.feasible_at(t).feasible());
}

TEST_CASE("radius witnesses are valid ensembles") {
  const Assemblage assemblage = bell_assemblage(3);
  const RadiusResult result = LhsmSolver(assemblage).min_max_radius();
  const HiddenStateEnsemble& ens = result.ensemble;
  REQUIRE(ens.size() == 8);
  CHECK(ens.weights.minCoeff() >= -1e-12);
  CHECK(ens.weights.sum() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ensemble_residual(ens, assemblage) <= 1e-6);
  CHECK(ens.max_radius() <= result.hi + 1e-6);
}

TEST_CASE("product states have the marginal Bloch norm as radius") {
  // p = 0: rho = I/2 (x) rho_B, so steering "radius" is just the marginal.
  const TwoQubitState product = make_family_state(0.0, kPi / 6);
  const auto settings = canonical_settings(2);

  const RadiusResult to_bob = min_max_radius(
      build_assemblage(product, settings, Direction::AliceToBob));
  CHECK(to_bob.r == doctest::Approx(0.5).epsilon(2e-3));  // cos(pi/3)

  const RadiusResult to_alice = min_max_radius(
      build_assemblage(product, settings, Direction::BobToAlice));
  CHECK(to_alice.r <= 1e-5);

  CHECK(has_lhsm(build_assemblage(product, settings, Direction::AliceToBob)));
}

TEST_CASE("maximally mixed assemblage collapses to radius zero") {
  Matrix4c mixed = Matrix4c::Identity() / 4.0;
  const Assemblage assemblage = build_assemblage(
      TwoQubitState{mixed}, canonical_settings(3), Direction::AliceToBob);
  const RadiusResult result = min_max_radius(assemblage);
  CHECK(result.r == 0.0);
  CHECK(result.bisection_steps == 0);
}

TEST_CASE("one-way family points at canonical triples") {
  // Inside the three-setting one-way window Bob cannot steer Alice at all,
  // so the canonical-axes radius stays below one; above the window it must
  // cross it.
  const auto xyz = canonical_settings(3);
  const TwoQubitState inside = make_family_state(0.6, kPi / 12);
  const double r_ba =
      min_max_radius(build_assemblage(inside, xyz, Direction::BobToAlice)).r;
  CHECK(r_ba <= 1.0 + 1e-3);

  const TwoQubitState above = make_family_state(0.9, kPi / 12);
  const double r_above =
      min_max_radius(build_assemblage(above, xyz, Direction::BobToAlice)).r;
  CHECK(r_above > 1.0 + 1e-3);
}

TEST_CASE("boundary family states sit at radius one") {
  for (double theta : {kPi / 12, kPi / 6}) {
    const double s = std::sin(2 * theta);
    const double p3 = 1.0 / std::sqrt(1.0 + 2.0 * s * s);
    const Assemblage a3 =
        build_assemblage(make_family_state(p3, theta), canonical_settings(3),
                         Direction::BobToAlice);
    CHECK(min_max_radius(a3).r == doctest::Approx(1.0).epsilon(2e-3));

    const double p2 = 1.0 / std::sqrt(1.0 + s * s);
    const Assemblage a2 =
        build_assemblage(make_family_state(p2, theta), canonical_settings(2),
                         Direction::BobToAlice);
    CHECK(min_max_radius(a2).r == doctest::Approx(1.0).epsilon(2e-3));
  }
}

TEST_CASE("radius is invariant under steered-side rotations") {
  CounterRng rng(23);
  const auto settings = canonical_settings(2);
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix4c rho = random_density4(rng);
    const Matrix2c u = rotation_unitary(random_axis(rng), 1.1 + trial);
    const Matrix4c rotated = kron(Matrix2c::Identity(), u) * rho *
                             kron(Matrix2c::Identity(), u).adjoint();
    const double base = min_max_radius(
        build_assemblage(TwoQubitState{rho}, settings, Direction::AliceToBob),
        1e-4).r;
    const double moved = min_max_radius(
        build_assemblage(TwoQubitState{rotated}, settings,
                         Direction::AliceToBob),
        1e-4).r;
    CHECK(std::abs(base - moved) <= 2e-4);
  }
}

TEST_CASE("solver agrees with the reference search on random states") {
  CounterRng rng(31);
  const auto settings = canonical_settings(2);
  for (int trial = 0; trial < 5; ++trial) {
    const TwoQubitState rho{random_density4(rng)};
    const Assemblage assemblage =
        build_assemblage(rho, settings, Direction::AliceToBob);
    const double solver_r = min_max_radius(assemblage).r;
    const double oracle_r =
        oracle::min_max_radius_bruteforce(assemblage, 100 + trial);
    CHECK(std::abs(solver_r - oracle_r) <= 5e-3);
  }
}

TEST_CASE("retarget keeps factorization and rejects mismatched counts") {
  LhsmSolver solver(bell_assemblage(2));
  const TwoQubitState other = make_family_state(0.5, kPi / 8);
  const Assemblage a2 =
      build_assemblage(other, canonical_settings(2), Direction::AliceToBob);
  solver.retarget(a2);
  const double direct = min_max_radius(a2).r;
  CHECK(solver.min_max_radius().r == doctest::Approx(direct).epsilon(1e-4));

  const Assemblage a3 =
      build_assemblage(other, canonical_settings(3), Direction::AliceToBob);
  CHECK_THROWS_AS(solver.retarget(a3), ParamError);
}

TEST_CASE("argument validation") {
  const Assemblage assemblage = bell_assemblage(2);
  LhsmSolver solver(assemblage);
  CHECK_THROWS_AS(solver.min_max_radius(1e-9), ParamError);
  CHECK_THROWS_AS(solver.min_max_radius(0.5), ParamError);

  // 17 settings exceeds the strategy-enumeration cap.
  CounterRng rng(41);
  std::vector<MeasurementSetting> many;
  while (many.size() < 17) {
    const Eigen::Vector3d axis = random_axis(rng);
    bool clash = false;
    for (const auto& s : many) {
      if (std::abs(s.axis.dot(axis)) > 0.999) clash = true;
    }
    if (!clash) many.emplace_back(axis);
  }
  const Assemblage big = build_assemblage(make_werner(0.5), many,
                                          Direction::AliceToBob);
  CHECK_THROWS_AS(LhsmSolver{big}, CapError);
}

TEST_CASE("signalling assemblages are rejected") {
  Assemblage assemblage = bell_assemblage(2);
  assemblage.members[0].matrix += 0.05 * Matrix2c::Identity();
  CHECK_THROWS_AS(LhsmSolver{assemblage}, ValidationError);
}
