#include <doctest.h>

#include <cmath>

#include "steerkit/criteria.hpp"
#include "steerkit/errors.hpp"
#include "steerkit/states.hpp"

using namespace steerkit;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt3 = 0.57735026918962576451;
}  // namespace

TEST_CASE("two-setting region classification") {
  CHECK(classify_two_settings(0.8, kPi / 12) == RegionLabel::OneWayAtoB);
  CHECK(classify_two_settings(0.95, kPi / 12) == RegionLabel::TwoWay);
  CHECK(classify_two_settings(0.5, 0.1) == RegionLabel::Unsteerable);
  CHECK(classify_two_settings(0.5, 0.7) == RegionLabel::Unsteerable);

  // At theta = pi/4 the window is empty: both bounds are 1/sqrt(2).
  for (double p : {0.0, 0.3, 0.70, 0.7072, 0.9, 1.0}) {
    CHECK(classify_two_settings(p, kPi / 4) != RegionLabel::OneWayAtoB);
  }
  // theta = 0 is excluded from the window (separable line).
  CHECK(classify_two_settings(0.8, 0.0) == RegionLabel::Unsteerable);
}

TEST_CASE("three-setting region classification") {
  CHECK(classify_three_settings(0.6, kPi / 12) == RegionLabel::OneWayAtoB);
  CHECK(classify_three_settings(0.55, kPi / 12) == RegionLabel::Unsteerable);
  CHECK(classify_three_settings(0.9, kPi / 12) == RegionLabel::TwoWay);
  CHECK(classify_three_settings(1.0, kPi / 4) == RegionLabel::TwoWay);
}

TEST_CASE("thresholds") {
  CHECK(upper_threshold(2, kPi / 4) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(upper_threshold(3, kPi / 4) == doctest::Approx(kInvSqrt3).epsilon(1e-15));
  CHECK(lower_threshold(2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(lower_threshold(3) == doctest::Approx(kInvSqrt3).epsilon(1e-15));
  CHECK(upper_threshold(2, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(upper_threshold(4, 0.1), ParamError);
  CHECK_THROWS_AS(lower_threshold(1), ParamError);
  CHECK_THROWS_AS(classify_two_settings(1.2, 0.1), ParamError);
  CHECK_THROWS_AS(classify_two_settings(0.5, 1.0), ParamError);
}

TEST_CASE("two-setting one-way points stay one-way or better at three") {
  for (double p = 0.0; p <= 1.0; p += 0.02) {
    for (double theta = 0.0; theta <= kPi / 4 + 1e-12; theta += kPi / 40) {
      if (classify_two_settings(p, theta) == RegionLabel::OneWayAtoB) {
        CHECK(classify_three_settings(p, theta) != RegionLabel::Unsteerable);
      }
    }
  }
}

TEST_CASE("infinite-setting criteria") {
  CHECK(steerable_a_to_b_infinite(0.51));
  CHECK_FALSE(steerable_a_to_b_infinite(0.5));
  CHECK(steerable_a_to_b_infinite(1.0));

  CHECK(unsteerable_b_to_a_infinite(0.5, 0.3));  // rhs vanishes at p = 1/2
  CHECK(unsteerable_b_to_a_infinite(0.6, 0.0));
  CHECK_FALSE(unsteerable_b_to_a_infinite(0.6, kPi / 4));
  CHECK(unsteerable_b_to_a_infinite(0.0, 0.2));
  CHECK_FALSE(unsteerable_b_to_a_infinite(1.0, kPi / 4));
  CHECK_THROWS_AS(unsteerable_b_to_a_infinite(-0.1, 0.2), ParamError);
}

TEST_CASE("canonical settings geometry") {
  for (int n : {2, 3, 4, 6, 10}) {
    const auto settings = canonical_settings(n);
    REQUIRE(static_cast<int>(settings.size()) == n);
    for (int i = 0; i < n; ++i) {
      CHECK(settings[i].axis.norm() == doctest::Approx(1.0).epsilon(1e-14));
      for (int j = i + 1; j < n; ++j) {
        CHECK(std::abs(settings[i].axis.dot(settings[j].axis)) < 1.0 - 1e-6);
      }
    }
  }
  // Orthogonal pair/triple for n = 2, 3.
  for (int n : {2, 3}) {
    const auto s = canonical_settings(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        CHECK(std::abs(s[i].axis.dot(s[j].axis)) < 1e-14);
  }
  // Platonic axis sets have a fixed overlap spectrum.
  for (const auto& s : canonical_settings(4)) {
    for (const auto& t : canonical_settings(4)) {
      const double d = std::abs(s.axis.dot(t.axis));
      CHECK((std::abs(d - 1.0) < 1e-12 || std::abs(d - 1.0 / 3.0) < 1e-12));
    }
  }
  for (const auto& s : canonical_settings(6)) {
    for (const auto& t : canonical_settings(6)) {
      const double d = std::abs(s.axis.dot(t.axis));
      CHECK((std::abs(d - 1.0) < 1e-12 ||
             std::abs(d - 1.0 / std::sqrt(5.0)) < 1e-12));
    }
  }
  CHECK_THROWS_AS(canonical_settings(5), ParamError);
  CHECK_THROWS_AS(canonical_settings(0), ParamError);
}

TEST_CASE("hidden-state bounds at canonical settings") {
  CHECK(lhs_bound_c(canonical_settings(2)) ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
  CHECK(lhs_bound_c(canonical_settings(3)) ==
        doctest::Approx(kInvSqrt3).epsilon(1e-14));
  CHECK(lhs_bound_c(canonical_settings(4)) ==
        doctest::Approx(kInvSqrt3).epsilon(1e-12));
  CHECK(lhs_bound_c({MeasurementSetting(Eigen::Vector3d::UnitZ())}) ==
        doctest::Approx(1.0).epsilon(1e-15));

  std::vector<MeasurementSetting> many(
      17, MeasurementSetting(Eigen::Vector3d::UnitZ()));
  CHECK_THROWS_AS(lhs_bound_c(many), CapError);
  CHECK_THROWS_AS(lhs_bound_c({}), ParamError);
}

TEST_CASE("linear witness values for the family") {
  const auto xyz = canonical_settings(3);
  // Bell state: T = diag(1,-1,1), so S_3 = 1 and the violation is 1 - C_3.
  const LinearIneqResult bell =
      evaluate_linear(make_family_state(1.0, kPi / 4), xyz,
                      Direction::AliceToBob);
  CHECK(bell.s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bell.violation == doctest::Approx(1.0 - kInvSqrt3).epsilon(1e-12));

  // General family member: S_3 = p (1 + 2 sin 2theta) / 3.
  for (double p : {0.2, 0.6, 1.0}) {
    for (double theta : {0.1, kPi / 12, kPi / 4}) {
      const double expect = p * (1.0 + 2.0 * std::sin(2 * theta)) / 3.0;
      for (Direction dir : {Direction::AliceToBob, Direction::BobToAlice}) {
        CHECK(linear_s(make_family_state(p, theta), xyz, dir) ==
              doctest::Approx(expect).epsilon(1e-13));
      }
    }
  }

  // S grows with p at fixed settings.
  CHECK(linear_s(make_family_state(0.3, 0.3), xyz, Direction::AliceToBob) <
        linear_s(make_family_state(0.7, 0.3), xyz, Direction::AliceToBob));

  // Vanishing correlation matrix gives S = 0.
  Matrix4c mixed = Matrix4c::Identity() / 4.0;
  CHECK(linear_s(TwoQubitState{mixed}, xyz, Direction::AliceToBob) ==
        doctest::Approx(0.0));

  CHECK_THROWS_AS(linear_s(make_werner(0.5), {}, Direction::AliceToBob),
                  ParamError);
}
