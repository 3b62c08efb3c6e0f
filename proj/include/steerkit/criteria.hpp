#pragma once

#include <vector>

#include "steerkit/assemblage.hpp"

namespace steerkit {

/// Steerability classification of a family state at fixed setting count:
/// steerable both ways, steerable by Alice only, or not certified steerable.
enum class RegionLabel { TwoWay, OneWayAtoB, Unsteerable };

const char* to_string(RegionLabel label);

struct LinearIneqResult {
  int n = 0;
  double s = 0.0;         // quantum value S_n
  double c = 0.0;         // hidden-state bound C_n
  double violation = 0.0; // s - c; positive certifies steering
};

/// p above which the one-way window closes for k settings:
/// 1/sqrt(1 + (k-1) sin^2 2theta). Supported k: 2, 3.
double upper_threshold(int k, double theta);

/// p above which Alice-to-Bob steering is certified for k settings: 1/sqrt(k).
double lower_threshold(int k);

/// Two-setting classification: TwoWay above 1/sqrt(1+sin^2 2theta),
/// OneWayAtoB on (1/sqrt(2), that bound] for interior theta, else Unsteerable.
RegionLabel classify_two_settings(double p, double theta);

/// Three-setting analogue with bounds 1/sqrt(3) and 1/sqrt(1+2 sin^2 2theta).
RegionLabel classify_three_settings(double p, double theta);

/// All-projective-measurement guarantee that Bob cannot steer Alice:
/// cos^2(2theta) >= (2p-1) / ((2-p) p^3). p = 0 returns true by continuity.
bool unsteerable_b_to_a_infinite(double p, double theta);

/// Alice steers Bob under unrestricted projective measurements iff p > 1/2.
bool steerable_a_to_b_infinite(double p);

/// Reference measurement axes: orthogonal pair/triple for n = 2, 3 and
/// Platonic-solid axes (cube diagonals, icosahedron, dodecahedron vertex
/// axes) for n = 4, 6, 10. Throws ParamError for other n.
std::vector<MeasurementSetting> canonical_settings(int n);

/// Quantum value S_n = (1/n) sum_k |n_k . T n_k| with the sign of the
/// untrusted party's declared bit chosen to maximize each term. The
/// direction selects which party is steered; both parties measure n_k, so
/// the value is direction-symmetric for this witness.
double linear_s(const TwoQubitState& state,
                const std::vector<MeasurementSetting>& settings,
                Direction steered_to_trusted);

/// Hidden-state bound C_n = (1/n) max over sign vectors of |sum_k B_k n_k|,
/// by brute force over 2^n sign patterns. Throws CapError for n > 16.
double lhs_bound_c(const std::vector<MeasurementSetting>& settings);

LinearIneqResult evaluate_linear(const TwoQubitState& state,
                                 const std::vector<MeasurementSetting>& settings,
                                 Direction steered_to_trusted);

}  // namespace steerkit
