#pragma once

#include <filesystem>
#include <optional>

#include "steerkit/qubit.hpp"

namespace steerkit {

/// Parameters of the built-in state family
///   rho(p, theta) = p |psi(theta)><psi(theta)| + (1-p) I_A/2 (x) rho_B^theta,
/// |psi(theta)> = cos(theta)|HH> + sin(theta)|VV>,
/// rho_B^theta  = Tr_A |psi(theta)><psi(theta)|.
struct FamilyParams {
  double p;
  double theta;

  FamilyParams(double p, double theta);  // throws ParamError on bounds
};

TwoQubitState make_family_state(const FamilyParams& params);
inline TwoQubitState make_family_state(double p, double theta) {
  return make_family_state(FamilyParams(p, theta));
}

/// Maximally entangled state mixed with white noise:
/// p |Phi+><Phi+| + (1-p) I/4. Equals make_family_state(p, pi/4).
TwoQubitState make_werner(double p);

/// JSON state file:
///   { "dim": [4,4], "matrix": [[[re,im] x4] x4], "meta": {"p":..,"theta":..} }
/// row-major, Alice-first tensor ordering; "meta" is optional.
void save_state(const TwoQubitState& state, const std::filesystem::path& path,
                const std::optional<FamilyParams>& meta = std::nullopt);

/// Throws ParseError on malformed input (with field context) and
/// ValidationError when the matrix is not a density operator.
TwoQubitState load_state(const std::filesystem::path& path);

}  // namespace steerkit
