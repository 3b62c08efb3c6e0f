#pragma once

#include <cstdint>

#include "steerkit/assemblage.hpp"

namespace steerkit::oracle {

/// Reference min-max LHS radius for assemblages with exactly two settings.
///
/// For two binary measurements the set of ensembles reproducing a given
/// no-signalling assemblage is a four-parameter affine family, so this
/// routine parametrizes that family directly (every candidate is exactly
/// feasible) and minimizes the worst hidden-state radius with a grid-seeded
/// Nelder-Mead search. Slow but independent of the projection solver.
///
/// Throws ParamError unless the assemblage has two settings.
double min_max_radius_bruteforce(const Assemblage& assemblage,
                                 std::uint64_t seed = 0);

}  // namespace steerkit::oracle
