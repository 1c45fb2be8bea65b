#pragma once

#include <string>
#include <vector>

#include "idfunc/distribution.hpp"
#include "idfunc/functional.hpp"
#include "idfunc/identification.hpp"

namespace idfunc {

/// Distributions on which a catalog moment function is a strict
/// identification function: continuous strictly-increasing families for
/// quantile-type entries, finite-moment families otherwise. At least
/// `minimum` entries.
std::vector<AnyDistribution> supported_battery(const std::string& catalog_key, int minimum = 20);

/// supported_battery plus the documented stress cases (atom at the
/// quantile level, flat CDF) that a verification run must flag rather
/// than pass.
std::vector<AnyDistribution> stress_battery(const std::string& catalog_key);

/// A battery of output_dim()+1 distributions passing check_v1 at x,
/// found by deterministic search over a pool of normal laws around x.
/// The first k entries are used for the recovery solve, the last as
/// the held-out certificate.
std::vector<AnyDistribution> v1_battery(const IdentificationFunction& v, const Vec& x);

/// Evaluation grid around the functional values of `f`: per-coordinate
/// offsets from the target box, clipped to the interior of the domain.
std::vector<Vec> default_x_grid(const IdentificationFunction& v, const FunctionalSpec& t,
                                const AnyDistribution& f);

}  // namespace idfunc
