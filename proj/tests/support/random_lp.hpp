#pragma once

#include "drmdp/lp.hpp"
#include "drmdp/polyhedral.hpp"

#include <random>

namespace testsupport {

/// Feasible bounded LP with at most `max_vars` variables together with the
/// same feasible region as a polyhedral set (bounds become rows).
struct RandomLp {
    drmdp::lp::LinearProgram program;
    drmdp::geom::PolyhedralSet region;
    drmdp::numvec cost;
};

RandomLp random_bounded_lp(std::mt19937_64& rng, int max_vars);

/// Optimum by brute-force vertex enumeration.
double vertex_optimum(const RandomLp& lp);

} // namespace testsupport
