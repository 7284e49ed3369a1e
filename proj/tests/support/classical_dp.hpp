#pragma once

#include "drmdp/model.hpp"

#include <vector>

namespace testsupport {

/// Plain MDP data per state: rewards per action and successor
/// probabilities laid out action-major.
struct FixedMdp {
    std::vector<drmdp::numvec> reward;
    std::vector<drmdp::numvec> transition;
};

/// Freezes every state's factor vector at `xi[s]`.
FixedMdp freeze(const drmdp::DrMdpModel& m, const std::vector<drmdp::numvec>& xi);

/// Optimal values over deterministic Markov policies by direct recursion
/// (finite horizon) or by iterating to `tol` (infinite horizon).
drmdp::numvec classical_optimum(const drmdp::DrMdpModel& m, const FixedMdp& mdp, double tol = 1e-12);

/// Value of a fixed randomized policy.
drmdp::numvec classical_policy_value(const drmdp::DrMdpModel& m, const FixedMdp& mdp,
                                     const std::vector<drmdp::numvec>& policy, double tol = 1e-12);

} // namespace testsupport
