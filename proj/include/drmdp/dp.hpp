#pragma once

#include "drmdp/model.hpp"
#include "drmdp/reformulation.hpp"

#include <functional>
#include <string>
#include <vector>

namespace drmdp::dp {

struct DpOptions {
    int threads = 1;
    const lp::LpSolver* solver = nullptr; ///< null selects the bundled simplex
    std::string dump_lp_dir;              ///< write each final subproblem as MPS when set
    long max_iterations = 100000;
    bool validate = true;                 ///< run model validation before solving
};

struct DpSolution {
    numvec value;                  ///< per state
    std::vector<numvec> policy;    ///< per state; empty for terminal states
    std::vector<ref::WorstCaseCertificate> certificates;
    numvec saddle_residual;        ///< per state
    long iterations = 0;           ///< value-iteration sweeps
    double last_change = 0.0;      ///< sup-norm change of the last sweep
    double stationarity_residual = 0.0;
    double bellman_residual = 0.0; ///< ||L v - v|| at the returned v

    double initial_value(const DrMdpModel& m) const { return value.at(m.initial); }
    double max_saddle_residual() const;
};

/// Runs body(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

DpSolution backward_induction(const DrMdpModel& model, const DpOptions& opts = {});

/// One S-robust backup of every state. Fills `out` (policy and
/// certificates) when given.
numvec bellman_operator(const DrMdpModel& model, const numvec& v, const DpOptions& opts = {},
                        DpSolution* out = nullptr);

/// Stops once ||v^{n+1} - v^n|| <= eps (1 - gamma) / (2 gamma).
DpSolution value_iteration(const DrMdpModel& model, double eps, const numvec& v0 = {}, const DpOptions& opts = {});

/// Worst-case value of a fixed randomized policy.
numvec evaluate_policy_worst_case(const DrMdpModel& model, const std::vector<numvec>& policy,
                                  const DpOptions& opts = {}, double eps = 1e-9);

/// Continuation vector over a state's successor list.
numvec successor_values(const DrMdpModel& model, int s, const numvec& v);

} // namespace drmdp::dp
