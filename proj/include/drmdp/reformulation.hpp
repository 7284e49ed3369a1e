#pragma once

#include "drmdp/ambiguity.hpp"
#include "drmdp/lp.hpp"

#include <Eigen/Dense>

#include <vector>

namespace drmdp::ref {

/// Stage objective r'pi + f * p'(V pi) written in the factor vector as
/// kappa(pi) + c(pi)'xi, with kappa(pi) = kappa'pi and c(pi) = C pi.
struct StageObjective {
    numvec v_next;        ///< continuation values over the successor list
    double continuation = 1.0;
    Eigen::MatrixXd block; ///< |A||S'| x |A|, one copy of v_next per action
    Eigen::VectorXd kappa; ///< per action
    Eigen::MatrixXd C;     ///< factor_dim x |A|

    int actions() const { return static_cast<int>(kappa.size()); }
    int factor_dim() const { return static_cast<int>(C.rows()); }
    double kappa_of(const numvec& pi) const;
    numvec c_of(const numvec& pi) const;
    double evaluate(const numvec& pi, const numvec& xi) const;
};

StageObjective assemble_stage_objective(const numvec& v_next, const amb::FactorMap& fm, double continuation = 1.0);

/// Weights and conditional means of a worst-case distribution.
struct WorstCaseCertificate {
    numvec weights;
    std::vector<numvec> means; ///< per scenario, a point of D_n
    numvec mean;               ///< overall mean sum_n w_n * means[n]
    /// |sum_n w_n (kappa + c'means[n]) - value|
    double residual = 0.0;
};

struct WorstCase {
    double value = 0.0;
    WorstCaseCertificate certificate;
};

struct SRobustSolution {
    numvec policy;
    double value = 0.0;
    double delta = 0.0;
    numvec alpha;
    std::vector<numvec> beta;  ///< per group, empty unless the group pins the mean
    std::vector<numvec> gamma; ///< per group
    WorstCaseCertificate certificate;
    /// |max_a (kappa_a + C_a'mean) - value|
    double saddle_residual = 0.0;
    lp::Certificates lp_certificates;
    long iterations = 0;
};

/// Variable and row indices of a compiled subproblem.
struct CompiledLp {
    lp::LinearProgram program{lp::Objective::Maximize};
    std::vector<int> pi;
    int delta = -1;
    std::vector<int> alpha;
    std::vector<std::vector<int>> beta;
    std::vector<std::vector<int>> gamma;
    std::vector<int> scenario_row;
    std::vector<std::vector<int>> zeta_rows;
};

/// Single LP whose optimum is max over pi of the worst-case expectation.
/// A non-empty `fixed_pi` pins the policy block.
CompiledLp build_srobust_lp(const StageObjective& obj, const amb::LiftedAmbiguitySet& amb, const numvec& fixed_pi = {});

SRobustSolution solve_srobust(const StageObjective& obj, const amb::LiftedAmbiguitySet& amb,
                              const lp::LpSolver& solver = lp::default_solver());

WorstCase worst_case_expectation(const StageObjective& obj, const amb::LiftedAmbiguitySet& amb, const numvec& pi,
                                 const lp::LpSolver& solver = lp::default_solver());

inline constexpr int kOracleMaxDim = 4;
inline constexpr int kOracleMaxScenarios = 4;

/// Primal moment problem restricted to grid points of each support (plus its
/// vertices and the minimizers of its moment functions). Never below the
/// true worst case.
double oracle_worst_case(const StageObjective& obj, const amb::LiftedAmbiguitySet& amb, const numvec& pi,
                         double grid_step);

/// Grid, vertex and anchor points used by the oracle for one support.
std::vector<numvec> oracle_points(const geom::PolyhedralSet& D, double grid_step,
                                  const std::vector<geom::PwlConvexFn>& anchors = {});

} // namespace drmdp::ref
