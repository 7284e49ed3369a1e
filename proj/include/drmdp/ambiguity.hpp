#pragma once

#include "drmdp/common.hpp"
#include "drmdp/polyhedral.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

namespace drmdp::amb {

/// One conditional-expectation block: over the scenarios in `scenarios`,
/// E[xi] = mu (when `mean_equality`) and E[g_n(xi)] <= nu, with (mu, nu) in
/// `moments`. The moment set is stated over (mu, nu), mu first and present
/// only for mean groups.
struct ConditionGroup {
    std::vector<int> scenarios;
    bool mean_equality = false;
    /// g[i][m]: m-th moment function of scenario scenarios[i].
    std::vector<std::vector<geom::PwlConvexFn>> g;
    geom::PolyhedralSet moments;

    int moment_count() const { return g.empty() ? 0 : static_cast<int>(g.front().size()); }
};

/// Scenario-wise lifted ambiguity set over a factor vector xi.
struct LiftedAmbiguitySet {
    int factor_dim = 0;
    std::vector<geom::PolyhedralSet> supports; ///< D_n, one per scenario
    std::vector<ConditionGroup> groups;
    geom::PolyhedralSet weights;               ///< W over the scenario weights

    int num_scenarios() const { return static_cast<int>(supports.size()); }
    /// For each scenario, the groups whose scenario list contains it.
    std::vector<std::vector<int>> groups_of_scenario() const;
    /// Position of scenario n inside group j's list, or -1.
    static int position_in_group(const ConditionGroup& grp, int n);
};

/// p = P xi + p0 (action-major, successor-minor), r = R xi + r0.
struct FactorMap {
    int actions = 0;
    int successors = 0;
    Eigen::MatrixXd P;
    Eigen::VectorXd p0;
    Eigen::MatrixXd R;
    Eigen::VectorXd r0;

    int factor_dim() const { return static_cast<int>(P.cols()); }
    /// Transitions only depend on xi; rewards are fixed.
    static FactorMap transitions(int actions, int successors, const Eigen::MatrixXd& P, const Eigen::VectorXd& r0);
    /// xi = (p, r) directly.
    static FactorMap identity(int actions, int successors);

    Eigen::VectorXd transition(const numvec& xi) const;
    Eigen::VectorXd reward(const numvec& xi) const;
    void check() const;
};

enum class Norm { L1, LInf };

geom::PwlConvexFn norm_distance(Norm norm, const numvec& center);

/// Diameter of D under the norm, from its vertices or bounding box.
double diameter(const geom::PolyhedralSet& D, Norm norm);

LiftedAmbiguitySet build_support_only(const geom::PolyhedralSet& D);

/// Mean pinned to { lo <= mu <= hi, ||mu - center|| <= theta }.
LiftedAmbiguitySet build_uncertain_mean(const geom::PolyhedralSet& D, const numvec& mean_lo, const numvec& mean_hi,
                                        const numvec& center, double theta, Norm norm);

inline constexpr double kWeightFloor = 1e-9;

/// Reweighting of the samples with sum_j |w_j - 1/N| <= theta.
LiftedAmbiguitySet build_phi_divergence_tv(const std::vector<numvec>& samples, double theta);

/// General divergence with phi given as a convex piecewise-linear outer
/// approximation max_k (slope_k * t + intercept_k).
struct PhiPiece {
    double slope = 0.0;
    double intercept = 0.0;
};
LiftedAmbiguitySet build_phi_divergence(const std::vector<numvec>& samples, double theta,
                                        const std::vector<PhiPiece>& phi);

/// Type-1 Wasserstein ball around the empirical distribution. Infinite theta
/// is replaced by the diameter of D.
LiftedAmbiguitySet build_wasserstein(const std::vector<numvec>& samples, double theta,
                                     const geom::PolyhedralSet& D, Norm norm);

/// Wasserstein ball intersected with a mean box and a bound on the mean
/// absolute deviation |e'(xi - mu0)| around the fixed center mu0.
struct HybridOptions {
    numvec mean_lo;
    numvec mean_hi;
    numvec center;           ///< mu0; empty means the midpoint of the mean box
    double mad_bound = std::numeric_limits<double>::infinity();
};
LiftedAmbiguitySet build_hybrid_wasserstein_mad(const std::vector<numvec>& samples, double theta,
                                                const geom::PolyhedralSet& D, Norm norm,
                                                const HybridOptions& opts);

/// One mixture component: support, optional mean box, moment functions with
/// upper bounds.
struct MixtureComponent {
    geom::PolyhedralSet support;
    numvec mean_lo;  ///< empty: no mean information
    numvec mean_hi;
    std::vector<geom::PwlConvexFn> g;
    numvec g_bound;
};
LiftedAmbiguitySet build_mixture(const std::vector<MixtureComponent>& components, const geom::PolyhedralSet& W);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
    bool surrogate = false; ///< heuristic interiority check rather than a hard invariant
};

struct ValidationReport {
    std::vector<Check> checks;

    bool all_passed() const;
    /// True when every non-surrogate check passed.
    bool structurally_valid() const;
    void add(std::string name, bool passed, std::string detail = {}, bool surrogate = false);
    void merge(const ValidationReport& other);
    std::string to_string() const;
};

inline constexpr double kInteriorityTol = 1e-12;
inline constexpr double kRowTol = 1e-9;

ValidationReport validate(const LiftedAmbiguitySet& amb);
ValidationReport validate(const LiftedAmbiguitySet& amb, const FactorMap& fm);

/// Throws Validation listing the failing checks unless the report is
/// structurally valid.
void require_valid(const LiftedAmbiguitySet& amb, const FactorMap& fm, const std::string& context);

} // namespace drmdp::amb
