#pragma once

#include "drmdp/common.hpp"
#include "drmdp/lp.hpp"

#include <utility>
#include <vector>

namespace drmdp::geom {

/// One linear constraint a·x <= b (or a·x = b when stored as an equality).
struct Halfspace {
    numvec a;
    double b = 0.0;
};

/// Polyhedron { x in R^dim : exists z in R^aux_dim with A(x,z) <= b, E(x,z) = d }.
///
/// Constraint rows are stated over the lifted vector (x, z); with aux_dim = 0
/// this is a plain inequality/equality description. The auxiliary block lets
/// norm balls and divergence budgets stay polynomial in size.
class PolyhedralSet {
public:
    PolyhedralSet() = default;
    PolyhedralSet(int dim, std::vector<Halfspace> ineq, std::vector<Halfspace> eq = {}, int aux_dim = 0);

    static PolyhedralSet box(const numvec& lo, const numvec& hi);
    /// { x >= 0, e'x = 1 } in R^dim.
    static PolyhedralSet simplex(int dim);
    static PolyhedralSet point(const numvec& p);

    int dim() const { return dim_; }
    int aux_dim() const { return aux_dim_; }
    int lifted_dim() const { return dim_ + aux_dim_; }
    const std::vector<Halfspace>& ineq() const { return ineq_; }
    const std::vector<Halfspace>& eq() const { return eq_; }

    /// Copy with extra constraints over the lifted vector.
    PolyhedralSet with(std::vector<Halfspace> more_ineq, std::vector<Halfspace> more_eq = {}) const;

    /// Membership within `tol` (scaled by 1 + |b|). Requires aux_dim == 0.
    bool contains(const numvec& x, double tol = 1e-9) const;

    /// Appends the lifted variables (free) and the constraint rows to `lp`;
    /// returns the lifted variable ids, x block first.
    std::vector<int> add_to(lp::LinearProgram& lp) const;

private:
    int dim_ = 0;
    int aux_dim_ = 0;
    std::vector<Halfspace> ineq_;
    std::vector<Halfspace> eq_;
};

struct FeasibilityResult {
    bool feasible = false;
    numvec witness;      ///< x block of a feasible point
    /// Infeasibility certificate: u >= 0 on inequality rows and v on equality
    /// rows with A'u + E'v = 0 and b'u + d'v < 0.
    numvec farkas_ineq;
    numvec farkas_eq;
};

FeasibilityResult feasibility_check(const PolyhedralSet& set);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-coordinate extremes of the x block; throws NotCompact when any is
/// unbounded and Validation when the set is empty.
std::vector<Interval> bounding_box(const PolyhedralSet& set);

/// Optimum of c·x over the set; throws on empty or unbounded sets.
struct LinearOptimum {
    double value = 0.0;
    numvec point;
};
LinearOptimum minimize_linear(const PolyhedralSet& set, const numvec& c);
LinearOptimum maximize_linear(const PolyhedralSet& set, const numvec& c);

/// Center and radius of the largest Euclidean ball satisfying every
/// inequality row while keeping the equality rows; radius -1 when the LP fails.
std::pair<double, numvec> chebyshev_center(const PolyhedralSet& set, double cap = 1e6);

/// Radius of the largest Euclidean ball (within the affine hull of the
/// equality rows) satisfying every inequality row; capped at `cap`.
double chebyshev_radius(const PolyhedralSet& set, double cap = 1e6);

struct VertexList {
    int dim = 0;
    std::vector<numvec> vertices;
};

inline constexpr double kVertexDedupTol = 1e-7;

/// Brute-force basis enumeration. Requires aux_dim == 0 and dim <= max_dim.
VertexList enumerate_vertices(const PolyhedralSet& set, int max_dim = 8);

/// Affine piece a·x + b.
struct AffinePiece {
    numvec a;
    double b = 0.0;
};

/// f(x) = sum over blocks of max over the block's pieces of (a·x + b).
class PwlConvexFn {
public:
    PwlConvexFn() = default;
    PwlConvexFn(int dim, std::vector<std::vector<AffinePiece>> blocks);

    static PwlConvexFn affine(const numvec& a, double b);
    /// |a·x + b|
    static PwlConvexFn abs_affine(const numvec& a, double b);
    /// ||x - center||_1, one two-piece block per coordinate.
    static PwlConvexFn l1_distance(const numvec& center);
    /// ||x - center||_inf, a single block with 2·dim pieces.
    static PwlConvexFn linf_distance(const numvec& center);

    int dim() const { return dim_; }
    const std::vector<std::vector<AffinePiece>>& blocks() const { return blocks_; }
    double operator()(const numvec& x) const;

private:
    int dim_ = 0;
    std::vector<std::vector<AffinePiece>> blocks_;
};

double pwl_eval(const PwlConvexFn& f, const numvec& x);

} // namespace drmdp::geom
