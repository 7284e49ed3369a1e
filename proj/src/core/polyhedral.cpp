#include "drmdp/polyhedral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drmdp::geom {

namespace {

double dot(const numvec& a, const numvec& x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * x[i];
    return s;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

PolyhedralSet::PolyhedralSet(int dim, std::vector<Halfspace> ineq, std::vector<Halfspace> eq, int aux_dim)
    : dim_(dim), aux_dim_(aux_dim), ineq_(std::move(ineq)), eq_(std::move(eq)) {
    require(dim > 0, ErrorKind::Structural, "polyhedral set needs a positive dimension");
    require(aux_dim >= 0, ErrorKind::Structural, "negative auxiliary dimension");
    const auto width = static_cast<std::size_t>(lifted_dim());
    for (const auto& h : ineq_)
        require(h.a.size() == width && std::isfinite(h.b), ErrorKind::Structural,
                "inequality row has " + std::to_string(h.a.size()) + " entries, expected " +
                    std::to_string(width));
    for (const auto& h : eq_)
        require(h.a.size() == width && std::isfinite(h.b), ErrorKind::Structural,
                "equality row has " + std::to_string(h.a.size()) + " entries, expected " + std::to_string(width));
}

PolyhedralSet PolyhedralSet::box(const numvec& lo, const numvec& hi) {
    require(lo.size() == hi.size() && !lo.empty(), ErrorKind::Structural, "box bounds mismatch");
    const int n = static_cast<int>(lo.size());
    std::vector<Halfspace> rows;
    for (int i = 0; i < n; ++i) {
        numvec up(n, 0.0), down(n, 0.0);
        up[i] = 1.0;
        down[i] = -1.0;
        rows.push_back({up, hi[i]});
        rows.push_back({down, -lo[i]});
    }
    return PolyhedralSet(n, std::move(rows));
}

PolyhedralSet PolyhedralSet::simplex(int dim) {
    std::vector<Halfspace> rows;
    for (int i = 0; i < dim; ++i) {
        numvec a(dim, 0.0);
        a[i] = -1.0;
        rows.push_back({a, 0.0});
    }
    return PolyhedralSet(dim, std::move(rows), {Halfspace{numvec(dim, 1.0), 1.0}});
}

PolyhedralSet PolyhedralSet::point(const numvec& p) {
    const int n = static_cast<int>(p.size());
    std::vector<Halfspace> eq;
    for (int i = 0; i < n; ++i) {
        numvec a(n, 0.0);
        a[i] = 1.0;
        eq.push_back({a, p[i]});
    }
    return PolyhedralSet(n, {}, std::move(eq));
}

PolyhedralSet PolyhedralSet::with(std::vector<Halfspace> more_ineq, std::vector<Halfspace> more_eq) const {
    auto ineq = ineq_;
    auto eq = eq_;
    ineq.insert(ineq.end(), more_ineq.begin(), more_ineq.end());
    eq.insert(eq.end(), more_eq.begin(), more_eq.end());
    return PolyhedralSet(dim_, std::move(ineq), std::move(eq), aux_dim_);
}

bool PolyhedralSet::contains(const numvec& x, double tol) const {
    require(aux_dim_ == 0, ErrorKind::Structural, "membership test needs a set without auxiliary variables");
    require(x.size() == static_cast<std::size_t>(dim_), ErrorKind::Structural, "point dimension mismatch");
    for (const auto& h : ineq_)
        if (dot(h.a, x, x.size()) - h.b > tol * (1.0 + std::abs(h.b))) return false;
    for (const auto& h : eq_)
        if (std::abs(dot(h.a, x, x.size()) - h.b) > tol * (1.0 + std::abs(h.b))) return false;
    return true;
}

std::vector<int> PolyhedralSet::add_to(lp::LinearProgram& lp) const {
    std::vector<int> ids(lifted_dim());
    for (auto& id : ids) id = lp.add_variable(-lp::kInf, lp::kInf);
    auto terms = [&](const numvec& a) {
        std::vector<lp::Term> t;
        for (std::size_t k = 0; k < a.size(); ++k)
            if (a[k] != 0.0) t.push_back({ids[k], a[k]});
        return t;
    };
    for (const auto& h : ineq_) lp.add_row(terms(h.a), lp::Sense::Le, h.b);
    for (const auto& h : eq_) lp.add_row(terms(h.a), lp::Sense::Eq, h.b);
    return ids;
}

FeasibilityResult feasibility_check(const PolyhedralSet& set) {
    lp::LinearProgram prog;
    set.add_to(prog);
    const auto sol = lp::solve_lp(prog);
    FeasibilityResult res;
    if (sol.status == lp::Status::Infeasible) {
        // Farkas rows come back as u_i <= 0 on <= rows with b'u > 0; negate
        // into the textbook orientation.
        const auto n_in = set.ineq().size();
        res.farkas_ineq.resize(n_in);
        res.farkas_eq.resize(set.eq().size());
        for (std::size_t i = 0; i < n_in; ++i) res.farkas_ineq[i] = std::max(0.0, -sol.farkas[i]);
        for (std::size_t i = 0; i < set.eq().size(); ++i) res.farkas_eq[i] = -sol.farkas[n_in + i];
        return res;
    }
    require(sol.optimal(), ErrorKind::Solver,
            std::string("feasibility LP ended with status ") + lp::to_string(sol.status));
    res.feasible = true;
    res.witness.assign(sol.primal.begin(), sol.primal.begin() + set.dim());

    // Prefer a Chebyshev center when the set has interior.
    const auto center = chebyshev_center(set, 1e6);
    if (center.first > 0.0) res.witness = center.second;
    return res;
}

std::pair<double, numvec> chebyshev_center(const PolyhedralSet& set, double cap) {
    lp::LinearProgram prog(lp::Objective::Maximize);
    std::vector<int> ids(set.lifted_dim());
    for (auto& id : ids) id = prog.add_variable(-lp::kInf, lp::kInf);
    const int r = prog.add_variable(0.0, cap, 1.0);
    for (const auto& h : set.ineq()) {
        std::vector<lp::Term> t;
        double nrm = 0.0;
        for (std::size_t k = 0; k < h.a.size(); ++k) {
            if (h.a[k] == 0.0) continue;
            t.push_back({ids[k], h.a[k]});
            nrm += h.a[k] * h.a[k];
        }
        if (nrm > 0.0) t.push_back({r, std::sqrt(nrm)});
        prog.add_row(std::move(t), lp::Sense::Le, h.b);
    }
    for (const auto& h : set.eq()) {
        std::vector<lp::Term> t;
        for (std::size_t k = 0; k < h.a.size(); ++k)
            if (h.a[k] != 0.0) t.push_back({ids[k], h.a[k]});
        prog.add_row(std::move(t), lp::Sense::Eq, h.b);
    }
    const auto sol = lp::solve_lp(prog);
    if (!sol.optimal()) return {-1.0, {}};
    return {sol.primal[r], numvec(sol.primal.begin(), sol.primal.begin() + set.dim())};
}

double chebyshev_radius(const PolyhedralSet& set, double cap) { return chebyshev_center(set, cap).first; }

namespace {

LinearOptimum optimize_linear(const PolyhedralSet& set, const numvec& c, lp::Objective sense) {
    require(c.size() == static_cast<std::size_t>(set.dim()), ErrorKind::Structural,
            "objective dimension mismatch");
    lp::LinearProgram prog(sense);
    const auto ids = set.add_to(prog);
    for (int i = 0; i < set.dim(); ++i) prog.set_cost(ids[i], c[i]);
    const auto sol = lp::solve_lp(prog);
    if (sol.status == lp::Status::Infeasible) fail(ErrorKind::Validation, "set is empty");
    if (sol.status == lp::Status::Unbounded) fail(ErrorKind::NotCompact, "set not compact");
    require(sol.optimal(), ErrorKind::Solver, std::string("LP ended with status ") + lp::to_string(sol.status));
    return {sol.objective, numvec(sol.primal.begin(), sol.primal.begin() + set.dim())};
}

} // namespace

LinearOptimum minimize_linear(const PolyhedralSet& set, const numvec& c) {
    return optimize_linear(set, c, lp::Objective::Minimize);
}

LinearOptimum maximize_linear(const PolyhedralSet& set, const numvec& c) {
    return optimize_linear(set, c, lp::Objective::Maximize);
}

std::vector<Interval> bounding_box(const PolyhedralSet& set) {
    std::vector<Interval> box(set.dim());
    for (int i = 0; i < set.dim(); ++i) {
        numvec e(set.dim(), 0.0);
        e[i] = 1.0;
        try {
            box[i].lo = minimize_linear(set, e).value;
            box[i].hi = maximize_linear(set, e).value;
        } catch (const Error& err) {
            if (err.kind() == ErrorKind::NotCompact)
                fail(ErrorKind::NotCompact, "set not compact: coordinate " + std::to_string(i) + " is unbounded");
            throw;
        }
    }
    return box;
}

VertexList enumerate_vertices(const PolyhedralSet& set, int max_dim) {
    require(set.aux_dim() == 0, ErrorKind::Structural, "vertex enumeration needs a set without auxiliary variables");
    const int n = set.dim();
    if (n > max_dim)
        fail(ErrorKind::Guard, "vertex enumeration refused: dimension " + std::to_string(n) + " exceeds guard " +
                                   std::to_string(max_dim));
    VertexList out;
    out.dim = n;

    const int n_eq = static_cast<int>(set.eq().size());
    const int n_in = static_cast<int>(set.ineq().size());
    int eq_rank = 0;
    if (n_eq > 0) {
        Eigen::MatrixXd E(n_eq, n);
        for (int i = 0; i < n_eq; ++i)
            for (int k = 0; k < n; ++k) E(i, k) = set.eq()[i].a[k];
        eq_rank = static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(E).rank());
    }
    const int k = n - eq_rank;
    if (k > n_in) return out;
    if (binomial(n_in, k) > 2e7) fail(ErrorKind::Guard, "vertex enumeration refused: too many bases");

    std::vector<int> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    Eigen::MatrixXd M(n_eq + k, n);
    Eigen::VectorXd rhs(n_eq + k);
    for (int i = 0; i < n_eq; ++i) {
        for (int c = 0; c < n; ++c) M(i, c) = set.eq()[i].a[c];
        rhs(i) = set.eq()[i].b;
    }
    for (;;) {
        for (int r = 0; r < k; ++r) {
            const auto& h = set.ineq()[pick[r]];
            for (int c = 0; c < n; ++c) M(n_eq + r, c) = h.a[c];
            rhs(n_eq + r) = h.b;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        lu.setThreshold(1e-10);
        if (lu.rank() == n) {
            const Eigen::VectorXd x = lu.solve(rhs);
            const double resid = (M * x - rhs).cwiseAbs().maxCoeff();
            numvec p(x.data(), x.data() + n);
            if (resid <= 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()) && set.contains(p, 1e-9)) {
                const bool dup = std::any_of(out.vertices.begin(), out.vertices.end(), [&](const numvec& v) {
                    for (int c = 0; c < n; ++c)
                        if (std::abs(v[c] - p[c]) > kVertexDedupTol) return false;
                    return true;
                });
                if (!dup) out.vertices.push_back(std::move(p));
            }
        }
        // next combination
        int r = k - 1;
        while (r >= 0 && pick[r] == n_in - k + r) --r;
        if (r < 0) break;
        ++pick[r];
        for (int s = r + 1; s < k; ++s) pick[s] = pick[s - 1] + 1;
    }
    return out;
}

PwlConvexFn::PwlConvexFn(int dim, std::vector<std::vector<AffinePiece>> blocks)
    : dim_(dim), blocks_(std::move(blocks)) {
    require(dim > 0, ErrorKind::Structural, "piecewise-linear function needs a positive dimension");
    for (const auto& blk : blocks_) {
        require(!blk.empty(), ErrorKind::Structural, "empty max-block in piecewise-linear function");
        for (const auto& p : blk)
            require(p.a.size() == static_cast<std::size_t>(dim) && std::isfinite(p.b), ErrorKind::Structural,
                    "affine piece dimension mismatch");
    }
}

PwlConvexFn PwlConvexFn::affine(const numvec& a, double b) {
    return PwlConvexFn(static_cast<int>(a.size()), {{AffinePiece{a, b}}});
}

PwlConvexFn PwlConvexFn::abs_affine(const numvec& a, double b) {
    numvec neg(a.size());
    std::transform(a.begin(), a.end(), neg.begin(), [](double v) { return -v; });
    return PwlConvexFn(static_cast<int>(a.size()), {{AffinePiece{a, b}, AffinePiece{neg, -b}}});
}

PwlConvexFn PwlConvexFn::l1_distance(const numvec& center) {
    const int n = static_cast<int>(center.size());
    std::vector<std::vector<AffinePiece>> blocks;
    for (int i = 0; i < n; ++i) {
        numvec up(n, 0.0), down(n, 0.0);
        up[i] = 1.0;
        down[i] = -1.0;
        blocks.push_back({AffinePiece{up, -center[i]}, AffinePiece{down, center[i]}});
    }
    return PwlConvexFn(n, std::move(blocks));
}

PwlConvexFn PwlConvexFn::linf_distance(const numvec& center) {
    const int n = static_cast<int>(center.size());
    std::vector<AffinePiece> pieces;
    for (int i = 0; i < n; ++i) {
        numvec up(n, 0.0), down(n, 0.0);
        up[i] = 1.0;
        down[i] = -1.0;
        pieces.push_back({up, -center[i]});
        pieces.push_back({down, center[i]});
    }
    return PwlConvexFn(n, {std::move(pieces)});
}

double PwlConvexFn::operator()(const numvec& x) const {
    require(x.size() == static_cast<std::size_t>(dim_), ErrorKind::Structural,
            "piecewise-linear evaluation: point has " + std::to_string(x.size()) + " entries, expected " +
                std::to_string(dim_));
    double total = 0.0;
    for (const auto& blk : blocks_) {
        double best = -lp::kInf;
        for (const auto& p : blk) best = std::max(best, dot(p.a, x, x.size()) + p.b);
        total += best;
    }
    return total;
}

double pwl_eval(const PwlConvexFn& f, const numvec& x) { return f(x); }

} // namespace drmdp::geom
