#include "drmdp/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace drmdp::amb {

using geom::AffinePiece;
using geom::Halfspace;
using geom::PolyhedralSet;
using geom::PwlConvexFn;

namespace {

numvec unit(int n, int i, double v = 1.0) {
    numvec a(n, 0.0);
    a[i] = v;
    return a;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

bool same_set(const PolyhedralSet& a, const PolyhedralSet& b) {
    auto same_rows = [](const std::vector<Halfspace>& x, const std::vector<Halfspace>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].a != y[i].a || x[i].b != y[i].b) return false;
        return true;
    };
    return a.dim() == b.dim() && a.aux_dim() == b.aux_dim() && same_rows(a.ineq(), b.ineq()) &&
           same_rows(a.eq(), b.eq());
}

/// Minimum of a piecewise-linear convex function over a set via its epigraph.
double pwl_minimum(const PwlConvexFn& f, const PolyhedralSet& D) {
    lp::LinearProgram prog;
    const auto x = D.add_to(prog);
    for (const auto& block : f.blocks()) {
        const int t = prog.add_variable(-lp::kInf, lp::kInf, 1.0);
        for (const auto& p : block) {
            std::vector<lp::Term> terms{{t, -1.0}};
            for (int i = 0; i < f.dim(); ++i)
                if (p.a[i] != 0.0) terms.push_back({x[i], p.a[i]});
            prog.add_row(std::move(terms), lp::Sense::Le, -p.b);
        }
    }
    const auto sol = lp::solve_lp(prog);
    require(sol.optimal(), ErrorKind::Solver,
            std::string("moment function minimum LP ended with status ") + lp::to_string(sol.status));
    return sol.objective;
}

/// { lo <= x <= hi } rows over a vector of width `width` starting at `offset`.
void add_box_rows(std::vector<Halfspace>& rows, int width, int offset, const numvec& lo, const numvec& hi) {
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const int c = offset + static_cast<int>(i);
        if (std::isfinite(hi[i])) rows.push_back({unit(width, c), hi[i]});
        if (std::isfinite(lo[i])) rows.push_back({unit(width, c, -1.0), -lo[i]});
    }
}

PolyhedralSet uniform_weights(int n) {
    std::vector<Halfspace> eq;
    for (int i = 0; i < n; ++i) eq.push_back({unit(n, i), 1.0 / n});
    return PolyhedralSet(n, {}, std::move(eq));
}

void check_samples(const std::vector<numvec>& samples) {
    require(!samples.empty(), ErrorKind::Structural, "at least one sample is required");
    for (const auto& s : samples)
        require(s.size() == samples.front().size() && !s.empty(), ErrorKind::Structural,
                "samples have inconsistent dimensions");
}

/// Weight set { w >= floor, e'w = 1, (1/N) sum_j phi(N w_j) <= theta } with
/// phi >= every piece; aux u_j >= phi(N w_j).
PolyhedralSet divergence_weights(int n, double theta, const std::vector<PhiPiece>& phi) {
    const int width = 2 * n;
    std::vector<Halfspace> ineq;
    for (int j = 0; j < n; ++j) ineq.push_back({unit(width, j, -1.0), -kWeightFloor});
    for (int j = 0; j < n; ++j)
        for (const auto& p : phi) {
            numvec a(width, 0.0);
            a[j] = p.slope * n;
            a[n + j] = -1.0;
            ineq.push_back({a, -p.intercept});
        }
    numvec budget(width, 0.0);
    for (int j = 0; j < n; ++j) budget[n + j] = 1.0 / n;
    ineq.push_back({budget, theta});
    numvec sum(width, 0.0);
    for (int j = 0; j < n; ++j) sum[j] = 1.0;
    return PolyhedralSet(n, std::move(ineq), {Halfspace{sum, 1.0}}, n);
}

ConditionGroup wasserstein_group(const std::vector<numvec>& samples, double theta, Norm norm) {
    ConditionGroup grp;
    for (std::size_t n = 0; n < samples.size(); ++n) {
        grp.scenarios.push_back(static_cast<int>(n));
        grp.g.push_back({norm_distance(norm, samples[n])});
    }
    grp.moments = PolyhedralSet(1, {{{1.0}, theta}, {{-1.0}, 0.0}});
    return grp;
}

} // namespace

std::vector<std::vector<int>> LiftedAmbiguitySet::groups_of_scenario() const {
    std::vector<std::vector<int>> out(num_scenarios());
    for (std::size_t j = 0; j < groups.size(); ++j)
        for (int n : groups[j].scenarios)
            if (n >= 0 && n < num_scenarios()) out[n].push_back(static_cast<int>(j));
    return out;
}

int LiftedAmbiguitySet::position_in_group(const ConditionGroup& grp, int n) {
    const auto it = std::find(grp.scenarios.begin(), grp.scenarios.end(), n);
    return it == grp.scenarios.end() ? -1 : static_cast<int>(it - grp.scenarios.begin());
}

FactorMap FactorMap::transitions(int actions, int successors, const Eigen::MatrixXd& P, const Eigen::VectorXd& r0) {
    FactorMap fm;
    fm.actions = actions;
    fm.successors = successors;
    fm.P = P;
    fm.p0 = Eigen::VectorXd::Zero(P.rows());
    fm.R = Eigen::MatrixXd::Zero(actions, P.cols());
    fm.r0 = r0;
    fm.check();
    return fm;
}

FactorMap FactorMap::identity(int actions, int successors) {
    const int np = actions * successors;
    const int k = np + actions;
    FactorMap fm;
    fm.actions = actions;
    fm.successors = successors;
    fm.P = Eigen::MatrixXd::Zero(np, k);
    fm.P.leftCols(np).setIdentity();
    fm.p0 = Eigen::VectorXd::Zero(np);
    fm.R = Eigen::MatrixXd::Zero(actions, k);
    fm.R.rightCols(actions).setIdentity();
    fm.r0 = Eigen::VectorXd::Zero(actions);
    return fm;
}

Eigen::VectorXd FactorMap::transition(const numvec& xi) const {
    return P * Eigen::Map<const Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(xi.size())) + p0;
}

Eigen::VectorXd FactorMap::reward(const numvec& xi) const {
    return R * Eigen::Map<const Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(xi.size())) + r0;
}

void FactorMap::check() const {
    require(actions > 0 && successors >= 0, ErrorKind::Structural, "factor map needs at least one action");
    require(P.rows() == static_cast<Eigen::Index>(actions) * successors && p0.size() == P.rows(),
            ErrorKind::Structural,
            "factor map transition block has " + std::to_string(P.rows()) + " rows, expected " +
                std::to_string(actions * successors));
    require(R.rows() == actions && r0.size() == actions, ErrorKind::Structural,
            "factor map reward block has " + std::to_string(R.rows()) + " rows, expected " +
                std::to_string(actions));
    require(R.cols() == P.cols() && P.cols() > 0, ErrorKind::Structural, "factor map blocks disagree on factor_dim");
    require(P.allFinite() && p0.allFinite() && R.allFinite() && r0.allFinite(), ErrorKind::Structural,
            "factor map has non-finite entries");
}

PwlConvexFn norm_distance(Norm norm, const numvec& center) {
    return norm == Norm::L1 ? PwlConvexFn::l1_distance(center) : PwlConvexFn::linf_distance(center);
}

double diameter(const PolyhedralSet& D, Norm norm) {
    if (D.aux_dim() == 0 && D.dim() <= 8) {
        try {
            const auto verts = geom::enumerate_vertices(D).vertices;
            double best = 0.0;
            for (std::size_t i = 0; i < verts.size(); ++i)
                for (std::size_t j = i + 1; j < verts.size(); ++j)
                    best = std::max(best, norm_distance(norm, verts[i])(verts[j]));
            return best;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Guard) throw;
        }
    }
    const auto box = geom::bounding_box(D);
    double sum = 0.0, mx = 0.0;
    for (const auto& iv : box) {
        sum += iv.hi - iv.lo;
        mx = std::max(mx, iv.hi - iv.lo);
    }
    return norm == Norm::L1 ? sum : mx;
}

LiftedAmbiguitySet build_support_only(const PolyhedralSet& D) {
    geom::bounding_box(D);
    LiftedAmbiguitySet amb;
    amb.factor_dim = D.dim();
    amb.supports = {D};
    amb.weights = uniform_weights(1);
    return amb;
}

LiftedAmbiguitySet build_uncertain_mean(const PolyhedralSet& D, const numvec& mean_lo, const numvec& mean_hi,
                                        const numvec& center, double theta, Norm norm) {
    const int k = D.dim();
    require(static_cast<int>(mean_lo.size()) == k && static_cast<int>(mean_hi.size()) == k &&
                static_cast<int>(center.size()) == k,
            ErrorKind::Structural, "mean box and center must match the factor dimension");
    require(theta >= 0.0, ErrorKind::Structural, "radius must be nonnegative");
    geom::bounding_box(D);

    const bool l1 = norm == Norm::L1 && std::isfinite(theta);
    const int width = l1 ? 2 * k : k;
    std::vector<Halfspace> rows;
    add_box_rows(rows, width, 0, mean_lo, mean_hi);
    if (std::isfinite(theta)) {
        if (l1) {
            for (int i = 0; i < k; ++i) {
                numvec up(width, 0.0), down(width, 0.0);
                up[i] = 1.0;
                up[k + i] = -1.0;
                down[i] = -1.0;
                down[k + i] = -1.0;
                rows.push_back({up, center[i]});
                rows.push_back({down, -center[i]});
            }
            numvec budget(width, 0.0);
            for (int i = 0; i < k; ++i) budget[k + i] = 1.0;
            rows.push_back({budget, theta});
        } else {
            for (int i = 0; i < k; ++i) {
                rows.push_back({unit(width, i), center[i] + theta});
                rows.push_back({unit(width, i, -1.0), theta - center[i]});
            }
        }
    }
    PolyhedralSet U(k, std::move(rows), {}, width - k);
    require(geom::feasibility_check(U).feasible, ErrorKind::Validation, "mean set is empty");

    // The mean must be attainable by some distribution on D.
    {
        std::vector<Halfspace> ineq = U.ineq();
        for (const auto& h : D.ineq()) {
            require(D.aux_dim() == 0, ErrorKind::Structural, "uncertain-mean support must not use auxiliary variables");
            numvec a(width, 0.0);
            std::copy(h.a.begin(), h.a.end(), a.begin());
            ineq.push_back({a, h.b});
        }
        std::vector<Halfspace> eq;
        for (const auto& h : D.eq()) {
            numvec a(width, 0.0);
            std::copy(h.a.begin(), h.a.end(), a.begin());
            eq.push_back({a, h.b});
        }
        require(geom::feasibility_check(PolyhedralSet(k, std::move(ineq), std::move(eq), width - k)).feasible,
                ErrorKind::Validation, "mean set does not meet the support");
    }

    LiftedAmbiguitySet amb;
    amb.factor_dim = k;
    amb.supports = {D};
    amb.weights = uniform_weights(1);
    ConditionGroup grp;
    grp.scenarios = {0};
    grp.mean_equality = true;
    grp.g = {{}};
    grp.moments = std::move(U);
    amb.groups.push_back(std::move(grp));
    return amb;
}

LiftedAmbiguitySet build_phi_divergence_tv(const std::vector<numvec>& samples, double theta) {
    return build_phi_divergence(samples, theta, {{1.0, -1.0}, {-1.0, 1.0}});
}

LiftedAmbiguitySet build_phi_divergence(const std::vector<numvec>& samples, double theta,
                                        const std::vector<PhiPiece>& phi) {
    check_samples(samples);
    require(theta >= 0.0, ErrorKind::Structural, "divergence budget must be nonnegative");
    require(!phi.empty(), ErrorKind::Structural, "phi needs at least one affine piece");
    const int n = static_cast<int>(samples.size());
    LiftedAmbiguitySet amb;
    amb.factor_dim = static_cast<int>(samples.front().size());
    for (const auto& s : samples) amb.supports.push_back(PolyhedralSet::point(s));
    amb.weights = divergence_weights(n, std::isfinite(theta) ? theta : 1e6, phi);
    return amb;
}

LiftedAmbiguitySet build_wasserstein(const std::vector<numvec>& samples, double theta, const PolyhedralSet& D,
                                     Norm norm) {
    check_samples(samples);
    require(theta >= 0.0, ErrorKind::Structural, "Wasserstein radius must be nonnegative");
    require(static_cast<int>(samples.front().size()) == D.dim(), ErrorKind::Structural,
            "samples and support disagree on dimension");
    for (std::size_t n = 0; n < samples.size(); ++n) {
        bool inside;
        if (D.aux_dim() == 0) {
            inside = D.contains(samples[n], 1e-9);
        } else {
            std::vector<Halfspace> eq = D.eq();
            for (int i = 0; i < D.dim(); ++i) {
                numvec a(D.lifted_dim(), 0.0);
                a[i] = 1.0;
                eq.push_back({a, samples[n][i]});
            }
            inside = geom::feasibility_check(PolyhedralSet(D.dim(), D.ineq(), eq, D.aux_dim())).feasible;
        }
        require(inside, ErrorKind::Validation, "sample " + std::to_string(n) + " lies outside the support");
    }
    if (!std::isfinite(theta)) theta = diameter(D, norm);

    LiftedAmbiguitySet amb;
    amb.factor_dim = D.dim();
    amb.supports.assign(samples.size(), D);
    amb.weights = uniform_weights(static_cast<int>(samples.size()));
    amb.groups.push_back(wasserstein_group(samples, theta, norm));
    return amb;
}

LiftedAmbiguitySet build_hybrid_wasserstein_mad(const std::vector<numvec>& samples, double theta,
                                                const PolyhedralSet& D, Norm norm, const HybridOptions& opts) {
    LiftedAmbiguitySet amb = build_wasserstein(samples, theta, D, norm);
    const int k = amb.factor_dim;
    require(static_cast<int>(opts.mean_lo.size()) == k && static_cast<int>(opts.mean_hi.size()) == k,
            ErrorKind::Structural, "mean box must match the factor dimension");
    for (int i = 0; i < k; ++i)
        require(opts.mean_lo[i] <= opts.mean_hi[i], ErrorKind::Validation, "mean box is empty");
    numvec mu0 = opts.center;
    if (mu0.empty()) {
        mu0.resize(k);
        const auto box = geom::bounding_box(D);
        for (int i = 0; i < k; ++i) {
            const double lo = std::isfinite(opts.mean_lo[i]) ? opts.mean_lo[i] : box[i].lo;
            const double hi = std::isfinite(opts.mean_hi[i]) ? opts.mean_hi[i] : box[i].hi;
            mu0[i] = 0.5 * (lo + hi);
        }
    }
    require(static_cast<int>(mu0.size()) == k, ErrorKind::Structural, "deviation center must match the factor dimension");

    const numvec ones(k, 1.0);
    double e_mu0 = 0.0;
    for (double v : mu0) e_mu0 += v;
    const PwlConvexFn dev = PwlConvexFn::abs_affine(ones, -e_mu0);

    double bound = opts.mad_bound;
    require(bound >= 0.0, ErrorKind::Structural, "deviation bound must be nonnegative");
    if (!std::isfinite(bound)) {
        const double hi = geom::maximize_linear(D, ones).value;
        const double lo = geom::minimize_linear(D, ones).value;
        bound = std::max(std::abs(hi - e_mu0), std::abs(lo - e_mu0));
    }

    ConditionGroup grp;
    grp.mean_equality = true;
    for (int n = 0; n < amb.num_scenarios(); ++n) {
        grp.scenarios.push_back(n);
        grp.g.push_back({dev});
    }
    std::vector<Halfspace> rows;
    add_box_rows(rows, k + 1, 0, opts.mean_lo, opts.mean_hi);
    rows.push_back({unit(k + 1, k), bound});
    rows.push_back({unit(k + 1, k, -1.0), 0.0});
    grp.moments = PolyhedralSet(k + 1, std::move(rows));
    require(geom::feasibility_check(grp.moments).feasible, ErrorKind::Validation, "hybrid moment set is empty");
    amb.groups.push_back(std::move(grp));
    return amb;
}

LiftedAmbiguitySet build_mixture(const std::vector<MixtureComponent>& components, const PolyhedralSet& W) {
    require(!components.empty(), ErrorKind::Structural, "mixture needs at least one component");
    const int n = static_cast<int>(components.size());
    require(W.dim() == n, ErrorKind::Structural, "weight set dimension must equal the component count");
    LiftedAmbiguitySet amb;
    amb.factor_dim = components.front().support.dim();
    amb.weights = W;
    for (int c = 0; c < n; ++c) {
        const auto& comp = components[c];
        const int k = comp.support.dim();
        require(k == amb.factor_dim, ErrorKind::Structural, "mixture components disagree on dimension");
        require(comp.g.size() == comp.g_bound.size(), ErrorKind::Structural,
                "each moment function needs one bound");
        amb.supports.push_back(comp.support);
        const bool has_mean = !comp.mean_lo.empty();
        if (!has_mean && comp.g.empty()) continue;
        if (has_mean)
            require(static_cast<int>(comp.mean_lo.size()) == k && static_cast<int>(comp.mean_hi.size()) == k,
                    ErrorKind::Structural, "component mean box must match the factor dimension");
        const int mdim = has_mean ? k : 0;
        const int m = static_cast<int>(comp.g.size());
        const int width = mdim + m;
        std::vector<Halfspace> rows;
        if (has_mean) add_box_rows(rows, width, 0, comp.mean_lo, comp.mean_hi);
        for (int i = 0; i < m; ++i) {
            require(comp.g[i].dim() == k, ErrorKind::Structural, "moment function dimension mismatch");
            rows.push_back({unit(width, mdim + i), comp.g_bound[i]});
            rows.push_back({unit(width, mdim + i, -1.0), -pwl_minimum(comp.g[i], comp.support)});
        }
        ConditionGroup grp;
        grp.scenarios = {c};
        grp.mean_equality = has_mean;
        grp.g = {comp.g};
        grp.moments = PolyhedralSet(width, std::move(rows));
        amb.groups.push_back(std::move(grp));
    }
    const auto report = validate(amb);
    for (const auto& chk : report.checks)
        require(chk.passed || chk.name.rfind("weights", 0) != 0, ErrorKind::Validation,
                "mixture weight set rejected: " + chk.name + (chk.detail.empty() ? "" : " (" + chk.detail + ")"));
    return amb;
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

bool ValidationReport::structurally_valid() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed || c.surrogate; });
}

void ValidationReport::add(std::string name, bool passed, std::string detail, bool surrogate) {
    checks.push_back({std::move(name), passed, std::move(detail), surrogate});
}

void ValidationReport::merge(const ValidationReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << '\n';
    }
    return os.str();
}

namespace {

/// Runs `body`, turning thrown errors into a failed check.
template <class F>
void guarded(ValidationReport& rep, const std::string& name, F&& body) {
    try {
        body();
    } catch (const Error& e) {
        rep.add(name, false, e.what());
    }
}

void check_set(ValidationReport& rep, const std::string& name, const PolyhedralSet& S, bool need_bounded,
               bool slater) {
    guarded(rep, name + " nonempty", [&] {
        const auto f = geom::feasibility_check(S);
        rep.add(name + " nonempty", f.feasible, f.feasible ? "" : "infeasible constraint system");
    });
    if (need_bounded) {
        guarded(rep, name + " bounded", [&] {
            geom::bounding_box(S);
            rep.add(name + " bounded", true);
        });
    }
    if (slater) {
        guarded(rep, name + " strictly feasible", [&] {
            const double r = geom::chebyshev_radius(S);
            rep.add(name + " strictly feasible", r > 1e-9, "Chebyshev radius " + fmt(r), true);
        });
    }
}

} // namespace

ValidationReport validate(const LiftedAmbiguitySet& amb) {
    ValidationReport rep;
    const int k = amb.factor_dim;
    const int N = amb.num_scenarios();
    rep.add("factor dimension", k > 0, "factor_dim " + std::to_string(k));
    rep.add("scenario count", N > 0, std::to_string(N) + " scenarios");

    for (int n = 0; n < N; ++n) {
        const auto& D = amb.supports[n];
        const std::string name = "support " + std::to_string(n);
        const bool dim_ok = D.dim() == k;
        rep.add(name + " dimension", dim_ok, "dim " + std::to_string(D.dim()));
        if (!dim_ok) continue;
        if (n > 0 && same_set(D, amb.supports[n - 1])) continue;
        check_set(rep, name, D, true, true);
    }

    const auto& W = amb.weights;
    const bool wdim = W.dim() == N;
    rep.add("weights dimension", wdim, "dim " + std::to_string(W.dim()));
    if (wdim && N > 0) {
        check_set(rep, "weights", W, true, false);
        guarded(rep, "weights on simplex hyperplane", [&] {
            const numvec ones(N, 1.0);
            const double lo = geom::minimize_linear(W, ones).value;
            const double hi = geom::maximize_linear(W, ones).value;
            const bool ok = std::abs(lo - 1.0) <= 1e-9 && std::abs(hi - 1.0) <= 1e-9;
            rep.add("weights on simplex hyperplane", ok, "sum ranges over [" + fmt(lo) + ", " + fmt(hi) + "]");
        });
        guarded(rep, "weights interior", [&] {
            double worst = lp::kInf;
            int arg = 0;
            for (int i = 0; i < N; ++i) {
                const double v = geom::minimize_linear(W, unit(N, i)).value;
                if (v < worst) {
                    worst = v;
                    arg = i;
                }
            }
            rep.add("weights interior", worst > kInteriorityTol,
                    "min weight " + fmt(worst) + " at scenario " + std::to_string(arg));
        });
    }

    for (std::size_t j = 0; j < amb.groups.size(); ++j) {
        const auto& grp = amb.groups[j];
        const std::string name = "group " + std::to_string(j);
        bool ok = !grp.scenarios.empty();
        std::string detail;
        std::set<int> seen;
        for (int n : grp.scenarios) {
            if (n < 0 || n >= N || !seen.insert(n).second) {
                ok = false;
                detail = "bad scenario index " + std::to_string(n);
            }
        }
        rep.add(name + " scenarios", ok, detail);
        if (!ok) continue;

        const bool gsize = grp.g.size() == grp.scenarios.size();
        bool mconsistent = gsize;
        bool gdim = true;
        if (gsize)
            for (const auto& fs : grp.g) {
                if (static_cast<int>(fs.size()) != grp.moment_count()) mconsistent = false;
                for (const auto& f : fs)
                    if (f.dim() != k) gdim = false;
            }
        rep.add(name + " moment functions", gsize && mconsistent && gdim,
                !gsize ? "one function list per scenario required"
                : !mconsistent ? "moment count differs across scenarios"
                : !gdim        ? "moment function dimension differs from factor_dim"
                               : "");
        const int expect = (grp.mean_equality ? k : 0) + grp.moment_count();
        const bool udim = grp.moments.dim() == expect && expect > 0;
        rep.add(name + " moment set dimension", udim,
                "dim " + std::to_string(grp.moments.dim()) + ", expected " + std::to_string(expect));
        if (udim) check_set(rep, name + " moment set", grp.moments, false, false);
    }
    return rep;
}

ValidationReport validate(const LiftedAmbiguitySet& amb, const FactorMap& fm) {
    ValidationReport rep = validate(amb);
    bool shape = true;
    try {
        fm.check();
    } catch (const Error& e) {
        shape = false;
        rep.add("factor map shape", false, e.what());
    }
    if (!shape) return rep;
    const bool kmatch = fm.factor_dim() == amb.factor_dim;
    rep.add("factor map dimension", kmatch,
            "factor map uses " + std::to_string(fm.factor_dim()) + ", ambiguity set " + std::to_string(amb.factor_dim));
    if (!kmatch || fm.successors == 0) return rep;

    // Transition rows are affine in xi, so their extremes over D_n are
    // attained at vertices; fall back to one LP per quantity otherwise.
    std::string failure;
    for (int n = 0; n < amb.num_scenarios() && failure.empty(); ++n) {
        const auto& D = amb.supports[n];
        if (D.dim() != amb.factor_dim) continue;
        if (n > 0 && same_set(D, amb.supports[n - 1])) continue;
        std::vector<numvec> verts;
        bool have_verts = false;
        if (D.aux_dim() == 0 && D.dim() <= 8) {
            try {
                verts = geom::enumerate_vertices(D).vertices;
                have_verts = !verts.empty();
            } catch (const Error&) {
            }
        }
        auto range = [&](const Eigen::VectorXd& coef, double offset) {
            double lo, hi;
            if (have_verts) {
                lo = lp::kInf;
                hi = -lp::kInf;
                for (const auto& v : verts) {
                    double val = offset;
                    for (int i = 0; i < coef.size(); ++i) val += coef(i) * v[i];
                    lo = std::min(lo, val);
                    hi = std::max(hi, val);
                }
            } else {
                const numvec c(coef.data(), coef.data() + coef.size());
                lo = geom::minimize_linear(D, c).value + offset;
                hi = geom::maximize_linear(D, c).value + offset;
            }
            return std::pair{lo, hi};
        };
        try {
            for (int a = 0; a < fm.actions && failure.empty(); ++a) {
                Eigen::VectorXd sum_coef = Eigen::VectorXd::Zero(fm.factor_dim());
                double sum_off = 0.0;
                for (int s = 0; s < fm.successors; ++s) {
                    const int row = a * fm.successors + s;
                    sum_coef += fm.P.row(row).transpose();
                    sum_off += fm.p0(row);
                    const double lo = fm.P.row(row).isZero(0.0) ? fm.p0(row) : range(fm.P.row(row).transpose(), fm.p0(row)).first;
                    if (lo < -kRowTol) {
                        failure = "scenario " + std::to_string(n) + " action " + std::to_string(a) + " successor " +
                                  std::to_string(s) + ": entry reaches " + fmt(lo);
                        break;
                    }
                }
                if (!failure.empty()) break;
                const auto [lo, hi] = range(sum_coef, sum_off);
                if (std::abs(lo - 1.0) > kRowTol || std::abs(hi - 1.0) > kRowTol)
                    failure = "scenario " + std::to_string(n) + " action " + std::to_string(a) +
                              ": row sum ranges over [" + fmt(lo) + ", " + fmt(hi) + "]";
            }
        } catch (const Error& e) {
            failure = std::string("scenario ") + std::to_string(n) + ": " + e.what();
        }
    }
    rep.add("transition rows valid", failure.empty(), failure);
    return rep;
}

void require_valid(const LiftedAmbiguitySet& amb, const FactorMap& fm, const std::string& context) {
    const auto rep = validate(amb, fm);
    if (rep.structurally_valid()) return;
    std::string msg = context + ": ambiguity set failed validation";
    for (const auto& c : rep.checks)
        if (!c.passed && !c.surrogate) msg += "; " + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")");
    fail(ErrorKind::Validation, msg);
}

} // namespace drmdp::amb
