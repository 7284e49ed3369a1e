#include "drmdp/reformulation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace drmdp::ref {

using geom::PolyhedralSet;

namespace {

numvec pwl_argmin(const geom::PwlConvexFn& f, const PolyhedralSet& D) {
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
    require(sol.optimal(), ErrorKind::Solver, "anchor LP failed");
    return numvec(sol.primal.begin(), sol.primal.begin() + D.dim());
}

void push_unique(std::vector<numvec>& pts, numvec p) {
    for (const auto& q : pts) {
        bool same = true;
        for (std::size_t i = 0; i < p.size() && same; ++i) same = std::abs(p[i] - q[i]) <= geom::kVertexDedupTol;
        if (same) return;
    }
    pts.push_back(std::move(p));
}

} // namespace

std::vector<numvec> oracle_points(const PolyhedralSet& D, double grid_step,
                                  const std::vector<geom::PwlConvexFn>& anchors) {
    require(grid_step > 0.0, ErrorKind::Structural, "grid step must be positive");
    require(D.aux_dim() == 0, ErrorKind::Guard, "oracle needs supports without auxiliary variables");
    const int k = D.dim();
    if (k > kOracleMaxDim)
        fail(ErrorKind::Guard, "oracle refused: factor dimension " + std::to_string(k) + " exceeds " +
                                   std::to_string(kOracleMaxDim));

    std::vector<numvec> pts = geom::enumerate_vertices(D).vertices;
    for (const auto& f : anchors) push_unique(pts, pwl_argmin(f, D));

    // Projection onto the affine hull of the equality rows.
    const int n_eq = static_cast<int>(D.eq().size());
    Eigen::MatrixXd E(n_eq, k);
    Eigen::VectorXd d(n_eq);
    for (int i = 0; i < n_eq; ++i) {
        for (int c = 0; c < k; ++c) E(i, c) = D.eq()[i].a[c];
        d(i) = D.eq()[i].b;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    if (n_eq > 0) cod.compute(E);

    const auto box = geom::bounding_box(D);
    std::vector<int> counts(k);
    double total = 1.0;
    for (int i = 0; i < k; ++i) {
        counts[i] = static_cast<int>(std::floor((box[i].hi - box[i].lo) / grid_step + 1e-9)) + 1;
        total *= counts[i];
    }
    if (total > 5e6) fail(ErrorKind::Guard, "oracle refused: grid too large");

    std::vector<int> idx(k, 0);
    for (;;) {
        Eigen::VectorXd x(k);
        for (int i = 0; i < k; ++i) x(i) = box[i].lo + idx[i] * grid_step;
        if (n_eq > 0) x -= cod.solve(E * x - d);
        numvec p(x.data(), x.data() + k);
        if (D.contains(p, 1e-9)) pts.push_back(std::move(p));
        int i = 0;
        while (i < k && ++idx[i] == counts[i]) idx[i++] = 0;
        if (i == k) break;
    }
    return pts;
}

double oracle_worst_case(const StageObjective& obj, const amb::LiftedAmbiguitySet& amb, const numvec& pi,
                         double grid_step) {
    const int k = amb.factor_dim;
    const int N = amb.num_scenarios();
    if (N > kOracleMaxScenarios)
        fail(ErrorKind::Guard, "oracle refused: " + std::to_string(N) + " scenarios exceed " +
                                   std::to_string(kOracleMaxScenarios));
    require(obj.factor_dim() == k && static_cast<int>(pi.size()) == obj.actions(), ErrorKind::Structural,
            "oracle dimension mismatch");
    const numvec c = obj.c_of(pi);
    const double kap = obj.kappa_of(pi);
    const auto J_of = amb.groups_of_scenario();

    lp::LinearProgram prog;
    const auto w = amb.weights.add_to(prog);

    // Moment variables in scaled form, one block per group.
    std::vector<std::vector<int>> u(amb.groups.size());
    std::vector<std::vector<lp::Term>> mean_rows, moment_rows;
    std::vector<std::vector<int>> mean_row_of(amb.groups.size()), moment_row_of(amb.groups.size());
    for (std::size_t j = 0; j < amb.groups.size(); ++j) {
        const auto& grp = amb.groups[j];
        const auto& U = grp.moments;
        for (int i = 0; i < U.lifted_dim(); ++i) u[j].push_back(prog.add_variable(-lp::kInf, lp::kInf));
        auto scaled = [&](const geom::Halfspace& h) {
            std::vector<lp::Term> t;
            for (int i = 0; i < U.lifted_dim(); ++i)
                if (h.a[i] != 0.0) t.push_back({u[j][i], h.a[i]});
            if (h.b != 0.0)
                for (int n : grp.scenarios) t.push_back({w[n], -h.b});
            return t;
        };
        for (const auto& h : U.ineq()) prog.add_row(scaled(h), lp::Sense::Le, 0.0);
        for (const auto& h : U.eq()) prog.add_row(scaled(h), lp::Sense::Eq, 0.0);
        const int mdim = grp.mean_equality ? k : 0;
        for (int i = 0; i < mdim; ++i) {
            mean_row_of[j].push_back(static_cast<int>(mean_rows.size()));
            mean_rows.push_back({{u[j][i], -1.0}});
        }
        for (int m = 0; m < grp.moment_count(); ++m) {
            moment_row_of[j].push_back(static_cast<int>(moment_rows.size()));
            moment_rows.push_back({{u[j][mdim + m], -1.0}});
        }
    }

    for (int n = 0; n < N; ++n) {
        std::vector<geom::PwlConvexFn> anchors;
        for (int j : J_of[n]) {
            const auto& grp = amb.groups[j];
            const int pos = amb::LiftedAmbiguitySet::position_in_group(grp, n);
            for (const auto& f : grp.g[pos]) anchors.push_back(f);
        }
        const auto pts = oracle_points(amb.supports[n], grid_step, anchors);
        std::vector<lp::Term> mass{{w[n], -1.0}};
        for (const auto& x : pts) {
            double f = kap;
            for (int i = 0; i < k; ++i) f += c[i] * x[i];
            const int q = prog.add_variable(0.0, lp::kInf, f);
            mass.push_back({q, 1.0});
            for (int j : J_of[n]) {
                const auto& grp = amb.groups[j];
                if (grp.mean_equality)
                    for (int i = 0; i < k; ++i)
                        if (x[i] != 0.0) mean_rows[mean_row_of[j][i]].push_back({q, x[i]});
                const int pos = amb::LiftedAmbiguitySet::position_in_group(grp, n);
                for (int m = 0; m < grp.moment_count(); ++m) {
                    const double g = grp.g[pos][m](x);
                    if (g != 0.0) moment_rows[moment_row_of[j][m]].push_back({q, g});
                }
            }
        }
        prog.add_row(std::move(mass), lp::Sense::Eq, 0.0);
    }
    for (auto& r : mean_rows) prog.add_row(std::move(r), lp::Sense::Eq, 0.0);
    for (auto& r : moment_rows) prog.add_row(std::move(r), lp::Sense::Le, 0.0);

    const auto sol = lp::solve_lp(prog);
    if (sol.status == lp::Status::Infeasible)
        fail(ErrorKind::Solver, "oracle grid admits no feasible distribution; refine the grid step");
    require(sol.optimal(), ErrorKind::Solver, std::string("oracle LP ended with status ") + lp::to_string(sol.status));
    return sol.objective;
}

} // namespace drmdp::ref
