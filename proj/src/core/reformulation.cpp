#include "drmdp/reformulation.hpp"

#include <algorithm>
#include <cmath>

namespace drmdp::ref {

using amb::ConditionGroup;
using amb::LiftedAmbiguitySet;
using geom::Halfspace;
using geom::PolyhedralSet;

double StageObjective::kappa_of(const numvec& pi) const {
    double v = 0.0;
    for (int a = 0; a < actions(); ++a) v += kappa(a) * pi[a];
    return v;
}

numvec StageObjective::c_of(const numvec& pi) const {
    numvec c(factor_dim(), 0.0);
    for (int a = 0; a < actions(); ++a)
        if (pi[a] != 0.0)
            for (int i = 0; i < factor_dim(); ++i) c[i] += C(i, a) * pi[a];
    return c;
}

double StageObjective::evaluate(const numvec& pi, const numvec& xi) const {
    const numvec c = c_of(pi);
    double v = kappa_of(pi);
    for (int i = 0; i < factor_dim(); ++i) v += c[i] * xi[i];
    return v;
}

StageObjective assemble_stage_objective(const numvec& v_next, const amb::FactorMap& fm, double continuation) {
    fm.check();
    require(static_cast<int>(v_next.size()) == fm.successors, ErrorKind::Structural,
            "continuation vector has " + std::to_string(v_next.size()) + " entries, expected " +
                std::to_string(fm.successors));
    for (double v : v_next) require(std::isfinite(v), ErrorKind::Structural, "continuation values must be finite");
    StageObjective obj;
    obj.v_next = v_next;
    obj.continuation = continuation;
    const int A = fm.actions, S = fm.successors;
    obj.block = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(A) * S, A);
    const Eigen::Map<const Eigen::VectorXd> v(v_next.data(), S);
    for (int a = 0; a < A; ++a) obj.block.block(static_cast<Eigen::Index>(a) * S, a, S, 1) = v;
    // f * p'(V pi) + r'pi with p = P xi + p0, r = R xi + r0.
    obj.kappa = fm.r0 + continuation * obj.block.transpose() * fm.p0;
    obj.C = fm.R.transpose() + continuation * fm.P.transpose() * obj.block;
    return obj;
}

namespace {

struct Builder {
    lp::LinearProgram& lp;

    int free_var() { return lp.add_variable(-lp::kInf, lp::kInf); }
    int pos_var() { return lp.add_variable(0.0, lp::kInf); }
};

/// Row-by-column access to the constraint blocks of a set, as (row, column,
/// coefficient) triples of the transposed system.
void add_transposed(std::vector<std::vector<lp::Term>>& cols, const std::vector<Halfspace>& rows,
                    const std::vector<int>& mult) {
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].a.size(); ++c)
            if (rows[r].a[c] != 0.0) cols[c].push_back({mult[r], rows[r].a[c]});
}

} // namespace

CompiledLp build_srobust_lp(const StageObjective& obj, const LiftedAmbiguitySet& amb, const numvec& fixed_pi) {
    const int k = amb.factor_dim;
    const int N = amb.num_scenarios();
    const int A = obj.actions();
    require(obj.factor_dim() == k, ErrorKind::Structural,
            "stage objective uses " + std::to_string(obj.factor_dim()) + " factors, ambiguity set " +
                std::to_string(k));
    require(N > 0 && amb.weights.dim() == N, ErrorKind::Structural, "weight set must cover every scenario");
    require(fixed_pi.empty() || static_cast<int>(fixed_pi.size()) == A, ErrorKind::Structural,
            "policy dimension mismatch");

    CompiledLp out;
    lp::LinearProgram& lp = out.program;
    Builder b{lp};
    const auto J_of = amb.groups_of_scenario();

    // Policy block.
    for (int a = 0; a < A; ++a) {
        const double lo = fixed_pi.empty() ? 0.0 : fixed_pi[a];
        const double hi = fixed_pi.empty() ? lp::kInf : fixed_pi[a];
        out.pi.push_back(lp.add_variable(lo, hi, 0.0));
    }
    if (fixed_pi.empty()) {
        std::vector<lp::Term> t;
        for (int v : out.pi) t.push_back({v, 1.0});
        lp.add_row(std::move(t), lp::Sense::Eq, 1.0);
    }

    out.delta = lp.add_variable(-lp::kInf, lp::kInf, -1.0);
    for (int n = 0; n < N; ++n) out.alpha.push_back(b.free_var());
    out.beta.resize(amb.groups.size());
    out.gamma.resize(amb.groups.size());
    for (std::size_t j = 0; j < amb.groups.size(); ++j) {
        const auto& grp = amb.groups[j];
        if (grp.mean_equality)
            for (int i = 0; i < k; ++i) out.beta[j].push_back(b.free_var());
        for (int m = 0; m < grp.moment_count(); ++m) out.gamma[j].push_back(b.pos_var());
    }

    // Robust constraint over V: delta >= max of -(alpha'w + beta'm - gamma'q)
    // written through the LP dual of V.
    const auto& W = amb.weights;
    std::vector<int> lam_w, eta_w;
    for (std::size_t r = 0; r < W.ineq().size(); ++r) lam_w.push_back(b.pos_var());
    for (std::size_t r = 0; r < W.eq().size(); ++r) eta_w.push_back(b.free_var());
    {
        std::vector<lp::Term> t{{out.delta, 1.0}};
        for (std::size_t r = 0; r < lam_w.size(); ++r)
            if (W.ineq()[r].b != 0.0) t.push_back({lam_w[r], -W.ineq()[r].b});
        for (std::size_t r = 0; r < eta_w.size(); ++r)
            if (W.eq()[r].b != 0.0) t.push_back({eta_w[r], -W.eq()[r].b});
        lp.add_row(std::move(t), lp::Sense::Eq, 0.0);
    }
    std::vector<std::vector<lp::Term>> wcols(W.lifted_dim());
    add_transposed(wcols, W.ineq(), lam_w);
    add_transposed(wcols, W.eq(), eta_w);
    for (int n = 0; n < N; ++n) wcols[n].push_back({out.alpha[n], 1.0});

    for (std::size_t j = 0; j < amb.groups.size(); ++j) {
        const auto& grp = amb.groups[j];
        const auto& U = grp.moments;
        std::vector<int> lam_u, eta_u;
        for (std::size_t r = 0; r < U.ineq().size(); ++r) lam_u.push_back(b.pos_var());
        for (std::size_t r = 0; r < U.eq().size(); ++r) eta_u.push_back(b.free_var());
        // Scaled membership: rows F u - (sum_{i in N_j} w_i) h <= 0.
        std::vector<lp::Term> scale;
        for (std::size_t r = 0; r < lam_u.size(); ++r)
            if (U.ineq()[r].b != 0.0) scale.push_back({lam_u[r], -U.ineq()[r].b});
        for (std::size_t r = 0; r < eta_u.size(); ++r)
            if (U.eq()[r].b != 0.0) scale.push_back({eta_u[r], -U.eq()[r].b});
        for (int n : grp.scenarios) wcols[n].insert(wcols[n].end(), scale.begin(), scale.end());

        std::vector<std::vector<lp::Term>> ucols(U.lifted_dim());
        add_transposed(ucols, U.ineq(), lam_u);
        add_transposed(ucols, U.eq(), eta_u);
        const int mdim = grp.mean_equality ? k : 0;
        for (int i = 0; i < mdim; ++i) ucols[i].push_back({out.beta[j][i], 1.0});
        for (int m = 0; m < grp.moment_count(); ++m) ucols[mdim + m].push_back({out.gamma[j][m], -1.0});
        for (auto& col : ucols) lp.add_row(std::move(col), lp::Sense::Eq, 0.0);
    }
    for (auto& col : wcols) lp.add_row(std::move(col), lp::Sense::Eq, 0.0);

    // Per scenario: alpha_n <= min over D_n of kappa + (c - beta)'xi + gamma'g(xi),
    // replaced by its LP dual.
    out.scenario_row.resize(N);
    out.zeta_rows.resize(N);
    for (int n = 0; n < N; ++n) {
        const auto& D = amb.supports[n];
        require(D.dim() == k, ErrorKind::Structural, "support " + std::to_string(n) + " has the wrong dimension");
        std::vector<int> lam_d, eta_d;
        for (std::size_t r = 0; r < D.ineq().size(); ++r) lam_d.push_back(b.pos_var());
        for (std::size_t r = 0; r < D.eq().size(); ++r) eta_d.push_back(b.free_var());

        std::vector<lp::Term> scen;
        for (int a = 0; a < A; ++a)
            if (obj.kappa(a) != 0.0) scen.push_back({out.pi[a], obj.kappa(a)});
        scen.push_back({out.alpha[n], -1.0});
        for (std::size_t r = 0; r < lam_d.size(); ++r)
            if (D.ineq()[r].b != 0.0) scen.push_back({lam_d[r], -D.ineq()[r].b});
        for (std::size_t r = 0; r < eta_d.size(); ++r)
            if (D.eq()[r].b != 0.0) scen.push_back({eta_d[r], -D.eq()[r].b});

        std::vector<std::vector<lp::Term>> dcols(D.lifted_dim());
        add_transposed(dcols, D.ineq(), lam_d);
        add_transposed(dcols, D.eq(), eta_d);
        for (int i = 0; i < k; ++i)
            for (int a = 0; a < A; ++a)
                if (obj.C(i, a) != 0.0) dcols[i].push_back({out.pi[a], obj.C(i, a)});

        std::vector<std::vector<lp::Term>> block_rows;
        for (int j : J_of[n]) {
            const auto& grp = amb.groups[j];
            if (grp.mean_equality)
                for (int i = 0; i < k; ++i) dcols[i].push_back({out.beta[j][i], -1.0});
            const int pos = LiftedAmbiguitySet::position_in_group(grp, n);
            for (int m = 0; m < grp.moment_count(); ++m) {
                const auto& f = grp.g[pos][m];
                require(f.dim() == k, ErrorKind::Structural, "moment function dimension mismatch");
                for (const auto& blk : f.blocks()) {
                    std::vector<lp::Term> row{{out.gamma[j][m], -1.0}};
                    for (const auto& piece : blk) {
                        const int s = b.pos_var();
                        row.push_back({s, 1.0});
                        if (piece.b != 0.0) scen.push_back({s, piece.b});
                        for (int i = 0; i < k; ++i)
                            if (piece.a[i] != 0.0) dcols[i].push_back({s, piece.a[i]});
                    }
                    block_rows.push_back(std::move(row));
                }
            }
        }
        out.scenario_row[n] = lp.add_row(std::move(scen), lp::Sense::Ge, 0.0);
        for (int i = 0; i < D.lifted_dim(); ++i) {
            const int r = lp.add_row(std::move(dcols[i]), lp::Sense::Eq, 0.0);
            if (i < k) out.zeta_rows[n].push_back(r);
        }
        for (auto& row : block_rows) lp.add_row(std::move(row), lp::Sense::Eq, 0.0);
    }
    return out;
}

namespace {

constexpr double kTinyWeight = 1e-7;

WorstCaseCertificate extract_certificate(const CompiledLp& c, const lp::LpSolution& sol, const StageObjective& obj,
                                         const LiftedAmbiguitySet& amb, const numvec& pi, double value) {
    const int N = amb.num_scenarios();
    const int k = amb.factor_dim;
    WorstCaseCertificate cert;
    cert.weights.resize(N);
    cert.means.resize(N);
    cert.mean.assign(k, 0.0);
    const numvec cvec = obj.c_of(pi);
    const double kap = obj.kappa_of(pi);
    double total = 0.0;
    for (int n = 0; n < N; ++n) {
        const double w = -sol.dual[c.scenario_row[n]];
        cert.weights[n] = w;
        numvec z(k);
        for (int i = 0; i < k; ++i) {
            z[i] = -sol.dual[c.zeta_rows[n][i]];
            cert.mean[i] += z[i];
        }
        if (w > kTinyWeight) {
            for (double& v : z) v /= w;
            cert.means[n] = std::move(z);
        } else {
            cert.means[n] = geom::minimize_linear(amb.supports[n], cvec).point;
        }
        double f = kap;
        for (int i = 0; i < k; ++i) f += cvec[i] * cert.means[n][i];
        total += w * f;
    }
    cert.residual = std::abs(total - value);
    return cert;
}

lp::LpSolution solve_checked(const lp::LpSolver& solver, const lp::LinearProgram& prog, const char* what) {
    auto sol = solver.solve(prog);
    if (sol.status == lp::Status::Infeasible)
        fail(ErrorKind::Solver, std::string(what) + " is infeasible; the ambiguity set is likely misspecified");
    if (!sol.optimal())
        fail(ErrorKind::Solver, std::string(what) + " ended with status " + lp::to_string(sol.status) +
                                    (sol.message.empty() ? "" : " (" + sol.message + ")"));
    return sol;
}

} // namespace

SRobustSolution solve_srobust(const StageObjective& obj, const LiftedAmbiguitySet& amb, const lp::LpSolver& solver) {
    const CompiledLp c = build_srobust_lp(obj, amb);
    const auto sol = solve_checked(solver, c.program, "S-robust subproblem");

    SRobustSolution out;
    out.value = sol.objective;
    out.iterations = sol.iterations;
    out.lp_certificates = sol.certificates;
    double mass = 0.0;
    for (int v : c.pi) {
        const double p = std::max(0.0, sol.primal[v]);
        out.policy.push_back(p);
        mass += p;
    }
    for (double& p : out.policy) p /= mass;
    out.delta = sol.primal[c.delta];
    for (int v : c.alpha) out.alpha.push_back(sol.primal[v]);
    for (const auto& blk : c.beta) {
        out.beta.emplace_back();
        for (int v : blk) out.beta.back().push_back(sol.primal[v]);
    }
    for (const auto& blk : c.gamma) {
        out.gamma.emplace_back();
        for (int v : blk) out.gamma.back().push_back(std::max(0.0, sol.primal[v]));
    }
    out.certificate = extract_certificate(c, sol, obj, amb, out.policy, out.value);

    double best = -lp::kInf;
    for (int a = 0; a < obj.actions(); ++a) {
        double v = obj.kappa(a);
        for (int i = 0; i < obj.factor_dim(); ++i) v += obj.C(i, a) * out.certificate.mean[i];
        best = std::max(best, v);
    }
    out.saddle_residual = std::abs(best - out.value);
    return out;
}

WorstCase worst_case_expectation(const StageObjective& obj, const LiftedAmbiguitySet& amb, const numvec& pi,
                                 const lp::LpSolver& solver) {
    require(static_cast<int>(pi.size()) == obj.actions(), ErrorKind::Structural, "policy dimension mismatch");
    double mass = 0.0;
    for (double p : pi) {
        require(p >= -1e-12, ErrorKind::Structural, "policy has a negative entry");
        mass += p;
    }
    require(std::abs(mass - 1.0) <= 1e-9, ErrorKind::Structural, "policy does not sum to one");
    const CompiledLp c = build_srobust_lp(obj, amb, pi);
    const auto sol = solve_checked(solver, c.program, "fixed-policy worst-case subproblem");
    WorstCase out;
    out.value = sol.objective;
    out.certificate = extract_certificate(c, sol, obj, amb, pi, out.value);
    return out;
}

} // namespace drmdp::ref
