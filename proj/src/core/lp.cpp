#include "drmdp/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace drmdp::lp {

const char* to_string(Status s) {
    switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::NumericalFailure: return "numerical failure";
    }
    return "?";
}

int LinearProgram::add_variable(double lo, double hi, double cost, std::string name) {
    vars_.push_back(Variable{lo, hi, cost, std::move(name)});
    return num_vars() - 1;
}

int LinearProgram::add_row(std::vector<Term> terms, Sense sense, double rhs, std::string name) {
    rows_.push_back(Row{std::move(terms), sense, rhs, std::move(name)});
    return num_rows() - 1;
}

void LinearProgram::set_bounds(int var, double lo, double hi) {
    auto& v = vars_.at(var);
    v.lo = lo;
    v.hi = hi;
}

void LinearProgram::check() const {
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        const auto& v = vars_[j];
        require(!std::isnan(v.lo) && !std::isnan(v.hi) && v.lo <= v.hi, ErrorKind::Structural,
                "LP variable " + std::to_string(j) + " has invalid bounds");
        require(v.lo < kInf && v.hi > -kInf, ErrorKind::Structural,
                "LP variable " + std::to_string(j) + " has an empty bound interval");
        require(std::isfinite(v.cost), ErrorKind::Structural,
                "LP variable " + std::to_string(j) + " has a non-finite cost");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        require(std::isfinite(r.rhs), ErrorKind::Structural,
                "LP row " + std::to_string(i) + " has a non-finite right-hand side");
        for (const auto& t : r.terms) {
            require(t.var >= 0 && t.var < num_vars(), ErrorKind::Structural,
                    "LP row " + std::to_string(i) + " references unknown variable");
            require(std::isfinite(t.coef), ErrorKind::Structural,
                    "LP row " + std::to_string(i) + " has a non-finite coefficient");
        }
    }
}

numvec LinearProgram::row_activity(const numvec& x) const {
    numvec act(rows_.size(), 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
        for (const auto& t : rows_[i].terms) act[i] += t.coef * x[t.var];
    return act;
}

double Certificates::worst() const {
    return std::max({primal_residual, dual_residual, complementarity, duality_gap});
}

Certificates compute_certificates(const LinearProgram& lp, const numvec& x, const numvec& y) {
    Certificates cert;
    const double sigma = lp.objective() == Objective::Minimize ? 1.0 : -1.0;
    const numvec act = lp.row_activity(x);

    double primal_obj = 0.0;
    for (int j = 0; j < lp.num_vars(); ++j) primal_obj += lp.var(j).cost * x[j];

    // z = c - A'y
    numvec z(lp.num_vars());
    for (int j = 0; j < lp.num_vars(); ++j) z[j] = lp.var(j).cost;
    for (int i = 0; i < lp.num_rows(); ++i)
        for (const auto& t : lp.row(i).terms) z[t.var] -= t.coef * y[i];

    const double obj_scale = 1.0 + std::abs(primal_obj);
    double dual_obj = 0.0;
    for (int i = 0; i < lp.num_rows(); ++i) {
        const Row& r = lp.row(i);
        const double scale = 1.0 + std::abs(r.rhs);
        const double diff = act[i] - r.rhs;
        double viol = 0.0;
        double ysign_viol = 0.0;
        const double ym = sigma * y[i]; // minimize convention
        switch (r.sense) {
        case Sense::Le:
            viol = std::max(0.0, diff);
            ysign_viol = std::max(0.0, ym);
            break;
        case Sense::Ge:
            viol = std::max(0.0, -diff);
            ysign_viol = std::max(0.0, -ym);
            break;
        case Sense::Eq: viol = std::abs(diff); break;
        }
        cert.primal_residual = std::max(cert.primal_residual, viol / scale);
        cert.dual_residual = std::max(cert.dual_residual, ysign_viol);
        if (r.sense != Sense::Eq)
            cert.complementarity =
                std::max(cert.complementarity, std::abs(y[i]) * std::abs(diff) / obj_scale);
        dual_obj += r.rhs * y[i];
    }

    double bound_term = 0.0;
    for (int j = 0; j < lp.num_vars(); ++j) {
        const Variable& v = lp.var(j);
        const double lo_viol = std::isfinite(v.lo) ? std::max(0.0, v.lo - x[j]) / (1.0 + std::abs(v.lo)) : 0.0;
        const double hi_viol = std::isfinite(v.hi) ? std::max(0.0, x[j] - v.hi) / (1.0 + std::abs(v.hi)) : 0.0;
        cert.primal_residual = std::max({cert.primal_residual, lo_viol, hi_viol});

        const double zz = sigma * z[j];
        const double cscale = 1.0 + std::abs(v.cost);
        if (zz > 0.0) {
            if (std::isfinite(v.lo)) {
                bound_term += zz * v.lo;
                cert.complementarity = std::max(cert.complementarity, zz * std::abs(x[j] - v.lo) / obj_scale);
            } else {
                cert.dual_residual = std::max(cert.dual_residual, zz / cscale);
            }
        } else if (zz < 0.0) {
            if (std::isfinite(v.hi)) {
                bound_term += zz * v.hi;
                cert.complementarity = std::max(cert.complementarity, -zz * std::abs(v.hi - x[j]) / obj_scale);
            } else {
                cert.dual_residual = std::max(cert.dual_residual, -zz / cscale);
            }
        }
    }
    dual_obj += sigma * bound_term;
    cert.duality_gap = std::abs(primal_obj - dual_obj) / obj_scale;
    return cert;
}

namespace {

enum class ColKind { Lower, Upper, Free, Fixed };

constexpr double kRayTol = 1e-11;

struct ColMap {
    ColKind kind;
    int col = -1;  // first standard-form column
    double base = 0.0;
};

/// Two-phase tableau simplex over the standard form  S x = rhs, x >= 0.
/// Artificial columns are implicit: the initial basic variable of row i is
/// either its +1 slack or an artificial that is never allowed to re-enter.
class Tableau {
public:
    Tableau(int m, int ncols, const SimplexOptions& opts)
        : m_(m), ncols_(ncols), width_(ncols + 1), opts_(opts), t_(static_cast<std::size_t>(m) * width_, 0.0),
          d_(width_, 0.0), basis_(m, -1) {}

    double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * width_ + j]; }
    double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * width_ + j]; }
    double& rhs(int i) { return at(i, ncols_); }
    double rhs(int i) const { return at(i, ncols_); }
    std::vector<int>& basis() { return basis_; }
    numvec& reduced() { return d_; }
    long iterations() const { return iterations_; }

    static bool is_artificial(int b) { return b < 0; }

    enum class Outcome { Optimal, Unbounded, IterationCap };

    void start_phase() { phase_iters_ = 0; }

    Outcome run(bool phase_one, long bland_after, long max_total) {
        // Columns whose only positive entries are below the pivot tolerance
        // are skipped until the next pivot rather than read as a ray.
        std::vector<char> rejected(ncols_, 0);
        for (;;) {
            if (iterations_ >= max_total) return Outcome::IterationCap;
            const bool bland = phase_iters_ >= bland_after;
            int q = -1;
            if (bland) {
                for (int j = 0; j < ncols_; ++j)
                    if (!rejected[j] && d_[j] < -opts_.optimality_tol) {
                        q = j;
                        break;
                    }
            } else {
                double best = -opts_.optimality_tol;
                for (int j = 0; j < ncols_; ++j)
                    if (!rejected[j] && d_[j] < best) {
                        best = d_[j];
                        q = j;
                    }
            }
            if (q < 0) return Outcome::Optimal;

            int r = -1;
            double best_ratio = kInf;
            double best_piv = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double a = at(i, q);
                if (a <= opts_.pivot_tol) continue;
                const double ratio = std::max(rhs(i), 0.0) / a;
                const double tie = 1e-12 * (1.0 + std::abs(best_ratio == kInf ? ratio : best_ratio));
                bool take = false;
                if (r < 0 || ratio < best_ratio - tie) {
                    take = true;
                } else if (std::abs(ratio - best_ratio) <= tie) {
                    const bool art_i = is_artificial(basis_[i]);
                    const bool art_r = is_artificial(basis_[r]);
                    if (phase_one && art_i != art_r) {
                        take = art_i;
                    } else if (bland) {
                        take = order_key(basis_[i]) < order_key(basis_[r]);
                    } else {
                        take = a > best_piv;
                    }
                }
                if (take) {
                    r = i;
                    best_ratio = ratio;
                    best_piv = a;
                }
            }
            if (r < 0) {
                double top = 0.0;
                for (int i = 0; i < m_; ++i) top = std::max(top, at(i, q));
                // The artificial sum is bounded below, so phase one never has a ray.
                if (!phase_one && top <= kRayTol) return Outcome::Unbounded;
                rejected[q] = 1;
                continue;
            }
            std::fill(rejected.begin(), rejected.end(), 0);
            pivot(r, q);
            ++phase_iters_;
            ++iterations_;
        }
    }

    void pivot(int r, int q) {
        double* pr = &t_[static_cast<std::size_t>(r) * width_];
        const double inv = 1.0 / pr[q];
        nz_.clear();
        for (int k = 0; k < width_; ++k) {
            if (pr[k] != 0.0) {
                pr[k] *= inv;
                nz_.push_back(k);
            }
        }
        pr[q] = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row = &t_[static_cast<std::size_t>(i) * width_];
            const double f = row[q];
            if (f == 0.0) continue;
            for (int k : nz_) row[k] -= f * pr[k];
            row[q] = 0.0;
        }
        const double f = d_[q];
        if (f != 0.0) {
            for (int k : nz_) d_[k] -= f * pr[k];
            d_[q] = 0.0;
        }
        basis_[r] = q;
    }

    /// Rebuilds every row and the reduced costs from the original matrix
    /// and the current basis, discarding accumulated round-off.
    bool reinvert(const Eigen::MatrixXd& S, const Eigen::VectorXd& rhs, const Eigen::VectorXd& cost, bool phase_one) {
        Eigen::MatrixXd B(m_, m_);
        Eigen::VectorXd cb(m_);
        for (int r = 0; r < m_; ++r) {
            const int b = basis_[r];
            if (is_artificial(b)) {
                B.col(r).setZero();
                B(-b - 1, r) = 1.0;
                cb(r) = phase_one ? 1.0 : 0.0;
            } else {
                B.col(r) = S.col(b);
                cb(r) = phase_one ? 0.0 : cost(b);
            }
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        if (!lu.isInvertible()) return false;
        Eigen::MatrixXd full(m_, width_);
        full << S, rhs;
        const Eigen::MatrixXd T = lu.solve(full);
        for (int i = 0; i < m_; ++i)
            for (int k = 0; k < width_; ++k) at(i, k) = std::abs(T(i, k)) < 1e-14 ? 0.0 : T(i, k);
        for (int r = 0; r < m_; ++r)
            if (!is_artificial(basis_[r])) {
                for (int i = 0; i < m_; ++i) at(i, basis_[r]) = i == r ? 1.0 : 0.0;
            }
        const Eigen::RowVectorXd dd = -(cb.transpose() * T);
        for (int k = 0; k < width_; ++k) d_[k] = dd(k) + (!phase_one && k < ncols_ ? cost(k) : 0.0);
        for (int r = 0; r < m_; ++r)
            if (!is_artificial(basis_[r])) d_[basis_[r]] = 0.0;
        return true;
    }

private:
    int order_key(int b) const { return b < 0 ? ncols_ + (-b - 1) : b; }

    int m_, ncols_, width_;
    SimplexOptions opts_;
    numvec t_;
    numvec d_;
    std::vector<int> basis_;
    std::vector<int> nz_;
    long iterations_ = 0;
    long phase_iters_ = 0;
};

} // namespace

namespace {

LpSolution solve_once(const LinearProgram& lp, const SimplexOptions& opts) {
    lp.check();
    LpSolution sol;
    const int n = lp.num_vars();
    const int m_orig = lp.num_rows();
    const double objsign = lp.objective() == Objective::Minimize ? 1.0 : -1.0;

    // Map original variables to nonnegative standard-form columns.
    std::vector<ColMap> cmap(n);
    int nstruct = 0;
    std::vector<int> bounded; // original vars needing an upper-bound row
    for (int j = 0; j < n; ++j) {
        const Variable& v = lp.var(j);
        const bool flo = std::isfinite(v.lo), fhi = std::isfinite(v.hi);
        if (flo && fhi && v.lo == v.hi) {
            cmap[j] = {ColKind::Fixed, -1, v.lo};
        } else if (flo) {
            cmap[j] = {ColKind::Lower, nstruct++, v.lo};
            if (fhi) bounded.push_back(j);
        } else if (fhi) {
            cmap[j] = {ColKind::Upper, nstruct++, v.hi};
        } else {
            cmap[j] = {ColKind::Free, nstruct, 0.0};
            nstruct += 2;
        }
    }

    const int m = m_orig + static_cast<int>(bounded.size());
    int nslack = static_cast<int>(bounded.size());
    for (const auto& r : lp.rows())
        if (r.sense != Sense::Eq) ++nslack;
    const int ncols = nstruct + nslack;

    // Dense standard-form matrix, kept for the final dual solve.
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, ncols);
    Eigen::VectorXd rhs(m);
    std::vector<double> rowsign(m, 1.0);
    std::vector<int> slack_of_row(m, -1);
    int next_slack = nstruct;
    for (int i = 0; i < m_orig; ++i) {
        const Row& r = lp.row(i);
        double b = r.rhs;
        for (const auto& t : r.terms) {
            const ColMap& cm = cmap[t.var];
            switch (cm.kind) {
            case ColKind::Fixed: b -= t.coef * cm.base; break;
            case ColKind::Lower:
                b -= t.coef * cm.base;
                S(i, cm.col) += t.coef;
                break;
            case ColKind::Upper:
                b -= t.coef * cm.base;
                S(i, cm.col) -= t.coef;
                break;
            case ColKind::Free:
                S(i, cm.col) += t.coef;
                S(i, cm.col + 1) -= t.coef;
                break;
            }
        }
        if (r.sense != Sense::Eq) {
            slack_of_row[i] = next_slack;
            S(i, next_slack++) = r.sense == Sense::Le ? 1.0 : -1.0;
        }
        rhs(i) = b;
    }
    for (std::size_t k = 0; k < bounded.size(); ++k) {
        const int i = m_orig + static_cast<int>(k);
        const Variable& v = lp.var(bounded[k]);
        S(i, cmap[bounded[k]].col) = 1.0;
        slack_of_row[i] = next_slack;
        S(i, next_slack++) = 1.0;
        rhs(i) = v.hi - v.lo;
    }
    for (int i = 0; i < m; ++i) {
        if (rhs(i) < 0.0) {
            rowsign[i] = -1.0;
            S.row(i) *= -1.0;
            rhs(i) = -rhs(i);
        }
    }

    Eigen::VectorXd cstd = Eigen::VectorXd::Zero(ncols);
    for (int j = 0; j < n; ++j) {
        const double c = objsign * lp.var(j).cost;
        const ColMap& cm = cmap[j];
        switch (cm.kind) {
        case ColKind::Fixed: break;
        case ColKind::Lower: cstd(cm.col) = c; break;
        case ColKind::Upper: cstd(cm.col) = -c; break;
        case ColKind::Free:
            cstd(cm.col) = c;
            cstd(cm.col + 1) = -c;
            break;
        }
    }

    Tableau tab(m, ncols, opts);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < ncols; ++j) tab.at(i, j) = S(i, j);
        tab.rhs(i) = rhs(i);
        const int s = slack_of_row[i];
        tab.basis()[i] = (s >= 0 && S(i, s) > 0.0) ? s : -1 - i;
    }

    const long dims = static_cast<long>(m) + ncols;
    const long bland_after = opts.bland_after > 0 ? opts.bland_after : 3 * dims;
    const long max_total = opts.max_iterations > 0 ? opts.max_iterations : 50 * dims + 1000;
    const double bnorm = m > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0;

    auto solve_duals = [&](const Eigen::VectorXd& cost_b) {
        Eigen::MatrixXd B(m, m);
        for (int r = 0; r < m; ++r) {
            const int b = tab.basis()[r];
            if (Tableau::is_artificial(b)) {
                B.col(r).setZero();
                B(-b - 1, r) = 1.0;
            } else {
                B.col(r) = S.col(b);
            }
        }
        Eigen::VectorXd y = B.transpose().partialPivLu().solve(cost_b);
        return y;
    };

    // Tableau drift is repaired on demand: a ratio test that finds no row,
    // or final certificates that fail, trigger a rebuild of the tableau from
    // the original data before the outcome is believed.
    constexpr int kMaxReinversions = 3;
    auto drive = [&](bool phase_one) {
        tab.start_phase();
        auto outcome = tab.run(phase_one, bland_after, max_total);
        for (int k = 0; k < kMaxReinversions && outcome == Tableau::Outcome::Unbounded; ++k) {
            if (!tab.reinvert(S, rhs, cstd, phase_one)) break;
            outcome = tab.run(phase_one, bland_after, max_total);
        }
        return outcome;
    };

    // Phase one: drive the artificial sum to zero.
    bool any_artificial = false;
    {
        numvec& d = tab.reduced();
        std::fill(d.begin(), d.end(), 0.0);
        for (int i = 0; i < m; ++i) {
            if (!Tableau::is_artificial(tab.basis()[i])) continue;
            any_artificial = true;
            for (int j = 0; j <= ncols; ++j) d[j] -= tab.at(i, j);
        }
    }
    if (any_artificial) {
        const auto outcome = drive(true);
        sol.iterations = tab.iterations();
        if (outcome != Tableau::Outcome::Optimal) {
            sol.status = Status::NumericalFailure;
            sol.message = "phase one did not terminate";
            return sol;
        }
        double infeas = 0.0;
        for (int i = 0; i < m; ++i)
            if (Tableau::is_artificial(tab.basis()[i])) infeas += std::max(tab.rhs(i), 0.0);
        if (infeas > opts.feasibility_tol * (1.0 + bnorm)) {
            Eigen::VectorXd c1(m);
            for (int r = 0; r < m; ++r) c1(r) = Tableau::is_artificial(tab.basis()[r]) ? 1.0 : 0.0;
            const Eigen::VectorXd y1 = solve_duals(c1);
            sol.status = Status::Infeasible;
            sol.farkas.assign(m_orig, 0.0);
            for (int i = 0; i < m_orig; ++i) sol.farkas[i] = rowsign[i] * y1(i);
            sol.message = "phase one optimum " + std::to_string(infeas);
            return sol;
        }
        // Pivot remaining zero-level artificials out where possible; rows that
        // admit no pivot are redundant and keep their artificial at zero.
        for (int i = 0; i < m; ++i) {
            if (!Tableau::is_artificial(tab.basis()[i])) continue;
            int q = -1;
            double best = opts.pivot_tol;
            for (int j = 0; j < ncols; ++j) {
                const double a = std::abs(tab.at(i, j));
                if (a > best) {
                    best = a;
                    q = j;
                }
            }
            if (q >= 0) {
                tab.rhs(i) = 0.0;
                tab.pivot(i, q);
            }
        }
    }

    // Phase two.
    {
        numvec& d = tab.reduced();
        for (int j = 0; j < ncols; ++j) d[j] = cstd(j);
        d[ncols] = 0.0;
        for (int i = 0; i < m; ++i) {
            const int b = tab.basis()[i];
            if (Tableau::is_artificial(b)) continue;
            const double cb = cstd(b);
            if (cb == 0.0) continue;
            for (int j = 0; j <= ncols; ++j) d[j] -= cb * tab.at(i, j);
        }
    }
    for (int attempt = 0;; ++attempt) {
        const auto outcome = drive(false);
        sol.iterations = tab.iterations();
        if (outcome == Tableau::Outcome::IterationCap) {
            sol.status = Status::NumericalFailure;
            sol.message = "pivot cap reached";
            return sol;
        }
        if (outcome == Tableau::Outcome::Unbounded) {
            sol.status = Status::Unbounded;
            return sol;
        }

        numvec xs(ncols, 0.0);
        for (int i = 0; i < m; ++i) {
            const int b = tab.basis()[i];
            if (!Tableau::is_artificial(b)) xs[b] = std::max(tab.rhs(i), 0.0);
        }
        sol.primal.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            const ColMap& cm = cmap[j];
            switch (cm.kind) {
            case ColKind::Fixed: sol.primal[j] = cm.base; break;
            case ColKind::Lower: sol.primal[j] = cm.base + xs[cm.col]; break;
            case ColKind::Upper: sol.primal[j] = cm.base - xs[cm.col]; break;
            case ColKind::Free: sol.primal[j] = xs[cm.col] - xs[cm.col + 1]; break;
            }
        }

        Eigen::VectorXd cb(m);
        for (int r = 0; r < m; ++r) {
            const int b = tab.basis()[r];
            cb(r) = Tableau::is_artificial(b) ? 0.0 : cstd(b);
        }
        const Eigen::VectorXd y = solve_duals(cb);
        sol.dual.assign(m_orig, 0.0);
        for (int i = 0; i < m_orig; ++i) sol.dual[i] = objsign * rowsign[i] * y(i);

        sol.reduced_costs.assign(n, 0.0);
        for (int j = 0; j < n; ++j) sol.reduced_costs[j] = lp.var(j).cost;
        for (int i = 0; i < m_orig; ++i)
            for (const auto& t : lp.row(i).terms) sol.reduced_costs[t.var] -= t.coef * sol.dual[i];

        sol.objective = 0.0;
        for (int j = 0; j < n; ++j) sol.objective += lp.var(j).cost * sol.primal[j];
        sol.certificates = compute_certificates(lp, sol.primal, sol.dual);
        if (sol.certificates.worst() <= opts.failure_tol) break;
        if (attempt == kMaxReinversions || !tab.reinvert(S, rhs, cstd, false)) {
            sol.status = Status::NumericalFailure;
            std::ostringstream os;
            os << "certificate residual " << sol.certificates.worst() << " exceeds tolerance";
            sol.message = os.str();
            return sol;
        }
    }
    sol.status = Status::Optimal;
    return sol;
}

} // namespace

LpSolution DenseSimplex::solve(const LinearProgram& lp) const {
    lp.check();
    auto sol = solve_once(lp, opts_);
    if (sol.status != Status::NumericalFailure) return sol;
    // Degenerate programs occasionally pivot on noise; one retry with a
    // coarser pivot threshold usually finds a clean basis.
    SimplexOptions coarse = opts_;
    coarse.pivot_tol = std::max(opts_.pivot_tol * 100.0, 1e-5);
    auto retry = solve_once(lp, coarse);
    if (retry.status == Status::NumericalFailure) retry.message = sol.message + "; retry: " + retry.message;
    return retry;
}

const LpSolver& default_solver() {
    static const DenseSimplex solver;
    return solver;
}

LpSolution solve_lp(const LinearProgram& lp) { return default_solver().solve(lp); }

} // namespace drmdp::lp
