#pragma once

#include "drmdp/common.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

/// Dense linear programming kernel.
///
/// Problems are stated as
///
///     min/max  c'x
///     s.t.     a_i'x  (<= | = | >=)  b_i      for every row i
///              lo_j <= x_j <= hi_j            (either bound may be infinite)
///
/// and solved by a two-phase tableau simplex. Optimal solutions carry a full
/// dual solution: one multiplier per row plus the reduced costs
/// z = c - A'y, which act as bound multipliers.
///
/// Dual sign convention (a row's multiplier is the rate at which the optimal
/// objective moves when its right-hand side grows):
///   minimize: y_i >= 0 on >= rows, y_i <= 0 on <= rows
///   maximize: y_i >= 0 on <= rows, y_i <= 0 on >= rows
namespace drmdp::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Le, Eq, Ge };
enum class Objective { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(Status s);

struct Term {
    int var;
    double coef;
};

struct Row {
    std::vector<Term> terms;
    Sense sense = Sense::Le;
    double rhs = 0.0;
    std::string name;
};

struct Variable {
    double lo = 0.0;
    double hi = kInf;
    double cost = 0.0;
    std::string name;
};

class LinearProgram {
public:
    explicit LinearProgram(Objective sense = Objective::Minimize) : sense_(sense) {}

    int add_variable(double lo, double hi, double cost = 0.0, std::string name = {});
    int add_row(std::vector<Term> terms, Sense sense, double rhs, std::string name = {});

    void set_cost(int var, double cost) { vars_.at(var).cost = cost; }
    void set_bounds(int var, double lo, double hi);
    void set_objective(Objective sense) { sense_ = sense; }

    Objective objective() const { return sense_; }
    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    const Variable& var(int j) const { return vars_[j]; }
    const Row& row(int i) const { return rows_[i]; }
    const std::vector<Variable>& vars() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }

    /// Throws ErrorKind::Structural on out-of-range indices, non-finite data
    /// or crossed bounds.
    void check() const;

    /// a_i'x for every row.
    numvec row_activity(const numvec& x) const;

private:
    Objective sense_;
    std::vector<Variable> vars_;
    std::vector<Row> rows_;
};

/// Scaled residuals of an optimal primal/dual pair.
struct Certificates {
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double complementarity = 0.0;
    double duality_gap = 0.0;

    double worst() const;
};

struct LpSolution {
    Status status = Status::NumericalFailure;
    double objective = 0.0;
    numvec primal;
    numvec dual;           ///< one multiplier per row
    numvec reduced_costs;  ///< z = c - A'y
    /// When infeasible: row multipliers u with A'u = 0 over free columns,
    /// sign-compatible with the row senses, and b'u > 0.
    numvec farkas;
    Certificates certificates;
    long iterations = 0;
    std::string message;

    bool optimal() const { return status == Status::Optimal; }
};

struct SimplexOptions {
    double pivot_tol = 1e-7;
    double optimality_tol = 1e-9;
    double feasibility_tol = 1e-9;
    /// Optimal solutions whose worst scaled certificate exceeds this are
    /// reported as NumericalFailure instead.
    double failure_tol = 1e-7;
    /// Iterations per phase before Dantzig pricing gives way to Bland's rule;
    /// 0 means 3 * (rows + cols).
    long bland_after = 0;
    /// Hard pivot cap; 0 means 50 * (rows + cols) + 1000.
    long max_iterations = 0;
};

/// Seam for swapping the LP backend. Implementations must be safe to call
/// concurrently on distinct programs.
class LpSolver {
public:
    virtual ~LpSolver() = default;
    virtual LpSolution solve(const LinearProgram& lp) const = 0;
};

class DenseSimplex final : public LpSolver {
public:
    explicit DenseSimplex(SimplexOptions opts = {}) : opts_(opts) {}
    LpSolution solve(const LinearProgram& lp) const override;

private:
    SimplexOptions opts_;
};

const LpSolver& default_solver();

/// Solves with the bundled simplex.
LpSolution solve_lp(const LinearProgram& lp);

/// Recomputes the certificate residuals of `sol` against `lp`.
Certificates compute_certificates(const LinearProgram& lp, const numvec& x, const numvec& y);

/// Fixed-format MPS export for cross-checking with external solvers.
void write_mps(const LinearProgram& lp, std::ostream& os, std::string_view name = "DRMDP");

} // namespace drmdp::lp
