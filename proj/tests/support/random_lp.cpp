#include "random_lp.hpp"

#include <algorithm>
#include <limits>

namespace testsupport {

using drmdp::numvec;
namespace lp = drmdp::lp;
using drmdp::geom::Halfspace;

RandomLp random_bounded_lp(std::mt19937_64& rng, int max_vars) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = std::uniform_int_distribution<int>(1, max_vars)(rng);
    const int m = std::uniform_int_distribution<int>(1, 6)(rng);
    const bool maximize = rng() % 2;
    RandomLp out{lp::LinearProgram(maximize ? lp::Objective::Maximize : lp::Objective::Minimize), {}, {}};
    std::vector<Halfspace> ineq, eq;
    for (int j = 0; j < n; ++j) {
        // Mix of nonnegative and sign-free (but finitely boxed) variables.
        const double hi = 1.0 + 2.0 * (u(rng) + 1.0);
        const double lo = rng() % 3 == 0 ? -hi : 0.0;
        const double c = u(rng) * 3.0;
        out.program.add_variable(lo, hi, c);
        out.cost.push_back(c);
        numvec a(n, 0.0);
        a[j] = 1.0;
        ineq.push_back({a, hi});
        a[j] = -1.0;
        ineq.push_back({a, -lo});
    }
    // Every row is satisfied at x = 0.
    for (int i = 0; i < m; ++i) {
        numvec a(n);
        std::vector<lp::Term> terms;
        for (int j = 0; j < n; ++j) {
            a[j] = rng() % 4 == 0 ? 0.0 : u(rng);
            if (a[j] != 0.0) terms.push_back({j, a[j]});
        }
        const int kind = static_cast<int>(rng() % 5);
        if (kind == 0) {
            out.program.add_row(terms, lp::Sense::Eq, 0.0);
            eq.push_back({a, 0.0});
        } else if (kind == 1) {
            const double b = -(u(rng) + 1.0);
            out.program.add_row(terms, lp::Sense::Ge, b);
            numvec na = a;
            for (auto& x : na) x = -x;
            ineq.push_back({na, -b});
        } else {
            const double b = u(rng) + 1.5;
            out.program.add_row(terms, lp::Sense::Le, b);
            ineq.push_back({a, b});
        }
    }
    out.region = drmdp::geom::PolyhedralSet(n, ineq, eq);
    return out;
}

double vertex_optimum(const RandomLp& r) {
    const auto verts = drmdp::geom::enumerate_vertices(r.region);
    const bool maximize = r.program.objective() == lp::Objective::Maximize;
    double best = maximize ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (const auto& v : verts.vertices) {
        double val = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) val += r.cost[j] * v[j];
        best = maximize ? std::max(best, val) : std::min(best, val);
    }
    return best;
}

} // namespace testsupport
