#include "doctest.h"

#include "classical_dp.hpp"
#include "drmdp/dp.hpp"
#include "random_models.hpp"

#include <cmath>

using namespace drmdp;
using amb::FactorMap;
using amb::Norm;
using geom::PolyhedralSet;
using testsupport::Rng;

namespace {

/// Replaces every ambiguity set by the nominal point (its first sample or
/// support center) so the model becomes a classical MDP.
DrMdpModel nominalize(DrMdpModel m, Rng& rng, std::vector<numvec>& xi) {
    xi.assign(m.num_states(), {});
    for (int s = 0; s < m.num_states(); ++s) {
        auto& st = m.states[s];
        if (st.terminal()) continue;
        xi[s] = testsupport::random_simplex_point(rng, st.factors.factor_dim());
        st.ambiguity = amb::build_support_only(PolyhedralSet::point(xi[s]));
    }
    return m;
}

/// Two-state chain with a closed-form fixed point at discount 1/2:
/// v(0) = 1 + v(1)/2, v(1) = (v(0) + v(1))/4, so v = (1.2, 0.4).
DrMdpModel chain_model() {
    DrMdpModel m;
    m.horizon = Horizon::Infinite;
    m.discount = 0.5;
    State a, b;
    a.name = "a";
    a.actions = {"go", "stay"};
    a.successors = {0, 1};
    a.factors = FactorMap::identity(2, 2);
    // xi = (p(go->a), p(go->b), p(stay->a), p(stay->b), r(go), r(stay))
    a.ambiguity = amb::build_support_only(PolyhedralSet::point({0, 1, 1, 0, 1.0, 0.2}));
    b.name = "b";
    b.actions = {"wait"};
    b.successors = {0, 1};
    b.factors = FactorMap::identity(1, 2);
    b.ambiguity = amb::build_support_only(PolyhedralSet::point({0.5, 0.5, 0.0}));
    m.states = {a, b};
    m.terminal = {0, 0};
    return m;
}

double sup_dist(const numvec& a, const numvec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

std::vector<numvec> random_policy(Rng& rng, const DrMdpModel& m) {
    std::vector<numvec> pi(m.num_states());
    for (int s = 0; s < m.num_states(); ++s)
        if (!m.states[s].terminal())
            pi[s] = testsupport::random_simplex_point(rng, static_cast<int>(m.states[s].actions.size()));
    return pi;
}

} // namespace

TEST_CASE("backward induction: singleton ambiguity is classical DP") {
    Rng rng(41);
    for (int inst = 0; inst < 10; ++inst) {
        std::vector<numvec> xi;
        const auto m = nominalize(testsupport::random_staged_model(rng, 4, 3, 3, 3), rng, xi);
        const auto sol = dp::backward_induction(m);
        const auto classical = testsupport::classical_optimum(m, testsupport::freeze(m, xi));
        CHECK(sup_dist(sol.value, classical) <= 1e-9);
    }
}

TEST_CASE("backward induction: two stages is one worst-case backup") {
    Rng rng(42);
    auto m = testsupport::random_staged_model(rng, 2, 3, 3, 3);
    m.terminal.assign(m.num_states(), 0.0);
    const auto sol = dp::backward_induction(m);
    const auto& st = m.states[0];
    const auto obj = ref::assemble_stage_objective(numvec(st.successors.size(), 0.0), st.factors);
    CHECK(sol.value[0] == doctest::Approx(ref::solve_srobust(obj, st.ambiguity).value).epsilon(1e-12));
}

TEST_CASE("backward induction: value is nonincreasing in the wasserstein radius") {
    // Three states per stage over three stages; xi is the distribution of a
    // shock moving the state down, staying or moving up.
    auto build = [](double theta) {
        DrMdpModel m;
        m.horizon = Horizon::Finite;
        m.stages = 3;
        const std::vector<numvec> samples{{0.2, 0.5, 0.3}, {0.1, 0.3, 0.6}, {0.4, 0.4, 0.2}};
        const auto a = amb::build_wasserstein(samples, theta, PolyhedralSet::simplex(3), Norm::L1);
        auto add = [&](const std::string& name, int stage) {
            State s;
            s.name = name;
            s.stage = stage;
            m.states.push_back(s);
            return m.num_states() - 1;
        };
        const int root = add("root", 1);
        std::vector<int> mid{add("lo", 2), add("mid", 2), add("hi", 2)};
        std::vector<int> fin{add("lo_f", 3), add("mid_f", 3), add("hi_f", 3)};
        auto wire = [&](int s, const std::vector<int>& next, double bias) {
            auto& st = m.states[s];
            st.actions = {"safe", "bold"};
            st.successors = next;
            Eigen::MatrixXd P = Eigen::MatrixXd::Zero(6, 3);
            for (int i = 0; i < 3; ++i) P(i, i) = 1;          // safe: shock as drawn
            P(3, 0) = 1; P(4, 1) = 0; P(5, 1) = 1; P(5, 2) = 1; // bold: down or up
            Eigen::MatrixXd R(2, 3);
            R << 0, 0, 0, -1 + bias, 0, 1 + bias;
            Eigen::VectorXd r0(2);
            r0 << 0.1, 0.0;
            st.factors.actions = 2;
            st.factors.successors = 3;
            st.factors.P = P;
            st.factors.p0 = Eigen::VectorXd::Zero(6);
            st.factors.R = R;
            st.factors.r0 = r0;
            st.ambiguity = a;
        };
        wire(root, mid, 0.0);
        for (int i = 0; i < 3; ++i) wire(mid[i], fin, 0.1 * i);
        m.states[root].successors = mid;
        m.terminal = {0, 0, 0, 0, -1, 0, 1};
        return m;
    };
    double prev = 1e9;
    for (double th : {0.0, 0.1, 0.2, 0.5, 1.0, 2.0}) {
        const auto m = build(th);
        REQUIRE(m.validate().structurally_valid());
        const double v = dp::backward_induction(m).initial_value(m);
        CHECK(v <= prev + 1e-7);
        prev = v;
    }
}

TEST_CASE("bellman operator: zero values with singleton ambiguity give the best reward") {
    const auto m = chain_model();
    const auto Lv = dp::bellman_operator(m, {0.0, 0.0});
    CHECK(Lv[0] == doctest::Approx(1.0));
    CHECK(Lv[1] == doctest::Approx(0.0));
}

TEST_CASE("bellman operator: contraction and monotonicity") {
    Rng rng(43);
    for (double gamma : {0.5, 0.9}) {
        const auto m = testsupport::random_discounted_model(rng, 4, 3, 3, gamma);
        for (int t = 0; t < 100; ++t) {
            numvec v1(4), v2(4);
            for (int s = 0; s < 4; ++s) {
                v1[s] = testsupport::uniform(rng, -5, 5);
                v2[s] = testsupport::uniform(rng, -5, 5);
            }
            const auto L1 = dp::bellman_operator(m, v1);
            const auto L2 = dp::bellman_operator(m, v2);
            CHECK(sup_dist(L1, L2) <= gamma * sup_dist(v1, v2) + 1e-9);

            numvec hi = v1;
            for (auto& x : hi) x += testsupport::uniform(rng, 0, 2);
            const auto Lhi = dp::bellman_operator(m, hi);
            for (int s = 0; s < 4; ++s) CHECK(L1[s] <= Lhi[s] + 1e-9);
        }
    }
}

TEST_CASE("value iteration: closed-form chain") {
    const auto m = chain_model();
    const double eps = 1e-8;
    const auto sol = dp::value_iteration(m, eps);
    CHECK(std::abs(sol.value[0] - 1.2) <= eps);
    CHECK(std::abs(sol.value[1] - 0.4) <= eps);
    CHECK(sol.policy[0][0] == doctest::Approx(1.0));
}

TEST_CASE("value iteration: initialization does not matter") {
    Rng rng(44);
    const double eps = 1e-6;
    for (int inst = 0; inst < 3; ++inst) {
        const auto m = testsupport::random_discounted_model(rng, 4, 3, 3, 0.8);
        const auto a = dp::value_iteration(m, eps);
        const double rmax = 3.0;
        const auto b = dp::value_iteration(m, eps, numvec(4, rmax / (1 - m.discount)));
        CHECK(sup_dist(a.value, b.value) <= 2 * eps);
        CHECK(a.stationarity_residual <= 1e-8);
        CHECK(b.stationarity_residual <= 1e-8);
    }
}

TEST_CASE("value iteration: halving epsilon adds about log 2 / log(1/gamma) sweeps") {
    const auto m = chain_model();
    const auto a = dp::value_iteration(m, 1e-6);
    const auto b = dp::value_iteration(m, 0.5e-6);
    const double expected = std::log(2.0) / std::log(1.0 / m.discount);
    CHECK(std::abs((b.iterations - a.iterations) - expected) <= 1.0);
}

TEST_CASE("value iteration: iteration cap is an explicit error") {
    const auto m = chain_model();
    dp::DpOptions opts;
    opts.max_iterations = 3;
    try {
        dp::value_iteration(m, 1e-12, {}, opts);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Convergence);
    }
}

TEST_CASE("policy evaluation: consistency, optimality and the classical case") {
    Rng rng(45);
    for (int inst = 0; inst < 6; ++inst) {
        const auto m = testsupport::random_staged_model(rng, 3, 3, 3, 3);
        const auto sol = dp::backward_induction(m);
        const auto v = dp::evaluate_policy_worst_case(m, sol.policy);
        CHECK(sup_dist(v, sol.value) <= 1e-7);
        for (int t = 0; t < 5; ++t) {
            const auto alt = dp::evaluate_policy_worst_case(m, random_policy(rng, m));
            for (int s = 0; s < m.num_states(); ++s) CHECK(alt[s] <= sol.value[s] + 1e-7);
        }

        std::vector<numvec> xi;
        const auto nominal = nominalize(m, rng, xi);
        const auto pi = random_policy(rng, nominal);
        const auto robust = dp::evaluate_policy_worst_case(nominal, pi);
        const auto classical = testsupport::classical_policy_value(nominal, testsupport::freeze(nominal, xi), pi);
        CHECK(sup_dist(robust, classical) <= 1e-9);
    }
}

TEST_CASE("saddle property: the certificate MDP has the robust value as its optimum") {
    Rng rng(46);
    for (int inst = 0; inst < 6; ++inst) {
        const auto m = testsupport::random_staged_model(rng, 4, 3, 3, 3);
        const auto sol = dp::backward_induction(m);
        std::vector<numvec> xi(m.num_states());
        for (int s = 0; s < m.num_states(); ++s)
            if (!m.states[s].terminal()) xi[s] = sol.certificates[s].mean;
        const auto classical = testsupport::classical_optimum(m, testsupport::freeze(m, xi));
        CHECK(std::abs(classical[m.initial] - sol.initial_value(m)) <= 1e-5);
    }
}

TEST_CASE("nested ambiguity sets order the values") {
    Rng rng(47);
    for (int inst = 0; inst < 4; ++inst) {
        auto small = testsupport::random_staged_model(rng, 3, 3, 2, 3);
        auto large = small;
        for (int s = 0; s < small.num_states(); ++s) {
            auto& st = small.states[s];
            if (st.terminal()) continue;
            const int k = st.factors.factor_dim();
            std::vector<numvec> samples{testsupport::random_simplex_point(rng, k), testsupport::random_simplex_point(rng, k)};
            st.ambiguity = amb::build_wasserstein(samples, 0.1, PolyhedralSet::simplex(k), Norm::L1);
            large.states[s].ambiguity = amb::build_wasserstein(samples, 0.4, PolyhedralSet::simplex(k), Norm::L1);
        }
        const auto vs = dp::backward_induction(small).value;
        const auto vl = dp::backward_induction(large).value;
        for (int s = 0; s < small.num_states(); ++s) CHECK(vl[s] <= vs[s] + 1e-7);
    }
}

TEST_CASE("policies are distributions and threads do not change results") {
    Rng rng(48);
    const auto m = testsupport::random_staged_model(rng, 4, 4, 3, 3);
    const auto a = dp::backward_induction(m);
    dp::DpOptions opts;
    opts.threads = 3;
    const auto b = dp::backward_induction(m, opts);
    CHECK(a.value == b.value);
    for (int s = 0; s < m.num_states(); ++s) {
        if (m.states[s].terminal()) continue;
        double mass = 0.0;
        for (double p : a.policy[s]) {
            CHECK(p >= 0.0);
            mass += p;
        }
        CHECK(std::abs(mass - 1.0) <= 1e-9);
    }
}

TEST_CASE("invalid models are refused with the failing checks") {
    Rng rng(49);
    auto m = testsupport::random_staged_model(rng, 3, 2, 2, 2);
    m.states[1].stage = 1;
    try {
        dp::backward_induction(m);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        CHECK(std::string(e.what()).find("stage") != std::string::npos);
    }
    auto inf = chain_model();
    inf.discount = 1.0;
    CHECK_THROWS_AS(dp::value_iteration(inf, 1e-6), Error);
}

TEST_CASE("stationary descriptions expand into staged copies") {
    StationaryDescription d;
    const auto c = chain_model();
    d.states = c.states;
    d.terminal = {1.0, 2.0};
    d.periods = 3;
    d.initial = 0;
    const auto m = expand_stationary(d);
    CHECK(m.stages == 4);
    CHECK(m.states[m.initial].name == "a@1");
    CHECK(m.validate().structurally_valid());
    const auto stages = m.stage_members();
    CHECK(stages[0].size() == 1);
    CHECK(stages[1].size() == 2);
    for (int s : stages.back()) CHECK(m.terminal[s] == (m.states[s].name[0] == 'a' ? 1.0 : 2.0));
}
