#include "random_models.hpp"

#include <algorithm>
#include <cmath>

namespace testsupport {

using drmdp::DrMdpModel;
using drmdp::State;
using drmdp::geom::PolyhedralSet;
namespace amb = drmdp::amb;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

numvec random_simplex_point(Rng& rng, int k) {
    std::exponential_distribution<double> e(1.0);
    numvec x(k);
    double s = 0.0;
    for (auto& v : x) s += v = e(rng);
    for (auto& v : x) v /= s;
    return x;
}

amb::FactorMap random_mixing_map(Rng& rng, int actions, int successors, int k) {
    Eigen::MatrixXd P(actions * successors, k);
    for (int a = 0; a < actions; ++a)
        for (int c = 0; c < k; ++c) {
            const auto col = random_simplex_point(rng, successors);
            for (int j = 0; j < successors; ++j) P(a * successors + j, c) = col[j];
        }
    amb::FactorMap fm;
    fm.actions = actions;
    fm.successors = successors;
    fm.P = P;
    fm.p0 = Eigen::VectorXd::Zero(actions * successors);
    fm.R = Eigen::MatrixXd(actions, k);
    for (int a = 0; a < actions; ++a)
        for (int c = 0; c < k; ++c) fm.R(a, c) = uniform(rng, -1.0, 1.0);
    fm.r0 = Eigen::VectorXd(actions);
    for (int a = 0; a < actions; ++a) fm.r0(a) = uniform(rng, -0.5, 0.5);
    return fm;
}

namespace {

std::vector<numvec> samples(Rng& rng, int n, int k) {
    std::vector<numvec> out;
    for (int i = 0; i < n; ++i) out.push_back(random_simplex_point(rng, k));
    return out;
}

/// simplex(k) intersected with a box of half-width r around a simplex point.
PolyhedralSet simplex_patch(const numvec& c, double r) {
    const int k = static_cast<int>(c.size());
    std::vector<drmdp::geom::Halfspace> ineq;
    for (int i = 0; i < k; ++i) {
        numvec a(k, 0.0);
        a[i] = 1.0;
        ineq.push_back({a, c[i] + r});
        a[i] = -1.0;
        ineq.push_back({a, -std::max(0.0, c[i] - r)});
    }
    return PolyhedralSet(k, ineq, {{numvec(k, 1.0), 1.0}});
}

} // namespace

amb::LiftedAmbiguitySet random_ambiguity(Rng& rng, int k, Builder kind) {
    const auto D = PolyhedralSet::simplex(k);
    switch (kind) {
    case Builder::SupportOnly:
        return amb::build_support_only(simplex_patch(random_simplex_point(rng, k), uniform(rng, 0.1, 0.5)));
    case Builder::UncertainMean: {
        const auto c = random_simplex_point(rng, k);
        numvec lo(k), hi(k);
        for (int i = 0; i < k; ++i) {
            lo[i] = std::max(0.0, c[i] - uniform(rng, 0.0, 0.3));
            hi[i] = std::min(1.0, c[i] + uniform(rng, 0.0, 0.3));
        }
        return amb::build_uncertain_mean(D, lo, hi, c, uniform(rng, 0.0, 0.5),
                                         uniform_int(rng, 0, 1) ? amb::Norm::L1 : amb::Norm::LInf);
    }
    case Builder::TotalVariation:
        return amb::build_phi_divergence_tv(samples(rng, uniform_int(rng, 1, 4), k), uniform(rng, 0.0, 1.0));
    case Builder::Wasserstein:
        return amb::build_wasserstein(samples(rng, uniform_int(rng, 1, 4), k), uniform(rng, 0.0, 1.0), D,
                                      uniform_int(rng, 0, 1) ? amb::Norm::L1 : amb::Norm::LInf);
    case Builder::Hybrid: {
        const auto s = samples(rng, uniform_int(rng, 1, 3), k);
        numvec mean(k, 0.0);
        for (const auto& x : s)
            for (int i = 0; i < k; ++i) mean[i] += x[i] / s.size();
        amb::HybridOptions opts;
        opts.mean_lo.resize(k);
        opts.mean_hi.resize(k);
        for (int i = 0; i < k; ++i) {
            opts.mean_lo[i] = std::max(0.0, mean[i] - 0.2);
            opts.mean_hi[i] = std::min(1.0, mean[i] + 0.2);
        }
        opts.mad_bound = uniform(rng, 0.2, 1.0);
        return amb::build_hybrid_wasserstein_mad(s, uniform(rng, 0.1, 1.0), D, amb::Norm::L1, opts);
    }
    case Builder::Mixture: {
        const int n = uniform_int(rng, 1, 3);
        std::vector<amb::MixtureComponent> comps;
        for (int i = 0; i < n; ++i) {
            amb::MixtureComponent c;
            const auto center = random_simplex_point(rng, k);
            c.support = simplex_patch(center, uniform(rng, 0.15, 0.5));
            c.g.push_back(drmdp::geom::PwlConvexFn::l1_distance(center));
            c.g_bound.push_back(uniform(rng, 0.05, 0.5));
            comps.push_back(std::move(c));
        }
        std::vector<drmdp::geom::Halfspace> ineq;
        const double w = 1.0 / n, slack = n > 1 ? 0.5 * w : 0.0;
        for (int i = 0; i < n; ++i) {
            numvec a(n, 0.0);
            a[i] = 1.0;
            ineq.push_back({a, w + slack});
            a[i] = -1.0;
            ineq.push_back({a, -(w - slack)});
        }
        return amb::build_mixture(comps, PolyhedralSet(n, ineq, {{numvec(n, 1.0), 1.0}}));
    }
    }
    return amb::build_support_only(D);
}

DrMdpModel random_staged_model(Rng& rng, int stages, int max_states, int max_actions, int max_k) {
    DrMdpModel m;
    m.horizon = drmdp::Horizon::Finite;
    m.stages = stages;
    m.initial = 0;
    std::vector<std::vector<int>> members(stages);
    for (int t = 1; t <= stages; ++t) {
        const int count = t == 1 ? 1 : uniform_int(rng, 1, max_states);
        for (int i = 0; i < count; ++i) {
            State s;
            s.name = "t" + std::to_string(t) + "_" + std::to_string(i);
            s.stage = t;
            members[t - 1].push_back(m.num_states());
            m.states.push_back(std::move(s));
        }
    }
    int builder = uniform_int(rng, 0, kBuilderCount - 1);
    for (int t = 1; t < stages; ++t)
        for (int s : members[t - 1]) {
            auto& st = m.states[s];
            const int actions = uniform_int(rng, 1, max_actions);
            const int k = uniform_int(rng, 2, max_k);
            for (int a = 0; a < actions; ++a) st.actions.push_back("a" + std::to_string(a));
            st.successors = members[t];
            st.factors = random_mixing_map(rng, actions, static_cast<int>(st.successors.size()), k);
            st.ambiguity = random_ambiguity(rng, k, static_cast<Builder>(builder++ % kBuilderCount));
        }
    m.terminal.assign(m.num_states(), 0.0);
    for (int s : members.back()) m.terminal[s] = uniform(rng, -1.0, 1.0);
    return m;
}

DrMdpModel random_discounted_model(Rng& rng, int states, int max_actions, int max_k, double discount) {
    DrMdpModel m;
    m.horizon = drmdp::Horizon::Infinite;
    m.discount = discount;
    m.initial = 0;
    int builder = uniform_int(rng, 0, kBuilderCount - 1);
    for (int i = 0; i < states; ++i) {
        State st;
        st.name = "s" + std::to_string(i);
        const int actions = uniform_int(rng, 1, max_actions);
        const int k = uniform_int(rng, 2, max_k);
        for (int a = 0; a < actions; ++a) st.actions.push_back("a" + std::to_string(a));
        for (int j = 0; j < states; ++j) st.successors.push_back(j);
        st.factors = random_mixing_map(rng, actions, states, k);
        st.ambiguity = random_ambiguity(rng, k, static_cast<Builder>(builder++ % kBuilderCount));
        m.states.push_back(std::move(st));
    }
    m.terminal.assign(states, 0.0);
    return m;
}

drmdp::ref::StageObjective random_objective(Rng& rng, int actions, int k) {
    numvec v(uniform_int(rng, 1, 3));
    for (auto& x : v) x = uniform(rng, -2.0, 2.0);
    const auto fm = random_mixing_map(rng, actions, static_cast<int>(v.size()), k);
    return drmdp::ref::assemble_stage_objective(v, fm);
}

} // namespace testsupport
