#include "drmdp/dp.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace drmdp::dp {

namespace {

const lp::LpSolver& solver_of(const DpOptions& opts) {
    return opts.solver ? *opts.solver : lp::default_solver();
}

std::string context(const DrMdpModel& m, int s) {
    const auto& st = m.states[s];
    if (m.horizon == Horizon::Finite) return "stage " + std::to_string(st.stage) + " state " + st.name;
    return "state " + st.name;
}

template <class F>
auto with_context(const DrMdpModel& m, int s, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.kind(), context(m, s) + ": " + e.what());
    }
}

void require_model(const DrMdpModel& m, Horizon h, bool full = true) {
    require(m.horizon == h, ErrorKind::Structural,
            h == Horizon::Finite ? "operation needs a finite-horizon model" : "operation needs an infinite-horizon model");
    if (!full) return;
    const auto rep = m.validate();
    if (rep.structurally_valid()) return;
    std::string msg = "model failed validation";
    for (const auto& c : rep.checks)
        if (!c.passed && !c.surrogate) msg += "; " + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")");
    fail(ErrorKind::Validation, msg);
}

void dump_state(const DrMdpModel& m, int s, const ref::StageObjective& obj, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::string name = m.states[s].name;
    for (char& ch : name)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
    const std::string file = (m.horizon == Horizon::Finite ? "stage" + std::to_string(m.states[s].stage) + "_" : "") +
                             "state" + std::to_string(s) + "_" + name + ".mps";
    std::ofstream os(std::filesystem::path(dir) / file);
    require(static_cast<bool>(os), ErrorKind::Structural, "cannot write " + file);
    lp::write_mps(ref::build_srobust_lp(obj, m.states[s].ambiguity).program, os, name.substr(0, 8));
}

void backup_state(const DrMdpModel& m, int s, const numvec& v, const DpOptions& opts, DpSolution& out,
                  numvec& target) {
    with_context(m, s, [&] {
        const auto& st = m.states[s];
        const auto obj = ref::assemble_stage_objective(successor_values(m, s, v), st.factors, m.continuation());
        const auto sol = ref::solve_srobust(obj, st.ambiguity, solver_of(opts));
        target[s] = sol.value;
        out.policy[s] = sol.policy;
        out.certificates[s] = sol.certificate;
        out.saddle_residual[s] = sol.saddle_residual;
        return 0;
    });
}

void prepare(DpSolution& out, int S) {
    out.value.assign(S, 0.0);
    out.policy.assign(S, {});
    out.certificates.assign(S, {});
    out.saddle_residual.assign(S, 0.0);
}

double sup_distance(const numvec& a, const numvec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

void dump_all(const DrMdpModel& m, const numvec& v, const std::string& dir, const std::vector<int>& which) {
    for (int s : which) {
        const auto& st = m.states[s];
        if (st.terminal()) continue;
        dump_state(m, s, ref::assemble_stage_objective(successor_values(m, s, v), st.factors, m.continuation()), dir);
    }
}

} // namespace

double DpSolution::max_saddle_residual() const {
    double r = 0.0;
    for (double x : saddle_residual) r = std::max(r, x);
    return r;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min(threads, n);
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

numvec successor_values(const DrMdpModel& model, int s, const numvec& v) {
    const auto& succ = model.states[s].successors;
    numvec out(succ.size());
    for (std::size_t i = 0; i < succ.size(); ++i) out[i] = v[succ[i]];
    return out;
}

DpSolution backward_induction(const DrMdpModel& model, const DpOptions& opts) {
    require_model(model, Horizon::Finite, opts.validate);
    const int S = model.num_states();
    DpSolution out;
    prepare(out, S);
    const auto stages = model.stage_members();
    for (int s : stages.back()) out.value[s] = model.terminal[s];
    for (int t = model.stages - 1; t >= 1; --t) {
        const auto& members = stages[t - 1];
        parallel_for(static_cast<int>(members.size()), opts.threads,
                     [&](int i) { backup_state(model, members[i], out.value, opts, out, out.value); });
        if (!opts.dump_lp_dir.empty()) dump_all(model, out.value, opts.dump_lp_dir, members);
    }
    return out;
}

numvec bellman_operator(const DrMdpModel& model, const numvec& v, const DpOptions& opts, DpSolution* out) {
    require(model.horizon == Horizon::Infinite, ErrorKind::Structural, "Bellman operator needs an infinite-horizon model");
    const int S = model.num_states();
    require(static_cast<int>(v.size()) == S, ErrorKind::Structural, "value vector has the wrong length");
    for (double x : v) require(std::isfinite(x), ErrorKind::Structural, "value vector must be finite");
    DpSolution local;
    DpSolution& sink = out ? *out : local;
    prepare(sink, S);
    numvec next(S, 0.0);
    parallel_for(S, opts.threads, [&](int s) { backup_state(model, s, v, opts, sink, next); });
    sink.value = next;
    return next;
}

DpSolution value_iteration(const DrMdpModel& model, double eps, const numvec& v0, const DpOptions& opts) {
    require(eps > 0.0, ErrorKind::Structural, "tolerance must be positive");
    require_model(model, Horizon::Infinite, opts.validate);
    const int S = model.num_states();
    const double gamma = model.discount;
    const double tol = eps * (1.0 - gamma) / (2.0 * gamma);
    numvec v = v0.empty() ? numvec(S, 0.0) : v0;
    require(static_cast<int>(v.size()) == S, ErrorKind::Structural, "initial vector has the wrong length");

    DpSolution out;
    for (long it = 1;; ++it) {
        if (it > opts.max_iterations)
            fail(ErrorKind::Convergence, "value iteration did not converge within " +
                                             std::to_string(opts.max_iterations) + " sweeps");
        const numvec next = bellman_operator(model, v, opts, &out);
        out.iterations = it;
        out.last_change = sup_distance(next, v);
        if (out.last_change <= tol) {
            // Re-evaluate each extracted action on the final input vector.
            double stat = 0.0;
            for (int s = 0; s < S; ++s) {
                with_context(model, s, [&] {
                    const auto& st = model.states[s];
                    const auto obj = ref::assemble_stage_objective(successor_values(model, s, v), st.factors, gamma);
                    const auto wc = ref::worst_case_expectation(obj, st.ambiguity, out.policy[s], solver_of(opts));
                    stat = std::max(stat, std::abs(wc.value - next[s]));
                    return 0;
                });
            }
            out.stationarity_residual = stat;
            out.bellman_residual = sup_distance(bellman_operator(model, next, opts), next);
            out.value = next;
            if (!opts.dump_lp_dir.empty()) {
                std::vector<int> all(S);
                for (int s = 0; s < S; ++s) all[s] = s;
                dump_all(model, next, opts.dump_lp_dir, all);
            }
            return out;
        }
        v = next;
    }
}

numvec evaluate_policy_worst_case(const DrMdpModel& model, const std::vector<numvec>& policy, const DpOptions& opts,
                                  double eps) {
    const int S = model.num_states();
    require(static_cast<int>(policy.size()) == S, ErrorKind::Structural, "policy must cover every state");
    auto backup = [&](int s, const numvec& v) {
        return with_context(model, s, [&] {
            const auto& st = model.states[s];
            const auto obj =
                ref::assemble_stage_objective(successor_values(model, s, v), st.factors, model.continuation());
            return ref::worst_case_expectation(obj, st.ambiguity, policy[s], solver_of(opts)).value;
        });
    };
    if (model.horizon == Horizon::Finite) {
        require_model(model, Horizon::Finite, opts.validate);
        numvec v(S, 0.0);
        const auto stages = model.stage_members();
        for (int s : stages.back()) v[s] = model.terminal[s];
        for (int t = model.stages - 1; t >= 1; --t) {
            const auto& members = stages[t - 1];
            parallel_for(static_cast<int>(members.size()), opts.threads,
                         [&](int i) { v[members[i]] = backup(members[i], v); });
        }
        return v;
    }
    require_model(model, Horizon::Infinite, opts.validate);
    const double gamma = model.discount;
    const double tol = eps * (1.0 - gamma) / (2.0 * gamma);
    numvec v(S, 0.0);
    for (long it = 1;; ++it) {
        if (it > opts.max_iterations) fail(ErrorKind::Convergence, "policy evaluation did not converge");
        numvec next(S);
        parallel_for(S, opts.threads, [&](int s) { next[s] = backup(s, v); });
        const double change = sup_distance(next, v);
        v = std::move(next);
        if (change <= tol) return v;
    }
}

} // namespace drmdp::dp
