#include "drmdp/drmdp.h"

#include "drmdp/dp.hpp"
#include "drmdp/model_io.hpp"
#include "drmdp/newsvendor.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>

struct drmdp_model {
    drmdp::DrMdpModel model;
};

struct drmdp_solution {
    drmdp::DrMdpModel model;
    drmdp::dp::DpSolution sol;
    drmdp::io::SolveSummary summary;
};

namespace {

thread_local std::string last_error;

drmdp_status status_of(drmdp::ErrorKind kind) {
    using drmdp::ErrorKind;
    switch (kind) {
    case ErrorKind::Parse: return DRMDP_ERR_PARSE;
    case ErrorKind::Structural:
    case ErrorKind::NotCompact:
    case ErrorKind::Validation: return DRMDP_ERR_VALIDATION;
    case ErrorKind::Solver:
    case ErrorKind::Guard: return DRMDP_ERR_SOLVER;
    case ErrorKind::Convergence: return DRMDP_ERR_CONVERGENCE;
    }
    return DRMDP_ERR_INTERNAL;
}

drmdp_status set_error(drmdp_status st, const std::string& msg) {
    last_error = msg;
    return st;
}

template <class F>
drmdp_status guarded(F&& body) {
    last_error.clear();
    try {
        return body();
    } catch (const drmdp::Error& e) {
        return set_error(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(DRMDP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(DRMDP_ERR_INTERNAL, e.what());
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

extern "C" {

const char* drmdp_last_error(void) { return last_error.c_str(); }

const char* drmdp_status_name(drmdp_status status) {
    switch (status) {
    case DRMDP_OK: return "ok";
    case DRMDP_ERR_PARSE: return "parse error";
    case DRMDP_ERR_VALIDATION: return "validation error";
    case DRMDP_ERR_SOLVER: return "solver error";
    case DRMDP_ERR_CONVERGENCE: return "convergence error";
    case DRMDP_ERR_ARGUMENT: return "invalid argument";
    case DRMDP_ERR_IO: return "i/o error";
    case DRMDP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void drmdp_string_free(char* s) { std::free(s); }

drmdp_status drmdp_model_load_file(const char* path, drmdp_model** out) {
    if (!path || !out) return set_error(DRMDP_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        if (!std::filesystem::exists(path)) return set_error(DRMDP_ERR_IO, std::string("no such file: ") + path);
        *out = new drmdp_model{drmdp::io::load_model(path)};
        return DRMDP_OK;
    });
}

drmdp_status drmdp_model_load_string(const char* text, drmdp_model** out) {
    if (!text || !out) return set_error(DRMDP_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new drmdp_model{drmdp::io::parse_model(text)};
        return DRMDP_OK;
    });
}

void drmdp_model_free(drmdp_model* model) { delete model; }

int drmdp_model_num_states(const drmdp_model* model) { return model ? model->model.num_states() : 0; }

int drmdp_model_is_infinite(const drmdp_model* model) {
    return model && model->model.horizon == drmdp::Horizon::Infinite;
}

int drmdp_model_initial_state(const drmdp_model* model) { return model ? model->model.initial : -1; }

const char* drmdp_model_state_name(const drmdp_model* model, int state) {
    if (!model || state < 0 || state >= model->model.num_states()) return nullptr;
    return model->model.states[state].name.c_str();
}

drmdp_status drmdp_model_validate(const drmdp_model* model, char** report, int* all_passed,
                                  int* structurally_valid) {
    if (!model) return set_error(DRMDP_ERR_ARGUMENT, "null model");
    return guarded([&] {
        const auto rep = model->model.validate();
        if (report) *report = copy_string(rep.to_string());
        if (all_passed) *all_passed = rep.all_passed();
        if (structurally_valid) *structurally_valid = rep.structurally_valid();
        return DRMDP_OK;
    });
}

drmdp_status drmdp_model_serialize(const drmdp_model* model, char** text) {
    if (!model || !text) return set_error(DRMDP_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *text = copy_string(drmdp::io::serialize_model(model->model));
        return DRMDP_OK;
    });
}

void drmdp_solve_options_init(drmdp_solve_options* opts) {
    if (!opts) return;
    opts->epsilon = 1e-6;
    opts->threads = 1;
    opts->dump_lp_dir = nullptr;
}

drmdp_status drmdp_solve(const drmdp_model* model, const drmdp_solve_options* opts, drmdp_solution** out) {
    if (!model || !out) return set_error(DRMDP_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    drmdp_solve_options o;
    drmdp_solve_options_init(&o);
    if (opts) o = *opts;
    if (!(o.epsilon > 0.0)) return set_error(DRMDP_ERR_ARGUMENT, "epsilon must be positive");
    if (o.threads < 1) return set_error(DRMDP_ERR_ARGUMENT, "threads must be at least 1");
    return guarded([&] {
        const auto& m = model->model;
        const auto rep = m.validate();
        if (!rep.structurally_valid()) return set_error(DRMDP_ERR_VALIDATION, rep.to_string());
        drmdp::dp::DpOptions dopts;
        dopts.threads = o.threads;
        dopts.validate = false;
        if (o.dump_lp_dir) dopts.dump_lp_dir = o.dump_lp_dir;
        auto sol = std::make_unique<drmdp_solution>();
        sol->model = m;
        sol->sol = m.horizon == drmdp::Horizon::Finite ? drmdp::dp::backward_induction(m, dopts)
                                                       : drmdp::dp::value_iteration(m, o.epsilon, {}, dopts);
        sol->summary = drmdp::io::summarize(m, sol->sol, rep.all_passed());
        *out = sol.release();
        return DRMDP_OK;
    });
}

void drmdp_solution_free(drmdp_solution* sol) { delete sol; }

double drmdp_solution_initial_value(const drmdp_solution* sol) { return sol ? sol->summary.value : 0.0; }

drmdp_status drmdp_solution_value(const drmdp_solution* sol, int state, double* value) {
    if (!sol || !value) return set_error(DRMDP_ERR_ARGUMENT, "null argument");
    if (state < 0 || state >= static_cast<int>(sol->sol.value.size()))
        return set_error(DRMDP_ERR_ARGUMENT, "state index out of range");
    *value = sol->sol.value[state];
    return DRMDP_OK;
}

drmdp_status drmdp_solution_policy(const drmdp_solution* sol, int state, const double** probs, int* count) {
    if (!sol || !probs || !count) return set_error(DRMDP_ERR_ARGUMENT, "null argument");
    if (state < 0 || state >= static_cast<int>(sol->sol.policy.size()))
        return set_error(DRMDP_ERR_ARGUMENT, "state index out of range");
    const auto& p = sol->sol.policy[state];
    *probs = p.empty() ? nullptr : p.data();
    *count = static_cast<int>(p.size());
    return DRMDP_OK;
}

double drmdp_solution_saddle_residual(const drmdp_solution* sol) { return sol ? sol->summary.saddle_residual : 0.0; }
long drmdp_solution_iterations(const drmdp_solution* sol) { return sol ? sol->summary.iterations : 0; }
double drmdp_solution_stationarity_residual(const drmdp_solution* sol) {
    return sol ? sol->summary.stationarity_residual : 0.0;
}
double drmdp_solution_bellman_residual(const drmdp_solution* sol) { return sol ? sol->summary.bellman_residual : 0.0; }

drmdp_status drmdp_solution_summary_json(const drmdp_solution* sol, char** json) {
    if (!sol || !json) return set_error(DRMDP_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *json = copy_string(drmdp::io::summary_json(sol->summary));
        return DRMDP_OK;
    });
}

drmdp_status drmdp_solution_write(const drmdp_solution* sol, const char* dir) {
    if (!sol || !dir) return set_error(DRMDP_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        try {
            drmdp::io::write_solution(dir, sol->model, sol->sol, sol->summary);
        } catch (const std::filesystem::filesystem_error& e) {
            return set_error(DRMDP_ERR_IO, e.what());
        } catch (const drmdp::Error& e) {
            return set_error(DRMDP_ERR_IO, e.what());
        }
        return DRMDP_OK;
    });
}

void drmdp_newsvendor_options_init(drmdp_newsvendor_options* opts) {
    if (!opts) return;
    const drmdp::nv::NewsvendorConfig def;
    opts->radii = nullptr;
    opts->num_radii = 0;
    opts->train_sizes = nullptr;
    opts->num_train_sizes = 0;
    opts->repetitions = def.repetitions;
    opts->test_runs = def.test_runs;
    opts->draws_per_sample = def.draws_per_sample;
    opts->seed = def.seed;
    opts->threads = 1;
    opts->keep_going = 0;
}

drmdp_status drmdp_newsvendor_run(const drmdp_newsvendor_options* opts, const char* out_dir, char** report,
                                  drmdp_newsvendor_result* result) {
    drmdp_newsvendor_options o;
    drmdp_newsvendor_options_init(&o);
    if (opts) o = *opts;
    if (o.repetitions < 1 || o.test_runs < 1 || o.threads < 1 || o.draws_per_sample < 0)
        return set_error(DRMDP_ERR_ARGUMENT, "repetitions, test runs and threads must be positive");
    if ((o.num_radii > 0 && !o.radii) || (o.num_train_sizes > 0 && !o.train_sizes) || o.num_radii < 0 ||
        o.num_train_sizes < 0)
        return set_error(DRMDP_ERR_ARGUMENT, "grid arrays do not match their lengths");
    return guarded([&] {
        drmdp::nv::NewsvendorConfig cfg;
        if (o.radii && o.num_radii > 0) cfg.radii.assign(o.radii, o.radii + o.num_radii);
        if (o.train_sizes && o.num_train_sizes > 0)
            cfg.train_sizes.assign(o.train_sizes, o.train_sizes + o.num_train_sizes);
        for (double r : cfg.radii)
            if (!(r >= 0.0)) return set_error(DRMDP_ERR_ARGUMENT, "radii must be nonnegative");
        for (int n : cfg.train_sizes)
            if (n < 1) return set_error(DRMDP_ERR_ARGUMENT, "training sizes must be positive");
        cfg.repetitions = o.repetitions;
        cfg.test_runs = o.test_runs;
        cfg.draws_per_sample = o.draws_per_sample;
        cfg.seed = o.seed;
        cfg.threads = o.threads;
        cfg.keep_going = o.keep_going != 0;

        const auto res = drmdp::nv::run_experiment(cfg);

        if (out_dir) {
            namespace fs = std::filesystem;
            std::error_code ec;
            fs::create_directories(out_dir, ec);
            std::ofstream rec(fs::path(out_dir) / "records.csv");
            std::ofstream agg(fs::path(out_dir) / "aggregate.csv");
            if (!rec || !agg) return set_error(DRMDP_ERR_IO, std::string("cannot write into ") + out_dir);
            drmdp::nv::write_records_csv(res.records, rec);
            drmdp::nv::write_aggregate_csv(res.aggregates, agg);
        }

        drmdp_newsvendor_result r{res.failures, 0, 0};
        std::ostringstream os;
        os << "N\ttheta\tmean\tstd\tcount\n";
        for (const auto& a : res.aggregates)
            os << a.n << '\t' << num(a.theta) << '\t' << num(a.mean) << '\t' << num(a.std) << '\t' << a.count << '\n';
        for (const auto& t : res.trends) {
            os << (!t.applicable ? "SKIP " : t.passed ? "PASS " : "FAIL ") << t.name << ": " << t.detail << '\n';
            if (t.applicable) {
                ++r.trends_checked;
                if (t.passed) ++r.trends_passed;
            }
        }
        if (res.failures > 0) os << res.failures << " cells failed\n";
        if (report) *report = copy_string(os.str());
        if (result) *result = r;
        return DRMDP_OK;
    });
}

} // extern "C"
