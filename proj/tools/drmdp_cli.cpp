// drmdp: solve / validate model files and run the newsvendor experiment.
#include "drmdp/drmdp.h"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kInvalid = 2, kSolverFailure = 3, kUsage = 64 };

int exit_for(drmdp_status st) {
    switch (st) {
    case DRMDP_OK: return kOk;
    case DRMDP_ERR_PARSE:
    case DRMDP_ERR_VALIDATION:
    case DRMDP_ERR_IO:
    case DRMDP_ERR_ARGUMENT: return kInvalid;
    default: return kSolverFailure;
    }
}

int report_error(drmdp_status st) {
    std::cerr << "error (" << drmdp_status_name(st) << "): " << drmdp_last_error() << '\n';
    return exit_for(st);
}

int default_threads() {
    if (const char* env = std::getenv("DRMDP_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

struct ModelHandle {
    drmdp_model* p = nullptr;
    ~ModelHandle() { drmdp_model_free(p); }
};

struct SolutionHandle {
    drmdp_solution* p = nullptr;
    ~SolutionHandle() { drmdp_solution_free(p); }
};

std::string take(char* s) {
    std::string out = s ? s : "";
    drmdp_string_free(s);
    return out;
}

int cmd_validate(const std::string& path) {
    ModelHandle m;
    if (auto st = drmdp_model_load_file(path.c_str(), &m.p); st != DRMDP_OK) return report_error(st);
    char* report = nullptr;
    int all = 0;
    if (auto st = drmdp_model_validate(m.p, &report, &all, nullptr); st != DRMDP_OK) return report_error(st);
    std::cout << take(report);
    std::cout << (all ? "all checks passed\n" : "validation failed\n");
    return all ? kOk : kInvalid;
}

int cmd_solve(const std::string& path, double epsilon, int threads, const std::string& dump_lp, const std::string& out) {
    ModelHandle m;
    if (auto st = drmdp_model_load_file(path.c_str(), &m.p); st != DRMDP_OK) return report_error(st);
    drmdp_solve_options opts;
    drmdp_solve_options_init(&opts);
    opts.epsilon = epsilon;
    opts.threads = threads;
    opts.dump_lp_dir = dump_lp.empty() ? nullptr : dump_lp.c_str();
    SolutionHandle s;
    if (auto st = drmdp_solve(m.p, &opts, &s.p); st != DRMDP_OK) {
        if (st == DRMDP_ERR_VALIDATION) std::cerr << "model failed validation\n";
        return report_error(st);
    }
    char* summary = nullptr;
    if (auto st = drmdp_solution_summary_json(s.p, &summary); st != DRMDP_OK) return report_error(st);
    std::cout << take(summary);
    if (!out.empty()) {
        if (auto st = drmdp_solution_write(s.p, out.c_str()); st != DRMDP_OK) return report_error(st);
        std::cerr << "wrote values.csv, policy.csv and summary.json to " << out << '\n';
    }
    return kOk;
}

struct NewsvendorFlags {
    std::vector<double> radii;
    std::vector<int> train_sizes;
    int reps = 0;
    int test_runs = 0;
    int draws = -1;
    unsigned long long seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";
    bool keep_going = false;
};

int cmd_newsvendor(const NewsvendorFlags& f, int threads) {
    drmdp_newsvendor_options opts;
    drmdp_newsvendor_options_init(&opts);
    if (!f.radii.empty()) {
        opts.radii = f.radii.data();
        opts.num_radii = static_cast<int>(f.radii.size());
    }
    if (!f.train_sizes.empty()) {
        opts.train_sizes = f.train_sizes.data();
        opts.num_train_sizes = static_cast<int>(f.train_sizes.size());
    }
    if (f.reps > 0) opts.repetitions = f.reps;
    if (f.test_runs > 0) opts.test_runs = f.test_runs;
    if (f.draws >= 0) opts.draws_per_sample = f.draws;
    if (f.seed_set) opts.seed = f.seed;
    opts.threads = threads;
    opts.keep_going = f.keep_going;

    char* report = nullptr;
    drmdp_newsvendor_result res{};
    if (auto st = drmdp_newsvendor_run(&opts, f.out_dir.c_str(), &report, &res); st != DRMDP_OK) {
        report_error(st);
        return st == DRMDP_ERR_ARGUMENT ? kInvalid : kSolverFailure;
    }
    std::cout << take(report);
    std::cerr << "wrote records.csv and aggregate.csv to " << f.out_dir << '\n';
    if (res.failures > 0 && !f.keep_going) return kSolverFailure;
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust MDP solver"};
    app.require_subcommand(1);
    int threads = default_threads();

    std::string model_path;
    double epsilon = 1e-6;
    std::string dump_lp, out;
    auto* solve = app.add_subcommand("solve", "Solve a model file");
    solve->add_option("model", model_path, "Model file")->required();
    solve->add_option("--epsilon", epsilon, "Value-iteration tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--dump-lp", dump_lp, "Directory for MPS dumps of every subproblem");
    solve->add_option("--threads", threads, "Worker threads (default: DRMDP_THREADS or 1)")->check(CLI::PositiveNumber);
    solve->add_option("--out", out, "Directory for values.csv, policy.csv and summary.json");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Validate a model file");
    validate->add_option("model", validate_path, "Model file")->required();

    NewsvendorFlags nf;
    auto* nv = app.add_subcommand("newsvendor", "Run the newsvendor radius experiment");
    nv->add_option("--radii", nf.radii, "Wasserstein radii")->delimiter(',');
    nv->add_option("--train-sizes", nf.train_sizes, "Training set sizes")->delimiter(',');
    nv->add_option("--reps", nf.reps, "Repetitions")->check(CLI::PositiveNumber);
    nv->add_option("--test-runs", nf.test_runs, "Out-of-sample runs per repetition")->check(CLI::PositiveNumber);
    nv->add_option("--draws-per-sample", nf.draws, "Demand draws behind each training sample (0: true distribution)")
        ->check(CLI::NonNegativeNumber);
    auto* seed_opt = nv->add_option("--seed", nf.seed, "Master seed");
    nv->add_option("--out-dir", nf.out_dir, "Directory for records.csv and aggregate.csv");
    nv->add_option("--threads", threads, "Worker threads (default: DRMDP_THREADS or 1)")->check(CLI::PositiveNumber);
    nv->add_flag("--keep-going", nf.keep_going, "Record failed cells and continue");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }
    nf.seed_set = seed_opt->count() > 0;

    if (*solve) return cmd_solve(model_path, epsilon, threads, dump_lp, out);
    if (*validate) return cmd_validate(validate_path);
    return cmd_newsvendor(nf, threads);
}
