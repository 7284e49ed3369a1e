#pragma once

#include "drmdp/ambiguity.hpp"
#include "drmdp/dp.hpp"
#include "drmdp/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace drmdp::nv {

struct NewsvendorConfig {
    int horizon = 5;
    int s_min = -5;
    int s_max = 10;
    /// Per-period costs; a single entry applies to every period.
    numvec order_cost{1.0};
    numvec holding_cost{2.0};
    numvec backorder_cost{3.0};
    int d_max = 4;
    numvec demand_probs{0.05, 0.4, 0.1, 0.4, 0.05};

    std::vector<int> train_sizes{5, 15};
    numvec radii{0.0, 0.1, 0.2, 0.5, 1.0, 2.0};
    amb::Norm metric = amb::Norm::L1;
    int repetitions = 200;
    int test_runs = 1000;
    /// Demand draws behind each training sample; 0 returns the true
    /// distribution itself.
    int draws_per_sample = 20;
    std::uint64_t seed = 20240501;
    int threads = 1;
    bool keep_going = false;

    void check() const;
    double c(int t) const;
    double h(int t) const;
    double b(int t) const;
    int num_positions() const { return s_max - s_min + 1; }
    int clamp(int s) const;
    /// Period cost c_t a + max(h_t s, -b_t s).
    double stage_cost(int t, int s, int a) const;
    double terminal_cost(int s) const;
};

/// Staged newsvendor model with rewards equal to negative costs; every
/// decision state carries a copy of `ambiguity`, which lives on the demand
/// distribution.
DrMdpModel build_newsvendor_model(const NewsvendorConfig& cfg, const amb::LiftedAmbiguitySet& ambiguity);

/// Index of the state for inventory position s at stage t.
int state_index(const NewsvendorConfig& cfg, int t, int s);

using Rng = std::mt19937_64;

/// Rng seeded from (master seed, stream indices).
Rng derive_rng(std::uint64_t master, std::initializer_list<std::uint64_t> stream);

std::vector<numvec> sample_training_set(const numvec& p, int n, int draws_per_sample, Rng& rng);

/// Order distributions indexed [t-1][s - s_min] for decision stages.
struct NewsvendorPolicy {
    std::vector<std::vector<numvec>> by_stage;
};

NewsvendorPolicy extract_policy(const NewsvendorConfig& cfg, const DrMdpModel& model, const dp::DpSolution& sol);

/// Demand draws and action-sampling uniforms for each run and period.
struct TestPaths {
    std::vector<std::vector<int>> demand;
    std::vector<numvec> uniform;
};

TestPaths draw_test_paths(const NewsvendorConfig& cfg, const numvec& p, int runs, Rng& rng);

/// Mean undiscounted total cost, terminal cost included.
double simulate_policy(const NewsvendorConfig& cfg, const NewsvendorPolicy& policy, const TestPaths& paths);
double simulate_policy(const NewsvendorConfig& cfg, const NewsvendorPolicy& policy, const numvec& p, int runs,
                       std::uint64_t seed);

struct ExperimentRecord {
    double theta = 0.0;
    int n = 0;
    int repetition = 0;
    double mean_cost = 0.0;
    bool ok = true;
    std::string error;
};

struct Aggregate {
    double theta = 0.0;
    int n = 0;
    double mean = 0.0;
    double std = 0.0;
    int count = 0;
};

struct TrendCheck {
    std::string name;
    bool applicable = false;
    bool passed = false;
    std::string detail;
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records;
    std::vector<Aggregate> aggregates;
    std::vector<TrendCheck> trends;
    int failures = 0;
};

/// Solves every (repetition, N, theta) cell. Repetitions run on cfg.threads
/// workers; results do not depend on the thread count.
ExperimentResult run_experiment(const NewsvendorConfig& cfg);

std::vector<Aggregate> aggregate(const std::vector<ExperimentRecord>& records);
std::vector<TrendCheck> trend_checks(const NewsvendorConfig& cfg, const std::vector<ExperimentRecord>& records);

void write_records_csv(const std::vector<ExperimentRecord>& records, std::ostream& os);
void write_aggregate_csv(const std::vector<Aggregate>& aggregates, std::ostream& os);

} // namespace drmdp::nv
