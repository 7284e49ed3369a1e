#include "doctest.h"

#include "drmdp/drmdp.h"

#include <cmath>
#include <filesystem>
#include <string>

namespace {

std::string model_path(const char* name) { return std::string(DRMDP_MODELS_DIR) + "/" + name; }

struct Model {
    drmdp_model* p = nullptr;
    ~Model() { drmdp_model_free(p); }
};

struct Solution {
    drmdp_solution* p = nullptr;
    ~Solution() { drmdp_solution_free(p); }
};

std::string take(char* s) {
    std::string out = s ? s : "";
    drmdp_string_free(s);
    return out;
}

} // namespace

TEST_CASE("c api: load, inspect and solve a staged model") {
    Model m;
    REQUIRE(drmdp_model_load_file(model_path("two_state.json").c_str(), &m.p) == DRMDP_OK);
    CHECK(drmdp_model_num_states(m.p) == 7);
    CHECK(drmdp_model_is_infinite(m.p) == 0);
    CHECK(std::string(drmdp_model_state_name(m.p, drmdp_model_initial_state(m.p))) == "up@1");
    CHECK(drmdp_model_state_name(m.p, 99) == nullptr);

    drmdp_solve_options opts;
    drmdp_solve_options_init(&opts);
    Solution s;
    REQUIRE(drmdp_solve(m.p, &opts, &s.p) == DRMDP_OK);
    CHECK(std::abs(drmdp_solution_initial_value(s.p) - 5.540370370370369) <= 1e-9);
    CHECK(drmdp_solution_saddle_residual(s.p) <= 1e-6);

    const double* probs = nullptr;
    int count = -1;
    REQUIRE(drmdp_solution_policy(s.p, drmdp_model_initial_state(m.p), &probs, &count) == DRMDP_OK);
    REQUIRE(count == 2);
    CHECK(probs[0] + probs[1] == doctest::Approx(1.0));
    double v = 0.0;
    CHECK(drmdp_solution_value(s.p, 1000, &v) == DRMDP_ERR_ARGUMENT);
    CHECK(std::string(drmdp_last_error()).size() > 0);
    CHECK(take(nullptr).empty());
}

TEST_CASE("c api: discounted model reports residuals") {
    Model m;
    REQUIRE(drmdp_model_load_file(model_path("three_state_discounted.json").c_str(), &m.p) == DRMDP_OK);
    CHECK(drmdp_model_is_infinite(m.p) == 1);
    drmdp_solve_options opts;
    drmdp_solve_options_init(&opts);
    opts.epsilon = 1e-6;
    Solution s;
    REQUIRE(drmdp_solve(m.p, &opts, &s.p) == DRMDP_OK);
    CHECK(drmdp_solution_iterations(s.p) > 0);
    CHECK(drmdp_solution_stationarity_residual(s.p) <= 1e-8);
    CHECK(drmdp_solution_bellman_residual(s.p) <= 1e-6);
    char* summary = nullptr;
    REQUIRE(drmdp_solution_summary_json(s.p, &summary) == DRMDP_OK);
    CHECK(take(summary).find("\"horizon\": \"infinite\"") != std::string::npos);
}

TEST_CASE("c api: error statuses") {
    Model m;
    CHECK(drmdp_model_load_file(model_path("malformed.json").c_str(), &m.p) == DRMDP_ERR_PARSE);
    CHECK(m.p == nullptr);
    CHECK(std::string(drmdp_last_error()).find("line 4") != std::string::npos);
    CHECK(drmdp_model_load_file(model_path("missing.json").c_str(), &m.p) == DRMDP_ERR_IO);
    CHECK(drmdp_model_load_string(nullptr, &m.p) == DRMDP_ERR_ARGUMENT);
    CHECK(std::string(drmdp_status_name(DRMDP_ERR_SOLVER)).size() > 0);

    Model bad;
    REQUIRE(drmdp_model_load_file(model_path("invalid_factor_rows.json").c_str(), &bad.p) == DRMDP_OK);
    char* report = nullptr;
    int all = 1, structural = 1;
    REQUIRE(drmdp_model_validate(bad.p, &report, &all, &structural) == DRMDP_OK);
    CHECK(all == 0);
    CHECK(structural == 0);
    CHECK(take(report).find(": transition rows valid: scenario 0") != std::string::npos);
    Solution s;
    CHECK(drmdp_solve(bad.p, nullptr, &s.p) == DRMDP_ERR_VALIDATION);
    CHECK(s.p == nullptr);
}

TEST_CASE("c api: serialize round trip") {
    Model m;
    REQUIRE(drmdp_model_load_file(model_path("two_state.json").c_str(), &m.p) == DRMDP_OK);
    char* text = nullptr;
    REQUIRE(drmdp_model_serialize(m.p, &text) == DRMDP_OK);
    Model back;
    REQUIRE(drmdp_model_load_string(text, &back.p) == DRMDP_OK);
    drmdp_string_free(text);
    CHECK(drmdp_model_num_states(back.p) == drmdp_model_num_states(m.p));
}

TEST_CASE("c api: newsvendor run") {
    drmdp_newsvendor_options opts;
    drmdp_newsvendor_options_init(&opts);
    const double radii[] = {0.0, 2.0};
    const int sizes[] = {5};
    opts.radii = radii;
    opts.num_radii = 2;
    opts.train_sizes = sizes;
    opts.num_train_sizes = 1;
    opts.repetitions = 3;
    opts.test_runs = 50;
    const auto dir = std::filesystem::temp_directory_path() / "drmdp_capi_nv";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    char* report = nullptr;
    drmdp_newsvendor_result res{};
    REQUIRE(drmdp_newsvendor_run(&opts, dir.string().c_str(), &report, &res) == DRMDP_OK);
    CHECK(res.failures == 0);
    CHECK(res.trends_checked == 1);
    CHECK(take(report).find("N\ttheta\tmean\tstd\tcount") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "records.csv"));
    CHECK(std::filesystem::exists(dir / "aggregate.csv"));
    std::filesystem::remove_all(dir);

    opts.repetitions = 0;
    CHECK(drmdp_newsvendor_run(&opts, nullptr, nullptr, &res) == DRMDP_ERR_ARGUMENT);
}
