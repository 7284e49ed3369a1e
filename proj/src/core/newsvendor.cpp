#include "drmdp/newsvendor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace drmdp::nv {

namespace {

double per_period(const numvec& v, int t, const char* what) {
    require(!v.empty(), ErrorKind::Structural, std::string(what) + " costs are missing");
    if (v.size() == 1) return v[0];
    require(t >= 1 && t <= static_cast<int>(v.size()), ErrorKind::Structural,
            std::string(what) + " cost missing for period " + std::to_string(t));
    return v[t - 1];
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

void NewsvendorConfig::check() const {
    require(horizon >= 2, ErrorKind::Structural, "horizon must cover at least one decision period");
    require(s_min < 0 && s_max > 0, ErrorKind::Structural, "inventory bounds must straddle zero");
    require(d_max >= 0 && static_cast<int>(demand_probs.size()) == d_max + 1, ErrorKind::Structural,
            "demand distribution must cover 0..d_max");
    double mass = 0.0;
    for (double p : demand_probs) {
        require(p >= 0.0, ErrorKind::Structural, "demand probabilities must be nonnegative");
        mass += p;
    }
    require(std::abs(mass - 1.0) <= 1e-9, ErrorKind::Structural, "demand probabilities must sum to one");
    for (const numvec* v : {&order_cost, &holding_cost, &backorder_cost}) {
        require(v->size() == 1 || static_cast<int>(v->size()) == horizon, ErrorKind::Structural,
                "cost vectors need one entry or one per period");
        for (double x : *v) require(x >= 0.0 && std::isfinite(x), ErrorKind::Structural, "costs must be nonnegative");
    }
    require(!train_sizes.empty() && !radii.empty(), ErrorKind::Structural, "empty experiment grid");
    for (int n : train_sizes) require(n >= 1, ErrorKind::Structural, "training sizes must be positive");
    for (double r : radii) require(r >= 0.0, ErrorKind::Structural, "radii must be nonnegative");
    require(repetitions >= 1 && test_runs >= 1, ErrorKind::Structural, "repetitions and test runs must be positive");
    require(draws_per_sample >= 0, ErrorKind::Structural, "draws per sample must be nonnegative");
}

double NewsvendorConfig::c(int t) const { return per_period(order_cost, t, "order"); }
double NewsvendorConfig::h(int t) const { return per_period(holding_cost, t, "holding"); }
double NewsvendorConfig::b(int t) const { return per_period(backorder_cost, t, "backorder"); }

int NewsvendorConfig::clamp(int s) const { return s <= 0 ? std::max(s, s_min) : std::min(s, s_max); }

double NewsvendorConfig::stage_cost(int t, int s, int a) const {
    return c(t) * a + std::max(h(t) * s, -b(t) * s);
}

double NewsvendorConfig::terminal_cost(int s) const { return std::max(h(horizon) * s, -b(horizon) * s); }

int state_index(const NewsvendorConfig& cfg, int t, int s) {
    if (t == 1) return 0;
    return 1 + (t - 2) * cfg.num_positions() + (s - cfg.s_min);
}

DrMdpModel build_newsvendor_model(const NewsvendorConfig& cfg, const amb::LiftedAmbiguitySet& ambiguity) {
    cfg.check();
    const int k = cfg.d_max + 1;
    require(ambiguity.factor_dim == k, ErrorKind::Structural, "ambiguity set must live on the demand distribution");
    const int npos = cfg.num_positions();

    DrMdpModel m;
    m.horizon = Horizon::Finite;
    m.stages = cfg.horizon;
    m.initial = 0;
    auto add_state = [&](int t, int s) {
        State st;
        st.name = "t" + std::to_string(t) + "_s" + std::to_string(s);
        st.stage = t;
        m.states.push_back(std::move(st));
        m.terminal.push_back(t == cfg.horizon ? -cfg.terminal_cost(s) : 0.0);
    };
    add_state(1, 0);
    for (int t = 2; t <= cfg.horizon; ++t)
        for (int s = cfg.s_min; s <= cfg.s_max; ++s) add_state(t, s);

    for (auto& st : m.states) {
        const int t = st.stage;
        if (t == cfg.horizon) continue;
        const int s = std::stoi(st.name.substr(st.name.find("_s") + 2));
        const int actions = cfg.s_max - s + 1;
        for (int a = 0; a < actions; ++a) st.actions.push_back("order " + std::to_string(a));
        for (int nx = cfg.s_min; nx <= cfg.s_max; ++nx) st.successors.push_back(state_index(cfg, t + 1, nx));
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(actions) * npos, k);
        Eigen::VectorXd r0(actions);
        for (int a = 0; a < actions; ++a) {
            for (int d = 0; d < k; ++d) P(a * npos + (cfg.clamp(s + a - d) - cfg.s_min), d) += 1.0;
            r0(a) = -cfg.stage_cost(t, s, a);
        }
        st.factors = amb::FactorMap::transitions(actions, npos, P, r0);
        st.ambiguity = ambiguity;
    }
    return m;
}

Rng derive_rng(std::uint64_t master, std::initializer_list<std::uint64_t> stream) {
    std::vector<std::uint32_t> words{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32)};
    for (auto v : stream) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

std::vector<numvec> sample_training_set(const numvec& p, int n, int draws_per_sample, Rng& rng) {
    require(n >= 1, ErrorKind::Structural, "training size must be positive");
    require(!p.empty(), ErrorKind::Structural, "empty distribution");
    std::vector<numvec> out;
    if (draws_per_sample == 0) {
        out.assign(n, p);
        return out;
    }
    std::discrete_distribution<int> demand(p.begin(), p.end());
    for (int i = 0; i < n; ++i) {
        numvec freq(p.size(), 0.0);
        for (int d = 0; d < draws_per_sample; ++d) freq[demand(rng)] += 1.0;
        for (double& f : freq) f /= draws_per_sample;
        out.push_back(std::move(freq));
    }
    return out;
}

NewsvendorPolicy extract_policy(const NewsvendorConfig& cfg, const DrMdpModel& model, const dp::DpSolution& sol) {
    NewsvendorPolicy pol;
    pol.by_stage.assign(cfg.horizon - 1, std::vector<numvec>(cfg.num_positions()));
    for (int t = 1; t < cfg.horizon; ++t)
        for (int s = cfg.s_min; s <= cfg.s_max; ++s) {
            if (t == 1 && s != 0) continue;
            const int idx = state_index(cfg, t, s);
            require(idx < model.num_states(), ErrorKind::Structural, "model does not match the configuration");
            pol.by_stage[t - 1][s - cfg.s_min] = sol.policy[idx];
        }
    return pol;
}

TestPaths draw_test_paths(const NewsvendorConfig& cfg, const numvec& p, int runs, Rng& rng) {
    std::discrete_distribution<int> demand(p.begin(), p.end());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    TestPaths paths;
    paths.demand.assign(runs, std::vector<int>(cfg.horizon - 1));
    paths.uniform.assign(runs, numvec(cfg.horizon - 1));
    for (int r = 0; r < runs; ++r)
        for (int t = 0; t < cfg.horizon - 1; ++t) {
            paths.demand[r][t] = demand(rng);
            paths.uniform[r][t] = unif(rng);
        }
    return paths;
}

double simulate_policy(const NewsvendorConfig& cfg, const NewsvendorPolicy& policy, const TestPaths& paths) {
    require(!paths.demand.empty(), ErrorKind::Structural, "no test runs");
    double total = 0.0;
    for (std::size_t r = 0; r < paths.demand.size(); ++r) {
        int s = 0;
        double cost = 0.0;
        for (int t = 1; t < cfg.horizon; ++t) {
            const numvec& pi = policy.by_stage.at(t - 1).at(s - cfg.s_min);
            require(!pi.empty(), ErrorKind::Structural, "policy undefined at a reachable state");
            const double u = paths.uniform[r][t - 1];
            int a = static_cast<int>(pi.size()) - 1;
            double cum = 0.0;
            for (std::size_t i = 0; i < pi.size(); ++i) {
                cum += pi[i];
                if (u < cum) {
                    a = static_cast<int>(i);
                    break;
                }
            }
            cost += cfg.stage_cost(t, s, a);
            s = cfg.clamp(s + a - paths.demand[r][t - 1]);
        }
        total += cost + cfg.terminal_cost(s);
    }
    return total / static_cast<double>(paths.demand.size());
}

double simulate_policy(const NewsvendorConfig& cfg, const NewsvendorPolicy& policy, const numvec& p, int runs,
                       std::uint64_t seed) {
    Rng rng = derive_rng(seed, {});
    return simulate_policy(cfg, policy, draw_test_paths(cfg, p, runs, rng));
}

ExperimentResult run_experiment(const NewsvendorConfig& cfg) {
    cfg.check();
    const int k = cfg.d_max + 1;
    const auto D = geom::PolyhedralSet::simplex(k);
    const int ncell = static_cast<int>(cfg.train_sizes.size() * cfg.radii.size());
    std::vector<ExperimentRecord> records(static_cast<std::size_t>(cfg.repetitions) * ncell);

    dp::parallel_for(cfg.repetitions, cfg.threads, [&](int rep) {
        Rng test_rng = derive_rng(cfg.seed, {static_cast<std::uint64_t>(rep), 0});
        const TestPaths paths = draw_test_paths(cfg, cfg.demand_probs, cfg.test_runs, test_rng);
        int cell = 0;
        for (int n : cfg.train_sizes) {
            Rng train_rng = derive_rng(cfg.seed, {static_cast<std::uint64_t>(rep), 1, static_cast<std::uint64_t>(n)});
            const auto samples = sample_training_set(cfg.demand_probs, n, cfg.draws_per_sample, train_rng);
            DrMdpModel model;
            for (double theta : cfg.radii) {
                auto& rec = records[static_cast<std::size_t>(rep) * ncell + cell++];
                rec.theta = theta;
                rec.n = n;
                rec.repetition = rep;
                try {
                    const auto amb = amb::build_wasserstein(samples, theta, D, cfg.metric);
                    if (model.states.empty()) {
                        model = build_newsvendor_model(cfg, amb);
                    } else {
                        for (auto& st : model.states)
                            if (!st.terminal()) st.ambiguity = amb;
                    }
                    dp::DpOptions opts;
                    opts.validate = rep == 0;
                    const auto sol = dp::backward_induction(model, opts);
                    rec.mean_cost = simulate_policy(cfg, extract_policy(cfg, model, sol), paths);
                } catch (const Error& e) {
                    rec.ok = false;
                    rec.error = e.what();
                    if (!cfg.keep_going)
                        throw Error(e.kind(), "repetition " + std::to_string(rep) + ", N=" + std::to_string(n) +
                                                  ", theta=" + num(theta) + ": " + e.what());
                }
            }
        }
    });

    ExperimentResult res;
    res.records = std::move(records);
    for (const auto& r : res.records)
        if (!r.ok) ++res.failures;
    res.aggregates = aggregate(res.records);
    res.trends = trend_checks(cfg, res.records);
    return res;
}

std::vector<Aggregate> aggregate(const std::vector<ExperimentRecord>& records) {
    std::map<std::pair<int, double>, std::vector<double>> groups;
    std::vector<std::pair<int, double>> order;
    for (const auto& r : records) {
        if (!r.ok) continue;
        const auto key = std::make_pair(r.n, r.theta);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(r.mean_cost);
    }
    std::vector<Aggregate> out;
    for (const auto& key : order) {
        const auto& xs = groups[key];
        Aggregate a;
        a.n = key.first;
        a.theta = key.second;
        a.count = static_cast<int>(xs.size());
        for (double x : xs) a.mean += x;
        a.mean /= a.count;
        double ss = 0.0;
        for (double x : xs) ss += (x - a.mean) * (x - a.mean);
        a.std = a.count > 1 ? std::sqrt(ss / (a.count - 1)) : 0.0;
        out.push_back(a);
    }
    return out;
}

std::vector<TrendCheck> trend_checks(const NewsvendorConfig& cfg, const std::vector<ExperimentRecord>& records) {
    const auto aggs = aggregate(records);
    auto find = [&](int n, double theta) -> const Aggregate* {
        for (const auto& a : aggs)
            if (a.n == n && a.theta == theta) return &a;
        return nullptr;
    };
    const double lo_theta = *std::min_element(cfg.radii.begin(), cfg.radii.end());
    const double hi_theta = *std::max_element(cfg.radii.begin(), cfg.radii.end());
    const int lo_n = *std::min_element(cfg.train_sizes.begin(), cfg.train_sizes.end());
    const int hi_n = *std::max_element(cfg.train_sizes.begin(), cfg.train_sizes.end());

    std::vector<TrendCheck> out;
    TrendCheck mean_check;
    mean_check.name = "mean cost at theta=" + num(hi_theta) + " exceeds theta=" + num(lo_theta) +
                      " for N=" + std::to_string(lo_n) + " (t > 2)";
    const Aggregate* a0 = find(lo_n, lo_theta);
    const Aggregate* a1 = find(lo_n, hi_theta);
    if (hi_theta > lo_theta && a0 && a1 && a0->count > 1 && a1->count > 1) {
        mean_check.applicable = true;
        const double se = std::sqrt(a0->std * a0->std / a0->count + a1->std * a1->std / a1->count);
        const double t = se > 0.0 ? (a1->mean - a0->mean) / se : (a1->mean > a0->mean ? lp::kInf : 0.0);
        mean_check.passed = t > 2.0;
        mean_check.detail = "means " + num(a1->mean) + " vs " + num(a0->mean) + ", t = " + num(t);
    } else {
        mean_check.detail = "needs two radii and at least two repetitions";
    }
    out.push_back(mean_check);

    TrendCheck std_check;
    std_check.name = "std at theta=" + num(lo_theta) + " is lower for N=" + std::to_string(hi_n) + " than N=" +
                     std::to_string(lo_n);
    const Aggregate* b0 = find(lo_n, lo_theta);
    const Aggregate* b1 = find(hi_n, lo_theta);
    if (hi_n > lo_n && b0 && b1 && b0->count > 1 && b1->count > 1) {
        std_check.applicable = true;
        std_check.passed = b1->std < b0->std;
        std_check.detail = "std " + num(b1->std) + " vs " + num(b0->std);
    } else {
        std_check.detail = "needs two training sizes and at least two repetitions";
    }
    out.push_back(std_check);
    return out;
}

void write_records_csv(const std::vector<ExperimentRecord>& records, std::ostream& os) {
    os << "theta,N,repetition,mean_cost,status\n";
    for (const auto& r : records) {
        std::string status = r.ok ? "ok" : "failed";
        os << num(r.theta) << ',' << r.n << ',' << r.repetition << ',' << (r.ok ? num(r.mean_cost) : "") << ','
           << status << '\n';
    }
}

void write_aggregate_csv(const std::vector<Aggregate>& aggregates, std::ostream& os) {
    os << "theta,N,mean,std\n";
    for (const auto& a : aggregates) os << num(a.theta) << ',' << a.n << ',' << num(a.mean) << ',' << num(a.std) << '\n';
}

} // namespace drmdp::nv
