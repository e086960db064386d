#include <cmath>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "bottleneck/harness.hpp"
#include "bottleneck/road_io.hpp"
#include "oracles.hpp"

using namespace bottleneck;

namespace {

Scenario chain_scenario(int d) {
    // Single route 0 -> 1 -> 2; every agent must incur zero regret.
    Scenario s{DirectedGraph(3, {{0, 1, 100.0}, {1, 2, 100.0}}), {}, d, {}, {}, 0, 2};
    for (int e = 0; e < 2; ++e) {
        EdgeModel model;
        model.noise_var = 1.0;
        model.context_means = Eigen::VectorXd::Constant(d, 10.0);
        model.context_vars = Eigen::VectorXd::Constant(d, 0.5);
        s.edge_models.push_back(model);
    }
    auto [means, covs] = default_priors(s.graph, d);
    s.prior_means = std::move(means);
    s.prior_covs = std::move(covs);
    return s;
}

ExperimentConfig small_config(AgentKind kind, long horizon, int runs) {
    ExperimentConfig config;
    config.agent.kind = kind;
    config.horizon = horizon;
    config.n_runs = runs;
    config.base_seed = 17;
    config.boxplot_stride = 10;
    config.threads = 1;
    config.scenario.kind = "synthetic";
    return config;
}

}  // namespace

TEST_CASE("oracle super arm matches brute force on random graphs") {
    RngStream rng(404);
    for (int instance = 0; instance < 40; ++instance) {
        WeightAssignment ignored;
        const DirectedGraph g = oracles::random_digraph(rng, 7, 14, ignored);
        Scenario s{g, {}, 2, {}, {}, 0, static_cast<NodeId>(g.node_count() - 1)};
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            EdgeModel model;
            model.context_means = Eigen::VectorXd::Constant(2, 1.0);
            model.context_vars = Eigen::VectorXd::Constant(2, 1.0);
            s.edge_models.push_back(model);
            s.edge_models.back().theta_star = oracles::random_vector(rng, 2, -2.0, 2.0);
        }
        const ContextFrame frame = generate_context(s, 1, 12);

        WeightAssignment truth;
        expected_weights(s, frame, truth);
        const auto brute = oracles::brute_force_minimax(g, truth, s.source, s.target);
        if (!brute) {
            CHECK_THROWS_AS(oracle_super_arm(s, frame), NoPathError);
            continue;
        }
        const PathSelection path = oracle_super_arm(s, frame);
        CHECK(path.bottleneck_value == *brute);
        CHECK(validate_path(g, path, s.source, s.target));
    }
}

TEST_CASE("omniscient greedy agent incurs negligible regret") {
    Scenario s = generate_synthetic(3, 3, 2, 33);
    for (EdgeModel& model : s.edge_models) {
        model.noise_var = 1e-12;
    }
    // Pin the prior (and thus the initial posterior mean) to the truth.
    draw_theta_star(s, 1);
    for (EdgeId e = 0; e < s.graph.edge_count(); ++e) {
        s.prior_means[static_cast<std::size_t>(e)] =
            s.edge_models[static_cast<std::size_t>(e)].theta_star;
        s.prior_covs[static_cast<std::size_t>(e)] = 1e-12 * Eigen::MatrixXd::Identity(2, 2);
    }

    AgentConfig config;
    config.kind = AgentKind::greedy;
    config.noise_var = 1e-12;
    const RunRecord record = run_episode(s, config, 50, 1);
    for (const StepRecord& step : record.steps) {
        CHECK(step.instant_regret <= 1e-6);
    }
}

TEST_CASE("single-route graphs give exactly zero regret for every agent") {
    const Scenario s = chain_scenario(2);
    for (const AgentKind kind : {AgentKind::thompson, AgentKind::bayes_ucb,
                                 AgentKind::lin_ucb, AgentKind::eps_greedy,
                                 AgentKind::greedy}) {
        AgentConfig config;
        config.kind = kind;
        const RunRecord record = run_episode(s, config, 30, 9);
        for (const StepRecord& step : record.steps) {
            CHECK(step.instant_regret == 0.0);
            CHECK(step.chosen_path.edges == std::vector<EdgeId>{0, 1});
        }
    }
}

TEST_CASE("cumulative regret is the exact prefix sum and non-decreasing") {
    const Scenario s = generate_synthetic(3, 3, 2, 7);
    AgentConfig config;
    config.kind = AgentKind::thompson;
    const RunRecord record = run_episode(s, config, 200, 3);

    double running = 0.0;
    for (std::size_t i = 0; i < record.steps.size(); ++i) {
        CHECK(record.steps[i].instant_regret >= -1e-9);
        running += record.steps[i].instant_regret;
        CHECK(record.cumulative_regret[i] == running);
        if (i > 0) {
            CHECK(record.cumulative_regret[i] >= record.cumulative_regret[i - 1] - 1e-9);
        }
    }
}

TEST_CASE("traversal counts balance the step paths") {
    const Scenario s = generate_synthetic(3, 3, 2, 7);
    AgentConfig config;
    config.kind = AgentKind::eps_greedy;
    const RunRecord record = run_episode(s, config, 100, 3);

    std::int64_t from_counts = 0;
    for (const std::int64_t c : record.edge_traversal_counts) from_counts += c;
    std::int64_t from_paths = 0;
    for (const StepRecord& step : record.steps) {
        from_paths += static_cast<std::int64_t>(step.chosen_path.edges.size());
    }
    CHECK(from_counts == from_paths);
}

TEST_CASE("runs are bit-identical for a fixed seed") {
    const Scenario s = generate_synthetic(3, 3, 2, 3);
    AgentConfig config;
    config.kind = AgentKind::thompson;
    const RunRecord a = run_episode(s, config, 60, 123);
    const RunRecord b = run_episode(s, config, 60, 123);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].instant_regret == b.steps[i].instant_regret);
        CHECK(a.steps[i].chosen_path.edges == b.steps[i].chosen_path.edges);
    }
    const RunRecord c = run_episode(s, config, 60, 124);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        any_difference |= a.steps[i].chosen_path.edges != c.steps[i].chosen_path.edges ||
                          a.steps[i].instant_regret != c.steps[i].instant_regret;
    }
    CHECK(any_difference);
}

TEST_CASE("aggregate of a single run equals that run") {
    const Scenario s = generate_synthetic(3, 3, 2, 3);
    ExperimentConfig config = small_config(AgentKind::greedy, 40, 1);
    const auto [records, report] = run_experiment(config, s);
    REQUIRE(records.size() == 1);
    CHECK_FALSE(records[0].failed);
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(report.mean_cumulative_regret[i] == records[0].cumulative_regret[i]);
        CHECK(report.mean_instant_regret[i] == records[0].steps[i].instant_regret);
    }
}

TEST_CASE("experiments with the same base seed agree exactly") {
    const Scenario s = generate_synthetic(3, 3, 2, 3);
    ExperimentConfig config = small_config(AgentKind::bayes_ucb, 50, 4);
    const auto [records_a, report_a] = run_experiment(config, s);
    const auto [records_b, report_b] = run_experiment(config, s);
    CHECK(report_a.mean_cumulative_regret == report_b.mean_cumulative_regret);
    CHECK(report_a.mean_instant_regret == report_b.mean_instant_regret);
    for (std::size_t i = 0; i < records_a.size(); ++i) {
        CHECK(records_a[i].cumulative_regret == records_b[i].cumulative_regret);
    }
}

TEST_CASE("boxplot medians sit inside the quartile box") {
    const Scenario s = generate_synthetic(3, 3, 2, 3);
    ExperimentConfig config = small_config(AgentKind::thompson, 60, 6);
    config.boxplot_stride = 20;
    const auto [records, report] = run_experiment(config, s);
    REQUIRE(report.cumulative_boxplots.size() == 3);
    for (const BoxplotSummary& box : report.cumulative_boxplots) {
        CHECK(box.q1 <= box.median);
        CHECK(box.median <= box.q3);
        CHECK(box.lo_whisker <= box.q1 + 1e-12);
        CHECK(box.hi_whisker >= box.q3 - 1e-12);
    }
}

TEST_CASE("write_metrics emits consistent files") {
    const Scenario s = generate_synthetic(3, 3, 2, 3);
    ExperimentConfig config = small_config(AgentKind::lin_ucb, 30, 3);
    const auto [records, report] = run_experiment(config, s);

    const auto out_dir = std::filesystem::temp_directory_path() / "bottleneck_metrics_test";
    std::filesystem::remove_all(out_dir);
    write_metrics(records, report, config, out_dir);

    std::ifstream cumulative(out_dir / "cumulative_regret.csv");
    REQUIRE(cumulative.good());
    std::string line;
    std::getline(cumulative, line);
    CHECK(line == "t,run_0,run_1,run_2,mean");
    long rows = 0;
    double max_mean_error = 0.0;
    while (std::getline(cumulative, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> values;
        std::getline(ss, field, ',');  // t
        while (std::getline(ss, field, ',')) values.push_back(std::stod(field));
        REQUIRE(values.size() == 4);
        const double mean = (values[0] + values[1] + values[2]) / 3.0;
        max_mean_error = std::max(max_mean_error, std::abs(mean - values[3]));
    }
    CHECK(rows == 30);
    CHECK(max_mean_error <= 1e-12);

    std::ifstream exploration(out_dir / "exploration.csv");
    REQUIRE(exploration.good());
    std::getline(exploration, line);
    std::int64_t total = 0;
    while (std::getline(exploration, line)) {
        total += std::stoll(line.substr(line.find(',') + 1));
    }
    std::int64_t expected = 0;
    for (const RunRecord& r : records) {
        for (const StepRecord& step : r.steps) {
            expected += static_cast<std::int64_t>(step.chosen_path.edges.size());
        }
    }
    CHECK(total == expected);

    std::ifstream boxplot(out_dir / "boxplot.csv");
    REQUIRE(boxplot.good());
    std::ifstream manifest_in(out_dir / "manifest.json");
    REQUIRE(manifest_in.good());
}

TEST_CASE("run_episode validates its configuration") {
    Scenario s = generate_synthetic(2, 2, 2, 1);
    AgentConfig config;
    CHECK_THROWS_AS(run_episode(s, config, 0, 1), std::invalid_argument);
    s.target = s.source;
    CHECK_THROWS_AS(run_episode(s, config, 10, 1), std::invalid_argument);
}

TEST_CASE("failed runs are excluded and reported") {
    // Unreachable target: every episode throws NoPathError.
    Scenario s{DirectedGraph(3, {{1, 0, 10.0}}), {}, 1, {}, {}, 0, 2};
    EdgeModel model;
    model.context_means = Eigen::VectorXd::Constant(1, 1.0);
    model.context_vars = Eigen::VectorXd::Constant(1, 1.0);
    s.edge_models.push_back(model);
    auto [means, covs] = default_priors(s.graph, 1);
    s.prior_means = std::move(means);
    s.prior_covs = std::move(covs);

    ExperimentConfig config = small_config(AgentKind::greedy, 5, 3);
    const auto [records, report] = run_experiment(config, s);
    CHECK(report.excluded_runs == std::vector<int>{0, 1, 2});
    for (const RunRecord& r : records) {
        CHECK(r.failed);
        CHECK_FALSE(r.failure_reason.empty());
    }
}
