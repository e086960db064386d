#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bottleneck/agents.hpp"
#include "bottleneck/environment.hpp"
#include "bottleneck/graph.hpp"

namespace bottleneck {

struct StepRecord {
    long t = 0;
    PathSelection chosen_path;
    double instant_regret = 0.0;
    double expected_bottleneck_chosen = 0.0;
    double expected_bottleneck_optimal = 0.0;
    bool explored_random_branch = false;  // eps_greedy only
};

struct RunRecord {
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;
    std::vector<double> cumulative_regret;            // prefix sums of instant regret
    std::vector<std::int64_t> edge_traversal_counts;  // by EdgeId
    bool failed = false;
    std::string failure_reason;
    double wall_time_s = 0.0;
};

struct BoxplotSummary {
    long t = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double lo_whisker = 0.0;
    double hi_whisker = 0.0;
    std::vector<double> outliers;
};

struct AggregateReport {
    std::vector<double> mean_cumulative_regret;
    std::vector<double> mean_instant_regret;
    std::vector<BoxplotSummary> cumulative_boxplots;  // one per boxplot_stride steps
    std::vector<int> excluded_runs;
};

/// Describes where the scenario came from; echoed into the manifest.
struct ScenarioDescriptor {
    std::string kind;  // "road" or "synthetic"
    std::string path;  // road CSV path, empty for synthetic
    int grid_width = 0;
    int grid_height = 0;
    std::uint64_t grid_seed = 0;
    int d = 0;
    std::string source;
    std::string target;
    double noise_var = 1.0;
};

struct ExperimentConfig {
    AgentConfig agent;
    long horizon = 5000;
    int n_runs = 10;
    std::uint64_t base_seed = 1;
    int boxplot_stride = 200;
    int threads = 0;  // <=0: all hardware threads; 1: serial
    ScenarioDescriptor scenario;
};

/// One full episode of the learning loop: per step, sample contexts, let the
/// agent pick a super-arm, realize semi-bandit feedback, update the agent,
/// and score instant regret against the exact oracle under the true expected
/// weights. parallel_kernels switches the per-edge loops to their OpenMP
/// variants (results are identical either way).
RunRecord run_episode(const Scenario& scenario, const AgentConfig& agent_config,
                      long horizon, std::uint64_t seed, bool parallel_kernels = false);

/// Exact minimax path under the true expected weights for this frame.
PathSelection oracle_super_arm(const Scenario& scenario, const ContextFrame& frame);

/// Runs n_runs episodes with seeds base_seed + i (parallel across seeds when
/// threads allow) and aggregates. Failed runs are excluded and reported.
std::pair<std::vector<RunRecord>, AggregateReport> run_experiment(
    const ExperimentConfig& config, const Scenario& scenario);

/// Writes cumulative_regret.csv, instant_regret.csv, boxplot.csv,
/// exploration.csv and manifest.json into out_dir. Floats carry 17
/// significant digits; everything except the manifest "timing" block is
/// byte-stable for a fixed config and base seed.
void write_metrics(const std::vector<RunRecord>& records, const AggregateReport& report,
                   const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace bottleneck
