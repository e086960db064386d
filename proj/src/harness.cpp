#include "bottleneck/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <omp.h>

namespace bottleneck {

namespace {

double expected_bottleneck_of(const PathSelection& path, const WeightAssignment& truth) {
    double value = kNegInf;
    for (const EdgeId e : path.edges) {
        value = std::max(value, truth[static_cast<std::size_t>(e)]);
    }
    return value;
}

// Quartile with linear interpolation between order statistics (R type 7).
double quantile_type7(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted.front();
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxplotSummary summarize_box(long t, std::vector<double> values) {
    std::sort(values.begin(), values.end());
    BoxplotSummary box;
    box.t = t;
    box.median = quantile_type7(values, 0.5);
    box.q1 = quantile_type7(values, 0.25);
    box.q3 = quantile_type7(values, 0.75);
    const double iqr = box.q3 - box.q1;
    const double lo_fence = box.q1 - 1.5 * iqr;
    const double hi_fence = box.q3 + 1.5 * iqr;
    box.lo_whisker = box.q3;
    box.hi_whisker = box.q1;
    bool any_inside = false;
    for (const double v : values) {
        if (v < lo_fence || v > hi_fence) {
            box.outliers.push_back(v);
        } else {
            if (!any_inside) {
                box.lo_whisker = v;
                any_inside = true;
            }
            box.hi_whisker = v;
        }
    }
    if (!any_inside) {
        box.lo_whisker = box.median;
        box.hi_whisker = box.median;
    }
    return box;
}

}  // namespace

PathSelection oracle_super_arm(const Scenario& scenario, const ContextFrame& frame) {
    WeightAssignment truth;
    expected_weights(scenario, frame, truth);
    return minimax_path(scenario.graph, truth, scenario.source, scenario.target);
}

RunRecord run_episode(const Scenario& scenario, const AgentConfig& agent_config,
                      long horizon, std::uint64_t seed, bool parallel_kernels) {
    if (horizon < 1) {
        throw std::invalid_argument("run_episode: horizon must be >= 1");
    }
    if (scenario.source == scenario.target) {
        throw std::invalid_argument("run_episode: source must differ from target");
    }

    const double start = omp_get_wtime();

    // Per-run copy: theta* is drawn once per seed and stays fixed.
    Scenario world = scenario;
    draw_theta_star(world, seed);

    Agent agent(agent_config, world);
    agent.set_parallel_weights(parallel_kernels);

    RunRecord record;
    record.seed = seed;
    record.steps.reserve(static_cast<std::size_t>(horizon));
    record.cumulative_regret.reserve(static_cast<std::size_t>(horizon));
    record.edge_traversal_counts.assign(
        static_cast<std::size_t>(world.graph.edge_count()), 0);

    WeightAssignment truth;
    double cumulative = 0.0;
    for (long t = 1; t <= horizon; ++t) {
        const ContextFrame frame = parallel_kernels
                                       ? generate_context_omp(world, t, seed)
                                       : generate_context(world, t, seed);

        PathSelection chosen = agent.select_super_arm(frame, t, seed);
        const auto feedback = realize_weights(world, frame, chosen, seed);
        agent.observe(frame, feedback);

        if (parallel_kernels) {
            expected_weights_omp(world, frame, truth);
        } else {
            expected_weights(world, frame, truth);
        }
        const PathSelection optimal =
            minimax_path(world.graph, truth, world.source, world.target);

        StepRecord step;
        step.t = t;
        step.expected_bottleneck_chosen = expected_bottleneck_of(chosen, truth);
        step.expected_bottleneck_optimal = optimal.bottleneck_value;
        step.instant_regret =
            step.expected_bottleneck_chosen - step.expected_bottleneck_optimal;
        step.explored_random_branch = agent.last_selection_was_random();

        for (const EdgeId e : chosen.edges) {
            ++record.edge_traversal_counts[static_cast<std::size_t>(e)];
        }
        cumulative += step.instant_regret;
        record.cumulative_regret.push_back(cumulative);
        step.chosen_path = std::move(chosen);
        record.steps.push_back(std::move(step));
    }

    record.wall_time_s = omp_get_wtime() - start;
    return record;
}

std::pair<std::vector<RunRecord>, AggregateReport> run_experiment(
    const ExperimentConfig& config, const Scenario& scenario) {
    if (config.n_runs < 1) {
        throw std::invalid_argument("run_experiment: n_runs must be >= 1");
    }

    const int threads = config.threads <= 0 ? omp_get_max_threads() : config.threads;
    const bool parallel_runs = threads > 1 && config.n_runs > 1;
    const bool parallel_kernels = threads > 1 && config.n_runs == 1;

    std::vector<RunRecord> records(static_cast<std::size_t>(config.n_runs));
    const auto execute_run = [&](int i) {
        const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(i);
        try {
            records[static_cast<std::size_t>(i)] = run_episode(
                scenario, config.agent, config.horizon, seed, parallel_kernels);
        } catch (const std::exception& err) {
            records[static_cast<std::size_t>(i)].seed = seed;
            records[static_cast<std::size_t>(i)].failed = true;
            records[static_cast<std::size_t>(i)].failure_reason = err.what();
        }
    };

    if (parallel_runs) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (int i = 0; i < config.n_runs; ++i) {
            execute_run(i);
        }
    } else {
        for (int i = 0; i < config.n_runs; ++i) {
            execute_run(i);
        }
    }

    AggregateReport report;
    std::vector<const RunRecord*> ok;
    for (int i = 0; i < config.n_runs; ++i) {
        const RunRecord& r = records[static_cast<std::size_t>(i)];
        if (r.failed) {
            report.excluded_runs.push_back(i);
            std::cerr << "warning: run " << i << " (seed " << r.seed
                      << ") failed and is excluded: " << r.failure_reason << "\n";
        } else {
            ok.push_back(&r);
        }
    }

    const auto horizon = static_cast<std::size_t>(config.horizon);
    report.mean_cumulative_regret.assign(horizon, 0.0);
    report.mean_instant_regret.assign(horizon, 0.0);
    if (!ok.empty()) {
        for (std::size_t t = 0; t < horizon; ++t) {
            double cum = 0.0;
            double inst = 0.0;
            for (const RunRecord* r : ok) {
                cum += r->cumulative_regret[t];
                inst += r->steps[t].instant_regret;
            }
            report.mean_cumulative_regret[t] = cum / static_cast<double>(ok.size());
            report.mean_instant_regret[t] = inst / static_cast<double>(ok.size());
        }
        for (long t = config.boxplot_stride; t <= config.horizon;
             t += config.boxplot_stride) {
            std::vector<double> values;
            values.reserve(ok.size());
            for (const RunRecord* r : ok) {
                values.push_back(r->cumulative_regret[static_cast<std::size_t>(t - 1)]);
            }
            report.cumulative_boxplots.push_back(summarize_box(t, std::move(values)));
        }
    }
    return {std::move(records), std::move(report)};
}

}  // namespace bottleneck
