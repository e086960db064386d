// Benchmark of the per-edge kernels (context generation, agent weight
// assignment, oracle expected weights) against their serial reference
// implementations, plus multi-run experiment throughput. Each parallel kernel
// is checked bit-for-bit against the serial one before timing.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <omp.h>

#include "bottleneck/agents.hpp"
#include "bottleneck/environment.hpp"
#include "bottleneck/harness.hpp"

using namespace bottleneck;

namespace {

struct Args {
    int width = 60;
    int height = 60;
    int d = 5;
    int reps = 30;
    std::uint64_t seed = 7;
};

double time_reps(int reps, const std::function<void()>& fn) {
    fn();  // warm-up
    const double start = omp_get_wtime();
    for (int i = 0; i < reps; ++i) fn();
    return (omp_get_wtime() - start) / reps * 1e3;  // ms per call
}

bool bitwise_equal(const WeightAssignment& a, const WeightAssignment& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
    }
    return true;
}

void print_row(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s %10.3f %10.3f %8.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "bitwise-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    Args args;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        const std::string value = argv[i + 1];
        if (key == "--grid") {
            const auto x = value.find('x');
            args.width = std::stoi(value.substr(0, x));
            args.height = std::stoi(value.substr(x + 1));
        } else if (key == "--d") {
            args.d = std::stoi(value);
        } else if (key == "--reps") {
            args.reps = std::stoi(value);
        } else if (key == "--seed") {
            args.seed = std::stoull(value);
        } else {
            std::fprintf(stderr, "usage: bench_kernels [--grid WxH] [--d D] [--reps N] [--seed S]\n");
            return 1;
        }
    }

    Scenario scenario = generate_synthetic(args.width, args.height, args.d, args.seed);
    draw_theta_star(scenario, args.seed);
    const std::uint64_t run_seed = args.seed + 1;

    std::printf("grid %dx%d, %d nodes, %d edges, d=%d, %d OpenMP threads, %d reps\n\n",
                args.width, args.height, scenario.graph.node_count(),
                scenario.graph.edge_count(), args.d, omp_get_max_threads(), args.reps);
    std::printf("%-28s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

    bool all_identical = true;

    {
        const ContextFrame serial = generate_context(scenario, 1, run_seed);
        const ContextFrame parallel = generate_context_omp(scenario, 1, run_seed);
        const bool same =
            std::memcmp(serial.contexts.data(), parallel.contexts.data(),
                        sizeof(double) * static_cast<std::size_t>(serial.contexts.size())) == 0;
        all_identical &= same;
        const double s = time_reps(args.reps, [&] { generate_context(scenario, 1, run_seed); });
        const double p =
            time_reps(args.reps, [&] { generate_context_omp(scenario, 1, run_seed); });
        print_row("generate_context", s, p, same);
    }

    const ContextFrame frame = generate_context(scenario, 1, run_seed);

    {
        WeightAssignment serial;
        WeightAssignment parallel;
        const double s = time_reps(args.reps, [&] { expected_weights(scenario, frame, serial); });
        const double p =
            time_reps(args.reps, [&] { expected_weights_omp(scenario, frame, parallel); });
        const bool same = bitwise_equal(serial, parallel);
        all_identical &= same;
        print_row("expected_weights (oracle)", s, p, same);
    }

    for (const AgentKind kind : {AgentKind::thompson, AgentKind::bayes_ucb,
                                 AgentKind::lin_ucb, AgentKind::greedy}) {
        AgentConfig config;
        config.kind = kind;
        Agent agent(config, scenario);
        WeightAssignment serial;
        WeightAssignment parallel;
        const double s = time_reps(
            args.reps, [&] { agent.assign_weights(frame, 1, run_seed, serial); });
        const double p = time_reps(
            args.reps, [&] { agent.assign_weights_omp(frame, 1, run_seed, parallel); });
        const bool same = bitwise_equal(serial, parallel);
        all_identical &= same;
        const std::string label = "assign_weights " + to_string(kind);
        print_row(label.c_str(), s, p, same);
    }

    {
        ExperimentConfig config;
        config.agent.kind = AgentKind::lin_ucb;
        config.horizon = 100;
        config.n_runs = 4;
        config.base_seed = args.seed;
        config.scenario.kind = "synthetic";

        config.threads = 1;
        const double t0 = omp_get_wtime();
        auto serial = run_experiment(config, scenario);
        const double serial_s = omp_get_wtime() - t0;

        config.threads = omp_get_max_threads();
        const double t1 = omp_get_wtime();
        auto parallel = run_experiment(config, scenario);
        const double parallel_s = omp_get_wtime() - t1;

        bool same = true;
        for (int i = 0; i < config.n_runs; ++i) {
            const auto& a = serial.first[static_cast<std::size_t>(i)].cumulative_regret;
            const auto& b = parallel.first[static_cast<std::size_t>(i)].cumulative_regret;
            same &= bitwise_equal(a, b);
        }
        all_identical &= same;
        std::printf("\n%-28s %9.3fs %9.3fs %8.2fx   %s\n",
                    "run_experiment (4 runs)", serial_s, parallel_s, serial_s / parallel_s,
                    same ? "bitwise-identical" : "MISMATCH");
    }

    if (!all_identical) {
        std::fprintf(stderr, "\nserial and parallel kernels disagree\n");
        return 1;
    }
    return 0;
}
