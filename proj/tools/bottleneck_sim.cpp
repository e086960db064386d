// Command-line front end: simulate experiments, generate synthetic road
// files, and inspect scenario files. Exit codes: 0 success, 1 usage/config
// error, 2 runtime failure affecting all runs.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bottleneck/agents.hpp"
#include "bottleneck/environment.hpp"
#include "bottleneck/harness.hpp"
#include "bottleneck/road_io.hpp"

namespace {

using namespace bottleneck;

struct GridSpec {
    int width = 0;
    int height = 0;
};

GridSpec parse_grid(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) {
        throw CLI::ValidationError("--grid", "expected WxH, e.g. 5x5");
    }
    try {
        GridSpec spec{std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
        if (spec.width < 2 || spec.height < 2) {
            throw CLI::ValidationError("--grid", "grid must be at least 2x2");
        }
        return spec;
    } catch (const CLI::ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw CLI::ValidationError("--grid", "expected WxH, e.g. 5x5");
    }
}

std::string default_out_dir() {
    if (const char* env = std::getenv("BOTTLENECK_OUT_DIR")) {
        return env;
    }
    return "out";
}

struct SimulateOptions {
    std::string scenario_path;
    std::string grid;
    int grid_d = 5;
    std::uint64_t grid_seed = 1;
    std::string agent = "thompson";
    double alpha = 4.0;
    std::optional<double> noise_var;
    std::optional<double> agent_noise_var;
    double quantile_clip = 1e-6;
    long horizon = 5000;
    int runs = 10;
    std::uint64_t seed = 1;
    int stride = 200;
    int threads = 0;
    std::string source;
    std::string target;
    std::string out_dir = default_out_dir();
};

int run_simulate(const SimulateOptions& opt) {
    Scenario scenario{DirectedGraph(0, {}), {}, 0, {}, {}, 0, 0};
    ScenarioDescriptor descriptor;

    try {
        if (!opt.scenario_path.empty()) {
            const RoadNetworkData data = load_road_network(opt.scenario_path);
            std::map<std::string, std::string> sidecar;
            if (std::filesystem::exists(sidecar_path(opt.scenario_path))) {
                sidecar = load_sidecar(sidecar_path(opt.scenario_path));
            }
            const auto pick = [&](const std::string& flag, const char* key) {
                if (!flag.empty()) return flag;
                const auto it = sidecar.find(key);
                return it == sidecar.end() ? std::string{} : it->second;
            };
            const std::string source = pick(opt.source, "source");
            const std::string target = pick(opt.target, "target");
            if (source.empty() || target.empty()) {
                std::cerr << "error: --source/--target required (no sidecar value found)\n";
                return 1;
            }
            double noise_var = 1.0;
            if (const auto it = sidecar.find("noise_var"); it != sidecar.end()) {
                noise_var = std::stod(it->second);
            }
            if (opt.noise_var) noise_var = *opt.noise_var;

            scenario = make_scenario(data, source, target, noise_var);
            descriptor = {"road",  opt.scenario_path, 0, 0, 0, data.d,
                          source,  target,            noise_var};
        } else {
            const GridSpec grid = parse_grid(opt.grid);
            scenario = generate_synthetic(grid.width, grid.height, opt.grid_d, opt.grid_seed);
            if (opt.noise_var) {
                for (EdgeModel& model : scenario.edge_models) {
                    model.noise_var = *opt.noise_var;
                }
            }
            descriptor = {"synthetic",
                          "",
                          grid.width,
                          grid.height,
                          opt.grid_seed,
                          opt.grid_d,
                          std::to_string(scenario.source),
                          std::to_string(scenario.target),
                          scenario.edge_models.front().noise_var};
        }
    } catch (const CLI::ValidationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }

    ExperimentConfig config;
    config.agent.kind = agent_kind_from_string(opt.agent);
    config.agent.alpha = opt.alpha;
    config.agent.noise_var = opt.agent_noise_var
                                 ? *opt.agent_noise_var
                                 : scenario.edge_models.front().noise_var;
    config.agent.quantile_clip = opt.quantile_clip;
    config.horizon = opt.horizon;
    config.n_runs = opt.runs;
    config.base_seed = opt.seed;
    config.boxplot_stride = opt.stride;
    config.threads = opt.threads;
    config.scenario = descriptor;

    try {
        auto [records, report] = run_experiment(config, scenario);
        if (static_cast<int>(report.excluded_runs.size()) == config.n_runs) {
            std::cerr << "error: all runs failed\n";
            return 2;
        }
        write_metrics(records, report, config, opt.out_dir);
        const double final_mean = report.mean_cumulative_regret.empty()
                                      ? 0.0
                                      : report.mean_cumulative_regret.back();
        std::cout << "agent=" << opt.agent << " horizon=" << config.horizon
                  << " runs=" << config.n_runs
                  << " final_mean_cumulative_regret=" << final_mean << "\n";
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
}

int run_generate(const std::string& grid_text, int d, std::uint64_t seed,
                 const std::string& out_path) {
    try {
        const GridSpec grid = parse_grid(grid_text);
        const Scenario scenario = generate_synthetic(grid.width, grid.height, d, seed);
        save_synthetic_as_road(scenario, out_path);
        std::cout << "wrote " << out_path << " (" << scenario.graph.node_count()
                  << " nodes, " << scenario.graph.edge_count() << " edges, d=" << d
                  << ") and " << sidecar_path(out_path).string() << "\n";
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}

int run_inspect(const std::string& path) {
    try {
        const RoadNetworkData data = load_road_network(path);
        double min_len = std::numeric_limits<double>::infinity();
        double max_len = 0.0;
        double sum_len = 0.0;
        for (EdgeId e = 0; e < data.graph.edge_count(); ++e) {
            const double len = data.graph.length_m(e);
            min_len = std::min(min_len, len);
            max_len = std::max(max_len, len);
            sum_len += len;
        }
        std::cout << "nodes: " << data.graph.node_count() << "\n"
                  << "edges: " << data.graph.edge_count() << "\n"
                  << "d: " << data.d << "\n";
        if (data.graph.edge_count() > 0) {
            std::cout << "length_m: min=" << min_len << " mean="
                      << sum_len / data.graph.edge_count() << " max=" << max_len << "\n";
        }
        if (std::filesystem::exists(sidecar_path(path))) {
            const auto sidecar = load_sidecar(sidecar_path(path));
            const auto src = sidecar.find("source");
            const auto dst = sidecar.find("target");
            if (src != sidecar.end() && dst != sidecar.end()) {
                const NodeId s = data.node_index(src->second);
                const NodeId t = data.node_index(dst->second);
                const bool ok = reachable(data.graph, s, t);
                std::cout << "source: " << src->second << " target: " << dst->second
                          << " reachable: " << (ok ? "yes" : "no") << "\n";
                if (!ok) {
                    std::cout << "warning: target unreachable from source\n";
                }
            }
        }
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online minimax-bottleneck path learning on stochastic road networks"};
    app.require_subcommand(1);

    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Run a multi-seed bandit experiment and write metric files");
    simulate->add_option("--scenario", sim.scenario_path,
                         "Road-network CSV (expects <file>.scenario sidecar or --source/--target)");
    simulate->add_option("--grid", sim.grid, "Synthetic WxH grid scenario, e.g. 5x5");
    simulate->add_option("--grid-d", sim.grid_d, "Context dimension for --grid")
        ->capture_default_str();
    simulate->add_option("--grid-seed", sim.grid_seed, "Seed for --grid generation")
        ->capture_default_str();
    simulate
        ->add_option("--agent", sim.agent,
                     "Agent: thompson, bayes_ucb, lin_ucb, eps_greedy, greedy")
        ->capture_default_str();
    simulate->add_option("--alpha", sim.alpha, "LinUCB exploration factor")
        ->capture_default_str();
    simulate->add_option("--noise-var", sim.noise_var,
                         "Environment observation variance (overrides sidecar)");
    simulate->add_option("--agent-noise-var", sim.agent_noise_var,
                         "Agent's assumed noise variance (defaults to the environment's)");
    simulate->add_option("--quantile-clip", sim.quantile_clip, "BayesUCB quantile clamp")
        ->capture_default_str();
    simulate->add_option("--horizon", sim.horizon, "Decision rounds per run")
        ->capture_default_str();
    simulate->add_option("--runs", sim.runs, "Number of seeded runs")
        ->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Base seed; run i uses seed base+i")
        ->capture_default_str();
    simulate->add_option("--stride", sim.stride, "Boxplot stride in timesteps")
        ->capture_default_str();
    simulate->add_option("--threads", sim.threads,
                         "OpenMP threads (0 = all hardware threads, 1 = serial)")
        ->capture_default_str();
    simulate->add_option("--source", sim.source, "Source node name (road scenarios)");
    simulate->add_option("--target", sim.target, "Target node name (road scenarios)");
    simulate->add_option("--out", sim.out_dir,
                         "Output directory (default $BOTTLENECK_OUT_DIR or ./out)");
    simulate->set_config("--config", "", "Flat key=value config file; flags win");
    simulate->allow_config_extras(CLI::config_extras_mode::error);

    std::string gen_grid = "5x5";
    int gen_d = 5;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    CLI::App* generate = app.add_subcommand(
        "generate-graph", "Write a synthetic scenario in the road CSV schema");
    generate->add_option("--grid", gen_grid, "Grid size WxH")->capture_default_str();
    generate->add_option("--d", gen_d, "Context dimension")->capture_default_str();
    generate->add_option("--seed", gen_seed, "Generation seed")->capture_default_str();
    generate->add_option("--out", gen_out, "Output CSV path")->required();

    std::string inspect_path;
    CLI::App* inspect = app.add_subcommand("inspect", "Print scenario file statistics");
    inspect->add_option("file", inspect_path, "Road-network CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::CallForAllHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }

    if (simulate->parsed()) {
        if (sim.scenario_path.empty() == sim.grid.empty()) {
            std::cerr << "error: exactly one of --scenario or --grid is required\n";
            return 1;
        }
        return run_simulate(sim);
    }
    if (generate->parsed()) {
        return run_generate(gen_grid, gen_d, gen_seed, gen_out);
    }
    return run_inspect(inspect_path);
}
