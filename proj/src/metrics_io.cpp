#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "bottleneck/harness.hpp"

namespace bottleneck {

namespace {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    return out;
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<const RunRecord*>& runs,
                      const std::vector<int>& run_indices,
                      const std::vector<double>& mean_series, long horizon,
                      bool cumulative) {
    auto out = open_out(path);
    out << "t";
    for (const int i : run_indices) {
        out << ",run_" << i;
    }
    out << ",mean\n";
    for (long t = 1; t <= horizon; ++t) {
        const auto idx = static_cast<std::size_t>(t - 1);
        out << t;
        for (const RunRecord* r : runs) {
            const double v = cumulative ? r->cumulative_regret[idx]
                                        : r->steps[idx].instant_regret;
            out << ',' << format_g17(v);
        }
        out << ',' << format_g17(mean_series[idx]) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void write_metrics(const std::vector<RunRecord>& records, const AggregateReport& report,
                   const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    std::vector<const RunRecord*> runs;
    std::vector<int> run_indices;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].failed) {
            runs.push_back(&records[i]);
            run_indices.push_back(static_cast<int>(i));
        }
    }

    write_series_csv(out_dir / "cumulative_regret.csv", runs, run_indices,
                     report.mean_cumulative_regret, config.horizon, true);
    write_series_csv(out_dir / "instant_regret.csv", runs, run_indices,
                     report.mean_instant_regret, config.horizon, false);

    {
        auto out = open_out(out_dir / "boxplot.csv");
        out << "stride_index,t,median,q1,q3,lo_whisker,hi_whisker,outliers\n";
        int k = 1;
        for (const BoxplotSummary& box : report.cumulative_boxplots) {
            out << k++ << ',' << box.t << ',' << format_g17(box.median) << ','
                << format_g17(box.q1) << ',' << format_g17(box.q3) << ','
                << format_g17(box.lo_whisker) << ',' << format_g17(box.hi_whisker) << ',';
            for (std::size_t i = 0; i < box.outliers.size(); ++i) {
                if (i) out << ';';
                out << format_g17(box.outliers[i]);
            }
            out << "\n";
        }
        if (!out) throw std::runtime_error("write failed: boxplot.csv");
    }

    {
        auto out = open_out(out_dir / "exploration.csv");
        out << "edge_id,traversal_count\n";
        std::size_t edge_count = 0;
        for (const RunRecord* r : runs) {
            edge_count = std::max(edge_count, r->edge_traversal_counts.size());
        }
        for (std::size_t e = 0; e < edge_count; ++e) {
            std::int64_t total = 0;
            for (const RunRecord* r : runs) {
                total += r->edge_traversal_counts[e];
            }
            out << e << ',' << total << "\n";
        }
        if (!out) throw std::runtime_error("write failed: exploration.csv");
    }

    {
        nlohmann::json manifest;
        manifest["agent"] = {{"kind", to_string(config.agent.kind)},
                             {"alpha", config.agent.alpha},
                             {"noise_var", config.agent.noise_var},
                             {"quantile_clip", config.agent.quantile_clip}};
        manifest["horizon"] = config.horizon;
        manifest["n_runs"] = config.n_runs;
        manifest["base_seed"] = config.base_seed;
        manifest["boxplot_stride"] = config.boxplot_stride;
        manifest["threads"] = config.threads;
        manifest["scenario"] = {{"kind", config.scenario.kind},
                                {"path", config.scenario.path},
                                {"grid_width", config.scenario.grid_width},
                                {"grid_height", config.scenario.grid_height},
                                {"grid_seed", config.scenario.grid_seed},
                                {"d", config.scenario.d},
                                {"source", config.scenario.source},
                                {"target", config.scenario.target},
                                {"noise_var", config.scenario.noise_var},
                                {"prior_rule",
                                 {{"lambda_e", "length_m * 1e-2"},
                                  {"mu0", "lambda_e * ones(d)"},
                                  {"sigma0", "5 * lambda_e * identity(d)"}}}};

        nlohmann::json run_list = nlohmann::json::array();
        for (const RunRecord& r : records) {
            nlohmann::json entry;
            entry["seed"] = r.seed;
            entry["failed"] = r.failed;
            if (r.failed) entry["failure_reason"] = r.failure_reason;
            run_list.push_back(entry);
        }
        manifest["runs"] = run_list;
        manifest["excluded_runs"] = report.excluded_runs;

        // Volatile block: everything that legitimately varies between
        // invocations of the same configuration lives here.
        nlohmann::json timing;
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        timing["created_at_unix_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
        nlohmann::json per_run = nlohmann::json::array();
        double total = 0.0;
        for (const RunRecord& r : records) {
            per_run.push_back(r.wall_time_s);
            total += r.wall_time_s;
        }
        timing["per_run_wall_s"] = per_run;
        timing["total_wall_s"] = total;
        manifest["timing"] = timing;

        auto out = open_out(out_dir / "manifest.json");
        out << manifest.dump(2) << "\n";
        if (!out) throw std::runtime_error("write failed: manifest.json");
    }
}

}  // namespace bottleneck
