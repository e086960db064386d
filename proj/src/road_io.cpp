#include "bottleneck/road_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace bottleneck {

namespace {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, const char* what, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("cannot parse ") + what + " value '" + s + "'", line);
    }
}

std::string strip(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

NodeId RoadNetworkData::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < node_names.size(); ++i) {
        if (node_names[i] == name) return static_cast<NodeId>(i);
    }
    throw InconsistencyError("node '" + name + "' is not declared by any edge row");
}

RoadNetworkData load_road_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open road network file " + path.string(), 0);
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty file " + path.string(), 1);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_csv_row(line);
    constexpr int kFixedColumns = 5;
    if (header.size() < kFixedColumns + 2 || (header.size() - kFixedColumns) % 2 != 0) {
        throw ParseError("header must be edge_id,from_node,to_node,length_m,speed_limit"
                         " followed by mean_h*/var_h* pairs",
                         1);
    }
    static const char* kExpected[kFixedColumns] = {"edge_id", "from_node", "to_node",
                                                   "length_m", "speed_limit"};
    for (int i = 0; i < kFixedColumns; ++i) {
        if (header[static_cast<std::size_t>(i)] != kExpected[i]) {
            throw ParseError(std::string("unexpected header column '") +
                                 header[static_cast<std::size_t>(i)] + "', want '" +
                                 kExpected[i] + "'",
                             1);
        }
    }
    const int d = static_cast<int>((header.size() - kFixedColumns) / 2);

    std::vector<std::string> node_names;
    std::unordered_map<std::string, NodeId> node_ids;
    std::unordered_map<std::string, int> edge_rows;
    const auto intern_node = [&](const std::string& name) {
        auto [it, inserted] = node_ids.try_emplace(name, static_cast<NodeId>(node_names.size()));
        if (inserted) node_names.push_back(name);
        return it->second;
    };

    std::vector<Edge> edges;
    std::vector<std::string> edge_names;
    std::vector<double> speed_limits;
    std::vector<std::vector<double>> stat_rows;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (strip(line).empty()) continue;
        const auto fields = split_csv_row(line);
        if (fields.size() != header.size()) {
            throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(header.size()),
                             line_no);
        }
        const std::string& edge_name = fields[0];
        if (edge_name.empty()) throw ParseError("empty edge_id", line_no);
        if (!edge_rows.try_emplace(edge_name, line_no).second) {
            throw InconsistencyError("duplicate edge_id '" + edge_name + "' at line " +
                                     std::to_string(line_no));
        }
        if (fields[1].empty() || fields[2].empty()) {
            throw InconsistencyError("edge '" + edge_name + "' references an undeclared node (line " +
                                     std::to_string(line_no) + ")");
        }
        Edge edge;
        edge.from = intern_node(fields[1]);
        edge.to = intern_node(fields[2]);
        edge.length_m = parse_double(fields[3], "length_m", line_no);
        if (!(edge.length_m > 0.0)) {
            throw ParseError("length_m must be positive", line_no);
        }
        speed_limits.push_back(parse_double(fields[4], "speed_limit", line_no));

        std::vector<double> stats;
        stats.reserve(static_cast<std::size_t>(2 * d));
        for (int i = 0; i < 2 * d; ++i) {
            const char* what = (i % 2 == 0) ? "mean" : "var";
            const double v = parse_double(fields[static_cast<std::size_t>(kFixedColumns + i)],
                                          what, line_no);
            if (i % 2 == 1 && v < 0.0) {
                throw ParseError("variance must be non-negative", line_no);
            }
            stats.push_back(v);
        }

        edges.push_back(edge);
        edge_names.push_back(edge_name);
        stat_rows.push_back(std::move(stats));
    }

    const auto edge_count = static_cast<EdgeId>(edges.size());
    RoadNetworkData data{DirectedGraph(static_cast<NodeId>(node_names.size()), std::move(edges)),
                         d,
                         std::move(node_names),
                         std::move(edge_names),
                         std::move(speed_limits),
                         Eigen::MatrixXd(d, edge_count),
                         Eigen::MatrixXd(d, edge_count)};
    for (EdgeId e = 0; e < edge_count; ++e) {
        for (int i = 0; i < d; ++i) {
            data.context_means(i, e) = stat_rows[static_cast<std::size_t>(e)][2 * i];
            data.context_vars(i, e) = stat_rows[static_cast<std::size_t>(e)][2 * i + 1];
        }
    }
    return data;
}

void save_road_network(const RoadNetworkData& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << "edge_id,from_node,to_node,length_m,speed_limit";
    for (int i = 1; i <= data.d; ++i) {
        out << ",mean_h" << i << ",var_h" << i;
    }
    out << "\n";
    for (EdgeId e = 0; e < data.graph.edge_count(); ++e) {
        out << data.edge_names[static_cast<std::size_t>(e)] << ','
            << data.node_names[static_cast<std::size_t>(data.graph.from(e))] << ','
            << data.node_names[static_cast<std::size_t>(data.graph.to(e))] << ','
            << format_g17(data.graph.length_m(e)) << ','
            << format_g17(data.speed_limits[static_cast<std::size_t>(e)]);
        for (int i = 0; i < data.d; ++i) {
            out << ',' << format_g17(data.context_means(i, e)) << ','
                << format_g17(data.context_vars(i, e));
        }
        out << "\n";
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p += ".scenario";
    return p;
}

std::map<std::string, std::string> load_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open sidecar file " + path.string());
    }
    std::map<std::string, std::string> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = strip(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ParseError("sidecar line is not key=value", line_no);
        }
        values[strip(trimmed.substr(0, eq))] = strip(trimmed.substr(eq + 1));
    }
    return values;
}

Scenario make_scenario(const RoadNetworkData& data, const std::string& source_name,
                       const std::string& target_name, double noise_var) {
    if (!(noise_var > 0.0)) {
        throw std::invalid_argument("make_scenario: noise_var must be positive");
    }
    const NodeId source = data.node_index(source_name);
    const NodeId target = data.node_index(target_name);
    if (source == target) {
        throw InconsistencyError("source and target must differ ('" + source_name + "')");
    }
    if (!reachable(data.graph, source, target)) {
        throw InconsistencyError("target '" + target_name + "' unreachable from source '" +
                                 source_name + "'");
    }

    Scenario scenario{data.graph, {}, data.d, {}, {}, source, target};
    const EdgeId edge_count = data.graph.edge_count();
    scenario.edge_models.resize(static_cast<std::size_t>(edge_count));
    for (EdgeId e = 0; e < edge_count; ++e) {
        EdgeModel& model = scenario.edge_models[static_cast<std::size_t>(e)];
        model.context_means = data.context_means.col(e);
        model.context_vars = data.context_vars.col(e);
        model.noise_var = noise_var;
    }
    auto [means, covs] = default_priors(data.graph, data.d);
    scenario.prior_means = std::move(means);
    scenario.prior_covs = std::move(covs);
    return scenario;
}

void save_synthetic_as_road(const Scenario& scenario, const std::filesystem::path& csv_path) {
    RoadNetworkData data{scenario.graph,
                         scenario.d,
                         {},
                         {},
                         std::vector<double>(static_cast<std::size_t>(scenario.graph.edge_count()), 50.0),
                         Eigen::MatrixXd(scenario.d, scenario.graph.edge_count()),
                         Eigen::MatrixXd(scenario.d, scenario.graph.edge_count())};
    data.node_names.reserve(static_cast<std::size_t>(scenario.graph.node_count()));
    for (NodeId v = 0; v < scenario.graph.node_count(); ++v) {
        data.node_names.push_back("n" + std::to_string(v));
    }
    data.edge_names.reserve(static_cast<std::size_t>(scenario.graph.edge_count()));
    for (EdgeId e = 0; e < scenario.graph.edge_count(); ++e) {
        data.edge_names.push_back("e" + std::to_string(e));
        data.context_means.col(e) = scenario.edge_models[static_cast<std::size_t>(e)].context_means;
        data.context_vars.col(e) = scenario.edge_models[static_cast<std::size_t>(e)].context_vars;
    }
    save_road_network(data, csv_path);

    std::ofstream side(sidecar_path(csv_path), std::ios::trunc);
    if (!side) {
        throw std::runtime_error("cannot open for writing: " + sidecar_path(csv_path).string());
    }
    side << "source=" << data.node_names[static_cast<std::size_t>(scenario.source)] << "\n"
         << "target=" << data.node_names[static_cast<std::size_t>(scenario.target)] << "\n"
         << "noise_var=" << format_g17(scenario.edge_models.empty()
                                           ? 1.0
                                           : scenario.edge_models.front().noise_var)
         << "\n"
         << "prior_rule=length_scaled\n";
}

}  // namespace bottleneck
