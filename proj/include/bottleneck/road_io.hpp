#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bottleneck/environment.hpp"
#include "bottleneck/graph.hpp"

namespace bottleneck {

struct ParseError : std::runtime_error {
    ParseError(const std::string& message, int line_number)
        : std::runtime_error(message + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
    int line;
};

struct InconsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A parsed road-network CSV: graph topology plus per-edge context statistics
/// and the original string ids, kept so the file can be re-serialized.
struct RoadNetworkData {
    DirectedGraph graph;
    int d = 0;
    std::vector<std::string> node_names;  // by NodeId, first-appearance order
    std::vector<std::string> edge_names;  // by EdgeId, row order
    std::vector<double> speed_limits;     // by EdgeId; carried through, unused by the model
    Eigen::MatrixXd context_means;        // d x edge_count
    Eigen::MatrixXd context_vars;         // d x edge_count

    NodeId node_index(const std::string& name) const;  // InconsistencyError if unknown
};

/// Loads the edge-list CSV. Header:
///   edge_id,from_node,to_node,length_m,speed_limit,mean_h1,var_h1,...,mean_hD,var_hD
/// d is fixed by the number of mean/var column pairs. Node ids are arbitrary
/// strings and are re-indexed densely in order of first appearance.
RoadNetworkData load_road_network(const std::filesystem::path& path);

/// Canonical re-serialization (17 significant digits, row order by EdgeId).
void save_road_network(const RoadNetworkData& data, const std::filesystem::path& path);

/// Flat key=value sidecar next to a scenario CSV ("#" starts a comment).
/// Recognized keys: source, target, noise_var, prior_rule.
std::map<std::string, std::string> load_sidecar(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Builds a full Scenario from loaded road data: default length-scaled priors,
/// uniform noise variance, source/target resolved from node names.
/// InconsistencyError if a name does not resolve or target is unreachable.
Scenario make_scenario(const RoadNetworkData& data, const std::string& source_name,
                       const std::string& target_name, double noise_var);

/// Writes a synthetic scenario in the road CSV schema plus its sidecar.
void save_synthetic_as_road(const Scenario& scenario, const std::filesystem::path& csv_path);

}  // namespace bottleneck
