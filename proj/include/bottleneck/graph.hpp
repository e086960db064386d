#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace bottleneck {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

inline constexpr EdgeId kNoEdge = -1;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Edge {
    NodeId from = 0;
    NodeId to = 0;
    double length_m = 0.0;
};

/// Immutable directed graph with dense node/edge ids and a CSR adjacency.
/// Parallel edges are allowed; every edge length must be positive.
class DirectedGraph {
public:
    DirectedGraph(NodeId node_count, std::vector<Edge> edges);

    NodeId node_count() const { return node_count_; }
    EdgeId edge_count() const { return static_cast<EdgeId>(edges_.size()); }

    NodeId from(EdgeId e) const { return edges_[static_cast<std::size_t>(e)].from; }
    NodeId to(EdgeId e) const { return edges_[static_cast<std::size_t>(e)].to; }
    double length_m(EdgeId e) const { return edges_[static_cast<std::size_t>(e)].length_m; }

    std::span<const EdgeId> out_edges(NodeId u) const {
        const auto begin = adj_offsets_[static_cast<std::size_t>(u)];
        const auto end = adj_offsets_[static_cast<std::size_t>(u) + 1];
        return {adj_edges_.data() + begin, static_cast<std::size_t>(end - begin)};
    }

    bool valid_node(NodeId v) const { return v >= 0 && v < node_count_; }
    bool valid_edge(EdgeId e) const { return e >= 0 && e < edge_count(); }

private:
    NodeId node_count_;
    std::vector<Edge> edges_;
    std::vector<std::int32_t> adj_offsets_;
    std::vector<EdgeId> adj_edges_;
};

/// One weight per EdgeId. Values may be negative: optimistic agents subtract
/// confidence terms, and max-relaxation stays correct for arbitrary reals.
using WeightAssignment = std::vector<double>;

/// A simple directed source->target path plus its widest edge under the
/// weights it was selected with. An empty path (source == target) carries the
/// -infinity sentinel and no bottleneck edge.
struct PathSelection {
    std::vector<EdgeId> edges;
    EdgeId bottleneck_edge = kNoEdge;
    double bottleneck_value = kNegInf;

    bool empty() const { return edges.empty(); }
};

struct NoPathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimax path: minimizes, over all source->target paths, the maximum edge
/// weight. Dijkstra with the relaxation dist[v] = max(dist[u], w(u,v)); the
/// label is monotone along any path, so negative weights are fine. The queue
/// orders by (label, node index) and a tied label never replaces a
/// predecessor, which pins down one path among equals.
std::optional<PathSelection> try_minimax_path(const DirectedGraph& graph,
                                              const WeightAssignment& weights,
                                              NodeId source, NodeId target);

/// Same as try_minimax_path but throws NoPathError when target is unreachable.
PathSelection minimax_path(const DirectedGraph& graph, const WeightAssignment& weights,
                           NodeId source, NodeId target);

/// Structural check of the PathSelection invariants: contiguous edges from
/// source to target, no repeated node, bottleneck edge on the path. Weight
/// consistency is not checked here (the selecting weights are not passed in).
bool validate_path(const DirectedGraph& graph, const PathSelection& path,
                   NodeId source, NodeId target);

/// BFS reachability along directed edges.
bool reachable(const DirectedGraph& graph, NodeId source, NodeId target);

}  // namespace bottleneck
