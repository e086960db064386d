#include "bottleneck/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <unordered_set>
#include <utility>

namespace bottleneck {

DirectedGraph::DirectedGraph(NodeId node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
    if (node_count_ < 0) {
        throw std::invalid_argument("DirectedGraph: negative node count");
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.from < 0 || e.from >= node_count_ || e.to < 0 || e.to >= node_count_) {
            throw std::invalid_argument("DirectedGraph: edge " + std::to_string(i) +
                                        " references a node outside [0, node_count)");
        }
        if (!(e.length_m > 0.0)) {
            throw std::invalid_argument("DirectedGraph: edge " + std::to_string(i) +
                                        " has non-positive length");
        }
    }

    adj_offsets_.assign(static_cast<std::size_t>(node_count_) + 1, 0);
    for (const Edge& e : edges_) {
        ++adj_offsets_[static_cast<std::size_t>(e.from) + 1];
    }
    for (std::size_t u = 0; u < static_cast<std::size_t>(node_count_); ++u) {
        adj_offsets_[u + 1] += adj_offsets_[u];
    }
    adj_edges_.resize(edges_.size());
    std::vector<std::int32_t> cursor(adj_offsets_.begin(), adj_offsets_.end() - 1);
    for (EdgeId e = 0; e < edge_count(); ++e) {
        adj_edges_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(from(e))]++)] = e;
    }
}

std::optional<PathSelection> try_minimax_path(const DirectedGraph& graph,
                                              const WeightAssignment& weights,
                                              NodeId source, NodeId target) {
    if (!graph.valid_node(source) || !graph.valid_node(target)) {
        throw std::invalid_argument("minimax_path: source or target out of range");
    }
    if (weights.size() != static_cast<std::size_t>(graph.edge_count())) {
        throw std::invalid_argument("minimax_path: weight assignment does not cover the graph");
    }
    if (source == target) {
        return PathSelection{};
    }

    const double inf = std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::size_t>(graph.node_count());
    std::vector<double> label(n, inf);
    std::vector<EdgeId> pred(n, kNoEdge);
    std::vector<char> settled(n, 0);

    using QueueItem = std::pair<double, NodeId>;
    std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;

    label[static_cast<std::size_t>(source)] = kNegInf;
    queue.emplace(kNegInf, source);

    while (!queue.empty()) {
        const auto [lab, u] = queue.top();
        queue.pop();
        if (settled[static_cast<std::size_t>(u)]) continue;
        settled[static_cast<std::size_t>(u)] = 1;
        if (u == target) break;

        for (const EdgeId e : graph.out_edges(u)) {
            const NodeId v = graph.to(e);
            if (settled[static_cast<std::size_t>(v)]) continue;
            const double candidate = std::max(lab, weights[static_cast<std::size_t>(e)]);
            if (candidate < label[static_cast<std::size_t>(v)]) {
                label[static_cast<std::size_t>(v)] = candidate;
                pred[static_cast<std::size_t>(v)] = e;
                queue.emplace(candidate, v);
            }
        }
    }

    if (!settled[static_cast<std::size_t>(target)]) {
        return std::nullopt;
    }

    PathSelection path;
    for (NodeId v = target; v != source;) {
        const EdgeId e = pred[static_cast<std::size_t>(v)];
        path.edges.push_back(e);
        v = graph.from(e);
    }
    std::reverse(path.edges.begin(), path.edges.end());

    path.bottleneck_edge = path.edges.front();
    path.bottleneck_value = weights[static_cast<std::size_t>(path.edges.front())];
    for (const EdgeId e : path.edges) {
        const double w = weights[static_cast<std::size_t>(e)];
        if (w > path.bottleneck_value) {
            path.bottleneck_value = w;
            path.bottleneck_edge = e;
        }
    }
    return path;
}

PathSelection minimax_path(const DirectedGraph& graph, const WeightAssignment& weights,
                           NodeId source, NodeId target) {
    auto path = try_minimax_path(graph, weights, source, target);
    if (!path) {
        throw NoPathError("minimax_path: target " + std::to_string(target) +
                          " unreachable from source " + std::to_string(source));
    }
    return std::move(*path);
}

bool reachable(const DirectedGraph& graph, NodeId source, NodeId target) {
    if (!graph.valid_node(source) || !graph.valid_node(target)) return false;
    if (source == target) return true;
    std::vector<char> seen(static_cast<std::size_t>(graph.node_count()), 0);
    std::vector<NodeId> stack{source};
    seen[static_cast<std::size_t>(source)] = 1;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        for (const EdgeId e : graph.out_edges(u)) {
            const NodeId v = graph.to(e);
            if (seen[static_cast<std::size_t>(v)]) continue;
            if (v == target) return true;
            seen[static_cast<std::size_t>(v)] = 1;
            stack.push_back(v);
        }
    }
    return false;
}

bool validate_path(const DirectedGraph& graph, const PathSelection& path,
                   NodeId source, NodeId target) {
    if (!graph.valid_node(source) || !graph.valid_node(target)) return false;

    if (path.edges.empty()) {
        return source == target && path.bottleneck_edge == kNoEdge;
    }

    std::unordered_set<NodeId> visited;
    visited.insert(source);
    NodeId cursor = source;
    bool bottleneck_on_path = false;
    for (const EdgeId e : path.edges) {
        if (!graph.valid_edge(e)) return false;
        if (graph.from(e) != cursor) return false;
        cursor = graph.to(e);
        if (!visited.insert(cursor).second) return false;
        if (e == path.bottleneck_edge) bottleneck_on_path = true;
    }
    return cursor == target && bottleneck_on_path;
}

}  // namespace bottleneck
