#include "bottleneck/environment.hpp"

#include <cmath>
#include <string>

#include "bottleneck/normal.hpp"

namespace bottleneck {

namespace {

Eigen::VectorXd sample_gaussian_vector(const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& cov, RngStream& rng) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError(
            "sample_gaussian_vector: covariance is not positive definite");
    }
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z[i] = draw_standard_normal(rng);
    }
    return mean + llt.matrixL() * z;
}

void fill_context_column(const Scenario& scenario, long t, std::uint64_t run_seed,
                         EdgeId e, Eigen::MatrixXd& out) {
    RngStream rng(derive_seed(run_seed, RngDomain::context,
                              static_cast<std::uint64_t>(t),
                              static_cast<std::uint64_t>(e)));
    const EdgeModel& model = scenario.edge_models[static_cast<std::size_t>(e)];
    for (int i = 0; i < scenario.d; ++i) {
        out(i, e) = model.context_means[i] +
                    std::sqrt(model.context_vars[i]) * draw_standard_normal(rng);
    }
}

}  // namespace

void draw_theta_star(Scenario& scenario, std::uint64_t run_seed) {
    const EdgeId edge_count = scenario.graph.edge_count();
    for (EdgeId e = 0; e < edge_count; ++e) {
        RngStream rng(derive_seed(run_seed, RngDomain::theta_draw, 0,
                                  static_cast<std::uint64_t>(e)));
        scenario.edge_models[static_cast<std::size_t>(e)].theta_star =
            sample_gaussian_vector(scenario.prior_means[static_cast<std::size_t>(e)],
                                   scenario.prior_covs[static_cast<std::size_t>(e)], rng);
    }
}

ContextFrame generate_context(const Scenario& scenario, long t, std::uint64_t run_seed) {
    ContextFrame frame;
    frame.t = t;
    frame.contexts.resize(scenario.d, scenario.graph.edge_count());
    const EdgeId edge_count = scenario.graph.edge_count();
    for (EdgeId e = 0; e < edge_count; ++e) {
        fill_context_column(scenario, t, run_seed, e, frame.contexts);
    }
    return frame;
}

ContextFrame generate_context_omp(const Scenario& scenario, long t, std::uint64_t run_seed) {
    ContextFrame frame;
    frame.t = t;
    frame.contexts.resize(scenario.d, scenario.graph.edge_count());
    const EdgeId edge_count = scenario.graph.edge_count();
#pragma omp parallel for schedule(static)
    for (EdgeId e = 0; e < edge_count; ++e) {
        fill_context_column(scenario, t, run_seed, e, frame.contexts);
    }
    return frame;
}

std::vector<std::pair<EdgeId, double>> realize_weights(const Scenario& scenario,
                                                       const ContextFrame& frame,
                                                       const PathSelection& path,
                                                       std::uint64_t run_seed) {
    std::vector<std::pair<EdgeId, double>> feedback;
    feedback.reserve(path.edges.size());
    for (const EdgeId e : path.edges) {
        const EdgeModel& model = scenario.edge_models[static_cast<std::size_t>(e)];
        RngStream rng(derive_seed(run_seed, RngDomain::noise,
                                  static_cast<std::uint64_t>(frame.t),
                                  static_cast<std::uint64_t>(e)));
        const double mean = model.theta_star.dot(frame.contexts.col(e));
        feedback.emplace_back(e, mean + std::sqrt(model.noise_var) * draw_standard_normal(rng));
    }
    return feedback;
}

double expected_weight(const Scenario& scenario, const ContextFrame& frame, EdgeId e) {
    return scenario.edge_models[static_cast<std::size_t>(e)].theta_star.dot(
        frame.contexts.col(e));
}

void expected_weights(const Scenario& scenario, const ContextFrame& frame,
                      WeightAssignment& out) {
    const EdgeId edge_count = scenario.graph.edge_count();
    out.resize(static_cast<std::size_t>(edge_count));
    for (EdgeId e = 0; e < edge_count; ++e) {
        out[static_cast<std::size_t>(e)] = expected_weight(scenario, frame, e);
    }
}

void expected_weights_omp(const Scenario& scenario, const ContextFrame& frame,
                          WeightAssignment& out) {
    const EdgeId edge_count = scenario.graph.edge_count();
    out.resize(static_cast<std::size_t>(edge_count));
#pragma omp parallel for schedule(static)
    for (EdgeId e = 0; e < edge_count; ++e) {
        out[static_cast<std::size_t>(e)] = expected_weight(scenario, frame, e);
    }
}

std::pair<std::vector<Eigen::VectorXd>, std::vector<Eigen::MatrixXd>> default_priors(
    const DirectedGraph& graph, int d) {
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    const EdgeId edge_count = graph.edge_count();
    means.reserve(static_cast<std::size_t>(edge_count));
    covs.reserve(static_cast<std::size_t>(edge_count));
    for (EdgeId e = 0; e < edge_count; ++e) {
        const double lambda = graph.length_m(e) * 1e-2;
        means.push_back(Eigen::VectorXd::Constant(d, lambda));
        covs.push_back(5.0 * lambda * Eigen::MatrixXd::Identity(d, d));
    }
    return {std::move(means), std::move(covs)};
}

Scenario generate_synthetic(int width, int height, int d, std::uint64_t seed) {
    if (width < 2 || height < 2) {
        throw std::invalid_argument("generate_synthetic: grid must be at least 2x2");
    }
    if (d < 1) {
        throw std::invalid_argument("generate_synthetic: d must be positive");
    }

    const NodeId node_count = static_cast<NodeId>(width) * static_cast<NodeId>(height);
    const auto node_at = [width](int x, int y) {
        return static_cast<NodeId>(y * width + x);
    };

    std::vector<Edge> edges;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (x + 1 < width) {
                edges.push_back({node_at(x, y), node_at(x + 1, y), 1.0});
                edges.push_back({node_at(x + 1, y), node_at(x, y), 1.0});
            }
            if (y + 1 < height) {
                edges.push_back({node_at(x, y), node_at(x, y + 1), 1.0});
                edges.push_back({node_at(x, y + 1), node_at(x, y), 1.0});
            }
        }
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        RngStream rng(derive_seed(seed, RngDomain::scenario_gen, 0, i));
        edges[i].length_m = rng.next_uniform_range(50.0, 500.0);
    }

    Scenario scenario{DirectedGraph(node_count, std::move(edges)), {}, d, {}, {},
                      node_at(0, 0), node_at(width - 1, height - 1)};

    const EdgeId edge_count = scenario.graph.edge_count();
    scenario.edge_models.resize(static_cast<std::size_t>(edge_count));
    for (EdgeId e = 0; e < edge_count; ++e) {
        RngStream rng(derive_seed(seed, RngDomain::scenario_gen, 1,
                                  static_cast<std::uint64_t>(e)));
        EdgeModel& model = scenario.edge_models[static_cast<std::size_t>(e)];
        model.context_means.resize(d);
        model.context_vars.resize(d);
        for (int i = 0; i < d; ++i) {
            model.context_means[i] = rng.next_uniform_range(5.0, 30.0);
            model.context_vars[i] = rng.next_uniform_range(0.1, 4.0);
        }
        model.noise_var = 1.0;
    }

    auto [means, covs] = default_priors(scenario.graph, d);
    scenario.prior_means = std::move(means);
    scenario.prior_covs = std::move(covs);
    return scenario;
}

}  // namespace bottleneck
