#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bottleneck/graph.hpp"
#include "bottleneck/rng.hpp"

namespace bottleneck {

/// Ground-truth linear-Gaussian model of one edge. theta_star stays hidden
/// from agents; only the regret oracle reads it.
struct EdgeModel {
    Eigen::VectorXd theta_star;     // empty until draw_theta_star
    double noise_var = 1.0;         // observation variance
    Eigen::VectorXd context_means;  // per-coordinate context mean
    Eigen::VectorXd context_vars;   // per-coordinate context variance
};

/// Contexts for one timestep, one d-dimensional column per edge.
struct ContextFrame {
    long t = 0;
    Eigen::MatrixXd contexts;  // d x edge_count
};

/// The full simulated world for one experiment: topology, hidden edge models,
/// Gaussian priors, and the query endpoints. Immutable once a run started.
struct Scenario {
    DirectedGraph graph;
    std::vector<EdgeModel> edge_models;     // by EdgeId
    int d = 0;
    std::vector<Eigen::VectorXd> prior_means;  // by EdgeId
    std::vector<Eigen::MatrixXd> prior_covs;   // by EdgeId, symmetric PD
    NodeId source = 0;
    NodeId target = 0;
};

struct NotPositiveDefiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Draws theta*_e ~ N(prior_mean_e, prior_cov_e) independently per edge via a
/// Cholesky factor and stores it in the scenario's edge models. One draw per
/// run; the hidden parameters stay fixed while the agent learns.
void draw_theta_star(Scenario& scenario, std::uint64_t run_seed);

/// Context c_{t,e}(i) ~ N(mean_i_e, var_i_e), independent across coordinates,
/// edges and timesteps.
ContextFrame generate_context(const Scenario& scenario, long t, std::uint64_t run_seed);
ContextFrame generate_context_omp(const Scenario& scenario, long t, std::uint64_t run_seed);

/// Semi-bandit feedback: one noisy weight per traversed edge, nothing else.
/// w_t(e) ~ N(c_{t,e}' theta*_e, noise_var_e), keyed by (run, t, e).
std::vector<std::pair<EdgeId, double>> realize_weights(const Scenario& scenario,
                                                       const ContextFrame& frame,
                                                       const PathSelection& path,
                                                       std::uint64_t run_seed);

/// True expected weight c_{t,e}' theta*_e. Regret-oracle use only.
double expected_weight(const Scenario& scenario, const ContextFrame& frame, EdgeId e);

/// Expected weights for every edge at once (the oracle's weight kernel).
void expected_weights(const Scenario& scenario, const ContextFrame& frame,
                      WeightAssignment& out);
void expected_weights_omp(const Scenario& scenario, const ContextFrame& frame,
                          WeightAssignment& out);

/// Length-scaled priors: lambda_e = length_m * 1e-2, mean lambda_e * ones(d),
/// covariance 5 * lambda_e * I_d.
std::pair<std::vector<Eigen::VectorXd>, std::vector<Eigen::MatrixXd>> default_priors(
    const DirectedGraph& graph, int d);

/// Bidirectional width x height grid scenario: lengths in [50, 500] m,
/// context means in [5, 30], variances in [0.1, 4], default priors, source at
/// one corner and target at the opposite one.
Scenario generate_synthetic(int width, int height, int d, std::uint64_t seed);

}  // namespace bottleneck
