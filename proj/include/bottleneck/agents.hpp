#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bottleneck/environment.hpp"
#include "bottleneck/graph.hpp"
#include "bottleneck/rng.hpp"

namespace bottleneck {

/// Gaussian belief N(mean, cov) over one edge's hidden parameter vector.
/// cov stays symmetric positive definite; it is re-symmetrized after every
/// update and checked with a Cholesky factorization.
struct EdgePosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// Ridge-regression sufficient statistics A = I + sum cc'/nv, b = sum wc/nv.
struct RidgeState {
    Eigen::MatrixXd a_matrix;
    Eigen::VectorXd b_vector;
};

enum class AgentKind { thompson, bayes_ucb, lin_ucb, eps_greedy, greedy };

std::string to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& name);

struct AgentConfig {
    AgentKind kind = AgentKind::thompson;
    double alpha = 4.0;           // lin_ucb exploration factor
    double noise_var = 1.0;       // assumed known observation variance
    double quantile_clip = 1e-6;  // bayes_ucb quantile clamp
};

struct NumericalFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Conjugate Gaussian update
///   cov'  = (cov^-1 + cc'/nv)^-1
///   mean' = cov' (cov^-1 mean + wc/nv)
/// computed in the equivalent rank-one (Kalman gain) form, which avoids the
/// explicit inversions. Throws NumericalFailureError if the updated
/// covariance is no longer positive definite.
EdgePosterior update_params(const EdgePosterior& posterior, const Eigen::VectorXd& context,
                            double observed_weight, double noise_var);

/// Thompson weight: sample theta from N(mean, cov) via Cholesky, return
/// context' theta. A fresh draw per edge per timestep.
double ts_edge_weight(const EdgePosterior& posterior, const Eigen::VectorXd& context,
                      RngStream& rng);

/// BayesUCB weight: context' mean - Q(nu) * sqrt(context' cov context) with
/// nu = clamp(1 - 1/t, clip, 1 - clip). Lower quantile because this is a loss.
double bayes_ucb_edge_weight(const EdgePosterior& posterior, const Eigen::VectorXd& context,
                             long t, double quantile_clip = 1e-6);

/// LinUCB weight: theta = A^-1 b (solved, not inverted), value
/// theta' context - alpha * sqrt(context' A^-1 context).
double lin_ucb_edge_weight(const RidgeState& state, const Eigen::VectorXd& context,
                           double alpha);

RidgeState lin_ucb_update(const RidgeState& state, const Eigen::VectorXd& context,
                          double observed_weight, double noise_var);

/// Decaying exploration probability t^(-1/2).
double eps_schedule(long t);

/// One bandit policy bound to a scenario: owns per-edge posterior or ridge
/// state, assigns per-edge weights, and picks the minimax path. The scenario
/// must outlive the agent.
class Agent {
public:
    Agent(AgentConfig config, const Scenario& scenario);

    /// Serial reference weight kernel: one internal weight per edge.
    void assign_weights(const ContextFrame& frame, long t, std::uint64_t run_seed,
                        WeightAssignment& out) const;
    /// OpenMP weight kernel; bit-identical to the serial reference because
    /// per-edge draws come from (t, e)-keyed streams.
    void assign_weights_omp(const ContextFrame& frame, long t, std::uint64_t run_seed,
                            WeightAssignment& out) const;

    PathSelection select_super_arm(const ContextFrame& frame, long t, std::uint64_t run_seed);

    /// Semi-bandit update: consumes feedback for exactly the traversed edges.
    void observe(const ContextFrame& frame,
                 const std::vector<std::pair<EdgeId, double>>& feedback);

    bool last_selection_was_random() const { return last_random_; }
    void set_parallel_weights(bool enabled) { parallel_weights_ = enabled; }

    const AgentConfig& config() const { return config_; }
    const EdgePosterior& posterior(EdgeId e) const {
        return posteriors_[static_cast<std::size_t>(e)];
    }
    const RidgeState& ridge(EdgeId e) const { return ridges_[static_cast<std::size_t>(e)]; }

private:
    double edge_weight(EdgeId e, const ContextFrame& frame, long t,
                       std::uint64_t run_seed) const;
    PathSelection explore_through_random_edge(long t, std::uint64_t run_seed,
                                              const WeightAssignment& mean_weights);

    AgentConfig config_;
    const Scenario* scenario_;
    std::vector<EdgePosterior> posteriors_;  // all kinds except lin_ucb
    std::vector<RidgeState> ridges_;         // lin_ucb only
    WeightAssignment weight_scratch_;
    bool last_random_ = false;
    bool parallel_weights_ = false;
};

}  // namespace bottleneck
