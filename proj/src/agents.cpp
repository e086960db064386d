#include "bottleneck/agents.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "bottleneck/normal.hpp"

namespace bottleneck {

std::string to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::thompson: return "thompson";
        case AgentKind::bayes_ucb: return "bayes_ucb";
        case AgentKind::lin_ucb: return "lin_ucb";
        case AgentKind::eps_greedy: return "eps_greedy";
        case AgentKind::greedy: return "greedy";
    }
    return "unknown";
}

AgentKind agent_kind_from_string(const std::string& name) {
    if (name == "thompson") return AgentKind::thompson;
    if (name == "bayes_ucb") return AgentKind::bayes_ucb;
    if (name == "lin_ucb") return AgentKind::lin_ucb;
    if (name == "eps_greedy") return AgentKind::eps_greedy;
    if (name == "greedy") return AgentKind::greedy;
    throw std::invalid_argument("unknown agent kind '" + name + "'");
}

EdgePosterior update_params(const EdgePosterior& posterior, const Eigen::VectorXd& context,
                            double observed_weight, double noise_var) {
    if (!(noise_var > 0.0)) {
        throw std::invalid_argument("update_params: noise_var must be positive");
    }

    const Eigen::VectorXd cov_context = posterior.cov * context;
    const double gain_denom = noise_var + context.dot(cov_context);

    EdgePosterior updated;
    updated.mean = posterior.mean +
                   cov_context * ((observed_weight - context.dot(posterior.mean)) / gain_denom);
    updated.cov = posterior.cov - (cov_context * cov_context.transpose()) / gain_denom;
    updated.cov = 0.5 * (updated.cov + updated.cov.transpose().eval());

    Eigen::LLT<Eigen::MatrixXd> llt(updated.cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalFailureError(
            "update_params: updated covariance lost positive definiteness");
    }
    return updated;
}

double ts_edge_weight(const EdgePosterior& posterior, const Eigen::VectorXd& context,
                      RngStream& rng) {
    Eigen::LLT<Eigen::MatrixXd> llt(posterior.cov);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError("ts_edge_weight: posterior covariance not PD");
    }
    Eigen::VectorXd z(posterior.mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z[i] = draw_standard_normal(rng);
    }
    const Eigen::VectorXd theta = posterior.mean + llt.matrixL() * z;
    return context.dot(theta);
}

double bayes_ucb_edge_weight(const EdgePosterior& posterior, const Eigen::VectorXd& context,
                             long t, double quantile_clip) {
    const double nu = std::clamp(1.0 - 1.0 / static_cast<double>(t), quantile_clip,
                                 1.0 - quantile_clip);
    const double variance = context.dot(posterior.cov * context);
    const double spread = std::sqrt(std::max(variance, 0.0));
    return context.dot(posterior.mean) - std_normal_quantile(nu) * spread;
}

double lin_ucb_edge_weight(const RidgeState& state, const Eigen::VectorXd& context,
                           double alpha) {
    Eigen::LLT<Eigen::MatrixXd> llt(state.a_matrix);
    if (llt.info() != Eigen::Success) {
        throw NumericalFailureError("lin_ucb_edge_weight: A matrix not positive definite");
    }
    // A is symmetric, so theta' c = b' A^-1 c; a single solve covers both terms.
    const Eigen::VectorXd a_inv_context = llt.solve(context);
    return state.b_vector.dot(a_inv_context) -
           alpha * std::sqrt(std::max(context.dot(a_inv_context), 0.0));
}

RidgeState lin_ucb_update(const RidgeState& state, const Eigen::VectorXd& context,
                          double observed_weight, double noise_var) {
    if (!(noise_var > 0.0)) {
        throw std::invalid_argument("lin_ucb_update: noise_var must be positive");
    }
    RidgeState updated;
    updated.a_matrix = state.a_matrix + (context * context.transpose()) / noise_var;
    updated.b_vector = state.b_vector + (observed_weight / noise_var) * context;
    return updated;
}

double eps_schedule(long t) {
    if (t < 1) {
        throw std::invalid_argument("eps_schedule: t must be >= 1");
    }
    return 1.0 / std::sqrt(static_cast<double>(t));
}

Agent::Agent(AgentConfig config, const Scenario& scenario)
    : config_(config), scenario_(&scenario) {
    const auto edge_count = static_cast<std::size_t>(scenario.graph.edge_count());
    if (config_.kind == AgentKind::lin_ucb) {
        ridges_.reserve(edge_count);
        for (std::size_t e = 0; e < edge_count; ++e) {
            ridges_.push_back({Eigen::MatrixXd::Identity(scenario.d, scenario.d),
                               Eigen::VectorXd::Zero(scenario.d)});
        }
    } else {
        posteriors_.reserve(edge_count);
        for (std::size_t e = 0; e < edge_count; ++e) {
            posteriors_.push_back({scenario.prior_means[e], scenario.prior_covs[e]});
        }
    }
}

double Agent::edge_weight(EdgeId e, const ContextFrame& frame, long t,
                          std::uint64_t run_seed) const {
    const Eigen::VectorXd context = frame.contexts.col(e);
    switch (config_.kind) {
        case AgentKind::thompson: {
            RngStream rng(derive_seed(run_seed, RngDomain::ts_sample,
                                      static_cast<std::uint64_t>(t),
                                      static_cast<std::uint64_t>(e)));
            return ts_edge_weight(posteriors_[static_cast<std::size_t>(e)], context, rng);
        }
        case AgentKind::bayes_ucb:
            return bayes_ucb_edge_weight(posteriors_[static_cast<std::size_t>(e)], context, t,
                                         config_.quantile_clip);
        case AgentKind::lin_ucb:
            return lin_ucb_edge_weight(ridges_[static_cast<std::size_t>(e)], context,
                                       config_.alpha);
        case AgentKind::eps_greedy:
        case AgentKind::greedy:
            return context.dot(posteriors_[static_cast<std::size_t>(e)].mean);
    }
    throw std::logic_error("edge_weight: unhandled agent kind");
}

void Agent::assign_weights(const ContextFrame& frame, long t, std::uint64_t run_seed,
                           WeightAssignment& out) const {
    const EdgeId edge_count = scenario_->graph.edge_count();
    out.resize(static_cast<std::size_t>(edge_count));
    for (EdgeId e = 0; e < edge_count; ++e) {
        out[static_cast<std::size_t>(e)] = edge_weight(e, frame, t, run_seed);
    }
}

void Agent::assign_weights_omp(const ContextFrame& frame, long t, std::uint64_t run_seed,
                               WeightAssignment& out) const {
    const EdgeId edge_count = scenario_->graph.edge_count();
    out.resize(static_cast<std::size_t>(edge_count));
#pragma omp parallel for schedule(static)
    for (EdgeId e = 0; e < edge_count; ++e) {
        out[static_cast<std::size_t>(e)] = edge_weight(e, frame, t, run_seed);
    }
}

PathSelection Agent::select_super_arm(const ContextFrame& frame, long t,
                                      std::uint64_t run_seed) {
    last_random_ = false;
    if (parallel_weights_) {
        assign_weights_omp(frame, t, run_seed, weight_scratch_);
    } else {
        assign_weights(frame, t, run_seed, weight_scratch_);
    }

    if (config_.kind == AgentKind::eps_greedy) {
        RngStream coin(derive_seed(run_seed, RngDomain::eps_coin,
                                   static_cast<std::uint64_t>(t), 0));
        if (coin.next_uniform() < eps_schedule(t)) {
            return explore_through_random_edge(t, run_seed, weight_scratch_);
        }
    }
    return minimax_path(scenario_->graph, weight_scratch_, scenario_->source,
                        scenario_->target);
}

PathSelection Agent::explore_through_random_edge(long t, std::uint64_t run_seed,
                                                 const WeightAssignment& mean_weights) {
    const DirectedGraph& graph = scenario_->graph;
    const EdgeId edge_count = graph.edge_count();
    RngStream picker(derive_seed(run_seed, RngDomain::eps_coin,
                                 static_cast<std::uint64_t>(t), 1));

    for (EdgeId attempt = 0; attempt < edge_count; ++attempt) {
        const EdgeId forced =
            static_cast<EdgeId>(picker.next_below(static_cast<std::uint64_t>(edge_count)));
        const NodeId a = graph.from(forced);
        const NodeId b = graph.to(forced);

        const auto head = try_minimax_path(graph, mean_weights, scenario_->source, a);
        if (!head) continue;
        const auto tail = try_minimax_path(graph, mean_weights, b, scenario_->target);
        if (!tail) continue;

        PathSelection combined;
        combined.edges.reserve(head->edges.size() + 1 + tail->edges.size());
        combined.edges.insert(combined.edges.end(), head->edges.begin(), head->edges.end());
        combined.edges.push_back(forced);
        combined.edges.insert(combined.edges.end(), tail->edges.begin(), tail->edges.end());

        // Concatenation must remain a simple path; otherwise resample.
        std::unordered_set<NodeId> visited{scenario_->source};
        bool simple = true;
        NodeId cursor = scenario_->source;
        for (const EdgeId e : combined.edges) {
            cursor = graph.to(e);
            if (!visited.insert(cursor).second) {
                simple = false;
                break;
            }
        }
        if (!simple) continue;

        combined.bottleneck_edge = combined.edges.front();
        combined.bottleneck_value = mean_weights[static_cast<std::size_t>(combined.edges.front())];
        for (const EdgeId e : combined.edges) {
            const double w = mean_weights[static_cast<std::size_t>(e)];
            if (w > combined.bottleneck_value) {
                combined.bottleneck_value = w;
                combined.bottleneck_edge = e;
            }
        }
        last_random_ = true;
        return combined;
    }

    // No random edge admits a valid path; fall back to the greedy selection.
    return minimax_path(scenario_->graph, mean_weights, scenario_->source, scenario_->target);
}

void Agent::observe(const ContextFrame& frame,
                    const std::vector<std::pair<EdgeId, double>>& feedback) {
    for (const auto& [e, w] : feedback) {
        const Eigen::VectorXd context = frame.contexts.col(e);
        if (config_.kind == AgentKind::lin_ucb) {
            ridges_[static_cast<std::size_t>(e)] = lin_ucb_update(
                ridges_[static_cast<std::size_t>(e)], context, w, config_.noise_var);
        } else {
            posteriors_[static_cast<std::size_t>(e)] = update_params(
                posteriors_[static_cast<std::size_t>(e)], context, w, config_.noise_var);
        }
    }
}

}  // namespace bottleneck
