#pragma once

#include "ucap/channel.hpp"

#include <vector>

namespace ucap {

/// Settings for the constrained Blahut-Arimoto solver on a uniform input grid
/// over [0, 1] and output grid over [-b, 1+b].
struct BAConfig {
    int grid_size = 241;
    int output_grid_size = 0;  // 0: derived so output cell widths match the input spacing
    int max_iter = 20000;
    double conv_tol = 1e-10;         // per-iteration change of the capacity estimate
    double lambda_bisect_tol = 1e-6;  // on the achieved cost
    bool record_trace = false;
};

struct BAResult {
    GridDistribution dist;
    double capacity_nats = 0.0;
    double lambda = 0.0;
    double achieved_cost = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // I - lambda <c> per iteration (record_trace)
};

/// Row-sparse conditional probability matrix W(y_cell | x_i); each row is the
/// discretized uniform density over [x_i - b, x_i + b] with fractional mass in
/// boundary cells, so rows sum to 1 exactly.
struct TransitionMatrix {
    int input_size = 0;
    int output_size = 0;
    double out_lo = 0.0;
    double cell_width = 0.0;
    std::vector<int> first_cell;            // per row
    std::vector<std::vector<double>> rows;  // per row, contiguous cell weights
};

TransitionMatrix build_transition_matrix(const ChannelSpec& ch, const BAConfig& cfg);

/// Blahut-Arimoto iteration for the Lagrangian I(p) - lambda <c>, fixed lambda.
BAResult ba_fixed_lambda(const ChannelSpec& ch, const CostSpec& cost, double lambda,
                         const BAConfig& cfg);

/// Capacity under <c> <= cbar: returns the lambda = 0 solution if the
/// constraint is inactive, otherwise bisects lambda until the achieved cost
/// matches cbar within lambda_bisect_tol.
BAResult ba_constrained(const ChannelSpec& ch, const CostSpec& cost, const BAConfig& cfg);

/// Cluster grid cells with weight > mass_tol into groups no wider than
/// cluster_radius; returns mass-weighted centroids with cluster masses
/// (renormalized over the kept cells).
DiscreteDistribution support_points(const GridDistribution& dist, double mass_tol,
                                    double cluster_radius);

}  // namespace ucap
