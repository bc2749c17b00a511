#pragma once

#include "ucap/channel.hpp"

#include <utility>
#include <vector>

namespace ucap {

/// Result of checking Smith's optimality conditions for a candidate input
/// distribution: i(x) = I + lambda (c(x) - cbar) on the support and
/// i(x) <= I + lambda (c(x) - cbar) everywhere on [0, 1].
struct KKTReport {
    double capacity_nats = 0.0;
    double lambda = 0.0;
    std::vector<std::pair<double, double>> equality_residuals;  // (x_j, residual)
    double max_equality_residual = 0.0;                         // absolute value
    double max_inequality_violation = 0.0;
    int check_grid_size = 0;
    double eq_tol = 0.0;
    double ineq_tol = 0.0;
    bool passed = false;
    bool has_infinite = false;  // i(x) = +inf somewhere (support gap >= 2b)
    double infinite_at = 0.0;
};

/// Evaluate i(x) exactly at every support point and on a uniform check grid.
/// lambda comes from the solver and is never re-estimated here. Equality
/// residuals are only recorded for support points with mass >= eq_support_mass_min
/// (used for discretized candidates where near-zero cells are noise).
KKTReport verify(const DiscreteDistribution& dist, double lambda, const ChannelSpec& ch,
                 const CostSpec& cost, int check_grid_size = 10001, double eq_tol = 1e-8,
                 double ineq_tol = 1e-8, double eq_support_mass_min = 0.0);

struct SegmentSlope {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double fitted_slope = 0.0;
    double formula_slope = 0.0;
    double max_deviation = 0.0;  // from the affine fit
    bool skipped = false;        // overlap sums vanish; slope formula undefined
};

/// Sample i(x) on every support segment, fit an affine function, and compare
/// the fitted slope against r log[(m_{j-1}+m_j)/(m_{j+1}+m_{j+2})]
/// (r log[m_j/m_{j+1}] for integer r), with the boundary convention
/// m_0 = 0 and m_{N+1} = 0.
std::vector<SegmentSlope> check_piecewise_linearity(const DiscreteDistribution& dist,
                                                    const ChannelSpec& ch,
                                                    int samples_per_segment = 9);

/// Same check on an explicit lattice that may contain zero-mass points (e.g.
/// the full unconstrained grid with removed points zeroed out). i(x) is affine
/// between adjacent lattice points even when the distribution skips some of
/// them, which is not true of the distribution's own support segments.
std::vector<SegmentSlope> check_piecewise_linearity(const DiscreteDistribution& dist,
                                                    const ChannelSpec& ch,
                                                    const std::vector<double>& lattice_x,
                                                    const std::vector<double>& lattice_m,
                                                    int samples_per_segment = 9);

/// Chord test over a support gap (x1, x2) of width < 2b: returns
/// min_beta i(x_beta) - [(1-beta) i(x1) + beta i(x2)]. A nonnegative value
/// confirms the concave shape of i across the gap. Returns +infinity if i is
/// infinite inside the gap (width >= 2b).
double check_gap_concavity(const DiscreteDistribution& dist, std::pair<double, double> gap,
                           const ChannelSpec& ch, const std::vector<double>& betas);

}  // namespace ucap
