#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ucap {

/// Additive uniform noise channel Y = X + N with N ~ Uniform(-b, b) and
/// peak-amplitude-constrained input X in [0, 1]. The inverse width r = 1/(2b)
/// splits into an integer part n = floor(r) and a fractional part rho = r - n.
/// When r is within eps_r of an integer, rho is treated as exactly 0.
struct ChannelSpec {
    double b = 0.0;
    double r = 0.0;
    int n = 0;
    double rho = 0.0;
    bool is_integer_r = false;

    static ChannelSpec from_r(double r, double eps_r = 1e-9);
    static ChannelSpec from_b(double b, double eps_r = 1e-9);

    /// Output alphabet D_Y = [-b, 1+b].
    double output_lo() const { return -b; }
    double output_hi() const { return 1.0 + b; }
};

/// Power constraint E[x^alpha] <= cbar with cost c(x) = x^alpha, alpha > 0.
struct CostSpec {
    double alpha = 1.0;
    double cbar = 1.0;

    CostSpec(double alpha_, double cbar_);

    double cost(double x) const { return std::pow(x, alpha); }
};

struct MassPoint {
    double x;
    double m;
};

/// Finite input distribution: strictly increasing positions in [0, 1] with
/// nonnegative masses summing to one. Zero-mass points are dropped on
/// construction.
class DiscreteDistribution {
public:
    DiscreteDistribution() = default;
    DiscreteDistribution(std::vector<double> positions, std::vector<double> masses);

    static DiscreteDistribution point_mass(double x);

    std::size_t size() const { return points_.size(); }
    double x(std::size_t j) const { return points_[j].x; }
    double m(std::size_t j) const { return points_[j].m; }
    const std::vector<MassPoint>& points() const { return points_; }

    /// Mirror image under x -> 1 - x.
    DiscreteDistribution reversed() const;

private:
    std::vector<MassPoint> points_;
};

/// Probability weights on the uniform grid x_i = i/(grid_size-1) over [0, 1].
struct GridDistribution {
    int grid_size = 0;
    std::vector<double> weights;

    GridDistribution() = default;
    GridDistribution(int grid_size_, std::vector<double> weights_);

    double position(int i) const { return static_cast<double>(i) / (grid_size - 1); }

    /// View as an atomic distribution (weights below drop_tol are dropped).
    DiscreteDistribution as_discrete(double drop_tol = 0.0) const;
};

/// Piecewise-constant output density p_Y of a discrete input through the
/// uniform channel; precomputed segment form for exact integration.
class OutputDensity {
public:
    OutputDensity(const DiscreteDistribution& dist, const ChannelSpec& ch);

    double value(double y) const;
    /// Total integral over D_Y (equals 1 up to rounding for valid inputs).
    double integral() const;

    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> edges_;   // k+1 breakpoints
    std::vector<double> values_;  // k segment densities
};

/// p_Y(y) = sum_j m_j 1[|y - x_j| < b] / (2b); exactly 0 outside D_Y.
double output_density(double y, const DiscreteDistribution& dist, const ChannelSpec& ch);

/// Marginal information density i(x; p_X) in nats, computed by exact
/// piecewise-constant integration of -log[2b p_Y] over [x-b, x+b].
/// Returns +infinity if p_Y vanishes on a set of positive measure inside
/// the window (support gap of width >= 2b).
double marginal_information_density(double x, const DiscreteDistribution& dist,
                                    const ChannelSpec& ch);
double marginal_information_density(double x, const OutputDensity& py, const ChannelSpec& ch);

/// I(p_X) = sum_j m_j i(x_j; p_X), in nats.
double mutual_information(const DiscreteDistribution& dist, const ChannelSpec& ch);

/// <c(x)> = sum_j m_j x_j^alpha.
double expected_cost(const DiscreteDistribution& dist, const CostSpec& cost);

inline bool is_infinite_info(double v) { return std::isinf(v); }

}  // namespace ucap
