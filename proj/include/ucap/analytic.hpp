#pragma once

#include "ucap/channel.hpp"
#include "ucap/kkt.hpp"
#include "ucap/oracle.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ucap {

enum class RegimeTag { CaseI, CaseIIa, CaseIIb, CaseIII };

const char* to_string(RegimeTag tag);

/// Classification of a (channel, cost) pair. lambda_star is present (> 0)
/// exactly when the constraint is active and alpha <= 1; k indexes the
/// shrunken support S_k for CaseIIb.
struct Regime {
    RegimeTag tag = RegimeTag::CaseI;
    int k = 0;
    double lambda_star = 0.0;
    double cbar_star = 0.0;
};

/// Budgets theta_0 > theta_1 > ... > theta_{n-1} at which the even-indexed
/// mass points x_2, x_4, ... leave the support, with the multiplier at which
/// each mass vanishes.
struct ThresholdTable {
    std::vector<double> thetas;
    std::vector<double> lambdas;
};

/// Mass vector of the equality-constraint solution at a given multiplier.
/// Masses are returned unclipped: a negative entry means lambda lies outside
/// the regime of this support set.
struct LambdaMasses {
    std::vector<double> positions;
    std::vector<double> masses;
    bool valid = false;  // all masses nonnegative

    DiscreteDistribution distribution() const;
    double expected_cost(const CostSpec& cost) const;
    double min_mass() const;
};

struct RegimeMismatch : std::runtime_error {
    RegimeMismatch(const std::string& msg, int correct_k_) : std::runtime_error(msg), correct_k(correct_k_) {}
    int correct_k;
};

struct SolveResult {
    Regime regime;
    DiscreteDistribution dist;  // Cases I, IIa, IIb
    GridDistribution grid;      // Case III (Blahut-Arimoto output)
    bool continuous_support = false;
    double capacity_nats = 0.0;
    double achieved_cost = 0.0;
    KKTReport kkt;
};

/// Capacity-achieving distribution for the inactive constraint: n+1 equally
/// weighted points for integer r, 2n+2 points otherwise.
DiscreteDistribution unconstrained_solution(const ChannelSpec& ch);

/// Expected cost of the unconstrained optimum; the constraint is active below it.
double critical_cost(const ChannelSpec& ch, const CostSpec& cost);

/// Integer r: exponential-family masses m_j proportional to exp(-lambda x_j^alpha)
/// on the unconstrained positions.
DiscreteDistribution masses_integer(double lambda, const ChannelSpec& ch, const CostSpec& cost);

/// Non-integer r, support S_k (the unconstrained positions minus
/// x_2, x_4, ..., x_{2k}): solves the equality-constraint chain at the given
/// multiplier. Head masses (odd indices below 2k) follow the exponential
/// chain; tail masses follow the overlap-sum construction; the relative head/
/// tail weight comes from the equality-constraint difference between the last
/// head point and the first tail point.
LambdaMasses masses_noninteger(double lambda, int k, const ChannelSpec& ch, const CostSpec& cost);

/// Unique multiplier with expected cost equal to target_cbar on support S_k
/// (bisection; the cost is strictly decreasing in lambda). Throws
/// RegimeMismatch if the target lies outside the cost interval served by S_k.
std::pair<double, DiscreteDistribution> solve_lambda(double target_cbar, int k,
                                                     const ChannelSpec& ch, const CostSpec& cost);

/// Support-shrinking thresholds for non-integer r and alpha <= 1 (empty for n = 0).
ThresholdTable compute_thresholds(const ChannelSpec& ch, const CostSpec& cost);

/// Thread-safe per-(r, alpha) cache around compute_thresholds.
const ThresholdTable& cached_thresholds(const ChannelSpec& ch, const CostSpec& cost);

/// Regime classification only (no lambda root-finding for the returned
/// lambda_star beyond what the thresholds require).
Regime classify(const ChannelSpec& ch, const CostSpec& cost);

/// Full solve: closed form for Cases I/IIa/IIb, Blahut-Arimoto for Case III.
/// Every result carries the capacity and a KKT verification report.
SolveResult solve(const ChannelSpec& ch, const CostSpec& cost);
SolveResult solve(const ChannelSpec& ch, const CostSpec& cost, const BAConfig& ba_cfg);

}  // namespace ucap
