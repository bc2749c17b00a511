#include "ucap/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace ucap {

namespace {

constexpr double kLambdaCap = 1e6;

double logsumexp(const std::vector<double>& a) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : a) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : a) s += std::exp(v - mx);
    return mx + std::log(s);
}

// Unconstrained support positions S_0, index j = 1..N in ascending order.
std::vector<double> s0_positions(const ChannelSpec& ch) {
    std::vector<double> x;
    if (ch.is_integer_r) {
        x.resize(ch.n + 1);
        for (int j = 1; j <= ch.n + 1; ++j) x[j - 1] = static_cast<double>(j - 1) / ch.n;
    } else {
        const int N = 2 * ch.n + 2;
        x.resize(N);
        for (int j = 1; j <= N; ++j) {
            if (j % 2 == 1)
                x[j - 1] = (j - 1) / (2.0 * ch.r);
            else
                x[j - 1] = 1.0 - (2 * ch.n + 2 - j) / (2.0 * ch.r);
        }
    }
    return x;
}

}  // namespace

const char* to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::CaseI: return "CaseI";
        case RegimeTag::CaseIIa: return "CaseIIa";
        case RegimeTag::CaseIIb: return "CaseIIb";
        case RegimeTag::CaseIII: return "CaseIII";
    }
    return "?";
}

DiscreteDistribution LambdaMasses::distribution() const {
    if (!valid) throw std::domain_error("LambdaMasses: invalid (negative mass) solution");
    std::vector<double> clamped(masses);
    for (double& m : clamped) m = std::max(m, 0.0);
    return DiscreteDistribution(positions, clamped);
}

double LambdaMasses::expected_cost(const CostSpec& cost) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < positions.size(); ++j) acc += masses[j] * cost.cost(positions[j]);
    return acc;
}

double LambdaMasses::min_mass() const {
    double mn = std::numeric_limits<double>::infinity();
    for (double m : masses) mn = std::min(mn, m);
    return mn;
}

DiscreteDistribution unconstrained_solution(const ChannelSpec& ch) {
    const std::vector<double> x = s0_positions(ch);
    std::vector<double> m(x.size());
    if (ch.is_integer_r) {
        std::fill(m.begin(), m.end(), 1.0 / (ch.n + 1));
    } else {
        const double denom = 2.0 * (ch.n + 1) * (ch.n + 2);
        for (int j = 1; j <= static_cast<int>(x.size()); ++j) {
            if (j % 2 == 1)
                m[j - 1] = (2 * ch.n + 2 - (j - 1)) / denom;
            else
                m[j - 1] = j / denom;
        }
    }
    return DiscreteDistribution(x, m);
}

double critical_cost(const ChannelSpec& ch, const CostSpec& cost) {
    return expected_cost(unconstrained_solution(ch), cost);
}

DiscreteDistribution masses_integer(double lambda, const ChannelSpec& ch, const CostSpec& cost) {
    if (!ch.is_integer_r) throw std::invalid_argument("masses_integer: r is not an integer");
    if (lambda < 0.0) throw std::invalid_argument("masses_integer: lambda must be >= 0");
    const std::vector<double> x = s0_positions(ch);
    std::vector<double> e(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) e[j] = -lambda * cost.cost(x[j]);
    const double lz = logsumexp(e);
    std::vector<double> m(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) m[j] = std::exp(e[j] - lz);
    return DiscreteDistribution(x, m);
}

LambdaMasses masses_noninteger(double lambda, int k, const ChannelSpec& ch, const CostSpec& cost) {
    if (ch.is_integer_r) throw std::invalid_argument("masses_noninteger: r is an integer");
    if (lambda < 0.0) throw std::invalid_argument("masses_noninteger: lambda must be >= 0");
    if (k < 0 || k > ch.n) throw std::invalid_argument("masses_noninteger: k out of range [0, n]");

    const std::vector<double> x = s0_positions(ch);  // 0-based; chain index j = idx + 1
    const int N = static_cast<int>(x.size());
    std::vector<double> c(N);
    for (int j = 0; j < N; ++j) c[j] = cost.cost(x[j]);

    const double rho = ch.rho;
    const int nt = ch.n - k;          // tail integer part
    const int t0 = 2 * k;             // 0-based index of the first tail point x_{2k+1}

    // tail overlap-sum chains (local index j' = 1..2nt+2, global idx t0 + j' - 1)
    std::vector<double> hat_exp(nt + 2), bar_exp(nt + 1);
    {
        double s = 0.0;
        hat_exp[0] = 0.0;
        for (int i = 2; i <= nt + 2; ++i) {
            s += c[t0 + 2 * i - 3] - c[t0 + 2 * i - 4];  // c(local 2i-2) - c(local 2i-3)
            hat_exp[i - 1] = -(lambda / rho) * s;
        }
        s = 0.0;
        bar_exp[0] = 0.0;
        for (int i = 2; i <= nt + 1; ++i) {
            s += c[t0 + 2 * i - 2] - c[t0 + 2 * i - 3];  // c(local 2i-1) - c(local 2i-2)
            bar_exp[i - 1] = -(lambda / (1.0 - rho)) * s;
        }
    }
    const double log_zhat = logsumexp(hat_exp);
    const double log_zbar = logsumexp(bar_exp);

    // relative weight between the head block and the tail block
    double log_m_lt = -std::numeric_limits<double>::infinity();  // log M<
    double log_m_gt = 0.0;                                       // log M>
    std::vector<double> head_exp;
    double log_zlt = 0.0;
    if (k > 0) {
        head_exp.resize(k);
        for (int i = 0; i < k; ++i) head_exp[i] = -lambda * c[2 * i];  // odd points x_1, x_3, ...
        log_zlt = logsumexp(head_exp);
        const double log_ratio =  // log(M> / M<) from the x_{2k-1} vs x_{2k+1} equalities
            -lambda * c[t0] - log_zlt + rho * log_zhat + (1.0 - rho) * log_zbar;
        if (log_ratio >= 0.0) {
            log_m_lt = -log_ratio - std::log1p(std::exp(-log_ratio));
            log_m_gt = -std::log1p(std::exp(-log_ratio));
        } else {
            log_m_lt = -std::log1p(std::exp(log_ratio));
            log_m_gt = log_ratio - std::log1p(std::exp(log_ratio));
        }
    }

    LambdaMasses out;
    out.positions.reserve(k + 2 * nt + 2);
    out.masses.reserve(k + 2 * nt + 2);
    for (int i = 0; i < k; ++i) {
        out.positions.push_back(x[2 * i]);
        out.masses.push_back(std::exp(log_m_lt + head_exp[i] - log_zlt));
    }

    // invert the overlap sums back to point masses on the tail
    std::vector<double> hat_pre(nt + 3, 0.0), bar_pre(nt + 2, 0.0);
    for (int i = 1; i <= nt + 2; ++i)
        hat_pre[i] = hat_pre[i - 1] + std::exp(log_m_gt + hat_exp[i - 1] - log_zhat);
    for (int i = 1; i <= nt + 1; ++i)
        bar_pre[i] = bar_pre[i - 1] + std::exp(log_m_gt + bar_exp[i - 1] - log_zbar);
    for (int jl = 1; jl <= 2 * nt + 2; ++jl) {
        out.positions.push_back(x[t0 + jl - 1]);
        if (jl % 2 == 1)
            out.masses.push_back(hat_pre[(jl + 1) / 2] - bar_pre[(jl - 1) / 2]);
        else
            out.masses.push_back(bar_pre[jl / 2] - hat_pre[jl / 2]);
    }

    double sum = 0.0;
    for (double m : out.masses) sum += m;
    for (double& m : out.masses) m /= sum;
    out.valid = out.min_mass() >= -1e-12;
    return out;
}

namespace {

double cost_at_lambda(double lambda, int k, const ChannelSpec& ch, const CostSpec& cost) {
    if (ch.is_integer_r) return expected_cost(masses_integer(lambda, ch, cost), cost);
    return masses_noninteger(lambda, k, ch, cost).expected_cost(cost);
}

}  // namespace

std::pair<double, DiscreteDistribution> solve_lambda(double target_cbar, int k,
                                                     const ChannelSpec& ch,
                                                     const CostSpec& cost) {
    if (cost.alpha > 1.0)
        throw std::invalid_argument("solve_lambda: no discrete solution for alpha > 1");
    const double cstar = critical_cost(ch, cost);
    if (!(target_cbar > 0.0))
        throw std::invalid_argument("solve_lambda: target cost must be positive");

    double lo = 0.0;
    if (ch.is_integer_r) {
        if (k != 0) throw std::invalid_argument("solve_lambda: k must be 0 for integer r");
        if (target_cbar > cstar)
            throw RegimeMismatch("solve_lambda: constraint inactive (cbar >= cbar*)", 0);
    } else {
        const ThresholdTable& tt = cached_thresholds(ch, cost);
        int correct_k = 0;
        for (std::size_t i = 0; i < tt.thetas.size(); ++i)
            if (target_cbar <= tt.thetas[i]) correct_k = static_cast<int>(i) + 1;
        if (target_cbar > cstar)
            throw RegimeMismatch("solve_lambda: constraint inactive (cbar >= cbar*)", 0);
        if (correct_k != k)
            throw RegimeMismatch("solve_lambda: target cost served by support S_" +
                                     std::to_string(correct_k) + ", not S_" + std::to_string(k),
                                 correct_k);
        if (k > 0) lo = tt.lambdas[k - 1];
    }

    double hi = std::max(1.0, 2.0 * lo);
    while (cost_at_lambda(hi, k, ch, cost) > target_cbar) {
        hi *= 2.0;
        if (hi > kLambdaCap)
            throw std::runtime_error("solve_lambda: budget too small (lambda exceeds cap)");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cost_at_lambda(mid, k, ch, cost) >= target_cbar)
            lo = mid;
        else
            hi = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    DiscreteDistribution dist = ch.is_integer_r
                                    ? masses_integer(lambda, ch, cost)
                                    : masses_noninteger(lambda, k, ch, cost).distribution();
    return {lambda, std::move(dist)};
}

ThresholdTable compute_thresholds(const ChannelSpec& ch, const CostSpec& cost) {
    if (ch.is_integer_r) throw std::invalid_argument("compute_thresholds: r is an integer");
    if (cost.alpha > 1.0)
        throw std::invalid_argument("compute_thresholds: defined for alpha <= 1 only");
    ThresholdTable tt;
    if (ch.n == 0) return tt;
    // linear cost: both overlap chains are geometric with the identical ratio
    // exp(-lambda/r), so every even mass stays positive for all finite lambda
    // and the support never shrinks
    if (cost.alpha == 1.0) return tt;

    for (int k = 1; k <= ch.n; ++k) {
        // m_{2k} within the S_{k-1} solution sits at array index k (0-based)
        auto vanishing_mass = [&](double lambda) {
            return masses_noninteger(lambda, k - 1, ch, cost).masses[k];
        };
        double lo = (k == 1) ? 0.0 : tt.lambdas[k - 2];
        if (vanishing_mass(lo) <= 0.0)
            throw std::logic_error("compute_thresholds: mass already nonpositive at bracket start");
        double hi = std::max(1.0, 2.0 * lo);
        while (vanishing_mass(hi) > 0.0) {
            hi *= 2.0;
            if (hi > 1e9)
                throw std::runtime_error("compute_thresholds: no vanishing point found");
        }
        for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (vanishing_mass(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double lambda_k = 0.5 * (lo + hi);
        tt.lambdas.push_back(lambda_k);
        tt.thetas.push_back(masses_noninteger(lambda_k, k - 1, ch, cost).expected_cost(cost));
        if (k >= 2 && !(tt.thetas[k - 1] < tt.thetas[k - 2]))
            throw std::logic_error("compute_thresholds: thresholds not strictly decreasing");
    }
    return tt;
}

const ThresholdTable& cached_thresholds(const ChannelSpec& ch, const CostSpec& cost) {
    static std::mutex mu;
    static std::map<std::pair<double, double>, ThresholdTable> cache;
    const std::pair<double, double> key{ch.r, cost.alpha};
    std::scoped_lock lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, compute_thresholds(ch, cost)).first;
    return it->second;
}

Regime classify(const ChannelSpec& ch, const CostSpec& cost) {
    Regime reg;
    reg.cbar_star = critical_cost(ch, cost);
    if (cost.cbar >= reg.cbar_star) {
        reg.tag = RegimeTag::CaseI;
        return reg;
    }
    if (cost.alpha > 1.0) {
        reg.tag = RegimeTag::CaseIII;
        return reg;
    }
    if (ch.is_integer_r) {
        reg.tag = RegimeTag::CaseIIa;
        return reg;
    }
    reg.tag = RegimeTag::CaseIIb;
    const ThresholdTable& tt = cached_thresholds(ch, cost);
    for (std::size_t i = 0; i < tt.thetas.size(); ++i)
        if (cost.cbar <= tt.thetas[i]) reg.k = static_cast<int>(i) + 1;
    return reg;
}

SolveResult solve(const ChannelSpec& ch, const CostSpec& cost) {
    return solve(ch, cost, BAConfig{});
}

SolveResult solve(const ChannelSpec& ch, const CostSpec& cost, const BAConfig& ba_cfg) {
    SolveResult res;
    res.regime = classify(ch, cost);
    switch (res.regime.tag) {
        case RegimeTag::CaseI:
            res.dist = unconstrained_solution(ch);
            break;
        case RegimeTag::CaseIIa:
        case RegimeTag::CaseIIb: {
            auto [lambda, dist] = solve_lambda(cost.cbar, res.regime.k, ch, cost);
            res.regime.lambda_star = lambda;
            res.dist = std::move(dist);
            break;
        }
        case RegimeTag::CaseIII: {
            BAResult ba = ba_constrained(ch, cost, ba_cfg);
            res.grid = ba.dist;
            res.continuous_support = true;
            res.regime.lambda_star = ba.lambda;
            res.capacity_nats = ba.capacity_nats;
            res.achieved_cost = ba.achieved_cost;
            // discretization-aware verification on the grid atoms
            res.kkt = verify(res.grid.as_discrete(1e-12), ba.lambda, ch, cost, 10001, 5e-3, 5e-3,
                             1e-4);
            return res;
        }
    }
    res.capacity_nats = mutual_information(res.dist, ch);
    res.achieved_cost = expected_cost(res.dist, cost);
    res.kkt = verify(res.dist, res.regime.lambda_star, ch, cost);
    return res;
}

}  // namespace ucap
