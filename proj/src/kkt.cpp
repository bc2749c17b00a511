#include "ucap/kkt.hpp"

#include <algorithm>
#include <cmath>

namespace ucap {

KKTReport verify(const DiscreteDistribution& dist, double lambda, const ChannelSpec& ch,
                 const CostSpec& cost, int check_grid_size, double eq_tol, double ineq_tol,
                 double eq_support_mass_min) {
    if (lambda < 0.0) throw std::invalid_argument("verify: lambda must be >= 0");
    KKTReport rep;
    rep.lambda = lambda;
    rep.check_grid_size = check_grid_size;
    rep.eq_tol = eq_tol;
    rep.ineq_tol = ineq_tol;

    const OutputDensity py(dist, ch);

    // mutual information and equality residuals at the exact support positions
    double capacity = 0.0;
    std::vector<double> info_at_support(dist.size());
    for (std::size_t j = 0; j < dist.size(); ++j) {
        const double ix = marginal_information_density(dist.x(j), py, ch);
        if (is_infinite_info(ix)) {
            rep.has_infinite = true;
            rep.infinite_at = dist.x(j);
            rep.passed = false;
            return rep;
        }
        info_at_support[j] = ix;
        capacity += dist.m(j) * ix;
    }
    rep.capacity_nats = capacity;

    for (std::size_t j = 0; j < dist.size(); ++j) {
        if (dist.m(j) < eq_support_mass_min) continue;
        const double rhs = capacity + lambda * (cost.cost(dist.x(j)) - cost.cbar);
        const double res = info_at_support[j] - rhs;
        rep.equality_residuals.emplace_back(dist.x(j), res);
        rep.max_equality_residual = std::max(rep.max_equality_residual, std::abs(res));
    }

    rep.max_inequality_violation = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < check_grid_size; ++g) {
        const double x = static_cast<double>(g) / (check_grid_size - 1);
        const double ix = marginal_information_density(x, py, ch);
        if (is_infinite_info(ix)) {
            rep.has_infinite = true;
            rep.infinite_at = x;
            rep.passed = false;
            return rep;
        }
        const double rhs = capacity + lambda * (cost.cost(x) - cost.cbar);
        rep.max_inequality_violation = std::max(rep.max_inequality_violation, ix - rhs);
    }

    rep.passed = rep.max_equality_residual <= eq_tol && rep.max_inequality_violation <= ineq_tol;
    return rep;
}

std::vector<SegmentSlope> check_piecewise_linearity(const DiscreteDistribution& dist,
                                                    const ChannelSpec& ch,
                                                    const std::vector<double>& lattice_x,
                                                    const std::vector<double>& lattice_m,
                                                    int samples_per_segment) {
    if (samples_per_segment < 3)
        throw std::invalid_argument("check_piecewise_linearity: need >= 3 samples");
    if (lattice_x.size() != lattice_m.size() || lattice_x.size() < 2)
        throw std::invalid_argument("check_piecewise_linearity: bad lattice");
    const OutputDensity py(dist, ch);
    const int N = static_cast<int>(lattice_x.size());
    auto mass = [&](int j) {  // 1-based, zero outside (m_0 = 0, m_{N+1} = 0 convention)
        return (j >= 1 && j <= N) ? lattice_m[j - 1] : 0.0;
    };

    std::vector<SegmentSlope> out;
    for (int j = 1; j <= N - 1; ++j) {
        SegmentSlope seg;
        seg.x_lo = lattice_x[j - 1];
        seg.x_hi = lattice_x[j];

        double num, den;
        if (ch.is_integer_r) {
            num = mass(j);
            den = mass(j + 1);
        } else {
            num = mass(j - 1) + mass(j);
            den = mass(j + 1) + mass(j + 2);
        }
        if (num <= 0.0 || den <= 0.0) {
            seg.skipped = true;
            out.push_back(seg);
            continue;
        }
        seg.formula_slope = ch.r * std::log(num / den);

        // least-squares affine fit of i(x) on the open segment
        const int S = samples_per_segment;
        std::vector<double> xs(S), ys(S);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int s = 0; s < S; ++s) {
            const double t = (s + 1.0) / (S + 1.0);
            xs[s] = seg.x_lo + t * (seg.x_hi - seg.x_lo);
            ys[s] = marginal_information_density(xs[s], py, ch);
            sx += xs[s];
            sy += ys[s];
            sxx += xs[s] * xs[s];
            sxy += xs[s] * ys[s];
        }
        const double denom = S * sxx - sx * sx;
        seg.fitted_slope = (S * sxy - sx * sy) / denom;
        const double intercept = (sy - seg.fitted_slope * sx) / S;
        for (int s = 0; s < S; ++s)
            seg.max_deviation =
                std::max(seg.max_deviation, std::abs(ys[s] - (intercept + seg.fitted_slope * xs[s])));
        out.push_back(seg);
    }
    return out;
}

std::vector<SegmentSlope> check_piecewise_linearity(const DiscreteDistribution& dist,
                                                    const ChannelSpec& ch,
                                                    int samples_per_segment) {
    std::vector<double> xs, ms;
    xs.reserve(dist.size());
    ms.reserve(dist.size());
    for (const auto& p : dist.points()) {
        xs.push_back(p.x);
        ms.push_back(p.m);
    }
    return check_piecewise_linearity(dist, ch, xs, ms, samples_per_segment);
}

double check_gap_concavity(const DiscreteDistribution& dist, std::pair<double, double> gap,
                           const ChannelSpec& ch, const std::vector<double>& betas) {
    const auto [x1, x2] = gap;
    if (!(x1 < x2)) throw std::invalid_argument("check_gap_concavity: need x1 < x2");
    bool x1_found = false, x2_found = false;
    for (const auto& p : dist.points()) {
        if (std::abs(p.x - x1) < 1e-12) x1_found = true;
        if (std::abs(p.x - x2) < 1e-12) x2_found = true;
        if (p.x > x1 + 1e-12 && p.x < x2 - 1e-12)
            throw std::invalid_argument("check_gap_concavity: mass inside the gap");
    }
    if (!x1_found || !x2_found)
        throw std::invalid_argument("check_gap_concavity: gap endpoints must be support points");

    const OutputDensity py(dist, ch);
    const double i1 = marginal_information_density(x1, py, ch);
    const double i2 = marginal_information_density(x2, py, ch);
    if (is_infinite_info(i1) || is_infinite_info(i2))
        return std::numeric_limits<double>::infinity();

    double min_deficit = std::numeric_limits<double>::infinity();
    for (double beta : betas) {
        if (beta < 0.0 || beta > 1.0)
            throw std::invalid_argument("check_gap_concavity: beta outside [0,1]");
        const double xb = (1.0 - beta) * x1 + beta * x2;
        const double ib = marginal_information_density(xb, py, ch);
        if (is_infinite_info(ib)) return std::numeric_limits<double>::infinity();
        min_deficit = std::min(min_deficit, ib - ((1.0 - beta) * i1 + beta * i2));
    }
    return min_deficit;
}

}  // namespace ucap
