#include "ucap/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace ucap {

namespace {

constexpr double kWeightFloor = 1e-300;

struct BAState {
    std::vector<double> p;
    double capacity = 0.0;   // I(p) estimate
    double objective = 0.0;  // I(p) - lambda <c>
    double cost = 0.0;
};

}  // namespace

TransitionMatrix build_transition_matrix(const ChannelSpec& ch, const BAConfig& cfg) {
    if (cfg.grid_size < 51) throw std::invalid_argument("BAConfig: grid_size must be >= 51");
    TransitionMatrix tm;
    tm.input_size = cfg.grid_size;
    const double span = 1.0 + 2.0 * ch.b;
    tm.output_size = cfg.output_grid_size > 0
                         ? cfg.output_grid_size
                         : static_cast<int>(std::lround(span * (cfg.grid_size - 1)));
    tm.out_lo = -ch.b;
    tm.cell_width = span / tm.output_size;
    tm.first_cell.resize(tm.input_size);
    tm.rows.resize(tm.input_size);

    for (int i = 0; i < tm.input_size; ++i) {
        const double x = static_cast<double>(i) / (tm.input_size - 1);
        const double lo = x - ch.b;
        const double hi = x + ch.b;
        int c0 = std::clamp(static_cast<int>(std::floor((lo - tm.out_lo) / tm.cell_width)), 0,
                            tm.output_size - 1);
        int c1 = std::clamp(static_cast<int>(std::floor((hi - tm.out_lo) / tm.cell_width)), 0,
                            tm.output_size - 1);
        tm.first_cell[i] = c0;
        auto& row = tm.rows[i];
        row.resize(c1 - c0 + 1);
        double sum = 0.0;
        for (int c = c0; c <= c1; ++c) {
            const double a = tm.out_lo + c * tm.cell_width;
            const double overlap = std::min(hi, a + tm.cell_width) - std::max(lo, a);
            row[c - c0] = std::max(overlap, 0.0) / (2.0 * ch.b);
            sum += row[c - c0];
        }
        for (double& w : row) w /= sum;  // rows sum to 1 exactly
    }
    return tm;
}

namespace {

// One sweep of the constrained BA update; fills per-row information densities.
void ba_sweep(const TransitionMatrix& tm, const std::vector<double>& w_log_w,
              const std::vector<double>& cost_vals, double lambda, BAState& st, bool update) {
    const int G = tm.input_size;
    std::vector<double> q(tm.output_size, 0.0);
    for (int i = 0; i < G; ++i) {
        if (st.p[i] <= 0.0) continue;
        const auto& row = tm.rows[i];
        const int c0 = tm.first_cell[i];
        for (std::size_t c = 0; c < row.size(); ++c) q[c0 + c] += st.p[i] * row[c];
    }
    std::vector<double> logq(tm.output_size, 0.0);
    for (int c = 0; c < tm.output_size; ++c) logq[c] = q[c] > 0.0 ? std::log(q[c]) : 0.0;

    std::vector<double> d(G, 0.0);
    double info = 0.0, cost = 0.0;
    for (int i = 0; i < G; ++i) {
        const auto& row = tm.rows[i];
        const int c0 = tm.first_cell[i];
        double dot = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) dot += row[c] * logq[c0 + c];
        d[i] = w_log_w[i] - dot;
        info += st.p[i] * d[i];
        cost += st.p[i] * cost_vals[i];
    }
    st.capacity = info;
    st.cost = cost;
    st.objective = info - lambda * cost;

    if (!update) return;
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < G; ++i)
        if (st.p[i] > 0.0) mx = std::max(mx, d[i] - lambda * cost_vals[i]);
    double z = 0.0;
    for (int i = 0; i < G; ++i) {
        st.p[i] *= std::exp(d[i] - lambda * cost_vals[i] - mx);
        if (st.p[i] < kWeightFloor) st.p[i] = 0.0;
        z += st.p[i];
    }
    for (int i = 0; i < G; ++i) st.p[i] /= z;
}

BAResult ba_run(const ChannelSpec& ch, const CostSpec& cost, double lambda, const BAConfig& cfg,
                const std::vector<double>* warm_start) {
    const TransitionMatrix tm = build_transition_matrix(ch, cfg);
    const int G = tm.input_size;

    std::vector<double> w_log_w(G, 0.0), cost_vals(G, 0.0);
    for (int i = 0; i < G; ++i) {
        for (double w : tm.rows[i])
            if (w > 0.0) w_log_w[i] += w * std::log(w);
        const double x = static_cast<double>(i) / (G - 1);
        cost_vals[i] = cost.cost(x);
    }

    BAState st;
    st.p = warm_start ? *warm_start : std::vector<double>(G, 1.0 / G);

    BAResult res;
    res.lambda = lambda;
    double prev_capacity = -std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < cfg.max_iter; ++it) {
        ba_sweep(tm, w_log_w, cost_vals, lambda, st, /*update=*/true);
        if (cfg.record_trace) res.objective_trace.push_back(st.objective);
        if (std::abs(st.capacity - prev_capacity) < cfg.conv_tol) {
            res.converged = true;
            ++it;
            break;
        }
        prev_capacity = st.capacity;
    }
    res.iterations = it;
    ba_sweep(tm, w_log_w, cost_vals, lambda, st, /*update=*/false);  // final estimates
    res.capacity_nats = st.capacity;
    res.achieved_cost = st.cost;
    res.dist = GridDistribution(G, std::move(st.p));
    return res;
}

}  // namespace

BAResult ba_fixed_lambda(const ChannelSpec& ch, const CostSpec& cost, double lambda,
                         const BAConfig& cfg) {
    if (lambda < 0.0) throw std::invalid_argument("ba_fixed_lambda: lambda must be >= 0");
    return ba_run(ch, cost, lambda, cfg, nullptr);
}

BAResult ba_constrained(const ChannelSpec& ch, const CostSpec& cost, const BAConfig& cfg) {
    BAResult unconstrained = ba_run(ch, cost, 0.0, cfg, nullptr);
    if (unconstrained.achieved_cost <= cost.cbar) return unconstrained;

    bool all_converged = unconstrained.converged;
    std::vector<double> warm = unconstrained.dist.weights;

    double lo = 0.0;
    double hi = 1.0;
    BAResult at_hi = ba_run(ch, cost, hi, cfg, &warm);
    all_converged = all_converged && at_hi.converged;
    while (at_hi.achieved_cost > cost.cbar) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9) {
            at_hi.converged = false;  // budget below anything reachable
            return at_hi;
        }
        warm = at_hi.dist.weights;
        at_hi = ba_run(ch, cost, hi, cfg, &warm);
        all_converged = all_converged && at_hi.converged;
    }

    BAResult best = at_hi;  // satisfies cost <= cbar
    for (int it = 0; it < 100; ++it) {
        if (std::abs(best.achieved_cost - cost.cbar) <= cfg.lambda_bisect_tol) break;
        const double mid = 0.5 * (lo + hi);
        BAResult r = ba_run(ch, cost, mid, cfg, &warm);
        all_converged = all_converged && r.converged;
        warm = r.dist.weights;
        if (r.achieved_cost > cost.cbar) {
            lo = mid;
        } else {
            hi = mid;
            best = std::move(r);
        }
    }
    best.converged = best.converged && all_converged;
    return best;
}

DiscreteDistribution support_points(const GridDistribution& dist, double mass_tol,
                                    double cluster_radius) {
    std::vector<double> centers, masses;
    double cm = 0.0, cx = 0.0;  // current cluster mass and first-moment
    double last_kept = 0.0;
    bool open = false;
    for (int i = 0; i < dist.grid_size; ++i) {
        if (dist.weights[i] <= mass_tol) continue;
        const double x = dist.position(i);
        if (open && x - last_kept > cluster_radius) {
            centers.push_back(cx / cm);
            masses.push_back(cm);
            cm = cx = 0.0;
            open = false;
        }
        open = true;
        last_kept = x;
        cm += dist.weights[i];
        cx += dist.weights[i] * x;
    }
    if (open) {
        centers.push_back(cx / cm);
        masses.push_back(cm);
    }
    if (centers.empty()) throw std::invalid_argument("support_points: no cells above mass_tol");
    double total = 0.0;
    for (double m : masses) total += m;
    for (double& m : masses) m /= total;
    return DiscreteDistribution(centers, masses);
}

}  // namespace ucap
