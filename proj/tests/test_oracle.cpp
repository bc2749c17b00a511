#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ucap/analytic.hpp"
#include "ucap/oracle.hpp"

#include <cmath>

using namespace ucap;

TEST_CASE("transition matrix rows are proper conditional distributions") {
    auto ch = ChannelSpec::from_b(0.25);
    BAConfig cfg;
    cfg.grid_size = 101;
    auto tm = build_transition_matrix(ch, cfg);
    REQUIRE(tm.input_size == 101);
    for (int i = 0; i < tm.input_size; ++i) {
        double sum = 0.0;
        for (double w : tm.rows[i]) {
            CHECK(w >= 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    // x = 0 row supported on [-b, b] only
    const double row_end =
        tm.out_lo + (tm.first_cell[0] + tm.rows[0].size()) * tm.cell_width;
    CHECK(row_end <= ch.b + tm.cell_width + 1e-12);
    // a cell fully inside a block receives cell_width / (2b)
    CHECK(tm.rows[0][1] == doctest::Approx(tm.cell_width / (2.0 * ch.b)).epsilon(1e-12));
}

TEST_CASE("BA at lambda = 0 reproduces the integer-r closed form") {
    auto ch = ChannelSpec::from_r(4.0);
    CostSpec cost(1.0, 1.0);
    BAConfig cfg;
    cfg.grid_size = 201;
    auto res = ba_fixed_lambda(ch, cost, 0.0, cfg);
    CHECK(res.converged);
    CHECK(res.capacity_nats == doctest::Approx(std::log(5.0)).epsilon(1e-3));

    const double centers[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    double near = 0.0;
    for (int i = 0; i < res.dist.grid_size; ++i) {
        const double x = res.dist.position(i);
        for (double c : centers)
            if (std::abs(x - c) <= 0.01) {
                near += res.dist.weights[i];
                break;
            }
    }
    CHECK(near >= 0.99);
}

TEST_CASE("BA at lambda = 0, non-integer r") {
    auto ch = ChannelSpec::from_r(4.4);
    CostSpec cost(1.0, 1.0);
    BAConfig cfg;
    cfg.grid_size = 221;
    auto res = ba_fixed_lambda(ch, cost, 0.0, cfg);
    CHECK(res.capacity_nats ==
          doctest::Approx(0.4 * std::log(6.0) + 0.6 * std::log(5.0)).epsilon(5e-3));
}

TEST_CASE("large lambda drives the mass to zero and the capacity to zero") {
    auto ch = ChannelSpec::from_r(2.0);
    CostSpec cost(1.0, 1.0);
    BAConfig cfg;
    cfg.grid_size = 101;
    auto res = ba_fixed_lambda(ch, cost, 500.0, cfg);
    CHECK(res.achieved_cost < 1e-2);
    CHECK(res.capacity_nats < 0.05);
    double head = 0.0;
    for (int i = 0; i < res.dist.grid_size; ++i)
        if (res.dist.position(i) < 0.02) head += res.dist.weights[i];
    CHECK(head > 0.95);
}

TEST_CASE("BA iterations never decrease the Lagrangian objective") {
    auto ch = ChannelSpec::from_r(2.4);
    CostSpec cost(0.7, 1.0);
    BAConfig cfg;
    cfg.grid_size = 121;
    cfg.record_trace = true;
    for (double lambda : {0.0, 0.5, 2.0}) {
        auto res = ba_fixed_lambda(ch, cost, lambda, cfg);
        for (std::size_t t = 1; t < res.objective_trace.size(); ++t)
            CHECK(res.objective_trace[t] >= res.objective_trace[t - 1] - 1e-12);
    }
}

TEST_CASE("ba_constrained: inactive constraint short-circuits to lambda = 0") {
    auto ch = ChannelSpec::from_r(2.4);
    CostSpec cost(0.7, 0.95);
    BAConfig cfg;
    cfg.grid_size = 121;
    auto free_run = ba_fixed_lambda(ch, cost, 0.0, cfg);
    auto res = ba_constrained(ch, cost, cfg);
    CHECK(res.lambda == 0.0);
    CHECK(res.capacity_nats == doctest::Approx(free_run.capacity_nats).epsilon(1e-12));
}

TEST_CASE("ba_constrained: discrete-looking solution for alpha <= 1") {
    auto ch = ChannelSpec::from_r(2.4);
    CostSpec cost(0.7, 0.35);
    BAConfig cfg;
    cfg.grid_size = 241;
    auto res = ba_constrained(ch, cost, cfg);
    CHECK(res.achieved_cost <= cost.cbar + cfg.lambda_bisect_tol);
    CHECK(res.lambda > 0.0);

    auto clusters = support_points(res.dist, 1e-4, 0.02);
    CHECK(clusters.size() <= 5);

    double near = 0.0;
    for (int i = 0; i < res.dist.grid_size; ++i) {
        const double x = res.dist.position(i);
        for (const auto& c : clusters.points())
            if (std::abs(x - c.x) <= 0.01) {
                near += res.dist.weights[i];
                break;
            }
    }
    CHECK(near >= 0.99);
}

TEST_CASE("ba_constrained: spread solution for alpha > 1") {
    auto ch = ChannelSpec::from_r(2.4);
    CostSpec cost(1.5, 0.35);
    BAConfig cfg;
    cfg.grid_size = 241;
    auto res = ba_constrained(ch, cost, cfg);
    int spread = 0;
    for (double w : res.dist.weights)
        if (w > 1e-4) ++spread;
    CHECK(spread > 30);
}

TEST_CASE("support_points clustering") {
    auto ch = ChannelSpec::from_r(4.0);
    CostSpec cost(1.0, 1.0);
    BAConfig cfg;
    cfg.grid_size = 201;
    auto res = ba_fixed_lambda(ch, cost, 0.0, cfg);
    auto clusters = support_points(res.dist, 1e-4, 0.02);
    REQUIRE(clusters.size() == 5);
    const double centers[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int j = 0; j < 5; ++j) {
        CHECK(std::abs(clusters.x(j) - centers[j]) <= 0.005);
        CHECK(clusters.m(j) == doctest::Approx(0.2).epsilon(0.05));
    }

    // degenerate: everything in one cluster when the radius spans the grid
    std::vector<double> w(101, 1.0 / 101);
    auto one = support_points(GridDistribution(101, w), 0.0, 1.0);
    CHECK(one.size() == 1);

    // point mass on one cell
    std::vector<double> w2(101, 0.0);
    w2[50] = 1.0;
    auto pm = support_points(GridDistribution(101, w2), 1e-9, 0.02);
    REQUIRE(pm.size() == 1);
    CHECK(pm.x(0) == doctest::Approx(0.5));
    CHECK(pm.m(0) == doctest::Approx(1.0));
}

TEST_CASE("oracle agrees with the analytic solver across regimes") {
    BAConfig cfg;
    cfg.grid_size = 241;
    for (double r : {2.0, 3.0, 2.4}) {
        auto ch = ChannelSpec::from_r(r);
        for (double alpha : {0.7, 1.0}) {
            CostSpec probe(alpha, 1.0);
            const double cstar = critical_cost(ch, probe);
            for (double frac : {2.0, 0.6}) {  // inactive and mid-regime budgets
                const double cbar = frac * cstar;
                CostSpec cost(alpha, cbar);
                auto analytic = solve(ch, cost);
                auto oracle = ba_constrained(ch, cost, cfg);
                CHECK(oracle.capacity_nats ==
                      doctest::Approx(analytic.capacity_nats).epsilon(5e-3));
                // clustered support matches the closed-form positions
                auto clusters = support_points(oracle.dist, 1e-4, 0.02);
                REQUIRE(clusters.size() == analytic.dist.size());
                const double cell = 1.0 / (cfg.grid_size - 1);
                for (std::size_t j = 0; j < clusters.size(); ++j)
                    CHECK(std::abs(clusters.x(j) - analytic.dist.x(j)) <= cell);
            }
        }
    }
}
