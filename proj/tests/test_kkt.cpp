#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ucap/analytic.hpp"
#include "ucap/kkt.hpp"

#include <cmath>
#include <random>

using namespace ucap;

TEST_CASE("Case I solution passes with zero residuals") {
    auto ch = ChannelSpec::from_r(4.0);
    CostSpec cost(1.0, 0.9);
    auto dist = unconstrained_solution(ch);
    auto rep = verify(dist, 0.0, ch, cost);
    CHECK(rep.passed);
    CHECK(rep.capacity_nats == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    CHECK(rep.max_equality_residual < 1e-12);
    CHECK(rep.max_inequality_violation < 1e-12);
    CHECK(rep.equality_residuals.size() == 5);
}

TEST_CASE("Case IIa solution passes at tight tolerances") {
    auto ch = ChannelSpec::from_r(2.0);
    CostSpec cost(1.0, 0.4);
    auto [lambda, dist] = solve_lambda(0.4, 0, ch, cost);
    auto rep = verify(dist, lambda, ch, cost, 10001, 1e-9, 1e-9);
    CHECK(rep.passed);
    CHECK(rep.lambda == doctest::Approx(0.60936).epsilon(1e-4));
}

TEST_CASE("perturbed masses fail verification") {
    auto ch = ChannelSpec::from_r(2.0);
    CostSpec cost(1.0, 0.4);
    auto [lambda, dist] = solve_lambda(0.4, 0, ch, cost);
    std::vector<double> xs, ms;
    for (const auto& p : dist.points()) {
        xs.push_back(p.x);
        ms.push_back(p.m);
    }
    ms[0] += 0.01;
    double sum = 0.0;
    for (double m : ms) sum += m;
    for (double& m : ms) m /= sum;
    auto rep = verify(DiscreteDistribution(xs, ms), lambda, ch, cost);
    CHECK_FALSE(rep.passed);
    CHECK(rep.max_inequality_violation > 0.0);
}

TEST_CASE("verification reports an infinite information density on gaps") {
    auto ch = ChannelSpec::from_b(0.1);
    DiscreteDistribution dist({0.0, 0.9}, {0.5, 0.5});
    auto rep = verify(dist, 0.0, ch, CostSpec(1.0, 1.0));
    CHECK_FALSE(rep.passed);
    CHECK(rep.has_infinite);
    CHECK(rep.infinite_at > 0.0);
    CHECK(rep.infinite_at < 0.9);
}

TEST_CASE("piecewise linearity: constant i for the integer unconstrained case") {
    auto ch = ChannelSpec::from_r(4.0);
    auto segs = check_piecewise_linearity(unconstrained_solution(ch), ch);
    REQUIRE(segs.size() == 4);
    for (const auto& s : segs) {
        CHECK_FALSE(s.skipped);
        CHECK(std::abs(s.formula_slope) < 1e-12);
        CHECK(std::abs(s.fitted_slope) < 1e-10);
        CHECK(s.max_deviation < 1e-10);
    }
}

TEST_CASE("piecewise linearity: constrained non-integer solution matches the slope formula") {
    auto ch = ChannelSpec::from_r(2.4);
    CostSpec cost(0.7, 0.54);
    auto res = solve(ch, cost);
    REQUIRE(res.regime.tag == RegimeTag::CaseIIb);
    auto segs = check_piecewise_linearity(res.dist, ch);
    REQUIRE(segs.size() == res.dist.size() - 1);
    for (const auto& s : segs) {
        REQUIRE_FALSE(s.skipped);
        CHECK(s.fitted_slope == doctest::Approx(s.formula_slope).epsilon(1e-8));
        CHECK(s.max_deviation < 1e-8);
        // masses decrease with position, so every slope is nonnegative
        CHECK(s.formula_slope >= 0.0);
    }
}

TEST_CASE("piecewise linearity: decreasing masses give nonnegative slopes") {
    auto ch = ChannelSpec::from_r(2.4);
    auto base = unconstrained_solution(ch);
    std::vector<double> xs, ms;
    double sum = 0.0;
    for (std::size_t j = 0; j < base.size(); ++j) {
        xs.push_back(base.x(j));
        ms.push_back(1.0 / (j + 1.0));
        sum += ms.back();
    }
    for (double& m : ms) m /= sum;
    auto segs = check_piecewise_linearity(DiscreteDistribution(xs, ms), ch);
    for (const auto& s : segs) {
        REQUIRE_FALSE(s.skipped);
        CHECK(s.formula_slope >= 0.0);
        CHECK(s.fitted_slope == doctest::Approx(s.formula_slope).epsilon(1e-8));
    }
}

namespace {

struct GappedDist {
    DiscreteDistribution dist;
    ChannelSpec ch;
    std::pair<double, double> gap;
};

GappedDist random_gapped(std::mt19937& rng) {
    std::uniform_int_distribution<int> nd(3, 9);
    std::uniform_real_distribution<double> xd(0.0, 1.0);
    std::exponential_distribution<double> md(1.0);
    const int n = nd(rng);
    std::vector<double> xs;
    while (static_cast<int>(xs.size()) < n) {
        double x = xd(rng);
        bool ok = true;
        for (double e : xs)
            if (std::abs(e - x) < 5e-3) ok = false;
        if (ok) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    // widest interior gap becomes the tested gap; b chosen so every gap < 2b
    double widest = 0.0;
    int gi = 0;
    for (int j = 0; j + 1 < n; ++j) {
        if (xs[j + 1] - xs[j] > widest) {
            widest = xs[j + 1] - xs[j];
            gi = j;
        }
    }
    const double b = 0.6 * widest;
    std::vector<double> ms(n);
    double sum = 0.0;
    for (double& m : ms) {
        m = md(rng) + 1e-2;
        sum += m;
    }
    for (double& m : ms) m /= sum;
    return {DiscreteDistribution(xs, ms), ChannelSpec::from_b(b), {xs[gi], xs[gi + 1]}};
}

std::vector<double> beta_grid(int count) {
    std::vector<double> betas(count);
    for (int i = 0; i < count; ++i) betas[i] = (i + 1.0) / (count + 1.0);
    return betas;
}

}  // namespace

TEST_CASE("gap concavity holds for randomized gapped distributions") {
    std::mt19937 rng(123);
    const auto betas = beta_grid(99);
    for (int t = 0; t < 200; ++t) {
        auto g = random_gapped(rng);
        const double deficit = check_gap_concavity(g.dist, g.gap, g.ch, betas);
        CHECK(deficit >= -1e-10);
    }
}

TEST_CASE("gap concavity endpoints and symmetry") {
    auto ch = ChannelSpec::from_b(0.3);
    DiscreteDistribution dist({0.2, 0.8}, {0.5, 0.5});
    // beta = 0 and beta = 1 give exactly zero deficit
    CHECK(check_gap_concavity(dist, {0.2, 0.8}, ch, {0.0}) == doctest::Approx(0.0));
    CHECK(check_gap_concavity(dist, {0.2, 0.8}, ch, {1.0}) == doctest::Approx(0.0));
    // symmetric distribution and gap: beta and 1-beta give equal deficits
    for (double beta : {0.1, 0.25, 0.4}) {
        const double a = check_gap_concavity(dist, {0.2, 0.8}, ch, {beta});
        const double b = check_gap_concavity(dist, {0.2, 0.8}, ch, {1.0 - beta});
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("gap of width >= 2b reports the infinite case") {
    auto ch = ChannelSpec::from_b(0.1);
    DiscreteDistribution dist({0.0, 0.9}, {0.5, 0.5});
    CHECK(std::isinf(check_gap_concavity(dist, {0.0, 0.9}, ch, beta_grid(9))));
}

TEST_CASE("analytic solutions pass verification across a parameter sweep") {
    for (double r : {1.5, 2.0, 2.4, 3.0, 4.0, 4.4}) {
        auto ch = ChannelSpec::from_r(r);
        for (double alpha : {0.3, 0.7, 1.0}) {
            CostSpec probe(alpha, 1.0);
            const double cstar = critical_cost(ch, probe);
            for (double frac : {0.35, 0.75, 1.5}) {
                auto res = solve(ch, CostSpec(alpha, frac * cstar));
                CHECK(res.kkt.passed);
                CHECK(res.kkt.max_equality_residual <= 1e-8);
                CHECK(res.kkt.max_inequality_violation <= 1e-8);
            }
        }
    }
}

TEST_CASE("Case III oracle solution verifies at discretization tolerances") {
    BAConfig cfg;
    cfg.grid_size = 241;
    auto ch = ChannelSpec::from_r(2.4);
    CostSpec cost(1.5, 0.35);
    auto ba = ba_constrained(ch, cost, cfg);
    auto rep = verify(ba.dist.as_discrete(1e-12), ba.lambda, ch, cost, 2001, 5e-3, 5e-3, 1e-4);
    CHECK(rep.passed);
}
