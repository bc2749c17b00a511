#include "ucap/channel.hpp"

#include <algorithm>
#include <cmath>

namespace ucap {

namespace {

constexpr double kEdgeMergeTol = 1e-13;   // breakpoints closer than this coincide
constexpr double kZeroGapTol = 1e-9;      // zero-density measure that counts as a gap
constexpr double kZeroValueTol = 1e-15;   // density below this is treated as zero
constexpr double kMassDropTol = 1e-14;

}  // namespace

ChannelSpec ChannelSpec::from_r(double r, double eps_r) {
    if (!(r > 0.0)) throw std::invalid_argument("ChannelSpec: r must be positive");
    ChannelSpec ch;
    ch.r = r;
    ch.b = 1.0 / (2.0 * r);
    const double rounded = std::round(r);
    if (rounded >= 1.0 && std::abs(r - rounded) < eps_r) {
        ch.is_integer_r = true;
        ch.n = static_cast<int>(rounded);
        ch.rho = 0.0;
    } else {
        ch.is_integer_r = false;
        ch.n = static_cast<int>(std::floor(r));
        ch.rho = r - ch.n;
    }
    return ch;
}

ChannelSpec ChannelSpec::from_b(double b, double eps_r) {
    if (!(b > 0.0)) throw std::invalid_argument("ChannelSpec: b must be positive");
    return from_r(1.0 / (2.0 * b), eps_r);
}

CostSpec::CostSpec(double alpha_, double cbar_) : alpha(alpha_), cbar(cbar_) {
    if (!(alpha > 0.0)) throw std::invalid_argument("CostSpec: alpha must be positive");
    if (!(cbar > 0.0)) throw std::invalid_argument("CostSpec: cbar must be positive");
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> positions,
                                           std::vector<double> masses) {
    if (positions.size() != masses.size())
        throw std::invalid_argument("DiscreteDistribution: size mismatch");
    if (positions.empty())
        throw std::invalid_argument("DiscreteDistribution: empty support");
    double sum = 0.0;
    for (std::size_t j = 0; j < positions.size(); ++j) {
        if (positions[j] < 0.0 || positions[j] > 1.0)
            throw std::invalid_argument("DiscreteDistribution: position outside [0,1]");
        if (j > 0 && positions[j] <= positions[j - 1])
            throw std::invalid_argument("DiscreteDistribution: positions not strictly increasing");
        if (masses[j] < -1e-12)
            throw std::invalid_argument("DiscreteDistribution: negative mass");
        sum += masses[j];
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("DiscreteDistribution: masses do not sum to 1");
    points_.reserve(positions.size());
    for (std::size_t j = 0; j < positions.size(); ++j) {
        if (masses[j] > kMassDropTol) points_.push_back({positions[j], masses[j] / sum});
    }
    if (points_.empty())
        throw std::invalid_argument("DiscreteDistribution: all masses vanish");
}

DiscreteDistribution DiscreteDistribution::point_mass(double x) {
    return DiscreteDistribution({x}, {1.0});
}

DiscreteDistribution DiscreteDistribution::reversed() const {
    std::vector<double> xs, ms;
    xs.reserve(points_.size());
    ms.reserve(points_.size());
    for (auto it = points_.rbegin(); it != points_.rend(); ++it) {
        xs.push_back(1.0 - it->x);
        ms.push_back(it->m);
    }
    return DiscreteDistribution(std::move(xs), std::move(ms));
}

GridDistribution::GridDistribution(int grid_size_, std::vector<double> weights_)
    : grid_size(grid_size_), weights(std::move(weights_)) {
    if (grid_size < 2) throw std::invalid_argument("GridDistribution: grid_size must be >= 2");
    if (static_cast<int>(weights.size()) != grid_size)
        throw std::invalid_argument("GridDistribution: weight count mismatch");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("GridDistribution: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("GridDistribution: weights do not sum to 1");
}

DiscreteDistribution GridDistribution::as_discrete(double drop_tol) const {
    std::vector<double> xs, ms;
    for (int i = 0; i < grid_size; ++i) {
        if (weights[i] > drop_tol) {
            xs.push_back(position(i));
            ms.push_back(weights[i]);
        }
    }
    double sum = 0.0;
    for (double m : ms) sum += m;
    for (double& m : ms) m /= sum;
    return DiscreteDistribution(std::move(xs), std::move(ms));
}

double output_density(double y, const DiscreteDistribution& dist, const ChannelSpec& ch) {
    double acc = 0.0;
    for (const auto& p : dist.points()) {
        if (std::abs(y - p.x) < ch.b) acc += p.m;
    }
    return acc / (2.0 * ch.b);
}

OutputDensity::OutputDensity(const DiscreteDistribution& dist, const ChannelSpec& ch) {
    struct Event {
        double y;
        double dm;
    };
    std::vector<Event> events;
    events.reserve(2 * dist.size());
    for (const auto& p : dist.points()) {
        events.push_back({p.x - ch.b, p.m});
        events.push_back({p.x + ch.b, -p.m});
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.y < b.y; });

    std::size_t i = 0;
    while (i < events.size()) {
        double y = events[i].y;
        // coincident (or near-coincident) breakpoints collapse into one edge
        while (i < events.size() && events[i].y <= y + kEdgeMergeTol) ++i;
        edges_.push_back(y);
    }

    // each segment sums its covering blocks from scratch: a running event sum
    // would leave O(eps) residue from large blocks on segments whose own mass
    // is many orders of magnitude smaller
    const double scale = 1.0 / (2.0 * ch.b);
    values_.reserve(edges_.size() - 1);
    for (std::size_t s = 0; s + 1 < edges_.size(); ++s) {
        const double mid = 0.5 * (edges_[s] + edges_[s + 1]);
        double mass = 0.0;
        for (const auto& p : dist.points())
            if (std::abs(mid - p.x) < ch.b) mass += p.m;
        values_.push_back(mass * scale);
    }
}

double OutputDensity::value(double y) const {
    auto it = std::upper_bound(edges_.begin(), edges_.end(), y);
    if (it == edges_.begin() || it == edges_.end()) return 0.0;
    return values_[static_cast<std::size_t>(it - edges_.begin()) - 1];
}

double OutputDensity::integral() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k)
        acc += values_[k] * (edges_[k + 1] - edges_[k]);
    return acc;
}

double marginal_information_density(double x, const OutputDensity& py, const ChannelSpec& ch) {
    const double lo = x - ch.b;
    const double hi = x + ch.b;
    const auto& edges = py.edges();
    const auto& values = py.values();

    double acc = 0.0;       // integral of log(2b p_Y) over segments with p_Y > 0
    double zero_len = 0.0;  // measure where p_Y = 0 inside the window

    // portion of the window outside the density's breakpoint range
    if (!edges.empty()) {
        zero_len += std::max(0.0, std::min(hi, edges.front()) - lo);
        zero_len += std::max(0.0, hi - std::max(lo, edges.back()));
    } else {
        zero_len = hi - lo;
    }

    for (std::size_t k = 0; k < values.size(); ++k) {
        const double a = std::max(lo, edges[k]);
        const double b2 = std::min(hi, edges[k + 1]);
        const double len = b2 - a;
        if (len <= 1e-12) continue;
        if (values[k] < kZeroValueTol) {
            zero_len += len;
        } else {
            acc += len * std::log(2.0 * ch.b * values[k]);
        }
    }
    if (zero_len > kZeroGapTol) return std::numeric_limits<double>::infinity();
    return -ch.r * acc;
}

double marginal_information_density(double x, const DiscreteDistribution& dist,
                                    const ChannelSpec& ch) {
    return marginal_information_density(x, OutputDensity(dist, ch), ch);
}

double mutual_information(const DiscreteDistribution& dist, const ChannelSpec& ch) {
    const OutputDensity py(dist, ch);
    double acc = 0.0;
    for (const auto& p : dist.points()) {
        const double ix = marginal_information_density(p.x, py, ch);
        if (is_infinite_info(ix)) return ix;
        acc += p.m * ix;
    }
    return acc;
}

double expected_cost(const DiscreteDistribution& dist, const CostSpec& cost) {
    double acc = 0.0;
    for (const auto& p : dist.points()) acc += p.m * cost.cost(p.x);
    return acc;
}

}  // namespace ucap
