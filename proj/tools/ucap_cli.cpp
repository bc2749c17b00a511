// uniform-capacity command-line tool: solve / sweep-r / phase / verify /
// oracle / thresholds. All numeric output is formatted at 17 significant
// digits so identical invocations produce byte-identical files.
#include <CLI11.hpp>
#include <json.hpp>

#include "ucap/analytic.hpp"
#include "ucap/channel.hpp"
#include "ucap/kkt.hpp"
#include "ucap/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr const char* kSchema = "uniform-capacity/v1";
constexpr const char* kVersion = "1.0.0";

std::string f17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_bits(double nats) { return nats / std::log(2.0); }

/// Timestamp for manifests; honors SOURCE_DATE_EPOCH for reproducible runs.
std::string iso_timestamp() {
    std::time_t t;
    if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Whole-file write; the content is assembled first so a failed run never
/// leaves a partial file behind.
void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::map<std::string, std::string>& params,
                    const std::vector<std::string>& outputs) {
    nlohmann::ordered_json j;
    j["schema"] = kSchema;
    j["command"] = command;
    j["parameters"] = params;
    j["outputs"] = outputs;
    j["tool_version"] = kVersion;
    j["timestamp"] = iso_timestamp();
    write_file(out_path + ".manifest.json", j.dump(2) + "\n");
}

int support_size_of(const ucap::Regime& regime, const ucap::ChannelSpec& ch) {
    const int n0 = ch.is_integer_r ? ch.n + 1 : 2 * ch.n + 2;
    switch (regime.tag) {
        case ucap::RegimeTag::CaseI:
        case ucap::RegimeTag::CaseIIa:
            return n0;
        case ucap::RegimeTag::CaseIIb:
            return n0 - regime.k;
        case ucap::RegimeTag::CaseIII:
            return 0;  // continuum support
    }
    return 0;
}

nlohmann::ordered_json solve_to_json(const ucap::SolveResult& res, double r, double alpha,
                                     double cbar, bool bits) {
    nlohmann::ordered_json j;
    j["schema"] = kSchema;
    j["r"] = nlohmann::ordered_json::parse(f17(r));
    j["alpha"] = nlohmann::ordered_json::parse(f17(alpha));
    j["cbar"] = nlohmann::ordered_json::parse(f17(cbar));
    j["regime"] = ucap::to_string(res.regime.tag);
    j["k"] = res.regime.k;
    j["lambda_star"] = nlohmann::ordered_json::parse(f17(res.regime.lambda_star));
    j["cbar_star"] = nlohmann::ordered_json::parse(f17(res.regime.cbar_star));
    if (res.continuous_support) {
        auto grid = nlohmann::ordered_json::array();
        auto weights = nlohmann::ordered_json::array();
        for (int i = 0; i < res.grid.grid_size; ++i) {
            grid.push_back(nlohmann::ordered_json::parse(f17(res.grid.position(i))));
            weights.push_back(nlohmann::ordered_json::parse(f17(res.grid.weights[i])));
        }
        j["grid"] = std::move(grid);
        j["weights"] = std::move(weights);
    } else {
        auto support = nlohmann::ordered_json::array();
        for (const auto& p : res.dist.points()) {
            nlohmann::ordered_json pt;
            pt["x"] = nlohmann::ordered_json::parse(f17(p.x));
            pt["m"] = nlohmann::ordered_json::parse(f17(p.m));
            support.push_back(std::move(pt));
        }
        j["support"] = std::move(support);
    }
    j["capacity_nats"] = nlohmann::ordered_json::parse(f17(res.capacity_nats));
    if (bits) j["capacity_bits"] = nlohmann::ordered_json::parse(f17(to_bits(res.capacity_nats)));
    j["achieved_cost"] = nlohmann::ordered_json::parse(f17(res.achieved_cost));
    nlohmann::ordered_json k;
    k["max_violation"] = nlohmann::json::parse(
        f17(std::max(res.kkt.max_equality_residual, res.kkt.max_inequality_violation)));
    k["passed"] = res.kkt.passed;
    j["kkt"] = std::move(k);
    return j;
}

int cmd_solve(double r, double alpha, double cbar, const std::string& out_path, bool bits) {
    auto ch = ucap::ChannelSpec::from_r(r);
    ucap::CostSpec cost(alpha, cbar);
    auto res = ucap::solve(ch, cost);
    write_file(out_path, solve_to_json(res, r, alpha, cbar, bits).dump(2) + "\n");
    return 0;
}

int cmd_sweep_r(double r_min, double r_max, int steps, double alpha, double cbar,
                const std::string& out_path, bool bits) {
    if (!(r_min > 0.0 && r_min < r_max)) throw std::invalid_argument("need 0 < r-min < r-max");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    std::ostringstream csv;
    csv << "r,x,m,regime,support_size\n";
    for (int s = 0; s < steps; ++s) {
        const double r =
            steps == 1 ? r_min : r_min + (r_max - r_min) * s / static_cast<double>(steps - 1);
        auto ch = ucap::ChannelSpec::from_r(r);
        if (cbar <= 0.0) {  // unconstrained sweep
            auto dist = ucap::unconstrained_solution(ch);
            for (const auto& p : dist.points())
                csv << f17(r) << ',' << f17(p.x) << ',' << f17(p.m) << ",CaseI,"
                    << dist.size() << '\n';
            continue;
        }
        ucap::CostSpec cost(alpha, cbar);
        auto res = ucap::solve(ch, cost);
        if (res.continuous_support) {
            int cells = 0;
            for (double w : res.grid.weights)
                if (w > 1e-4) ++cells;
            csv << f17(r) << ",,,CaseIII," << cells << '\n';
            continue;
        }
        for (const auto& p : res.dist.points())
            csv << f17(r) << ',' << f17(p.x) << ',' << f17(p.m) << ','
                << ucap::to_string(res.regime.tag) << ',' << res.dist.size() << '\n';
    }
    write_file(out_path, csv.str());
    std::map<std::string, std::string> params = {
        {"r_min", f17(r_min)}, {"r_max", f17(r_max)},  {"steps", std::to_string(steps)},
        {"alpha", f17(alpha)}, {"cbar", cbar > 0.0 ? f17(cbar) : std::string("none")},
        {"bits", bits ? "true" : "false"}};
    write_manifest(out_path, "sweep-r", params, {out_path});
    return 0;
}

int cmd_phase(double r, double alpha_min, double alpha_max, double cbar_min, double cbar_max,
              int resolution, const std::string& out_path) {
    if (!(alpha_min > 0.0 && alpha_min < alpha_max) || !(cbar_min > 0.0 && cbar_min < cbar_max))
        throw std::invalid_argument("ranges must be positive and increasing");
    if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
    auto ch = ucap::ChannelSpec::from_r(r);
    std::ostringstream csv;
    csv << "alpha,cbar,regime,support_size\n";
    for (int ia = 0; ia < resolution; ++ia) {
        const double alpha = alpha_min + (alpha_max - alpha_min) * ia / (resolution - 1.0);
        for (int ic = 0; ic < resolution; ++ic) {
            const double cbar = cbar_min + (cbar_max - cbar_min) * ic / (resolution - 1.0);
            auto regime = ucap::classify(ch, ucap::CostSpec(alpha, cbar));
            csv << f17(alpha) << ',' << f17(cbar) << ',' << ucap::to_string(regime.tag) << ','
                << support_size_of(regime, ch) << '\n';
        }
    }
    write_file(out_path, csv.str());
    std::map<std::string, std::string> params = {
        {"r", f17(r)},
        {"alpha_min", f17(alpha_min)},
        {"alpha_max", f17(alpha_max)},
        {"cbar_min", f17(cbar_min)},
        {"cbar_max", f17(cbar_max)},
        {"resolution", std::to_string(resolution)}};
    write_manifest(out_path, "phase", params, {out_path});
    return 0;
}

int cmd_verify(const std::string& input_path, const std::string& out_path, bool bits) {
    std::ifstream in(input_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + input_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed input JSON: ") + e.what());
    }
    for (const char* key : {"r", "alpha", "cbar", "lambda_star"})
        if (!j.contains(key) || !j[key].is_number())
            throw std::runtime_error(std::string("schema error: missing numeric field '") + key +
                                     "'");
    const double r = j["r"], alpha = j["alpha"], cbar = j["cbar"], lambda = j["lambda_star"];
    auto ch = ucap::ChannelSpec::from_r(r);
    ucap::CostSpec cost(alpha, cbar);

    ucap::DiscreteDistribution dist;
    bool from_grid = false;
    if (j.contains("support") && j["support"].is_array() && !j["support"].empty()) {
        std::vector<double> xs, ms;
        for (const auto& p : j["support"]) {
            if (!p.contains("x") || !p.contains("m"))
                throw std::runtime_error("schema error: support entries need 'x' and 'm'");
            xs.push_back(p["x"]);
            ms.push_back(p["m"]);
        }
        dist = ucap::DiscreteDistribution(xs, ms);
    } else if (j.contains("grid") && j.contains("weights")) {
        std::vector<double> w = j["weights"].get<std::vector<double>>();
        const int g = static_cast<int>(w.size());
        dist = ucap::GridDistribution(g, std::move(w)).as_discrete(1e-12);
        from_grid = true;
    } else {
        throw std::runtime_error("schema error: need 'support' or 'grid'/'weights'");
    }

    // grid-sampled candidates carry discretization error; verify them at the
    // same relaxed tolerances the solver uses for its oracle results
    auto rep = from_grid ? ucap::verify(dist, lambda, ch, cost, 10001, 5e-3, 5e-3, 1e-4)
                         : ucap::verify(dist, lambda, ch, cost);

    nlohmann::ordered_json o;
    o["schema"] = kSchema;
    o["input"] = input_path;
    o["passed"] = rep.passed;
    o["capacity_nats"] = nlohmann::ordered_json::parse(f17(rep.capacity_nats));
    if (bits) o["capacity_bits"] = nlohmann::ordered_json::parse(f17(to_bits(rep.capacity_nats)));
    o["lambda"] = nlohmann::ordered_json::parse(f17(rep.lambda));
    o["max_equality_residual"] = nlohmann::ordered_json::parse(f17(rep.max_equality_residual));
    o["max_inequality_violation"] = nlohmann::ordered_json::parse(f17(rep.max_inequality_violation));
    o["check_grid_size"] = rep.check_grid_size;
    o["eq_tol"] = nlohmann::ordered_json::parse(f17(rep.eq_tol));
    o["ineq_tol"] = nlohmann::ordered_json::parse(f17(rep.ineq_tol));
    write_file(out_path, o.dump(2) + "\n");
    return rep.passed ? 0 : 1;
}

int cmd_oracle(double r, double alpha, double cbar, int grid, const std::string& out_path,
               bool bits) {
    auto ch = ucap::ChannelSpec::from_r(r);
    ucap::CostSpec cost(alpha, cbar);
    ucap::BAConfig cfg;
    cfg.grid_size = grid;
    auto res = ucap::ba_constrained(ch, cost, cfg);

    nlohmann::ordered_json j;
    j["schema"] = kSchema;
    j["r"] = nlohmann::ordered_json::parse(f17(r));
    j["alpha"] = nlohmann::ordered_json::parse(f17(alpha));
    j["cbar"] = nlohmann::ordered_json::parse(f17(cbar));
    j["grid_size"] = res.dist.grid_size;
    j["lambda"] = nlohmann::ordered_json::parse(f17(res.lambda));
    j["achieved_cost"] = nlohmann::ordered_json::parse(f17(res.achieved_cost));
    j["capacity_nats"] = nlohmann::ordered_json::parse(f17(res.capacity_nats));
    if (bits) j["capacity_bits"] = nlohmann::ordered_json::parse(f17(to_bits(res.capacity_nats)));
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    auto weights = nlohmann::ordered_json::array();
    for (double w : res.dist.weights) weights.push_back(nlohmann::ordered_json::parse(f17(w)));
    j["weights"] = std::move(weights);
    write_file(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_thresholds(double r, double alpha, const std::string& out_path) {
    auto ch = ucap::ChannelSpec::from_r(r);
    ucap::CostSpec probe(alpha, 1.0);
    auto tt = ucap::compute_thresholds(ch, probe);

    nlohmann::ordered_json j;
    j["schema"] = kSchema;
    j["r"] = nlohmann::ordered_json::parse(f17(r));
    j["alpha"] = nlohmann::ordered_json::parse(f17(alpha));
    j["cbar_star"] = nlohmann::ordered_json::parse(f17(ucap::critical_cost(ch, probe)));
    auto thetas = nlohmann::ordered_json::array();
    auto lambdas = nlohmann::ordered_json::array();
    for (double t : tt.thetas) thetas.push_back(nlohmann::ordered_json::parse(f17(t)));
    for (double l : tt.lambdas) lambdas.push_back(nlohmann::ordered_json::parse(f17(l)));
    j["thetas"] = std::move(thetas);
    j["lambdas"] = std::move(lambdas);
    write_file(out_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacity-achieving input distributions of the uniform-noise channel"};
    app.require_subcommand(1);
    bool bits = false;
    app.add_flag("--bits", bits, "report capacities in bits alongside nats");

    double r = 0, alpha = 0, cbar = 0;
    std::string out_path, input_path;

    auto* solve = app.add_subcommand("solve", "closed-form (or oracle) solve for one setting");
    solve->add_option("--r", r, "inverse noise width r = 1/(2b)")->required();
    solve->add_option("--alpha", alpha, "cost exponent")->required();
    solve->add_option("--cbar", cbar, "cost budget")->required();
    solve->add_option("--out", out_path, "output JSON path")->required();

    double r_min = 0, r_max = 0;
    int steps = 0;
    double sweep_cbar = -1.0;
    auto* sweep = app.add_subcommand("sweep-r", "mass points as a function of r (CSV)");
    sweep->add_option("--r-min", r_min)->required();
    sweep->add_option("--r-max", r_max)->required();
    sweep->add_option("--steps", steps)->required();
    sweep->add_option("--alpha", alpha)->required();
    sweep->add_option("--cbar", sweep_cbar, "cost budget; omit for the unconstrained sweep");
    sweep->add_option("--out", out_path)->required();

    double alpha_min = 0, alpha_max = 0, cbar_min = 0, cbar_max = 0;
    int resolution = 0;
    auto* phase = app.add_subcommand("phase", "regime classification over the alpha-cbar plane");
    phase->add_option("--r", r)->required();
    phase->add_option("--alpha-min", alpha_min)->required();
    phase->add_option("--alpha-max", alpha_max)->required();
    phase->add_option("--cbar-min", cbar_min)->required();
    phase->add_option("--cbar-max", cbar_max)->required();
    phase->add_option("--resolution", resolution)->required();
    phase->add_option("--out", out_path)->required();

    auto* verify = app.add_subcommand("verify", "check optimality of a solve output");
    verify->add_option("--input", input_path, "solve JSON to check")->required();
    verify->add_option("--out", out_path)->required();

    int grid = 241;
    auto* oracle = app.add_subcommand("oracle", "constrained Blahut-Arimoto solve");
    oracle->add_option("--r", r)->required();
    oracle->add_option("--alpha", alpha)->required();
    oracle->add_option("--cbar", cbar)->required();
    oracle->add_option("--grid", grid, "input grid size (default 241)");
    oracle->add_option("--out", out_path)->required();

    auto* thresholds = app.add_subcommand("thresholds", "support-shrinking budgets theta_k");
    thresholds->add_option("--r", r)->required();
    thresholds->add_option("--alpha", alpha)->required();
    thresholds->add_option("--out", out_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(r, alpha, cbar, out_path, bits);
        if (sweep->parsed())
            return cmd_sweep_r(r_min, r_max, steps, alpha, sweep_cbar, out_path, bits);
        if (phase->parsed())
            return cmd_phase(r, alpha_min, alpha_max, cbar_min, cbar_max, resolution, out_path);
        if (verify->parsed()) return cmd_verify(input_path, out_path, bits);
        if (oracle->parsed()) return cmd_oracle(r, alpha, cbar, grid, out_path, bits);
        if (thresholds->parsed()) return cmd_thresholds(r, alpha, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
