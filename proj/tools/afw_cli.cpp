/**
 * @file afw_cli.cpp
 * @brief Command-line front end: single runs, the experiment matrix, and
 *        metric recomputation from a logged flight.
 *
 * Exit codes: 0 success, 2 usage/config error, 3 mission incomplete,
 * 4 RCAC divergence, 5 simulator fault.
 */
#include "afw/errors.hpp"
#include "afw/metrics.hpp"
#include "afw/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace afw;

namespace {

constexpr int kUsageError = 2;
constexpr const char* kOutRootEnv = "AFW_OUT_ROOT";

struct Overrides {
    std::optional<double> duration;
    std::optional<double> alpha_d;
    std::optional<std::string> adaptive;
    std::optional<std::string> stuck_left_aileron;
};

/// Parses "<rad>@<t>".
std::pair<double, double> parse_stuck(const std::string& s) {
    const auto at = s.find('@');
    if (at == std::string::npos) throw InputError("--stuck-left-aileron expects <rad>@<t>, got '" + s + "'");
    try {
        std::size_t used = 0;
        const double angle = std::stod(s.substr(0, at), &used);
        if (used != at) throw std::invalid_argument("angle");
        const std::string ts = s.substr(at + 1);
        const double t = std::stod(ts, &used);
        if (used != ts.size()) throw std::invalid_argument("time");
        return {angle, t};
    } catch (const std::logic_error&) {
        throw InputError("--stuck-left-aileron expects <rad>@<t>, got '" + s + "'");
    }
}

void apply(const Overrides& o, scenario::ScenarioConfig& c) {
    if (o.duration) c.duration = *o.duration;
    if (o.alpha_d) c.failure.alpha_d = *o.alpha_d;
    if (o.adaptive) c.adaptive.mode = autopilot::parse_adaptive_mode(*o.adaptive);
    if (o.stuck_left_aileron) {
        const auto [angle, t] = parse_stuck(*o.stuck_left_aileron);
        c.failure.stuck_surface = sim::Surface::left_aileron;
        c.failure.stuck_angle = angle;
        c.failure.stuck_time = t;
    }
    c.validate();
}

fs::path output_root(const std::string& cli_out, const scenario::ScenarioConfig* c) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv(kOutRootEnv); env && *env) return env;
    return c ? c->output_dir : fs::path("out");
}

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--duration", o.duration, "Override run duration [s]")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha-d", o.alpha_d, "Override gain detuning factor")->check(CLI::NonNegativeNumber);
    cmd->add_option("--adaptive", o.adaptive, "Adaptive augmentation")
        ->check(CLI::IsMember({"on", "off", "pinned_zero"}));
    cmd->add_option("--stuck-left-aileron", o.stuck_left_aileron, "Freeze left aileron: <rad>@<t>");
}

int cmd_run(const std::string& config_path, const Overrides& o, const std::string& out) {
    auto config = scenario::load_scenario(config_path);
    apply(o, config);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = scenario::run_scenario(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = output_root(out, &config) / config.name;
    scenario::write_run_outputs(result, dir);
    std::printf("%s: %s (%zu/%zu waypoints, %.2f s wall)\n", result.name.c_str(),
                std::string(scenario::to_string(result.status)).c_str(), result.waypoints_reached,
                result.waypoint_count, wall);
    if (!result.diagnostic.empty()) std::printf("  %s\n", result.diagnostic.c_str());
    if (result.metrics) std::fputs(metrics::format_report(*result.metrics).c_str(), stdout);
    std::printf("outputs: %s\n", dir.string().c_str());
    return scenario::exit_code(result.status);
}

int cmd_matrix(const std::vector<std::string>& paths, const std::string& benchmark, const Overrides& o,
               const std::string& out, bool serial) {
    if (paths.empty()) throw InputError("matrix: at least one config is required");
    std::vector<scenario::ScenarioConfig> configs;
    for (const auto& p : paths) {
        configs.push_back(scenario::load_scenario(p));
        apply(o, configs.back());
    }
    const auto result = scenario::run_matrix(configs, benchmark,
                                             serial ? scenario::Execution::serial : scenario::Execution::parallel);
    const fs::path dir = output_root(out, nullptr) / "matrix";
    scenario::write_matrix_outputs(result, dir);
    std::fputs(scenario::comparison_table(result).c_str(), stdout);
    std::printf("outputs: %s\n", dir.string().c_str());
    return 0;
}

int cmd_metrics(const std::string& log_path, double warmup) {
    const auto log = metrics::read_csv(log_path);
    std::fputs(metrics::format_report(metrics::compute_metrics(log, warmup)).c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive fixed-wing autopilot scenario runner"};
    app.require_subcommand(1);

    std::string out;
    app.add_option("--out", out, std::string("Output root (default: $") + kOutRootEnv + " or the config's output_dir)");

    std::string run_config;
    Overrides run_overrides;
    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("config", run_config, "Scenario JSON")->required();
    add_overrides(run, run_overrides);

    std::vector<std::string> matrix_configs;
    std::string benchmark;
    bool serial = false;
    Overrides matrix_overrides;
    auto* matrix = app.add_subcommand("matrix", "Run several scenarios and normalize by a benchmark");
    matrix->add_option("configs", matrix_configs, "Scenario JSON files")->required();
    matrix->add_option("--benchmark", benchmark, "Name of the benchmark scenario")->required();
    matrix->add_flag("--serial", serial, "Run scenarios one after another");
    add_overrides(matrix, matrix_overrides);

    std::string log_path;
    double warmup = 0.0;
    auto* met = app.add_subcommand("metrics", "Recompute metrics from a flight log CSV");
    met->add_option("log", log_path, "flight_log.csv")->required();
    met->add_option("--warmup", warmup, "Exclude the first seconds [s]")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    }

    try {
        if (run->parsed()) return cmd_run(run_config, run_overrides, out);
        if (matrix->parsed()) return cmd_matrix(matrix_configs, benchmark, matrix_overrides, out, serial);
        return cmd_metrics(log_path, warmup);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const FaultError& e) {
        std::cerr << "fault: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }
}
