#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "seqscale/harness/config.hpp"
#include "seqscale/harness/report.hpp"
#include "seqscale/harness/runner.hpp"
#include "seqscale/harness/sweep.hpp"
#include "seqscale/harness/validation.hpp"
#include "seqscale/markov.hpp"
#include "seqscale/stopping.hpp"

namespace {

using namespace seqscale;

int cmd_analyze(double a, double b, double p0, double tau, double sigma) {
    const markov::TransitionModel model(a, b);
    std::cout << "lambda=" << model.lambda() << '\n';
    std::cout << "L=" << model.fixed_point() << '\n';
    std::cout << "regime=" << markov::to_string(markov::classify_regime(model, p0, sigma))
              << '\n';
    std::cout << "asymptotic_benefit=" << markov::asymptotic_benefit(model, p0, sigma) << '\n';
    const stopping::StoppingDecision decision = stopping::optimal_iterations(model, p0, tau);
    std::cout << "case=" << stopping::to_string(decision.case_tag) << '\n';
    if (decision.reachable()) {
        std::cout << "i_star=" << *decision.iterations << '\n';
    } else {
        std::cout << "i_star=unreachable\n";
    }
    return 0;
}

int cmd_simulate(std::int64_t trials, std::uint64_t seed) {
    const harness::ValidationSummary summary =
        harness::run_validation_suite(trials, seed, std::cout);
    std::cout << (summary.passed() ? "validation passed\n" : "validation FAILED\n");
    return summary.passed() ? 0 : 1;
}

int cmd_run(const std::string& config_path, const std::string& output_override) {
    harness::RunConfig config = harness::load_run_config(config_path);
    if (!output_override.empty()) config.output_dir = output_override;
    const harness::RunOutcome outcome = harness::execute_run(config);
    harness::persist_run(outcome, config.output_dir);

    std::size_t failures = outcome.dataset.failures.size();
    std::cout << "questions=" << outcome.records.size() << " failures=" << failures << '\n';
    std::cout << harness::bounds_to_json(outcome.dataset.bounds) << '\n';
    std::cout << "wrote " << (config.output_dir / "trajectories.jsonl").string() << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& tau_grid,
              const std::string& gamma_grid, const std::string& sigma_grid,
              const std::string& out_path) {
    const harness::RunConfig base = harness::load_run_config(config_path);
    harness::SweepGrid grid;
    if (!tau_grid.empty()) grid.taus = harness::parse_grid(tau_grid);
    if (!gamma_grid.empty()) grid.gammas = harness::parse_grid(gamma_grid);
    if (!sigma_grid.empty()) grid.sigmas = harness::parse_grid(sigma_grid);
    const auto rows = harness::run_sweep(base, grid);
    const std::string csv = harness::sweep_csv(rows);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_path, std::ios::out | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write sweep output '" + out_path + "'");
        out << csv;
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

int cmd_report(const std::string& input_path, const std::string& out_path) {
    const auto records = harness::load_trajectories(input_path);
    const auto rows = harness::aggregate_report(records);
    const std::string csv = harness::report_csv(rows);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_path, std::ios::out | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write report output '" + out_path + "'");
        out << csv;
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential-scaling control engine"};
    app.require_subcommand(1);

    double a = 0.0, b = 0.0, p0 = 0.0, tau = 0.5, sigma = 0.0;
    auto* analyze = app.add_subcommand(
        "analyze", "Print lambda, L, regime and the optimal stopping iteration");
    analyze->add_option("--a", a, "correct->wrong transition probability")->required();
    analyze->add_option("--b", b, "wrong->correct transition probability")->required();
    analyze->add_option("--p0", p0, "zero-shot correctness probability")->required();
    analyze->add_option("--tau", tau, "confidence level in (0,1)")->required();
    analyze->add_option("--sigma", sigma, "bias margin (default 0)");

    std::int64_t trials = 100'000;
    std::uint64_t seed = 1;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo validation of the closed forms");
    simulate->add_option("--trials", trials, "chains per grid cell");
    simulate->add_option("--seed", seed, "base seed");

    std::string config_path, output_override;
    auto* run = app.add_subcommand("run", "Execute a configured dataset run");
    run->add_option("--config", config_path, "JSON run configuration")->required();
    run->add_option("--output-dir", output_override, "override config output_dir");

    std::string sweep_config, tau_grid, gamma_grid, sigma_grid, sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Grid over tau/gamma/sigma, emitting CSV");
    sweep->add_option("--config", sweep_config, "JSON run configuration")->required();
    sweep->add_option("--tau", tau_grid, "tau grid: start:end:step or comma list");
    sweep->add_option("--gamma", gamma_grid, "gamma grid");
    sweep->add_option("--sigma", sigma_grid, "sigma grid");
    sweep->add_option("--out", sweep_out, "CSV output path (stdout if omitted)");

    std::string report_in, report_out;
    auto* report = app.add_subcommand("report", "Aggregate trajectories into CSV");
    report->add_option("--input", report_in, "trajectories.jsonl path")->required();
    report->add_option("--out", report_out, "CSV output path (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(a, b, p0, tau, sigma);
        if (simulate->parsed()) return cmd_simulate(trials, seed);
        if (run->parsed()) return cmd_run(config_path, output_override);
        if (sweep->parsed()) return cmd_sweep(sweep_config, tau_grid, gamma_grid, sigma_grid,
                                              sweep_out);
        if (report->parsed()) return cmd_report(report_in, report_out);
    } catch (const seqscale::harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
