#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace predmm::cli;

namespace {

void add_sim_flags(CLI::App& cmd, SimOptions& o, bool with_mm) {
    if (with_mm)
        cmd.add_option("--mm", o.mm, "Market maker")->check(CLI::IsMember({"lmsr", "bmm", "zp"}))->capture_default_str();
    cmd.add_option("--b", o.b, "LMSR liquidity")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--window", o.window, "BMM consistency window")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--alpha", o.alpha, "BMM mini-order size")->check(CLI::PositiveNumber)->capture_default_str();
    if (with_mm)
        cmd.add_option("--jumps", o.jumps, "Jump distribution")
            ->check(CLI::IsMember({"gaussian", "uniform", "none"}))
            ->capture_default_str();
    cmd.add_option("--pj", o.p_jump, "Jump probability per step")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    cmd.add_option("--sigma-j", o.sigma_jump, "Jump size")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd.add_option("--sigma-eps", o.sigma_eps, "Trader signal noise")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--runs", o.runs, "Number of runs")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--steps", o.steps, "Traders per run")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--seed", o.seed, "Base seed; generated and printed when absent");
    cmd.add_option("--jobs", o.jobs, "Worker threads, 0 for all cores")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dealer-market engine: simulations, log replay and the live trading service"};
    app.require_subcommand(1);

    SimOptions sim;
    auto* sim_cmd = app.add_subcommand("sim", "Run a batch of simulations");
    add_sim_flags(*sim_cmd, sim, true);
    sim_cmd->add_option("--out", sim.out, "Directory for runs.csv, series.csv and summary.csv");
    sim_cmd->add_flag("--logs", sim.write_logs, "Also write each run's event log under <out>/logs");

    SimOptions table;
    table.runs = 200;
    auto* table_cmd = app.add_subcommand("table2", "LMSR and BMM under Gaussian and uniform jumps");
    add_sim_flags(*table_cmd, table, false);

    ReplayOptions replay;
    auto* replay_cmd = app.add_subcommand("replay", "Verify an event log and recompute its metrics");
    replay_cmd->add_option("log", replay.log, "Event log (JSON lines)")->required();
    replay_cmd->add_option("--market", replay.market, "Market to measure (default: every market in the log)");
    replay_cmd->add_option("--probe", replay.probe_qty, "Spread probe size (default: as recorded)")
        ->check(CLI::PositiveNumber);
    replay_cmd->add_option("--half", replay.half_spread, "Report half spreads (true/false; default: as recorded)");

    ServeOptions serve;
    if (const char* t = std::getenv("PREDMM_ADMIN_TOKEN")) serve.admin_token = t;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP/WebSocket trading service");
    serve_cmd->add_option("--host", serve.host, "Listen address")->capture_default_str();
    serve_cmd->add_option("--port", serve.port, "Listen port, 0 for any free port")->capture_default_str();
    serve_cmd->add_option("--log-dir", serve.log_dir, "Directory for session event logs")->capture_default_str();
    serve_cmd->add_option("--registry", serve.registry, "Session registry file (default: <log-dir>/registry.json)");
    serve_cmd->add_option("--admin-token", serve.admin_token, "Operator token (or PREDMM_ADMIN_TOKEN)");
    serve_cmd->add_option("--tick-ms", serve.tick_ms, "Timer period for walk steps and expiries")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim_cmd) return cmd_sim(sim, std::cout, std::cerr);
        if (*table_cmd) return cmd_table2(table, std::cout, std::cerr);
        if (*replay_cmd) return cmd_replay(replay, std::cout, std::cerr);
        if (*serve_cmd) return cmd_serve(serve, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
