#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace predmm::cli {

struct SimOptions {
    std::string mm = "bmm";  // lmsr, bmm or zp
    double b = 125.0;
    std::size_t window = 5;
    double alpha = 1.0;
    std::string jumps = "gaussian";
    double p_jump = 0.01;
    double sigma_jump = 5.0;
    double sigma_eps = 5.0;
    std::size_t runs = 1;
    int steps = 200;
    std::optional<std::uint64_t> seed;
    std::string out;  // directory for CSV output; empty writes nothing
    bool write_logs = false;
    unsigned jobs = 0;  // 0 picks the hardware concurrency
};

/// Runs the batch, writes runs.csv, series.csv and summary.csv under `out`
/// and prints the aggregate row.
int cmd_sim(const SimOptions& options, std::ostream& out, std::ostream& err);

/// The four market-maker/regime rows of the simulation comparison.
int cmd_table2(SimOptions options, std::ostream& out, std::ostream& err);

struct ReplayOptions {
    std::string log;
    std::optional<std::string> market;
    /// Unset: half spread at 20 shares for simulation logs, full spread at
    /// 40 shares for live-session logs, as each was measured when recorded.
    std::optional<double> probe_qty;
    std::optional<bool> half_spread;
};

/// Verifies the log by replaying it and prints recomputed metrics as JSON.
int cmd_replay(const ReplayOptions& options, std::ostream& out, std::ostream& err);

struct ServeOptions {
    std::string host = "0.0.0.0";
    unsigned short port = 8080;
    std::string log_dir = "logs";
    std::string registry;  // defaults to <log_dir>/registry.json
    std::string admin_token;
    std::int64_t tick_ms = 50;
};

int cmd_serve(const ServeOptions& options, std::ostream& out, std::ostream& err);

}  // namespace predmm::cli
