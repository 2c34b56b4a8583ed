#include "commands.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "predmm/engine.hpp"
#include "predmm/json.hpp"
#include "predmm/service.hpp"
#include "predmm/session.hpp"
#include "predmm/sim.hpp"

namespace predmm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

MarketMakerState make_mm(const SimOptions& o, const sim::SimConfig& c) {
    if (o.mm == "lmsr") return lmsr::LmsrState{0.0, o.b, 100.0};
    if (o.mm != "bmm" && o.mm != "zp") throw std::invalid_argument("unknown market maker: " + o.mm);
    bmm::BmmState s;
    s.belief.mu = c.init_mean;
    s.belief.sigma = c.init_sd;
    s.belief.sigma_eps = c.sigma_eps;
    s.params.window = o.window;
    s.params.alpha = o.alpha;
    s.params.adaptive = o.mm == "bmm";
    return s;
}

sim::SimConfig make_config(const SimOptions& o) {
    sim::SimConfig c;
    c.steps = o.steps;
    c.jumps = sim::jump_kind_from_string(o.jumps);
    c.p_jump = o.p_jump;
    c.sigma_jump = o.sigma_jump;
    c.sigma_eps = o.sigma_eps;
    c.seed = o.seed.value_or(1);
    c.validate();
    return c;
}

std::vector<sim::SimResult> run_parallel(const sim::SimConfig& config, const MarketMakerState& mm, std::size_t runs,
                                         unsigned jobs, bool keep_logs) {
    std::vector<sim::SimResult> results(runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < runs;) {
            sim::SimConfig c = config;
            c.seed = config.seed + i;
            results[i] = sim::run_simulation(c, mm);
            if (!keep_logs) results[i].log.clear();
        }
    };
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, runs));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return results;
}

void print_header(std::ostream& out) {
    out << "mm,regime,runs,profit,max_loss,spread,rmsd,rmsd_eq\n";
}

void print_summary(std::ostream& out, const sim::Summary& s) {
    out << s.mm << ',' << s.regime << ',' << s.runs << ',' << num(s.mean_profit) << ',' << num(s.max_loss) << ','
        << num(s.mean_spread) << ',' << num(s.mean_rmsd) << ',' << num(s.mean_rmsd_eq) << '\n';
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::trunc | std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    return f;
}

// 100 times the walk value of each market, from the start and after each shock.
std::map<std::string, metrics::TruthSeries> session_truth(const std::vector<TradeEvent>& events) {
    std::map<std::string, metrics::TruthSeries> truth;
    for (const auto& e : events) {
        if (e.kind != event_kind::kSessionStarted && e.kind != event_kind::kShock) continue;
        auto w = e.payload.at("walk").get<walk::WalkConfig>();
        truth[session::kLR].push_back({e.ts_ms, 100.0 * walk::lr_value(w)});
        truth[session::kTB].push_back({e.ts_ms, 100.0 * walk::tb_value(w)});
    }
    return truth;
}

}  // namespace

int cmd_sim(const SimOptions& o, std::ostream& out, std::ostream& err) {
    SimOptions opts = o;
    if (!opts.seed) {
        opts.seed = std::random_device{}() & 0xffffffffu;
        err << "seed: " << *opts.seed << '\n';
    }
    auto config = make_config(opts);
    auto mm = make_mm(opts, config);
    auto results = run_parallel(config, mm, opts.runs, opts.jobs, opts.write_logs);

    std::vector<metrics::RunMetrics> runs;
    for (const auto& r : results) runs.push_back(r.metrics);
    auto summary = sim::aggregate(runs, opts.mm, opts.jumps);

    if (!opts.out.empty()) {
        fs::path dir = opts.out;
        fs::create_directories(dir);
        auto f = open_out(dir / "runs.csv");
        f << "run,seed,mm_profit,mm_max_loss,avg_spread,rmsd,rmsd_eq,buys,sells,cancels\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& m = results[i].metrics;
            f << i << ',' << config.seed + i << ',' << num(m.mm_profit) << ',' << num(m.mm_max_loss) << ','
              << num(m.avg_spread) << ',' << num(m.rmsd) << ',' << num(m.rmsd_eq) << ',' << m.buys << ','
              << m.sells << ',' << m.cancels << '\n';
        }
        auto s = open_out(dir / "series.csv");
        s << "run,step,truth,spot,spread\n";
        for (std::size_t i = 0; i < results.size(); ++i)
            for (const auto& r : results[i].series)
                s << i << ',' << r.step << ',' << num(r.truth) << ',' << num(r.spot) << ',' << num(r.spread) << '\n';
        auto a = open_out(dir / "summary.csv");
        print_header(a);
        print_summary(a, summary);
        if (opts.write_logs) {
            fs::create_directories(dir / "logs");
            for (std::size_t i = 0; i < results.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "run-%05zu.jsonl", i);
                auto l = open_out(dir / "logs" / name);
                write_log(l, results[i].log);
            }
        }
    }
    print_header(out);
    print_summary(out, summary);
    return 0;
}

int cmd_table2(SimOptions o, std::ostream& out, std::ostream& err) {
    if (!o.seed) {
        o.seed = std::random_device{}() & 0xffffffffu;
        err << "seed: " << *o.seed << '\n';
    }
    print_header(out);
    for (const char* regime : {"gaussian", "uniform"})
        for (const char* mm : {"lmsr", "bmm"}) {
            SimOptions row = o;
            row.mm = mm;
            row.jumps = regime;
            auto config = make_config(row);
            auto results = run_parallel(config, make_mm(row, config), row.runs, row.jobs, false);
            std::vector<metrics::RunMetrics> runs;
            for (const auto& r : results) runs.push_back(r.metrics);
            print_summary(out, sim::aggregate(runs, mm, regime));
        }
    return 0;
}

int cmd_replay(const ReplayOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<TradeEvent> events;
    try {
        if (!fs::exists(o.log)) {
            err << "error: no such log: " << o.log << '\n';
            return 1;
        }
        events = read_log(fs::path(o.log));
    } catch (const MalformedLog& e) {
        err << "error: " << o.log << ": " << e.what() << '\n';
        return 2;
    }

    const bool live = !events.empty() && events.front().kind == event_kind::kSessionCreated;
    std::vector<std::string> markets;
    if (o.market) {
        markets.push_back(*o.market);
    } else {
        for (const auto& e : events)
            if (e.kind == event_kind::kMarketOpened) markets.push_back(e.payload.at("market").get<std::string>());
        if (markets.empty()) markets.push_back(sim::kMarket);
    }

    json report = {{"log", o.log}, {"events", events.size()}, {"verified", false}, {"markets", json::object()}};
    try {
        if (live)
            session::Session::restore(events);
        else if (!events.empty())
            engine::Engine::replay(events);
        report["verified"] = true;

        auto truth = live ? session_truth(events) : std::map<std::string, metrics::TruthSeries>{};
        metrics::MetricsConfig mc = live ? metrics::MetricsConfig{} : sim::SimConfig{}.metrics;
        if (o.probe_qty) mc.probe_qty = *o.probe_qty;
        if (o.half_spread) mc.half_spread = *o.half_spread;
        for (const auto& m : markets) {
            auto t = live ? truth[m] : metrics::truth_from_log(events, m);
            report["markets"][m] = events.empty() ? metrics::RunMetrics{}.to_json()
                                                  : metrics::compute_metrics(events, m, t, mc).to_json();
        }
    } catch (const MalformedLog& e) {
        err << "error: " << o.log << ": " << e.what() << '\n';
        return 2;
    } catch (const engine::ReplayMismatch& e) {
        err << "error: replay mismatch: " << e.what() << '\n';
        return 3;
    }
    out << report.dump(2) << '\n';
    return 0;
}

int cmd_serve(const ServeOptions& o, std::ostream& out, std::ostream& err) {
    service::ServiceConfig config;
    config.log_dir = o.log_dir;
    config.registry = o.registry.empty() ? fs::path(o.log_dir) / "registry.json" : fs::path(o.registry);
    config.admin_token = o.admin_token;
    try {
        service::SessionManager manager(config);
        service::Server server(manager, o.host, o.port, o.tick_ms);
        out << json{{"event", "listening"},
                    {"host", o.host},
                    {"port", server.port()},
                    {"log_dir", config.log_dir.string()},
                    {"registry", config.registry.string()},
                    {"sessions", manager.sessions().size()},
                    {"operator_token", !config.admin_token.empty()}}
                   .dump()
            << std::endl;
        server.run();
        out << json{{"event", "stopped"}}.dump() << std::endl;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace predmm::cli
