// ppe: command-line front end for the counting pipeline.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ppe/core/errors.hpp"
#include "ppe/detector/detection_json.hpp"
#include "ppe/evaluation/fixture.hpp"
#include "ppe/pipeline/pipeline.hpp"
#include "ppe/pipeline/simulate.hpp"
#include "ppe/pipeline/stub_server.hpp"

namespace {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kConfig = 2,
    kBackend = 3,
    kIo = 4,
    kData = 5,
};

ppe::StubDetectorServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_run(const std::filesystem::path& config_path, bool print_counts) {
    const auto cfg = ppe::load_pipeline_config(config_path);
    ppe::RunOptions opt;
    opt.alert_stream = &std::cout;
    const auto res = ppe::run_pipeline(cfg, opt);
    if (print_counts) std::cout << res.counts_csv;
    const auto& m = res.metrics;
    std::cerr << "frames examined=" << m.frames_examined << " passed=" << m.frames_passed
              << " discarded=" << m.frames_discarded << " backend_skipped=" << m.frames_backend_skipped
              << " | in=" << m.events_in << " out=" << m.events_out << " no_helmet=" << m.crossings_unhelmeted
              << " | alerts published=" << m.alerts_published << " dropped=" << m.alerts_dropped << '\n';
    return kOk;
}

int cmd_evaluate(const std::string& a, const std::string& b, const std::string& fixture, bool json) {
    ppe::DayReport rep;
    if (!fixture.empty()) {
        rep = ppe::report(ppe::load_day_fixture(fixture));
    } else {
        if (a.empty() || b.empty()) throw ppe::ConfigError("evaluate needs --a and --b, or --fixture");
        rep = ppe::report(ppe::load_counts_series(a), ppe::load_counts_series(b));
    }
    std::cout << (json ? ppe::report_json(rep) + "\n" : ppe::format_report(rep));
    return kOk;
}

int cmd_stub(const std::string& replay, int port, int latency_ms, double fail_rate, std::uint64_t seed) {
    ppe::StubOptions o;
    o.port = port;
    o.latency = std::chrono::milliseconds(latency_ms);
    o.fail_rate = fail_rate;
    o.seed = seed;
    ppe::StubDetectorServer server(ppe::load_replay_log(replay), o);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::thread announce([&] {
        // The port is only known after bind when 0 was requested.
        for (int i = 0; i < 200 && server.port() == 0; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
        std::cerr << "stub detector listening on " << server.endpoint() << std::endl;
    });
    try {
        server.serve_forever();
    } catch (...) {
        announce.join();
        g_server = nullptr;
        throw;
    }
    announce.join();
    g_server = nullptr;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Helmet-aware people counting pipeline"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Process a stream end to end");
    std::string config_path;
    bool print_counts = false;
    run->add_option("--config", config_path, "Pipeline config JSON")->required();
    run->add_flag("--print-counts", print_counts, "Print the counts CSV to stdout");

    auto* sim = app.add_subcommand("simulate", "Generate detections and ground truth for a scenario");
    std::string scenario_path, zones_path, out_dir;
    bool frames = false;
    std::optional<std::uint64_t> sim_seed;
    sim->add_option("--scenario", scenario_path)->required();
    sim->add_option("--zones", zones_path)->required();
    sim->add_option("--out", out_dir)->required();
    sim->add_flag("--frames", frames, "Also write rendered PGM frames and a manifest");
    sim->add_option("--seed", sim_seed, "Override the scenario seed");

    auto* eval = app.add_subcommand("evaluate", "Compare model counts (a) with camera counts (b)");
    std::string a, b, fixture;
    bool json = false;
    eval->add_option("--a", a, "Model counts CSV (hour,in,out)");
    eval->add_option("--b", b, "Camera counts CSV (hour,in,out)");
    eval->add_option("--fixture", fixture, "Table fixture in the published layout");
    eval->add_flag("--json", json, "Emit JSON");

    auto* stub = app.add_subcommand("stub-detector", "Serve a replay log over the remote detection contract");
    std::string replay;
    int port = 8080, latency_ms = 0;
    double fail_rate = 0.0;
    std::uint64_t stub_seed = 0;
    stub->add_option("--replay", replay)->required();
    stub->add_option("--port", port)->check(CLI::Range(0, 65535));
    stub->add_option("--latency-ms", latency_ms)->check(CLI::NonNegativeNumber);
    stub->add_option("--fail-rate", fail_rate)->check(CLI::Range(0.0, 1.0));
    stub->add_option("--seed", stub_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*run) return cmd_run(config_path, print_counts);
        if (*sim) {
            const auto s = ppe::simulate(scenario_path, zones_path, out_dir, {frames, sim_seed});
            std::cerr << "wrote " << s.frames << " frames, " << s.detections << " detections, " << s.crossings
                      << " ground-truth crossings to " << out_dir << '\n';
            return kOk;
        }
        if (*eval) return cmd_evaluate(a, b, fixture, json);
        if (*stub) return cmd_stub(replay, port, latency_ms, fail_rate, stub_seed);
    } catch (const ppe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ppe::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kConfig;
    } catch (const ppe::BackendUnavailable& e) {
        std::cerr << "backend unavailable: " << e.what() << '\n';
        return kBackend;
    } catch (const ppe::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const ppe::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}
