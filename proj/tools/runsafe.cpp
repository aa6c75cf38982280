// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: DOE runs and benchmarks, scenario streaming, the
// gateway server and one-shot static calculations.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "runsafe/eval.hpp"
#include "runsafe/flight_sim.hpp"
#include "runsafe/gateway.hpp"
#include "runsafe/procedure_config.hpp"

namespace fs = std::filesystem;
using namespace runsafe;

namespace {

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, path + ": " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    out << text;
}

int doe_run(const std::string& spec_path, const std::string& out_dir) {
    const DoeSpec spec = doe_spec_from_json(read_json(spec_path));
    const RunReport report = run_doe(spec);
    fs::create_directories(out_dir);
    const std::string stem = "doe_" + std::string(to_string(spec.procedure));
    write_file(fs::path(out_dir) / (stem + ".csv"), rows_csv(report));
    write_file(fs::path(out_dir) / (stem + "_latency.csv"), latency_csv(report));
    write_file(fs::path(out_dir) / (stem + "_histogram.csv"), histogram_csv(report.rows));
    const auto summary = summary_json(report);
    write_file(fs::path(out_dir) / (stem + "_summary.json"), summary.dump(2) + "\n");
    auto printed = summary;
    printed.erase("spec");
    std::cout << printed.dump(2) << '\n';
    for (const auto& v : summary.at("threshold_violations")) std::cerr << "threshold violated: " << v.get<std::string>() << '\n';
    return summary.at("passed").get<bool>() ? 0 : 1;
}

int doe_bench(std::size_t frames) {
    const LatencyReport r = latency_bench(frames);
    std::cout << to_json(r).dump(2) << '\n';
    return 0;
}

int sim_run(const std::string& scenario_path, const std::string& udp, double speedup, const std::string& mapping_path,
            const std::string& frames_out) {
    const Scenario scenario = scenario_from_json(read_json(scenario_path));
    const ScenarioRun run = run_scenario(scenario);
    if (!frames_out.empty()) {
        std::ostringstream os;
        os << "timestamp,ground_speed,vertical_speed,height_agl,distance_along_runway,acceleration,throttle,on_ground,"
              "brakes\n";
        for (const auto& f : run.frames) {
            os << f.timestamp << ',' << f.ground_speed << ',' << f.vertical_speed << ',' << f.height_agl << ','
               << f.distance_along_runway << ',' << f.acceleration << ',' << f.throttle_fraction << ','
               << f.on_ground << ',' << f.brakes_applied << '\n';
        }
        write_file(frames_out, os.str());
    }
    if (!udp.empty()) {
        const ChannelMapping mapping =
            mapping_path.empty() ? ChannelMapping::defaults() : load_channel_mapping(mapping_path);
        const auto [host, port] = net::parse_endpoint(udp);
        const net::Socket socket = net::connect_udp(host, port);
        const EmitStats stats = emit_datagrams(run.frames, mapping, socket, scenario.frame_rate, speedup);
        std::cerr << "sent " << stats.sent << " datagrams (" << stats.failures << " failed) in " << stats.wall_seconds
                  << " s\n";
    }
    const auto& t = run.truth;
    nlohmann::json truth = {{"frames", run.frames.size()}};
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) truth[key] = *v;
    };
    put("accelerate_stop_distance", t.accelerate_stop_distance);
    put("rto_time", t.rto_time);
    put("v1_time", t.v1_time);
    put("liftoff_time", t.liftoff_time);
    put("liftoff_position", t.liftoff_position);
    put("touchdown_position", t.touchdown_position);
    put("stop_position", t.stop_position);
    put("landing_distance", t.landing_distance);
    std::cout << truth.dump(2) << '\n';
    return 0;
}

int static_calc(const std::string& procedure_name, const std::string& config_path) {
    const Procedure procedure = procedure_from_string(procedure_name);
    const auto payload = read_json(config_path);
    DistanceBreakdown b;
    double runway = 0.0;
    if (procedure == Procedure::Takeoff) {
        const auto request = parse_takeoff(payload);
        b = compute_asdr(request.config, request.integrator);
        runway = request.config.runway.length;
    } else {
        const auto config = parse_landing(payload);
        b = compute_ldr(config);
        runway = config.runway.length;
    }
    std::cout << static_result_message(1, procedure, b, runway).dump(2) << '\n';
    return 0;
}

int serve(GatewayOptions options) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    Gateway gateway(std::move(options));
    gateway.start();
    std::cerr << "gateway on tcp " << gateway.port() << ", telemetry udp " << gateway.udp_port();
    if (gateway.health_port()) std::cerr << ", health http " << gateway.health_port() << "/health";
    std::cerr << '\n';
    int sig = 0;
    sigwait(&set, &sig);
    gateway.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Runway overrun prediction toolkit"};
    app.require_subcommand(1);

    auto* doe = app.add_subcommand("doe", "design-of-experiments evaluation");
    doe->require_subcommand(1);
    std::string spec_path;
    std::string out_dir = "doe_out";
    auto* doe_run_cmd = doe->add_subcommand("run", "run a DOE spec");
    doe_run_cmd->add_option("--spec", spec_path, "DOE spec JSON")->required()->check(CLI::ExistingFile);
    doe_run_cmd->add_option("--out", out_dir, "output directory");
    std::size_t bench_frames = 1000;
    auto* bench_cmd = doe->add_subcommand("bench", "per-frame update latency");
    bench_cmd->add_option("--frames", bench_frames, "minimum samples per update kind")->check(CLI::PositiveNumber);

    auto* sim = app.add_subcommand("sim", "flight simulator");
    sim->require_subcommand(1);
    std::string scenario_path;
    std::string udp;
    double speedup = 1.0;
    std::string mapping_path;
    std::string frames_out;
    auto* sim_run_cmd = sim->add_subcommand("run", "simulate a scenario and optionally stream it");
    sim_run_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    sim_run_cmd->add_option("--udp", udp, "stream datagrams to host:port");
    sim_run_cmd->add_option("--speedup", speedup, "playback rate multiplier")->check(CLI::PositiveNumber);
    sim_run_cmd->add_option("--mapping", mapping_path, "channel mapping JSON")->check(CLI::ExistingFile);
    sim_run_cmd->add_option("--frames-out", frames_out, "write the noisy frames as CSV");

    GatewayOptions gw;
    std::string gw_mapping;
    std::uint16_t health_port = 0;
    auto* serve_cmd = app.add_subcommand("serve", "run the gateway");
    serve_cmd->add_option("--host", gw.host, "bind address for clients and health");
    serve_cmd->add_option("--port", gw.port, "client message port");
    serve_cmd->add_option("--udp-port", gw.udp_port, "telemetry port");
    auto* health_opt = serve_cmd->add_option("--health-port", health_port, "HTTP health port");
    serve_cmd->add_option("--mapping", gw_mapping, "channel mapping JSON")->check(CLI::ExistingFile);

    std::string procedure = "takeoff";
    std::string config_path;
    auto* static_cmd = app.add_subcommand("static", "one-shot static distance calculation");
    static_cmd->add_option("--procedure", procedure, "takeoff or landing");
    static_cmd->add_option("--config", config_path, "configuration JSON")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (doe_run_cmd->parsed()) return doe_run(spec_path, out_dir);
        if (bench_cmd->parsed()) return doe_bench(bench_frames);
        if (sim_run_cmd->parsed()) return sim_run(scenario_path, udp, speedup, mapping_path, frames_out);
        if (static_cmd->parsed()) return static_calc(procedure, config_path);
        if (serve_cmd->parsed()) {
            if (!gw_mapping.empty()) gw.mapping = load_channel_mapping(gw_mapping);
            if (health_opt->count() > 0) gw.health_port = health_port;
            return serve(std::move(gw));
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid input:\n";
        for (const auto& f : e.fields()) std::cerr << "  " << f.field << ": " << f.message << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
