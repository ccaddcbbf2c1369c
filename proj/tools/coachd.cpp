// coachd: serve the coaching API, or inspect a data directory offline.
#include "coach/api.hpp"
#include "coach/error.hpp"
#include "coach/session.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#ifndef COACH_DATA_DIR
#define COACH_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace coach;

namespace {

struct Address {
    std::string host;
    int port = 0;
};

Address parse_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) fail(ErrorCode::validation, "--addr must be host:port");
    Address out{addr.substr(0, colon), 0};
    try {
        std::size_t used = 0;
        out.port = std::stoi(addr.substr(colon + 1), &used);
        if (used != addr.size() - colon - 1 || out.port < 0 || out.port > 65535) throw std::out_of_range("port");
    } catch (const std::exception&) {
        fail(ErrorCode::validation, "--addr has an invalid port: " + addr);
    }
    if (out.host.empty()) out.host = "0.0.0.0";
    return out;
}

UserState load_user(const fs::path& data_dir, const std::string& user_id) {
    if (!fs::is_directory(data_dir)) fail(ErrorCode::not_found, "data directory not found: " + data_dir.string());
    EventStore store(data_dir);
    return replay(store, user_id);
}

int serve(const std::string& addr, const fs::path& data_dir, const fs::path& templates_dir,
          const fs::path& lexicon_dir) {
    const auto where = parse_addr(addr);
    auto templates = TemplateLibrary::load(templates_dir);
    auto affect = AffectAnalyzer::load(lexicon_dir);
    auto config = GatewayConfig::from_env();
    config.validate();
    auto backend = make_backend(config);
    EventStore store(data_dir);
    CoachService service(store, std::move(templates), std::move(affect), *backend);

    httplib::Server server;
    HttpApi api(service);
    api.mount(server);

    // Block the stop signals here so only the watcher thread receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        spdlog::info("received signal {}, shutting down", sig);
        service.shutdown();
        server.stop();
    });

    if (!server.bind_to_port(where.host, where.port)) {
        pthread_kill(watcher.native_handle(), SIGTERM);
        watcher.join();
        fail(ErrorCode::validation, "cannot listen on " + addr);
    }
    spdlog::info("listening on {} (data {}, model mode {})", addr, data_dir.string(),
                 config.mode == GatewayConfig::Mode::live ? "live" : "scripted");
    server.listen_after_bind();
    if (watcher.joinable()) {
        if (!service.shutting_down()) pthread_kill(watcher.native_handle(), SIGTERM);
        watcher.join();
    }
    service.wait_for_background();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Productivity coaching service"};
    app.require_subcommand(1);

    std::string data_dir = "coach-data";
    std::string user_id;

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    std::string addr = "127.0.0.1:8080";
    std::string templates_dir = std::string(COACH_DATA_DIR) + "/templates";
    std::string lexicon_dir = std::string(COACH_DATA_DIR) + "/lexicon";
    serve_cmd->add_option("--addr", addr, "host:port to listen on")->capture_default_str();
    serve_cmd->add_option("--data-dir", data_dir, "Event log directory")->capture_default_str();
    serve_cmd->add_option("--templates-dir", templates_dir, "Prompt template directory")->capture_default_str();
    serve_cmd->add_option("--lexicon-dir", lexicon_dir, "Affect lexicon directory")->capture_default_str();

    auto* replay_cmd = app.add_subcommand("replay", "Print a user's state reconstructed from the event log");
    replay_cmd->add_option("--user", user_id, "User id")->required();
    replay_cmd->add_option("--data-dir", data_dir, "Event log directory")->capture_default_str();

    auto* export_cmd = app.add_subcommand("export-dashboard", "Write a user's dashboard snapshot as JSON");
    std::string out_path;
    export_cmd->add_option("--user", user_id, "User id")->required();
    export_cmd->add_option("--out", out_path, "Output file")->required();
    export_cmd->add_option("--data-dir", data_dir, "Event log directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*serve_cmd) return serve(addr, data_dir, templates_dir, lexicon_dir);
        if (*replay_cmd) {
            std::cout << to_json(load_user(data_dir, user_id)).dump(2) << "\n";
            return 0;
        }
        if (*export_cmd) {
            const auto snapshot = build_snapshot(load_user(data_dir, user_id));
            std::ofstream out(out_path, std::ios::trunc);
            out << to_json(snapshot).dump(2) << "\n";
            out.close();
            if (!out) fail(ErrorCode::storage, "cannot write " + out_path);
            return 0;
        }
    } catch (const CoachError& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
