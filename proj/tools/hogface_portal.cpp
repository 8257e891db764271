// Missing-and-found match service.
#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <pthread.h>
#include <string>
#include <thread>

#include "hogface/modelstore.hpp"
#include "hogface/portal/http.hpp"
#include "hogface/portal/service.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Missing-and-found face match service"};
    std::string listen = env_or("HOGFACE_LISTEN", "127.0.0.1:8080");
    std::string model_path = env_or("HOGFACE_MODEL", "");
    std::string data_dir = env_or("HOGFACE_DATA_DIR", "portal-data");
    std::string static_dir;
    app.add_option("--listen", listen, "host:port to bind; port 0 picks a free port")->capture_default_str();
    app.add_option("--model", model_path, "Trained model file (env HOGFACE_MODEL)");
    app.add_option("--data-dir", data_dir, "Record log and photo store (env HOGFACE_DATA_DIR)")
        ->capture_default_str();
    app.add_option("--static-dir", static_dir, "Serve browser UI assets from this directory");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    if (model_path.empty()) {
        std::cerr << "error: --model (or HOGFACE_MODEL) is required\n";
        return 2;
    }
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
        std::cerr << "error: --listen must be host:port\n";
        return 2;
    }
    const std::string host = listen.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception&) {
        std::cerr << "error: bad port in --listen\n";
        return 2;
    }

    // Block termination signals in every thread; a dedicated thread waits for them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    std::unique_ptr<hogface::portal::Service> service;
    try {
        std::filesystem::create_directories(data_dir);
        service = hogface::portal::Service::open(model_path, data_dir);
    } catch (const hogface::ModelLoadError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "startup failed: " << e.what() << "\n";
        return 1;
    }

    httplib::Server server;
    server.set_payload_max_length(32u << 20);
    hogface::portal::install_routes(server, *service);
    if (!static_dir.empty() && !server.set_mount_point("/", static_dir)) {
        std::cerr << "error: static dir " << static_dir << " does not exist\n";
        return 2;
    }

    int bound = port;
    if (port == 0) {
        bound = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) {
        std::cerr << "error: cannot bind " << listen << "\n";
        return 1;
    }

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    waiter.detach();

    const auto h = service->health();
    std::cout << "listening on http://" << host << ":" << bound << " model " << h.model_version << " gallery "
              << h.gallery_size << std::endl;
    server.listen_after_bind();
    return 0;
}
