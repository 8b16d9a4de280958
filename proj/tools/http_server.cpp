#include "http_server.hpp"

#include <httplib.h>

namespace igs {

SessionServer::SessionServer(SessionManager& manager) : manager_(manager), server_(std::make_unique<httplib::Server>())
{
    const auto route = [this](const httplib::Request& req, httplib::Response& res) {
        const auto out = manager_.handle(req.method, req.path, req.body);
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    server_->Get(R"(/sessions/.*)", route);
    server_->Post(R"(/sessions(/.*)?)", route);
    server_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server_->Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

SessionServer::~SessionServer() = default;

int SessionServer::bind(const std::string& host, int port)
{
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool SessionServer::listen()
{
    return server_->listen_after_bind();
}

void SessionServer::stop()
{
    server_->stop();
}

} // namespace igs
