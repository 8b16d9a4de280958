#pragma once

#include "igs/session.hpp"

#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace igs {

/// Binds the session router to an HTTP listener.
class SessionServer
{
public:
    explicit SessionServer(SessionManager& manager);
    ~SessionServer();

    /// Binds to host:port (port 0 picks a free port); returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop() is called.
    bool listen();
    void stop();

private:
    SessionManager& manager_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace igs
