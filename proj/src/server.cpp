#include "vborder/server.hpp"

#include "vborder/errors.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <algorithm>
#include <chrono>
#include <cstring>
#include <deque>

namespace vborder {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Server::Connection
{
    int fd = -1;
    std::uint64_t id = 0;
    std::atomic<bool> open{ true };
    std::mutex write_mu;
    std::mutex queue_mu;
    std::deque<ClientCommand> queue;
    std::thread worker;

    void send(const json& message)
    {
        const std::string line = message.dump() + "\n";
        std::lock_guard<std::mutex> lock(write_mu);
        std::size_t sent = 0;
        while (sent < line.size()) {
            const ssize_t n = ::send(fd, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
            if (n < 0 && errno == EINTR)
                continue;
            if (n <= 0) {
                open = false;
                return;
            }
            sent += static_cast<std::size_t>(n);
        }
    }
};

Server::Server(ServerConfig config) : config_(std::move(config))
{
    if (!config_.prior)
        throw ValueError("server needs a prior map");
    if (!(config_.time_scale > 0.0) || !(config_.snapshot_hz > 0.0))
        throw ValueError("time scale and snapshot rate must be positive");
}

Server::~Server()
{
    stop();
}

int Server::start()
{
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0)
        throw ValueError(std::string("socket: ") + std::strerror(errno));
    const int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(config_.port));
    if (::inet_pton(AF_INET, config_.bind_address.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw ValueError("bad bind address " + config_.bind_address);
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 8) < 0) {
        const std::string why = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw ValueError("cannot listen on port " + std::to_string(config_.port) + ": " + why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);

    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
    return ntohs(addr.sin_port);
}

void Server::stop()
{
    if (!running_.exchange(false))
        return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (acceptor_.joinable())
        acceptor_.join();

    std::list<std::unique_ptr<Connection>> conns;
    {
        std::lock_guard<std::mutex> lock(mu_);
        conns.swap(connections_);
    }
    for (auto& c : conns) {
        c->open = false;
        ::shutdown(c->fd, SHUT_RDWR);
    }
    for (auto& c : conns)
        if (c->worker.joinable())
            c->worker.join();
}

void Server::wait()
{
    while (running_)
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void Server::accept_loop()
{
    while (running_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR)
                continue;
            break;
        }
        std::lock_guard<std::mutex> lock(mu_);
        /* drop finished connections */
        for (auto it = connections_.begin(); it != connections_.end();) {
            if (!(*it)->open && (*it)->worker.joinable()) {
                (*it)->worker.join();
                it = connections_.erase(it);
            } else {
                ++it;
            }
        }
        auto conn = std::make_unique<Connection>();
        conn->fd = fd;
        conn->id = next_id_++;
        Connection& ref = *conn;
        connections_.push_back(std::move(conn));
        ref.worker = std::thread([this, &ref] { serve(ref); });
    }
}

void Server::serve(Connection& conn)
{
    std::thread reader([&conn] {
        std::string buffer;
        char chunk[4096];
        while (conn.open) {
            const ssize_t n = ::recv(conn.fd, chunk, sizeof chunk, 0);
            if (n < 0 && errno == EINTR)
                continue;
            if (n <= 0)
                break;
            buffer.append(chunk, static_cast<std::size_t>(n));
            std::size_t nl;
            while ((nl = buffer.find('\n')) != std::string::npos) {
                std::string line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r')
                    line.pop_back();
                if (line.find_first_not_of(" \t") == std::string::npos)
                    continue;
                try {
                    ClientCommand cmd = parse_client_message(line);
                    std::lock_guard<std::mutex> lock(conn.queue_mu);
                    conn.queue.push_back(std::move(cmd));
                } catch (const Error& e) {
                    conn.send(error_message(e.name(), e.what()));
                }
            }
        }
        conn.open = false;
    });

    try {
        LiveSession session(config_.prior, config_.initial_pose, config_.run, config_.seed,
                            "s" + std::to_string(conn.id));
        conn.send(map_message(session.prior(), MapLayer::Prior, session.map_version()));
        conn.send(session.snapshot());

        const auto tick = std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(config_.run.sim.timestep / config_.time_scale));
        const auto snapshot_period = std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(1.0 / config_.snapshot_hz));
        auto next_tick = Clock::now();
        auto next_snapshot = next_tick + snapshot_period;

        while (conn.open && running_) {
            std::deque<ClientCommand> pending;
            {
                std::lock_guard<std::mutex> lock(conn.queue_mu);
                pending.swap(conn.queue);
            }
            for (const ClientCommand& cmd : pending)
                for (const json& reply : session.apply(cmd))
                    conn.send(reply);

            for (const json& push : session.step())
                conn.send(push);

            next_tick += tick;
            /* never build up more than a second of backlog */
            if (next_tick + std::chrono::seconds(1) < Clock::now())
                next_tick = Clock::now();
            while (conn.open && running_) {
                const auto now = Clock::now();
                if (now >= next_snapshot) {
                    conn.send(session.snapshot());
                    next_snapshot += snapshot_period;
                    if (next_snapshot <= now)
                        next_snapshot = now + snapshot_period;
                }
                if (now >= next_tick)
                    break;
                std::this_thread::sleep_until(std::min(next_tick, next_snapshot));
            }
        }
    } catch (const std::exception& e) {
        conn.send(error_message("ServerError", e.what()));
    }

    conn.open = false;
    ::shutdown(conn.fd, SHUT_RDWR);
    reader.join();
    ::close(conn.fd);
}

} // namespace vborder
