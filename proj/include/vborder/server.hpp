#pragma once

#include "vborder/live.hpp"

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <thread>

namespace vborder {

struct ServerConfig
{
    /* 0 binds an ephemeral port */
    int port = 8765;
    std::string bind_address = "127.0.0.1";
    std::shared_ptr<const OccupancyGrid> prior;
    Pose2 initial_pose;
    RunConfig run;
    std::uint64_t seed = 0;
    /* simulated seconds per wall second */
    double time_scale = 1.0;
    double snapshot_hz = 10.0;
};

/// Newline-delimited JSON over TCP. Every connection gets its own live
/// session, paced against the wall clock.
class Server
{
public:
    explicit Server(ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /* Binds and starts accepting; returns the bound port. Throws ValueError. */
    int start();
    void stop();
    /* Blocks until stop() is called from another thread */
    void wait();

private:
    struct Connection;
    void accept_loop();
    void serve(Connection& conn);

    ServerConfig config_;
    int listen_fd_ = -1;
    std::atomic<bool> running_{ false };
    std::thread acceptor_;
    std::mutex mu_;
    std::list<std::unique_ptr<Connection>> connections_;
    std::uint64_t next_id_ = 1;
};

} // namespace vborder
