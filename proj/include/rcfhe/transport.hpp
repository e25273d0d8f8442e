#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>

#include "rcfhe/frame.hpp"

namespace rcfhe {

class ChannelClosed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One side of a duplex frame channel.
class Endpoint {
public:
    virtual ~Endpoint() = default;
    virtual void send(const Frame& f) = 0;
    /// Blocks until a frame arrives. Throws ChannelClosed once the peer is
    /// gone and nothing is left to read.
    virtual Frame receive() = 0;
    virtual void close() = 0;
    /// Total encoded bytes passed to send().
    virtual std::uint64_t bytes_sent() const = 0;
};

/// Two connected in-memory endpoints. Frames go through encode/decode so the
/// bytes match what a socket would carry. Safe to use from two threads.
std::pair<std::unique_ptr<Endpoint>, std::unique_ptr<Endpoint>> make_in_process_pair();

/// TCP listener bound to 127.0.0.1.
class SocketListener {
public:
    /// port 0 picks a free port.
    explicit SocketListener(std::uint16_t port = 0);
    ~SocketListener();
    SocketListener(const SocketListener&) = delete;
    SocketListener& operator=(const SocketListener&) = delete;

    std::uint16_t port() const { return port_; }
    std::unique_ptr<Endpoint> accept();
    void close();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

std::unique_ptr<Endpoint> connect_local(std::uint16_t port);

}  // namespace rcfhe
