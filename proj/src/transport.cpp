#include "rcfhe/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <string>

namespace rcfhe {

namespace {

struct Queue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<std::uint8_t>> items;
    bool closed = false;
};

class InProcessEndpoint : public Endpoint {
public:
    InProcessEndpoint(std::shared_ptr<Queue> out, std::shared_ptr<Queue> in)
        : out_(std::move(out)), in_(std::move(in))
    {
    }
    ~InProcessEndpoint() override { close(); }

    void send(const Frame& f) override
    {
        auto bytes = encode_frame(f);
        std::lock_guard lock(out_->mu);
        if (out_->closed)
            throw ChannelClosed("in-process channel closed");
        sent_ += bytes.size();
        out_->items.push_back(std::move(bytes));
        out_->cv.notify_one();
    }

    Frame receive() override
    {
        std::unique_lock lock(in_->mu);
        in_->cv.wait(lock, [&] { return !in_->items.empty() || in_->closed; });
        if (in_->items.empty())
            throw ChannelClosed("in-process channel closed");
        auto bytes = std::move(in_->items.front());
        in_->items.pop_front();
        lock.unlock();
        return decode_frame(bytes);
    }

    void close() override
    {
        for (auto* q : {out_.get(), in_.get()}) {
            std::lock_guard lock(q->mu);
            q->closed = true;
            q->cv.notify_all();
        }
    }

    std::uint64_t bytes_sent() const override { return sent_; }

private:
    std::shared_ptr<Queue> out_;
    std::shared_ptr<Queue> in_;
    std::uint64_t sent_ = 0;
};

std::string errno_text(const char* what)
{
    return std::string(what) + ": " + std::strerror(errno);
}

class SocketEndpoint : public Endpoint {
public:
    explicit SocketEndpoint(int fd) : fd_(fd)
    {
        int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    }
    ~SocketEndpoint() override { close(); }

    void send(const Frame& f) override
    {
        const auto bytes = encode_frame(f);
        std::size_t done = 0;
        while (done < bytes.size()) {
            if (fd_ < 0)
                throw ChannelClosed("socket closed");
            const ssize_t k = ::send(fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
            if (k < 0 && errno == EINTR)
                continue;
            if (k <= 0)
                throw ChannelClosed(errno_text("send"));
            done += static_cast<std::size_t>(k);
        }
        sent_ += bytes.size();
    }

    Frame receive() override
    {
        std::vector<std::uint8_t> bytes(frame_header_size);
        read_exact(bytes.data(), frame_header_size);
        const FrameHeader h = decode_header(bytes);
        bytes.resize(frame_header_size + h.length);
        read_exact(bytes.data() + frame_header_size, h.length);
        return decode_frame(bytes);
    }

    void close() override
    {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

    std::uint64_t bytes_sent() const override { return sent_; }

private:
    void read_exact(std::uint8_t* dst, std::size_t n)
    {
        std::size_t done = 0;
        while (done < n) {
            if (fd_ < 0)
                throw ChannelClosed("socket closed");
            const ssize_t k = ::recv(fd_, dst + done, n - done, 0);
            if (k < 0 && errno == EINTR)
                continue;
            if (k == 0)
                throw ChannelClosed("peer closed the connection");
            if (k < 0)
                throw ChannelClosed(errno_text("recv"));
            done += static_cast<std::size_t>(k);
        }
    }

    int fd_;
    std::uint64_t sent_ = 0;
};

}  // namespace

std::pair<std::unique_ptr<Endpoint>, std::unique_ptr<Endpoint>> make_in_process_pair()
{
    auto ab = std::make_shared<Queue>();
    auto ba = std::make_shared<Queue>();
    return {std::make_unique<InProcessEndpoint>(ab, ba), std::make_unique<InProcessEndpoint>(ba, ab)};
}

SocketListener::SocketListener(std::uint16_t port)
{
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0)
        throw ChannelClosed(errno_text("socket"));
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(fd_, 1) != 0) {
        const auto msg = errno_text("bind/listen");
        close();
        throw ChannelClosed(msg);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

SocketListener::~SocketListener() { close(); }

void SocketListener::close()
{
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

std::unique_ptr<Endpoint> SocketListener::accept()
{
    int fd;
    do {
        fd = ::accept(fd_, nullptr, nullptr);
    } while (fd < 0 && errno == EINTR);
    if (fd < 0)
        throw ChannelClosed(errno_text("accept"));
    return std::make_unique<SocketEndpoint>(fd);
}

std::unique_ptr<Endpoint> connect_local(std::uint16_t port)
{
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0)
        throw ChannelClosed(errno_text("socket"));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        const auto msg = errno_text("connect");
        ::close(fd);
        throw ChannelClosed(msg);
    }
    return std::make_unique<SocketEndpoint>(fd);
}

}  // namespace rcfhe
