#pragma once

// Reliable, ordered, duplex frame transport. receive() blocks until a frame
// arrives or the peer closes (nullopt). The in-memory pair backs simulated
// sessions and the statistical harness.

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>

#include "otkex/errors.hpp"
#include "otkex/frame.hpp"

namespace otkex {

class Channel {
  public:
    virtual ~Channel() = default;
    virtual void send(const Frame& frame) = 0;
    virtual std::optional<Frame> receive() = 0;
    virtual void close() = 0;
};

namespace detail {

struct MemoryChannelShared {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Frame> queue[2];
    bool closed[2] = {false, false};
};

class MemoryChannel final : public Channel {
  public:
    MemoryChannel(std::shared_ptr<MemoryChannelShared> shared, int side)
        : shared_(std::move(shared)), side_(side) {}

    ~MemoryChannel() override { close(); }

    void send(const Frame& frame) override {
        if (2 + frame.payload.size() > kMaxFrameLen) throw OversizeFrame();
        std::lock_guard lock(shared_->mu);
        if (shared_->closed[side_]) throw TransportError("send on closed channel");
        if (shared_->closed[1 - side_]) throw TransportError("peer closed");
        shared_->queue[1 - side_].push_back(frame);
        shared_->cv.notify_all();
    }

    std::optional<Frame> receive() override {
        std::unique_lock lock(shared_->mu);
        shared_->cv.wait(lock, [&] {
            return !shared_->queue[side_].empty() || shared_->closed[1 - side_] ||
                   shared_->closed[side_];
        });
        if (!shared_->queue[side_].empty()) {
            Frame f = std::move(shared_->queue[side_].front());
            shared_->queue[side_].pop_front();
            return f;
        }
        return std::nullopt;  // peer closed and queue drained
    }

    void close() override {
        std::lock_guard lock(shared_->mu);
        shared_->closed[side_] = true;
        shared_->cv.notify_all();
    }

  private:
    std::shared_ptr<MemoryChannelShared> shared_;
    int side_;
};

}  // namespace detail

using ChannelPair = std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>>;

inline ChannelPair memory_channel_pair() {
    auto shared = std::make_shared<detail::MemoryChannelShared>();
    return {std::make_unique<detail::MemoryChannel>(shared, 0),
            std::make_unique<detail::MemoryChannel>(shared, 1)};
}

}  // namespace otkex
