#include <catch2/catch_amalgamated.hpp>

#include <sys/socket.h>
#include <unistd.h>

#include <thread>

#include "otkex/channel.hpp"
#include "otkex/rng.hpp"
#include "otkex/socket_channel.hpp"

using namespace otkex;

TEST_CASE("memory channel delivers in order") {
    auto [a, b] = memory_channel_pair();
    Frame f = make_frame(Proto::Mutual, 1, Bytes{1, 2, 3});
    a->send(f);
    CHECK(b->receive() == f);

    for (int i = 0; i < 1000; ++i)
        a->send(make_frame(Proto::Mutual, 2, Bytes{static_cast<Byte>(i), static_cast<Byte>(i >> 8)}));
    for (int i = 0; i < 1000; ++i) {
        auto g = b->receive();
        REQUIRE(g.has_value());
        REQUIRE(g->payload[0] == static_cast<Byte>(i));
    }
}

TEST_CASE("memory channel close semantics") {
    auto [a, b] = memory_channel_pair();
    a->send(make_frame(Proto::Control, 1, {}));
    a->close();
    CHECK(b->receive().has_value());   // buffered frame drains first
    CHECK_FALSE(b->receive().has_value());  // then peer-closed
    CHECK_THROWS_AS(b->send(make_frame(Proto::Control, 1, {})), TransportError);
}

TEST_CASE("memory channel receive blocks until a frame arrives") {
    auto [a, b] = memory_channel_pair();
    std::thread sender([&a] {
        std::this_thread::sleep_for(std::chrono::milliseconds(30));
        a->send(make_frame(Proto::Zkp, 1, Bytes{42}));
    });
    auto f = b->receive();
    sender.join();
    REQUIRE(f.has_value());
    CHECK(f->payload == Bytes{42});
}

TEST_CASE("memory channel refuses oversize frames") {
    auto [a, b] = memory_channel_pair();
    CHECK_THROWS_AS(a->send(make_frame(Proto::Control, 0, Bytes(kMaxFrameLen, 0))),
                    OversizeFrame);
}

TEST_CASE("socket channel loopback echo") {
    SocketListener listener("127.0.0.1:0");
    const std::string addr = "127.0.0.1:" + std::to_string(listener.port());

    std::thread server([&listener] {
        auto ch = listener.accept_one();
        for (int i = 0; i < 100; ++i) {
            auto f = ch->receive();
            REQUIRE(f.has_value());
            ch->send(*f);
        }
        CHECK_FALSE(ch->receive().has_value());  // clean close from client
    });

    auto client = socket_dial(addr);
    Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        Frame f = make_frame(Proto::Ot12, static_cast<std::uint8_t>(i),
                             rng.bytes(static_cast<std::size_t>(rng.next_u64() % 2000)));
        client->send(f);
        CHECK(client->receive() == f);
    }
    client->close();
    server.join();
}

TEST_CASE("socket oversize frame rejected before buffering") {
    SocketListener listener("127.0.0.1:0");
    std::thread sender([port = listener.port()] {
        auto info = detail::resolve("127.0.0.1:" + std::to_string(port), false);
        int fd = ::socket(info->ai_family, info->ai_socktype, info->ai_protocol);
        REQUIRE(fd >= 0);
        REQUIRE(::connect(fd, info->ai_addr, info->ai_addrlen) == 0);
        const Byte header[4] = {0xFF, 0x00, 0x00, 0x00};  // length 0xFF000000
        REQUIRE(::send(fd, header, 4, 0) == 4);
        ::close(fd);
    });
    auto ch = listener.accept_one();
    CHECK_THROWS_AS(ch->receive(), OversizeFrame);
    sender.join();
}

TEST_CASE("socket truncated frame raises partial-frame transport error") {
    SocketListener listener("127.0.0.1:0");
    std::thread sender([port = listener.port()] {
        auto info = detail::resolve("127.0.0.1:" + std::to_string(port), false);
        int fd = ::socket(info->ai_family, info->ai_socktype, info->ai_protocol);
        REQUIRE(fd >= 0);
        REQUIRE(::connect(fd, info->ai_addr, info->ai_addrlen) == 0);
        Bytes wire = encode_frame(make_frame(Proto::Mutual, 1, Bytes(64, 0xAB)));
        REQUIRE(::send(fd, wire.data(), 10, 0) == 10);  // cut inside the payload
        ::close(fd);
    });
    auto ch = listener.accept_one();
    try {
        ch->receive();
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(e.partial_frame);
    }
    sender.join();
}

TEST_CASE("dial failure reports a transport error") {
    CHECK_THROWS_AS(socket_dial("127.0.0.1:1", 2), TransportError);
    CHECK_THROWS_AS(socket_dial("no-port-here", 1), TransportError);
}
