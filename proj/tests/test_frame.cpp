#include <catch2/catch_amalgamated.hpp>

#include "otkex/coinflip.hpp"
#include "otkex/frame.hpp"
#include "otkex/mutual.hpp"
#include "otkex/ot12.hpp"
#include "otkex/rng.hpp"
#include "otkex/session.hpp"
#include "otkex/zkp.hpp"

using namespace otkex;

TEST_CASE("bignat payload encoding rules") {
    PayloadWriter w;
    w.put_bignat(16);
    CHECK(w.take() == Bytes{0x00, 0x01, 0x10});

    PayloadWriter w0;
    w0.put_bignat(0);
    CHECK(w0.take() == Bytes{0x00, 0x00});

    PayloadWriter w2;
    w2.put_bignat(BigNat("18446744073709551616"));  // 2^64
    Bytes enc = w2.take();
    CHECK(enc.size() == 2 + 9);
    PayloadReader r(enc);
    CHECK(r.bignat() == BigNat("18446744073709551616"));
}

TEST_CASE("reader rejects non-canonical integers") {
    const Bytes padded{0x00, 0x02, 0x00, 0x10};  // 16 with a leading zero byte
    PayloadReader r(padded);
    CHECK_THROWS_AS(r.bignat(), MalformedElement);
}

TEST_CASE("reader rejects truncation and trailing bytes") {
    const Bytes short_count{0x00, 0x05, 0x01};
    PayloadReader r(short_count);
    CHECK_THROWS_AS(r.bignat(), MalformedElement);

    PayloadWriter w;
    w.put_u8(1);
    w.put_u8(2);
    Bytes two = w.take();
    PayloadReader r2(two);
    r2.u8();
    CHECK_THROWS_AS(r2.expect_end(), MalformedElement);
}

TEST_CASE("frame encode layout") {
    Frame f = make_frame(Proto::Mutual, 3, Bytes{0xAA, 0xBB});
    Bytes wire = encode_frame(f);
    CHECK(wire == Bytes{0x00, 0x00, 0x00, 0x04, 0x01, 0x03, 0xAA, 0xBB});
    CHECK(decode_frame(wire) == f);
}

TEST_CASE("incremental decode asks for more bytes") {
    Bytes wire = encode_frame(make_frame(Proto::Zkp, 1, Bytes(100, 0x55)));
    for (std::size_t cut = 0; cut < wire.size(); cut += 17) {
        std::size_t offset = 0;
        CHECK_FALSE(try_decode_frame(ByteView(wire.data(), cut), offset));
        CHECK(offset == 0);
    }
    std::size_t offset = 0;
    CHECK(try_decode_frame(wire, offset).has_value());
    CHECK(offset == wire.size());
}

TEST_CASE("oversize frames rejected at the header") {
    const std::size_t big = kMaxFrameLen + 1;
    Bytes header{static_cast<Byte>(big >> 24), static_cast<Byte>(big >> 16),
                 static_cast<Byte>(big >> 8), static_cast<Byte>(big)};
    std::size_t offset = 0;
    CHECK_THROWS_AS(try_decode_frame(header, offset), OversizeFrame);
    CHECK_THROWS_AS(encode_frame(make_frame(Proto::Control, 0, Bytes(kMaxFrameLen, 0))),
                    OversizeFrame);
}

TEST_CASE("frame round trip property") {
    Rng rng(17);
    for (int i = 0; i < 10000; ++i) {
        Frame f;
        f.protocol_id = static_cast<std::uint8_t>(rng.next_u64());
        f.msg_type = static_cast<std::uint8_t>(rng.next_u64());
        f.payload = rng.bytes(static_cast<std::size_t>(rng.next_u64() % 300));
        std::size_t offset = 0;
        auto back = try_decode_frame(encode_frame(f), offset);
        REQUIRE(back.has_value());
        REQUIRE(*back == f);
    }
}

TEST_CASE("decode of random bytes errors but never crashes") {
    Rng rng(19);
    for (int i = 0; i < 2000; ++i) {
        Bytes junk = rng.bytes(static_cast<std::size_t>(rng.next_u64() % 64));
        std::size_t offset = 0;
        try {
            (void)try_decode_frame(junk, offset);
        } catch (const Error&) {
            // acceptable: oversize or malformed
        }
    }
}

TEST_CASE("protocol message round trips") {
    // mutual
    CHECK(wire::parse_a1(wire::to_frame(MutualA1{16, 19})).a1 == 16);
    CHECK(wire::parse_b1(wire::to_frame(MutualB1{7})).b1 == 7);
    CHECK(wire::parse_confirm(wire::to_frame(MutualConfirm{{1, 2, 3}})).c == Bytes{1, 2, 3});
    CHECK(wire::parse_confirm_reply(wire::to_frame(MutualConfirmReply{{}})).y.empty());
    CHECK(wire::parse_claim(wire::to_frame(MutualClaim{{9, 9}})).masked == Bytes{9, 9});
    CHECK(wire::parse_secret_ct(wire::to_frame(MutualSecretCt{{4}})).ct == Bytes{4});

    // ot
    CHECK(wire::parse_ot1(wire::to_frame(OtRound1{16})).a == 16);
    auto ot2 = wire::parse_ot2(wire::to_frame(OtRound2{17, 18}));
    CHECK((ot2.b1 == 17 && ot2.b2 == 18));
    CHECK(wire::parse_ot3(wire::to_frame(OtRound3{8})).m == 8);
    auto cts = wire::parse_ot_cts(wire::to_frame(OtCiphertexts{{1}, {2, 2}}));
    CHECK((cts.ct1 == Bytes{1} && cts.ct2 == Bytes{2, 2}));

    // coinflip
    CHECK(wire::parse_declare(wire::to_frame(CoinDeclare{21})).key == 21);
    auto res = wire::parse_result(wire::to_frame(CoinResult{CoinWinner::BobWins, {3, 5, 15}}));
    CHECK(res.winner == CoinWinner::BobWins);
    CHECK(res.reveal.nA2 == 15);

    // zkp: absent-M challenge variant vs present
    auto c0 = wire::parse_challenge(wire::to_frame(ZkChallenge{false, std::nullopt}));
    CHECK_FALSE(c0.b);
    CHECK_FALSE(c0.M.has_value());
    auto c1 = wire::parse_challenge(wire::to_frame(ZkChallenge{true, BigNat(4)}));
    CHECK(c1.b);
    CHECK(*c1.M == 4);
    auto resp = wire::parse_response(wire::to_frame(ZkResponse{true, 18}));
    CHECK((resp.for_b1 && resp.value == 18));
}

TEST_CASE("hello round trip") {
    Hello h{static_cast<std::uint8_t>(Proto::Ot12), Bytes(32, 0xCD), kOtKeyBinding};
    CHECK(parse_hello(make_hello(h)) == h);
}
