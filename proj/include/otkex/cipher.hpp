#pragma once

// The keyed confirmation function f/f^-1, the key-derived masking stream,
// and byte-level key claims. f is an XOR stream keyed by
// H(key-bytes || context || counter); distinct context strings give
// independent streams, so each protocol phase gets its own.

#include <cstdint>
#include <string_view>

#include "otkex/bignat.hpp"
#include "otkex/bytes.hpp"
#include "otkex/errors.hpp"
#include "otkex/params.hpp"
#include "otkex/sha256.hpp"

namespace otkex {

// Per-phase context strings. Normative ASCII constants.
inline constexpr std::string_view kCtxConfirm = "confirm";
inline constexpr std::string_view kCtxSecret = "secret";
inline constexpr std::string_view kCtxMask = "mask";
inline constexpr std::string_view kCtxOtSecret1 = "ot-secret-1";
inline constexpr std::string_view kCtxOtSecret2 = "ot-secret-2";

// A group element in [1, p-1] with the session's fixed byte width.
struct SymmetricKey {
    BigNat value;
    std::size_t width;

    Bytes encode() const { return to_bytes_be(value, width); }

    bool operator==(const SymmetricKey&) const = default;
};

inline SymmetricKey group_key(const BigNat& value, const GroupParams& gp) {
    if (value < 1 || value >= gp.p) throw MalformedElement("key value outside [1, p-1]");
    return SymmetricKey{value, byte_width(gp.p)};
}

// Either the padded key bytes (matched) or their bitwise complement.
struct KeyClaim {
    Bytes bytes;

    bool operator==(const KeyClaim&) const = default;
};

namespace detail {

inline Bytes keystream_raw(ByteView key_material, std::string_view context, std::size_t len) {
    Bytes out;
    out.reserve(len);
    std::uint32_t block = 0;
    while (out.size() < len) {
        Sha256 h;
        h.update(key_material);
        h.update(ByteView(reinterpret_cast<const Byte*>(context.data()), context.size()));
        const Byte ctr[4] = {static_cast<Byte>(block >> 24), static_cast<Byte>(block >> 16),
                             static_cast<Byte>(block >> 8), static_cast<Byte>(block)};
        h.update(ByteView(ctr, 4));
        Bytes d = h.finish();
        const std::size_t take = std::min(d.size(), len - out.size());
        out.insert(out.end(), d.begin(), d.begin() + take);
        ++block;
    }
    return out;
}

}  // namespace detail

inline Bytes keystream(const SymmetricKey& key, std::string_view context, std::size_t len) {
    return detail::keystream_raw(key.encode(), context, len);
}

inline Bytes f_encrypt(ByteView m, const SymmetricKey& key, std::string_view context) {
    return xor_bytes(m, keystream(key, context, m.size()));
}

// XOR stream: decryption is the same operation.
inline Bytes f_decrypt(ByteView c, const SymmetricKey& key, std::string_view context) {
    return f_encrypt(c, key, context);
}

inline KeyClaim make_claim(const SymmetricKey& key, bool matched) {
    Bytes enc = key.encode();
    return KeyClaim{matched ? enc : complement_bytes(enc)};
}

// Self-inverse: masking twice with the same claim returns the secret.
inline Bytes mask_secret(ByteView secret, const KeyClaim& claim) {
    return xor_bytes(secret, detail::keystream_raw(claim.bytes, kCtxMask, secret.size()));
}

}  // namespace otkex
