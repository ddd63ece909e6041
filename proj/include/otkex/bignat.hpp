#pragma once

// Arbitrary-precision unsigned integers and the big-endian byte encoding
// used on the wire and for key material. The encoding is normative for the
// whole library: fixed-width values are zero-padded big-endian, minimal
// values carry no leading zero byte, and zero encodes as the empty string.

#include <cstddef>

#include <boost/multiprecision/cpp_int.hpp>

#include "otkex/bytes.hpp"
#include "otkex/errors.hpp"

namespace otkex {

// Values are kept non-negative by construction; the few places that need a
// signed intermediate (extended Euclid) use cpp_int's sign locally.
using BigNat = boost::multiprecision::cpp_int;

inline std::size_t bit_length(const BigNat& n) {
    return n == 0 ? 0 : boost::multiprecision::msb(n) + 1;
}

// Byte width of the fixed encoding for group elements mod p.
inline std::size_t byte_width(const BigNat& p) {
    return (bit_length(p) + 7) / 8;
}

// Minimal big-endian magnitude; empty for zero.
inline Bytes to_bytes_be(const BigNat& n) {
    Bytes out;
    boost::multiprecision::export_bits(n, std::back_inserter(out), 8);
    if (out.size() == 1 && out[0] == 0) out.clear();  // export_bits emits {0} for 0
    return out;
}

// Big-endian, zero-padded to exactly `width` bytes.
inline Bytes to_bytes_be(const BigNat& n, std::size_t width) {
    Bytes mag = to_bytes_be(n);
    if (mag.size() > width) throw Error("to_bytes_be: value does not fit width");
    Bytes out(width - mag.size(), 0);
    out.insert(out.end(), mag.begin(), mag.end());
    return out;
}

inline BigNat from_bytes_be(ByteView data) {
    BigNat n = 0;
    for (Byte b : data) {
        n <<= 8;
        n |= b;
    }
    return n;
}

}  // namespace otkex
