#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace otkex {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// numtheory
struct InvalidModulus : Error {
    InvalidModulus() : Error("modulus must be >= 2") {}
};

struct NotInvertible : Error {
    boost::multiprecision::cpp_int gcd;
    explicit NotInvertible(boost::multiprecision::cpp_int g)
        : Error("element not invertible, gcd = " + g.str()), gcd(std::move(g)) {}
};

struct NotAResidue : Error {
    NotAResidue() : Error("not a quadratic residue") {}
};

struct InvalidPrime : Error {
    explicit InvalidPrime(const std::string& what) : Error(what) {}
};

// protocol inputs
struct InvalidScalar : Error {
    explicit InvalidScalar(const std::string& what) : Error(what) {}
};

struct MalformedElement : Error {
    explicit MalformedElement(const std::string& what) : Error(what) {}
};

// params file
struct MalformedField : Error {
    std::size_t line;  // 1-based; 0 when the failure is not tied to a line
    MalformedField(std::size_t line_no, const std::string& what)
        : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

// wire
struct OversizeFrame : Error {
    OversizeFrame() : Error("frame exceeds maximum length") {}
};

struct TransportError : Error {
    bool partial_frame;
    explicit TransportError(const std::string& what, bool partial = false)
        : Error(what), partial_frame(partial) {}
};

struct ProtocolViolation : Error {
    explicit ProtocolViolation(const std::string& what) : Error(what) {}
};

struct IncompleteTranscript : Error {
    explicit IncompleteTranscript(const std::string& what) : Error(what) {}
};

}  // namespace otkex
