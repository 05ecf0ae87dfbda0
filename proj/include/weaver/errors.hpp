#pragma once

#include <stdexcept>
#include <string>

namespace weaver {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonIntegerRatio : Error {
    explicit NonIntegerRatio(double r)
        : Error("1/r is not an integer (r = " + std::to_string(r) + ")") {}
};

struct InfeasibleDegree : Error {
    InfeasibleDegree(std::size_t n, std::size_t d)
        : Error("no simple " + std::to_string(d) + "-regular graph on " +
                std::to_string(n) + " nodes") {}
};

struct TooLarge : Error {
    using Error::Error;
};

struct NotConnected : Error {
    NotConnected() : Error("graph is not connected") {}
};

struct Unreachable : Error {
    using Error::Error;
};

struct Unreached : Error {
    using Error::Error;
};

struct RoutingStuck : Error {
    RoutingStuck(std::uint32_t at, std::uint32_t dst)
        : Error("greedy routing stuck at node " + std::to_string(at) +
                " heading for " + std::to_string(dst)),
          node(at), target(dst) {}
    std::uint32_t node;
    std::uint32_t target;
};

struct DegenerateSize : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct DegenerateFit : Error {
    using Error::Error;
};

struct MixedConfig : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace weaver
