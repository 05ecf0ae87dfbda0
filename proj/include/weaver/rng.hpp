#pragma once

#include <cstdint>
#include <random>

namespace weaver {

// splitmix64 finalizer. Used both as a stream-derivation hash and as a
// counter-based generator for walk tokens, so draws do not depend on the
// order the simulator happens to process nodes in.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ b);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b) ^ c);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d) {
    return mix64(mix64(a, b, c) ^ d);
}

/// Purpose tags keep independent random streams from colliding when they
/// share (seed, node, phase) coordinates.
enum class StreamPurpose : std::uint64_t {
    Coords      = 1,
    Pairing     = 2,
    GnpEdges    = 3,
    Walk        = 4,
    SampleConns = 5,
    FastEndpoint = 6,
    PairSample  = 7,
    Oracle      = 8,
    Trial       = 9,
    Source      = 10,
};

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t node,
                                 std::uint64_t phase, StreamPurpose purpose) {
    return mix64(master, node, phase, static_cast<std::uint64_t>(purpose));
}

/// Deterministic random stream. Wraps std::mt19937_64 (whose output sequence
/// the standard pins down exactly) and converts to doubles/indices by hand,
/// since the std distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, n). Lemire's multiply-shift; the bias for
    /// n << 2^64 is far below anything observable here.
    std::uint64_t next_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool next_bernoulli(double p) { return next_double() < p; }

private:
    std::mt19937_64 eng_;
};

/// Stateless draw helpers for counter-based streams (walk tokens).
inline double counter_double(std::uint64_t stream, std::uint64_t counter,
                             std::uint64_t slot) {
    return static_cast<double>(mix64(stream, counter, slot) >> 11) * 0x1.0p-53;
}

inline std::uint64_t counter_index(std::uint64_t stream, std::uint64_t counter,
                                   std::uint64_t slot, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(mix64(stream, counter, slot)) * n) >> 64);
}

}  // namespace weaver
