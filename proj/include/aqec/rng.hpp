#pragma once

#include <cstdint>
#include <random>

namespace aqec {

// splitmix64 step; used to derive independent substream seeds so that
// parallel trajectory generation is order-independent.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t salt = 0) {
    return mix64(mix64(master ^ mix64(stream)) ^ mix64(salt + 0x517cc1b727220a95ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream,
                                std::uint64_t salt = 0) {
    return std::mt19937_64(derive_seed(master, stream, salt));
}

} // namespace aqec
