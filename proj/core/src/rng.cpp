#include "copsel/rng.hpp"

namespace copsel {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
}

// splitmix64 finalizer, breaks up FNV's weak avalanche in the low bits
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, const std::vector<std::string>& path) {
    std::uint64_t h = kFnvOffset;
    unsigned char master_bytes[8];
    for (int i = 0; i < 8; ++i) master_bytes[i] = static_cast<unsigned char>(master >> (8 * i));
    fnv_bytes(h, master_bytes, 8);
    for (const auto& label : path) {
        fnv_bytes(h, label.data(), label.size());
        // separator so {"ab","c"} != {"a","bc"}
        const unsigned char sep = 0xff;
        fnv_bytes(h, &sep, 1);
    }
    return mix(h);
}

} // namespace copsel
