#include "deepgrid/random.hpp"

namespace deepgrid {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication, std::string_view stream)
{
    return mix(mix(mix(master_seed) ^ replication) ^ fnv1a(stream));
}

}  // namespace deepgrid
