#pragma once

#include <cstdint>
#include <string_view>

#include "deepgrid/types.hpp"

namespace deepgrid {

// Stable 64-bit seed for one named stream of one replication.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication, std::string_view stream);

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t replication, std::string_view stream)
{
    return Rng(derive_seed(master_seed, replication, stream));
}

}  // namespace deepgrid
