#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace prism {

// Bits per key -> probe count, rounded from bits * ln 2.
int BloomProbes(int bits_per_key);

// Builds a filter over pre-hashed keys. Layout: bit array followed by one
// byte holding the probe count.
std::string BuildBloomFilter(const std::vector<uint64_t>& key_hashes, int bits_per_key);

// False only if the key is definitely absent.
bool BloomMayContain(std::string_view filter, uint64_t key_hash);

}  // namespace prism
