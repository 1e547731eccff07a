#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace trajbench {

// Incremental FNV-1a 64-bit hash, used for parameter checksums and artifact
// manifests. Not cryptographic; chosen for a stable, dependency-free digest.
class Fnv1a64 {
public:
    Fnv1a64& update(const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            state_ ^= bytes[i];
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    Fnv1a64& update(std::string_view text) { return update(text.data(), text.size()); }

    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a64(std::string_view bytes) { return Fnv1a64().update(bytes).digest(); }

}  // namespace trajbench
