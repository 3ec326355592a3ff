#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdag {

/// 256-bit content digest. Ordering is the unsigned big-endian numeric order
/// of the bytes, which is also the order used for hash-sorted block lists.
class Digest {
public:
    static constexpr std::size_t kSize = 32;

    constexpr Digest() = default;
    explicit Digest(const std::array<std::uint8_t, kSize>& bytes) : bytes_(bytes) {}

    /// Digest whose numeric value equals `value` (big-endian, zero padded).
    static Digest from_uint(std::uint64_t value);
    static Digest from_hex(std::string_view hex);

    const std::array<std::uint8_t, kSize>& bytes() const { return bytes_; }
    std::string hex() const;
    std::string short_hex() const { return hex().substr(0, 12); }
    bool is_zero() const;

    /// Leading 64 bits, used as a position on the identifier ring.
    std::uint64_t prefix64() const;

    /// (value as big-endian unsigned integer) mod m. Requires m > 0.
    std::uint64_t mod(std::uint64_t m) const;

    auto operator<=>(const Digest&) const = default;

private:
    std::array<std::uint8_t, kSize> bytes_{};
};

/// Incremental SHA-256 builder. Every field is length- or width-delimited so
/// distinct field sequences never collide by concatenation.
class Hasher {
public:
    Hasher& add(std::uint64_t v);
    Hasher& add(std::int64_t v) { return add(static_cast<std::uint64_t>(v)); }
    Hasher& add(std::uint32_t v) { return add(static_cast<std::uint64_t>(v)); }
    Hasher& add(int v) { return add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
    Hasher& add(double v);
    Hasher& add(const Digest& d);
    Hasher& add(std::string_view s);
    Hasher& add(const char* s) { return add(std::string_view(s)); }
    Hasher& add_bytes(std::span<const std::uint8_t> bytes);

    Digest finish() const;

private:
    std::vector<std::uint8_t> buf_;
};

Digest sha256(std::span<const std::uint8_t> bytes);

struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept {
        return static_cast<std::size_t>(d.prefix64());
    }
};

using BlockHash = Digest;
using CBlockHash = Digest;
using TxHash = Digest;

/// Position of a participant on the ring; always in [0, N).
using NodeId = std::uint32_t;

}  // namespace cdag

template <>
struct std::hash<cdag::Digest> {
    std::size_t operator()(const cdag::Digest& d) const noexcept { return cdag::DigestHash{}(d); }
};
