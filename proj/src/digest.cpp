#include "cdag/digest.hpp"

#include "cdag/errors.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>

namespace cdag {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

Digest Digest::from_uint(std::uint64_t value) {
    std::array<std::uint8_t, kSize> b{};
    for (std::size_t i = 0; i < 8; ++i) {
        b[kSize - 1 - i] = static_cast<std::uint8_t>(value >> (8 * i));
    }
    return Digest(b);
}

Digest Digest::from_hex(std::string_view hex) {
    if (hex.size() != 2 * kSize) {
        throw Error(ErrorCode::InvalidParameter, "digest hex must be 64 characters");
    }
    std::array<std::uint8_t, kSize> b{};
    for (std::size_t i = 0; i < kSize; ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error(ErrorCode::InvalidParameter, "bad hex digit in digest");
        b[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return Digest(b);
}

std::string Digest::hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(2 * kSize, '0');
    for (std::size_t i = 0; i < kSize; ++i) {
        out[2 * i] = kDigits[bytes_[i] >> 4];
        out[2 * i + 1] = kDigits[bytes_[i] & 0xf];
    }
    return out;
}

bool Digest::is_zero() const {
    for (auto b : bytes_) {
        if (b != 0) return false;
    }
    return true;
}

std::uint64_t Digest::prefix64() const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | bytes_[i];
    return v;
}

std::uint64_t Digest::mod(std::uint64_t m) const {
    if (m == 0) throw Error(ErrorCode::InvalidParameter, "modulus must be positive");
    if (m <= 0xffffffffULL) {
        std::uint64_t r = 0;
        for (std::size_t i = 0; i < bytes_.size(); i += 4) {
            std::uint64_t word = (std::uint64_t{bytes_[i]} << 24) | (std::uint64_t{bytes_[i + 1]} << 16) |
                                 (std::uint64_t{bytes_[i + 2]} << 8) | bytes_[i + 3];
            r = ((r << 32) | word) % m;
        }
        return r;
    }
    unsigned __int128 r = 0;
    for (auto b : bytes_) r = ((r << 8) | b) % m;
    return static_cast<std::uint64_t>(r);
}

Hasher& Hasher::add(std::uint64_t v) {
    for (int i = 7; i >= 0; --i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
}

Hasher& Hasher::add(double v) { return add(std::bit_cast<std::uint64_t>(v)); }

Hasher& Hasher::add(const Digest& d) {
    buf_.insert(buf_.end(), d.bytes().begin(), d.bytes().end());
    return *this;
}

Hasher& Hasher::add(std::string_view s) {
    add(static_cast<std::uint64_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
    return *this;
}

Hasher& Hasher::add_bytes(std::span<const std::uint8_t> bytes) {
    add(static_cast<std::uint64_t>(bytes.size()));
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
    return *this;
}

Digest Hasher::finish() const { return sha256(buf_); }

Digest sha256(std::span<const std::uint8_t> bytes) {
    struct Ctx {
        EVP_MD* md = EVP_MD_fetch(nullptr, "SHA256", nullptr);
        EVP_MD_CTX* ctx = EVP_MD_CTX_new();
        ~Ctx() {
            EVP_MD_CTX_free(ctx);
            EVP_MD_free(md);
        }
    };
    thread_local Ctx c;
    std::array<std::uint8_t, Digest::kSize> out{};
    unsigned int len = 0;
    if (!c.md || !c.ctx || EVP_DigestInit_ex(c.ctx, c.md, nullptr) != 1 ||
        EVP_DigestUpdate(c.ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(c.ctx, out.data(), &len) != 1 ||
        len != Digest::kSize) {
        throw Error(ErrorCode::Internal, "SHA-256 computation failed");
    }
    return Digest(out);
}

}  // namespace cdag
