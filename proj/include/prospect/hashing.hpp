#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <openssl/evp.h>

namespace prospect {

std::string sha256_hex(std::string_view bytes);

/// Incremental SHA-256 over a sequence of length-prefixed fields, so that
/// ("ab","c") and ("a","bc") hash differently.
class Fingerprinter {
public:
    Fingerprinter();
    ~Fingerprinter();
    Fingerprinter(const Fingerprinter&) = delete;
    Fingerprinter& operator=(const Fingerprinter&) = delete;

    Fingerprinter& add(std::string_view field);
    Fingerprinter& add(std::int64_t value);
    Fingerprinter& add(double value);

    /// Hex digest. The fingerprinter must not be used afterwards.
    std::string finish();

private:
    void update(const void* data, std::size_t size);
    EVP_MD_CTX* ctx_;
};

/// 64-bit FNV-1a; used for feature hashing where a cryptographic hash is overkill.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace prospect
