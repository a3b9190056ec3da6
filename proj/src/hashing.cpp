#include "prospect/hashing.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <stdexcept>

namespace prospect {

namespace {

std::string to_hex(const unsigned char* digest, unsigned int len) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(len * 2, '0');
    for (unsigned int i = 0; i < len; ++i) {
        out[2 * i] = kHex[digest[i] >> 4];
        out[2 * i + 1] = kHex[digest[i] & 0xf];
    }
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    Fingerprinter fp;
    fp.add(bytes);
    return fp.finish();
}

Fingerprinter::Fingerprinter() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx_);
        throw std::runtime_error("sha256: digest init failed");
    }
}

Fingerprinter::~Fingerprinter() { EVP_MD_CTX_free(ctx_); }

void Fingerprinter::update(const void* data, std::size_t size) {
    if (EVP_DigestUpdate(ctx_, data, size) != 1) throw std::runtime_error("sha256: update failed");
}

Fingerprinter& Fingerprinter::add(std::string_view field) {
    const std::uint64_t n = field.size();
    update(&n, sizeof n);
    update(field.data(), field.size());
    return *this;
}

Fingerprinter& Fingerprinter::add(std::int64_t value) {
    update(&value, sizeof value);
    return *this;
}

Fingerprinter& Fingerprinter::add(double value) {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    update(&bits, sizeof bits);
    return *this;
}

std::string Fingerprinter::finish() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, digest.data(), &len) != 1) throw std::runtime_error("sha256: final failed");
    return to_hex(digest.data(), len);
}

}  // namespace prospect
