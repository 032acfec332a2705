#include "wbb/hash.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace wbb {

Digest sha256(std::span<const std::uint8_t> data) {
    Digest out{};
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, out.data(), &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    return out;
}

HashFamily::HashFamily(std::uint64_t index) : index_(index) {
    Bytes tag = {'h', 'a', 's', 'h', '-', 'f', 'a', 'm', 'i', 'l', 'y'};
    for (int i = 7; i >= 0; --i) {
        tag.push_back(static_cast<std::uint8_t>(index >> (8 * i)));
    }
    seed_ = sha256(tag);
}

Digest HashFamily::hash(std::span<const std::uint8_t> data) const {
    Bytes buf(seed_.begin(), seed_.end());
    buf.insert(buf.end(), data.begin(), data.end());
    return sha256(buf);
}

std::uint64_t digest_mod(const Digest& h, std::uint64_t m) {
    if (m == 0) {
        throw std::invalid_argument("digest_mod: zero modulus");
    }
    unsigned __int128 rem = 0;
    for (std::uint8_t byte : h) {
        rem = (rem << 8) | byte;
        rem %= m;
    }
    return static_cast<std::uint64_t>(rem);
}

bool digest_div_parity(const Digest& h, std::uint64_t m) {
    if (m == 0) {
        throw std::invalid_argument("digest_div_parity: zero modulus");
    }
    // Base-256 long division; only the last quotient digit decides parity.
    unsigned __int128 rem = 0;
    std::uint64_t last_digit = 0;
    for (std::uint8_t byte : h) {
        unsigned __int128 cur = (rem << 8) | byte;
        last_digit = static_cast<std::uint64_t>(cur / m);
        rem = cur % m;
    }
    return (last_digit & 1) != 0;
}

Bytes concat(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    Bytes out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

HashStream::HashStream(const Digest& seed) : seed_(seed) {}

void HashStream::refill() {
    Bytes buf(seed_.begin(), seed_.end());
    for (int i = 7; i >= 0; --i) {
        buf.push_back(static_cast<std::uint8_t>(counter_ >> (8 * i)));
    }
    block_ = sha256(buf);
    ++counter_;
    pos_ = 0;
}

std::uint64_t HashStream::next_u64() {
    if (pos_ + 8 > kDigestBytes) {
        refill();
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        v = (v << 8) | block_[pos_ + i];
    }
    pos_ += 8;
    return v;
}

std::uint64_t HashStream::next_below(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("next_below: zero bound");
    }
    return next_u64() % bound;
}

}  // namespace wbb
