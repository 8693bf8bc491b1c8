#include "sled/rng.hpp"

namespace sled {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

Philox4x32::Block Philox4x32::encrypt(Block ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

void Philox4x32::refill() noexcept {
    const Block ctr = {static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32),
                       static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const Key key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    buffer_ = encrypt(ctr, key);
    ++position_;
    next_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
    if (next_ == 4) refill();
    return buffer_[next_++];
}

void Philox4x32::discard(std::uint64_t n) noexcept {
    const std::uint64_t buffered = 4 - next_;
    if (n <= buffered) {
        next_ += static_cast<unsigned>(n);
        return;
    }
    n -= buffered;
    position_ += n / 4;
    next_ = 4;
    const auto rest = static_cast<unsigned>(n % 4);
    if (rest != 0) {
        refill();
        next_ = rest;
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint32_t domain) noexcept {
    // Counter space with the top bit of the block position set is never
    // reached by a normal stream, so derived seeds cannot collide with draws.
    const Philox4x32::Block ctr = {domain, 0x80000000u, static_cast<std::uint32_t>(index),
                                   static_cast<std::uint32_t>(index >> 32)};
    const Philox4x32::Key key = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const auto out = Philox4x32::encrypt(ctr, key);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace sled
