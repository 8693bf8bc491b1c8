#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace sled {

/// Identifier of the random stream construction, echoed by `--version` and
/// in every result document. Changing the generator or the stream layout
/// must change this string.
inline constexpr std::string_view kRngId = "philox4x32-10/stream-v1";

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// The 128-bit counter is split in two halves: the upper 64 bits hold a
/// stream index, the lower 64 bits the block position inside that stream.
/// The 64-bit key is the user seed. Each (seed, stream) pair therefore owns
/// an independent sequence of 2^66 32-bit words and the sequence does not
/// depend on which thread consumes it.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Skips `n` 32-bit outputs.
    void discard(std::uint64_t n) noexcept;

    /// Raw bijection, exposed for known-answer tests.
    static Block encrypt(Block counter, Key key) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t position_ = 0;  // next block to encrypt
    Block buffer_{};
    unsigned next_ = 4;           // index into buffer_, 4 means empty
};

/// Generator for replicate/repetition `index` of a run seeded with `seed`.
inline Philox4x32 stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return Philox4x32(seed, index);
}

/// Deterministically derives a child seed; `domain` separates unrelated uses
/// of the same (seed, index) pair.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint32_t domain) noexcept;

}  // namespace sled
