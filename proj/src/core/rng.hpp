#pragma once

#include <array>
#include <cstdint>

namespace dgp {

// Counter-based generator (Philox4x32-10). The output is a pure function of
// (seed, stream_id, counter): each counter value yields one 128-bit block.
class RngStream {
public:
    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0)
        : seed_(seed), stream_(stream_id), counter_(counter)
    {
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    static std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter);

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace dgp
