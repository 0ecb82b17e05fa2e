#pragma once

#include <cstdint>
#include <cmath>

namespace maxstein {

// Counter-based stream RNG (Philox 2x64-10). A stream is identified by
// (seed, stream_id); draws are a pure function of (seed, stream_id, index),
// so replicate i of an experiment can use stream_id = base + i and produce
// the same numbers no matter which thread runs it.
class RngStream {
  public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_(stream_id), index_(0) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    // Independent stream derived from the same seed.
    RngStream substream(std::uint64_t offset) const {
        return RngStream(seed_, stream_ + offset);
    }

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        std::uint64_t x0 = stream_;
        std::uint64_t x1 = index_++;
        std::uint64_t key = seed_;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 prod =
                static_cast<unsigned __int128>(kMultiplier) * x0;
            const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(prod);
            x0 = hi ^ key ^ x1;
            x1 = lo;
            key += kWeyl;
        }
        spare_ = x1;
        have_spare_ = true;
        return x0;
    }

    // Uniform on the open interval (0,1); never returns an endpoint, so
    // logs and quantile inversions are always finite.
    double next_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Unit-rate exponential.
    double next_exponential() { return -std::log(next_double()); }

  private:
    static constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ull;
    static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t index_;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace maxstein
