#pragma once

#include <cstdint>

namespace gridauth {

// Operation counters behind the cost reports. Group-math and hash calls
// bump the active counter set, if any; with no scope installed the hooks
// are no-ops. One active scope per thread.
struct OpCounters {
    std::uint64_t hashes = 0;       // protocol h(.) invocations
    std::uint64_t scalar_muls = 0;  // k*P group operations
    std::uint64_t point_adds = 0;   // explicit P+Q group operations
    std::uint64_t xors = 0;         // 32-octet XOR combinations
    std::uint64_t rng_draws = 0;    // fresh random values (scalars, biometric secrets)

    OpCounters& operator+=(const OpCounters& o) {
        hashes += o.hashes;
        scalar_muls += o.scalar_muls;
        point_adds += o.point_adds;
        xors += o.xors;
        rng_draws += o.rng_draws;
        return *this;
    }
};

namespace counterdetail {
inline thread_local OpCounters* active = nullptr;
}

class CountingScope {
public:
    explicit CountingScope(OpCounters& c) : prev_(counterdetail::active) {
        counterdetail::active = &c;
    }
    ~CountingScope() { counterdetail::active = prev_; }

    CountingScope(const CountingScope&) = delete;
    CountingScope& operator=(const CountingScope&) = delete;

private:
    OpCounters* prev_;
};

inline void count_hash() {
    if (counterdetail::active) ++counterdetail::active->hashes;
}
inline void count_scalar_mul() {
    if (counterdetail::active) ++counterdetail::active->scalar_muls;
}
inline void count_point_add() {
    if (counterdetail::active) ++counterdetail::active->point_adds;
}
inline void count_xor() {
    if (counterdetail::active) ++counterdetail::active->xors;
}
inline void count_rng_draw() {
    if (counterdetail::active) ++counterdetail::active->rng_draws;
}

}  // namespace gridauth
