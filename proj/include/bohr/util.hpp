#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bohr {

/// 0 means: env BOHR_LAB_THREADS, falling back to the hardware count.
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Work items are
/// claimed dynamically; callers write results into per-index slots so the
/// outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body);

/// Pairwise summation over fixed blocks; the reduction tree depends only on
/// the input length.
double pairwise_sum(std::span<const double> x);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> x);

/// Counter-based generator: value k of stream (seed, stream) is a pure
/// function of the triple, so streams can be split and replayed freely.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0)
        : seed_(seed), stream_(stream), counter_(counter) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() { return at(seed_, stream_, counter_++); }
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    std::uint64_t counter() const { return counter_; }

    static std::uint64_t at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

private:
    std::uint64_t seed_, stream_, counter_;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace bohr

#include "bohr/detail/parallel_impl.hpp"
