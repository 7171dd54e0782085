#include "bohr/util.hpp"

#include <cstdlib>
#include <string>

namespace bohr {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BOHR_LAB_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v > 0) return v;
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

constexpr std::size_t kBlock = 256;

template <class T>
T sum_range(const T* x, std::size_t n) {
    if (n <= kBlock) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t half = n / 2;
    return sum_range(x, half) + sum_range(x + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> x) { return sum_range(x.data(), x.size()); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> x) {
    return sum_range(x.data(), x.size());
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t CounterRng::at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t key = mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
    return mix64(key ^ mix64(counter));
}

}  // namespace bohr
