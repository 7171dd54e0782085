#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "bohr/laurent.hpp"

namespace bohr {

/// Linear fingerprint of Laurent polynomials modulo (f).
///
/// One variable of f (the one with the widest degree span) is kept as t, the
/// others are sent to random nonzero residues mod p = 2^61 - 1. The result is
/// reduced modulo the image of f with its t-power stripped and read through a
/// random linear functional. The map is additive and vanishes on every
/// multiple of f, so equal fingerprints are necessary for congruence mod (f);
/// hits are confirmed with exact division.
class Fingerprint {
public:
    static constexpr std::uint64_t kPrime = (std::uint64_t(1) << 61) - 1;

    /// `extent` bounds |e_i| of every exponent that will be hashed.
    Fingerprint(const LaurentPoly& f, long extent, std::uint64_t seed = 0x5eed);

    std::uint64_t monomial(const Exponent& e) const;
    std::uint64_t of(const LaurentPoly& p) const;
    bool trivial() const noexcept { return trivial_; }  // f is a monomial

    static std::uint64_t add(std::uint64_t a, std::uint64_t b);
    static std::uint64_t sub(std::uint64_t a, std::uint64_t b);
    static std::uint64_t mul(std::uint64_t a, std::uint64_t b);
    static std::uint64_t from_signed(long c);

private:
    int dim_;
    int main_var_ = 0;
    long extent_ = 0;
    std::vector<std::uint64_t> t_table_;                 // hash of t^k, k in [-extent, extent]
    std::vector<std::vector<std::uint64_t>> var_table_;  // a_i^k, k in [-extent, extent]
    bool trivial_ = false;
};

/// Finds the first coefficient tuple c (slot 0 most significant, symbols
/// compared by their position in `alphabet`) with f | sum c_i z^(slot_i) - target.
///
/// Meet in the middle: the least significant slots are tabulated by
/// fingerprint once; the most significant ones are enumerated in order.
class LacunarySearch {
public:
    struct Options {
        int threads = 0;
        std::size_t table_limit = std::size_t(1) << 23;
        double prefix_limit = 1e10;
    };

    LacunarySearch(const LaurentPoly& f, std::vector<Exponent> slots, std::vector<int> alphabet,
                   const Fingerprint& fp, Options opts);
    LacunarySearch(const LaurentPoly& f, std::vector<Exponent> slots, std::vector<int> alphabet,
                   const Fingerprint& fp)
        : LacunarySearch(f, std::move(slots), std::move(alphabet), fp, Options{}) {}

    /// `allow_zero` admits the all-zero tuple when target is congruent to 0.
    std::optional<std::vector<int>> first_solution(const LaurentPoly& target, bool allow_zero) const;

    LaurentPoly build(const std::vector<int>& coeffs) const;
    const std::vector<Exponent>& slots() const noexcept { return slots_; }

    /// Fingerprint hits that failed exact confirmation (diagnostic).
    std::uint64_t false_hits() const noexcept { return false_hits_; }

private:
    struct Entry {
        std::uint64_t hash;
        std::uint32_t index;
        bool operator<(const Entry& o) const { return hash != o.hash ? hash < o.hash : index < o.index; }
    };

    std::vector<int> decode(std::uint64_t prefix, std::uint32_t suffix) const;
    std::optional<std::vector<int>> trivial_solution(const LaurentPoly& target, bool allow_zero) const;

    LaurentPoly f_;
    std::vector<Exponent> slots_;
    std::vector<int> alphabet_;
    const Fingerprint& fp_;
    Options opts_;
    std::size_t prefix_len_ = 0;
    std::size_t suffix_len_ = 0;
    std::uint64_t prefix_count_ = 1;
    std::vector<std::uint64_t> slot_hash_;
    std::vector<Entry> table_;
    mutable std::atomic<std::uint64_t> false_hits_{0};
};

/// Integer power with overflow check, used for search-space sizes.
double search_space(std::size_t alphabet, std::size_t slots);

}  // namespace bohr
