#pragma once

#include <random>

#include "bohr/laurent.hpp"

namespace testing {

inline bohr::LaurentPoly P(const char* text, int dim = 0) { return bohr::parse(text, dim); }

// Random polynomial with small support in a box, coefficients in [-c, c].
inline bohr::LaurentPoly random_poly(std::mt19937_64& rng, int dim, int terms, long box, long c) {
    std::uniform_int_distribution<long> e(-box, box), v(-c, c);
    bohr::LaurentPoly p(dim);
    for (int t = 0; t < terms; ++t) {
        bohr::Exponent x(static_cast<std::size_t>(dim));
        for (auto& xi : x) xi = e(rng);
        p.add_term(x, v(rng));
    }
    return p;
}

}  // namespace testing
