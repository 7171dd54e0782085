#include <doctest.h>

#include <cmath>
#include <random>

#include "bohr/error.hpp"
#include "bohr/homoclinic.hpp"
#include "helpers.hpp"

using namespace bohr;
using testing::P;

namespace {

double binom(long n, long k) {
    double r = 1;
    for (long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// coefficient of z1^a z2^b in 1/(3 - z1 - z2)
double series(long a, long b) {
    if (a < 0 || b < 0) return 0.0;
    return binom(a + b, a) * std::pow(3.0, -(a + b + 1));
}

}  // namespace

TEST_SUITE("homoclinic") {

TEST_CASE("power series values for 3 - z1 - z2") {
    LaurentPoly f = P("3 - z1 - z2");
    SummableArray w = fundamental_homoclinic(f, 32);
    CHECK(std::abs(w.at({0, 0}) - 1.0 / 3) < 1e-12);
    CHECK(std::abs(w.at({1, 0}) - 1.0 / 9) < 1e-12);
    CHECK(std::abs(w.at({1, 1}) - 2.0 / 27) < 1e-12);
    double worst = 0;
    for (long a = -32; a <= 32; ++a)
        for (long b = -32; b <= 32; ++b) worst = std::max(worst, std::abs(w.at({a, b}) - series(a, b)));
    CHECK(worst < 1e-10);
    CHECK(verify_homoclinic(f, w) < 1e-8);
    CHECK(std::abs(w.l1_norm() - 1.0) < 1e-6);
    CHECK(w.tail_bound > 0);
    CHECK(w.decay_ratio < 1);
}

TEST_CASE("univariate and constant cases") {
    SummableArray w = fundamental_homoclinic(P("z - 2"), 40);
    for (long k = 0; k < 20; ++k) CHECK(std::abs(w.at({k}) + std::pow(2.0, -k - 1)) < 1e-12);
    for (long k = 1; k < 20; ++k) CHECK(std::abs(w.at({-k})) < 1e-12);
    CHECK(verify_homoclinic(P("z - 2"), w) < 1e-8);

    SummableArray c = fundamental_homoclinic(P("2"), 4);
    CHECK(std::abs(c.at({0}) - 0.5) < 1e-15);
    CHECK(c.tail_bound == 0.0);
    CHECK(std::abs(c.l1_norm() - 0.5) < 1e-14);
}

TEST_CASE("residual examples") {
    LaurentPoly f = P("3 - z1 - z2");
    SummableArray w = fundamental_homoclinic(f, 16);
    SummableArray zero = w;
    std::fill(zero.values.begin(), zero.values.end(), 0.0);
    CHECK(verify_homoclinic(f, zero) == doctest::Approx(1.0));
    SummableArray bumped = w;
    bumped.values[bumped.flat({2, 3})] += 1e-3;
    CHECK(verify_homoclinic(f, bumped) >= 1e-4);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(fundamental_homoclinic(P("1 - z1", 2), 8), PreconditionError);
    CHECK_THROWS_AS(fundamental_homoclinic(P("z - 2"), 8, 16), PreconditionError);
    CHECK_THROWS_AS(fundamental_homoclinic(P("1 + z1 + z2 + z3 + z4 + z5 + 7*z6"), 32), PreconditionError);
}

TEST_CASE("gap radius examples") {
    LaurentPoly f = P("3 - z1 - z2");
    SummableArray w = fundamental_homoclinic(f, 32);
    CHECK(gap_radius(f, w, 2) == 8);
    CHECK(gap_radius(f, w, 1) == 6);
    // mass on ||n||_1 >= R is (2/3)^R exactly
    for (long R = 1; R < 20; ++R) CHECK(std::abs(l1_tail(w, R) - std::pow(2.0 / 3, R)) < 1e-8);
    for (int H : {1, 2, 4, 8, 16}) {
        const double predicted = std::log(2.0 * H * 5) / std::log(1.5);
        CHECK(std::abs(static_cast<double>(gap_radius(f, w, H)) - predicted) <= 1.0);
    }
    SummableArray small = fundamental_homoclinic(f, 8, 64);
    CHECK_THROWS_AS(gap_radius(f, small, 16), PreconditionError);
}

TEST_CASE("doubling the box") {
    LaurentPoly f = P("3 - z1 - z2");
    SummableArray a = fundamental_homoclinic(f, 16), b = fundamental_homoclinic(f, 32);
    CHECK(b.tail_bound < a.tail_bound);
    CHECK(verify_homoclinic(f, b) <= verify_homoclinic(f, a) + 1e-15);
    CHECK(gap_radius(f, b, 2) <= gap_radius(f, a, 2));
}

TEST_CASE("one-sided support") {
    for (const char* fs : {"3 - z1 - z2", "4 - z1 - z2 - z3"}) {
        LaurentPoly f = P(fs);
        SummableArray w = fundamental_homoclinic(f, f.dim() == 2 ? 24 : 10);
        double outside = 0;
        for (std::size_t i = 0; i < w.values.size(); ++i) {
            Exponent n = w.index(i);
            if (*std::min_element(n.begin(), n.end()) < 0) outside = std::max(outside, std::abs(w.values[i]));
        }
        CHECK(outside < 1e-10);
    }
}

TEST_CASE("gap check on constructed multiples") {
    LaurentPoly f = P("3 - z1 - z2");
    std::vector<Exponent> S, S2;
    LaurentPoly phi = P("1 + z1^60*z2^60");
    LaurentPoly v = mul(phi, f);
    for (const auto& [e, c] : v.terms()) (e[0] < 30 ? S : S2).push_back(e);
    CHECK(gap_check(f, phi, S, S2, 48));
    CHECK_THROWS_AS(gap_check(f, phi, S, S2, 200), PreconditionError);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        LaurentPoly a = testing::random_poly(rng, 2, 3, 2, 1), b = testing::random_poly(rng, 2, 3, 2, 1);
        if (a.is_zero() || b.is_zero()) continue;
        LaurentPoly ph = a + b.shifted({70, 0});
        LaurentPoly vv = mul(ph, f);
        std::vector<Exponent> A, B;
        for (const auto& [e, c] : vv.terms()) (e[0] < 35 ? A : B).push_back(e);
        CHECK(gap_check(f, ph, A, B, 48));
    }
}

TEST_CASE("serialization") {
    SummableArray w = fundamental_homoclinic(P("z - 2"), 8);
    nlohmann::json j = to_json(w);
    CHECK(j["schema"] == 1);
    SummableArray back = summable_from_json(j);
    CHECK(back.values == w.values);
    CHECK(back.tail_bound == w.tail_bound);
    std::string csv = to_csv(w);
    CHECK(csv.rfind("n1,value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 18);
}

}  // TEST_SUITE
