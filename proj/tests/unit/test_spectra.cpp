#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bohr/error.hpp"
#include "bohr/spectra.hpp"
#include "helpers.hpp"

using namespace bohr;
using testing::P;

namespace {

bool has_root(const RootData& r, std::complex<double> z, double tol) {
    for (auto x : r.roots)
        if (std::abs(x - z) < tol) return true;
    return false;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("complex roots examples") {
    RootData r = complex_roots(P("z - 2"));
    REQUIRE(r.roots.size() == 1);
    CHECK(r.roots[0].real() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.rho == doctest::Approx(2.0));

    const double phi = (1 + std::sqrt(5.0)) / 2;
    r = complex_roots(P("z^2 - z - 1"));
    CHECK(r.certified);
    CHECK(has_root(r, phi, 1e-12));
    CHECK(has_root(r, 1 - phi, 1e-12));
    CHECK(std::abs(r.rho - phi) < 1e-12);

    r = complex_roots(P("5*z^2 - 6*z + 5"));
    CHECK(has_root(r, {0.6, 0.8}, 1e-12));
    CHECK(has_root(r, {0.6, -0.8}, 1e-12));
    for (auto z : r.roots) CHECK(std::abs(std::abs(z) - 1) < 1e-9);
    CHECK(r.leading_coeff == 5);

    CHECK_THROWS_AS(complex_roots(P("7*z^3")), PreconditionError);
}

TEST_CASE("roots of products of units are exact enough") {
    RootData r = complex_roots(mul(P("z^-3"), cyclotomic(21)));
    CHECK(r.roots.size() == 12);
    CHECK(r.certified);
    for (auto z : r.roots) CHECK(std::abs(std::abs(z) - 1) < 1e-9);
}

TEST_CASE("mahler measure examples") {
    CHECK(mahler_measure(P("2"), MahlerMethod::jensen).value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    MahlerResult q = mahler_measure(P("2"), MahlerMethod::quadrature, 8);
    CHECK(std::abs(q.value - std::log(2.0)) < 1e-14);

    MahlerResult j = mahler_measure(P("5*z^2 - 6*z + 5"), MahlerMethod::jensen);
    CHECK(std::abs(j.value - std::log(5.0)) < 1e-9);
    j = mahler_measure(P("z^2 - z - 1"), MahlerMethod::jensen);
    CHECK(std::abs(j.value - std::log((1 + std::sqrt(5.0)) / 2)) < 1e-12);

    q = mahler_measure(P("z^2 - z - 1"), MahlerMethod::quadrature, 4096);
    CHECK(std::abs(q.value - j.value) < 1e-3);
    CHECK(q.reliable);
    CHECK(q.refinement_delta < 1e-3);
}

TEST_CASE("mahler quadrature in two variables") {
    MahlerResult a = mahler_measure(P("3 - z1 - z2"), MahlerMethod::quadrature, 64);
    MahlerResult b = mahler_measure(P("3 - z1 - z2"), MahlerMethod::quadrature, 256);
    CHECK(std::abs(a.value - b.value) < 1e-8);
    CHECK(a.value > 0);
    CHECK(a.value < std::log(3.0));
    CHECK_THROWS_AS(mahler_measure(P("3 - z1 - z2"), MahlerMethod::jensen), PreconditionError);
    CHECK_THROWS_AS(mahler_measure(P("z - 3"), MahlerMethod::quadrature, 4), PreconditionError);
}

TEST_CASE("quadrature flags zeros on the torus") {
    MahlerResult q = mahler_measure(P("z - 1"), MahlerMethod::quadrature, 64);
    // midpoint product is exactly 2, so the rule gives log(2)/N
    CHECK(std::abs(q.value - std::log(2.0) / 64) < 1e-12);
    MahlerResult z = mahler_measure(P("z1 - z2"), MahlerMethod::quadrature, 16);
    CHECK_FALSE(z.reliable);
}

TEST_CASE("newton polygon and padic escape") {
    auto seg = newton_polygon(P("5*z^2 - 6*z + 5"), 5);
    REQUIRE(seg.size() == 2);
    CHECK(seg[0].from == 0);
    CHECK(seg[0].to == 1);
    CHECK(seg[0].slope == -1);
    CHECK(seg[1].slope == 1);

    auto e = padic_escape(P("5*z^2 - 6*z + 5"));
    REQUIRE(e);
    CHECK(e->prime == 5);
    CHECK(e->slope == 1);
    CHECK(e->escape_modulus == doctest::Approx(5.0));

    CHECK_FALSE(padic_escape(P("z^2 - z - 1")));

    e = padic_escape(P("2*z - 3"));
    REQUIRE(e);
    CHECK(e->prime == 2);
    CHECK(e->slope == 1);
    CHECK(e->escape_modulus == doctest::Approx(2.0));

    CHECK_THROWS_AS(padic_escape(P("4*z - 6")), PreconditionError);
}

TEST_CASE("newton polygon with fractional slope") {
    CHECK_THROWS(padic_escape(P("9*z^2 + 3")));  // content 3
    auto e = padic_escape(P("9*z^2 + 1"));
    REQUIRE(e);
    CHECK(e->prime == 3);
    CHECK(e->slope == 1);
    e = padic_escape(P("8*z^3 + 2*z + 1"));
    REQUIRE(e);
    CHECK(e->prime == 2);
    CHECK(e->slope == 1);
    e = padic_escape(P("4*z^3 + 2*z^2+ 1"));
    REQUIRE(e);
    CHECK(e->slope == mpq_class(1, 2));
    e = padic_escape(P("8*z^2 + 1"));
    REQUIRE(e);
    CHECK(e->slope == mpq_class(3, 2));
    CHECK(e->escape_modulus == doctest::Approx(std::pow(2.0, 1.5)));
}

TEST_CASE("prime factors") {
    CHECK(prime_factors(Integer(360)) == std::vector<unsigned long>{2, 3, 5});
    CHECK(prime_factors(Integer(-97)) == std::vector<unsigned long>{97});
    CHECK(prime_factors(Integer(1)).empty());
    CHECK(valuation(Integer(48), 2) == 4);
}

TEST_CASE("expansivity examples") {
    auto c = expansivity_check(P("3 - z1 - z2"), 64);
    REQUIRE(c);
    CHECK(c->grid_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c->margin > 0);

    for (int N : {16, 64, 256}) CHECK_FALSE(expansivity_check(P("1 - z1", 2), N));
    CHECK_FALSE(certify_expansive(P("1 - z1", 2)));

    c = expansivity_check(P("z - 2"), 16);
    REQUIRE(c);
    CHECK(c->grid_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(expansivity_check(P("z - 2"), 8), PreconditionError);
    CHECK(certify_expansive(P("z^2 - z - 1")));
    CHECK_FALSE(certify_expansive(P("5*z^2 - 6*z + 5")));
}

TEST_CASE("torus values layout") {
    auto v = torus_values(P("z1 + 2*z2"), 4, false);
    REQUIRE(v.size() == 16);
    // node (j1, j2) = (0, 1): z1 = 1, z2 = i
    CHECK(std::abs(v[1] - std::complex<double>(1, 2)) < 1e-14);
    CHECK(std::abs(v[4] - std::complex<double>(2, 1)) < 1e-14);
}

}  // TEST_SUITE
