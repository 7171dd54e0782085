#include <doctest.h>

#include <cmath>
#include <random>

#include "bohr/error.hpp"
#include "bohr/mgood.hpp"
#include "helpers.hpp"

using namespace bohr;
using testing::P;

namespace {

// Direct enumeration of lacunary polynomials for d = 1, highest power most
// significant, symbols ordered as in `alphabet`.
std::optional<LaurentPoly> naive_first(const LaurentPoly& f, std::vector<long> powers, const std::vector<int>& alphabet) {
    std::sort(powers.rbegin(), powers.rend());
    std::vector<std::size_t> digit(powers.size(), 0);
    while (true) {
        std::size_t q = powers.size();
        while (q > 0 && digit[q - 1] + 1 == alphabet.size()) digit[--q] = 0;
        if (q == 0) return std::nullopt;
        ++digit[q - 1];
        LaurentPoly p(1);
        for (std::size_t i = 0; i < powers.size(); ++i) p.add_term({powers[i]}, alphabet[digit[i]]);
        if (!p.is_zero() && divides(f, p)) return p;
    }
}

}  // namespace

TEST_SUITE("mgood") {

TEST_CASE("archimedean examples") {
    MGoodCertificate c = certify_archimedean(P("z - 2"));
    CHECK(c.m == 3);
    CHECK(c.route == Route::archimedean);
    CHECK_FALSE(archimedean_holds(2.0 * (1 - 1e-9), 2));

    c = certify_archimedean(P("z^2 - z - 1"));
    CHECK(c.m == 4);
    const auto& p = std::get<ArchimedeanParams>(c.params);
    CHECK(std::abs(p.rho - (1 + std::sqrt(5.0)) / 2) < 1e-12);
    CHECK(p.margin_c1 > 0);
    REQUIRE(p.margin_case1);
    CHECK(*p.margin_case1 > 0);

    c = certify_archimedean(P("z - 10"));
    CHECK(c.m == 1);
    CHECK_FALSE(std::get<ArchimedeanParams>(c.params).margin_case1);

    CHECK_THROWS_AS(certify_archimedean(P("5*z^2 - 6*z + 5")), RouteInapplicable);
    CHECK_THROWS_AS(certify_archimedean(P("z^2 - z + 1")), RouteInapplicable);
}

TEST_CASE("archimedean monotone in m") {
    for (double R : {1.05, 1.3, (1 + std::sqrt(5.0)) / 2, 2.0, 3.7}) {
        long first = 0;
        for (long m = 1; m <= 120; ++m) {
            bool ok = archimedean_holds(R, m);
            if (ok && !first) first = m;
            if (first) CHECK(ok);
        }
        CHECK(first > 0);
    }
}

TEST_CASE("padic examples") {
    auto c = certify_padic(P("5*z^2 - 6*z + 5"));
    REQUIRE(c);
    CHECK(c->m == 2);
    CHECK(std::get<PadicParams>(c->params).prime == 5);
    CHECK(std::get<PadicParams>(c->params).escape_modulus == doctest::Approx(5.0));

    c = certify_padic(P("2*z - 3"));
    REQUIRE(c);
    CHECK(c->m == 2);
    CHECK(std::get<PadicParams>(c->params).prime == 2);

    CHECK_FALSE(certify_padic(P("z^2 - z - 1")));

    // only the constant term carries the prime: handled through the involution
    c = certify_padic(P("z - 3"));
    REQUIRE(c);
    CHECK(std::get<PadicParams>(c->params).involuted);
    CHECK(c->m == 2);
}

TEST_CASE("falsify examples") {
    auto ce = falsify(P("z - 2"), 1, 1, Condition::C1);
    REQUIRE(ce);
    CHECK((ce->witness == P("2 - z") || ce->witness == P("z - 2")));
    CHECK(mul(ce->quotient, P("z - 2")) == ce->witness);

    ce = falsify(P("z^2 - z - 1"), 1, 2, Condition::C1);
    REQUIRE(ce);
    CHECK(ce->witness == P("z^2 - z - 1"));
    CHECK(ce->quotient == P("1"));

    CHECK_FALSE(falsify(P("z^2 - z - 1"), 4, 4, Condition::C1));
    CHECK_FALSE(falsify(P("z^2 - z - 1"), 4, 3, Condition::C2));
    CHECK_FALSE(falsify(P("z^2 - z - 1"), 1, 6, Condition::C2));  // vacuous at m = 1
    CHECK_THROWS_AS(falsify(P("z - 2"), 4, 200, Condition::C1), PreconditionError);
}

TEST_CASE("falsify agrees with naive enumeration for C1") {
    const std::vector<const char*> polys = {"z - 2", "z + 2", "z^2 - z - 1", "2*z - 3", "z^2 + z + 1", "z^3 - 2", "z^2 - 2", "3*z + 1"};
    for (const char* fs : polys) {
        LaurentPoly f = P(fs);
        for (long m = 1; m <= 3; ++m)
            for (long D = 0; D <= 4; ++D) {
                std::vector<long> powers;
                for (long j = 0; j <= D; ++j) powers.push_back(m * j);
                auto want = naive_first(f, powers, {0, 1, -1, 2, -2});
                auto got = falsify(f, m, D, Condition::C1);
                CAPTURE(fs);
                CAPTURE(m);
                CAPTURE(D);
                REQUIRE(got.has_value() == want.has_value());
                if (got) {
                    CHECK(got->witness == *want);
                    CHECK(is_lacunary(got->witness, m, D, Condition::C1, {}));
                }
            }
    }
}

TEST_CASE("falsify agrees with naive enumeration for C2") {
    const std::vector<const char*> polys = {"z - 2", "z + 1", "z^2 - z - 1", "z^2 + 1", "z - 3"};
    for (const char* fs : polys) {
        LaurentPoly f = P(fs);
        for (long m = 2; m <= 3; ++m)
            for (long D = 0; D <= 2; ++D) {
                std::optional<LaurentPoly> want;
                long want_k = 0;
                for (long k = 1; k < m && !want; ++k) {
                    std::vector<long> powers;
                    for (long j = 0; j <= D; ++j) {
                        powers.push_back(m * j);
                        powers.push_back(m * j + k);
                    }
                    want = naive_first(f, powers, {0, 1, -1});
                    want_k = k;
                }
                auto got = falsify(f, m, D, Condition::C2);
                CAPTURE(fs);
                CAPTURE(m);
                CAPTURE(D);
                REQUIRE(got.has_value() == want.has_value());
                if (got) {
                    CHECK(got->witness == *want);
                    CHECK(got->shift == Exponent{want_k});
                    CHECK(mul(got->quotient, f) == got->witness);
                }
            }
    }
}

TEST_CASE("falsify in two variables") {
    // f = 1 + z1 divides 1 - z1^2 (C1, m = 1) and nothing lacunary at m = 2 with a D = 1 box
    auto ce = falsify(P("1 + z1", 2), 1, 1, Condition::C1);
    REQUIRE(ce);
    CHECK(mul(ce->quotient, P("1 + z1", 2)) == ce->witness);
    CHECK(is_lacunary(ce->witness, 1, 1, Condition::C1, {}));

    ce = falsify(P("z1 - z2"), 2, 1, Condition::C2);
    REQUIRE(ce);
    CHECK(mul(ce->quotient, P("z1 - z2")) == ce->witness);
    CHECK(is_lacunary(ce->witness, 2, 1, Condition::C2, ce->shift));

    CHECK_FALSE(falsify(P("3 - z1 - z2"), 3, 1, Condition::C1));
}

TEST_CASE("gap certificate for 3 - z1 - z2") {
    LaurentPoly f = P("3 - z1 - z2");
    SummableArray w = fundamental_homoclinic(f, 32);
    MGoodCertificate c = certify_gap(f, w, 2, true);
    const auto& g = std::get<GapParams>(c.params);
    REQUIRE(g.radii.size() == 3);
    CHECK(g.radii[0].R == 8);
    CHECK(g.radii[2].R == 6);
    CHECK(c.m == 48);
    CHECK_THROWS_AS(certify_gap(f, w, 2, false), PreconditionError);
    CHECK_THROWS_AS(certify_gap(P("2", 2), w, 2, true), PreconditionError);
}

TEST_CASE("univariate lift") {
    MGoodCertificate inner = certify_archimedean(P("z^2 - z - 1"));
    MGoodCertificate lifted = lift_univariate(inner, 2);
    CHECK(lifted.f == P("z1^2 - z1 - 1", 2));
    CHECK(lifted.m == 4);
    CHECK(lifted.route == Route::univariate_lift);
    CHECK_FALSE(falsify(lifted.f, lifted.m, 1, Condition::C1));
    CHECK_FALSE(falsify(lifted.f, lifted.m, 1, Condition::C2));

    auto pc = certify_padic(P("5*z^2 - 6*z + 5"));
    REQUIRE(pc);
    MGoodCertificate l3 = lift_univariate(*pc, 3);
    CHECK(l3.m == 2);
    CHECK(l3.f.dim() == 3);

    CHECK_THROWS_AS(lift_univariate(inner, P("z2^2 - z2 - 1", 2)), PreconditionError);
    CHECK_NOTHROW(lift_univariate(inner, P("z1^2 - z1 - 1", 2)));
}

TEST_CASE("certificate json round trip and verification") {
    MGoodCertificate c = certify_archimedean(P("z^2 - z - 1"));
    CHECK_FALSE(confirm_horizon(c, 3));
    CHECK(c.checked_horizon == 3);
    nlohmann::json j = to_json(c);
    CHECK(j["schema"] == 1);
    CHECK(j["route"] == "archimedean");
    MGoodCertificate back = certificate_from_json(j);
    CHECK(back.f == c.f);
    CHECK(back.m == 4);
    VerificationReport rep = verify_certificate(j);
    CHECK(rep.valid);
    CHECK_FALSE(rep.checks.empty());

    nlohmann::json bad = j;
    bad["m"] = 2;
    CHECK_FALSE(verify_certificate(bad).valid);
    bad = j;
    bad["params"]["rho"] = 1.2;
    CHECK_FALSE(verify_certificate(bad).valid);

    auto pc = certify_padic(P("5*z^2 - 6*z + 5"));
    REQUIRE(pc);
    CHECK(verify_certificate(to_json(*pc)).valid);
    nlohmann::json pj = to_json(*pc);
    pj["m"] = 1;
    CHECK_FALSE(verify_certificate(pj).valid);

    MGoodCertificate lifted = lift_univariate(c, 2);
    CHECK(verify_certificate(to_json(lifted)).valid);
    CHECK(certificate_from_json(to_json(lifted)).route == Route::univariate_lift);
}

TEST_CASE("gap certificate verifies") {
    LaurentPoly f = P("3 - z1 - z2");
    MGoodCertificate c = certify_gap(f, fundamental_homoclinic(f, 32), 2, true);
    nlohmann::json j = to_json(c);
    VerificationReport rep = verify_certificate(j);
    CHECK(rep.valid);
    j["m"] = 20;
    CHECK_FALSE(verify_certificate(j).valid);
}

TEST_CASE("counterexample json") {
    auto ce = falsify(P("z - 2"), 1, 1, Condition::C1);
    REQUIRE(ce);
    nlohmann::json j = to_json(*ce);
    CHECK(j["condition"] == "C1");
    CHECK(j.contains("witness"));
    CHECK(j.contains("quotient"));
}

}  // TEST_SUITE
