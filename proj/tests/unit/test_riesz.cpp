#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bohr/error.hpp"
#include "bohr/riesz.hpp"
#include "helpers.hpp"

using namespace bohr;
using testing::P;

namespace {

// exp(2 pi i <h, x>) for a character h with nonnegative exponents (d = 1).
std::complex<double> char_value(const LaurentPoly& h, const std::vector<std::uint64_t>& orbit) {
    std::uint64_t acc = 0;
    for (const auto& [e, c] : h.terms()) acc += static_cast<std::uint64_t>(c.get_si()) * orbit[static_cast<std::size_t>(e[0])];
    return character(acc);
}

std::complex<double> empirical(const LaurentPoly& h, const ToralModel& model, const std::vector<TorusPoint>& xs, long len) {
    std::complex<double> s = 0;
    for (const auto& x : xs) s += char_value(h, model.orbit(x, len));
    return s / static_cast<double>(xs.size());
}

}  // namespace

TEST_SUITE("riesz") {

TEST_CASE("spec construction") {
    RieszSpec s = make_riesz_spec(P("z^2 - z - 1"), 4, 3);
    CHECK(s.size() == 4);
    CHECK(s.character(3) == Exponent{12});
    CHECK(s.coeffs.size() == 4);
    RieszSpec s2 = make_riesz_spec(P("z1^2 - z1 - 1", 2), 2, 1);
    CHECK(s2.size() == 4);
    CHECK_THROWS_AS(make_riesz_spec(P("z - 2"), 1, 1, {2.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(make_riesz_spec(P("z - 2"), 1, 1, {1.0}), DimensionMismatch);
    MGoodCertificate c = certify_archimedean(P("z^2 - z - 1"));
    CHECK_THROWS_AS(make_riesz_spec(P("z^2 - z - 1"), 3, 2, {}, c), PreconditionError);
    CHECK(make_riesz_spec(P("z^2 - z - 1"), 4, 2, {}, c).certificate.has_value());
}

TEST_CASE("dissociation examples") {
    DissociationTable t = dissociate_expand(make_riesz_spec(P("z^2 - z - 1"), 4, 3));
    CHECK(t.size() == 81);
    CHECK(t.pattern(0) == EpsilonPattern{0, 0, 0, 0});
    CHECK(t.pattern(80) == EpsilonPattern{-1, -1, -1, -1});
    CHECK(t.representative(5) == P("z^8 - z^12"));

    try {
        dissociate_expand(make_riesz_spec(P("z - 2"), 1, 1));
        FAIL("expected a collision");
    } catch (const DissociationFailure& e) {
        CHECK(e.first() == EpsilonPattern{1, 0});
        CHECK(e.second() == EpsilonPattern{-1, 1});
        CHECK(divides(P("z - 2"), e.difference()));
    }

    DissociationTable single = dissociate_expand(make_riesz_spec(P("z^2 - z - 1"), 4, 0));
    CHECK(single.size() == 3);
    CHECK_THROWS_AS(dissociate_expand(make_riesz_spec(P("z^2 - z - 1"), 4, 13)), PreconditionError);
}

TEST_CASE("dissociation at the largest table") {
    DissociationTable t = dissociate_expand(make_riesz_spec(P("z^2 - z - 1"), 4, 12));
    CHECK(t.size() == 1594323);
}

TEST_CASE("fourier coefficient examples") {
    const std::complex<double> a0(0.6, 0.8), a1(0.0, 1.0), a2(-1.0, 0.0);
    RieszSpec s = make_riesz_spec(P("z^2 - z - 1"), 4, 2, {a0, a1, a2});
    CHECK(std::abs(riesz_fourier_coeff(s, LaurentPoly(1)) - 1.0) < 1e-15);
    CHECK(std::abs(riesz_fourier_coeff(s, P("z^4")) - a1 / 2.0) < 1e-15);
    CHECK(std::abs(riesz_fourier_coeff(s, P("z^4 + z^8")) - a1 * a2 / 4.0) < 1e-15);
    CHECK(std::abs(riesz_fourier_coeff(s, P("-z^4")) - std::conj(a1) / 2.0) < 1e-15);
    CHECK(riesz_fourier_coeff(s, P("2*z^4")) == std::complex<double>(0.0));
    // congruent representative: z^4 + f * z^3 lies in the class of z^4
    CHECK(std::abs(riesz_fourier_coeff(s, P("z^4") + mul(P("z^2 - z - 1"), P("z^3 - 2"))) - a1 / 2.0) < 1e-15);
}

TEST_CASE("expansion matches coefficients") {
    const LaurentPoly f = P("z^2 - z - 1");
    const std::vector<std::complex<double>> a = {{0.6, 0.8}, {1, 0}, {-0.28, 0.96}, {0, -1}};
    RieszSpec s = make_riesz_spec(f, 4, 3, a);
    DissociationTable t = dissociate_expand(s);
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::complex<double> grouped = 0;
        for (std::size_t j = 0; j < t.size(); ++j)
            if (divides(f, t.representative(i) - t.representative(j))) grouped += pattern_coefficient(s, t.pattern(j));
        CHECK(std::abs(riesz_fourier_coeff(s, t.representative(i)) - grouped) < 1e-12);
    }
}

TEST_CASE("weights to coefficients") {
    auto a = weights_to_coeffs(WeightSeq::custom({1.0, 0.0, 0.0, 0.0, -1.0, 0, 0, 0, {0, 1}, 0, 0, 0, 0.0}), 4,
                               {{0}, {1}, {2}, {3}});
    CHECK(std::abs(a[0] - 1.0) < 1e-15);
    CHECK(std::abs(a[1] + 1.0) < 1e-15);
    CHECK(std::abs(a[2] - std::complex<double>(0, -1)) < 1e-15);
    CHECK(a[3] == std::complex<double>(1.0));
    for (auto v : weights_to_coeffs(weight(WeightKind::constant, 0, 1), 3, {{0}, {1}})) CHECK(v == std::complex<double>(1.0));
}

TEST_CASE("truncated density") {
    const LaurentPoly f = P("z^2 - z - 1");
    ToralModel model(f);
    RieszSpec s = make_riesz_spec(f, 4, 3);
    CHECK(truncated_density(s, model, TorusPoint::from_reals({0, 0})) == doctest::Approx(16.0));
    CHECK(truncated_density(s, model, TorusPoint::from_reals({0.5, 0.25})) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(truncated_density(s, ToralModel(P("z^2 - z + 1")), TorusPoint::from_reals({0, 0})),
                    PreconditionError);

    RieszSpec one = make_riesz_spec(f, 4, 1, {{0.6, 0.8}, {0, 1}});
    const int G = 128;
    double total = 0;
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j)
            total += truncated_density(one, model, TorusPoint::from_reals({(i + 0.5) / G, (j + 0.5) / G}));
    CHECK(std::abs(total / (G * G) - 1.0) < 1e-3);
}

TEST_CASE("sampler targets") {
    const LaurentPoly f = P("z^2 - z - 1");
    ToralModel model(f);
    SampleOptions o;
    o.chains = 4;
    o.burn_in = 2000;
    o.steps = 200000;
    o.thin = 400;
    o.seed = 17;
    o.threads = 1;

    RieszSpec flat = make_riesz_spec(f, 4, 1, {0.0, 0.0});
    auto xs = sample(flat, model, o).pooled();
    const double K = static_cast<double>(xs.size());
    CHECK(K == 2000);
    {
        std::complex<double> m0 = 0;
        for (const auto& x : xs) m0 += character(x.coords[0]);
        CHECK(std::abs(m0 / K) < 3 / std::sqrt(K));
    }

    RieszSpec single = make_riesz_spec(f, 4, 0, {1.0});
    xs = sample(single, model, o).pooled();
    std::complex<double> m0 = 0;
    for (const auto& x : xs) m0 += character(x.coords[0]);
    CHECK(std::abs(m0 / K - 0.5) < 3 / std::sqrt(K));
}

TEST_CASE("sampler spectrum and orthogonality") {
    const LaurentPoly f = P("z^2 - z - 1");
    ToralModel model(f);
    RieszSpec s = make_riesz_spec(f, 4, 2, {{0.6, 0.8}, {0, 1}, {1, 0}});
    SampleOptions o;
    o.chains = 4;
    o.burn_in = 5000;
    o.steps = 400000;
    o.thin = 400;
    o.seed = 5;
    SampleResult r = sample(s, model, o);
    auto xs = r.pooled();
    const double K = static_cast<double>(xs.size());
    for (double acc : r.acceptance) CHECK(acc > 0.05);
    const char* chars[] = {"z^0", "z^4", "z^8", "-z^4", "z^4 + z^8", "z^0 - z^8", "z^0 + z^4 + z^8", "z", "z^4 - z^5", "2*z^4"};
    for (const char* h : chars) {
        LaurentPoly hp = P(h);
        std::complex<double> want = std::conj(riesz_fourier_coeff(s, hp));
        CAPTURE(h);
        CHECK(std::abs(empirical(hp, model, xs, 13) - want) < 5 / std::sqrt(K));
    }
    for (long k = 1; k < 4; ++k)
        for (long n = 0; n <= 2; ++n)
            for (long n2 = 0; n2 <= 2; ++n2) {
                if (n == n2) continue;
                LaurentPoly h = LaurentPoly::monomial({4 * n + k}) - LaurentPoly::monomial({4 * n2 + k});
                CHECK(std::abs(empirical(h, model, xs, 13)) < 5 / std::sqrt(K));
            }
}

TEST_CASE("sampler determinism and output") {
    const LaurentPoly f = P("z^2 - z - 1");
    ToralModel model(f);
    RieszSpec s = make_riesz_spec(f, 4, 3);
    SampleOptions o;
    o.chains = 3;
    o.burn_in = 100;
    o.steps = 500;
    o.thin = 5;
    o.seed = 99;
    o.threads = 1;
    SampleResult a = sample(s, model, o);
    o.threads = 3;
    SampleResult b = sample(s, model, o);
    for (std::size_t c = 0; c < 3; ++c) {
        REQUIRE(a.chains[c].size() == 100);
        for (std::size_t i = 0; i < 100; ++i) CHECK(a.chains[c][i].coords == b.chains[c][i].coords);
    }
    CHECK(samples_to_csv(a, o) == samples_to_csv(b, o));
    CHECK(samples_to_csv(a, o).rfind("chain,step,x0,x1\n0,104,", 0) == 0);
    nlohmann::json j = to_json(s);
    CHECK(j["kind"] == "riesz_spec");
    CHECK(j["coeffs"].size() == 4);
}

}  // TEST_SUITE
