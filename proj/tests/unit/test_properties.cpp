#include <doctest.h>

#include <random>

#include "bohr/dynamics.hpp"
#include "bohr/riesz.hpp"
#include "bohr/spectra.hpp"
#include "helpers.hpp"

using namespace bohr;
using testing::P;
using testing::random_poly;

namespace {
constexpr int kCases = 1000;
}

TEST_SUITE("properties") {

TEST_CASE("ring axioms") {
    std::mt19937_64 rng(101);
    for (int t = 0; t < kCases; ++t) {
        const int d = 1 + t % 3;
        LaurentPoly a = random_poly(rng, d, 4, 3, 5), b = random_poly(rng, d, 4, 3, 5), c = random_poly(rng, d, 3, 3, 5);
        CHECK(mul(a, b) == mul(b, a));
        CHECK(mul(mul(a, b), c) == mul(a, mul(b, c)));
        CHECK(mul(a, b + c) == mul(a, b) + mul(a, c));
        CHECK(involute(mul(a, b)) == mul(involute(a), involute(b)));
        CHECK(involute(involute(a)) == a);
        CHECK((a - a).is_zero());
        if (!a.is_zero()) {
            CHECK(a.l1_norm() >= a.linf_norm());
            CHECK(a.linf_norm() >= 1);
        }
        CHECK(parse(render(a), d) == a);
        CHECK(poly_from_json(to_json(a)) == a);
    }
}

TEST_CASE("divides and mul round trip") {
    std::mt19937_64 rng(202);
    int negatives = 0;
    for (int t = 0; t < kCases; ++t) {
        const int d = 1 + t % 3;
        LaurentPoly f = random_poly(rng, d, 3, 2, 4), q = random_poly(rng, d, 4, 3, 6);
        if (f.is_zero()) continue;
        auto r = divides(f, mul(q, f));
        REQUIRE(r);
        CHECK(*r == q);
        LaurentPoly v = mul(q, f) + random_poly(rng, d, 1, 3, 3);
        if (auto s = divides(f, v)) CHECK(mul(*s, f) == v);
        else ++negatives;
    }
    CHECK(negatives > 100);
}

TEST_CASE("kronecker agrees with zero Mahler measure") {
    std::mt19937_64 rng(303);
    int zero = 0;
    for (int t = 0; t < kCases; ++t) {
        LaurentPoly f(1);
        if (t % 2 == 0) {
            f = LaurentPoly::monomial({static_cast<long>(rng() % 3)}, rng() % 2 ? 1 : -1);
            const int k = 1 + static_cast<int>(rng() % 3);
            for (int i = 0; i < k; ++i) f = mul(f, cyclotomic(1 + static_cast<unsigned>(rng() % 12)));
        } else {
            f = random_poly(rng, 1, 3, 3, 2);
            if (f.is_zero() || f.is_monomial()) continue;
        }
        auto k = kronecker_factor(f);
        if (k) {
            CHECK(k->reconstruct() == f);
            ++zero;
        }
        const bool unimodular = f.content() == 1 && mahler_measure(f, MahlerMethod::jensen).value < 1e-9;
        CHECK(k.has_value() == unimodular);
    }
    CHECK(zero >= kCases / 2);
}

TEST_CASE("membership residuals") {
    std::mt19937_64 rng(404);
    const char* polys[] = {"z^2 - z - 1", "z^2 - z + 1", "z^3 - z - 1", "-z^3 + 4*z^2 - 2*z + 1", "z^2 - 3*z + 1"};
    for (int t = 0; t < kCases; ++t) {
        ToralModel model(P(polys[t % 5]));
        CounterRng r(static_cast<std::uint64_t>(t), 9);
        TorusPoint x0 = TorusPoint::haar(model.torus_dim(), r);
        auto xs = model.orbit(x0, 64);
        for (long n = 0; n + model.degree() < 64; n += 7) CHECK(model.window_residual(xs, n) < 1e-10);
    }
}

TEST_CASE("split identity") {
    ToralModel model(P("z^2 - z - 1"));
    for (int t = 0; t < kCases; ++t) {
        CounterRng r(static_cast<std::uint64_t>(t), 10);
        TorusPoint x0 = TorusPoint::haar(2, r);
        const long m = 1 + t % 6, N = 50 + t % 200;
        SplitResult s = split_averages(model, x0, weight(WeightKind::bernoulli, static_cast<std::uint64_t>(t), 1), m, N);
        std::complex<double> sum = 0;
        for (auto b : s.buckets) sum += b;
        CHECK(std::abs(sum - s.total) * static_cast<double>(N) < 1e-10 * static_cast<double>(N));
    }
}

TEST_CASE("shift gap bound") {
    ToralModel model(P("z^2 - z - 1"));
    std::mt19937_64 rng(505);
    for (int t = 0; t < kCases; ++t) {
        const long k = static_cast<long>(rng() % 11), N = 1 + static_cast<long>(rng() % 2000);
        CounterRng r(static_cast<std::uint64_t>(t), 11);
        TorusPoint x0 = TorusPoint::haar(2, r);
        WeightSeq w = weight(WeightKind::bernoulli, rng(), 1);
        CHECK(shift_invariance_gap(model, x0, w, k, N) <= 2.0 * static_cast<double>(k) * w.bound());
    }
}

TEST_CASE("determinism under seed") {
    ToralModel model(P("z^2 - z - 1"));
    RieszSpec spec = make_riesz_spec(P("z^2 - z - 1"), 4, 2);
    for (int t = 0; t < kCases; ++t) {
        const std::uint64_t seed = static_cast<std::uint64_t>(t) * 7919;
        CounterRng a(seed, 3), b(seed, 3);
        for (int i = 0; i < 4; ++i) CHECK(a() == b());
        WeightSeq w1 = weight(WeightKind::bernoulli, seed, 1), w2 = weight(WeightKind::bernoulli, seed, 1);
        CHECK(w1.at(static_cast<long>(t)) == w2.at(static_cast<long>(t)));
        if (t % 50 == 0) {
            SampleOptions o;
            o.chains = 2;
            o.burn_in = 10;
            o.steps = 40;
            o.seed = seed;
            SampleResult x = sample(spec, model, o), y = sample(spec, model, o);
            for (std::size_t c = 0; c < 2; ++c)
                for (std::size_t i = 0; i < x.chains[c].size(); ++i) CHECK(x.chains[c][i].coords == y.chains[c][i].coords);
        }
    }
}

}  // TEST_SUITE
