#include "bohr/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "bohr/error.hpp"

namespace bohr {

namespace {

constexpr long double kTwo64 = 18446744073709551616.0L;

long to_long(const Integer& c) {
    if (!c.fits_slong_p()) throw PreconditionError("coefficient too large for the toral model");
    return c.get_si();
}

// Visits every lattice point of [0, N)^d in lex order with its coordinate.
template <class Visit>
void for_each_point(const ToralModel& model, const TorusPoint& x0, long N, Visit&& visit) {
    const int d = model.dim();
    if (d >= 2 && model.fiber_extent() < N)
        throw PreconditionError("fiber extent " + std::to_string(model.fiber_extent()) + " is smaller than N");
    Exponent tail(static_cast<std::size_t>(d - 1), 0);
    Exponent n(static_cast<std::size_t>(d), 0);
    while (true) {
        long fiber = 0;
        for (long t : tail) fiber = fiber * model.fiber_extent() + t;
        std::vector<std::uint64_t> xs = model.orbit(x0, N, fiber);
        for (int i = 1; i < d; ++i) n[static_cast<std::size_t>(i)] = tail[static_cast<std::size_t>(i - 1)];
        for (long j = 0; j < N; ++j) {
            n[0] = j;
            visit(n, xs[static_cast<std::size_t>(j)]);
        }
        int i = d - 2;
        while (i >= 0 && tail[static_cast<std::size_t>(i)] == N - 1) tail[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
        ++tail[static_cast<std::size_t>(i)];
    }
}

}  // namespace

double to_real(std::uint64_t u) { return static_cast<double>(static_cast<long double>(u) / kTwo64); }

std::uint64_t from_real(double x) {
    long double frac = static_cast<long double>(x) - std::floor(static_cast<long double>(x));
    long double scaled = std::round(frac * kTwo64);
    if (scaled >= kTwo64) return 0;
    return static_cast<std::uint64_t>(scaled);
}

std::complex<double> character(std::uint64_t u) {
    // signed reading keeps the angle in [-pi, pi)
    const double t = static_cast<double>(static_cast<std::int64_t>(u)) * 0x1.0p-64;
    return std::polar(1.0, 2 * std::numbers::pi * t);
}

TorusPoint TorusPoint::from_reals(const std::vector<double>& x) {
    TorusPoint p;
    p.coords.reserve(x.size());
    for (double v : x) p.coords.push_back(from_real(v));
    return p;
}

TorusPoint TorusPoint::haar(std::size_t dim, CounterRng& rng) {
    TorusPoint p;
    p.coords.resize(dim);
    for (auto& c : p.coords) c = rng();
    return p;
}

std::vector<double> TorusPoint::reals() const {
    std::vector<double> out;
    out.reserve(coords.size());
    for (auto c : coords) out.push_back(to_real(c));
    return out;
}

ToralModel::ToralModel(const LaurentPoly& f, int fiber_extent) : f_(f), fiber_extent_(std::max(1, fiber_extent)) {
    if (f.is_zero()) throw PreconditionError("toral model of the zero polynomial");
    LaurentPoly g = normalize_units(f);
    const int d = f.dim();
    if (d >= 2) {
        LaurentPoly inner(1);
        for (const auto& [e, c] : g.terms()) {
            for (int i = 1; i < d; ++i)
                if (e[static_cast<std::size_t>(i)] != 0)
                    throw PreconditionError("toral model needs f = g(z1) in several variables");
            inner.add_term({e[0]}, c);
        }
        g = inner;
        fibers_ = 1;
        for (int i = 1; i < d; ++i) fibers_ *= fiber_extent_;
    } else {
        fiber_extent_ = 1;
    }
    std::vector<Integer> dense = dense_coefficients(g);
    r_ = static_cast<int>(dense.size()) - 1;
    if (r_ < 1) throw PreconditionError("toral model needs a non-monomial polynomial");
    if (abs(dense.back()) != 1)
        throw PreconditionError("leading coefficient must be +1 or -1 for a toral model");
    const long lead = to_long(dense.back());
    for (const auto& c : dense) rel_.push_back(to_long(c));
    for (int j = 0; j < r_; ++j) rec_.push_back(-lead * rel_[static_cast<std::size_t>(j)]);
}

std::vector<std::uint64_t> ToralModel::orbit(const TorusPoint& x0, long length, long fiber) const {
    if (x0.coords.size() != torus_dim())
        throw DimensionMismatch("torus point has " + std::to_string(x0.coords.size()) + " coordinates, model needs " +
                                std::to_string(torus_dim()));
    if (fiber < 0 || fiber >= fibers_) throw PreconditionError("fiber index outside the model");
    const std::size_t r = static_cast<std::size_t>(r_);
    std::vector<std::uint64_t> xs(std::max<long>(length, static_cast<long>(r)));
    for (std::size_t j = 0; j < r; ++j) xs[j] = x0.coords[static_cast<std::size_t>(fiber) * r + j];
    for (std::size_t n = r; n < xs.size(); ++n) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < r; ++j) acc += static_cast<std::uint64_t>(rec_[j]) * xs[n - r + j];
        xs[n] = acc;
    }
    xs.resize(static_cast<std::size_t>(std::max<long>(length, 0)));
    return xs;
}

long ToralModel::fiber_index(const Exponent& n) const {
    if (static_cast<int>(n.size()) != dim()) throw DimensionMismatch("lattice point has the wrong dimension");
    if (n[0] < 0) throw PreconditionError("lattice point outside the forward cone of the model");
    long idx = 0;
    for (std::size_t i = 1; i < n.size(); ++i) {
        if (n[i] < 0 || n[i] >= fiber_extent_) throw PreconditionError("lattice point outside the forward cone of the model");
        idx = idx * fiber_extent_ + n[i];
    }
    return idx;
}

std::uint64_t ToralModel::coordinate(const TorusPoint& x0, const Exponent& n) const {
    const long fiber = fiber_index(n);
    return orbit(x0, n[0] + 1, fiber)[static_cast<std::size_t>(n[0])];
}

std::vector<std::uint64_t> ToralModel::companion_step(const std::vector<std::uint64_t>& window) const {
    if (window.size() != static_cast<std::size_t>(r_)) throw DimensionMismatch("window length differs from the degree");
    std::vector<std::vector<long>> A = companion_matrix();
    std::vector<std::uint64_t> out(window.size(), 0);
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < out.size(); ++j) out[i] += static_cast<std::uint64_t>(A[i][j]) * window[j];
    return out;
}

std::vector<std::vector<long>> ToralModel::companion_matrix() const {
    const std::size_t r = static_cast<std::size_t>(r_);
    std::vector<std::vector<long>> A(r, std::vector<long>(r, 0));
    for (std::size_t i = 0; i + 1 < r; ++i) A[i][i + 1] = 1;
    for (std::size_t j = 0; j < r; ++j) A[r - 1][j] = rec_[j];
    return A;
}

double ToralModel::window_residual(const std::vector<std::uint64_t>& orbit, long n) const {
    if (n < 0 || static_cast<std::size_t>(n + r_) >= orbit.size()) throw PreconditionError("window outside the orbit");
    long double s = 0;
    for (int j = 0; j <= r_; ++j)
        s += static_cast<long double>(rel_[static_cast<std::size_t>(j)]) *
             (static_cast<long double>(orbit[static_cast<std::size_t>(n + j)]) / kTwo64);
    return static_cast<double>(std::fabs(s - std::round(s)));
}

WeightKind weight_kind_from_string(const std::string& s) {
    if (s == "bernoulli") return WeightKind::bernoulli;
    if (s == "mobius") return WeightKind::mobius;
    if (s == "constant") return WeightKind::constant;
    if (s == "custom") return WeightKind::custom;
    throw PreconditionError("unknown weight kind '" + s + "'");
}

std::string to_string(WeightKind k) {
    switch (k) {
        case WeightKind::bernoulli: return "bernoulli";
        case WeightKind::mobius: return "mobius";
        case WeightKind::constant: return "constant";
        case WeightKind::custom: return "custom";
    }
    return "?";
}

std::vector<int> mobius_sieve(long N) {
    if (N < 0) throw PreconditionError("sieve bound must be nonnegative");
    std::vector<int> mu(static_cast<std::size_t>(N + 1), 0);
    if (N >= 1) mu[1] = 1;
    std::vector<char> composite(mu.size(), 0);
    std::vector<long> primes;
    for (long i = 2; i <= N; ++i) {
        if (!composite[static_cast<std::size_t>(i)]) {
            primes.push_back(i);
            mu[static_cast<std::size_t>(i)] = -1;
        }
        for (long p : primes) {
            if (i * p > N) break;
            composite[static_cast<std::size_t>(i * p)] = 1;
            if (i % p == 0) {
                mu[static_cast<std::size_t>(i * p)] = 0;
                break;
            }
            mu[static_cast<std::size_t>(i * p)] = -mu[static_cast<std::size_t>(i)];
        }
    }
    return mu;
}

WeightSeq WeightSeq::make(WeightKind kind, std::uint64_t seed, long N) {
    if (N < 1) throw PreconditionError("weight horizon must be at least 1");
    if (kind == WeightKind::custom) throw PreconditionError("custom weights need explicit values");
    WeightSeq w;
    w.kind_ = kind;
    w.seed_ = seed;
    w.horizon_ = N;
    if (kind == WeightKind::mobius) w.mobius_ = mobius_sieve(N);
    return w;
}

WeightSeq WeightSeq::custom(std::vector<std::complex<double>> values) {
    WeightSeq w;
    w.kind_ = WeightKind::custom;
    w.horizon_ = static_cast<long>(values.size());
    w.bound_ = 0.0;
    for (const auto& v : values) w.bound_ = std::max(w.bound_, std::abs(v));
    w.values_ = std::move(values);
    return w;
}

std::complex<double> WeightSeq::at(long n) const {
    if (n < 0) throw PreconditionError("weights are indexed by nonnegative integers");
    switch (kind_) {
        case WeightKind::bernoulli: return (CounterRng::at(seed_, 0xbe, static_cast<std::uint64_t>(n)) >> 63) ? 1.0 : -1.0;
        case WeightKind::mobius:
            if (n > horizon_) throw PreconditionError("index beyond the Mobius sieve horizon");
            return mobius_[static_cast<std::size_t>(n)];
        case WeightKind::constant: return 1.0;
        case WeightKind::custom:
            return static_cast<std::size_t>(n) < values_.size() ? values_[static_cast<std::size_t>(n)] : 0.0;
    }
    return 0.0;
}

std::complex<double> WeightSeq::at(const Exponent& n) const {
    if (n.size() == 1) return at(n[0]);
    switch (kind_) {
        case WeightKind::bernoulli: {
            std::uint64_t key = 0;
            for (long x : n) {
                if (x < 0) throw PreconditionError("weights are indexed by nonnegative lattice points");
                key = mix64(key ^ (static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL));
            }
            return (CounterRng::at(seed_, 0xbe + n.size(), key) >> 63) ? 1.0 : -1.0;
        }
        case WeightKind::mobius: {
            std::complex<double> v = 1.0;
            for (long x : n) v *= at(x);
            return v;
        }
        case WeightKind::constant: return 1.0;
        case WeightKind::custom: throw DimensionMismatch("custom weights are one-dimensional");
    }
    return 0.0;
}

WeightSeq weight(WeightKind kind, std::uint64_t seed, long N) { return WeightSeq::make(kind, seed, N); }

std::complex<double> weighted_average(const ToralModel& model, const TorusPoint& x0, const WeightSeq& w, long N) {
    if (N < 1) throw PreconditionError("N must be positive");
    std::vector<std::complex<double>> terms;
    for_each_point(model, x0, N, [&](const Exponent& n, std::uint64_t x) { terms.push_back(w.at(n) * character(x)); });
    return pairwise_sum(terms) / static_cast<double>(terms.size());
}

std::vector<std::complex<double>> running_averages(const ToralModel& model, const TorusPoint& x0, const WeightSeq& w,
                                                   long N) {
    if (model.dim() != 1) throw DimensionMismatch("running averages are one-dimensional");
    std::vector<std::uint64_t> xs = model.orbit(x0, N);
    std::vector<std::complex<double>> out(static_cast<std::size_t>(std::max<long>(N, 0)));
    std::complex<double> sum = 0.0, comp = 0.0;
    for (long n = 0; n < N; ++n) {
        // Neumaier step on both components
        std::complex<double> t = w.at(n) * character(xs[static_cast<std::size_t>(n)]);
        auto step = [](double& s, double& c, double v) {
            double u = s + v;
            c += std::fabs(s) >= std::fabs(v) ? (s - u) + v : (v - u) + s;
            s = u;
        };
        double sr = sum.real(), si = sum.imag(), cr = comp.real(), ci = comp.imag();
        step(sr, cr, t.real());
        step(si, ci, t.imag());
        sum = {sr, si};
        comp = {cr, ci};
        out[static_cast<std::size_t>(n)] = (sum + comp) / static_cast<double>(n + 1);
    }
    return out;
}

SplitResult split_averages(const ToralModel& model, const TorusPoint& x0, const WeightSeq& w, long m, long N) {
    if (m < 1) throw PreconditionError("m must be positive");
    if (N < 1) throw PreconditionError("N must be positive");
    const int d = model.dim();
    SplitResult out;
    std::size_t buckets = 1;
    for (int i = 0; i < d; ++i) buckets *= static_cast<std::size_t>(m);
    for (std::size_t b = 0; b < buckets; ++b) {
        Exponent k(static_cast<std::size_t>(d));
        std::size_t rest = b;
        for (int i = d - 1; i >= 0; --i) {
            k[static_cast<std::size_t>(i)] = static_cast<long>(rest % static_cast<std::size_t>(m));
            rest /= static_cast<std::size_t>(m);
        }
        out.residues.push_back(k);
    }
    std::vector<std::vector<std::complex<double>>> parts(buckets);
    std::vector<std::complex<double>> all;
    std::vector<double> ref;
    for_each_point(model, x0, N, [&](const Exponent& n, std::uint64_t x) {
        std::size_t b = 0;
        for (long v : n) b = b * static_cast<std::size_t>(m) + static_cast<std::size_t>(v % m);
        std::complex<double> wn = w.at(n);
        std::complex<double> t = wn * character(x);
        parts[b].push_back(t);
        all.push_back(t);
        if (b == 0) ref.push_back(std::abs(wn));
    });
    const double vol = static_cast<double>(all.size());
    for (auto& p : parts) out.buckets.push_back(pairwise_sum(p) / vol);
    out.total = pairwise_sum(all) / vol;
    out.reference = pairwise_sum(ref) / (2 * vol);
    return out;
}

std::complex<double> neumaier_sum(const std::vector<std::complex<double>>& terms) {
    double s[2] = {0, 0}, c[2] = {0, 0};
    for (const auto& t : terms) {
        const double v[2] = {t.real(), t.imag()};
        for (int i = 0; i < 2; ++i) {
            double u = s[i] + v[i];
            c[i] += std::fabs(s[i]) >= std::fabs(v[i]) ? (s[i] - u) + v[i] : (v[i] - u) + s[i];
            s[i] = u;
        }
    }
    return {s[0] + c[0], s[1] + c[1]};
}

double shift_invariance_gap(const ToralModel& model, const TorusPoint& x0, const WeightSeq& w, long k, long N) {
    if (model.dim() != 1) throw DimensionMismatch("shift invariance gap is defined for d = 1");
    if (k < 0) throw PreconditionError("shift must be nonnegative");
    if (N < 0) throw PreconditionError("N must be nonnegative");
    std::vector<std::uint64_t> xs = model.orbit(x0, N + k);
    std::vector<std::complex<double>> base, moved;
    base.reserve(static_cast<std::size_t>(N));
    moved.reserve(static_cast<std::size_t>(N));
    for (long n = 0; n < N; ++n) {
        base.push_back(w.at(n) * character(xs[static_cast<std::size_t>(n)]));
        moved.push_back(w.at(n + k) * character(xs[static_cast<std::size_t>(n + k)]));
    }
    return std::abs(neumaier_sum(base) - neumaier_sum(moved));
}

std::vector<double> ffq_partial_sums(const std::vector<std::vector<std::complex<double>>>& Z, long Nmax) {
    if (Z.size() < 100)
        throw PreconditionError("insufficient replicates: " + std::to_string(Z.size()) + " < 100");
    for (const auto& z : Z)
        if (static_cast<long>(z.size()) < Nmax) throw PreconditionError("replicate shorter than Nmax");
    std::vector<double> out;
    double acc = 0.0;
    for (long N = 1; N <= Nmax; ++N) {
        std::vector<double> sq;
        sq.reserve(Z.size());
        for (const auto& z : Z) sq.push_back(std::norm(z[static_cast<std::size_t>(N - 1)]));
        acc += pairwise_sum(sq) / static_cast<double>(Z.size()) / static_cast<double>(N);
        out.push_back(acc);
    }
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionMismatch("slope fit needs equal lengths");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0 && y[i] > 0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    if (lx.size() < 2) throw PreconditionError("slope fit needs two positive points");
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace bohr
