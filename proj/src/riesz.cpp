#include "bohr/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "bohr/lacunary.hpp"
#include "bohr/util.hpp"

namespace bohr {

namespace {

constexpr int kDigits[3] = {0, 1, -1};
constexpr std::size_t kMaxPoints = 13;

long extent_of(const std::vector<Exponent>& chars, const LaurentPoly* extra) {
    long e = 1;
    for (const auto& c : chars)
        for (long x : c) e = std::max(e, std::labs(x));
    if (extra)
        for (const auto& [x, c] : extra->terms())
            for (long v : x) e = std::max(e, std::labs(v));
    return e + 1;
}

void check_model(const RieszSpec& spec, const ToralModel& model) {
    if (spec.f.dim() != model.dim() || !(normalize_units(spec.f) == normalize_units(model.f())))
        throw PreconditionError("toral model realizes " + render(model.f()) + ", spec uses " + render(spec.f));
}

// Orbit coordinates at the characters m*n, one orbit per fiber touched.
std::vector<std::uint64_t> character_coords(const RieszSpec& spec, const ToralModel& model, const TorusPoint& x0) {
    std::map<long, long> reach;
    std::vector<long> fibers(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        Exponent c = spec.character(i);
        fibers[i] = model.fiber_index(c);
        long& r = reach[fibers[i]];
        r = std::max(r, c[0] + 1);
    }
    std::map<long, std::vector<std::uint64_t>> orbits;
    for (const auto& [fiber, len] : reach) orbits[fiber] = model.orbit(x0, len, fiber);
    std::vector<std::uint64_t> out(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i)
        out[i] = orbits[fibers[i]][static_cast<std::size_t>(spec.character(i)[0])];
    return out;
}

double density_at(const RieszSpec& spec, const std::vector<std::uint64_t>& xs) {
    double p = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) p *= 1.0 + (spec.coeffs[i] * character(xs[i])).real();
    return std::max(p, 0.0);
}

}  // namespace

std::string pattern_text(const EpsilonPattern& eps) {
    std::string s = "(";
    for (std::size_t i = 0; i < eps.size(); ++i) s += (i ? "," : "") + std::to_string(eps[i]);
    return s + ")";
}

Exponent RieszSpec::character(std::size_t i) const {
    Exponent e = points.at(i);
    for (long& x : e) x *= m;
    return e;
}

RieszSpec make_riesz_spec(const LaurentPoly& f, long m, int N, std::vector<std::complex<double>> coeffs,
                          std::optional<MGoodCertificate> certificate) {
    if (m < 1) throw PreconditionError("m must be positive");
    if (N < 0) throw PreconditionError("truncation order must be nonnegative");
    if (certificate) {
        if (!(certificate->f == f)) throw PreconditionError("certificate is for a different polynomial");
        if (certificate->m != m) throw PreconditionError("certificate is for m = " + std::to_string(certificate->m));
    }
    RieszSpec s;
    s.f = f;
    s.m = m;
    s.N = N;
    s.certificate = std::move(certificate);
    const int d = f.dim();
    Exponent n(static_cast<std::size_t>(d), 0);
    while (true) {
        s.points.push_back(n);
        int i = d - 1;
        while (i >= 0 && n[static_cast<std::size_t>(i)] == N) n[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
        ++n[static_cast<std::size_t>(i)];
    }
    if (coeffs.empty()) coeffs.assign(s.points.size(), 1.0);
    if (coeffs.size() != s.points.size())
        throw DimensionMismatch("expected " + std::to_string(s.points.size()) + " coefficients, got " +
                                std::to_string(coeffs.size()));
    for (const auto& a : coeffs)
        if (std::abs(a) > 1 + 1e-12) throw PreconditionError("Riesz coefficients must satisfy |a_n| <= 1");
    s.coeffs = std::move(coeffs);
    return s;
}

DissociationFailure::DissociationFailure(EpsilonPattern a, EpsilonPattern b, LaurentPoly difference)
    : Error("dissociation_failure", "patterns " + pattern_text(a) + " and " + pattern_text(b) +
                                        " are congruent mod f (difference " + render(difference) + ")"),
      a_(std::move(a)), b_(std::move(b)), diff_(std::move(difference)) {}

DissociationTable::DissociationTable(const RieszSpec& spec) : dim_(spec.f.dim()) {
    for (std::size_t i = 0; i < spec.size(); ++i) {
        chars_.push_back(spec.character(i));
        count_ *= 3;
    }
}

EpsilonPattern DissociationTable::pattern(std::size_t i) const {
    if (i >= count_) throw PreconditionError("pattern index out of range");
    EpsilonPattern eps(chars_.size());
    for (std::size_t q = chars_.size(); q-- > 0;) {
        eps[q] = kDigits[i % 3];
        i /= 3;
    }
    return eps;
}

LaurentPoly DissociationTable::representative(std::size_t i) const {
    EpsilonPattern eps = pattern(i);
    LaurentPoly h(dim_);
    for (std::size_t q = 0; q < eps.size(); ++q)
        if (eps[q]) h.add_term(chars_[q], eps[q]);
    return h;
}

DissociationTable dissociate_expand(const RieszSpec& spec, int threads) {
    if (spec.size() > kMaxPoints)
        throw PreconditionError("pattern table limited to " + std::to_string(kMaxPoints) + " characters");
    DissociationTable table(spec);
    const std::size_t K = spec.size(), count = table.size();
    Fingerprint fp(spec.f, extent_of(table.characters(), nullptr));

    std::vector<std::uint64_t> ch(K);
    for (std::size_t q = 0; q < K; ++q) ch[q] = fp.monomial(table.characters()[q]);
    struct Entry {
        std::uint64_t hash;
        std::uint32_t index;
        bool operator<(const Entry& o) const { return hash != o.hash ? hash < o.hash : index < o.index; }
    };
    std::vector<Entry> entries(count);
    std::vector<int> digit(K, 0);
    std::uint64_t hash = 0;
    for (std::size_t s = 0; s < count; ++s) {
        entries[s] = {hash, static_cast<std::uint32_t>(s)};
        for (std::size_t q = K; q-- > 0;) {
            // digits 0 -> 1 -> -1 -> 0 change the sum by +1, -2, +1
            if (++digit[q] < 3) {
                hash = digit[q] == 1 ? Fingerprint::add(hash, ch[q])
                                     : Fingerprint::sub(hash, Fingerprint::add(ch[q], ch[q]));
                break;
            }
            digit[q] = 0;
            hash = Fingerprint::add(hash, ch[q]);
        }
    }
    std::sort(entries.begin(), entries.end());

    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t i = 0; i < count;) {
        std::size_t j = i + 1;
        while (j < count && entries[j].hash == entries[i].hash) ++j;
        if (j - i > 1) groups.emplace_back(i, j);
        i = j;
    }
    // Confirm fingerprint collisions exactly; keep the smallest pair.
    std::vector<std::pair<std::size_t, std::size_t>> found(groups.size(), {count, count});
    parallel_for(groups.size(), resolve_threads(threads), [&](std::size_t g) {
        auto [lo, hi] = groups[g];
        for (std::size_t a = lo; a < hi; ++a)
            for (std::size_t b = a + 1; b < hi; ++b) {
                const std::size_t ia = entries[a].index, ib = entries[b].index;
                if (divides(spec.f, table.representative(ia) - table.representative(ib))) {
                    found[g] = std::min(found[g], std::make_pair(std::min(ia, ib), std::max(ia, ib)));
                }
            }
    });
    auto best = std::min_element(found.begin(), found.end());
    if (best != found.end() && best->first < count) {
        EpsilonPattern pa = table.pattern(best->first), pb = table.pattern(best->second);
        LaurentPoly diff = table.representative(best->first) - table.representative(best->second);
        throw DissociationFailure(pa, pb, diff);
    }
    return table;
}

std::complex<double> pattern_coefficient(const RieszSpec& spec, const EpsilonPattern& eps) {
    if (eps.size() != spec.size()) throw DimensionMismatch("pattern length differs from the number of characters");
    std::complex<double> c = 1.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (eps[i] == 1) c *= spec.coeffs[i] / 2.0;
        else if (eps[i] == -1) c *= std::conj(spec.coeffs[i]) / 2.0;
        else if (eps[i] != 0) throw PreconditionError("pattern entries must be -1, 0 or 1");
    }
    return c;
}

std::optional<EpsilonPattern> find_pattern(const RieszSpec& spec, const LaurentPoly& h) {
    if (h.dim() != spec.f.dim()) throw DimensionMismatch("character has the wrong dimension");
    std::vector<Exponent> chars;
    for (std::size_t i = 0; i < spec.size(); ++i) chars.push_back(spec.character(i));
    Fingerprint fp(spec.f, extent_of(chars, &h));
    LacunarySearch search(spec.f, chars, {0, 1, -1}, fp);
    return search.first_solution(h, true);
}

std::complex<double> riesz_fourier_coeff(const RieszSpec& spec, const LaurentPoly& h) {
    auto eps = find_pattern(spec, h);
    return eps ? pattern_coefficient(spec, *eps) : std::complex<double>(0.0);
}

std::vector<std::complex<double>> weights_to_coeffs(const WeightSeq& w, long m, const std::vector<Exponent>& points) {
    std::vector<std::complex<double>> a;
    a.reserve(points.size());
    for (Exponent n : points) {
        for (long& x : n) x *= m;
        std::complex<double> v = w.at(n);
        const double r = std::abs(v);
        a.push_back(r == 0.0 ? std::complex<double>(1.0) : std::conj(v) / r);
    }
    return a;
}

double truncated_density(const RieszSpec& spec, const ToralModel& model, const TorusPoint& x0) {
    check_model(spec, model);
    return density_at(spec, character_coords(spec, model, x0));
}

std::vector<TorusPoint> SampleResult::pooled() const {
    std::vector<TorusPoint> all;
    for (const auto& c : chains) all.insert(all.end(), c.begin(), c.end());
    return all;
}

SampleResult sample(const RieszSpec& spec, const ToralModel& model, const SampleOptions& opts) {
    check_model(spec, model);
    if (opts.chains < 1) throw PreconditionError("need at least one chain");
    if (opts.steps < 1 || opts.burn_in < 0 || opts.thin < 1) throw PreconditionError("invalid chain lengths");
    if (!(opts.step_width > 0 && opts.step_width <= 1)) throw PreconditionError("step width must lie in (0, 1]");
    const std::size_t dim = model.torus_dim();
    const long double span = static_cast<long double>(opts.step_width) * 18446744073709551616.0L;

    SampleResult out;
    out.chains.resize(static_cast<std::size_t>(opts.chains));
    out.acceptance.assign(static_cast<std::size_t>(opts.chains), 0.0);
    out.restarts.assign(static_cast<std::size_t>(opts.chains), 0);
    parallel_for(static_cast<std::size_t>(opts.chains), resolve_threads(opts.threads), [&](std::size_t c) {
        CounterRng rng(opts.seed, c + 1);
        TorusPoint x = TorusPoint::haar(dim, rng);
        double p = density_at(spec, character_coords(spec, model, x));
        int restarts = 0;
        while (!(p > 0)) {
            if (++restarts > opts.max_restarts) throw NumericalFailure("no start point with positive density");
            x = TorusPoint::haar(dim, rng);
            p = density_at(spec, character_coords(spec, model, x));
        }
        out.restarts[c] = restarts;
        auto& kept = out.chains[c];
        kept.reserve(static_cast<std::size_t>(opts.steps / opts.thin));
        long accepted = 0;
        TorusPoint y = x;
        for (long t = 0; t < opts.burn_in + opts.steps; ++t) {
            for (std::size_t i = 0; i < dim; ++i) {
                const long double u = static_cast<long double>(rng.uniform()) - 0.5L;
                y.coords[i] = x.coords[i] + static_cast<std::uint64_t>(static_cast<std::int64_t>(u * span));
            }
            const double q = density_at(spec, character_coords(spec, model, y));
            if (q >= p || rng.uniform() * p < q) {
                x = y;
                p = q;
                ++accepted;
            }
            if (t >= opts.burn_in && (t - opts.burn_in + 1) % opts.thin == 0) kept.push_back(x);
        }
        out.acceptance[c] = static_cast<double>(accepted) / static_cast<double>(opts.burn_in + opts.steps);
    });
    return out;
}

nlohmann::json to_json(const RieszSpec& spec) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& a : spec.coeffs) coeffs.push_back({a.real(), a.imag()});
    nlohmann::json j = {{"schema", 1},
                        {"kind", "riesz_spec"},
                        {"f", to_json(spec.f)},
                        {"f_text", render(spec.f)},
                        {"m", spec.m},
                        {"N", spec.N},
                        {"points", spec.points},
                        {"coeffs", coeffs}};
    j["certificate"] = spec.certificate ? to_json(*spec.certificate) : nlohmann::json(nullptr);
    return j;
}

std::string samples_to_csv(const SampleResult& r, const SampleOptions& opts) {
    std::ostringstream out;
    out.precision(17);
    const std::size_t dim = r.chains.empty() || r.chains[0].empty() ? 0 : r.chains[0][0].coords.size();
    out << "chain,step";
    for (std::size_t i = 0; i < dim; ++i) out << ",x" << i;
    out << "\n";
    for (std::size_t c = 0; c < r.chains.size(); ++c)
        for (std::size_t s = 0; s < r.chains[c].size(); ++s) {
            out << c << "," << opts.burn_in + static_cast<long>(s + 1) * opts.thin - 1;
            for (double v : r.chains[c][s].reals()) out << "," << v;
            out << "\n";
        }
    return out.str();
}

}  // namespace bohr
