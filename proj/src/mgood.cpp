#include "bohr/mgood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bohr/error.hpp"
#include "bohr/lacunary.hpp"
#include "bohr/spectra.hpp"

namespace bohr {

namespace {

constexpr double kMargin = 1e-9;

std::vector<Exponent> box_points(int d, long D) {
    std::vector<Exponent> pts;
    Exponent n(static_cast<std::size_t>(d), 0);
    while (true) {
        pts.push_back(n);
        int i = d - 1;
        while (i >= 0 && n[static_cast<std::size_t>(i)] == D) n[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
        ++n[static_cast<std::size_t>(i)];
    }
    return pts;
}

Exponent scaled(const Exponent& n, long m) {
    Exponent r(n);
    for (auto& x : r) x *= m;
    return r;
}

Exponent plus(Exponent a, const Exponent& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

// Highest exponent first: the top slot is the most significant digit.
void sort_slots(std::vector<Exponent>& slots) {
    std::sort(slots.begin(), slots.end(), [](const Exponent& a, const Exponent& b) { return b < a; });
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
}

const std::vector<int> kAlphabet2 = {0, 1, -1, 2, -2};
const std::vector<int> kAlphabet1 = {0, 1, -1};

Counterexample make_counterexample(const LaurentPoly& f, Condition cond, LaurentPoly witness, Exponent shift) {
    auto q = divides(f, witness);
    if (!q) throw NumericalFailure("search confirmed a witness that does not divide");
    Counterexample c;
    c.condition = cond;
    c.witness = std::move(witness);
    c.quotient = *q;
    c.shift = std::move(shift);
    return c;
}

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

std::string to_string(Route r) {
    switch (r) {
        case Route::archimedean: return "archimedean";
        case Route::padic: return "padic";
        case Route::gap: return "gap";
        case Route::univariate_lift: return "univariate_lift";
    }
    return "unknown";
}

std::string to_string(Condition c) { return c == Condition::C1 ? "C1" : "C2"; }

Route route_from_string(const std::string& s) {
    if (s == "archimedean") return Route::archimedean;
    if (s == "padic") return Route::padic;
    if (s == "gap") return Route::gap;
    if (s == "univariate_lift") return Route::univariate_lift;
    throw PreconditionError("unknown route '" + s + "'");
}

Condition condition_from_string(const std::string& s) {
    if (s == "C1" || s == "c1") return Condition::C1;
    if (s == "C2" || s == "c2") return Condition::C2;
    throw PreconditionError("unknown condition '" + s + "'");
}

bool archimedean_holds(double R, long m, ArchimedeanParams* out) {
    using ld = long double;
    const ld r = R;
    const ld rm = std::pow(r, static_cast<ld>(m));
    ArchimedeanParams p;
    p.rho_lower = R;
    p.margin_c1 = static_cast<double>(rm / 3 - 1);
    bool ok = p.margin_c1 > kMargin;
    if (m > 1) {
        ld worst1 = std::numeric_limits<ld>::infinity(), worst2 = worst1;
        for (long k = 1; k < m; ++k) {
            const ld rk = std::pow(r, static_cast<ld>(k));
            const ld rmk = rm * rk;
            worst1 = std::min(worst1, (rmk - rm - 2 * rk) / rmk);
            worst2 = std::min(worst2, (rm - 1 - (rk + 1)) / rm);
        }
        p.margin_case1 = static_cast<double>(worst1);
        p.margin_case2 = static_cast<double>(worst2);
        ok = ok && *p.margin_case1 > kMargin && *p.margin_case2 > kMargin;
    }
    if (out) {
        p.rho = out->rho;
        *out = p;
    }
    return ok;
}

MGoodCertificate certify_archimedean(const LaurentPoly& f) {
    if (f.dim() != 1) throw PreconditionError("archimedean route needs a univariate polynomial");
    RootData roots = complex_roots(f);
    const double rho = roots.rho;
    if (!(rho > 1 + 1e-9))
        throw RouteInapplicable("largest root modulus " + std::to_string(rho) + " is not above 1; try the p-adic route");
    const double lower = rho * (1 - 1e-9);
    ArchimedeanParams p;
    p.rho = rho;
    for (long m = 1; m <= 1000000; ++m) {
        if (archimedean_holds(lower, m, &p)) {
            p.rho = rho;
            MGoodCertificate cert;
            cert.f = f;
            cert.m = m;
            cert.route = Route::archimedean;
            cert.params = p;
            return cert;
        }
    }
    throw NumericalFailure("no m up to 10^6 satisfies the archimedean inequalities");
}

std::optional<MGoodCertificate> certify_padic(const LaurentPoly& f) {
    if (f.dim() != 1) throw PreconditionError("p-adic route needs a univariate polynomial");
    bool involuted = false;
    auto esc = padic_escape(f);
    if (!esc) {
        esc = padic_escape(involute(f));
        involuted = true;
    }
    if (!esc) return std::nullopt;
    // minimal m with m * slope > 1
    mpz_class num = esc->slope.get_num(), den = esc->slope.get_den();
    mpz_class q = den / num;
    long m = q.get_si() + 1;
    PadicParams p;
    p.prime = esc->prime;
    p.slope = esc->slope;
    p.escape_modulus = esc->escape_modulus;
    p.witness_index = esc->witness_index;
    p.involuted = involuted;
    MGoodCertificate cert;
    cert.f = f;
    cert.m = m;
    cert.route = Route::padic;
    cert.params = p;
    return cert;
}

MGoodCertificate certify_gap(const LaurentPoly& f, const SummableArray& w, int H, bool assume_irreducible) {
    if (f.dim() < 2) throw PreconditionError("gap route needs at least two variables");
    if (f.size() <= 1) throw PreconditionError("gap route needs |supp(f)| > 1 (a monomial multiple divides every scaled polynomial)");
    if (!assume_irreducible) throw PreconditionError("irreducibility of f must be acknowledged (--assume-irreducible)");
    if (H < 1) throw PreconditionError("coefficient bound H must be positive");
    if (w.dim != f.dim()) throw DimensionMismatch("homoclinic array has the wrong dimension");
    const double residual = verify_homoclinic(f, w);
    if (!(residual < 1e-8))
        throw PreconditionError("homoclinic residual " + std::to_string(residual) + " is not below 1e-8");
    GapParams p;
    p.H = H;
    p.box_radius = w.box_radius;
    p.grid = w.grid;
    p.residual = residual;
    p.tail_bound = w.tail_bound;
    p.norm1 = f.l1_norm();
    p.assume_irreducible = true;
    long m = 0;
    auto add = [&](int h, long factor) {
        GapRadius g;
        g.H = h;
        g.R = gap_radius(f, w, h);
        g.tail = l1_tail(w, g.R);
        g.threshold = 1.0 / (2.0 * h * p.norm1.get_d());
        g.factor = factor;
        p.radii.push_back(g);
        m = std::max(m, factor * g.R);
    };
    add(H, 6);
    add(2, 3);
    add(1, 6);
    MGoodCertificate cert;
    cert.f = f;
    cert.m = m;
    cert.route = Route::gap;
    cert.params = p;
    return cert;
}

MGoodCertificate lift_univariate(const MGoodCertificate& cert, int dim) {
    if (cert.f.dim() != 1) throw PreconditionError("lift needs a certificate for a univariate polynomial");
    if (dim < 1) throw PreconditionError("target dimension must be positive");
    LaurentPoly f(dim);
    for (const auto& [e, c] : cert.f.terms()) {
        Exponent x(static_cast<std::size_t>(dim), 0);
        x[0] = e[0];
        f.add_term(x, c);
    }
    MGoodCertificate out;
    out.f = f;
    out.m = cert.m;
    out.route = Route::univariate_lift;
    out.params = LiftParams{std::make_shared<const MGoodCertificate>(cert)};
    out.checked_horizon = 0;
    return out;
}

MGoodCertificate lift_univariate(const MGoodCertificate& cert, const LaurentPoly& target) {
    MGoodCertificate out = lift_univariate(cert, target.dim());
    if (!(out.f == target))
        throw PreconditionError("target is not the certified polynomial in the first variable; relabel variables");
    return out;
}

std::optional<Counterexample> falsify(const LaurentPoly& f, long m, long D, Condition condition,
                                      const FalsifyOptions& opts) {
    if (f.is_zero()) throw PreconditionError("falsify: f is the zero polynomial");
    if (m < 1) throw PreconditionError("m must be positive");
    if (D < 0) throw PreconditionError("horizon D must be nonnegative");
    if (D * m > opts.degree_cap)
        throw PreconditionError("horizon too large for the cap: D*m = " + std::to_string(D * m) + " > " +
                                std::to_string(opts.degree_cap));
    const int d = f.dim();
    const long extent = m * (D + 1) + 1;
    Fingerprint fp(f, extent);
    LacunarySearch::Options so;
    so.threads = opts.threads;
    so.table_limit = opts.table_limit;
    const std::vector<Exponent> lattice = box_points(d, D);
    const LaurentPoly zero(d);

    if (condition == Condition::C1) {
        std::vector<Exponent> slots;
        for (const auto& n : lattice) slots.push_back(scaled(n, m));
        sort_slots(slots);
        LacunarySearch search(f, slots, kAlphabet2, fp, so);
        auto sol = search.first_solution(zero, false);
        if (!sol) return std::nullopt;
        return make_counterexample(f, Condition::C1, search.build(*sol), {});
    }

    if (m == 1) return std::nullopt;  // no residue k: vacuous

    if (d == 1) {
        for (long k = 1; k < m; ++k) {
            std::vector<Exponent> slots;
            for (const auto& n : lattice) {
                slots.push_back(scaled(n, m));
                slots.push_back({n[0] * m + k});
            }
            sort_slots(slots);
            LacunarySearch search(f, slots, kAlphabet1, fp, so);
            auto sol = search.first_solution(zero, false);
            if (sol) return make_counterexample(f, Condition::C2, search.build(*sol), {k});
        }
        return std::nullopt;
    }

    std::vector<Exponent> slots;
    for (const auto& n : lattice) slots.push_back(scaled(n, m));
    sort_slots(slots);
    LacunarySearch search(f, slots, kAlphabet1, fp, so);
    for (const auto& k : box_points(d, m - 1)) {
        if (std::all_of(k.begin(), k.end(), [](long x) { return x == 0; })) continue;
        for (const auto& n : lattice)
            for (const auto& n2 : lattice) {
                if (n == n2) continue;
                LaurentPoly pair = LaurentPoly::monomial(plus(scaled(n, m), k)) -
                                   LaurentPoly::monomial(plus(scaled(n2, m), k));
                auto sol = search.first_solution(-pair, true);
                if (sol) return make_counterexample(f, Condition::C2, pair + search.build(*sol), k);
            }
    }
    return std::nullopt;
}

std::optional<Counterexample> confirm_horizon(MGoodCertificate& cert, long D, const FalsifyOptions& opts) {
    for (Condition c : {Condition::C1, Condition::C2})
        if (auto ce = falsify(cert.f, cert.m, D, c, opts)) return ce;
    cert.checked_horizon = std::max(cert.checked_horizon, D);
    return std::nullopt;
}

bool is_lacunary(const LaurentPoly& witness, long m, long D, Condition condition, const Exponent& shift) {
    if (witness.is_zero()) return false;
    const int d = witness.dim();
    auto on_lattice = [&](const Exponent& e, const Exponent& offset) {
        for (int i = 0; i < d; ++i) {
            long x = e[static_cast<std::size_t>(i)] - offset[static_cast<std::size_t>(i)];
            if (x < 0 || x % m != 0 || x / m > D) return false;
        }
        return true;
    };
    const Exponent origin(static_cast<std::size_t>(d), 0);
    if (condition == Condition::C1) {
        for (const auto& [e, c] : witness.terms())
            if (!on_lattice(e, origin) || abs(c) > 2) return false;
        return true;
    }
    if (static_cast<int>(shift.size()) != d) return false;
    int plus_one = 0, minus_one = 0;
    for (const auto& [e, c] : witness.terms()) {
        if (abs(c) > 1) return false;
        if (on_lattice(e, origin)) continue;
        if (!on_lattice(e, shift)) return false;
        (c > 0 ? plus_one : minus_one)++;
    }
    if (d == 1) return true;
    return plus_one == 1 && minus_one == 1;
}

// ---------------------------------------------------------------- JSON

nlohmann::json to_json(const MGoodCertificate& cert) {
    nlohmann::json params;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ArchimedeanParams>) {
                params = {{"rho", p.rho},
                          {"rho_lower", p.rho_lower},
                          {"margin_c1", p.margin_c1},
                          {"margin_c2_case1", optional_json(p.margin_case1)},
                          {"margin_c2_case2", optional_json(p.margin_case2)}};
            } else if constexpr (std::is_same_v<T, PadicParams>) {
                params = {{"prime", p.prime},
                          {"slope", {p.slope.get_num().get_si(), p.slope.get_den().get_si()}},
                          {"escape_modulus", p.escape_modulus},
                          {"witness_index", p.witness_index},
                          {"involuted", p.involuted}};
            } else if constexpr (std::is_same_v<T, GapParams>) {
                nlohmann::json radii = nlohmann::json::array();
                for (const auto& g : p.radii)
                    radii.push_back({{"H", g.H}, {"R", g.R}, {"tail", g.tail}, {"threshold", g.threshold}, {"factor", g.factor}});
                params = {{"H", p.H},
                          {"box_radius", p.box_radius},
                          {"grid", p.grid},
                          {"residual", p.residual},
                          {"tail_bound", p.tail_bound},
                          {"norm1", p.norm1.get_si()},
                          {"radii", radii},
                          {"assume_irreducible", p.assume_irreducible}};
            } else {
                params = {{"inner", to_json(*p.inner)}};
            }
        },
        cert.params);
    return {{"schema", 1},
            {"kind", "mgood_certificate"},
            {"f", to_json(cert.f)},
            {"f_text", render(cert.f)},
            {"m", cert.m},
            {"route", to_string(cert.route)},
            {"params", params},
            {"checked_horizon", cert.checked_horizon}};
}

MGoodCertificate certificate_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema", 0) != 1) throw PreconditionError("certificate JSON must carry schema 1");
    MGoodCertificate cert;
    cert.f = poly_from_json(j.at("f"));
    cert.m = j.at("m").get<long>();
    cert.route = route_from_string(j.at("route").get<std::string>());
    cert.checked_horizon = j.value("checked_horizon", 0L);
    const auto& p = j.at("params");
    switch (cert.route) {
        case Route::archimedean: {
            ArchimedeanParams a;
            a.rho = p.at("rho").get<double>();
            a.rho_lower = p.at("rho_lower").get<double>();
            a.margin_c1 = p.at("margin_c1").get<double>();
            a.margin_case1 = optional_from(p, "margin_c2_case1");
            a.margin_case2 = optional_from(p, "margin_c2_case2");
            cert.params = a;
            break;
        }
        case Route::padic: {
            PadicParams a;
            a.prime = p.at("prime").get<unsigned long>();
            a.slope = mpq_class(p.at("slope")[0].get<long>(), p.at("slope")[1].get<long>());
            a.slope.canonicalize();
            a.escape_modulus = p.at("escape_modulus").get<double>();
            a.witness_index = p.value("witness_index", 0L);
            a.involuted = p.value("involuted", false);
            cert.params = a;
            break;
        }
        case Route::gap: {
            GapParams a;
            a.H = p.at("H").get<int>();
            a.box_radius = p.at("box_radius").get<int>();
            a.grid = p.at("grid").get<int>();
            a.residual = p.at("residual").get<double>();
            a.tail_bound = p.at("tail_bound").get<double>();
            a.norm1 = p.at("norm1").get<long>();
            a.assume_irreducible = p.value("assume_irreducible", false);
            for (const auto& g : p.at("radii"))
                a.radii.push_back({g.at("H").get<int>(), g.at("R").get<long>(), g.at("tail").get<double>(),
                                   g.at("threshold").get<double>(), g.value("factor", 6L)});
            cert.params = a;
            break;
        }
        case Route::univariate_lift:
            cert.params = LiftParams{std::make_shared<const MGoodCertificate>(certificate_from_json(p.at("inner")))};
            break;
    }
    return cert;
}

nlohmann::json to_json(const Counterexample& c) {
    nlohmann::json j = {{"schema", 1},
                        {"kind", "counterexample"},
                        {"condition", to_string(c.condition)},
                        {"witness", to_json(c.witness)},
                        {"witness_text", render(c.witness)},
                        {"quotient", to_json(c.quotient)},
                        {"quotient_text", render(c.quotient)}};
    if (!c.shift.empty()) j["k"] = c.shift;
    return j;
}

// ---------------------------------------------------------------- verification

namespace {

void check(VerificationReport& rep, bool ok, const std::string& what) {
    (ok ? rep.checks : rep.failures).push_back(what);
    if (!ok) rep.valid = false;
}

void verify_into(const MGoodCertificate& cert, VerificationReport& rep, const std::string& prefix) {
    check(rep, cert.m >= 1, prefix + "m is positive");
    check(rep, cert.checked_horizon >= 0, prefix + "checked horizon is nonnegative");
    switch (cert.route) {
        case Route::archimedean: {
            const auto& p = std::get<ArchimedeanParams>(cert.params);
            check(rep, cert.f.dim() == 1, prefix + "archimedean route is univariate");
            check(rep, p.rho_lower > 1 && p.rho_lower <= p.rho, prefix + "1 < rho_lower <= rho");
            check(rep, archimedean_holds(p.rho_lower, cert.m), prefix + "inequalities (C1), (C2 I), (C2 II) hold strictly at rho_lower");
            if (cert.m == 1) check(rep, !p.margin_case1 && !p.margin_case2, prefix + "(C2) vacuous at m = 1");
            if (cert.f.dim() == 1) {
                RootData r = complex_roots(cert.f);
                check(rep, std::abs(r.rho - p.rho) <= 1e-9 * std::max(1.0, r.rho), prefix + "rho matches recomputed root radius");
            }
            break;
        }
        case Route::padic: {
            const auto& p = std::get<PadicParams>(cert.params);
            check(rep, p.slope > 0, prefix + "slope is positive");
            check(rep, p.slope * cert.m > 1, prefix + "q^m > p");
            check(rep, std::abs(p.escape_modulus - std::pow(static_cast<double>(p.prime), p.slope.get_d())) <= 1e-9 * p.escape_modulus,
                  prefix + "escape modulus equals p^slope");
            if (cert.f.dim() == 1) {
                LaurentPoly g = p.involuted ? involute(cert.f) : cert.f;
                bool found = false;
                for (const auto& s : newton_polygon(g, p.prime)) found = found || s.slope == p.slope;
                check(rep, found, prefix + "slope is a Newton polygon slope for the recorded prime");
                auto esc = padic_escape(g);
                check(rep, esc && esc->prime == p.prime && esc->slope == p.slope, prefix + "escape re-derived from f");
            } else {
                check(rep, false, prefix + "p-adic route is univariate");
            }
            break;
        }
        case Route::gap: {
            const auto& p = std::get<GapParams>(cert.params);
            check(rep, cert.f.dim() >= 2, prefix + "gap route has d >= 2");
            check(rep, cert.f.size() > 1, prefix + "|supp(f)| > 1");
            check(rep, p.assume_irreducible, prefix + "irreducibility acknowledged");
            check(rep, p.norm1 == cert.f.l1_norm(), prefix + "norm1 matches f");
            check(rep, p.residual < 1e-8, prefix + "homoclinic residual below 1e-8");
            long need = 0;
            for (const auto& g : p.radii) {
                check(rep, std::abs(g.threshold - 1.0 / (2.0 * g.H * p.norm1.get_d())) <= 1e-15,
                      prefix + "threshold 1/(2H|f|_1) for H=" + std::to_string(g.H));
                check(rep, g.tail < g.threshold, prefix + "tail below threshold for H=" + std::to_string(g.H));
                need = std::max(need, g.factor * g.R);
            }
            check(rep, !p.radii.empty() && cert.m >= need, prefix + "m >= 6R(H), 3R(2), 6R(1)");
            if (cert.f.dim() >= 2 && p.box_radius > 0) {
                try {
                    SummableArray w = fundamental_homoclinic(cert.f, p.box_radius, p.grid);
                    bool same = true;
                    for (const auto& g : p.radii) same = same && gap_radius(cert.f, w, g.H) == g.R;
                    check(rep, same, prefix + "gap radii re-derived from f");
                } catch (const Error& e) {
                    check(rep, false, prefix + "gap radii re-derived from f (" + std::string(e.what()) + ")");
                }
            }
            break;
        }
        case Route::univariate_lift: {
            const auto& p = std::get<LiftParams>(cert.params);
            check(rep, p.inner != nullptr, prefix + "inner certificate present");
            if (!p.inner) break;
            check(rep, p.inner->m == cert.m, prefix + "inner m equals lifted m");
            check(rep, p.inner->f.dim() == 1, prefix + "inner polynomial is univariate");
            if (p.inner->f.dim() == 1)
                check(rep, lift_univariate(*p.inner, cert.f.dim()).f == cert.f, prefix + "f is the inner polynomial in z1");
            verify_into(*p.inner, rep, prefix + "inner: ");
            break;
        }
    }
    if (cert.checked_horizon > 0 && cert.route != Route::gap) {
        bool clean = true;
        try {
            for (Condition c : {Condition::C1, Condition::C2})
                clean = clean && !falsify(cert.f, cert.m, cert.checked_horizon, c);
        } catch (const Error&) {
            clean = false;
        }
        check(rep, clean, prefix + "no counterexample up to the checked horizon");
    }
}

}  // namespace

VerificationReport verify_certificate(const nlohmann::json& j) {
    VerificationReport rep;
    MGoodCertificate cert;
    try {
        cert = certificate_from_json(j);
    } catch (const std::exception& e) {
        rep.valid = false;
        rep.failures.push_back(std::string("malformed certificate: ") + e.what());
        return rep;
    }
    verify_into(cert, rep, "");
    return rep;
}

}  // namespace bohr
