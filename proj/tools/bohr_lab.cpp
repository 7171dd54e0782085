#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bohr/dynamics.hpp"
#include "bohr/error.hpp"
#include "bohr/homoclinic.hpp"
#include "bohr/mgood.hpp"
#include "bohr/riesz.hpp"
#include "bohr/spectra.hpp"

using namespace bohr;
using nlohmann::json;

namespace {

struct Config {
    std::string poly;
    int dim = 0;
    long m = 0;
    long N = 0;
    long D = 0;
    int H = 2;
    int B = 32;
    int grid = 0;
    std::uint64_t seed = 0;
    int chains = 4;
    long steps = 10000;
    long burn_in = 10000;
    long thin = 1;
    double step_width = 0.1;
    std::string out;
    int threads = 0;
    bool assume_irreducible = false;
    std::string method = "jensen";
    std::string weights;
    std::string x0 = "haar";
    std::string h = "z^0";
    std::string condition = "C1";
    std::string route = "auto";
    std::string cert;
};

json config_json(const std::string& command, const Config& c) {
    return {{"command", command},     {"poly", c.poly},       {"dim", c.dim},
            {"m", c.m},               {"N", c.N},             {"D", c.D},
            {"H", c.H},               {"B", c.B},             {"grid", c.grid},
            {"seed", c.seed},         {"chains", c.chains},   {"steps", c.steps},
            {"burn_in", c.burn_in},   {"thin", c.thin},       {"step_width", c.step_width},
            {"out", c.out},           {"threads", c.threads}, {"assume_irreducible", c.assume_irreducible},
            {"method", c.method},     {"weights", c.weights}, {"x0", c.x0},
            {"h", c.h},               {"condition", c.condition}, {"route", c.route},
            {"cert", c.cert}};
}

std::string iso_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

LaurentPoly require_poly(const Config& c) {
    if (c.poly.empty()) throw PreconditionError("--poly is required");
    return parse_any(c.poly, c.dim);
}

void require_positive(long v, const char* flag) {
    if (v < 1) throw PreconditionError(std::string(flag) + " must be at least 1");
}

// f(z1) in several variables -> the univariate polynomial, if f has that form
std::optional<LaurentPoly> first_axis_part(const LaurentPoly& f) {
    if (f.dim() == 1) return f;
    LaurentPoly g(1);
    for (const auto& [e, c] : f.terms()) {
        for (std::size_t i = 1; i < e.size(); ++i)
            if (e[i] != 0) return std::nullopt;
        g.add_term({e[0]}, c);
    }
    return g;
}

TorusPoint resolve_x0(const Config& c, const ToralModel& model) {
    if (c.x0 == "haar") {
        CounterRng rng(c.seed, 0x40);
        return TorusPoint::haar(model.torus_dim(), rng);
    }
    std::vector<double> xs;
    std::stringstream ss(c.x0);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            xs.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw PreconditionError("--x0 expects 'haar' or comma separated reals, got '" + c.x0 + "'");
        }
    }
    if (xs.size() != model.torus_dim())
        throw DimensionMismatch("--x0 has " + std::to_string(xs.size()) + " coordinates, model torus has " +
                                std::to_string(model.torus_dim()));
    return TorusPoint::from_reals(xs);
}

WeightSeq resolve_weights(const Config& c, long N, const char* fallback) {
    const std::string kind = c.weights.empty() ? fallback : c.weights;
    return weight(weight_kind_from_string(kind), c.seed, N);
}

std::optional<MGoodCertificate> auto_certificate(const LaurentPoly& f, const Config& c) {
    const std::string& route = c.route;
    if (route == "archimedean") return certify_archimedean(f);
    if (route == "padic") return certify_padic(f);
    if (route == "gap") return certify_gap(f, fundamental_homoclinic(f, c.B, c.grid, c.threads), c.H, c.assume_irreducible);
    if (route == "univariate_lift" || route == "lift") {
        auto g = first_axis_part(f);
        if (!g || f.dim() == 1) throw RouteInapplicable("univariate lift needs f(z1) in at least two variables");
        Config inner = c;
        inner.route = "auto";
        auto ic = auto_certificate(*g, inner);
        if (!ic) return std::nullopt;
        return lift_univariate(*ic, f);
    }
    if (route != "auto") throw PreconditionError("unknown route '" + route + "'");

    if (auto g = first_axis_part(f); g && f.dim() > 1) {
        Config lift = c;
        lift.route = "lift";
        return auto_certificate(f, lift);
    }
    if (f.dim() == 1) {
        try {
            return certify_archimedean(f);
        } catch (const RouteInapplicable&) {
        }
        return certify_padic(f);
    }
    return certify_gap(f, fundamental_homoclinic(f, c.B, c.grid, c.threads), c.H, c.assume_irreducible);
}

RieszSpec resolve_spec(const LaurentPoly& f, const Config& c) {
    long m = c.m;
    std::optional<MGoodCertificate> cert;
    if (m == 0) {
        cert = auto_certificate(f, c);
        if (!cert) throw RouteInapplicable("no certificate route applies; pass --m explicitly");
        m = cert->m;
    }
    if (c.N < 0) throw PreconditionError("--N must be nonnegative for Riesz products");
    RieszSpec base = make_riesz_spec(f, m, static_cast<int>(c.N), {}, cert);
    if (c.weights.empty()) return base;
    long horizon = 1;
    for (const auto& p : base.points)
        for (long v : p) horizon = std::max(horizon, m * v + 1);
    WeightSeq w = weight(weight_kind_from_string(c.weights), c.seed, horizon);
    return make_riesz_spec(f, m, static_cast<int>(c.N), weights_to_coeffs(w, m, base.points), cert);
}

struct Output {
    std::string body;
    bool csv = false;
    int status = 0;
};

Output run_command(const std::string& cmd, const Config& c) {
    Output o;
    json j = {{"schema", 1}};
    auto finish_json = [&]() {
        o.body = j.dump(2) + "\n";
        return o;
    };

    if (cmd == "verify-certificate") {
        if (c.cert.empty()) throw PreconditionError("--cert PATH is required");
        std::ifstream in(c.cert);
        if (!in) throw PreconditionError("cannot open certificate file '" + c.cert + "'");
        json cert;
        try {
            in >> cert;
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed certificate JSON: ") + e.what(), 0);
        }
        VerificationReport rep = verify_certificate(cert);
        j["kind"] = "verification";
        j["valid"] = rep.valid;
        j["checks"] = rep.checks;
        j["failures"] = rep.failures;
        o.status = rep.valid ? 0 : 1;
        return finish_json();
    }

    const LaurentPoly f = require_poly(c);
    j["poly"] = render(f);

    if (cmd == "mahler") {
        const MahlerMethod method = c.method == "quadrature" ? MahlerMethod::quadrature
                                    : c.method == "jensen"   ? MahlerMethod::jensen
                                                             : throw PreconditionError("--method must be jensen or quadrature");
        MahlerResult r = mahler_measure(f, method, c.grid > 0 ? c.grid : 4096, c.threads);
        j["kind"] = "mahler";
        j["method"] = c.method;
        j["value"] = r.value;
        j["reliable"] = r.reliable;
        if (method == MahlerMethod::quadrature) {
            j["grid"] = r.grid;
            j["refinement_delta"] = r.refinement_delta;
            j["min_abs"] = r.min_abs;
        }
        return finish_json();
    }
    if (cmd == "roots") {
        RootData r = complex_roots(f);
        j["kind"] = "roots";
        j["roots"] = json::array();
        for (auto z : r.roots) j["roots"].push_back(complex_json(z));
        j["residuals"] = r.residuals;
        j["rho"] = r.rho;
        j["leading_coeff"] = r.leading_coeff.get_str();
        j["certified"] = r.certified;
        return finish_json();
    }
    if (cmd == "padic") {
        auto e = padic_escape(f);
        j["kind"] = "padic";
        if (e) {
            j["escape"] = {{"prime", e->prime},
                           {"slope", e->slope.get_str()},
                           {"escape_modulus", e->escape_modulus},
                           {"witness_index", e->witness_index}};
        } else {
            j["escape"] = nullptr;
        }
        return finish_json();
    }
    if (cmd == "expansive") {
        auto e = certify_expansive(f, c.grid > 0 ? c.grid : 16, 0, c.threads);
        j["kind"] = "expansivity";
        j["expansive"] = e.has_value();
        if (e) j["certificate"] = {{"grid", e->grid_size}, {"grid_min", e->grid_min}, {"lipschitz", e->lipschitz}, {"margin", e->margin}};
        return finish_json();
    }
    if (cmd == "certify") {
        auto cert = auto_certificate(f, c);
        if (!cert) throw RouteInapplicable("no certificate route applies to " + render(f));
        if (c.D > 0) {
            FalsifyOptions fo;
            fo.threads = c.threads;
            if (auto ce = confirm_horizon(*cert, c.D, fo)) {
                j["kind"] = "counterexample";
                j["counterexample"] = to_json(*ce);
                o.status = 1;
                return finish_json();
            }
        }
        o.body = to_json(*cert).dump(2) + "\n";
        return o;
    }
    if (cmd == "falsify") {
        require_positive(c.m, "--m");
        FalsifyOptions fo;
        fo.threads = c.threads;
        auto ce = falsify(f, c.m, c.D, condition_from_string(c.condition), fo);
        j["kind"] = "falsify";
        j["m"] = c.m;
        j["D"] = c.D;
        j["condition"] = c.condition;
        j["counterexample"] = ce ? to_json(*ce) : json(nullptr);
        return finish_json();
    }
    if (cmd == "homoclinic") {
        SummableArray w = fundamental_homoclinic(f, c.B, c.grid, c.threads);
        if (c.out.size() > 4 && c.out.substr(c.out.size() - 4) == ".csv") {
            o.body = to_csv(w);
            o.csv = true;
            return o;
        }
        json hj = to_json(w);
        hj["residual"] = verify_homoclinic(f, w);
        o.body = hj.dump(2) + "\n";
        return o;
    }
    if (cmd == "gap") {
        SummableArray w = fundamental_homoclinic(f, c.B, c.grid, c.threads);
        const long R = gap_radius(f, w, c.H);
        j["kind"] = "gap_radius";
        j["H"] = c.H;
        j["B"] = c.B;
        j["R"] = R;
        j["tail"] = l1_tail(w, R);
        j["threshold"] = 1.0 / (2.0 * c.H * f.l1_norm().get_d());
        j["separation"] = 6 * R;
        return finish_json();
    }
    if (cmd == "riesz-coeff") {
        RieszSpec spec = resolve_spec(f, c);
        const LaurentPoly h = parse_any(c.h, f.dim());
        auto pattern = find_pattern(spec, h);
        j["kind"] = "riesz_coeff";
        j["m"] = spec.m;
        j["N"] = spec.N;
        j["h"] = render(h);
        j["coefficient"] = complex_json(riesz_fourier_coeff(spec, h));
        j["pattern"] = pattern ? json(*pattern) : json(nullptr);
        return finish_json();
    }
    if (cmd == "riesz-expand") {
        RieszSpec spec = resolve_spec(f, c);
        DissociationTable t = dissociate_expand(spec, c.threads);
        j["kind"] = "riesz_expansion";
        j["spec"] = to_json(spec);
        j["size"] = t.size();
        j["terms"] = json::array();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const EpsilonPattern eps = t.pattern(i);
            j["terms"].push_back({{"pattern", eps},
                                  {"character", render(t.representative(i))},
                                  {"coefficient", complex_json(pattern_coefficient(spec, eps))}});
        }
        return finish_json();
    }
    if (cmd == "sample") {
        RieszSpec spec = resolve_spec(f, c);
        ToralModel model(f, f.dim() > 1 ? static_cast<int>(c.N + 1) : 1);
        SampleOptions so;
        so.chains = c.chains;
        so.steps = c.steps;
        so.burn_in = c.burn_in;
        so.thin = c.thin;
        so.step_width = c.step_width;
        so.seed = c.seed;
        so.threads = c.threads;
        o.body = samples_to_csv(sample(spec, model, so), so);
        o.csv = true;
        return o;
    }
    if (cmd == "average" || cmd == "split") {
        require_positive(c.N, "--N");
        const long m = cmd == "split" ? c.m : 1;
        require_positive(m, "--m");
        ToralModel model(f, f.dim() > 1 ? static_cast<int>(c.N) : 1);
        const TorusPoint x0 = resolve_x0(c, model);
        const WeightSeq w = resolve_weights(c, c.N, "bernoulli");
        SplitResult s = split_averages(model, x0, w, m, c.N);
        std::string out = "N,k,value_re,value_im,reference\n";
        if (cmd == "split") {
            for (std::size_t i = 0; i < s.buckets.size(); ++i) {
                std::string k;
                std::size_t rem = i;
                std::vector<long> digits(static_cast<std::size_t>(f.dim()));
                for (std::size_t a = digits.size(); a-- > 0;) {
                    digits[a] = static_cast<long>(rem % static_cast<std::size_t>(m));
                    rem /= static_cast<std::size_t>(m);
                }
                for (std::size_t a = 0; a < digits.size(); ++a) k += (a ? ":" : "") + std::to_string(digits[a]);
                out += std::to_string(c.N) + "," + k + "," + num(s.buckets[i].real()) + "," + num(s.buckets[i].imag()) + "," +
                       (i == 0 ? num(s.reference) : std::string()) + "\n";
            }
        }
        out += std::to_string(c.N) + ",all," + num(s.total.real()) + "," + num(s.total.imag()) + "," + num(s.reference) + "\n";
        o.body = out;
        o.csv = true;
        return o;
    }
    if (cmd == "mobius") {
        require_positive(c.N, "--N");
        auto k = kronecker_factor(first_axis_part(f).value_or(f));
        j["kind"] = "mobius";
        j["entropy"] = mahler_measure(first_axis_part(f).value_or(f), MahlerMethod::jensen).value;
        if (k) {
            json kf = json::array();
            for (const auto& fac : k->factors) kf.push_back({{"n", fac.index}, {"dilation", fac.dilation}});
            j["kronecker"] = {{"sign", k->sign}, {"shift", k->monomial_shift}, {"factors", kf}};
        } else {
            j["kronecker"] = nullptr;
        }
        ToralModel model(f, f.dim() > 1 ? static_cast<int>(c.N) : 1);
        const TorusPoint x0 = resolve_x0(c, model);
        const auto avg = weighted_average(model, x0, weight(WeightKind::mobius, c.seed, c.N), c.N);
        j["N"] = c.N;
        j["average"] = complex_json(avg);
        j["abs_average"] = std::abs(avg);
        return finish_json();
    }
    throw PreconditionError("unknown command '" + cmd + "'");
}

json error_json(const std::string& kind, const std::string& message) {
    return {{"schema", 1}, {"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Algebraic dynamics laboratory: Mahler measures, m-good certificates, Riesz products, weighted averages"};
    app.set_version_flag("--version", std::string(BOHR_VERSION));
    app.set_config("--config", "", "TOML/INI file with option values");
    app.require_subcommand(1);

    Config c;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"mahler", "Mahler measure by Jensen's formula or torus quadrature"},
        {"roots", "complex roots with residuals"},
        {"padic", "p-adic root escape from the Newton polygon"},
        {"expansive", "grid certificate that f has no zeros on the torus"},
        {"certify", "m-good certificate by the first applicable route"},
        {"falsify", "exhaustive search for a lacunary multiple"},
        {"homoclinic", "fundamental homoclinic point on a box"},
        {"gap", "gap radius from the homoclinic tail"},
        {"riesz-coeff", "Fourier coefficient of the truncated Riesz product"},
        {"riesz-expand", "dissociation table of the truncated Riesz product"},
        {"sample", "Metropolis samples from the truncated Riesz product"},
        {"average", "weighted Birkhoff average of exp(2 pi i x_0)"},
        {"split", "residue-class split of the weighted average"},
        {"mobius", "Moebius-weighted average with Kronecker data"},
        {"verify-certificate", "re-check a serialized certificate"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--poly", c.poly, "polynomial text or JSON");
        sub->add_option("--dim", c.dim, "number of variables (inferred when 0)");
        sub->add_option("--m", c.m, "dilation");
        sub->add_option("--N", c.N, "horizon or truncation");
        sub->add_option("--D", c.D, "falsification horizon");
        sub->add_option("--H", c.H, "coefficient bound for the gap route");
        sub->add_option("--B", c.B, "homoclinic box radius");
        sub->add_option("--grid", c.grid, "grid size");
        sub->add_option("--seed", c.seed, "64-bit seed");
        sub->add_option("--chains", c.chains, "sampler chains");
        sub->add_option("--steps", c.steps, "sampler steps per chain after burn-in");
        sub->add_option("--burn-in", c.burn_in, "sampler burn-in");
        sub->add_option("--thin", c.thin, "keep every k-th state");
        sub->add_option("--step-width", c.step_width, "proposal width");
        sub->add_option("--out", c.out, "output path (stdout when empty)");
        sub->add_option("--threads", c.threads, "worker threads (0 = all cores)")->envname("BOHR_LAB_THREADS");
        sub->add_flag("--assume-irreducible", c.assume_irreducible, "assume f irreducible for the gap route");
        sub->add_option("--method", c.method, "jensen | quadrature");
        sub->add_option("--weights", c.weights, "bernoulli | mobius | constant");
        sub->add_option("--x0", c.x0, "haar or comma separated coordinates");
        sub->add_option("--char", c.h, "character as a polynomial");
        sub->add_option("--condition", c.condition, "C1 | C2");
        sub->add_option("--route", c.route, "auto | archimedean | padic | gap | lift");
        sub->add_option("--cert", c.cert, "certificate JSON path");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << error_json("usage", e.what()).dump(2) << "\n";
        return 64;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    json manifest = {{"schema", 1},
                     {"kind", "manifest"},
                     {"version", BOHR_VERSION},
                     {"config", config_json(cmd, c)},
                     {"threads_resolved", resolve_threads(c.threads)},
                     {"timestamp", iso_now()}};
    const auto t0 = std::chrono::steady_clock::now();
    Output o;
    try {
        o = run_command(cmd, c);
    } catch (const DissociationFailure& e) {
        json err = error_json(e.kind(), e.what());
        err["error"]["first"] = e.first();
        err["error"]["second"] = e.second();
        err["error"]["difference"] = render(e.difference());
        std::cout << err.dump(2) << "\n";
        return 2;
    } catch (const Error& e) {
        std::cout << error_json(e.kind(), e.what()).dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cout << error_json("internal", e.what()).dump(2) << "\n";
        return 3;
    }
    manifest["elapsed_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["format"] = o.csv ? "csv" : "json";

    if (c.out.empty()) {
        std::cout << o.body;
        std::cerr << manifest.dump() << "\n";
    } else {
        std::ofstream out(c.out, std::ios::binary);
        std::ofstream man(c.out + ".manifest.json");
        if (!out || !man) {
            std::cout << error_json("io", "cannot write '" + c.out + "'").dump(2) << "\n";
            return 2;
        }
        out << o.body;
        man << manifest.dump(2) << "\n";
    }
    return o.status;
}
