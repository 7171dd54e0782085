#include "bohr/homoclinic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>

#include <fftw3.h>

#include "bohr/error.hpp"
#include "bohr/spectra.hpp"
#include "bohr/util.hpp"

namespace bohr {

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex mu;
    return mu;
}

long ipow(long b, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

long shell_count(long s, int d) { return s == 0 ? 1 : ipow(2 * s + 1, d) - ipow(2 * s - 1, d); }

}  // namespace

std::size_t SummableArray::flat(const Exponent& n) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i) idx = idx * side() + static_cast<std::size_t>(n[static_cast<std::size_t>(i)] + box_radius);
    return idx;
}

bool SummableArray::contains(const Exponent& n) const {
    if (static_cast<int>(n.size()) != dim) return false;
    for (long x : n)
        if (x < -box_radius || x > box_radius) return false;
    return true;
}

double SummableArray::at(const Exponent& n) const { return contains(n) ? values[flat(n)] : 0.0; }

Exponent SummableArray::index(std::size_t f) const {
    Exponent n(static_cast<std::size_t>(dim));
    for (int i = dim - 1; i >= 0; --i) {
        n[static_cast<std::size_t>(i)] = static_cast<long>(f % side()) - box_radius;
        f /= side();
    }
    return n;
}

double SummableArray::box_l1() const {
    std::vector<double> a(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) a[i] = std::abs(values[i]);
    return pairwise_sum(a);
}

std::vector<double> SummableArray::shell_sums() const {
    std::vector<double> s(static_cast<std::size_t>(box_radius + 1), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        Exponent n = index(i);
        long r = 0;
        for (long x : n) r = std::max(r, std::labs(x));
        s[static_cast<std::size_t>(r)] += std::abs(values[i]);
    }
    return s;
}

SummableArray fundamental_homoclinic(const LaurentPoly& f, int B, int grid, int threads) {
    if (f.is_zero()) throw PreconditionError("homoclinic point of the zero polynomial");
    if (B < 1) throw PreconditionError("box radius must be positive");
    const int d = f.dim();
    const int N = grid > 0 ? grid : 4 * B;
    if (N < 4 * B) throw PreconditionError("Fourier grid must be at least 4B");
    if (std::pow(static_cast<double>(N), d) > 1 << 26) throw PreconditionError("Fourier grid too large");
    if (!certify_expansive(f, 16, 0, threads))
        throw PreconditionError("expansivity not certified: no summable homoclinic point can be constructed");

    std::vector<std::complex<double>> vals = torus_values(f, N, false, threads);
    double gmax = 0.0;
    for (auto& v : vals) {
        v = 1.0 / v;
        gmax = std::max(gmax, std::abs(v));
    }
    std::vector<int> dims(static_cast<std::size_t>(d), N);
    auto* buf = reinterpret_cast<fftw_complex*>(vals.data());
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_plan plan = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / static_cast<double>(vals.size());

    SummableArray w;
    w.dim = d;
    w.box_radius = B;
    w.grid = N;
    w.values.assign(static_cast<std::size_t>(ipow(2 * B + 1, d)), 0.0);
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        Exponent n = w.index(i);
        std::size_t src = 0;
        for (int a = 0; a < d; ++a) {
            long k = n[static_cast<std::size_t>(a)] % N;
            if (k < 0) k += N;
            src = src * static_cast<std::size_t>(N) + static_cast<std::size_t>(k);
        }
        w.values[i] = vals[src].real() * scale;
    }

    // Geometric envelope from the outermost shells that sit above rounding.
    std::vector<double> S = w.shell_sums();
    const double eta = 16 * std::numeric_limits<double>::epsilon() * gmax;
    auto reliable = [&](long s) { return S[static_cast<std::size_t>(s)] > 10 * eta * shell_count(s, d); };
    long anchor = -1;
    for (long s = B; s >= 2; --s)
        if (reliable(s) && reliable(s - 1) && reliable(s - 2)) {
            anchor = s;
            break;
        }
    if (anchor < 0) {
        // Everything beyond the first shells is rounding noise: finite support.
        w.anchor_shell = 0;
        w.decay_ratio = 0.0;
        w.envelope = S[0];
        w.tail_bound = 0.0;
        w.alias_estimate = 0.0;
        return w;
    }
    const double r1 = S[static_cast<std::size_t>(anchor)] / S[static_cast<std::size_t>(anchor - 1)];
    const double r2 = S[static_cast<std::size_t>(anchor - 1)] / S[static_cast<std::size_t>(anchor - 2)];
    const double r = std::max(r1, r2);
    if (!(r < 0.999)) throw NumericalFailure("homoclinic coefficients show no geometric decay (ratio " + std::to_string(r) + ")");
    w.anchor_shell = static_cast<int>(anchor);
    w.decay_ratio = r;
    w.envelope = S[static_cast<std::size_t>(anchor)];
    w.tail_bound = w.envelope * std::pow(r, static_cast<double>(B + 1 - anchor)) / (1 - r);
    w.alias_estimate = w.envelope * std::pow(r, static_cast<double>(N - B - anchor)) / (1 - r);
    if (w.alias_estimate > 1e-6)
        throw NumericalFailure("aliasing estimate " + std::to_string(w.alias_estimate) + " exceeds 1e-6; enlarge the grid");
    return w;
}

double verify_homoclinic(const LaurentPoly& f, const SummableArray& w) {
    if (f.dim() != w.dim) throw DimensionMismatch("homoclinic array has the wrong dimension");
    const long inner = w.box_radius - f.support_radius();
    if (inner < 0) return 1.0;
    double worst = 0.0;
    const int d = w.dim;
    Exponent n(static_cast<std::size_t>(d), -inner), shifted(static_cast<std::size_t>(d));
    while (true) {
        double c = 0.0;
        bool origin = true;
        for (long x : n) origin = origin && x == 0;
        for (const auto& [e, a] : f.terms()) {
            for (int i = 0; i < d; ++i) shifted[static_cast<std::size_t>(i)] = n[static_cast<std::size_t>(i)] - e[static_cast<std::size_t>(i)];
            c += a.get_d() * w.at(shifted);
        }
        worst = std::max(worst, std::abs(c - (origin ? 1.0 : 0.0)));
        int i = d - 1;
        while (i >= 0 && n[static_cast<std::size_t>(i)] == inner) n[static_cast<std::size_t>(i--)] = -inner;
        if (i < 0) break;
        ++n[static_cast<std::size_t>(i)];
    }
    return worst;
}

double l1_tail(const SummableArray& w, long R) {
    std::vector<double> picked;
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        Exponent n = w.index(i);
        long norm = 0;
        for (long x : n) norm += std::labs(x);
        if (norm >= R) picked.push_back(std::abs(w.values[i]));
    }
    return pairwise_sum(picked) + w.tail_bound;
}

long gap_radius(const LaurentPoly& f, const SummableArray& w, int H) {
    if (H < 1) throw PreconditionError("coefficient bound H must be positive");
    const double residual = verify_homoclinic(f, w);
    if (!(residual < 1e-8))
        throw PreconditionError("homoclinic residual " + std::to_string(residual) + " is not below 1e-8");
    const double threshold = 1.0 / (2.0 * H * f.l1_norm().get_d());
    // l1-norm shells, then suffix sums from the outside in
    const long max_norm = static_cast<long>(w.dim) * w.box_radius;
    std::vector<double> shell(static_cast<std::size_t>(max_norm + 1), 0.0);
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        Exponent n = w.index(i);
        long norm = 0;
        for (long x : n) norm += std::labs(x);
        shell[static_cast<std::size_t>(norm)] += std::abs(w.values[i]);
    }
    std::vector<double> suffix(shell.size() + 1, 0.0);
    for (std::size_t s = shell.size(); s-- > 0;) suffix[s] = suffix[s + 1] + shell[s];
    for (long R = 1; R <= w.box_radius; ++R)
        if (suffix[static_cast<std::size_t>(R)] + w.tail_bound < threshold) return R;
    throw PreconditionError("gap bound unreachable within box radius " + std::to_string(w.box_radius) + "; enlarge B");
}

bool gap_check(const LaurentPoly& f, const LaurentPoly& phi, const std::vector<Exponent>& S,
               const std::vector<Exponent>& S2, long separation, int H) {
    if (S.empty() || S2.empty()) throw PreconditionError("gap_check needs two nonempty clusters");
    const long dist = sup_distance(S, S2);
    if (dist < separation)
        throw PreconditionError("clusters are " + std::to_string(dist) + " apart, separation " +
                                std::to_string(separation) + " required");
    LaurentPoly v = mul(phi, f);
    std::set<Exponent> in_s(S.begin(), S.end()), in_s2(S2.begin(), S2.end());
    LaurentPoly restricted(f.dim());
    for (const auto& [e, c] : v.terms()) {
        if (in_s.count(e)) restricted.add_term(e, c);
        else if (!in_s2.count(e)) throw PreconditionError("support of phi*f leaks outside the two clusters");
    }
    if (H > 0 && v.linf_norm() > H) throw PreconditionError("coefficients of phi*f exceed H");
    return divides(f, restricted).has_value();
}

nlohmann::json to_json(const SummableArray& w, bool include_values) {
    nlohmann::json j = {{"schema", 1},
                        {"kind", "summable_array"},
                        {"dim", w.dim},
                        {"box_radius", w.box_radius},
                        {"grid", w.grid},
                        {"tail_bound", w.tail_bound},
                        {"decay_ratio", w.decay_ratio},
                        {"envelope", w.envelope},
                        {"anchor_shell", w.anchor_shell},
                        {"alias_estimate", w.alias_estimate},
                        {"box_l1", w.box_l1()},
                        {"shells", w.shell_sums()}};
    if (include_values) j["values"] = w.values;
    return j;
}

SummableArray summable_from_json(const nlohmann::json& j) {
    SummableArray w;
    w.dim = j.at("dim").get<int>();
    w.box_radius = j.at("box_radius").get<int>();
    w.grid = j.value("grid", 0);
    w.tail_bound = j.at("tail_bound").get<double>();
    w.decay_ratio = j.value("decay_ratio", 0.0);
    w.envelope = j.value("envelope", 0.0);
    w.anchor_shell = j.value("anchor_shell", 0);
    w.alias_estimate = j.value("alias_estimate", 0.0);
    w.values = j.at("values").get<std::vector<double>>();
    if (w.values.size() != static_cast<std::size_t>(ipow(2 * w.box_radius + 1, w.dim)))
        throw PreconditionError("summable array has the wrong number of values");
    return w;
}

std::string to_csv(const SummableArray& w) {
    std::ostringstream out;
    out.precision(17);
    for (int i = 0; i < w.dim; ++i) out << "n" << (i + 1) << ",";
    out << "value\n";
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        for (long x : w.index(i)) out << x << ",";
        out << w.values[i] << "\n";
    }
    return out.str();
}

}  // namespace bohr
