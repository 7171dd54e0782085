#include "bohr/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "bohr/error.hpp"
#include "bohr/util.hpp"

namespace bohr {

namespace {

using cld = std::complex<long double>;

cld horner(const std::vector<long double>& c, cld z) {
    cld s = 0;
    for (std::size_t i = c.size(); i-- > 0;) s = s * z + c[i];
    return s;
}

cld horner_derivative(const std::vector<long double>& c, cld z) {
    cld s = 0;
    for (std::size_t i = c.size(); i-- > 1;) s = s * z + static_cast<long double>(i) * c[i];
    return s;
}

// Table of exp(2 pi i k / (2N)), k in [0, 2N).
std::vector<std::complex<double>> unit_table(int grid) {
    const long size = 2L * grid;
    std::vector<std::complex<double>> t(static_cast<std::size_t>(size));
    for (long k = 0; k < size; ++k) {
        long double a = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) / size;
        t[static_cast<std::size_t>(k)] = {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
    }
    return t;
}

struct GridEvaluator {
    int d;
    int grid;
    long offset;  // 1 for midpoints, 0 for nodes
    std::vector<std::complex<double>> table;
    std::vector<Exponent> exps;
    std::vector<double> coeffs;

    GridEvaluator(const LaurentPoly& f, int n, bool midpoint)
        : d(f.dim()), grid(n), offset(midpoint ? 1 : 0), table(unit_table(n)) {
        for (const auto& [e, c] : f.terms()) {
            exps.push_back(e);
            coeffs.push_back(c.get_d());
        }
    }

    std::size_t index(long n, long j) const {
        const long size = 2L * grid;
        long k = (n % size) * ((2 * j + offset) % size) % size;
        if (k < 0) k += size;
        return static_cast<std::size_t>(k);
    }

    std::size_t rows() const {
        std::size_t r = 1;
        for (int a = 0; a + 1 < d; ++a) r *= static_cast<std::size_t>(grid);
        return r;
    }

    // Values along the last axis for the row with leading indices encoded in `row`.
    void row_values(std::size_t row, std::vector<std::complex<double>>& out) const {
        std::vector<long> lead(static_cast<std::size_t>(d > 1 ? d - 1 : 0));
        for (int a = d - 2; a >= 0; --a) {
            lead[static_cast<std::size_t>(a)] = static_cast<long>(row % static_cast<std::size_t>(grid));
            row /= static_cast<std::size_t>(grid);
        }
        std::vector<std::complex<double>> pre(exps.size());
        for (std::size_t t = 0; t < exps.size(); ++t) {
            std::complex<double> v = coeffs[t];
            for (int a = 0; a + 1 < d; ++a) v *= table[index(exps[t][static_cast<std::size_t>(a)], lead[static_cast<std::size_t>(a)])];
            pre[t] = v;
        }
        out.assign(static_cast<std::size_t>(grid), 0.0);
        for (long j = 0; j < grid; ++j) {
            std::complex<double> s = 0;
            for (std::size_t t = 0; t < exps.size(); ++t) s += pre[t] * table[index(exps[t][static_cast<std::size_t>(d - 1)], j)];
            out[static_cast<std::size_t>(j)] = s;
        }
    }
};

struct QuadratureSample {
    double value;
    double min_abs;
};

QuadratureSample log_quadrature(const LaurentPoly& f, int grid, int threads) {
    GridEvaluator ev(f, grid, true);
    const std::size_t rows = ev.rows();
    std::vector<double> row_sums(rows), row_mins(rows);
    parallel_for(rows, threads, [&](std::size_t r) {
        std::vector<std::complex<double>> vals;
        ev.row_values(r, vals);
        std::vector<double> logs(vals.size());
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < vals.size(); ++j) {
            double a = std::abs(vals[j]);
            mn = std::min(mn, a);
            logs[j] = std::log(std::max(a, 1e-300));
        }
        row_sums[r] = pairwise_sum(logs);
        row_mins[r] = mn;
    });
    double total = pairwise_sum(row_sums);
    double points = std::pow(static_cast<double>(grid), f.dim());
    return {total / points, *std::min_element(row_mins.begin(), row_mins.end())};
}

}  // namespace

std::vector<std::complex<double>> torus_values(const LaurentPoly& f, int grid, bool midpoint, int threads) {
    GridEvaluator ev(f, grid, midpoint);
    const std::size_t rows = ev.rows();
    std::vector<std::complex<double>> out(rows * static_cast<std::size_t>(grid));
    parallel_for(rows, threads, [&](std::size_t r) {
        std::vector<std::complex<double>> vals;
        ev.row_values(r, vals);
        std::copy(vals.begin(), vals.end(), out.begin() + static_cast<std::ptrdiff_t>(r * static_cast<std::size_t>(grid)));
    });
    return out;
}

RootData complex_roots(const LaurentPoly& f) {
    if (f.dim() != 1) throw PreconditionError("complex_roots needs a univariate polynomial");
    if (f.is_zero()) throw PreconditionError("complex_roots of the zero polynomial");
    std::vector<Integer> c = dense_coefficients(f);
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg < 1) throw PreconditionError("complex_roots needs degree at least 1 after removing monomial units");

    RootData out;
    out.leading_coeff = c.back();
    std::vector<long double> cl(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) cl[i] = static_cast<long double>(c[i].get_d());
    const double lead = c.back().get_d();

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<std::size_t>(i)].get_d() / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
    if (solver.info() != Eigen::Success) throw NumericalFailure("companion eigenvalue iteration did not converge");
    auto ev = solver.eigenvalues();

    const double l1 = f.l1_norm().get_d();
    out.certified = true;
    for (int i = 0; i < deg; ++i) {
        cld z(ev[i].real(), ev[i].imag());
        long double best = std::abs(horner(cl, z));
        for (int it = 0; it < 30 && best > 0; ++it) {
            cld dp = horner_derivative(cl, z);
            if (dp == cld(0)) break;
            cld next = z - horner(cl, z) / dp;
            long double r = std::abs(horner(cl, next));
            if (!(r < best)) break;
            z = next;
            best = r;
        }
        std::complex<double> root(static_cast<double>(z.real()), static_cast<double>(z.imag()));
        double residual = static_cast<double>(best);
        double bound = 1e-8 * l1 * std::pow(std::max(1.0, std::abs(root)), deg);
        if (!(residual < bound)) out.certified = false;
        out.roots.push_back(root);
        out.residuals.push_back(residual);
        out.rho = std::max(out.rho, std::abs(root));
    }
    return out;
}

MahlerResult mahler_measure(const LaurentPoly& f, MahlerMethod method, int grid, int threads) {
    if (f.is_zero()) throw PreconditionError("Mahler measure of the zero polynomial");
    MahlerResult res;
    res.method = method;
    if (method == MahlerMethod::jensen) {
        if (f.dim() != 1) throw PreconditionError("jensen method needs a univariate polynomial");
        std::vector<Integer> c = dense_coefficients(f);
        double v = std::log(std::abs(c.back().get_d()));
        if (c.size() > 1) {
            RootData roots = complex_roots(f);
            for (const auto& r : roots.roots) v += std::log(std::max(1.0, std::abs(r)));
            res.reliable = roots.certified;
        }
        res.value = v;
        return res;
    }
    if (grid < 8) throw PreconditionError("quadrature grid must be at least 8");
    QuadratureSample base = log_quadrature(f, grid, threads);
    QuadratureSample fine = log_quadrature(f, 2 * grid, threads);
    res.value = base.value;
    res.grid = grid;
    res.refinement_delta = std::abs(base.value - fine.value);
    res.min_abs = std::min(base.min_abs, fine.min_abs);
    res.reliable = res.min_abs >= 1e-12;
    return res;
}

long valuation(const Integer& x, unsigned long p) {
    if (x == 0) throw PreconditionError("valuation of zero");
    Integer y = abs(x);
    long v = 0;
    while (mpz_divisible_ui_p(y.get_mpz_t(), p)) {
        mpz_divexact_ui(y.get_mpz_t(), y.get_mpz_t(), p);
        ++v;
    }
    return v;
}

std::vector<unsigned long> prime_factors(const Integer& x) {
    Integer y = abs(x);
    std::vector<unsigned long> ps;
    for (unsigned long p = 2; p <= 1000000 && y > 1; ++p) {
        if (Integer(p) * p > y) break;
        if (mpz_divisible_ui_p(y.get_mpz_t(), p)) {
            ps.push_back(p);
            while (mpz_divisible_ui_p(y.get_mpz_t(), p)) mpz_divexact_ui(y.get_mpz_t(), y.get_mpz_t(), p);
        }
    }
    if (y > 1) {
        if (!y.fits_ulong_p() || mpz_probab_prime_p(y.get_mpz_t(), 30) == 0)
            throw NumericalFailure("leading coefficient has a prime factor beyond the trial-division range");
        ps.push_back(y.get_ui());
    }
    return ps;
}

std::vector<NewtonSegment> newton_polygon(const LaurentPoly& f, unsigned long p) {
    if (f.dim() != 1) throw PreconditionError("newton_polygon needs a univariate polynomial");
    std::vector<Integer> c = dense_coefficients(f);
    std::vector<std::pair<long, long>> pts;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0) pts.emplace_back(static_cast<long>(i), valuation(c[i], p));
    std::vector<std::pair<long, long>> hull;
    for (const auto& q : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            // drop b if it lies on or above segment a-q
            long cross = (b.first - a.first) * (q.second - a.second) - (b.second - a.second) * (q.first - a.first);
            if (cross <= 0) hull.pop_back();
            else break;
        }
        hull.push_back(q);
    }
    std::vector<NewtonSegment> segs;
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        mpq_class s(hull[i + 1].second - hull[i].second, hull[i + 1].first - hull[i].first);
        s.canonicalize();
        segs.push_back({hull[i].first, hull[i + 1].first, s});
    }
    return segs;
}

std::optional<PadicEscape> padic_escape(const LaurentPoly& f) {
    if (f.dim() != 1) throw PreconditionError("padic_escape needs a univariate polynomial");
    if (f.is_zero()) throw PreconditionError("padic_escape of the zero polynomial");
    if (f.content() != 1) throw PreconditionError("padic_escape needs coprime coefficients (content 1)");
    std::vector<Integer> c = dense_coefficients(f);
    for (unsigned long p : prime_factors(c.back())) {
        for (const auto& seg : newton_polygon(f, p)) {
            if (seg.slope > 0) {
                PadicEscape e;
                e.prime = p;
                e.slope = seg.slope;
                e.escape_modulus = std::pow(static_cast<double>(p), seg.slope.get_d());
                e.witness_index = seg.from;
                return e;
            }
        }
    }
    return std::nullopt;
}

std::optional<ExpansivityCertificate> expansivity_check(const LaurentPoly& f, int grid, int threads) {
    if (grid < 16) throw PreconditionError("expansivity grid must be at least 16");
    if (f.is_zero()) return std::nullopt;
    std::vector<std::complex<double>> vals = torus_values(f, grid, false, threads);
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& v : vals) mn = std::min(mn, std::abs(v));
    double lip = 0.0;
    for (const auto& [e, c] : f.terms()) {
        double norm1 = 0.0;
        for (long x : e) norm1 += std::abs(static_cast<double>(x));
        lip += norm1 * std::abs(c.get_d());
    }
    lip *= 2.0 * std::numbers::pi;
    ExpansivityCertificate cert;
    cert.grid_size = grid;
    cert.grid_min = mn;
    cert.lipschitz = lip;
    cert.margin = mn - lip * std::sqrt(static_cast<double>(f.dim())) / (2.0 * grid);
    if (!(cert.margin > 0)) return std::nullopt;
    return cert;
}

std::optional<ExpansivityCertificate> certify_expansive(const LaurentPoly& f, int start, int max_grid, int threads) {
    if (max_grid <= 0) max_grid = f.dim() == 1 ? (1 << 20) : f.dim() == 2 ? 2048 : f.dim() == 3 ? 128 : 32;
    for (int n = std::max(16, start); n <= max_grid; n *= 2)
        if (auto c = expansivity_check(f, n, threads)) return c;
    return std::nullopt;
}

}  // namespace bohr
