#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "bohr/laurent.hpp"

namespace bohr {

struct RootData {
    std::vector<std::complex<double>> roots;
    std::vector<double> residuals;  // |f(lambda)| after refinement
    double rho = 0.0;               // largest modulus
    Integer leading_coeff;
    bool certified = false;         // every residual passed the acceptance test
};

/// Roots of the unit-normalized univariate polynomial: companion matrix
/// eigenvalues refined by Newton steps in extended precision.
RootData complex_roots(const LaurentPoly& f);

enum class MahlerMethod { jensen, quadrature };

struct MahlerResult {
    double value = 0.0;
    MahlerMethod method = MahlerMethod::jensen;
    int grid = 0;
    double refinement_delta = 0.0;  // |value(N) - value(2N)|, quadrature only
    double min_abs = 0.0;           // smallest |f| seen on the grid
    bool reliable = true;
};

MahlerResult mahler_measure(const LaurentPoly& f, MahlerMethod method, int grid = 4096, int threads = 0);

long valuation(const Integer& x, unsigned long p);  // x != 0
std::vector<unsigned long> prime_factors(const Integer& x);

struct NewtonSegment {
    long from;  // abscissa of left vertex
    long to;
    mpq_class slope;
};

/// Lower convex hull of (i, v_p(f_i)) over the nonzero coefficients of the
/// unit-normalized polynomial.
std::vector<NewtonSegment> newton_polygon(const LaurentPoly& f, unsigned long p);

struct PadicEscape {
    unsigned long prime = 0;
    mpq_class slope;
    double escape_modulus = 0.0;  // p^slope
    long witness_index = 0;
};

std::optional<PadicEscape> padic_escape(const LaurentPoly& f);

struct ExpansivityCertificate {
    int grid_size = 0;
    double grid_min = 0.0;
    double lipschitz = 0.0;
    double margin = 0.0;
};

std::optional<ExpansivityCertificate> expansivity_check(const LaurentPoly& f, int grid, int threads = 0);

/// Doubles the grid from `start` until certified or `max_grid` is exceeded.
std::optional<ExpansivityCertificate> certify_expansive(const LaurentPoly& f, int start = 16,
                                                        int max_grid = 0, int threads = 0);

/// Evaluates f on the torus grid: value at node j = (j_1..j_d) is
/// f(exp(2 pi i (j + offset)/N)). Returned in row-major order, last axis fastest.
std::vector<std::complex<double>> torus_values(const LaurentPoly& f, int grid, bool midpoint, int threads = 0);

}  // namespace bohr
