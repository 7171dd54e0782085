#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bohr/laurent.hpp"
#include "bohr/util.hpp"

namespace bohr {

/// Point of a finite-dimensional torus in 64-bit fixed point: coordinate
/// value u represents u / 2^64. Integer recurrences are then exact mod 1.
struct TorusPoint {
    std::vector<std::uint64_t> coords;

    static TorusPoint from_reals(const std::vector<double>& x);
    static TorusPoint haar(std::size_t dim, CounterRng& rng);
    std::vector<double> reals() const;
};

double to_real(std::uint64_t u);
std::uint64_t from_real(double x);  // reduced mod 1
std::complex<double> character(std::uint64_t u);  // exp(2 pi i u / 2^64)

/// Companion-form realization of the shift action for f with leading
/// coefficient +-1 (d = 1), or f = g(z1) in d variables with one copy of the
/// g-recurrence per fiber (n2, ..., nd) in [0, fiber_extent)^(d-1).
class ToralModel {
public:
    explicit ToralModel(const LaurentPoly& f, int fiber_extent = 1);

    const LaurentPoly& f() const noexcept { return f_; }
    int dim() const noexcept { return f_.dim(); }
    int degree() const noexcept { return r_; }
    int fiber_extent() const noexcept { return fiber_extent_; }
    long fibers() const noexcept { return fibers_; }
    std::size_t torus_dim() const noexcept { return static_cast<std::size_t>(r_) * static_cast<std::size_t>(fibers_); }

    /// x_{n+r} = sum_j c_j x_{n+j}
    const std::vector<long>& recurrence() const noexcept { return rec_; }
    /// Coefficients g_0..g_r of the unit-normalized univariate part.
    const std::vector<long>& relation() const noexcept { return rel_; }

    /// Coordinates x_0 .. x_{length-1} along the first axis of one fiber.
    std::vector<std::uint64_t> orbit(const TorusPoint& x0, long length, long fiber = 0) const;
    std::uint64_t coordinate(const TorusPoint& x0, const Exponent& n) const;
    long fiber_index(const Exponent& n) const;  // throws outside the forward cone

    /// One step of the integer companion matrix on a window of r coordinates.
    std::vector<std::uint64_t> companion_step(const std::vector<std::uint64_t>& window) const;
    std::vector<std::vector<long>> companion_matrix() const;

    /// Distance of sum_j g_j x_{n+j} to the nearest integer, in real arithmetic.
    double window_residual(const std::vector<std::uint64_t>& orbit, long n) const;

private:
    LaurentPoly f_;
    int r_ = 0;
    int fiber_extent_ = 1;
    long fibers_ = 1;
    std::vector<long> rec_;
    std::vector<long> rel_;
};

enum class WeightKind { bernoulli, mobius, constant, custom };

WeightKind weight_kind_from_string(const std::string& s);
std::string to_string(WeightKind k);

/// Bounded weight sequence on N^d. Bernoulli values are a pure function of
/// (seed, index); Mobius values come from an exact sieve.
class WeightSeq {
public:
    WeightKind kind() const noexcept { return kind_; }
    std::uint64_t seed() const noexcept { return seed_; }
    long horizon() const noexcept { return horizon_; }
    double bound() const noexcept { return bound_; }

    std::complex<double> at(long n) const;
    std::complex<double> at(const Exponent& n) const;

    static WeightSeq make(WeightKind kind, std::uint64_t seed, long N);
    static WeightSeq custom(std::vector<std::complex<double>> values);

private:
    WeightKind kind_ = WeightKind::constant;
    std::uint64_t seed_ = 0;
    long horizon_ = 0;
    double bound_ = 1.0;
    std::vector<int> mobius_;
    std::vector<std::complex<double>> values_;
};

WeightSeq weight(WeightKind kind, std::uint64_t seed, long N);

/// mu(0..N) with mu(0) = 0, by a linear sieve.
std::vector<int> mobius_sieve(long N);

/// (1/N^d) sum over [0, N-1]^d of w_n exp(2 pi i x_n).
std::complex<double> weighted_average(const ToralModel& model, const TorusPoint& x0, const WeightSeq& w, long N);

/// Running averages Z_n = (1/n) sum_{j<n} w_j e(x_j) for n = 1..N (d = 1).
std::vector<std::complex<double>> running_averages(const ToralModel& model, const TorusPoint& x0, const WeightSeq& w, long N);

struct SplitResult {
    std::vector<Exponent> residues;
    std::vector<std::complex<double>> buckets;  // S_{N,k} / N^d
    std::complex<double> total;                 // S_N / N^d
    double reference = 0.0;                     // (1/(2 N^d)) sum |w_{mn}|
};

SplitResult split_averages(const ToralModel& model, const TorusPoint& x0, const WeightSeq& w, long m, long N);

/// |S_N^w(x) - S_N^{w shifted by k}(alpha^k x)| evaluated from both sums.
double shift_invariance_gap(const ToralModel& model, const TorusPoint& x0, const WeightSeq& w, long k, long N);

/// Cumulative sums of (1/N) mean_k |Z_N^(k)|^2 for N = 1..Nmax, where
/// Z[k][N-1] holds replicate k.
std::vector<double> ffq_partial_sums(const std::vector<std::vector<std::complex<double>>>& Z, long Nmax);

/// Least-squares slope of log y against log x over entries with y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Compensated complex summation.
std::complex<double> neumaier_sum(const std::vector<std::complex<double>>& terms);

}  // namespace bohr
