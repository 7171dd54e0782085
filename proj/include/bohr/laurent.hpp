#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace bohr {

using Integer = mpz_class;
using Exponent = std::vector<long>;

/// Sparse Laurent polynomial in d variables with integer coefficients.
/// Terms are kept sorted by exponent (lexicographic) and never store zeros.
class LaurentPoly {
public:
    using TermMap = std::map<Exponent, Integer>;

    explicit LaurentPoly(int dim = 1);

    static LaurentPoly constant(int dim, const Integer& c);
    static LaurentPoly monomial(const Exponent& e, const Integer& c = 1);
    static LaurentPoly from_terms(int dim, const std::vector<std::pair<Exponent, Integer>>& terms);

    int dim() const noexcept { return dim_; }
    const TermMap& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_monomial() const noexcept { return terms_.size() == 1; }

    Integer coeff(const Exponent& e) const;
    std::vector<Exponent> support() const;

    /// Adds c to the coefficient at e, erasing the entry if it cancels.
    void add_term(const Exponent& e, const Integer& c);

    Integer l1_norm() const;
    Integer linf_norm() const;
    Integer content() const;  // gcd of coefficients, 0 for the zero polynomial

    Exponent min_exponent() const;  // componentwise
    Exponent max_exponent() const;
    long support_radius() const;  // max sup-norm of an exponent

    LaurentPoly shifted(const Exponent& e) const;  // times z^e
    LaurentPoly scaled(const Integer& c) const;

    std::complex<double> evaluate(std::span<const std::complex<double>> z) const;
    std::complex<long double> evaluate1(std::complex<long double> z) const;  // d = 1

    LaurentPoly& operator+=(const LaurentPoly& other);
    LaurentPoly& operator-=(const LaurentPoly& other);
    LaurentPoly operator-() const;

    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_;
    }

private:
    int dim_;
    TermMap terms_;
};

LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b);
LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b);
LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);

LaurentPoly mul(const LaurentPoly& f, const LaurentPoly& g);
LaurentPoly involute(const LaurentPoly& f);

/// Parses "3 - z1 - z2", "5*z^2 - 6*z + 5", "z^-1 + z". When `dim` is 0 the
/// dimension is inferred from the highest variable index used.
LaurentPoly parse(std::string_view text, int dim = 0);
std::string render(const LaurentPoly& f);

nlohmann::json to_json(const LaurentPoly& f);
LaurentPoly poly_from_json(const nlohmann::json& j);

/// Accepts either polynomial text or its canonical JSON form.
LaurentPoly parse_any(std::string_view text, int dim = 0);

/// Multiplies by the monomial that moves the support into the positive
/// orthant touching every coordinate hyperplane. Returns the applied shift.
LaurentPoly normalize_units(const LaurentPoly& f, Exponent* shift = nullptr);

/// q with v = q*f if it exists in the Laurent ring (integer coefficients).
std::optional<LaurentPoly> divides(const LaurentPoly& f, const LaurentPoly& v);

/// Univariate helpers. Coefficients of the unit-normalized polynomial,
/// index i holds the coefficient of z^i. `shift` receives the removed power.
std::vector<Integer> dense_coefficients(const LaurentPoly& f, long* shift = nullptr);
LaurentPoly from_dense(const std::vector<Integer>& c, long shift = 0);
long degree_span(const LaurentPoly& f);  // max - min exponent, d = 1

LaurentPoly cyclotomic(unsigned n);
unsigned long euler_phi(unsigned long n);

struct KroneckerFactor {
    unsigned index;     // n in Phi_n
    unsigned dilation;  // m in Phi_n(z^m)
};

struct KroneckerForm {
    int sign = 1;
    long monomial_shift = 0;
    std::vector<KroneckerFactor> factors;

    LaurentPoly reconstruct() const;
};

/// Factorization sign * z^shift * prod Phi_n(z^m) when the Mahler measure
/// vanishes; empty otherwise.
std::optional<KroneckerForm> kronecker_factor(const LaurentPoly& f);

/// Sup-norm distance between two finite exponent sets.
long sup_distance(const std::vector<Exponent>& a, const std::vector<Exponent>& b);

}  // namespace bohr
