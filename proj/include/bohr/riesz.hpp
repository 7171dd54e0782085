#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohr/dynamics.hpp"
#include "bohr/error.hpp"
#include "bohr/laurent.hpp"
#include "bohr/mgood.hpp"

namespace bohr {

/// Truncated Riesz product on the characters z^(m n), n in [0, N]^d.
struct RieszSpec {
    LaurentPoly f;
    long m = 1;
    int N = 0;
    std::vector<Exponent> points;             // lex order
    std::vector<std::complex<double>> coeffs;  // a_n per point
    std::optional<MGoodCertificate> certificate;

    std::size_t size() const noexcept { return points.size(); }
    Exponent character(std::size_t i) const;  // m * points[i]
};

/// Empty `coeffs` means a_n = 1 everywhere.
RieszSpec make_riesz_spec(const LaurentPoly& f, long m, int N, std::vector<std::complex<double>> coeffs = {},
                          std::optional<MGoodCertificate> certificate = std::nullopt);

using EpsilonPattern = std::vector<int>;  // entries in {-1, 0, 1}, one per point
std::string pattern_text(const EpsilonPattern& eps);

/// Thrown when two patterns give congruent characters mod (f).
class DissociationFailure : public Error {
public:
    DissociationFailure(EpsilonPattern a, EpsilonPattern b, LaurentPoly difference);
    const EpsilonPattern& first() const noexcept { return a_; }
    const EpsilonPattern& second() const noexcept { return b_; }
    const LaurentPoly& difference() const noexcept { return diff_; }

private:
    EpsilonPattern a_, b_;
    LaurentPoly diff_;
};

/// Pattern i has digits over (0, 1, -1) with point 0 most significant.
class DissociationTable {
public:
    explicit DissociationTable(const RieszSpec& spec);

    std::size_t size() const noexcept { return count_; }
    EpsilonPattern pattern(std::size_t i) const;
    LaurentPoly representative(std::size_t i) const;
    const std::vector<Exponent>& characters() const noexcept { return chars_; }

private:
    int dim_ = 1;
    std::vector<Exponent> chars_;
    std::size_t count_ = 1;
};

/// Enumerates all 3^(#points) patterns and checks that no two are congruent
/// mod (f). Throws DissociationFailure on the first colliding pair.
DissociationTable dissociate_expand(const RieszSpec& spec, int threads = 0);

/// prod a_n^(eps_n) with a^(1) = a/2, a^(-1) = conj(a)/2.
std::complex<double> pattern_coefficient(const RieszSpec& spec, const EpsilonPattern& eps);

/// Fourier coefficient of the truncated measure at the character h, 0 when h
/// is not congruent to any pattern sum.
std::complex<double> riesz_fourier_coeff(const RieszSpec& spec, const LaurentPoly& h);
std::optional<EpsilonPattern> find_pattern(const RieszSpec& spec, const LaurentPoly& h);

/// a_n = exp(-i arg w_{m n}), with arg 0 := 0.
std::vector<std::complex<double>> weights_to_coeffs(const WeightSeq& w, long m, const std::vector<Exponent>& points);

double truncated_density(const RieszSpec& spec, const ToralModel& model, const TorusPoint& x0);

struct SampleOptions {
    int chains = 4;
    long steps = 10000;    // retained draws per chain, before thinning
    long burn_in = 10000;
    long thin = 1;
    double step_width = 0.1;
    std::uint64_t seed = 0;
    int threads = 0;
    int max_restarts = 1000;
};

struct SampleResult {
    std::vector<std::vector<TorusPoint>> chains;
    std::vector<double> acceptance;
    std::vector<int> restarts;

    std::vector<TorusPoint> pooled() const;
};

/// Random-walk Metropolis targeting the truncated density on the model torus.
SampleResult sample(const RieszSpec& spec, const ToralModel& model, const SampleOptions& opts);

nlohmann::json to_json(const RieszSpec& spec);
std::string samples_to_csv(const SampleResult& r, const SampleOptions& opts);

}  // namespace bohr
