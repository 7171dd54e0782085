#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bohr/homoclinic.hpp"
#include "bohr/laurent.hpp"

namespace bohr {

enum class Route { archimedean, padic, gap, univariate_lift };
enum class Condition { C1, C2 };

std::string to_string(Route r);
std::string to_string(Condition c);
Route route_from_string(const std::string& s);
Condition condition_from_string(const std::string& s);

struct ArchimedeanParams {
    double rho = 0.0;        // largest root modulus
    double rho_lower = 0.0;  // value the inequalities were evaluated at
    double margin_c1 = 0.0;
    std::optional<double> margin_case1;  // empty when k-range is vacuous (m = 1)
    std::optional<double> margin_case2;
};

struct PadicParams {
    unsigned long prime = 0;
    mpq_class slope;
    double escape_modulus = 0.0;
    long witness_index = 0;
    bool involuted = false;  // escape found for the involution of f
};

struct GapRadius {
    int H = 0;
    long R = 0;
    double tail = 0.0;
    double threshold = 0.0;
    long factor = 6;  // m must be at least factor * R
};

struct GapParams {
    int H = 2;
    int box_radius = 0;
    int grid = 0;
    double residual = 0.0;
    double tail_bound = 0.0;
    Integer norm1;
    std::vector<GapRadius> radii;  // for H, 2 and 1
    bool assume_irreducible = true;
};

struct MGoodCertificate;

struct LiftParams {
    std::shared_ptr<const MGoodCertificate> inner;
};

struct MGoodCertificate {
    LaurentPoly f;
    long m = 1;
    Route route = Route::archimedean;
    std::variant<ArchimedeanParams, PadicParams, GapParams, LiftParams> params;
    long checked_horizon = 0;
};

struct Counterexample {
    Condition condition = Condition::C1;
    LaurentPoly witness;
    LaurentPoly quotient;
    Exponent shift;  // k for C2
};

struct FalsifyOptions {
    long degree_cap = 512;
    int threads = 0;
    std::size_t table_limit = std::size_t(1) << 23;
};

/// Smallest m >= 1 satisfying the three strict root-modulus inequalities.
MGoodCertificate certify_archimedean(const LaurentPoly& f);
std::optional<MGoodCertificate> certify_padic(const LaurentPoly& f);
MGoodCertificate certify_gap(const LaurentPoly& f, const SummableArray& homoclinic, int H,
                             bool assume_irreducible);
MGoodCertificate lift_univariate(const MGoodCertificate& cert, int dim);
/// Same, checking that `target` is the inner polynomial in the first variable.
MGoodCertificate lift_univariate(const MGoodCertificate& cert, const LaurentPoly& target);

/// First lacunary multiple of f violating the condition within horizon D.
std::optional<Counterexample> falsify(const LaurentPoly& f, long m, long D, Condition condition,
                                      const FalsifyOptions& opts = {});

/// Runs falsify for both conditions on every horizon up to D; returns the
/// witness if one is found, otherwise stores D in the certificate.
std::optional<Counterexample> confirm_horizon(MGoodCertificate& cert, long D, const FalsifyOptions& opts = {});

/// Checks the witness shape for a condition (used by tests and verify).
bool is_lacunary(const LaurentPoly& witness, long m, long D, Condition condition, const Exponent& shift);

nlohmann::json to_json(const MGoodCertificate& cert);
MGoodCertificate certificate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Counterexample& c);

struct VerificationReport {
    bool valid = true;
    std::vector<std::string> failures;
    std::vector<std::string> checks;
};

/// Re-checks the route inequalities from the serialized parameters and
/// compares them with values recomputed from f.
VerificationReport verify_certificate(const nlohmann::json& j);

/// Root-modulus inequalities at a given R and m; strict with margin 1e-9.
bool archimedean_holds(double R, long m, ArchimedeanParams* out = nullptr);

}  // namespace bohr
