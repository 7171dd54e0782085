#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohr/laurent.hpp"

namespace bohr {

/// Real array on the box [-B, B]^d with a certified bound on the l1 mass
/// outside the box.
struct SummableArray {
    int dim = 1;
    int box_radius = 0;
    std::vector<double> values;  // row-major, last axis fastest
    double tail_bound = 0.0;     // bound on sum of |x_n| over ||n||_inf > B
    double decay_ratio = 0.0;    // envelope ratio per sup-norm shell
    double envelope = 0.0;       // envelope value at the anchor shell
    int anchor_shell = 0;        // outermost shell used for the fit
    int grid = 0;                // Fourier grid per axis
    double alias_estimate = 0.0;

    std::size_t side() const { return static_cast<std::size_t>(2 * box_radius + 1); }
    std::size_t flat(const Exponent& n) const;
    bool contains(const Exponent& n) const;
    double at(const Exponent& n) const;  // 0 outside the box
    Exponent index(std::size_t flat) const;

    double box_l1() const;
    double l1_norm() const { return box_l1() + tail_bound; }
    std::vector<double> shell_sums() const;  // sup-norm shells 0..B
};

/// Fourier coefficients of 1/f on the box, computed by a discrete inverse
/// transform on an N^d grid (N = 4B by default).
SummableArray fundamental_homoclinic(const LaurentPoly& f, int B, int grid = 0, int threads = 0);

/// Max deviation of the convolution w * f from the unit impulse on the box
/// interior [-B + r, B - r]^d, r the support radius of f.
double verify_homoclinic(const LaurentPoly& f, const SummableArray& w);

/// l1 mass of w over ||n||_1 >= R (box part plus tail bound).
double l1_tail(const SummableArray& w, long R);

/// Smallest R with l1_tail(w, R) < 1 / (2 H ||f||_1).
long gap_radius(const LaurentPoly& f, const SummableArray& w, int H);

/// Restriction of v = phi * f to S must again be a multiple of f when the
/// support of v splits into two clusters S, S2 at sup distance >= separation.
/// A positive `H` additionally enforces ||v||_inf <= H.
bool gap_check(const LaurentPoly& f, const LaurentPoly& phi, const std::vector<Exponent>& S,
               const std::vector<Exponent>& S2, long separation, int H = 0);

nlohmann::json to_json(const SummableArray& w, bool include_values = true);
SummableArray summable_from_json(const nlohmann::json& j);
std::string to_csv(const SummableArray& w);

}  // namespace bohr
