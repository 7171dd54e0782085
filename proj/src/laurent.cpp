#include "bohr/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "bohr/error.hpp"
#include "bohr/spectra.hpp"

namespace bohr {

namespace {

void require_same_dim(const LaurentPoly& a, const LaurentPoly& b, const char* op) {
    if (a.dim() != b.dim())
        throw DimensionMismatch(std::string(op) + ": operands have dimensions " +
                                std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
}

Exponent add_exponents(const Exponent& a, const Exponent& b) {
    Exponent r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

}  // namespace

LaurentPoly::LaurentPoly(int dim) : dim_(dim) {
    if (dim < 1) throw PreconditionError("polynomial dimension must be positive");
}

LaurentPoly LaurentPoly::constant(int dim, const Integer& c) {
    LaurentPoly p(dim);
    p.add_term(Exponent(dim, 0), c);
    return p;
}

LaurentPoly LaurentPoly::monomial(const Exponent& e, const Integer& c) {
    LaurentPoly p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
}

LaurentPoly LaurentPoly::from_terms(int dim, const std::vector<std::pair<Exponent, Integer>>& terms) {
    LaurentPoly p(dim);
    for (const auto& [e, c] : terms) p.add_term(e, c);
    return p;
}

Integer LaurentPoly::coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Integer(0) : it->second;
}

std::vector<Exponent> LaurentPoly::support() const {
    std::vector<Exponent> s;
    s.reserve(terms_.size());
    for (const auto& kv : terms_) s.push_back(kv.first);
    return s;
}

void LaurentPoly::add_term(const Exponent& e, const Integer& c) {
    if (static_cast<int>(e.size()) != dim_)
        throw DimensionMismatch("exponent of length " + std::to_string(e.size()) +
                                " in a polynomial of dimension " + std::to_string(dim_));
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Integer LaurentPoly::l1_norm() const {
    Integer s = 0;
    for (const auto& kv : terms_) s += abs(kv.second);
    return s;
}

Integer LaurentPoly::linf_norm() const {
    Integer s = 0;
    for (const auto& kv : terms_) {
        Integer a = abs(kv.second);
        if (a > s) s = a;
    }
    return s;
}

Integer LaurentPoly::content() const {
    Integer g = 0;
    for (const auto& kv : terms_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), kv.second.get_mpz_t());
    return g;
}

Exponent LaurentPoly::min_exponent() const {
    Exponent r(dim_, 0);
    bool first = true;
    for (const auto& [e, c] : terms_) {
        for (int i = 0; i < dim_; ++i) r[i] = first ? e[i] : std::min(r[i], e[i]);
        first = false;
    }
    return r;
}

Exponent LaurentPoly::max_exponent() const {
    Exponent r(dim_, 0);
    bool first = true;
    for (const auto& [e, c] : terms_) {
        for (int i = 0; i < dim_; ++i) r[i] = first ? e[i] : std::max(r[i], e[i]);
        first = false;
    }
    return r;
}

long LaurentPoly::support_radius() const {
    long r = 0;
    for (const auto& kv : terms_)
        for (long x : kv.first) r = std::max(r, std::labs(x));
    return r;
}

LaurentPoly LaurentPoly::shifted(const Exponent& e) const {
    if (static_cast<int>(e.size()) != dim_) throw DimensionMismatch("shift has wrong length");
    LaurentPoly p(dim_);
    for (const auto& [x, c] : terms_) p.terms_.emplace_hint(p.terms_.end(), add_exponents(x, e), c);
    return p;
}

LaurentPoly LaurentPoly::scaled(const Integer& c) const {
    LaurentPoly p(dim_);
    if (c == 0) return p;
    for (const auto& [x, a] : terms_) p.terms_.emplace_hint(p.terms_.end(), x, a * c);
    return p;
}

std::complex<double> LaurentPoly::evaluate(std::span<const std::complex<double>> z) const {
    if (static_cast<int>(z.size()) != dim_) throw DimensionMismatch("evaluation point has wrong length");
    std::complex<double> s = 0;
    for (const auto& [e, c] : terms_) {
        std::complex<double> t = c.get_d();
        for (int i = 0; i < dim_; ++i)
            if (e[i] != 0) t *= std::pow(z[i], static_cast<int>(e[i]));
        s += t;
    }
    return s;
}

std::complex<long double> LaurentPoly::evaluate1(std::complex<long double> z) const {
    if (dim_ != 1) throw DimensionMismatch("evaluate1 needs a univariate polynomial");
    std::complex<long double> s = 0;
    for (const auto& [e, c] : terms_)
        s += static_cast<long double>(c.get_d()) * std::pow(z, static_cast<int>(e[0]));
    return s;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& other) {
    require_same_dim(*this, other, "add");
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& other) {
    require_same_dim(*this, other, "sub");
    for (const auto& [e, c] : other.terms_) add_term(e, -c);
    return *this;
}

LaurentPoly LaurentPoly::operator-() const { return scaled(-1); }

LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) { return mul(a, b); }

LaurentPoly mul(const LaurentPoly& f, const LaurentPoly& g) {
    require_same_dim(f, g, "mul");
    LaurentPoly p(f.dim());
    Integer prod;
    for (const auto& [e1, c1] : f.terms())
        for (const auto& [e2, c2] : g.terms()) {
            mpz_mul(prod.get_mpz_t(), c1.get_mpz_t(), c2.get_mpz_t());
            p.add_term(add_exponents(e1, e2), prod);
        }
    return p;
}

LaurentPoly involute(const LaurentPoly& f) {
    LaurentPoly p(f.dim());
    for (const auto& [e, c] : f.terms()) {
        Exponent r(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) r[i] = -e[i];
        p.add_term(r, c);
    }
    return p;
}

// ---------------------------------------------------------------- parsing

namespace {

class Parser {
public:
    Parser(std::string_view s, int dim) : s_(s), dim_(dim) {}

    LaurentPoly run() {
        struct RawTerm {
            std::map<int, long> powers;
            Integer coeff;
        };
        std::vector<RawTerm> raw;
        skip_ws();
        if (at_end()) fail("empty polynomial");
        bool first = true;
        while (true) {
            skip_ws();
            int sign = 1;
            if (match_sign(sign)) {
                skip_ws();
            } else if (!first) {
                fail("expected '+' or '-'");
            }
            RawTerm t;
            t.coeff = sign;
            parse_term(t.coeff, t.powers);
            raw.push_back(std::move(t));
            first = false;
            skip_ws();
            if (at_end()) break;
        }
        int d = dim_;
        if (d == 0) d = std::max(1, max_index_);
        if (max_index_ > d)
            throw DimensionMismatch("variable z" + std::to_string(max_index_) +
                                    " exceeds dimension " + std::to_string(d));
        if (style_ == Style::plain && d != 1)
            throw DimensionMismatch("bare variable 'z' used in a polynomial of dimension " +
                                    std::to_string(d));
        LaurentPoly p(d);
        for (auto& t : raw) {
            Exponent e(d, 0);
            for (auto [i, k] : t.powers) e[i - 1] += k;
            p.add_term(e, t.coeff);
        }
        return p;
    }

private:
    enum class Style { unknown, plain, indexed };

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
    bool at_end() const { return pos_ >= s_.size(); }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool match_sign(int& sign) {
        if (at_end()) return false;
        if (s_[pos_] == '+') { ++pos_; return true; }
        if (s_[pos_] == '-') { sign = -1; ++pos_; return true; }
        if (s_.substr(pos_, 3) == "\xE2\x88\x92") {  // unicode minus
            sign = -1;
            pos_ += 3;
            return true;
        }
        return false;
    }

    std::string digits() {
        std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    long parse_small_int() {
        std::size_t start = pos_;
        std::string ds = digits();
        if (ds.empty()) fail("expected integer");
        if (ds.size() > 15) { pos_ = start; fail("exponent too large"); }
        return std::stol(ds);
    }

    void parse_term(Integer& coeff, std::map<int, long>& powers) {
        bool have_factor = false;
        if (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            coeff *= Integer(digits());
            have_factor = true;
            skip_ws();
            if (!at_end() && s_[pos_] == '*') {
                ++pos_;
                skip_ws();
            } else if (at_end() || s_[pos_] != 'z') {
                return;
            }
        }
        while (true) {
            skip_ws();
            if (at_end() || s_[pos_] != 'z') {
                if (!have_factor) fail("expected coefficient or variable");
                fail("expected variable after '*'");
            }
            parse_factor(powers);
            have_factor = true;
            skip_ws();
            if (!at_end() && s_[pos_] == '*') {
                ++pos_;
                continue;
            }
            return;
        }
    }

    void parse_factor(std::map<int, long>& powers) {
        std::size_t var_pos = pos_;
        ++pos_;  // 'z'
        int index = 1;
        Style st = Style::plain;
        if (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            long i = parse_small_int();
            if (i < 1) { pos_ = var_pos; fail("variable index must be at least 1"); }
            index = static_cast<int>(i);
            st = Style::indexed;
        }
        if (style_ == Style::unknown) {
            style_ = st;
        } else if (style_ != st) {
            pos_ = var_pos;
            throw DimensionMismatch("mixed bare 'z' and indexed variables at position " +
                                    std::to_string(var_pos));
        }
        max_index_ = std::max(max_index_, index);
        long k = 1;
        skip_ws();
        if (!at_end() && s_[pos_] == '^') {
            ++pos_;
            skip_ws();
            bool paren = false;
            if (!at_end() && s_[pos_] == '(') { paren = true; ++pos_; skip_ws(); }
            int sign = 1;
            match_sign(sign);
            skip_ws();
            k = sign * parse_small_int();
            if (paren) {
                skip_ws();
                if (at_end() || s_[pos_] != ')') fail("expected ')'");
                ++pos_;
            }
        }
        powers[index] += k;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int dim_;
    int max_index_ = 0;
    Style style_ = Style::unknown;
};

std::string var_name(int d, int i) { return d == 1 ? std::string("z") : "z" + std::to_string(i + 1); }

}  // namespace

LaurentPoly parse(std::string_view text, int dim) { return Parser(text, dim).run(); }

std::string render(const LaurentPoly& f) {
    if (f.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [e, c] : f.terms()) {
        bool neg = c < 0;
        if (first) {
            if (neg) out << "-";
        } else {
            out << (neg ? " - " : " + ");
        }
        first = false;
        Integer a = abs(c);
        std::string mono;
        for (int i = 0; i < f.dim(); ++i) {
            if (e[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += var_name(f.dim(), i);
            if (e[i] != 1) mono += "^" + std::to_string(e[i]);
        }
        if (mono.empty()) {
            out << a.get_str();
        } else if (a == 1) {
            out << mono;
        } else {
            out << a.get_str() << "*" << mono;
        }
    }
    return out.str();
}

nlohmann::json to_json(const LaurentPoly& f) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, c] : f.terms()) {
        nlohmann::json coeff;
        if (c.fits_slong_p())
            coeff = c.get_si();
        else
            coeff = c.get_str();
        terms.push_back(nlohmann::json::array({e, coeff}));
    }
    return {{"dim", f.dim()}, {"terms", terms}};
}

LaurentPoly poly_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("terms"))
        throw PreconditionError("polynomial JSON needs 'dim' and 'terms'");
    int d = j.at("dim").get<int>();
    LaurentPoly p(d);
    for (const auto& t : j.at("terms")) {
        if (!t.is_array() || t.size() != 2) throw PreconditionError("term must be [exponent, coeff]");
        Exponent e = t[0].get<Exponent>();
        Integer c = t[1].is_string() ? Integer(t[1].get<std::string>()) : Integer(t[1].get<long>());
        p.add_term(e, c);
    }
    return p;
}

LaurentPoly parse_any(std::string_view text, int dim) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size() && text[i] == '{') {
        LaurentPoly p = poly_from_json(nlohmann::json::parse(text));
        if (dim != 0 && p.dim() != dim) throw DimensionMismatch("JSON polynomial has a different dimension");
        return p;
    }
    return parse(text, dim);
}

// ---------------------------------------------------------------- division

LaurentPoly normalize_units(const LaurentPoly& f, Exponent* shift) {
    Exponent s = f.min_exponent();
    for (auto& x : s) x = -x;
    if (shift) *shift = s;
    return f.shifted(s);
}

namespace {

// Leading term order: last variable most significant.
struct LastVarFirst {
    bool operator()(const Exponent& a, const Exponent& b) const {
        for (std::size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    }
};

}  // namespace

std::optional<LaurentPoly> divides(const LaurentPoly& f, const LaurentPoly& v) {
    if (f.is_zero()) throw PreconditionError("divides: divisor is the zero polynomial");
    require_same_dim(f, v, "divides");
    const int d = f.dim();
    if (v.is_zero()) return LaurentPoly(d);

    Exponent sf, sv;
    LaurentPoly fn = normalize_units(f, &sf);
    LaurentPoly vn = normalize_units(v, &sv);

    std::vector<std::pair<Exponent, Integer>> fterms(fn.terms().begin(), fn.terms().end());
    std::sort(fterms.begin(), fterms.end(),
              [](const auto& a, const auto& b) { return LastVarFirst{}(a.first, b.first); });
    const Exponent& lead_e = fterms.back().first;
    const Integer& lead_c = fterms.back().second;

    // Degree in each variable is additive, so a cheap necessary condition.
    Exponent fmax = fn.max_exponent(), vmax = vn.max_exponent();
    for (int i = 0; i < d; ++i)
        if (vmax[i] < fmax[i]) return std::nullopt;

    std::map<Exponent, Integer, LastVarFirst> rem(vn.terms().begin(), vn.terms().end());
    LaurentPoly q(d);
    Exponent t(d), target(d);
    Integer c, prod;
    while (!rem.empty()) {
        auto it = std::prev(rem.end());
        for (int i = 0; i < d; ++i) {
            t[i] = it->first[i] - lead_e[i];
            if (t[i] < 0) return std::nullopt;
        }
        if (!mpz_divisible_p(it->second.get_mpz_t(), lead_c.get_mpz_t())) return std::nullopt;
        mpz_divexact(c.get_mpz_t(), it->second.get_mpz_t(), lead_c.get_mpz_t());
        q.add_term(t, c);
        rem.erase(it);
        for (std::size_t j = 0; j + 1 < fterms.size(); ++j) {
            for (int i = 0; i < d; ++i) target[i] = fterms[j].first[i] + t[i];
            mpz_mul(prod.get_mpz_t(), c.get_mpz_t(), fterms[j].second.get_mpz_t());
            auto [pos, inserted] = rem.try_emplace(target, 0);
            pos->second -= prod;
            if (pos->second == 0) rem.erase(pos);
        }
    }
    Exponent back(d);
    for (int i = 0; i < d; ++i) back[i] = sf[i] - sv[i];
    return q.shifted(back);
}

// ---------------------------------------------------------------- univariate

std::vector<Integer> dense_coefficients(const LaurentPoly& f, long* shift) {
    if (f.dim() != 1) throw DimensionMismatch("dense coefficients need a univariate polynomial");
    if (f.is_zero()) {
        if (shift) *shift = 0;
        return {};
    }
    long lo = f.terms().begin()->first[0];
    long hi = f.terms().rbegin()->first[0];
    std::vector<Integer> c(static_cast<std::size_t>(hi - lo + 1), 0);
    for (const auto& [e, a] : f.terms()) c[static_cast<std::size_t>(e[0] - lo)] = a;
    if (shift) *shift = lo;
    return c;
}

LaurentPoly from_dense(const std::vector<Integer>& c, long shift) {
    LaurentPoly p(1);
    for (std::size_t i = 0; i < c.size(); ++i) p.add_term({static_cast<long>(i) + shift}, c[i]);
    return p;
}

long degree_span(const LaurentPoly& f) {
    if (f.dim() != 1) throw DimensionMismatch("degree_span needs a univariate polynomial");
    if (f.is_zero()) return 0;
    return f.terms().rbegin()->first[0] - f.terms().begin()->first[0];
}

unsigned long euler_phi(unsigned long n) {
    unsigned long r = n;
    for (unsigned long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        while (n % p == 0) n /= p;
        r -= r / p;
    }
    if (n > 1) r -= r / n;
    return r;
}

LaurentPoly cyclotomic(unsigned n) {
    if (n == 0) throw PreconditionError("cyclotomic index must be positive");
    static std::mutex mu;
    static std::map<unsigned, LaurentPoly> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    LaurentPoly p = LaurentPoly::monomial({static_cast<long>(n)}) - LaurentPoly::constant(1, 1);
    for (unsigned d = 1; d < n; ++d) {
        if (n % d) continue;
        auto q = divides(cyclotomic(d), p);
        if (!q) throw NumericalFailure("cyclotomic recursion failed");
        p = *q;
    }
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(n, p);
    return p;
}

LaurentPoly KroneckerForm::reconstruct() const {
    LaurentPoly p = LaurentPoly::monomial({monomial_shift}, sign);
    for (const auto& fac : factors) {
        LaurentPoly phi = cyclotomic(fac.index);
        LaurentPoly dilated(1);
        for (const auto& [e, c] : phi.terms()) dilated.add_term({e[0] * static_cast<long>(fac.dilation)}, c);
        p = mul(p, dilated);
    }
    return p;
}

std::optional<KroneckerForm> kronecker_factor(const LaurentPoly& f) {
    if (f.dim() != 1) throw PreconditionError("kronecker_factor needs a univariate polynomial");
    if (f.is_zero()) throw PreconditionError("kronecker_factor of the zero polynomial");
    long shift = 0;
    std::vector<Integer> c = dense_coefficients(f, &shift);
    KroneckerForm form;
    form.monomial_shift = shift;
    const long deg = static_cast<long>(c.size()) - 1;
    if (abs(c.front()) != 1 || abs(c.back()) != 1) return std::nullopt;
    if (deg == 0) {
        form.sign = sgn(c.front());
        return form;
    }
    if (f.content() != 1) return std::nullopt;

    if (deg <= 256) {
        RootData roots = complex_roots(f);
        for (const auto& r : roots.roots)
            if (std::abs(std::abs(r) - 1.0) >= 1e-8) return std::nullopt;
    }

    LaurentPoly g = from_dense(c);
    long remaining = deg;
    const unsigned long limit = 2UL * static_cast<unsigned long>(deg) * static_cast<unsigned long>(deg) + 2;
    for (unsigned long n = 1; n <= limit && remaining > 0; ++n) {
        unsigned long ph = euler_phi(n);
        if (ph > static_cast<unsigned long>(remaining)) continue;
        LaurentPoly phi = cyclotomic(static_cast<unsigned>(n));
        while (remaining >= static_cast<long>(ph)) {
            auto q = divides(phi, g);
            if (!q) break;
            g = *q;
            remaining -= static_cast<long>(ph);
            form.factors.push_back({static_cast<unsigned>(n), 1});
        }
    }
    if (remaining != 0 || !g.is_monomial()) return std::nullopt;
    Integer lc = g.terms().begin()->second;
    if (abs(lc) != 1 || g.terms().begin()->first[0] != 0) return std::nullopt;
    form.sign = sgn(lc);
    return form;
}

long sup_distance(const std::vector<Exponent>& a, const std::vector<Exponent>& b) {
    long best = std::numeric_limits<long>::max();
    for (const auto& x : a)
        for (const auto& y : b) {
            long dist = 0;
            for (std::size_t i = 0; i < x.size(); ++i) dist = std::max(dist, std::labs(x[i] - y[i]));
            best = std::min(best, dist);
        }
    return best;
}

}  // namespace bohr
