#include "bohr/lacunary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "bohr/error.hpp"
#include "bohr/util.hpp"

namespace bohr {

namespace {

using u64 = std::uint64_t;
constexpr u64 P = Fingerprint::kPrime;

u64 pow_mod(u64 a, u64 e) {
    u64 r = 1;
    while (e) {
        if (e & 1) r = Fingerprint::mul(r, a);
        a = Fingerprint::mul(a, a);
        e >>= 1;
    }
    return r;
}

u64 inv_mod(u64 a) { return pow_mod(a, P - 2); }

u64 mpz_mod_p(const Integer& c) { return mpz_fdiv_ui(c.get_mpz_t(), P); }

}  // namespace

u64 Fingerprint::add(u64 a, u64 b) {
    u64 s = a + b;
    return s >= P ? s - P : s;
}

u64 Fingerprint::sub(u64 a, u64 b) { return a >= b ? a - b : a + P - b; }

u64 Fingerprint::mul(u64 a, u64 b) {
    unsigned __int128 x = static_cast<unsigned __int128>(a) * b;
    u64 lo = static_cast<u64>(x) & P;
    u64 hi = static_cast<u64>(x >> 61);
    u64 s = lo + hi;
    return s >= P ? s - P : s;
}

u64 Fingerprint::from_signed(long c) {
    long r = c % static_cast<long>(P);
    return static_cast<u64>(r < 0 ? r + static_cast<long>(P) : r);
}

Fingerprint::Fingerprint(const LaurentPoly& f, long extent, u64 seed) : dim_(f.dim()), extent_(extent) {
    if (f.is_zero()) throw PreconditionError("fingerprint modulo the zero polynomial");
    if (extent < 0) throw PreconditionError("fingerprint extent must be nonnegative");
    LaurentPoly fn = normalize_units(f);
    if (fn.is_monomial()) {
        trivial_ = true;
        return;
    }
    Exponent span = fn.max_exponent();
    main_var_ = static_cast<int>(std::max_element(span.begin(), span.end()) - span.begin());
    const long full = span[static_cast<std::size_t>(main_var_)];

    CounterRng rng(seed, 0x6669);
    auto draw = [&] { return 1 + rng() % (P - 1); };
    std::vector<u64> point(static_cast<std::size_t>(dim_), 1);
    std::vector<u64> g;
    for (int attempt = 0;; ++attempt) {
        for (int i = 0; i < dim_; ++i) point[static_cast<std::size_t>(i)] = i == main_var_ ? 1 : draw();
        std::vector<u64> coef(static_cast<std::size_t>(full + 1), 0);
        for (const auto& [e, c] : fn.terms()) {
            u64 v = mpz_mod_p(c);
            for (int i = 0; i < dim_; ++i)
                if (i != main_var_) v = mul(v, pow_mod(point[static_cast<std::size_t>(i)], static_cast<u64>(e[static_cast<std::size_t>(i)])));
            auto& slot = coef[static_cast<std::size_t>(e[static_cast<std::size_t>(main_var_)])];
            slot = add(slot, v);
        }
        std::size_t lo = 0, hi = coef.size() - 1;
        while (lo < coef.size() && coef[lo] == 0) ++lo;
        while (hi > lo && coef[hi] == 0) --hi;
        if (lo < coef.size() && hi > lo && (static_cast<long>(hi - lo) == full || attempt >= 8)) {
            g.assign(coef.begin() + static_cast<std::ptrdiff_t>(lo), coef.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
            break;
        }
        if (attempt >= 16) throw NumericalFailure("could not build a fingerprint for this polynomial");
    }

    // monic h of degree n
    const std::size_t n = g.size() - 1;
    const u64 lead_inv = inv_mod(g.back());
    std::vector<u64> h(n + 1);
    for (std::size_t j = 0; j <= n; ++j) h[j] = mul(g[j], lead_inv);
    std::vector<u64> lambda(n);
    for (auto& x : lambda) x = draw();
    auto read = [&](const std::vector<u64>& r) {
        u64 s = 0;
        for (std::size_t j = 0; j < n; ++j) s = add(s, mul(lambda[j], r[j]));
        return s;
    };

    t_table_.assign(static_cast<std::size_t>(2 * extent + 1), 0);
    std::vector<u64> r(n, 0);
    r[0] = 1;
    for (long k = 0; k <= extent; ++k) {
        t_table_[static_cast<std::size_t>(k + extent)] = read(r);
        u64 carry = r[n - 1];
        for (std::size_t j = n - 1; j > 0; --j) r[j] = r[j - 1];
        r[0] = 0;
        if (carry)
            for (std::size_t j = 0; j < n; ++j) r[j] = sub(r[j], mul(carry, h[j]));
    }
    // t^-1 = -(h_1 + h_2 t + ... + h_n t^(n-1)) / h_0
    const u64 h0_inv = inv_mod(h[0]);
    std::vector<u64> tinv(n);
    for (std::size_t j = 0; j < n; ++j) tinv[j] = sub(0, mul(h[j + 1], h0_inv));
    std::fill(r.begin(), r.end(), 0);
    r[0] = 1;
    for (long k = 1; k <= extent; ++k) {
        u64 low = r[0];
        for (std::size_t j = 0; j + 1 < n; ++j) r[j] = r[j + 1];
        r[n - 1] = 0;
        if (low)
            for (std::size_t j = 0; j < n; ++j) r[j] = add(r[j], mul(low, tinv[j]));
        t_table_[static_cast<std::size_t>(extent - k)] = read(r);
    }

    var_table_.assign(static_cast<std::size_t>(dim_), {});
    for (int i = 0; i < dim_; ++i) {
        if (i == main_var_) continue;
        auto& tab = var_table_[static_cast<std::size_t>(i)];
        tab.assign(static_cast<std::size_t>(2 * extent + 1), 1);
        const u64 a = point[static_cast<std::size_t>(i)], ainv = inv_mod(a);
        for (long k = 1; k <= extent; ++k) {
            tab[static_cast<std::size_t>(extent + k)] = mul(tab[static_cast<std::size_t>(extent + k - 1)], a);
            tab[static_cast<std::size_t>(extent - k)] = mul(tab[static_cast<std::size_t>(extent - k + 1)], ainv);
        }
    }
}

u64 Fingerprint::monomial(const Exponent& e) const {
    if (static_cast<int>(e.size()) != dim_) throw DimensionMismatch("fingerprint exponent has wrong length");
    if (trivial_) return 0;
    u64 v = 1;
    for (int i = 0; i < dim_; ++i) {
        long x = e[static_cast<std::size_t>(i)];
        if (x < -extent_ || x > extent_) throw PreconditionError("exponent outside the fingerprint range");
        const auto& tab = i == main_var_ ? t_table_ : var_table_[static_cast<std::size_t>(i)];
        v = mul(v, tab[static_cast<std::size_t>(x + extent_)]);
    }
    return v;
}

u64 Fingerprint::of(const LaurentPoly& p) const {
    u64 s = 0;
    for (const auto& [e, c] : p.terms()) s = add(s, mul(mpz_mod_p(c), monomial(e)));
    return s;
}

double search_space(std::size_t alphabet, std::size_t slots) {
    return std::pow(static_cast<double>(alphabet), static_cast<double>(slots));
}

LacunarySearch::LacunarySearch(const LaurentPoly& f, std::vector<Exponent> slots, std::vector<int> alphabet,
                               const Fingerprint& fp, Options opts)
    : f_(f), slots_(std::move(slots)), alphabet_(std::move(alphabet)), fp_(fp), opts_(opts) {
    if (alphabet_.empty() || alphabet_[0] != 0) throw PreconditionError("alphabet must start with 0");
    if (fp_.trivial()) return;
    const std::size_t K = slots_.size(), A = alphabet_.size();
    std::size_t max_suffix = 0;
    while (max_suffix < K && search_space(A, max_suffix + 1) <= static_cast<double>(opts_.table_limit))
        ++max_suffix;
    suffix_len_ = std::min((K + 1) / 2, max_suffix);
    prefix_len_ = K - suffix_len_;
    if (search_space(A, prefix_len_) > opts_.prefix_limit)
        throw PreconditionError("search space too large: " + std::to_string(K) + " slots over " +
                                std::to_string(A) + " symbols");
    prefix_count_ = static_cast<u64>(std::llround(search_space(A, prefix_len_)));

    slot_hash_.resize(K);
    for (std::size_t i = 0; i < K; ++i) slot_hash_[i] = fp_.monomial(slots_[i]);

    std::vector<u64> val(A);
    for (std::size_t a = 0; a < A; ++a) val[a] = Fingerprint::from_signed(alphabet_[a]);
    const std::size_t count = static_cast<std::size_t>(std::llround(search_space(A, suffix_len_)));
    table_.resize(count);
    std::vector<std::size_t> digit(suffix_len_, 0);
    u64 hash = 0;
    for (std::size_t s = 0; s < count; ++s) {
        table_[s] = {hash, static_cast<std::uint32_t>(s)};
        for (std::size_t q = suffix_len_; q-- > 0;) {
            const std::size_t slot = prefix_len_ + q;
            const u64 w = slot_hash_[slot];
            if (++digit[q] < A) {
                hash = Fingerprint::add(hash, Fingerprint::mul(Fingerprint::sub(val[digit[q]], val[digit[q] - 1]), w));
                break;
            }
            hash = Fingerprint::sub(hash, Fingerprint::mul(val[A - 1], w));
            digit[q] = 0;
        }
    }
    std::sort(table_.begin(), table_.end());
}

std::vector<int> LacunarySearch::decode(u64 prefix, std::uint32_t suffix) const {
    const std::size_t A = alphabet_.size();
    std::vector<int> c(slots_.size(), 0);
    for (std::size_t q = prefix_len_; q-- > 0;) {
        c[q] = alphabet_[prefix % A];
        prefix /= A;
    }
    for (std::size_t q = suffix_len_; q-- > 0;) {
        c[prefix_len_ + q] = alphabet_[suffix % A];
        suffix /= static_cast<std::uint32_t>(A);
    }
    return c;
}

LaurentPoly LacunarySearch::build(const std::vector<int>& coeffs) const {
    LaurentPoly p(f_.dim());
    for (std::size_t i = 0; i < slots_.size(); ++i)
        if (coeffs[i] != 0) p.add_term(slots_[i], coeffs[i]);
    return p;
}

std::optional<std::vector<int>> LacunarySearch::trivial_solution(const LaurentPoly& target, bool allow_zero) const {
    // f = c z^e: divisibility is divisibility of every coefficient by c.
    const Integer c = abs(f_.terms().begin()->second);
    LaurentPoly rest = target;
    std::vector<std::vector<int>> feasible(slots_.size());
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        Integer t = target.coeff(slots_[i]);
        rest.add_term(slots_[i], -t);
        for (int a : alphabet_)
            if (mpz_divisible_p(Integer(a - t).get_mpz_t(), c.get_mpz_t())) feasible[i].push_back(a);
        if (feasible[i].empty()) return std::nullopt;
    }
    for (const auto& [e, x] : rest.terms())
        if (!mpz_divisible_p(x.get_mpz_t(), c.get_mpz_t())) return std::nullopt;
    std::vector<int> best(slots_.size());
    bool zero = true;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        best[i] = feasible[i][0];
        zero = zero && best[i] == 0;
    }
    if (zero && !allow_zero) {
        for (std::size_t i = slots_.size(); i-- > 0;)
            if (feasible[i].size() > 1) {
                best[i] = feasible[i][1];
                return best;
            }
        return std::nullopt;
    }
    return best;
}

std::optional<std::vector<int>> LacunarySearch::first_solution(const LaurentPoly& target, bool allow_zero) const {
    if (fp_.trivial()) return trivial_solution(target, allow_zero);
    const std::size_t A = alphabet_.size();
    const u64 want = fp_.of(target);
    std::vector<u64> val(A);
    for (std::size_t a = 0; a < A; ++a) val[a] = Fingerprint::from_signed(alphabet_[a]);

    const int threads = resolve_threads(opts_.threads);
    const u64 chunk = std::max<u64>(1, prefix_count_ / (static_cast<u64>(threads) * 64));
    const u64 chunks = (prefix_count_ + chunk - 1) / chunk;
    std::atomic<u64> best_chunk{std::numeric_limits<u64>::max()};
    std::mutex mu;
    std::vector<int> best;

    parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t ci) {
        if (ci > best_chunk.load()) return;
        const u64 begin = ci * chunk, end = std::min(prefix_count_, begin + chunk);
        std::vector<std::size_t> digit(prefix_len_, 0);
        u64 rem = begin, hash = 0;
        for (std::size_t q = prefix_len_; q-- > 0;) {
            digit[q] = rem % A;
            rem /= A;
            hash = Fingerprint::add(hash, Fingerprint::mul(val[digit[q]], slot_hash_[q]));
        }
        for (u64 p = begin; p < end; ++p) {
            if (ci > best_chunk.load()) return;
            const u64 need = Fingerprint::sub(want, hash);
            auto it = std::lower_bound(table_.begin(), table_.end(), Entry{need, 0});
            for (; it != table_.end() && it->hash == need; ++it) {
                if (p == 0 && it->index == 0 && !allow_zero) continue;
                std::vector<int> c = decode(p, it->index);
                if (divides(f_, build(c) - target)) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (ci < best_chunk.load()) {
                        best_chunk.store(ci);
                        best = std::move(c);
                    }
                    return;
                }
                ++false_hits_;
            }
            for (std::size_t q = prefix_len_; q-- > 0;) {
                const u64 w = slot_hash_[q];
                if (++digit[q] < A) {
                    hash = Fingerprint::add(hash, Fingerprint::mul(Fingerprint::sub(val[digit[q]], val[digit[q] - 1]), w));
                    break;
                }
                hash = Fingerprint::sub(hash, Fingerprint::mul(val[A - 1], w));
                digit[q] = 0;
            }
        }
    });
    if (best_chunk.load() == std::numeric_limits<u64>::max()) return std::nullopt;
    return best;
}

}  // namespace bohr
