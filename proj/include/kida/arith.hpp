#pragma once

// Exact integer and residue arithmetic: checked 128-bit integers, trial-division
// factorization, multiplicative orders, p-adic valuations, and unit groups mod N
// with explicit coordinate maps.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kida/error.hpp"

namespace kida {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using Int = __int128;
using UInt = unsigned __int128;

// ---------------------------------------------------------------------------
// Checked integer operations. Overflow is an error, never wraparound.

inline Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) fail(ErrorCode::Overflow, "128-bit addition overflow");
    return r;
}

inline Int checked_sub(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) fail(ErrorCode::Overflow, "128-bit subtraction overflow");
    return r;
}

inline Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) fail(ErrorCode::Overflow, "128-bit multiplication overflow");
    return r;
}

inline Int checked_pow(Int base, unsigned e) {
    Int r = 1;
    while (e-- > 0) r = checked_mul(r, base);
    return r;
}

inline u64 checked_mul_u64(u64 a, u64 b) {
    u64 r;
    if (__builtin_mul_overflow(a, b, &r)) fail(ErrorCode::Overflow, "64-bit multiplication overflow");
    return r;
}

inline std::string to_string(Int v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    UInt u = neg ? UInt(0) - UInt(v) : UInt(v);
    std::string s;
    while (u > 0) {
        s.push_back(char('0' + int(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

/// Locale-independent decimal parse with an optional leading sign.
inline Int parse_int(std::string_view s) {
    require(!s.empty(), ErrorCode::ParseError, "empty integer");
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
    }
    require(i < s.size(), ErrorCode::ParseError, "integer without digits: '" + std::string(s) + "'");
    Int v = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        require(c >= '0' && c <= '9', ErrorCode::ParseError, "not a decimal integer: '" + std::string(s) + "'");
        v = checked_add(checked_mul(v, 10), Int(c - '0'));
    }
    return neg ? -v : v;
}

inline u64 parse_u64(std::string_view s) {
    Int v = parse_int(s);
    require(v >= 0 && v <= Int(UINT64_MAX), ErrorCode::ParseError, "not a nonnegative 64-bit integer: '" + std::string(s) + "'");
    return u64(v);
}

// ---------------------------------------------------------------------------
// Residue arithmetic on 64-bit moduli.

inline u64 mulmod(u64 a, u64 b, u64 m) { return u64(UInt(a) * b % m); }

inline u64 powmod(u64 base, u64 e, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    base %= m;
    while (e > 0) {
        if (e & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        e >>= 1;
    }
    return r;
}

/// Reduce a signed integer into [0, m).
inline u64 reduce(Int a, u64 m) {
    Int r = a % Int(m);
    if (r < 0) r += m;
    return u64(r);
}

inline u64 lcm_u64(u64 a, u64 b) {
    if (a == 0 || b == 0) return 0;
    return checked_mul_u64(a / std::gcd(a, b), b);
}

inline u64 ipow(u64 base, unsigned e) {
    u64 r = 1;
    while (e-- > 0) r = checked_mul_u64(r, base);
    return r;
}

/// Inverse of a modulo m; throws NotAUnit when gcd(a, m) != 1.
inline u64 invmod(u64 a, u64 m) {
    Int old_r = Int(a % m), r = Int(m), old_s = 1, s = 0;
    while (r != 0) {
        Int q = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    }
    require(old_r == 1 || m == 1, ErrorCode::NotAUnit, std::to_string(a) + " is not invertible mod " + std::to_string(m));
    return reduce(old_s, m);
}

/// Combine x = r1 mod m1 and x = r2 mod m2 for coprime moduli.
inline u64 crt_pair(u64 r1, u64 m1, u64 r2, u64 m2) {
    u64 m = checked_mul_u64(m1, m2);
    // x = r1 + m1 * t, t = (r2 - r1) * m1^{-1} mod m2
    u64 t = mulmod(reduce(Int(r2) - Int(r1), m2), invmod(m1 % m2, m2), m2);
    return u64((UInt(r1) + UInt(m1) * t) % m);
}

struct Residue {
    u64 value = 0;
    u64 modulus = 1;

    Residue() = default;
    Residue(Int v, u64 m) : value(0), modulus(m) {
        require(m >= 1, ErrorCode::InvalidArgument, "modulus must be positive");
        value = reduce(v, m);
    }

    friend bool operator==(const Residue&, const Residue&) = default;
};

// ---------------------------------------------------------------------------
// Factorization by trial division.

struct PrimePower {
    u64 prime;
    unsigned exponent;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

using Factorization = std::vector<PrimePower>;

inline Factorization factor(u64 n) {
    require(n >= 1, ErrorCode::InvalidArgument, "factor expects n >= 1");
    Factorization out;
    auto strip = [&](u64 d) {
        unsigned e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        if (e > 0) out.push_back({d, e});
    };
    strip(2);
    strip(3);
    for (u64 d = 5; d <= n / d; d += 6) {
        strip(d);
        strip(d + 2);
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

inline u64 expand(const Factorization& f) {
    u64 n = 1;
    for (auto [q, e] : f) n = checked_mul_u64(n, ipow(q, e));
    return n;
}

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    auto f = factor(n);
    return f.size() == 1 && f[0].exponent == 1;
}

inline u64 euler_phi(u64 n) {
    u64 phi = n;
    for (auto [q, e] : factor(n)) phi = phi / q * (q - 1);
    return phi;
}

inline u64 prime_to_part(u64 n, u64 p) {
    while (n % p == 0) n /= p;
    return n;
}

/// Largest t with p^t | n.
inline unsigned padic_val(Int n, u64 p) {
    require(n != 0, ErrorCode::ZeroInput, "p-adic valuation of zero");
    require(p >= 2, ErrorCode::InvalidArgument, "valuation base must be >= 2");
    unsigned t = 0;
    while (n % Int(p) == 0) {
        n /= Int(p);
        ++t;
    }
    return t;
}

/// If n is a power of p, returns the exponent.
inline std::optional<unsigned> log_p(u64 n, u64 p) {
    if (n == 0) return std::nullopt;
    unsigned t = 0;
    while (n % p == 0) {
        n /= p;
        ++t;
    }
    if (n != 1) return std::nullopt;
    return t;
}

/// Order of x in a group of exponent dividing `group_order`, given pow as a callable.
template <typename Pow>
u64 order_dividing(u64 group_order, Pow&& is_identity_after) {
    u64 ord = group_order;
    for (auto [q, e] : factor(group_order)) {
        for (unsigned i = 0; i < e && ord % q == 0 && is_identity_after(ord / q); ++i) ord /= q;
    }
    return ord;
}

/// Least k >= 1 with a^k = 1.
inline u64 mult_order(const Residue& a) {
    require(std::gcd(a.value, a.modulus) == 1, ErrorCode::NotAUnit,
            std::to_string(a.value) + " is not a unit mod " + std::to_string(a.modulus));
    if (a.modulus == 1) return 1;
    u64 phi = euler_phi(a.modulus);
    return order_dividing(phi, [&](u64 k) { return powmod(a.value, k, a.modulus) == 1; });
}

/// Discrete log of h to base g modulo m, where g has order n. Pohlig-Hellman with
/// baby-step giant-step on each prime factor. Throws InvalidArgument if h is not in <g>.
inline u64 discrete_log(u64 g, u64 h, u64 n, u64 m) {
    if (n == 1) {
        require(h % m == 1 % m, ErrorCode::InvalidArgument, "element outside cyclic subgroup");
        return 0;
    }
    auto bsgs = [m](u64 base, u64 target, u64 order) -> u64 {
        // solve base^x = target, 0 <= x < order
        u64 step = 1;
        while (step * step < order) ++step;
        std::unordered_map<u64, u64> baby;
        baby.reserve(step * 2);
        u64 cur = 1;
        for (u64 j = 0; j < step; ++j) {
            baby.emplace(cur, j);
            cur = mulmod(cur, base, m);
        }
        u64 giant = powmod(invmod(base, m), step, m);
        u64 y = target;
        for (u64 i = 0; i <= step; ++i) {
            if (auto it = baby.find(y); it != baby.end()) {
                u64 x = i * step + it->second;
                if (x < order) return x;
            }
            y = mulmod(y, giant, m);
        }
        fail(ErrorCode::InvalidArgument, "element outside cyclic subgroup");
    };

    u64 x = 0, mod_so_far = 1;
    for (auto [q, e] : factor(n)) {
        u64 qe = ipow(q, e);
        u64 gq = powmod(g, n / qe, m);
        u64 hq = powmod(h, n / qe, m);
        u64 gamma = powmod(gq, qe / q, m); // order q
        u64 xq = 0, qk = 1;
        u64 gq_inv = invmod(gq, m);
        for (unsigned k = 0; k < e; ++k) {
            u64 t = mulmod(powmod(gq_inv, xq, m), hq, m);
            t = powmod(t, qe / (qk * q), m);
            u64 d = bsgs(gamma, t, q);
            xq += d * qk;
            qk *= q;
        }
        x = crt_pair(x, mod_so_far, xq, qe);
        mod_so_far *= qe;
    }
    require(powmod(g, x, m) == h % m, ErrorCode::InvalidArgument, "element outside cyclic subgroup");
    return x;
}

/// Smallest primitive root modulo an odd prime q.
inline u64 primitive_root(u64 q) {
    if (q == 2) return 1;
    auto f = factor(q - 1);
    for (u64 g = 2;; ++g) {
        bool ok = true;
        for (auto [r, e] : f) {
            if (powmod(g, (q - 1) / r, q) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
}

// ---------------------------------------------------------------------------
// Subgroups of Z^r / diag(moduli), given by generator coordinate vectors.

using Coords = std::vector<u64>;

/// Order of the subgroup generated by `gens` inside Z/n_1 x ... x Z/n_r.
/// Computed as |G| / [Z^r : L] where L is spanned by the gens and the n_i e_i,
/// the index being the product of the Hermite pivots.
inline u64 subgroup_order(std::span<const u64> moduli, const std::vector<Coords>& gens) {
    const std::size_t r = moduli.size();
    std::vector<Coords> pool;
    pool.reserve(gens.size() + r);
    for (const auto& g : gens) {
        require(g.size() == r, ErrorCode::InvalidArgument, "coordinate vector of wrong rank");
        Coords row(r);
        for (std::size_t j = 0; j < r; ++j) row[j] = g[j] % moduli[j];
        pool.push_back(std::move(row));
    }
    u64 total = 1, index = 1;
    for (u64 n : moduli) total = checked_mul_u64(total, n);

    // Pool rows are reduced mod n_j in columns j >= col, which is harmless because
    // n_j e_j (j >= col) still lies in the span of what remains.
    for (std::size_t col = 0; col < r; ++col) {
        Coords diag(r, 0);
        diag[col] = moduli[col];
        pool.push_back(std::move(diag));
        // Euclid on column `col` until a single nonzero entry remains.
        for (;;) {
            std::size_t best = pool.size();
            std::size_t nonzero = 0;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (pool[i][col] == 0) continue;
                ++nonzero;
                if (best == pool.size() || pool[i][col] < pool[best][col]) best = i;
            }
            if (nonzero <= 1) {
                if (best == pool.size()) fail(ErrorCode::InvalidArgument, "lattice lost full rank");
                index = checked_mul_u64(index, pool[best][col]);
                pool.erase(pool.begin() + std::ptrdiff_t(best));
                break;
            }
            const Coords& b = pool[best];
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (i == best || pool[i][col] == 0) continue;
                Coords& a = pool[i];
                u64 q = a[col] / b[col];
                a[col] -= q * b[col];
                for (std::size_t j = col + 1; j < r; ++j) {
                    u64 sub = mulmod(q % moduli[j], b[j] % moduli[j], moduli[j]);
                    a[j] = (a[j] % moduli[j] + moduli[j] - sub) % moduli[j];
                }
            }
        }
        for (auto& row : pool)
            for (std::size_t j = col + 1; j < r; ++j) row[j] %= moduli[j];
    }
    return total / index;
}

inline bool subgroup_contains(std::span<const u64> moduli, const std::vector<Coords>& gens, const Coords& x) {
    auto with = gens;
    with.push_back(x);
    return subgroup_order(moduli, with) == subgroup_order(moduli, gens);
}

/// Generators of the kernel of x -> sum x_i * images_i (mod m) restricted to <gens>,
/// where images_i is the image of gens_i in Z/m.
inline std::vector<Coords> cyclic_kernel(std::span<const u64> moduli, std::vector<Coords> gens,
                                         std::vector<u64> images, u64 m) {
    const std::size_t r = moduli.size();
    for (auto& v : images) v %= m;
    if (m == 1) return gens;
    auto axpy = [&](Coords& a, const Coords& b, u64 q) {
        for (std::size_t j = 0; j < r; ++j) {
            u64 sub = mulmod(q % moduli[j], b[j] % moduli[j], moduli[j]);
            a[j] = (a[j] % moduli[j] + moduli[j] - sub) % moduli[j];
        }
    };
    // Euclid on the images; generators follow along.
    for (;;) {
        std::size_t best = images.size(), nonzero = 0;
        for (std::size_t i = 0; i < images.size(); ++i) {
            if (images[i] == 0) continue;
            ++nonzero;
            if (best == images.size() || images[i] < images[best]) best = i;
        }
        if (nonzero <= 1) {
            std::vector<Coords> out;
            for (std::size_t i = 0; i < gens.size(); ++i) {
                if (i == best) {
                    u64 k = m / std::gcd(images[i], m);
                    Coords c = gens[i];
                    for (std::size_t j = 0; j < r; ++j) c[j] = mulmod(c[j], k % moduli[j], moduli[j]);
                    out.push_back(std::move(c));
                } else {
                    out.push_back(gens[i]);
                }
            }
            return out;
        }
        for (std::size_t i = 0; i < images.size(); ++i) {
            if (i == best || images[i] == 0) continue;
            u64 q = images[i] / images[best];
            images[i] -= q * images[best];
            axpy(gens[i], gens[best], q);
        }
    }
}

// ---------------------------------------------------------------------------
// Unit group (Z/N)^x.

/// One cyclic factor of (Z/q^a)^x: generated by `generator` modulo q^a.
struct UnitComponent {
    u64 prime;
    unsigned exponent;
    u64 prime_power;
    u64 generator;
    u64 order;
};

/// (Z/N)^x presented two ways: as a product of cyclic components (one per odd
/// prime power, up to two for the 2-part) and by its invariant factors
/// d_1 | d_2 | ... | d_r in ascending order. Both coordinate systems come with
/// residue maps in each direction.
class UnitGroup {
public:
    explicit UnitGroup(u64 modulus) : modulus_(modulus) {
        require(modulus >= 1, ErrorCode::InvalidArgument, "unit group modulus must be positive");
        for (auto [q, e] : factor(modulus)) {
            u64 qe = ipow(q, e);
            if (q == 2) {
                if (e == 2) components_.push_back({2, e, qe, 3, 2});
                if (e >= 3) {
                    components_.push_back({2, e, qe, qe - 1, 2});
                    components_.push_back({2, e, qe, 5, qe / 4});
                }
            } else {
                u64 g = primitive_root(q);
                if (e >= 2 && powmod(g, q - 1, q * q) == 1) g += q;
                components_.push_back({q, e, qe, g % qe, qe / q * (q - 1)});
            }
        }
        build_invariant_factors();
    }

    u64 modulus() const { return modulus_; }
    const std::vector<UnitComponent>& components() const { return components_; }
    std::vector<u64> component_orders() const {
        std::vector<u64> out;
        for (const auto& c : components_) out.push_back(c.order);
        return out;
    }
    const std::vector<u64>& invariant_factors() const { return invariant_factors_; }

    u64 order() const {
        u64 n = 1;
        for (const auto& c : components_) n *= c.order;
        return n;
    }

    bool is_unit(u64 x) const { return std::gcd(x % modulus_, modulus_) == 1; }

    /// Discrete-log coordinates in the component basis. Components belonging to
    /// `skip_prime` are set to zero, and x only has to be a unit at the other primes.
    Coords component_coords(u64 x, u64 skip_prime = 0) const {
        Coords out(components_.size(), 0);
        for (std::size_t i = 0; i < components_.size(); ++i) {
            const auto& c = components_[i];
            if (c.prime == skip_prime) continue;
            u64 y = x % c.prime_power;
            require(std::gcd(y, c.prime) == 1, ErrorCode::NotAUnit,
                    std::to_string(x) + " is not a unit mod " + std::to_string(c.prime_power));
            if (c.prime == 2) {
                if (c.generator == c.prime_power - 1) { // sign component
                    out[i] = (y % 4 == 1) ? 0 : 1;
                } else { // <5>, paired with the preceding sign component
                    u64 s = (y % 4 == 1) ? y : c.prime_power - y;
                    out[i] = discrete_log(c.generator, s, c.order, c.prime_power);
                }
            } else {
                out[i] = discrete_log(c.generator, y, c.order, c.prime_power);
            }
        }
        return out;
    }

    u64 from_component_coords(const Coords& x) const {
        require(x.size() == components_.size(), ErrorCode::InvalidArgument, "coordinate vector of wrong rank");
        u64 acc = 0, acc_mod = 1;
        if (modulus_ % 4 == 2) acc = 1, acc_mod = 2; // (Z/2)^x is trivial but the residue must be odd
        std::size_t i = 0;
        while (i < components_.size()) {
            u64 q = components_[i].prime, qe = components_[i].prime_power;
            u64 val = 1;
            for (; i < components_.size() && components_[i].prime == q; ++i)
                val = mulmod(val, powmod(components_[i].generator, x[i] % components_[i].order, qe), qe);
            acc = crt_pair(acc, acc_mod, val, qe);
            acc_mod *= qe;
        }
        return modulus_ == 1 ? 0 : acc % modulus_;
    }

    /// Coordinates in the invariant-factor basis.
    Coords coordinates(u64 x) const {
        Coords comp = component_coords(x);
        Coords out(invariant_factors_.size(), 0);
        std::vector<u64> built(invariant_factors_.size(), 1);
        for (const auto& s : slots_) {
            u64 part = comp[s.component] % s.prime_power;
            out[s.slot] = crt_pair(out[s.slot], built[s.slot], part, s.prime_power);
            built[s.slot] *= s.prime_power;
        }
        return out;
    }

    u64 residue(const Coords& y) const {
        require(y.size() == invariant_factors_.size(), ErrorCode::InvalidArgument, "coordinate vector of wrong rank");
        Coords comp(components_.size(), 0);
        std::vector<u64> built(components_.size(), 1);
        for (const auto& s : slots_) {
            u64 part = y[s.slot] % s.prime_power;
            comp[s.component] = crt_pair(comp[s.component], built[s.component], part, s.prime_power);
            built[s.component] *= s.prime_power;
        }
        return from_component_coords(comp);
    }

private:
    // Assignment of the r^a-part of a cyclic component to an invariant-factor slot.
    struct Slot {
        std::size_t component;
        std::size_t slot;
        u64 prime_power;
    };

    void build_invariant_factors() {
        std::map<u64, std::vector<std::pair<unsigned, std::size_t>>> by_prime; // r -> (a, component)
        for (std::size_t i = 0; i < components_.size(); ++i)
            for (auto [r, a] : factor(components_[i].order)) by_prime[r].push_back({a, i});
        std::size_t rank = 0;
        for (auto& [r, v] : by_prime) rank = std::max(rank, v.size());
        invariant_factors_.assign(rank, 1);
        for (auto& [r, v] : by_prime) {
            std::stable_sort(v.begin(), v.end(), [](auto& x, auto& y) { return x.first > y.first; });
            for (std::size_t k = 0; k < v.size(); ++k) {
                std::size_t slot = rank - 1 - k;
                u64 rp = ipow(r, v[k].first);
                invariant_factors_[slot] *= rp;
                slots_.push_back({v[k].second, slot, rp});
            }
        }
    }

    u64 modulus_;
    std::vector<UnitComponent> components_;
    std::vector<u64> invariant_factors_;
    std::vector<Slot> slots_;
};

inline UnitGroup unit_group(u64 n) { return UnitGroup(n); }

} // namespace kida
