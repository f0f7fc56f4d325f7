#pragma once

// Finite abelian groups, their character groups, and multiplicities of characters
// in finite-dimensional representations. Characters are exponent vectors; every
// pairing is an exact count or an exact cyclotomic-integer sum.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "kida/arith.hpp"
#include "kida/error.hpp"

namespace kida::chargroup {

using Element = std::vector<u64>;

/// Z/d_1 x ... x Z/d_r with d_1 | d_2 | ... | d_r, each d_i >= 2. The empty
/// list is the trivial group.
class FiniteAbelianGroup {
public:
    FiniteAbelianGroup() = default;

    explicit FiniteAbelianGroup(std::vector<u64> invariant_factors) : factors_(std::move(invariant_factors)) {
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            require(factors_[i] >= 2, ErrorCode::InvalidArgument, "invariant factors must be >= 2");
            if (i > 0)
                require(factors_[i] % factors_[i - 1] == 0, ErrorCode::InvalidArgument,
                        "invariant factors must form a divisibility chain");
        }
    }

    static FiniteAbelianGroup cyclic(u64 n) {
        return n == 1 ? FiniteAbelianGroup() : FiniteAbelianGroup({n});
    }

    const std::vector<u64>& invariant_factors() const { return factors_; }
    std::size_t rank() const { return factors_.size(); }

    u64 order() const {
        u64 n = 1;
        for (u64 d : factors_) n = checked_mul_u64(n, d);
        return n;
    }

    u64 exponent() const { return factors_.empty() ? 1 : factors_.back(); }

    bool is_element(const Element& g) const {
        if (g.size() != factors_.size()) return false;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g[i] >= factors_[i]) return false;
        return true;
    }

    std::size_t index_of(const Element& g) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < factors_.size(); ++i) idx = idx * factors_[i] + g[i];
        return idx;
    }

    Element element_at(std::size_t idx) const {
        Element g(factors_.size());
        for (std::size_t i = factors_.size(); i-- > 0;) {
            g[i] = idx % factors_[i];
            idx /= factors_[i];
        }
        return g;
    }

    Element identity() const { return Element(factors_.size(), 0); }

    Element add(const Element& a, const Element& b) const {
        Element c(factors_.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = (a[i] + b[i]) % factors_[i];
        return c;
    }

    Element scale(const Element& a, u64 k) const {
        Element c(factors_.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = mulmod(a[i], k % factors_[i], factors_[i]);
        return c;
    }

    std::vector<Element> elements() const {
        std::vector<Element> out;
        u64 n = order();
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(element_at(i));
        return out;
    }

    friend bool operator==(const FiniteAbelianGroup&, const FiniteAbelianGroup&) = default;

private:
    std::vector<u64> factors_;
};

inline std::string to_string(const FiniteAbelianGroup& g) {
    if (g.rank() == 0) return "1";
    std::string s;
    for (u64 d : g.invariant_factors()) s += (s.empty() ? "Z/" : " x Z/") + std::to_string(d);
    return s;
}

/// g -> zeta^{sum c_i g_i (L/d_i)}, zeta a primitive L-th root of unity, L the exponent.
struct Character {
    std::vector<u64> exponents;
    friend bool operator==(const Character&, const Character&) = default;
    friend auto operator<=>(const Character&, const Character&) = default;
};

inline Character trivial_character(const FiniteAbelianGroup& g) { return {std::vector<u64>(g.rank(), 0)}; }

inline bool is_character_of(const FiniteAbelianGroup& g, const Character& chi) {
    return g.is_element(chi.exponents);
}

/// Value of chi at g as an exponent of zeta_L, L = exponent(G).
inline u64 character_value(const FiniteAbelianGroup& grp, const Character& chi, const Element& g) {
    const auto& d = grp.invariant_factors();
    u64 L = grp.exponent();
    u64 v = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
        v = (v + mulmod(mulmod(chi.exponents[i], g[i], L), L / d[i], L)) % L;
    return v;
}

inline Character character_product(const FiniteAbelianGroup& g, const Character& a, const Character& b) {
    return {g.add(a.exponents, b.exponents)};
}

inline Character character_conj(const FiniteAbelianGroup& g, const Character& a) {
    Character c = a;
    const auto& d = g.invariant_factors();
    for (std::size_t i = 0; i < d.size(); ++i) c.exponents[i] = (d[i] - c.exponents[i]) % d[i];
    return c;
}

/// All |G| characters in lexicographic order of exponent vectors; the trivial
/// character comes first.
inline std::vector<Character> dual_group(const FiniteAbelianGroup& g) {
    std::vector<Character> out;
    for (auto& e : g.elements()) out.push_back({std::move(e)});
    return out;
}

// ---------------------------------------------------------------------------
// Subgroups

inline void check_subgroup_generators(const FiniteAbelianGroup& g, std::span<const Element> gens) {
    for (const auto& h : gens)
        require(g.is_element(h), ErrorCode::SubgroupMismatch, "subgroup generator is not an element of " + to_string(g));
}

/// Order of <gens> via the lattice index.
inline u64 subgroup_order(const FiniteAbelianGroup& g, std::span<const Element> gens) {
    check_subgroup_generators(g, gens);
    if (g.rank() == 0) return 1;
    return kida::subgroup_order(g.invariant_factors(), std::vector<Coords>(gens.begin(), gens.end()));
}

/// Element indices of <gens>, sorted.
inline std::vector<std::size_t> subgroup_elements(const FiniteAbelianGroup& g, std::span<const Element> gens) {
    check_subgroup_generators(g, gens);
    std::vector<char> in(g.order(), 0);
    std::vector<std::size_t> members{g.index_of(g.identity())};
    in[members[0]] = 1;
    for (const auto& h : gens) {
        // Close under h: add cosets S + k h until we come back into S.
        std::size_t base = members.size();
        Element step = h;
        while (!in[g.index_of(step)]) {
            for (std::size_t i = 0; i < base; ++i) {
                std::size_t idx = g.index_of(g.add(g.element_at(members[i]), step));
                if (!in[idx]) {
                    in[idx] = 1;
                    members.push_back(idx);
                }
            }
            step = g.add(step, h);
        }
    }
    std::sort(members.begin(), members.end());
    return members;
}

struct Subgroup {
    std::vector<Element> generators;
    std::vector<std::size_t> elements; // sorted element indices
};

/// Every subgroup of g, each once, in breadth-first order from the trivial one.
/// Meant for small groups (the verification suites go up to order 200).
inline std::vector<Subgroup> enumerate_subgroups(const FiniteAbelianGroup& g) {
    const std::size_t n = g.order();
    std::vector<std::vector<std::size_t>> add(n, std::vector<std::size_t>(n));
    auto elems = g.elements();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) add[i][j] = g.index_of(g.add(elems[i], elems[j]));

    auto key_of = [n](const std::vector<char>& in) {
        std::string k((n + 7) / 8, '\0');
        for (std::size_t i = 0; i < n; ++i)
            if (in[i]) k[i / 8] = char(k[i / 8] | (1 << (i % 8)));
        return k;
    };

    std::vector<Subgroup> out;
    std::vector<std::vector<char>> member_sets;
    std::unordered_set<std::string> seen;
    {
        std::vector<char> in(n, 0);
        in[0] = 1;
        seen.insert(key_of(in));
        member_sets.push_back(in);
        out.push_back({{}, {0}});
    }
    for (std::size_t s = 0; s < out.size(); ++s) {
        const std::vector<char> in_s = member_sets[s];
        const std::vector<std::size_t> mem_s = out[s].elements;
        std::vector<char> covered = in_s;
        for (std::size_t x = 0; x < n; ++x) {
            if (covered[x]) continue;
            for (std::size_t m : mem_s) covered[add[m][x]] = 1;
            std::vector<char> in_t = in_s;
            std::vector<std::size_t> mem_t = mem_s;
            std::size_t step = x;
            while (!in_s[step]) {
                for (std::size_t m : mem_s) {
                    std::size_t y = add[m][step];
                    if (!in_t[y]) {
                        in_t[y] = 1;
                        mem_t.push_back(y);
                    }
                }
                step = add[step][x];
            }
            if (seen.insert(key_of(in_t)).second) {
                std::sort(mem_t.begin(), mem_t.end());
                auto gens = out[s].generators;
                gens.push_back(elems[x]);
                member_sets.push_back(std::move(in_t));
                out.push_back({std::move(gens), std::move(mem_t)});
            }
        }
    }
    return out;
}

namespace detail {
inline void partitions(unsigned n, unsigned max_part, std::vector<unsigned>& cur, std::vector<std::vector<unsigned>>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (unsigned k = std::min(n, max_part); k >= 1; --k) {
        cur.push_back(k);
        partitions(n - k, k, cur, out);
        cur.pop_back();
    }
}
} // namespace detail

/// Every abelian group of order n up to isomorphism, one per combination of
/// partitions of the prime exponents.
inline std::vector<FiniteAbelianGroup> abelian_groups_of_order(u64 n) {
    std::vector<std::vector<std::vector<u64>>> per_prime; // for each prime, list of descending prime-power lists
    for (auto [r, a] : factor(n)) {
        std::vector<std::vector<unsigned>> parts;
        std::vector<unsigned> cur;
        detail::partitions(a, a, cur, parts);
        std::vector<std::vector<u64>> lists;
        for (auto& p : parts) {
            std::vector<u64> powers;
            for (unsigned e : p) powers.push_back(ipow(r, e));
            lists.push_back(std::move(powers));
        }
        per_prime.push_back(std::move(lists));
    }
    std::vector<FiniteAbelianGroup> out;
    std::vector<std::size_t> choice(per_prime.size(), 0);
    for (;;) {
        std::size_t rank = 0;
        for (std::size_t i = 0; i < per_prime.size(); ++i) rank = std::max(rank, per_prime[i][choice[i]].size());
        std::vector<u64> factors(rank, 1);
        for (std::size_t i = 0; i < per_prime.size(); ++i) {
            const auto& powers = per_prime[i][choice[i]];
            for (std::size_t k = 0; k < powers.size(); ++k) factors[rank - 1 - k] *= powers[k];
        }
        out.emplace_back(std::move(factors));
        std::size_t i = 0;
        while (i < choice.size() && ++choice[i] == per_prime[i].size()) choice[i++] = 0;
        if (i == choice.size()) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Representations

/// A representation of a finite abelian group as a multiset of characters.
class RepMultiset {
public:
    explicit RepMultiset(FiniteAbelianGroup g) : group_(std::move(g)) {}

    static RepMultiset regular(const FiniteAbelianGroup& g) {
        RepMultiset w(g);
        for (auto& chi : dual_group(g)) w.add(chi, 1);
        return w;
    }

    void add(const Character& chi, u64 multiplicity) {
        require(is_character_of(group_, chi), ErrorCode::InvalidArgument, "character of the wrong group");
        if (multiplicity == 0) return;
        entries_[chi] += multiplicity;
    }

    const FiniteAbelianGroup& group() const { return group_; }
    const std::map<Character, u64>& entries() const { return entries_; }

    u64 dimension() const {
        u64 d = 0;
        for (auto& [chi, m] : entries_) d += m;
        return d;
    }

private:
    FiniteAbelianGroup group_;
    std::map<Character, u64> entries_;
};

/// <W, chi>_H: multiplicity of chi|_H in W|_H, counted by restriction.
inline u64 multiplicity(const RepMultiset& w, const Character& chi, std::span<const Element> subgroup_gens) {
    const auto& g = w.group();
    check_subgroup_generators(g, subgroup_gens);
    require(is_character_of(g, chi), ErrorCode::SubgroupMismatch, "character of the wrong group");
    u64 total = 0;
    for (const auto& [psi, m] : w.entries()) {
        bool same = true;
        for (const auto& h : subgroup_gens) {
            if (character_value(g, psi, h) != character_value(g, chi, h)) {
                same = false;
                break;
            }
        }
        if (same) total += m;
    }
    return total;
}

/// <W, chi>_G over the whole group.
inline u64 multiplicity(const RepMultiset& w, const Character& chi) {
    const auto& g = w.group();
    std::vector<Element> basis;
    for (std::size_t i = 0; i < g.rank(); ++i) {
        Element e(g.rank(), 0);
        e[i] = 1;
        basis.push_back(std::move(e));
    }
    return multiplicity(w, chi, basis);
}

// Integer polynomials as coefficient vectors, lowest degree first.
namespace detail {
using Poly = std::vector<i64>;

inline Poly poly_divide_exact(Poly num, const Poly& den) {
    Poly q(num.size() - den.size() + 1, 0);
    for (std::size_t i = q.size(); i-- > 0;) {
        i64 c = num[i + den.size() - 1] / den.back();
        q[i] = c;
        for (std::size_t j = 0; j < den.size(); ++j) num[i + j] -= c * den[j];
    }
    return q;
}

inline Poly poly_mod_monic(Poly a, const Poly& m) {
    for (std::size_t i = a.size(); i-- >= m.size();) {
        i64 c = a[i];
        if (c == 0) continue;
        for (std::size_t j = 0; j < m.size(); ++j) a[i - (m.size() - 1) + j] = checked_sub(a[i - (m.size() - 1) + j], checked_mul(c, m[j]));
    }
    a.resize(m.size() - 1);
    return a;
}
} // namespace detail

/// Phi_n with integer coefficients.
inline std::vector<i64> cyclotomic_polynomial(u64 n) {
    require(n >= 1, ErrorCode::InvalidArgument, "cyclotomic index must be positive");
    detail::Poly xn(n + 1, 0);
    xn[0] = -1;
    xn[n] = 1;
    for (u64 d = 1; d < n; ++d)
        if (n % d == 0) xn = detail::poly_divide_exact(xn, cyclotomic_polynomial(d));
    return xn;
}

/// <W, chi>_H via (1/|H|) sum_h tr W(h) conj(chi(h)), summed in Z[zeta_L]
/// (reduction modulo Phi_L) and only then collapsed to a rational integer.
inline u64 multiplicity_by_trace(const RepMultiset& w, const Character& chi, std::span<const Element> subgroup_gens) {
    const auto& g = w.group();
    require(is_character_of(g, chi), ErrorCode::SubgroupMismatch, "character of the wrong group");
    auto members = subgroup_elements(g, subgroup_gens);
    u64 L = g.exponent();
    detail::Poly sum(L, 0);
    for (std::size_t idx : members) {
        Element h = g.element_at(idx);
        u64 conj = (L - character_value(g, chi, h)) % L;
        for (const auto& [psi, m] : w.entries()) sum[(character_value(g, psi, h) + conj) % L] += i64(m);
    }
    auto reduced = detail::poly_mod_monic(sum, cyclotomic_polynomial(L));
    for (std::size_t i = 1; i < reduced.size(); ++i)
        require(reduced[i] == 0, ErrorCode::InternalAdditivityViolation, "trace sum is not a rational integer");
    i64 c0 = reduced.empty() ? 0 : reduced[0];
    require(c0 >= 0 && c0 % i64(members.size()) == 0, ErrorCode::InternalAdditivityViolation,
            "trace sum not divisible by |H|");
    return u64(c0 / i64(members.size()));
}

// ---------------------------------------------------------------------------
// The identity
//   sum_{chi in G^} (<W,1>_G - <W,chi>_G)
//     = |H| sum_{chi in (G/H)^} (<W,1>_G - <W,chi>_G) + sum_{chi in H^} (<W,1>_H - <W,chi>_H)

struct GroupIdentityResult {
    bool holds;
    i64 lhs;
    i64 rhs;
};

/// Precomputes, for a fixed pair H <= G, the annihilator of H in G^ (which is
/// (G/H)^) and the classes of G^ under restriction to H (which are H^), so that
/// many W can be checked cheaply.
class GroupIdentityChecker {
public:
    GroupIdentityChecker(FiniteAbelianGroup g, std::vector<Element> subgroup_gens)
        : group_(std::move(g)), gens_(std::move(subgroup_gens)) {
        check_subgroup_generators(group_, gens_);
        h_order_ = subgroup_order(group_, gens_);
        const std::size_t n = group_.order();
        class_of_.resize(n);
        std::map<std::vector<u64>, std::size_t> classes;
        for (std::size_t i = 0; i < n; ++i) {
            Character chi{group_.element_at(i)};
            std::vector<u64> sig;
            for (const auto& h : gens_) sig.push_back(character_value(group_, chi, h));
            bool trivial_on_h = std::all_of(sig.begin(), sig.end(), [](u64 v) { return v == 0; });
            if (trivial_on_h) annihilator_.push_back(i);
            auto it = classes.emplace(std::move(sig), classes.size());
            class_of_[i] = it.first->second;
        }
        h_dual_size_ = classes.size();
        require(h_dual_size_ == h_order_, ErrorCode::InternalAdditivityViolation, "restriction classes do not match |H|");
        require(annihilator_.size() * h_order_ == n, ErrorCode::InternalAdditivityViolation, "annihilator has the wrong order");
    }

    u64 subgroup_size() const { return h_order_; }

    GroupIdentityResult check(const RepMultiset& w) const {
        require(w.group() == group_, ErrorCode::SubgroupMismatch, "representation over a different group");
        const std::size_t n = group_.order();
        std::vector<i64> mult(n, 0);
        for (const auto& [chi, m] : w.entries()) mult[group_.index_of(chi.exponents)] += i64(m);
        return check_dense(mult);
    }

    /// Same, with W given as multiplicities indexed like group elements.
    GroupIdentityResult check_dense(const std::vector<i64>& mult) const {
        const std::size_t n = group_.order();
        require(mult.size() == n, ErrorCode::SubgroupMismatch, "multiplicity vector of the wrong size");
        i64 lhs = 0;
        for (std::size_t i = 0; i < n; ++i) lhs += mult[0] - mult[i];

        i64 quotient_part = 0;
        for (std::size_t i : annihilator_) quotient_part += mult[0] - mult[i];

        std::vector<i64> class_mult(h_dual_size_, 0);
        for (std::size_t i = 0; i < n; ++i) class_mult[class_of_[i]] += mult[i];
        i64 h_trivial = class_mult[class_of_[0]];
        i64 sub_part = 0;
        for (i64 m : class_mult) sub_part += h_trivial - m;

        i64 rhs = i64(h_order_) * quotient_part + sub_part;
        return {lhs == rhs, lhs, rhs};
    }

private:
    FiniteAbelianGroup group_;
    std::vector<Element> gens_;
    u64 h_order_ = 1;
    std::vector<std::size_t> annihilator_;
    std::vector<std::size_t> class_of_;
    std::size_t h_dual_size_ = 1;
};

inline GroupIdentityResult check_group_identity(const RepMultiset& w, std::span<const Element> subgroup_gens) {
    return GroupIdentityChecker(w.group(), std::vector<Element>(subgroup_gens.begin(), subgroup_gens.end())).check(w);
}

} // namespace kida::chargroup
