#pragma once

// Property suites behind `kida verify`. Each is deterministic for a seed and
// collects counterexamples instead of stopping at the first one.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "kida/chargroup.hpp"
#include "kida/kida.hpp"
#include "kida/localfactor.hpp"
#include "kida/qexp.hpp"
#include "kida/splitting.hpp"

namespace kida::verify {

struct VerifyResult {
    std::string suite;
    u64 seed = 0;
    u64 size = 0;
    u64 cases = 0;
    std::vector<std::string> counterexamples;
    bool passed() const { return counterexamples.empty(); }

    void fail_case(std::string what) {
        if (counterexamples.size() < 20) counterexamples.push_back(std::move(what));
        else if (counterexamples.size() == 20) counterexamples.push_back("...");
    }
};

namespace detail {
inline std::string elements_str(const std::vector<chargroup::Element>& gens) {
    std::string s = "<";
    for (std::size_t i = 0; i < gens.size(); ++i) {
        s += i ? ",(" : "(";
        for (std::size_t j = 0; j < gens[i].size(); ++j) s += (j ? "," : "") + std::to_string(gens[i][j]);
        s += ")";
    }
    return s + ">";
}

inline std::string values_str(const std::vector<i64>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]) s += (s.empty() ? "" : " ") + std::to_string(i) + "^" + std::to_string(v[i]);
    return "{" + s + "}";
}

/// All characters of the local group the tables know about.
inline std::vector<localfactor::LocalCharData> char_cases(u64 p, unsigned max_log) {
    using localfactor::LocalCharData;
    std::vector<LocalCharData> out;
    for (bool triv : {true, false}) {
        out.push_back(localfactor::unramified_char(triv));
        out.push_back(localfactor::ramified_char(triv, false));
        out.push_back(localfactor::ramified_char(triv, true, 0));
        for (unsigned k = 1; k <= max_log; ++k) out.push_back(localfactor::ramified_char(triv, true, ipow(p, k)));
    }
    return out;
}

/// Every tabulated type at p: all residue pairs for the unramified principal
/// series, every character case for special and ramified principal series.
inline std::vector<localfactor::LocalType> tabulated_types(u64 p, unsigned max_log) {
    std::vector<localfactor::LocalType> out;
    for (u64 a = 0; a < p; ++a)
        for (u64 c = 0; c < p; ++c) out.push_back(localfactor::UnramifiedPS{a, c, p});
    auto chars = char_cases(p, max_log);
    for (const auto& phi : chars) out.push_back(localfactor::Special{phi});
    for (std::size_t i = 0; i < chars.size(); ++i)
        for (std::size_t j = i; j < chars.size(); ++j) out.push_back(localfactor::RamifiedPS{chars[i], chars[j]});
    out.push_back(localfactor::Supercuspidal{});
    return out;
}

inline std::string type_str(const localfactor::LocalType& t) {
    std::string s = localfactor::to_string(t);
    auto order = [](const localfactor::LocalCharData& phi) {
        return phi.ramified && phi.inertia_order ? "[d=" + std::to_string(phi.inertia_order) + "]" : std::string();
    };
    if (auto* sp = std::get_if<localfactor::Special>(&t)) s += order(sp->phi);
    if (auto* r = std::get_if<localfactor::RamifiedPS>(&t)) s += order(r->first) + order(r->second);
    return s;
}

/// Points on E over F_ell with y found from the quadratic in y, using Euler's
/// criterion; independent of the square table used by count_points.
inline u64 count_points_euler(const qexp::EllipticCurve& e, u64 ell) {
    auto r = [&](Int v) { return reduce(v, ell); };
    u64 a1 = r(e.a1), a2 = r(e.a2), a3 = r(e.a3), a4 = r(e.a4), a6 = r(e.a6);
    u64 count = 1;
    if (ell == 2) {
        for (u64 x = 0; x < 2; ++x)
            for (u64 y = 0; y < 2; ++y)
                if ((y * y + a1 * x * y + a3 * y + x * x * x + a2 * x * x + a4 * x + a6) % 2 == 0) ++count;
        return count;
    }
    for (u64 x = 0; x < ell; ++x) {
        // y^2 + b y - k = 0 with b = a1 x + a3, k = x^3 + a2 x^2 + a4 x + a6
        u64 b = (mulmod(a1, x, ell) + a3) % ell;
        u64 k = (powmod(x, 3, ell) + mulmod(a2, mulmod(x, x, ell), ell) + mulmod(a4, x, ell) + a6) % ell;
        u64 disc = (mulmod(b, b, ell) + mulmod(4, k, ell)) % ell;
        if (disc == 0) count += 1;
        else if (powmod(disc, (ell - 1) / 2, ell) == 1) count += 2;
    }
    return count;
}

inline qexp::EllipticCurve random_curve(std::mt19937_64& rng) {
    for (;;) {
        auto pick = [&] { return Int(i64(rng() % 21) - 10); };
        qexp::EllipticCurve e{pick(), pick(), pick(), pick(), pick()};
        if (e.discriminant() != 0) return e;
    }
}
} // namespace detail

/// The group identity for every abelian group of order <= size, every
/// subgroup, and `per_group` random W per group.
inline VerifyResult group_identity_suite(u64 seed, u64 size = 200, unsigned per_group = 100) {
    VerifyResult out{"group-identity", seed, size, 0, {}};
    std::mt19937_64 rng(seed);
    for (u64 n = 1; n <= size; ++n) {
        for (const auto& G : chargroup::abelian_groups_of_order(n)) {
            std::vector<std::vector<i64>> ws(per_group, std::vector<i64>(n, 0));
            for (auto& w : ws) {
                u64 entries = rng() % 11;
                for (u64 k = 0; k < entries; ++k) w[rng() % n] += i64(1 + rng() % 2);
            }
            for (const auto& S : chargroup::enumerate_subgroups(G)) {
                chargroup::GroupIdentityChecker checker(G, S.generators);
                for (const auto& w : ws) {
                    auto r = checker.check_dense(w);
                    ++out.cases;
                    if (!r.holds)
                        out.fail_case("G=" + chargroup::to_string(G) + " H=" + detail::elements_str(S.generators) +
                                      " W=" + detail::values_str(w) + " lhs=" + std::to_string(r.lhs) +
                                      " rhs=" + std::to_string(r.rhs));
                }
            }
        }
    }
    return out;
}

/// Generic m-values from a character multiset W over Z/P: values[j] is the
/// multiplicity of chi_{-j} in W, i.e. of the trivial character in W chi_j.
inline std::vector<u64> generic_values_from_multiset(const chargroup::RepMultiset& w) {
    const auto& G = w.group();
    u64 P = G.order();
    std::vector<u64> values(P, 0);
    for (u64 j = 0; j < P; ++j) {
        chargroup::Character chi{G.element_at(j)};
        values[j] = chargroup::multiplicity(w, chargroup::character_conj(G, chi));
    }
    return values;
}

/// m(L''/L) = [L'':L'] m(L'/L) + m(L''/L') for all tabulated types and for
/// generic data from random character multisets over Z/p^c, p^c <= size.
inline VerifyResult tower_additivity_suite(u64 seed, u64 size = 27, unsigned generic_per_group = 25) {
    VerifyResult out{"tower-additivity", seed, size, 0, {}};
    std::mt19937_64 rng(seed);
    for (u64 p = 2; p <= size; ++p) {
        if (!is_prime(p)) continue;
        unsigned top = 0;
        while (ipow(p, top + 1) <= size) ++top;
        std::vector<localfactor::LocalType> types = detail::tabulated_types(p, top);
        for (unsigned c = 1; c <= top; ++c) {
            auto G = chargroup::FiniteAbelianGroup::cyclic(ipow(p, c));
            for (unsigned k = 0; k < generic_per_group; ++k) {
                chargroup::RepMultiset w(G);
                u64 entries = 1 + rng() % 6;
                for (u64 i = 0; i < entries; ++i) w.add({G.element_at(rng() % G.order())}, 1 + rng() % 2);
                types.push_back(localfactor::make_generic(p, generic_values_from_multiset(w)));
            }
        }
        for (const auto& t : types) {
            u64 reach = top;
            if (auto* g = std::get_if<localfactor::Generic>(&t)) reach = *log_p(g->values.size(), p);
            for (unsigned a = 0; a <= reach; ++a)
                for (unsigned b = a; b <= reach; ++b) {
                    ++out.cases;
                    auto r = localfactor::check_tower_additivity(t, p, ipow(p, a), ipow(p, b));
                    if (!r.holds)
                        out.fail_case("p=" + std::to_string(p) + " type=" + detail::type_str(t) + " degrees " +
                                      std::to_string(ipow(p, a)) + "|" + std::to_string(ipow(p, b)) +
                                      " lhs=" + to_string(r.lhs) + " rhs=" + to_string(r.rhs));
                }
        }
    }
    return out;
}

/// h-table route against the m-summation route: locally for every tabulated
/// type with e in {p, p^2}, p in {3, 5, 11}, and globally for transitions of
/// the discriminant form to degree-p subfields of Q(zeta_ell).
inline VerifyResult path_agreement_suite(u64 seed) {
    VerifyResult out{"path-agreement", seed, 0, 0, {}};
    std::mt19937_64 rng(seed);
    for (u64 p : {3, 5, 11}) {
        for (const auto& t : detail::tabulated_types(p, 2)) {
            for (u64 e : {p, p * p}) {
                Int h = localfactor::h_v(t, e);
                Int m = localfactor::m_extension(t, e);
                ++out.cases;
                if (h != m)
                    out.fail_case("p=" + std::to_string(p) + " e=" + std::to_string(e) + " type=" + detail::type_str(t) +
                                  " h=" + to_string(h) + " m=" + to_string(m));
            }
        }
    }
    auto f = qexp::ModularForm::delta();
    auto Q = splitting::AbelianField::rationals();
    for (u64 p : {3, 5, 11}) {
        unsigned found = 0;
        for (u64 ell = 2; found < 4 && ell < 2000; ++ell) {
            if (!is_prime(ell) || ell % p != 1) continue;
            ++found;
            auto Fp = splitting::cyclotomic_subfield_of_degree(ell, p);
            u64 lambda = rng() % 6;
            auto r = transition(&f, {}, p, Q, Fp, InvariantRecord::asserted(InvariantKind::Algebraic, 0, lambda),
                                Hypotheses::all_asserted(InvariantKind::Algebraic));
            ++out.cases;
            if (!r.lambda_h_route || *r.lambda_h_route != Int(*r.output.lambda))
                out.fail_case("delta p=" + std::to_string(p) + " ell=" + std::to_string(ell) +
                              " m-route=" + std::to_string(*r.output.lambda) +
                              " h-route=" + (r.lambda_h_route ? to_string(*r.lambda_h_route) : std::string("none")));
        }
    }
    return out;
}

/// Point counts: |a_ell| <= 2 sqrt(ell) and an independent recount for the
/// X_0(11) curve and random curves at good primes ell <= size.
inline VerifyResult hasse_suite(u64 seed, u64 size = 100, unsigned curves = 20) {
    VerifyResult out{"hasse", seed, size, 0, {}};
    std::mt19937_64 rng(seed);
    std::vector<qexp::EllipticCurve> list{qexp::x0_11()};
    for (unsigned i = 0; i < curves; ++i) list.push_back(detail::random_curve(rng));
    for (const auto& e : list) {
        Int disc = e.discriminant();
        for (u64 ell = 2; ell <= size; ++ell) {
            if (!is_prime(ell) || disc % Int(ell) == 0) continue;
            Int a = qexp::ec_ap(e, ell);
            u64 recount = detail::count_points_euler(e, ell);
            ++out.cases;
            if (a * a > Int(4 * ell) || Int(ell) + 1 - a != Int(recount))
                out.fail_case(qexp::ModularForm::elliptic_curve(e).id() + " ell=" + std::to_string(ell) +
                              " a=" + to_string(a) + " recount=" + std::to_string(recount));
        }
    }
    return out;
}

/// h_v != 0 at a good prime ell = 1 mod p exactly when p divides #E(F_ell).
inline VerifyResult point_of_order_p_suite(const qexp::EllipticCurve& e, u64 p, u64 bound) {
    VerifyResult out{"point-of-order-p", 0, bound, 0, {}};
    auto f = qexp::ModularForm::elliptic_curve(e);
    Int disc = e.discriminant();
    for (u64 ell = p + 1; ell <= bound; ell += p) {
        if (!is_prime(ell) || disc % Int(ell) == 0) continue;
        auto fd = qexp::frobenius_data(f, ell, p);
        Int h = localfactor::h_v(localfactor::UnramifiedPS{fd.a, fd.c, p}, p);
        bool divides = detail::count_points_euler(e, ell) % p == 0;
        ++out.cases;
        if ((h != 0) != divides)
            out.fail_case("ell=" + std::to_string(ell) + " h=" + to_string(h) + " p|#E=" + (divides ? "yes" : "no"));
    }
    return out;
}

} // namespace kida::verify
