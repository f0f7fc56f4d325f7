#pragma once

// Transition of lambda/mu invariants of a modular form along an abelian
// p-extension F'/F of cyclotomic Z_p-extensions:
//   lambda(F'_inf) = [F'_inf : F_inf] lambda(F_inf) + sum_{w'} m(F'_inf,w' / F_inf,w, V).

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kida/arith.hpp"
#include "kida/error.hpp"
#include "kida/localfactor.hpp"
#include "kida/qexp.hpp"
#include "kida/splitting.hpp"

namespace kida {

enum class InvariantKind { Algebraic, Analytic, Plus, Minus };
enum class Provenance { Asserted, Computed };

inline std::string to_string(InvariantKind k) {
    switch (k) {
    case InvariantKind::Algebraic: return "algebraic";
    case InvariantKind::Analytic: return "analytic";
    case InvariantKind::Plus: return "plus";
    case InvariantKind::Minus: return "minus";
    }
    return "?";
}

inline InvariantKind parse_kind(std::string_view s) {
    if (s == "algebraic" || s == "alg") return InvariantKind::Algebraic;
    if (s == "analytic" || s == "an") return InvariantKind::Analytic;
    if (s == "plus" || s == "+") return InvariantKind::Plus;
    if (s == "minus" || s == "-") return InvariantKind::Minus;
    fail(ErrorCode::ParseError, "unknown invariant kind '" + std::string(s) + "'");
}

inline std::string to_string(Provenance p) { return p == Provenance::Asserted ? "asserted" : "computed"; }

/// (mu, lambda) of one kind; lambda only makes sense when mu = 0.
struct InvariantRecord {
    InvariantKind kind = InvariantKind::Algebraic;
    std::optional<u64> mu;
    std::optional<u64> lambda;
    Provenance provenance = Provenance::Asserted;

    static InvariantRecord asserted(InvariantKind kind, u64 mu, u64 lambda) {
        return {kind, mu, mu == 0 ? std::optional<u64>(lambda) : std::nullopt, Provenance::Asserted};
    }
    friend bool operator==(const InvariantRecord&, const InvariantRecord&) = default;
};

/// Hypotheses the transition needs but cannot check; they are only echoed.
struct Hypotheses {
    std::map<std::string, bool> flags;

    static std::vector<std::string> names(InvariantKind kind) {
        if (kind == InvariantKind::Plus || kind == InvariantKind::Minus)
            return {"congruent_to_Zp_form", "abelian_p_extension_of_Q", "supersingular_at_p"};
        return {"residual_h0_vanishing", "dual_h0_vanishing", "nearly_ordinary", "p_distinguished",
                "inertia_quotient_divisible"};
    }
    static Hypotheses unasserted(InvariantKind kind) {
        Hypotheses h;
        for (auto& n : names(kind)) h.flags[n] = false;
        return h;
    }
    static Hypotheses all_asserted(InvariantKind kind) {
        Hypotheses h;
        for (auto& n : names(kind)) h.flags[n] = true;
        return h;
    }
    bool all() const {
        return std::all_of(flags.begin(), flags.end(), [](const auto& kv) { return kv.second; });
    }
    friend bool operator==(const Hypotheses&, const Hypotheses&) = default;
};

/// One prime ell != p ramified in F'_inf/F_inf.
struct LocalFactorReport {
    u64 ell;
    u64 local_degree;  // [F'_inf,w' : F_inf,w]
    u64 places;        // places w' of F'_inf above ell
    u64 base_places;   // places w of F_inf above ell
    splitting::PlaceData base; // ell in F/Q
    localfactor::LocalType type; // over F_inf,w
    std::string type_source;     // "frobenius" or "user"
    std::string h_case;
    Int m;                 // m(F'_inf,w' / F_inf,w, V)
    std::optional<Int> h;  // h-table value, when it applies
    friend bool operator==(const LocalFactorReport&, const LocalFactorReport&) = default;
};

struct TransitionReport {
    std::string form;
    u64 p;
    splitting::AbelianField base;
    splitting::AbelianField ext;
    InvariantKind kind;
    u64 degree;         // [F'_inf : F_inf]
    u64 finite_degree;  // [F' : F]
    bool unramified_at_p;
    bool linearly_disjoint; // F' meets F_inf only in F
    std::vector<LocalFactorReport> places;
    Int m_total;
    InvariantRecord input;
    InvariantRecord output;
    std::optional<Int> lambda_h_route;
    Hypotheses hypotheses;
    std::vector<std::string> warnings;
};

using LocalTypeMap = std::map<u64, localfactor::LocalType>;

namespace detail {

/// x^2 - a x + c for Frob^k from that of Frob (power sums mod p).
inline localfactor::UnramifiedPS frobenius_power(const localfactor::UnramifiedPS& u, u64 k) {
    u64 p = u.p;
    u64 s_prev = 2 % p, s = u.a % p; // s_0, s_1
    if (k == 0) return {2 % p, 1 % p, p};
    for (u64 i = 1; i < k; ++i) {
        u64 next = (mulmod(u.a, s, p) + p - mulmod(u.c, s_prev, p)) % p;
        s_prev = s;
        s = next;
    }
    return {s, powmod(u.c, k, p), p};
}

inline void add_warning(std::vector<std::string>& w, std::string msg) {
    if (std::find(w.begin(), w.end(), msg) == w.end()) w.push_back(std::move(msg));
}

inline std::optional<Int> h_if_tabulated(const localfactor::LocalType& t, u64 e) {
    if (std::holds_alternative<localfactor::Generic>(t)) return std::nullopt;
    return localfactor::h_v(t, e);
}

} // namespace detail

/// The local type at ell over F_inf,w: the user's entry if present, otherwise
/// the unramified principal series of f with Frobenius raised to the prime-to-p
/// part of the residue degree of ell in F.
inline std::pair<localfactor::LocalType, std::string> resolve_local_type(const qexp::ModularForm* f,
                                                                         const LocalTypeMap& local, u64 ell, u64 p,
                                                                         const splitting::PlaceData& base) {
    if (auto it = local.find(ell); it != local.end()) return {it->second, "user"};
    require(f != nullptr && f->level() % ell != 0, ErrorCode::MissingLocalType,
            "no local type for ell = " + std::to_string(ell) + (f ? " (divides the level)" : ""));
    auto fd = qexp::frobenius_data(*f, ell, p);
    localfactor::UnramifiedPS u{fd.a, fd.c, p};
    return {detail::frobenius_power(u, prime_to_part(base.f, p)), "frobenius"};
}

/// The transition for F <= F' with [F'_inf : F_inf] a power of p.
inline TransitionReport transition(const qexp::ModularForm* f, const LocalTypeMap& local, u64 p,
                                   const splitting::AbelianField& F, const splitting::AbelianField& Fp,
                                   const InvariantRecord& base, const Hypotheses& hyp) {
    require(is_prime(p) && p != 2, ErrorCode::InvalidArgument, "p must be an odd prime");
    require(base.mu.has_value() && *base.mu == 0, ErrorCode::MuNonzero,
            base.mu ? "mu = " + std::to_string(*base.mu) + " over the base" : std::string("mu over the base is unknown"));
    require(base.lambda.has_value(), ErrorCode::InvalidArgument, "lambda over the base is missing");

    auto rs = splitting::ramified_set(F, Fp, p);
    TransitionReport r{f ? f->id() : "local", p, F, Fp, base.kind, rs.degree, rs.finite_degree,
                       rs.unramified_at_p, rs.finite_degree == rs.degree, {}, 0, base, {}, std::nullopt, hyp, {}};

    if (!rs.unramified_at_p && base.kind == InvariantKind::Algebraic)
        detail::add_warning(r.warnings, "F'/F is ramified above p; degrees are taken between the towers, i.e. after "
                                        "passing to the subfields unramified at p");
    if (!hyp.all()) detail::add_warning(r.warnings, "hypotheses not asserted; the formula is conditional on them");
    if (base.kind == InvariantKind::Plus || base.kind == InvariantKind::Minus) {
        if (!log_p(Fp.degree(), p))
            detail::add_warning(r.warnings, "signed invariants: F' is not a p-extension of Q");
    }

    Int total = 0, h_total = 0;
    bool h_route = r.linearly_disjoint;
    for (const auto& rp : rs.primes) {
        auto [type, source] = resolve_local_type(f, local, rp.ell, p, rp.base);
        Int m = localfactor::m_extension(type, rp.local_degree);
        auto h = detail::h_if_tabulated(type, rp.local_degree);
        if (!h) h_route = false;
        else h_total = checked_add(h_total, checked_mul(Int(rp.places), *h));
        total = checked_add(total, checked_mul(Int(rp.places), m));
        r.places.push_back({rp.ell, rp.local_degree, rp.places, rp.base_places, rp.base, type, source,
                            localfactor::h_case(type), m, h});
    }
    r.m_total = total;
    Int lam = checked_add(checked_mul(Int(r.degree), Int(*base.lambda)), total);
    require(lam >= 0, ErrorCode::InvalidArgument, "negative lambda: the local data is inconsistent");
    r.output = {base.kind, 0, u64(lam), Provenance::Computed};
    if (!r.linearly_disjoint)
        detail::add_warning(r.warnings, "F' is not linearly disjoint from F_inf over F; h-table route skipped");
    if (h_route) r.lambda_h_route = checked_add(checked_mul(Int(r.degree), Int(*base.lambda)), h_total);
    return r;
}

// ---------------------------------------------------------------------------
// lambda as a sum over the characters of G = Gal(F'_inf / F_inf).

struct TwistInvariant {
    std::optional<u64> mu;
    std::optional<u64> lambda;
};

/// sum over chi of lambda(F_inf, A_chi); every entry must be present with mu = 0.
inline u64 lambda_via_twists(const std::vector<TwistInvariant>& per_character, u64 group_order) {
    require(per_character.size() == group_order, ErrorCode::IncompleteTwistData,
            "expected " + std::to_string(group_order) + " twists, got " + std::to_string(per_character.size()));
    Int total = 0;
    for (std::size_t i = 0; i < per_character.size(); ++i) {
        const auto& t = per_character[i];
        require(t.mu.has_value() && t.lambda.has_value(), ErrorCode::IncompleteTwistData,
                "twist " + std::to_string(i) + " is missing");
        require(*t.mu == 0, ErrorCode::MuNonzero, "twist " + std::to_string(i) + " has mu != 0");
        total = checked_add(total, Int(*t.lambda));
    }
    require(total <= Int(UINT64_MAX), ErrorCode::Overflow, "lambda sum exceeds 64 bits");
    return u64(total);
}

/// Whether Gal(F'_inf / F_inf) is cyclic.
inline bool tower_group_is_cyclic(const splitting::AbelianField& F, const splitting::AbelianField& Fp, u64 p) {
    auto cmp = splitting::compare_towers(F, Fp, p);
    auto h = splitting::infinite_level_subgroup(F, p, cmp.N0);
    auto hp = splitting::infinite_level_subgroup(Fp, p, cmp.N0);
    auto m = UnitGroup(cmp.N0 * p).component_orders();
    if (cmp.degree == 1) return true;
    for (const auto& g : h) {
        // order of g modulo H(F'): the least p^k with p^k g in H(F')
        u64 order = 1;
        Coords x = g;
        while (!subgroup_contains(m, hp, x)) {
            for (std::size_t j = 0; j < x.size(); ++j) x[j] = mulmod(x[j], p, m[j]);
            order *= p;
        }
        if (order == cmp.degree) return true;
    }
    return false;
}

/// lambda(F_inf, A_chi) = lambda(F_inf, A) + sum_w (m(V) - m(V_chi)) for chi_k,
/// k = 0..[F'_inf:F_inf]-1, over cyclic G; w runs over places of F_inf.
inline std::vector<u64> twist_lambdas(const TransitionReport& r) {
    require(tower_group_is_cyclic(r.base, r.ext, r.p), ErrorCode::NotCyclic,
            "Gal(F'_inf/F_inf) is not cyclic; per-character values need a cyclic group here");
    const u64 D = r.degree;
    std::vector<u64> out;
    for (u64 k = 0; k < D; ++k) {
        Int lam = Int(*r.input.lambda);
        for (const auto& pl : r.places) {
            u64 E = pl.local_degree;
            Int m0 = Int(localfactor::m_value(pl.type, {E, 0}));
            Int mk = Int(localfactor::m_value(pl.type, {E, k % E}));
            lam = checked_add(lam, checked_mul(Int(pl.base_places), m0 - mk));
        }
        require(lam >= 0, ErrorCode::InvalidArgument, "negative twisted lambda");
        out.push_back(u64(lam));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Composition along F <= F' <= F''.

/// Report for F''/F from reports for F'/F and F''/F'. The composite local
/// terms are rebuilt from the F'/F types and checked against the identity
///   sum_{w''} m(F''/F) = [F''_inf : F'_inf] sum_{w'} m(F'/F) + sum_{w''} m(F''/F').
inline TransitionReport compose(const TransitionReport& ab, const TransitionReport& bc) {
    require(ab.p == bc.p, ErrorCode::ChainMismatch, "different p");
    require(ab.kind == bc.kind, ErrorCode::ChainMismatch, "different invariant kinds");
    require(ab.form == bc.form, ErrorCode::ChainMismatch, "different forms");
    require(splitting::same_field(ab.ext, bc.base), ErrorCode::ChainMismatch, "the middle fields differ");
    require(ab.output.lambda == bc.input.lambda && ab.output.mu == bc.input.mu, ErrorCode::ChainMismatch,
            "the middle invariants differ");
    const u64 p = ab.p;
    const u64 d_bc = bc.degree;

    std::map<u64, const LocalFactorReport*> in_ab, in_bc;
    for (const auto& pl : ab.places) in_ab[pl.ell] = &pl;
    for (const auto& pl : bc.places) in_bc[pl.ell] = &pl;
    std::set<u64> primes;
    for (auto& [ell, _] : in_ab) primes.insert(ell);
    for (auto& [ell, _] : in_bc) primes.insert(ell);

    TransitionReport r{ab.form,   p,  ab.base, bc.ext, ab.kind, checked_mul_u64(ab.degree, d_bc),
                       checked_mul_u64(ab.finite_degree, bc.finite_degree),
                       ab.unramified_at_p && bc.unramified_at_p, false, {}, 0, ab.input, bc.output, std::nullopt,
                       ab.hypotheses, {}};
    r.linearly_disjoint = r.finite_degree == r.degree;

    Int lhs = 0, ab_sum = 0, bc_sum = 0, h_total = 0;
    bool h_route = r.linearly_disjoint;
    for (u64 ell : primes) {
        const LocalFactorReport* a = in_ab.count(ell) ? in_ab[ell] : nullptr;
        const LocalFactorReport* b = in_bc.count(ell) ? in_bc[ell] : nullptr;
        u64 e_ab = a ? a->local_degree : 1, e_bc = b ? b->local_degree : 1;
        const localfactor::LocalType& type = a ? a->type : b->type;
        const std::string& source = a ? a->type_source : b->type_source;
        if (a && b) {
            auto below = localfactor::restrict(a->type, p, e_ab);
            require(localfactor::m_profile(below, e_bc) == localfactor::m_profile(b->type, e_bc),
                    ErrorCode::ChainMismatch, "local types at " + std::to_string(ell) + " do not restrict consistently");
        }
        // places of F''_inf above ell: each place of F'_inf has d_bc / e_bc above it
        u64 places_c = b ? b->places : checked_mul_u64(a->places, d_bc);
        u64 places_b = a ? a->places : b->base_places;
        require(places_c * e_bc == places_b * d_bc, ErrorCode::InternalAdditivityViolation,
                "place counts at " + std::to_string(ell) + " are inconsistent");
        u64 e_ac = e_ab * e_bc;
        Int m_ac = localfactor::m_extension(type, e_ac);
        lhs = checked_add(lhs, checked_mul(Int(places_c), m_ac));
        if (a) ab_sum = checked_add(ab_sum, checked_mul(Int(a->places), a->m));
        if (b) bc_sum = checked_add(bc_sum, checked_mul(Int(b->places), b->m));
        u64 base_places = places_c * e_ac / r.degree;
        auto h = detail::h_if_tabulated(type, e_ac);
        if (!h) h_route = false;
        else h_total = checked_add(h_total, checked_mul(Int(places_c), *h));
        r.places.push_back({ell, e_ac, places_c, base_places, splitting::efg(r.base, ell), type, source,
                            localfactor::h_case(type), m_ac, h});
    }
    Int rhs = checked_add(checked_mul(Int(d_bc), ab_sum), bc_sum);
    require(lhs == rhs, ErrorCode::InternalAdditivityViolation,
            "local terms do not compose: " + to_string(lhs) + " != " + to_string(rhs));
    Int lam = checked_add(checked_mul(Int(r.degree), Int(*ab.input.lambda)), lhs);
    require(bc.output.lambda && lam == Int(*bc.output.lambda), ErrorCode::InternalAdditivityViolation,
            "composite lambda " + to_string(lam) + " disagrees with the second step");
    r.m_total = lhs;
    if (h_route) r.lambda_h_route = checked_add(checked_mul(Int(r.degree), Int(*ab.input.lambda)), h_total);

    for (const auto& w : ab.warnings) detail::add_warning(r.warnings, w);
    for (const auto& w : bc.warnings) detail::add_warning(r.warnings, w);
    if (!r.linearly_disjoint)
        detail::add_warning(r.warnings, "F' is not linearly disjoint from F_inf over F; h-table route skipped");
    std::sort(r.warnings.begin(), r.warnings.end());
    for (auto& [k, v] : bc.hypotheses.flags) r.hypotheses.flags[k] = r.hypotheses.flags[k] && v;
    return r;
}

// ---------------------------------------------------------------------------
// Main-conjecture transfer.

struct MainConjectureTransfer {
    bool base_status;      // asserted over F
    bool extension_status; // consequently over F'
    u64 lambda_algebraic;
    u64 lambda_analytic;
    std::string statement;
};

/// Algebraic and analytic transitions share one formula, so equal inputs give
/// equal outputs and the main conjecture moves from F to F' with them.
inline MainConjectureTransfer mc_transfer(bool base_status, const TransitionReport& alg, const TransitionReport& an) {
    require(alg.kind == InvariantKind::Algebraic && an.kind == InvariantKind::Analytic, ErrorCode::MismatchedInputs,
            "need one algebraic and one analytic report");
    require(alg.p == an.p && alg.form == an.form, ErrorCode::MismatchedInputs, "reports for different data");
    require(splitting::same_field(alg.base, an.base) && splitting::same_field(alg.ext, an.ext),
            ErrorCode::MismatchedInputs, "reports for different fields");
    require(alg.input.lambda == an.input.lambda && alg.input.mu == an.input.mu, ErrorCode::MismatchedInputs,
            "algebraic and analytic invariants differ over the base");
    require(alg.degree == an.degree && alg.places.size() == an.places.size(), ErrorCode::MismatchedInputs,
            "degrees or ramified places differ");
    for (std::size_t i = 0; i < alg.places.size(); ++i)
        require(alg.places[i].ell == an.places[i].ell && alg.places[i].m == an.places[i].m &&
                    alg.places[i].places == an.places[i].places,
                ErrorCode::MismatchedInputs, "local contributions differ");
    require(alg.output.lambda == an.output.lambda, ErrorCode::InternalAdditivityViolation,
            "equal inputs gave different outputs");
    MainConjectureTransfer t{base_status, base_status, *alg.output.lambda, *an.output.lambda, ""};
    t.statement = std::string("main conjecture ") + (base_status ? "holds" : "is not asserted") + " over " +
                  alg.ext.describe() + " (lambda = " + std::to_string(t.lambda_algebraic) + ", mu = 0)";
    return t;
}

} // namespace kida
