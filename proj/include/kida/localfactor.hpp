#pragma once

// Local types of two-dimensional representations at a prime ell != p and the
// multiplicities of the trivial character in inertia coinvariants, over a
// base L and over its cyclic, totally ramified p-extensions.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kida/arith.hpp"
#include "kida/error.hpp"

namespace kida::localfactor {

/// A character phi of the local Galois group, seen only through what the
/// multiplicities need.
struct LocalCharData {
    bool ramified = false;
    bool trivial_mod_p = false;
    /// phi becomes unramified over the extension at hand (ignored if unramified)
    bool becomes_unramified = true;
    /// order of phi on inertia; 1 if unramified. For a ramified character that
    /// dies, 0 means "the smallest nontrivial step", i.e. p.
    u64 inertia_order = 1;

    friend bool operator==(const LocalCharData&, const LocalCharData&) = default;
};

inline LocalCharData unramified_char(bool trivial_mod_p) { return {false, trivial_mod_p, true, 1}; }
inline LocalCharData ramified_char(bool trivial_mod_p, bool dies, u64 inertia_order = 0) {
    return {true, trivial_mod_p, dies, inertia_order};
}

/// Frobenius polynomial x^2 - a x + c mod p.
struct UnramifiedPS {
    u64 a;
    u64 c;
    u64 p;
    friend bool operator==(const UnramifiedPS&, const UnramifiedPS&) = default;
};
struct RamifiedPS {
    LocalCharData first;
    LocalCharData second;
    friend bool operator==(const RamifiedPS&, const RamifiedPS&) = default;
};
struct Special {
    LocalCharData phi;
    friend bool operator==(const Special&, const Special&) = default;
};
struct Supercuspidal {
    friend bool operator==(const Supercuspidal&, const Supercuspidal&) = default;
};
/// m-values supplied per character: values[j] = m_L(V twisted by chi_j) for the
/// characters chi_j of a cyclic group of order P = values.size(). The data is
/// read as a multiset of characters, so it restricts to intermediate fields:
/// `level` = s means the base is the degree-p^s subextension.
struct Generic {
    u64 p;
    std::vector<u64> values;
    unsigned level = 0;
    friend bool operator==(const Generic&, const Generic&) = default;
};

using LocalType = std::variant<UnramifiedPS, RamifiedPS, Special, Supercuspidal, Generic>;

inline UnramifiedPS make_ups(Int a, Int c, u64 p) {
    require(is_prime(p), ErrorCode::InvalidArgument, "p must be prime");
    return {reduce(a, p), reduce(c, p), p};
}

inline Generic make_generic(u64 p, std::vector<u64> values, unsigned level = 0) {
    require(is_prime(p), ErrorCode::InvalidArgument, "p must be prime");
    require(!values.empty() && log_p(values.size(), p).has_value(), ErrorCode::IncoherentGenericData,
            "generic data must list p^a values, got " + std::to_string(values.size()));
    Generic g{p, std::move(values), level};
    require(ipow(p, level) <= g.values.size(), ErrorCode::IncoherentGenericData, "generic level beyond its data");
    return g;
}

/// chi_j for j in [0, order) in a cyclic group of the given order.
struct CyclicCharacter {
    u64 order = 1;
    u64 index = 0;
};

namespace detail {

inline u64 smallest_prime(u64 n) { return factor(n).front().prime; }

/// Exponent d of phi on inertia, with the automatic value resolved for a local
/// group of the given order.
inline u64 resolved_inertia_order(const LocalCharData& phi, u64 local_order) {
    if (!phi.ramified) return 1;
    if (phi.inertia_order != 0) return phi.inertia_order;
    return local_order > 1 ? smallest_prime(local_order) : 0;
}

/// [chi phi unramified and phi = 1 mod p] for chi = chi_j of a group of order E.
inline unsigned char_contribution(const LocalCharData& phi, CyclicCharacter chi) {
    if (!phi.trivial_mod_p) return 0;
    if (!phi.ramified) return chi.index % chi.order == 0 ? 1 : 0;
    if (!phi.becomes_unramified) return 0;
    u64 d = resolved_inertia_order(phi, chi.order);
    if (d <= 1 || chi.order % d != 0) return 0;
    // phi on inertia matches chi_{E/d}; chi phi is unramified for chi = its inverse
    u64 j0 = chi.order - chi.order / d;
    return chi.index % chi.order == j0 ? 1 : 0;
}

inline u64 generic_stride(const Generic& g, u64 local_order) {
    u64 P = g.values.size();
    u64 sub = P / ipow(g.p, g.level);
    require(sub % local_order == 0, ErrorCode::IncoherentGenericData,
            "generic data over a group of order " + std::to_string(P) + " at level " + std::to_string(g.level) +
                " does not cover a local degree " + std::to_string(local_order));
    return sub / local_order;
}

} // namespace detail

/// Number of Frobenius eigen-characters that are trivial mod p.
inline unsigned ups_trivial_count(const UnramifiedPS& u) {
    if (u.a == 2 % u.p && u.c == 1 % u.p) return 2;
    if (u.a == (u.c + 1) % u.p) return 1;
    return 0;
}

/// m_L(V_chi) for a two-dimensional type.
inline u64 m_single(const LocalType& V, CyclicCharacter chi) {
    require(chi.order >= 1, ErrorCode::InvalidArgument, "character of an empty group");
    bool trivial = chi.index % chi.order == 0;
    return std::visit(
        [&](const auto& t) -> u64 {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, UnramifiedPS>) {
                return trivial ? ups_trivial_count(t) : 0;
            } else if constexpr (std::is_same_v<T, RamifiedPS>) {
                return detail::char_contribution(t.first, chi) + detail::char_contribution(t.second, chi);
            } else if constexpr (std::is_same_v<T, Special>) {
                return detail::char_contribution(t.phi, chi);
            } else if constexpr (std::is_same_v<T, Supercuspidal>) {
                return 0;
            } else {
                fail(ErrorCode::GenericUnsupported, "generic types carry their m-values directly");
            }
        },
        V);
}

/// m over the base of the twist by chi_j, for any type including Generic.
inline u64 m_value(const LocalType& V, CyclicCharacter chi) {
    if (const auto* g = std::get_if<Generic>(&V)) {
        u64 stride = detail::generic_stride(*g, chi.order);
        u64 sub = g->values.size() / ipow(g->p, g->level);
        u64 target = (chi.index % chi.order) * stride;
        u64 total = 0;
        for (u64 k = target % sub; k < g->values.size(); k += sub) total += g->values[k];
        return total;
    }
    return m_single(V, chi);
}

/// The list m_L(V_chi_j), j = 0..E-1.
inline std::vector<u64> m_profile(const LocalType& V, u64 local_degree) {
    std::vector<u64> out;
    for (u64 j = 0; j < local_degree; ++j) out.push_back(m_value(V, {local_degree, j}));
    return out;
}

/// m(L'/L, V) = sum over chi of (m_L(V) - m_L(V_chi)) for [L':L] = local_degree.
inline Int m_extension(const LocalType& V, u64 local_degree) {
    require(local_degree >= 1, ErrorCode::InvalidArgument, "local degree must be positive");
    Int total = 0;
    Int m0 = Int(m_value(V, {local_degree, 0}));
    for (u64 j = 0; j < local_degree; ++j) total += m0 - Int(m_value(V, {local_degree, j}));
    return total;
}

/// V over the subextension of degree `degree` (a power of p): totally ramified,
/// so Frobenius is unchanged and inertia orders drop by that factor.
inline LocalType restrict(const LocalType& V, u64 p, u64 degree) {
    auto log = log_p(degree, p);
    require(log.has_value(), ErrorCode::NotPPower, std::to_string(degree) + " is not a power of " + std::to_string(p));
    auto shrink = [&](LocalCharData phi) {
        if (!phi.ramified || !phi.becomes_unramified || degree == 1) return phi;
        u64 d = phi.inertia_order == 0 ? p : phi.inertia_order;
        d /= std::gcd(d, degree);
        if (d == 1) return unramified_char(phi.trivial_mod_p);
        phi.inertia_order = d;
        return phi;
    };
    return std::visit(
        [&](const auto& t) -> LocalType {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, RamifiedPS>) {
                return RamifiedPS{shrink(t.first), shrink(t.second)};
            } else if constexpr (std::is_same_v<T, Special>) {
                return Special{shrink(t.phi)};
            } else if constexpr (std::is_same_v<T, Generic>) {
                require(t.p == p, ErrorCode::IncoherentGenericData, "generic data for a different p");
                return make_generic(t.p, t.values, t.level + *log);
            } else {
                return t;
            }
        },
        V);
}

/// h(phi) for ramification index e.
inline Int h_char(const LocalCharData& phi, u64 e) {
    require(e >= 1, ErrorCode::InvalidArgument, "ramification index must be positive");
    if (!phi.trivial_mod_p) return 0;
    if (!phi.ramified) return Int(e) - 1;
    if (!phi.becomes_unramified) return 0;
    require(e > 1, ErrorCode::InvalidArgument, "a ramified character cannot become unramified in a trivial extension");
    u64 d = detail::resolved_inertia_order(phi, e);
    return e % d == 0 ? -1 : 0;
}

/// h_v for ramification index e: the table for unramified principal series,
/// h(phi1) + h(phi2), h(phi), or 0.
inline Int h_v(const LocalType& V, u64 e) {
    require(e >= 1, ErrorCode::InvalidArgument, "ramification index must be positive");
    return std::visit(
        [&](const auto& t) -> Int {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, UnramifiedPS>) {
                unsigned k = ups_trivial_count(t);
                return Int(k) * (Int(e) - 1);
            } else if constexpr (std::is_same_v<T, RamifiedPS>) {
                return h_char(t.first, e) + h_char(t.second, e);
            } else if constexpr (std::is_same_v<T, Special>) {
                return h_char(t.phi, e);
            } else if constexpr (std::is_same_v<T, Supercuspidal>) {
                return 0;
            } else {
                fail(ErrorCode::GenericUnsupported, "no h-table for generic types");
            }
        },
        V);
}

/// Which row of the h-table a type falls in.
inline std::string h_case(const LocalType& V) {
    return std::visit(
        [&](const auto& t) -> std::string {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, UnramifiedPS>) {
                switch (ups_trivial_count(t)) {
                case 2: return "a=2,c=1";
                case 1: return "a=c+1,a!=2";
                default: return "otherwise";
                }
            } else if constexpr (std::is_same_v<T, RamifiedPS>) {
                return "principal series";
            } else if constexpr (std::is_same_v<T, Special>) {
                return "special";
            } else if constexpr (std::is_same_v<T, Supercuspidal>) {
                return "supercuspidal";
            } else {
                return "generic";
            }
        },
        V);
}

struct AdditivityResult {
    bool holds;
    Int lhs;   // m(L''/L)
    Int rhs;   // [L'':L'] m(L'/L) + m(L''/L')
    Int outer; // m(L'/L)
    Int upper; // m(L''/L')
};

/// m(L''/L) = [L'':L'] m(L'/L) + m(L''/L') for [L':L] = inner, [L'':L] = outer.
inline AdditivityResult check_tower_additivity(const LocalType& V, u64 p, u64 inner, u64 outer) {
    require(log_p(inner, p) && log_p(outer, p), ErrorCode::NotPPower, "degrees must be powers of p");
    require(outer % inner == 0, ErrorCode::InvalidArgument, "degrees must be nested");
    Int lhs = m_extension(V, outer);
    Int low = m_extension(V, inner);
    Int high = m_extension(restrict(V, p, inner), outer / inner);
    Int rhs = Int(outer / inner) * low + high;
    return {lhs == rhs, lhs, rhs, low, high};
}

// ---------------------------------------------------------------------------
// Spec strings: ups:a=<int>,c=<int> | ramps:<cs>;<cs> | special:<cs> | sc |
// generic:<m0,m1,...>, with cs = ram|unram,triv|nontriv[,dies|survives].

namespace detail {
inline std::vector<std::string_view> split_on(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

inline LocalCharData parse_charspec(std::string_view s) {
    auto parts = split_on(s, ',');
    require(parts.size() == 2 || parts.size() == 3, ErrorCode::ParseError, "bad character spec '" + std::string(s) + "'");
    LocalCharData phi;
    if (parts[0] == "ram") phi.ramified = true;
    else require(parts[0] == "unram", ErrorCode::ParseError, "expected ram|unram in '" + std::string(s) + "'");
    if (parts[1] == "triv") phi.trivial_mod_p = true;
    else require(parts[1] == "nontriv", ErrorCode::ParseError, "expected triv|nontriv in '" + std::string(s) + "'");
    if (parts.size() == 3) {
        if (parts[2] == "dies") phi.becomes_unramified = true;
        else if (parts[2] == "survives") phi.becomes_unramified = false;
        else fail(ErrorCode::ParseError, "expected dies|survives in '" + std::string(s) + "'");
    } else {
        require(!phi.ramified, ErrorCode::ParseError, "ramified character needs dies|survives: '" + std::string(s) + "'");
    }
    phi.inertia_order = phi.ramified ? 0 : 1;
    return phi;
}

inline std::string charspec(const LocalCharData& phi) {
    std::string s = phi.ramified ? "ram" : "unram";
    s += phi.trivial_mod_p ? ",triv" : ",nontriv";
    if (phi.ramified) s += phi.becomes_unramified ? ",dies" : ",survives";
    return s;
}
} // namespace detail

/// p is only consulted by ups and generic.
inline LocalType parse_local_type(std::string_view spec, u64 p) {
    auto colon = spec.find(':');
    auto head = spec.substr(0, colon);
    auto body = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    auto bad = [&] { fail(ErrorCode::ParseError, "bad local type '" + std::string(spec) + "'"); };
    if (head == "sc") {
        if (colon != std::string_view::npos) bad();
        return Supercuspidal{};
    }
    if (colon == std::string_view::npos) bad();
    if (head == "ups") {
        auto parts = detail::split_on(body, ',');
        if (parts.size() != 2 || !parts[0].starts_with("a=") || !parts[1].starts_with("c=")) bad();
        return make_ups(parse_int(parts[0].substr(2)), parse_int(parts[1].substr(2)), p);
    }
    if (head == "ramps") {
        auto parts = detail::split_on(body, ';');
        if (parts.size() != 2) bad();
        return RamifiedPS{detail::parse_charspec(parts[0]), detail::parse_charspec(parts[1])};
    }
    if (head == "special") return Special{detail::parse_charspec(body)};
    if (head == "generic") {
        unsigned level = 0;
        if (auto at = body.find('@'); at != std::string_view::npos) {
            level = unsigned(parse_u64(body.substr(at + 1)));
            body = body.substr(0, at);
        }
        std::vector<u64> values;
        for (auto v : detail::split_on(body, ',')) values.push_back(parse_u64(v));
        return make_generic(p, std::move(values), level);
    }
    bad();
    return Supercuspidal{};
}

inline std::string to_string(const LocalType& V) {
    return std::visit(
        [&](const auto& t) -> std::string {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, UnramifiedPS>) {
                return "ups:a=" + std::to_string(t.a) + ",c=" + std::to_string(t.c);
            } else if constexpr (std::is_same_v<T, RamifiedPS>) {
                return "ramps:" + detail::charspec(t.first) + ";" + detail::charspec(t.second);
            } else if constexpr (std::is_same_v<T, Special>) {
                return "special:" + detail::charspec(t.phi);
            } else if constexpr (std::is_same_v<T, Supercuspidal>) {
                return "sc";
            } else {
                std::string s = "generic:";
                for (std::size_t i = 0; i < t.values.size(); ++i) s += (i ? "," : "") + std::to_string(t.values[i]);
                if (t.level) s += "@" + std::to_string(t.level);
                return s;
            }
        },
        V);
}

} // namespace kida::localfactor
