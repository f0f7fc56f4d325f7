#pragma once

// Abelian number fields presented as (N, H <= (Z/N)^x) and the splitting of
// rational primes in them and in their cyclotomic Z_p-towers.

#include <string>
#include <string_view>
#include <vector>

#include "kida/arith.hpp"
#include "kida/error.hpp"

namespace kida::splitting {

/// The fixed field of H inside Q(zeta_N). H is kept in the component
/// coordinates of (Z/N)^x; `generators()` lists residues mod N.
class AbelianField {
public:
    /// H generated by the given residues mod N (an empty list means H trivial,
    /// i.e. the whole cyclotomic field).
    AbelianField(u64 modulus, const std::vector<u64>& generators) : units_(modulus) {
        for (u64 g : generators) {
            require(units_.is_unit(g), ErrorCode::NotAUnit,
                    std::to_string(g) + " is not a unit mod " + std::to_string(modulus));
            coords_.push_back(units_.component_coords(g % modulus));
        }
        finish();
    }

    /// H given directly in component coordinates of (Z/N)^x.
    static AbelianField from_coords(u64 modulus, std::vector<Coords> coords) {
        AbelianField f(modulus);
        for (auto& c : coords)
            require(c.size() == f.units_.components().size(), ErrorCode::InvalidArgument, "coordinate rank mismatch");
        f.coords_ = std::move(coords);
        f.finish();
        return f;
    }

    static AbelianField rationals() { return AbelianField(1, {}); }

    /// Q(zeta_N)^(H) with H = {x^d}; the caller has checked uniqueness.
    static AbelianField power_subgroup(u64 modulus, u64 d) {
        AbelianField f(modulus);
        const auto& comps = f.units_.components();
        for (std::size_t i = 0; i < comps.size(); ++i) {
            Coords c(comps.size(), 0);
            c[i] = d % comps[i].order;
            f.coords_.push_back(std::move(c));
        }
        f.finish();
        return f;
    }

    u64 modulus() const { return units_.modulus(); }
    const UnitGroup& units() const { return units_; }
    std::vector<u64> moduli() const { return units_.component_orders(); }
    const std::vector<Coords>& subgroup_coords() const { return coords_; }
    const std::vector<u64>& generators() const { return residues_; }
    u64 subgroup_order() const { return h_order_; }
    u64 degree() const { return units_.order() / h_order_; }

    /// Whether the residue class x (a unit mod N) lies in H.
    bool fixes(u64 x) const {
        auto m = moduli();
        return subgroup_contains(m, coords_, units_.component_coords(x % modulus()));
    }

    /// The same field presented at a multiple M of the current modulus: H is
    /// replaced by its preimage under (Z/M)^x -> (Z/N)^x.
    AbelianField lift(u64 M) const {
        u64 N = modulus();
        require(M % N == 0, ErrorCode::InvalidArgument,
                "cannot present a field of modulus " + std::to_string(N) + " at " + std::to_string(M));
        if (M == N) return *this;
        AbelianField out(M);
        const auto& comps = out.units_.components();
        auto unit_vec = [&](std::size_t i, u64 k) {
            Coords c(comps.size(), 0);
            c[i] = k % comps[i].order;
            return c;
        };
        // kernel of the reduction map, component by component
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const auto& c = comps[i];
            unsigned B = 0;
            for (u64 t = N; t % c.prime == 0; t /= c.prime) ++B;
            if (c.prime != 2) {
                out.coords_.push_back(unit_vec(i, B == 0 ? 1 : ipow(c.prime, B - 1) * (c.prime - 1)));
            } else if (c.exponent == 2) { // (Z/4)^x = <3>
                if (B <= 1) out.coords_.push_back(unit_vec(i, 1));
            } else if (c.generator == c.prime_power - 1) { // sign part of (Z/2^A)^x
                if (B <= 1) out.coords_.push_back(unit_vec(i, 1));
            } else { // <5> part
                out.coords_.push_back(unit_vec(i, B <= 2 ? 1 : ipow(2, B - 2)));
            }
        }
        // lifts of the generators of H
        u64 rest = M;
        for (auto [q, e] : factor(N))
            while (rest % q == 0) rest /= q;
        for (u64 h : residues_) {
            u64 x = crt_pair(h % N, N, 1 % rest, rest);
            out.coords_.push_back(out.units_.component_coords(x));
        }
        out.finish();
        return out;
    }

    std::string describe() const {
        if (degree() == 1) return "Q";
        std::string s = "cyclotomic:" + std::to_string(modulus()) + ":gens=";
        for (std::size_t i = 0; i < residues_.size(); ++i) s += (i ? "," : "") + std::to_string(residues_[i]);
        return s;
    }

private:
    explicit AbelianField(u64 modulus) : units_(modulus) {}

    void finish() {
        auto m = moduli();
        // drop redundant generators so residues stay short and deterministic
        std::vector<Coords> kept;
        u64 order = 1;
        for (auto& c : coords_) {
            for (std::size_t j = 0; j < c.size(); ++j) c[j] %= m[j];
            if (std::all_of(c.begin(), c.end(), [](u64 v) { return v == 0; })) continue;
            kept.push_back(c);
            u64 next = kida::subgroup_order(m, kept);
            if (next == order) kept.pop_back();
            else order = next;
        }
        coords_ = std::move(kept);
        h_order_ = kida::subgroup_order(m, coords_);
        residues_.clear();
        for (const auto& c : coords_) residues_.push_back(units_.from_component_coords(c));
    }

    UnitGroup units_;
    std::vector<Coords> coords_;
    std::vector<u64> residues_;
    u64 h_order_ = 1;
};

/// Common modulus for two presentations.
inline u64 common_modulus(const AbelianField& a, const AbelianField& b) {
    return lcm_u64(a.modulus(), b.modulus());
}

/// inner <= outer as fields, i.e. H(outer) is contained in H(inner).
inline bool is_subfield(const AbelianField& inner, const AbelianField& outer) {
    u64 M = common_modulus(inner, outer);
    auto a = inner.lift(M), b = outer.lift(M);
    auto m = a.moduli();
    for (const auto& c : b.subgroup_coords())
        if (!subgroup_contains(m, a.subgroup_coords(), c)) return false;
    return true;
}

inline bool same_field(const AbelianField& a, const AbelianField& b) { return is_subfield(a, b) && is_subfield(b, a); }

struct PlaceData {
    u64 ell;
    u64 e;
    u64 f;
    u64 g;
    friend bool operator==(const PlaceData&, const PlaceData&) = default;
};

/// e, f, g of ell in F/Q. Inertia is the ell-part of (Z/N)^x, Frobenius the
/// class that is ell away from ell and 1 at ell.
inline PlaceData efg(const AbelianField& F, u64 ell) {
    require(is_prime(ell), ErrorCode::InvalidArgument, std::to_string(ell) + " is not prime");
    const auto& U = F.units();
    auto m = F.moduli();
    const auto& comps = U.components();
    auto ih = F.subgroup_coords();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (comps[i].prime != ell) continue;
        Coords c(comps.size(), 0);
        c[i] = 1;
        ih.push_back(std::move(c));
    }
    u64 h = F.subgroup_order();
    u64 e = subgroup_order(m, ih) / h;
    auto dh = ih;
    dh.push_back(U.component_coords(ell, ell));
    u64 ef = subgroup_order(m, dh) / h;
    return {ell, e, ef / e, F.degree() / ef};
}

// ---------------------------------------------------------------------------
// Cyclotomic Z_p-towers (p odd).

/// F * B_m, where B_m is the degree-p^m subfield of Q(zeta_{p^{m+1}}).
inline AbelianField tower_field(const AbelianField& F, u64 p, unsigned m) {
    require(is_prime(p) && p != 2, ErrorCode::InvalidArgument, "p must be an odd prime");
    u64 pk = ipow(p, m + 1);
    u64 M = lcm_u64(F.modulus(), pk);
    auto L = F.lift(M);
    if (m == 0) return L;
    const auto& comps = L.units().components();
    std::size_t ip = 0;
    while (comps[ip].prime != p) ++ip;
    u64 pm = ipow(p, m);
    std::vector<u64> images;
    for (const auto& c : L.subgroup_coords()) images.push_back(c[ip] % pm);
    auto ker = cyclic_kernel(L.moduli(), L.subgroup_coords(), images, pm);
    return AbelianField::from_coords(M, std::move(ker));
}

struct TowerLayer {
    unsigned level;   // n with [F_n : F] = p^n
    unsigned cyclotomic_level; // m with F_n = F * B_m
    u64 modulus;
    u64 degree;       // [F_n : Q]
    u64 places;       // number of places of F_n above ell
    friend bool operator==(const TowerLayer&, const TowerLayer&) = default;
};

struct TowerPlaceData {
    u64 ell;
    u64 p;
    u64 g_base;       // places of F above ell
    u64 g_infinity;   // places of F_infinity above ell
    bool ramified;    // ell ramified in F/Q
    std::vector<TowerLayer> layers; // through the first repeated count
};

/// Layers F_0 = F, F_1, ... of F_infinity/F. Presentations F * B_m that do not
/// grow the degree (B_m already inside F) are skipped.
inline std::vector<TowerLayer> tower_layers(const AbelianField& F, u64 ell, u64 p, unsigned count) {
    std::vector<TowerLayer> out;
    u64 prev_degree = 0;
    for (unsigned m = 0; out.size() < count; ++m) {
        require(m < 60, ErrorCode::Overflow, "tower modulus overflow");
        auto L = tower_field(F, p, m);
        if (L.degree() == prev_degree) continue;
        prev_degree = L.degree();
        out.push_back({unsigned(out.size()), m, L.modulus(), L.degree(), efg(L, ell).g});
    }
    return out;
}

/// Places above ell in the cyclotomic Z_p-tower of F, stopping at the first n
/// with g_{n+1} = g_n.
inline TowerPlaceData tower_places(const AbelianField& F, u64 ell, u64 p) {
    require(ell != p, ErrorCode::InvalidArgument, "ell must differ from p");
    require(is_prime(ell), ErrorCode::InvalidArgument, std::to_string(ell) + " is not prime");
    auto base = efg(F, ell);
    TowerPlaceData out{ell, p, base.g, 0, base.e > 1, {}};
    u64 prev_degree = 0;
    for (unsigned m = 0;; ++m) {
        require(m < 60, ErrorCode::Overflow, "tower modulus overflow");
        auto L = tower_field(F, p, m);
        if (L.degree() == prev_degree) continue;
        prev_degree = L.degree();
        TowerLayer layer{unsigned(out.layers.size()), m, L.modulus(), L.degree(), efg(L, ell).g};
        bool stable = !out.layers.empty() && out.layers.back().places == layer.places;
        out.layers.push_back(layer);
        if (stable) break;
    }
    out.g_infinity = out.layers.back().places;
    return out;
}

// ---------------------------------------------------------------------------
// F_infinity as a fixed field: Gal(Q(zeta_{N0 p^inf}) / F_infinity) is a finite
// subgroup of the torsion (Z/N0)^x x mu_{p-1} = (Z/N0 p)^x.

/// Fixed group of F_infinity inside (Z/(N0 p))^x, in component coordinates.
/// N0 must be prime to p and divisible by the prime-to-p part of F's modulus.
inline std::vector<Coords> infinite_level_subgroup(const AbelianField& F, u64 p, u64 N0) {
    require(N0 % p != 0, ErrorCode::InvalidArgument, "N0 must be prime to p");
    u64 N = F.modulus();
    require(N0 % prime_to_part(N, p) == 0, ErrorCode::InvalidArgument, "N0 does not cover the field's modulus");
    unsigned K = std::max(1u, N % p == 0 ? padic_val(Int(N), p) : 0u);
    u64 M = checked_mul_u64(N0, ipow(p, K));
    auto L = F.lift(M);
    const auto& comps = L.units().components();
    std::size_t ip = 0;
    while (comps[ip].prime != p) ++ip;
    u64 top = ipow(p, K - 1);
    std::vector<u64> images;
    for (const auto& c : L.subgroup_coords()) images.push_back(c[ip] % top);
    auto ker = cyclic_kernel(L.moduli(), L.subgroup_coords(), images, top);
    for (auto& c : ker) c[ip] = (c[ip] / top) % (p - 1);
    return ker;
}

struct InfiniteLevelComparison {
    u64 N0;
    u64 degree;          // [F'_inf : F_inf]
    u64 finite_degree;   // [F' : F]
};

/// [F'_inf : F_inf] after checking F <= F'.
inline InfiniteLevelComparison compare_towers(const AbelianField& F, const AbelianField& Fp, u64 p) {
    require(is_prime(p) && p != 2, ErrorCode::InvalidArgument, "p must be an odd prime");
    require(is_subfield(F, Fp), ErrorCode::NotASubfield, F.describe() + " is not contained in " + Fp.describe());
    u64 N0 = prime_to_part(common_modulus(F, Fp), p);
    auto h = infinite_level_subgroup(F, p, N0);
    auto hp = infinite_level_subgroup(Fp, p, N0);
    UnitGroup G(N0 * p);
    auto m = G.component_orders();
    u64 a = subgroup_order(m, h), b = subgroup_order(m, hp);
    for (const auto& c : hp)
        require(subgroup_contains(m, h, c), ErrorCode::NotASubfield, "tower of the base is not inside the extension's");
    return {N0, a / b, Fp.degree() / F.degree()};
}

/// The largest subfield of F_infinity's presentation unramified at p: H is
/// enlarged by the inertia at p and the modulus drops to its prime-to-p part.
inline AbelianField unramified_at_p_reduction(const AbelianField& F, u64 p) {
    require(is_prime(p) && p != 2, ErrorCode::InvalidArgument, "p must be an odd prime");
    u64 N0 = prime_to_part(F.modulus(), p);
    auto h = infinite_level_subgroup(F, p, N0);
    UnitGroup G(N0 * p);
    const auto& comps = G.components();
    std::vector<Coords> proj;
    for (const auto& c : h) {
        Coords d;
        for (std::size_t i = 0; i < comps.size(); ++i)
            if (comps[i].prime != p) d.push_back(c[i]);
        proj.push_back(std::move(d));
    }
    return AbelianField::from_coords(N0, std::move(proj));
}

/// A prime ell != p at which F'_inf / F_inf ramifies.
struct RamifiedPrime {
    u64 ell;
    u64 local_degree;   // [F'_inf,w' : F_inf,w], totally ramified
    u64 places;         // places of F'_inf above ell
    u64 base_places;    // places of F_inf above ell
    PlaceData base;     // ell in F/Q
    PlaceData extension; // ell in F'/Q
    TowerPlaceData tower; // tower data of F'
};

struct RamifiedSet {
    u64 degree;          // [F'_inf : F_inf]
    u64 finite_degree;   // [F' : F]
    bool unramified_at_p; // F'/F unramified above p
    std::vector<RamifiedPrime> primes;
};

inline RamifiedSet ramified_set(const AbelianField& F, const AbelianField& Fp, u64 p) {
    auto cmp = compare_towers(F, Fp, p);
    require(log_p(cmp.degree, p).has_value(), ErrorCode::NotPPower,
            "[F'_inf : F_inf] = " + std::to_string(cmp.degree) + " is not a power of " + std::to_string(p));
    RamifiedSet out{cmp.degree, cmp.finite_degree, efg(Fp, p).e == efg(F, p).e, {}};
    for (auto [ell, k] : factor(Fp.modulus())) {
        if (ell == p) continue;
        auto b = efg(F, ell), x = efg(Fp, ell);
        if (x.e == b.e) continue;
        auto tw = tower_places(Fp, ell, p);
        u64 base_places = tower_places(F, ell, p).g_infinity;
        out.primes.push_back({ell, x.e / b.e, tw.g_infinity, base_places, b, x, tw});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Field specs: Q | cyclotomic:N:degree=d | cyclotomic:N:gens=g1,g2,...

namespace detail {
inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}
} // namespace detail

/// The subfield of degree d of Q(zeta_N); unique when every Sylow subgroup that
/// d cuts partially is cyclic.
inline AbelianField cyclotomic_subfield_of_degree(u64 N, u64 d) {
    UnitGroup U(N);
    u64 n = U.order();
    require(d >= 1 && n % d == 0, ErrorCode::InvalidArgument,
            "Q(zeta_" + std::to_string(N) + ") has no subfield of degree " + std::to_string(d));
    const auto& inv = U.invariant_factors();
    for (auto [r, a] : factor(d)) {
        unsigned full = padic_val(Int(n), r);
        if (a == full) continue;
        std::size_t rank = 0;
        for (u64 x : inv)
            if (x % r == 0) ++rank;
        require(rank <= 1, ErrorCode::AmbiguousSubgroup,
                "Q(zeta_" + std::to_string(N) + ") has several subfields of degree " + std::to_string(d));
    }
    return AbelianField::power_subgroup(N, d);
}

inline AbelianField parse_field(std::string_view spec) {
    if (spec == "Q") return AbelianField::rationals();
    auto parts = detail::split(spec, ':');
    require(parts.size() == 3 && parts[0] == "cyclotomic", ErrorCode::ParseError,
            "bad field spec '" + std::string(spec) + "'");
    u64 N = parse_u64(parts[1]);
    require(N >= 1, ErrorCode::ParseError, "modulus must be positive");
    auto arg = parts[2];
    if (arg.starts_with("degree=")) return cyclotomic_subfield_of_degree(N, parse_u64(arg.substr(7)));
    if (arg.starts_with("gens=")) {
        std::vector<u64> gens;
        auto list = arg.substr(5);
        if (!list.empty())
            for (auto g : detail::split(list, ',')) gens.push_back(parse_u64(g));
        return AbelianField(N, gens);
    }
    fail(ErrorCode::ParseError, "bad field spec '" + std::string(spec) + "'");
}

} // namespace kida::splitting
