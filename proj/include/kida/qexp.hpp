#pragma once

// q-expansions with exact integer coefficients and the Fourier-coefficient
// sources built on them: the discriminant form via the eta product, elliptic
// curves via point counting, and user tables of Hecke eigenvalues.

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "kida/arith.hpp"
#include "kida/chargroup.hpp"
#include "kida/error.hpp"

namespace kida::qexp {

inline constexpr std::size_t kDefaultPrecision = 2000;

/// Truncated power series sum_{i < B} c_i q^i with exact coefficients.
class PowerSeries {
public:
    explicit PowerSeries(std::size_t precision) : coeffs_(precision, 0) {}
    PowerSeries(std::vector<Int> coeffs) : coeffs_(std::move(coeffs)) {}

    std::size_t precision() const { return coeffs_.size(); }
    Int operator[](std::size_t i) const { return coeffs_.at(i); }
    Int& operator[](std::size_t i) { return coeffs_.at(i); }
    const std::vector<Int>& coefficients() const { return coeffs_; }

    /// Product truncated to the smaller precision; sparse in `rhs`.
    PowerSeries multiply(const PowerSeries& rhs) const {
        std::size_t B = std::min(precision(), rhs.precision());
        std::vector<std::pair<std::size_t, Int>> terms;
        for (std::size_t j = 0; j < B; ++j)
            if (rhs.coeffs_[j] != 0) terms.emplace_back(j, rhs.coeffs_[j]);
        PowerSeries out(B);
        for (std::size_t i = 0; i < B; ++i) {
            if (coeffs_[i] == 0) continue;
            for (auto [j, c] : terms) {
                if (i + j >= B) break;
                out.coeffs_[i + j] = checked_add(out.coeffs_[i + j], checked_mul(coeffs_[i], c));
            }
        }
        return out;
    }

private:
    std::vector<Int> coeffs_;
};

/// prod_{n >= 1} (1 - q^n) = sum_{k in Z} (-1)^k q^{k(3k-1)/2}, truncated.
inline PowerSeries pentagonal_series(std::size_t precision) {
    PowerSeries e(precision);
    for (i64 k = 0;; ++k) {
        bool any = false;
        for (i64 kk : {k, -k}) {
            i64 ex = kk * (3 * kk - 1) / 2;
            if (ex < i64(precision)) {
                e[std::size_t(ex)] = (k % 2 == 0) ? 1 : -1;
                any = true;
            }
        }
        if (!any) break;
    }
    return e;
}

/// Coefficients tau(1..B) of q prod (1 - q^n)^24: 24 truncated multiplications
/// by the pentagonal series.
inline std::vector<Int> delta_coefficients(std::size_t precision) {
    PowerSeries e = pentagonal_series(precision);
    PowerSeries acc(precision);
    if (precision > 0) acc[0] = 1;
    for (int i = 0; i < 24; ++i) acc = acc.multiply(e);
    std::vector<Int> tau(precision + 1, 0);
    for (std::size_t n = 1; n <= precision; ++n) tau[n] = acc[n - 1];
    return tau;
}

namespace detail {
// Longest tau table computed so far, shared by every caller; guarded.
struct DeltaCache {
    std::mutex mu;
    std::shared_ptr<const std::vector<Int>> table;
};
inline DeltaCache& delta_cache() {
    static DeltaCache cache;
    return cache;
}
} // namespace detail

/// tau(n) from the eta product at precision budget `precision` (n <= precision).
inline Int tau(u64 n, std::size_t precision = kDefaultPrecision) {
    require(n >= 1, ErrorCode::InvalidArgument, "tau(n) needs n >= 1");
    require(n <= precision, ErrorCode::PrecisionExceeded,
            "tau(" + std::to_string(n) + ") exceeds precision budget " + std::to_string(precision));
    auto& cache = detail::delta_cache();
    std::shared_ptr<const std::vector<Int>> table;
    {
        std::lock_guard lock(cache.mu);
        table = cache.table;
    }
    if (!table || table->size() <= n) {
        auto fresh = std::make_shared<const std::vector<Int>>(delta_coefficients(precision));
        std::lock_guard lock(cache.mu);
        if (!cache.table || cache.table->size() < fresh->size()) cache.table = fresh;
        table = fresh;
    }
    return (*table)[n];
}

// ---------------------------------------------------------------------------
// Elliptic curves y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

struct EllipticCurve {
    Int a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

    Int discriminant() const {
        Int b2 = checked_add(checked_mul(a1, a1), checked_mul(4, a2));
        Int b4 = checked_add(checked_mul(2, a4), checked_mul(a1, a3));
        Int b6 = checked_add(checked_mul(a3, a3), checked_mul(4, a6));
        Int b8 = checked_mul(checked_mul(a1, a1), a6);
        b8 = checked_add(b8, checked_mul(checked_mul(4, a2), a6));
        b8 = checked_sub(b8, checked_mul(checked_mul(a1, a3), a4));
        b8 = checked_add(b8, checked_mul(a2, checked_mul(a3, a3)));
        b8 = checked_sub(b8, checked_mul(a4, a4));
        Int d = -checked_mul(checked_mul(b2, b2), b8);
        d = checked_sub(d, checked_mul(8, checked_pow(b4, 3)));
        d = checked_sub(d, checked_mul(27, checked_mul(b6, b6)));
        d = checked_add(d, checked_mul(checked_mul(9, b2), checked_mul(b4, b6)));
        return d;
    }

    friend bool operator==(const EllipticCurve&, const EllipticCurve&) = default;
};

/// The curve X_0(11): y^2 + y = x^3 - x^2 - 10x - 20.
inline EllipticCurve x0_11() { return {0, -1, 1, -10, -20}; }

inline constexpr u64 kPointCountBound = 100000;

/// #E(F_ell) including the point at infinity; counts the singular point too when
/// ell divides the discriminant.
inline u64 count_points(const EllipticCurve& e, u64 ell) {
    u64 a1 = reduce(e.a1, ell), a2 = reduce(e.a2, ell), a3 = reduce(e.a3, ell), a4 = reduce(e.a4, ell),
        a6 = reduce(e.a6, ell);
    u64 count = 1;
    if (ell == 2) {
        for (u64 x = 0; x < 2; ++x)
            for (u64 y = 0; y < 2; ++y)
                if ((y * y + a1 * x * y + a3 * y) % 2 == (x * x * x + a2 * x * x + a4 * x + a6) % 2) ++count;
        return count;
    }
    // (2y + a1 x + a3)^2 = (a1 x + a3)^2 + 4 (x^3 + a2 x^2 + a4 x + a6)
    std::vector<unsigned char> roots(ell, 0);
    for (u64 y = 0; y < ell; ++y) ++roots[mulmod(y, y, ell)];
    for (u64 x = 0; x < ell; ++x) {
        u64 lin = (mulmod(a1, x, ell) + a3) % ell;
        u64 cubic = (mulmod(mulmod(x, x, ell), x, ell) + mulmod(a2, mulmod(x, x, ell), ell) + mulmod(a4, x, ell) + a6) % ell;
        u64 d = (mulmod(lin, lin, ell) + mulmod(4, cubic, ell)) % ell;
        count += roots[d];
    }
    return count;
}

/// a_ell = ell + 1 - #E(F_ell) for a prime of good reduction.
inline Int ec_ap(const EllipticCurve& e, u64 ell, u64 bound = kPointCountBound) {
    require(is_prime(ell), ErrorCode::InvalidArgument, std::to_string(ell) + " is not prime");
    require(ell <= bound, ErrorCode::BoundExceeded, "point-count bound " + std::to_string(bound) + " exceeded");
    Int disc = e.discriminant();
    require(disc != 0, ErrorCode::InvalidArgument, "singular curve");
    require(disc % Int(ell) != 0, ErrorCode::BadReduction, "bad reduction at " + std::to_string(ell));
    return Int(ell) + 1 - Int(count_points(e, ell));
}

// ---------------------------------------------------------------------------
// Modular forms with rational-integer Fourier coefficients.

/// Nebentypus values known only modulo p (enough for Frobenius data).
struct NebentypusModP {
    u64 p;
    std::map<u64, u64> values;
};

enum class SourceKind { Delta, EllipticCurve, Table };

class ModularForm {
public:
    static ModularForm delta(std::size_t precision = kDefaultPrecision) {
        ModularForm f;
        f.kind_ = SourceKind::Delta;
        f.weight_ = 12;
        f.level_ = 1;
        f.precision_ = precision;
        return f;
    }

    /// Level is taken as the radical of the discriminant; for a minimal model
    /// this is exactly the set of primes dividing the conductor.
    static ModularForm elliptic_curve(const EllipticCurve& e) {
        ModularForm f;
        f.kind_ = SourceKind::EllipticCurve;
        f.weight_ = 2;
        f.curve_ = e;
        Int disc = e.discriminant();
        require(disc != 0, ErrorCode::InvalidArgument, "singular curve");
        UInt ad = disc < 0 ? UInt(-disc) : UInt(disc);
        require(ad <= UINT64_MAX, ErrorCode::Overflow, "discriminant exceeds 64 bits");
        u64 rad = 1;
        for (auto [q, k] : factor(u64(ad))) rad *= q;
        f.level_ = rad;
        return f;
    }

    static ModularForm table(int weight, u64 level, std::map<u64, Int> prime_coefficients) {
        require(weight >= 2, ErrorCode::InvalidArgument, "weight must be >= 2");
        require(level >= 1, ErrorCode::InvalidArgument, "level must be >= 1");
        ModularForm f;
        f.kind_ = SourceKind::Table;
        f.weight_ = weight;
        f.level_ = level;
        for (auto& [ell, a] : prime_coefficients)
            require(is_prime(ell), ErrorCode::ParseError, "table key " + std::to_string(ell) + " is not prime");
        f.table_ = std::move(prime_coefficients);
        return f;
    }

    SourceKind kind() const { return kind_; }
    int weight() const { return weight_; }
    u64 level() const { return level_; }
    std::size_t precision() const { return precision_; }
    const std::optional<EllipticCurve>& curve() const { return curve_; }

    void set_nebentypus(NebentypusModP eps) { nebentypus_ = std::move(eps); }
    const std::optional<NebentypusModP>& nebentypus() const { return nebentypus_; }

    /// Short identifier echoed in reports.
    std::string id() const {
        switch (kind_) {
        case SourceKind::Delta: return "delta";
        case SourceKind::EllipticCurve: {
            const auto& e = *curve_;
            return "ec:a1=" + to_string(e.a1) + ",a2=" + to_string(e.a2) + ",a3=" + to_string(e.a3) +
                   ",a4=" + to_string(e.a4) + ",a6=" + to_string(e.a6);
        }
        case SourceKind::Table: return "table:weight=" + std::to_string(weight_) + ",level=" + std::to_string(level_);
        }
        return "?";
    }

    Int prime_coefficient(u64 ell) const {
        switch (kind_) {
        case SourceKind::Delta: return tau(ell, precision_);
        case SourceKind::EllipticCurve:
            require(ell <= kPointCountBound, ErrorCode::BoundExceeded, "point-count bound exceeded");
            return Int(ell) + 1 - Int(count_points(*curve_, ell));
        case SourceKind::Table: {
            auto it = table_.find(ell);
            require(it != table_.end(), ErrorCode::MissingCoefficient, "table has no a_" + std::to_string(ell));
            return it->second;
        }
        }
        fail(ErrorCode::InvalidArgument, "unknown source");
    }

    /// a_n. Composite indices come from the Hecke recursion on prime powers,
    /// except for the discriminant form where the series is read directly.
    Int coefficient(u64 n) const {
        require(n >= 1, ErrorCode::InvalidArgument, "a_n needs n >= 1");
        if (kind_ == SourceKind::Delta) return tau(n, precision_);
        Int a = 1;
        for (auto [ell, e] : factor(n)) a = checked_mul(a, prime_power_coefficient(ell, e));
        return a;
    }

private:
    Int prime_power_coefficient(u64 ell, unsigned e) const {
        Int a_ell = prime_coefficient(ell);
        if (level_ % ell == 0) return checked_pow(a_ell, e);
        require(!nebentypus_, ErrorCode::MissingCoefficient,
                "composite coefficients need exact nebentypus values, only residues are known");
        Int w = checked_pow(Int(ell), unsigned(weight_ - 1));
        Int prev = 1, cur = a_ell;
        for (unsigned k = 1; k < e; ++k) {
            Int next = checked_sub(checked_mul(a_ell, cur), checked_mul(w, prev));
            prev = cur;
            cur = next;
        }
        return e == 0 ? 1 : cur;
    }

    SourceKind kind_ = SourceKind::Delta;
    int weight_ = 12;
    u64 level_ = 1;
    std::size_t precision_ = kDefaultPrecision;
    std::optional<EllipticCurve> curve_;
    std::map<u64, Int> table_;
    std::optional<NebentypusModP> nebentypus_;
};

/// Coefficients of x^2 - a x + c, the Frobenius characteristic polynomial at ell,
/// reduced mod p.
struct FrobeniusData {
    u64 a;
    u64 c;
    u64 p;
    friend bool operator==(const FrobeniusData&, const FrobeniusData&) = default;
};

inline FrobeniusData frobenius_data(const ModularForm& f, u64 ell, u64 p) {
    require(is_prime(ell) && is_prime(p), ErrorCode::InvalidArgument, "ell and p must be prime");
    require(ell != p, ErrorCode::InvalidArgument, "ell must differ from p");
    require(f.level() % ell != 0, ErrorCode::RamifiedLevel,
            std::to_string(ell) + " divides the level; supply a local type instead");
    u64 a = reduce(f.prime_coefficient(ell), p);
    u64 eps = 1;
    if (const auto& n = f.nebentypus()) {
        require(n->p == p, ErrorCode::MissingCoefficient, "nebentypus residues given for a different p");
        auto it = n->values.find(ell);
        require(it != n->values.end(), ErrorCode::MissingCoefficient, "no nebentypus value at " + std::to_string(ell));
        eps = it->second % p;
    }
    u64 c = mulmod(powmod(ell, u64(f.weight() - 1), p), eps, p);
    return {a, c, p};
}

/// Parses the table format: a `weight k level N` header, then one `ell a_ell`
/// per line; `#` starts a comment.
inline ModularForm parse_table(std::istream& in) {
    std::optional<std::pair<int, u64>> header;
    std::map<u64, Int> coeffs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::vector<std::string> tok;
        {
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
                std::size_t j = i;
                while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
                if (j > i) tok.push_back(line.substr(i, j - i));
                i = j;
            }
        }
        if (tok.empty()) continue;
        auto where = " (line " + std::to_string(lineno) + ")";
        if (!header) {
            require(tok.size() == 4 && tok[0] == "weight" && tok[2] == "level", ErrorCode::ParseError,
                    "expected header 'weight k level N'" + where);
            Int k = parse_int(tok[1]);
            require(k >= 2 && k <= 1000, ErrorCode::ParseError, "weight out of range" + where);
            header = {int(k), parse_u64(tok[3])};
            continue;
        }
        require(tok.size() == 2, ErrorCode::ParseError, "expected 'ell a_ell'" + where);
        u64 ell = parse_u64(tok[0]);
        require(is_prime(ell), ErrorCode::ParseError, std::to_string(ell) + " is not prime" + where);
        require(coeffs.emplace(ell, parse_int(tok[1])).second, ErrorCode::ParseError, "duplicate prime" + where);
    }
    require(header.has_value(), ErrorCode::ParseError, "missing 'weight k level N' header");
    return ModularForm::table(header->first, header->second, std::move(coeffs));
}

inline ModularForm load_table(const std::string& path) {
    std::ifstream in(path);
    require(bool(in), ErrorCode::ParseError, "cannot open table file '" + path + "'");
    return parse_table(in);
}

/// Form specs: `delta` | `ec:a1=..,a2=..,a3=..,a4=..,a6=..` (missing
/// coefficients are 0) | `table:<path>`.
inline ModularForm parse_form(std::string_view spec, std::size_t precision = kDefaultPrecision) {
    if (spec == "delta") return ModularForm::delta(precision);
    if (spec.starts_with("table:")) return load_table(std::string(spec.substr(6)));
    require(spec.starts_with("ec:"), ErrorCode::ParseError, "bad form spec '" + std::string(spec) + "'");
    EllipticCurve e;
    std::string_view rest = spec.substr(3);
    while (!rest.empty()) {
        auto comma = rest.find(',');
        auto item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        auto eq = item.find('=');
        require(eq != std::string_view::npos, ErrorCode::ParseError, "expected aN=value in '" + std::string(item) + "'");
        auto key = item.substr(0, eq);
        Int v = parse_int(item.substr(eq + 1));
        if (key == "a1") e.a1 = v;
        else if (key == "a2") e.a2 = v;
        else if (key == "a3") e.a3 = v;
        else if (key == "a4") e.a4 = v;
        else if (key == "a6") e.a6 = v;
        else fail(ErrorCode::ParseError, "unknown curve coefficient '" + std::string(key) + "'");
    }
    return ModularForm::elliptic_curve(e);
}

// ---------------------------------------------------------------------------
// Twists by Dirichlet characters.

/// A Dirichlet character mod m: a character of the invariant-factor presentation
/// of (Z/m)^x.
class DirichletCharacter {
public:
    DirichletCharacter(u64 modulus, chargroup::Character chi) : units_(modulus), chi_(std::move(chi)) {
        require(chargroup::is_character_of(group(), chi_), ErrorCode::InvalidArgument,
                "character exponents do not match (Z/" + std::to_string(modulus) + ")^x");
    }

    static DirichletCharacter trivial(u64 modulus) {
        UnitGroup u(modulus);
        return {modulus, {std::vector<u64>(u.invariant_factors().size(), 0)}};
    }

    u64 modulus() const { return units_.modulus(); }
    chargroup::FiniteAbelianGroup group() const { return chargroup::FiniteAbelianGroup(units_.invariant_factors()); }
    const chargroup::Character& character() const { return chi_; }

    DirichletCharacter conj() const { return {modulus(), chargroup::character_conj(group(), chi_)}; }

    /// psi(n) as an exponent of zeta_L (L = exponent of the unit group), or
    /// nullopt when gcd(n, m) > 1.
    std::optional<u64> value_exponent(u64 n) const {
        if (std::gcd(n % modulus(), modulus()) != 1) return std::nullopt;
        return chargroup::character_value(group(), chi_, units_.coordinates(n));
    }

    u64 root_order() const { return group().exponent(); }

private:
    UnitGroup units_;
    chargroup::Character chi_;
};

/// coefficient * zeta_order^exponent, kept in lowest terms.
struct CyclotomicValue {
    Int coefficient = 0;
    u64 exponent = 0;
    u64 order = 1;

    static CyclotomicValue make(Int c, u64 e, u64 n) {
        if (c == 0) return {0, 0, 1};
        e %= n;
        u64 g = std::gcd(e, n);
        if (e == 0) g = n;
        return {c, e / g, n / g};
    }

    /// The value as a rational integer when zeta^exponent is +-1.
    std::optional<Int> as_integer() const {
        if (coefficient == 0 || order == 1) return coefficient;
        if (order == 2) return -coefficient;
        return std::nullopt;
    }

    friend bool operator==(const CyclotomicValue&, const CyclotomicValue&) = default;
};

/// a_n(f_psi) = a_n(f) psi(n).
inline CyclotomicValue twist_coefficient(const ModularForm& f, const DirichletCharacter& psi, u64 n) {
    auto e = psi.value_exponent(n);
    if (!e) return {};
    return CyclotomicValue::make(f.coefficient(n), *e, psi.root_order());
}

/// (c zeta^e) * psi(n): twisting an already twisted coefficient again.
inline CyclotomicValue twist_value(const CyclotomicValue& v, const DirichletCharacter& psi, u64 n) {
    auto e = psi.value_exponent(n);
    if (!e || v.coefficient == 0) return {};
    u64 L = lcm_u64(v.order, psi.root_order());
    u64 ex = (v.exponent * (L / v.order) + *e * (L / psi.root_order())) % L;
    return CyclotomicValue::make(v.coefficient, ex, L);
}

} // namespace kida::qexp
