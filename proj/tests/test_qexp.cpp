#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "expect_error.hpp"
#include "kida/qexp.hpp"

using namespace kida;
using namespace kida::qexp;

namespace {

// prod_{n>=1} (1 - q^n)^24 by dense schoolbook multiplication, shifted by q.
std::vector<Int> naive_delta(std::size_t n) {
    std::vector<Int> s(n + 1, 0);
    s[0] = 1;
    for (std::size_t k = 1; k <= n; ++k)
        for (int r = 0; r < 24; ++r)
            for (std::size_t i = n; i >= k; --i) s[i] -= s[i - k];
    std::vector<Int> out(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) out[i] = s[i - 1];
    return out;
}

Int sigma11(u64 n) {
    Int s = 0;
    for (u64 d = 1; d <= n; ++d)
        if (n % d == 0) s += checked_pow(Int(d), 11);
    return s;
}

// #E(F_ell) including the point at infinity, by trying every (x, y).
u64 brute_count(const EllipticCurve& e, u64 ell) {
    auto m = [ell](Int v) { return reduce(v, ell); };
    u64 count = 1;
    for (u64 x = 0; x < ell; ++x)
        for (u64 y = 0; y < ell; ++y) {
            Int X = x, Y = y;
            if (m(Y * Y + e.a1 * X * Y + e.a3 * Y) == m(X * X * X + e.a2 * X * X + e.a4 * X + e.a6)) ++count;
        }
    return count;
}

} // namespace

TEST(Tau, SmallValues) {
    std::vector<i64> want{1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944};
    for (u64 n = 1; n <= want.size(); ++n) EXPECT_EQ(tau(n), Int(want[n - 1])) << n;
}

TEST(Tau, NamedValues) {
    EXPECT_EQ(tau(23), Int(18643272));
    EXPECT_EQ(tau(1123, 1200), parse_int("36742572673913372"));
    EXPECT_EQ(tau(1000), parse_int("-30328412970240000"));
    EXPECT_EQ(tau(1200), parse_int("-6343143148339200"));
}

TEST(Tau, MatchesDenseProduct) {
    auto want = naive_delta(300);
    for (u64 n = 1; n <= 300; ++n) ASSERT_EQ(tau(n), want[n]) << n;
    auto direct = delta_coefficients(301);
    for (u64 n = 1; n <= 300; ++n) ASSERT_EQ(direct[n], want[n]) << n;
}

TEST(Tau, HeckeRelations) {
    for (u64 m = 1; m <= 40; ++m)
        for (u64 n = 1; n <= 40; ++n)
            if (std::gcd(m, n) == 1) {
                EXPECT_EQ(tau(m * n), tau(m) * tau(n));
            }
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43})
        EXPECT_EQ(tau(p * p), tau(p) * tau(p) - checked_pow(Int(p), 11)) << p;
}

TEST(Tau, RamanujanCongruence) {
    for (u64 n = 1; n <= 150; ++n) EXPECT_EQ(reduce(tau(n) - sigma11(n), 691), 0u) << n;
}

TEST(Tau, DeligneBound) {
    for (u64 p = 2; p < 2000; ++p) {
        if (!is_prime(p)) continue;
        long double t = (long double)tau(p);
        EXPECT_LE(t * t, 4.0L * std::pow((long double)p, 11.0L)) << p;
    }
}

TEST(Tau, PrecisionBudget) {
    EXPECT_KIDA_ERROR(tau(1123, 1000), ErrorCode::PrecisionExceeded);
    EXPECT_KIDA_ERROR(tau(2001), ErrorCode::PrecisionExceeded);
    EXPECT_KIDA_ERROR(tau(0), ErrorCode::InvalidArgument);
    EXPECT_EQ(tau(1000, 1000), parse_int("-30328412970240000"));
}

TEST(Tau, ConcurrentCallersAgree) {
    std::vector<Int> got(8);
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < got.size(); ++i)
        pool.emplace_back([&, i] { got[i] = tau(1123, 1200 + 100 * i); });
    for (auto& t : pool) t.join();
    for (const auto& v : got) EXPECT_EQ(v, parse_int("36742572673913372"));
}

TEST(PowerSeriesProduct, Pentagonal) {
    auto e = pentagonal_series(30);
    // 1 - q - q^2 + q^5 + q^7 - q^12 - q^15 + q^22 + q^26
    std::vector<Int> want(30, 0);
    for (auto [k, s] : std::vector<std::pair<int, int>>{{0, 1}, {1, -1}, {2, -1}, {5, 1}, {7, 1}, {12, -1}, {15, -1}, {22, 1}, {26, 1}})
        want[k] = s;
    EXPECT_EQ(e.coefficients(), want);
    auto sq = e.multiply(e);
    EXPECT_EQ(sq.precision(), 30u);
    EXPECT_EQ(sq[1], -2);
}

TEST(EllipticCurve, X011Discriminant) {
    EXPECT_EQ(x0_11().discriminant(), Int(-161051));
    auto f = ModularForm::elliptic_curve(x0_11());
    EXPECT_EQ(f.level(), 11u);
    EXPECT_EQ(f.weight(), 2);
    EXPECT_EQ(f.id(), "ec:a1=0,a2=-1,a3=1,a4=-10,a6=-20");
}

TEST(EllipticCurve, X011Coefficients) {
    std::vector<std::pair<u64, int>> want{{2, -2}, {3, -1}, {5, 1}, {7, -2}, {13, 4}, {17, -2}, {19, 0}, {23, -1}};
    for (auto [ell, a] : want) EXPECT_EQ(ec_ap(x0_11(), ell), Int(a)) << ell;
    // split multiplicative at 11
    EXPECT_EQ(ModularForm::elliptic_curve(x0_11()).prime_coefficient(11), 1);
    std::vector<std::pair<u64, u64>> counts{{2, 5}, {3, 5}, {5, 5}, {7, 10}, {13, 10}, {23, 25}};
    for (auto [ell, n] : counts) EXPECT_EQ(count_points(x0_11(), ell), n);
}

TEST(EllipticCurve, CountsMatchBruteForce) {
    std::vector<EllipticCurve> curves{x0_11(), {1, 0, 0, -1, 0}, {0, 0, 1, -1, 0}, {1, 1, 1, 3, -5}, {0, 0, 0, 0, 1}};
    for (const auto& e : curves)
        for (u64 ell = 2; ell < 120; ++ell) {
            if (!is_prime(ell) || reduce(e.discriminant(), ell) == 0) continue;
            u64 n = count_points(e, ell);
            EXPECT_EQ(n, brute_count(e, ell)) << ell;
            Int a = Int(ell) + 1 - Int(n);
            EXPECT_LE(a * a, Int(4 * ell));
        }
}

TEST(EllipticCurve, Errors) {
    EXPECT_KIDA_ERROR(ec_ap(x0_11(), 11), ErrorCode::BadReduction);
    EXPECT_KIDA_ERROR(ec_ap(x0_11(), 100003, 1000), ErrorCode::BoundExceeded);
    EXPECT_KIDA_ERROR(ModularForm::elliptic_curve({0, 0, 0, 0, 0}), ErrorCode::InvalidArgument);
}

TEST(ModularFormCoefficients, HeckeRecursionForCurve) {
    auto f = ModularForm::elliptic_curve(x0_11());
    // a_4 = a_2^2 - 2, a_6 = a_2 a_3, a_121 = a_11^2
    EXPECT_EQ(f.coefficient(1), 1);
    EXPECT_EQ(f.coefficient(4), 2);
    EXPECT_EQ(f.coefficient(6), 2);
    EXPECT_EQ(f.coefficient(8), -2 * 2 - 2 * -2);
    EXPECT_EQ(f.coefficient(121), 1);
    EXPECT_EQ(f.coefficient(9), 1 - 3);
}

TEST(ModularFormCoefficients, DeltaMatchesTau) {
    auto f = ModularForm::delta();
    EXPECT_EQ(f.id(), "delta");
    for (u64 n = 1; n <= 50; ++n) EXPECT_EQ(f.coefficient(n), tau(n));
}

TEST(Frobenius, Delta) {
    auto f = ModularForm::delta();
    EXPECT_EQ(frobenius_data(f, 23, 11), (FrobeniusData{10, 1, 11}));
    EXPECT_EQ(frobenius_data(f, 1123, 11), (FrobeniusData{2, 1, 11}));
    EXPECT_KIDA_ERROR(frobenius_data(f, 11, 11), ErrorCode::InvalidArgument);
}

TEST(Frobenius, CurveAtBadPrime) {
    auto f = ModularForm::elliptic_curve(x0_11());
    EXPECT_KIDA_ERROR(frobenius_data(f, 11, 5), ErrorCode::RamifiedLevel);
    EXPECT_EQ(frobenius_data(f, 2, 5), (FrobeniusData{3, 2, 5}));
}

TEST(Frobenius, Nebentypus) {
    auto f = ModularForm::table(2, 7, {{2, 1}, {3, 0}});
    f.set_nebentypus({5, {{2, 4}}});
    EXPECT_EQ(frobenius_data(f, 2, 5), (FrobeniusData{1, 3, 5}));
    EXPECT_KIDA_ERROR(frobenius_data(f, 3, 5), ErrorCode::MissingCoefficient);
    EXPECT_KIDA_ERROR(frobenius_data(f, 2, 3), ErrorCode::MissingCoefficient);
    EXPECT_KIDA_ERROR(f.coefficient(4), ErrorCode::MissingCoefficient);
}

TEST(Table, ParsesAndMatchesCurve) {
    auto f = load_table(std::string(KIDA_SAMPLES_DIR) + "/x0_11.table");
    EXPECT_EQ(f.weight(), 2);
    EXPECT_EQ(f.level(), 11u);
    for (u64 ell = 2; ell < 100; ++ell)
        if (is_prime(ell) && ell != 11) {
            EXPECT_EQ(f.prime_coefficient(ell), ec_ap(x0_11(), ell)) << ell;
        }
    EXPECT_KIDA_ERROR(f.prime_coefficient(101), ErrorCode::MissingCoefficient);
}

TEST(Table, Comments) {
    std::istringstream in("# comment\nweight 4 level 5  # trailing\n\n2 -4\n3 2\n");
    auto f = parse_table(in);
    EXPECT_EQ(f.weight(), 4);
    EXPECT_EQ(f.prime_coefficient(2), -4);
    EXPECT_EQ(f.coefficient(4), 16 - 8);
}

TEST(Table, Errors) {
    auto parse = [](const char* text) {
        std::istringstream in(text);
        return parse_table(in);
    };
    EXPECT_KIDA_ERROR(parse("2 1\n"), ErrorCode::ParseError);
    EXPECT_KIDA_ERROR(parse(""), ErrorCode::ParseError);
    EXPECT_KIDA_ERROR(parse("weight 2 level 11\n4 1\n"), ErrorCode::ParseError);
    EXPECT_KIDA_ERROR(parse("weight 2 level 11\n2 1\n2 1\n"), ErrorCode::ParseError);
    EXPECT_KIDA_ERROR(parse("weight 2 level 11\n2 x\n"), ErrorCode::ParseError);
    EXPECT_KIDA_ERROR(parse("weight 2 level 11\n2 1 3\n"), ErrorCode::ParseError);
    EXPECT_KIDA_ERROR(load_table("/nonexistent/file.table"), ErrorCode::ParseError);
}

TEST(FormSpec, Grammar) {
    EXPECT_EQ(parse_form("delta").id(), "delta");
    EXPECT_EQ(parse_form("ec:a2=-1,a3=1,a4=-10,a6=-20").level(), 11u);
    EXPECT_EQ(parse_form("table:" + std::string(KIDA_SAMPLES_DIR) + "/x0_11.table").kind(), SourceKind::Table);
    EXPECT_KIDA_ERROR(parse_form("eta"), ErrorCode::ParseError);
    EXPECT_KIDA_ERROR(parse_form("ec:a5=1"), ErrorCode::ParseError);
    EXPECT_KIDA_ERROR(parse_form("ec:a1"), ErrorCode::ParseError);
}

TEST(Twist, QuadraticCharacterMod5) {
    // (Z/5)^x is cyclic of order 4 generated by 2; exponent 2 is the Legendre symbol
    DirichletCharacter psi(5, {{2}});
    auto f = ModularForm::delta();
    for (u64 n = 1; n <= 30; ++n) {
        auto v = twist_coefficient(f, psi, n);
        Int legendre = n % 5 == 0 ? 0 : (n % 5 == 1 || n % 5 == 4) ? 1 : -1;
        ASSERT_TRUE(v.as_integer().has_value());
        EXPECT_EQ(*v.as_integer(), legendre * tau(n)) << n;
    }
}

TEST(Twist, QuarticCharacterValues) {
    DirichletCharacter psi(5, {{1}});
    auto f = ModularForm::delta();
    auto v = twist_coefficient(f, psi, 2);
    EXPECT_EQ(v, (CyclotomicValue{-24, 1, 4}));
    EXPECT_FALSE(v.as_integer().has_value());
    // twisting again by the conjugate gives back tau(2)
    auto back = twist_value(v, psi.conj(), 2);
    EXPECT_EQ(back.as_integer(), Int(-24));
    EXPECT_EQ(twist_coefficient(f, psi, 10), CyclotomicValue{});
}

TEST(Twist, TrivialCharacter) {
    auto psi = DirichletCharacter::trivial(12);
    auto f = ModularForm::elliptic_curve(x0_11());
    EXPECT_EQ(twist_coefficient(f, psi, 5).as_integer(), Int(1));
    EXPECT_EQ(twist_coefficient(f, psi, 6).as_integer(), Int(0));
    EXPECT_KIDA_ERROR(DirichletCharacter(12, {{1}}), ErrorCode::InvalidArgument);
}
