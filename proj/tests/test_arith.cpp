#include <gtest/gtest.h>

#include <random>
#include <set>

#include "expect_error.hpp"
#include "kida/arith.hpp"

using namespace kida;

namespace {

// Residue-set closure of a list of generators in Z/n_1 x ... x Z/n_r, by brute force.
std::set<Coords> closure(const std::vector<u64>& moduli, const std::vector<Coords>& gens) {
    std::set<Coords> seen{Coords(moduli.size(), 0)};
    std::vector<Coords> frontier(seen.begin(), seen.end());
    while (!frontier.empty()) {
        std::vector<Coords> next;
        for (const auto& x : frontier)
            for (const auto& g : gens) {
                Coords y(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) y[i] = (x[i] + g[i]) % moduli[i];
                if (seen.insert(y).second) next.push_back(y);
            }
        frontier = std::move(next);
    }
    return seen;
}

} // namespace

TEST(Factor, One) { EXPECT_TRUE(factor(1).empty()); }

TEST(Factor, Prime1123) {
    auto f = factor(1123);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0].prime, 1123u);
    EXPECT_EQ(f[0].exponent, 1u);
}

TEST(Factor, Tau23) {
    // trial-division oracle: 18643272 = 2^3 * 3 * 617 * 1259
    auto f = factor(18643272);
    std::vector<std::pair<u64, unsigned>> got;
    for (auto [p, e] : f) got.push_back({p, e});
    std::vector<std::pair<u64, unsigned>> want{{2, 3}, {3, 1}, {617, 1}, {1259, 1}};
    EXPECT_EQ(got, want);
}

TEST(Factor, Reconstructs) {
    for (u64 n = 1; n <= 20000; ++n) {
        auto f = factor(n);
        EXPECT_EQ(expand(f), n);
        for (std::size_t i = 1; i < f.size(); ++i) EXPECT_LT(f[i - 1].prime, f[i].prime);
        for (auto [p, e] : f) {
            EXPECT_TRUE(is_prime(p));
            EXPECT_GE(e, 1u);
        }
    }
}

TEST(Factor, LargeSemiprime) {
    auto f = factor(999983ull * 1000003ull);
    ASSERT_EQ(f.size(), 2u);
    EXPECT_EQ(f[0].prime, 999983u);
    EXPECT_EQ(f[1].prime, 1000003u);
}

TEST(MultOrder, Examples) {
    EXPECT_EQ(mult_order({1, 7}), 1u);
    EXPECT_EQ(mult_order({23, 11}), 1u);
    EXPECT_EQ(Residue(1123, 121).value, 34u);
    EXPECT_EQ(mult_order({1123, 121}), 11u);
}

TEST(MultOrder, MatchesRepeatedMultiplication) {
    for (u64 m = 2; m <= 300; ++m)
        for (u64 a = 1; a < m; ++a) {
            if (std::gcd(a, m) != 1) continue;
            u64 k = 1, x = a % m;
            while (x != 1 % m) {
                x = x * a % m;
                ++k;
            }
            ASSERT_EQ(mult_order({Int(a), m}), k) << a << " mod " << m;
            ASSERT_EQ(euler_phi(m) % k, 0u);
        }
}

TEST(MultOrder, NotAUnit) {
    EXPECT_KIDA_ERROR(mult_order({6, 9}), ErrorCode::NotAUnit);
}

TEST(PadicVal, Examples) {
    EXPECT_EQ(padic_val(121, 11), 2u);
    EXPECT_EQ(padic_val(checked_pow(1123, 10) - 1, 11), 1u);
    EXPECT_EQ(padic_val(5, 7), 0u);
    EXPECT_EQ(padic_val(-250, 5), 3u);
}

TEST(PadicVal, ZeroInput) {
    EXPECT_KIDA_ERROR(padic_val(0, 3), ErrorCode::ZeroInput);
}

TEST(PadicVal, PowerTimesUnit) {
    for (u64 p : {2, 3, 5, 7, 11})
        for (unsigned t = 0; t < 8; ++t)
            for (u64 m = 1; m < 60; ++m) {
                if (m % p == 0) continue;
                EXPECT_EQ(padic_val(Int(ipow(p, t)) * Int(m), p), t);
            }
}

TEST(Checked, OverflowIsAnError) {
    Int big = Int(1) << 120;
    EXPECT_KIDA_ERROR(checked_mul(big, big), ErrorCode::Overflow);
    EXPECT_THROW(checked_add(big * 64, big * 64), Error);
    EXPECT_THROW(checked_pow(10, 40), Error);
    EXPECT_EQ(checked_pow(10, 30), Int(1000000000000000LL) * Int(1000000000000000LL));
    EXPECT_THROW(checked_mul_u64(1ull << 40, 1ull << 40), Error);
}

TEST(IntText, RoundTrip) {
    for (const char* s : {"0", "-1", "36742572673913372", "-30328412970240000", "170141183460469231731687303715884105727"})
        EXPECT_EQ(to_string(parse_int(s)), s);
    EXPECT_THROW(parse_int("12a"), Error);
    EXPECT_THROW(parse_int(""), Error);
    EXPECT_THROW(parse_int("999999999999999999999999999999999999999999"), Error);
}

TEST(UnitGroup, Examples) {
    UnitGroup g23(23);
    EXPECT_EQ(g23.invariant_factors(), std::vector<u64>{22});
    UnitGroup g1(1);
    EXPECT_TRUE(g1.invariant_factors().empty());
    EXPECT_EQ(g1.order(), 1u);
    UnitGroup g8(8);
    EXPECT_EQ(g8.invariant_factors(), (std::vector<u64>{2, 2}));
    UnitGroup g1000(1000);
    EXPECT_EQ(g1000.invariant_factors(), (std::vector<u64>{2, 2, 100}));
}

TEST(UnitGroup, CoordinatesAreInverseBijections) {
    for (u64 n = 1; n <= 400; ++n) {
        UnitGroup g(n);
        EXPECT_EQ(g.order(), euler_phi(n));
        const auto& d = g.invariant_factors();
        for (std::size_t i = 1; i < d.size(); ++i) EXPECT_EQ(d[i] % d[i - 1], 0u) << n;
        std::set<Coords> seen;
        for (u64 x = 0; x < n; ++x) {
            if (!g.is_unit(x)) continue;
            auto c = g.coordinates(x);
            for (std::size_t i = 0; i < c.size(); ++i) ASSERT_LT(c[i], d[i]);
            ASSERT_EQ(g.residue(c), x % n) << "n=" << n << " x=" << x;
            ASSERT_TRUE(seen.insert(c).second);
            ASSERT_EQ(g.from_component_coords(g.component_coords(x)), x % n);
        }
        EXPECT_EQ(seen.size(), g.order());
    }
}

TEST(UnitGroup, CoordinatesAreHomomorphic) {
    for (u64 n : {8u, 15u, 16u, 63u, 100u, 242u, 1123u, 2 * 3 * 5 * 7 * 11u}) {
        UnitGroup g(n);
        const auto& d = g.invariant_factors();
        std::mt19937_64 rng(n);
        for (int t = 0; t < 200; ++t) {
            u64 a = rng() % n, b = rng() % n;
            if (!g.is_unit(a) || !g.is_unit(b)) continue;
            auto ca = g.coordinates(a), cb = g.coordinates(b), cab = g.coordinates(a * b % n);
            for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ((ca[i] + cb[i]) % d[i], cab[i]);
        }
    }
}

TEST(DiscreteLog, SmallGroups) {
    for (u64 q : {7u, 9u, 25u, 27u, 49u, 121u, 1123u}) {
        UnitGroup u(q);
        u64 g = u.components()[0].generator, n = u.components()[0].order;
        EXPECT_EQ(mult_order({Int(g), q}), n);
        for (u64 k = 0; k < n; k += 1 + n / 50) EXPECT_EQ(discrete_log(g, powmod(g, k, q), n, q), k);
    }
}

TEST(SubgroupOrder, MatchesClosure) {
    std::mt19937_64 rng(11);
    std::vector<std::vector<u64>> shapes{{2, 4}, {3, 9}, {2, 2, 2}, {6, 12}, {4, 8, 8}, {10}, {2, 6, 18}};
    for (const auto& m : shapes) {
        for (int t = 0; t < 60; ++t) {
            std::vector<Coords> gens(rng() % 4);
            for (auto& g : gens) {
                g.resize(m.size());
                for (std::size_t i = 0; i < m.size(); ++i) g[i] = rng() % m[i];
            }
            auto set = closure(m, gens);
            ASSERT_EQ(subgroup_order(m, gens), set.size());
            Coords x(m.size());
            for (std::size_t i = 0; i < m.size(); ++i) x[i] = rng() % m[i];
            EXPECT_EQ(subgroup_contains(m, gens, x), set.count(x) == 1);
        }
    }
}

TEST(SubgroupOrder, CyclicKernel) {
    std::mt19937_64 rng(5);
    std::vector<u64> m{4, 12, 36};
    for (int t = 0; t < 100; ++t) {
        std::vector<Coords> gens(1 + rng() % 3);
        std::vector<u64> images;
        for (auto& g : gens) {
            g = {rng() % 4, rng() % 12, rng() % 36};
            images.push_back(g[2] % 9); // the map x -> x_3 mod 9
        }
        auto ker = cyclic_kernel(m, gens, images, 9);
        std::set<Coords> want;
        for (const auto& x : closure(m, gens))
            if (x[2] % 9 == 0) want.insert(x);
        EXPECT_EQ(closure(m, ker), want);
    }
}
