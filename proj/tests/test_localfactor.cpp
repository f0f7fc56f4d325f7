#include <gtest/gtest.h>

#include <random>

#include "expect_error.hpp"
#include "kida/chargroup.hpp"
#include "kida/localfactor.hpp"
#include "kida/verify.hpp"

using namespace kida;
using namespace kida::localfactor;

namespace {

chargroup::RepMultiset random_multiset(u64 P, std::mt19937_64& rng) {
    auto G = chargroup::FiniteAbelianGroup::cyclic(P);
    chargroup::RepMultiset w(G);
    u64 entries = 1 + rng() % 7;
    for (u64 i = 0; i < entries; ++i) w.add({G.element_at(rng() % P)}, 1 + rng() % 3);
    return w;
}

// m over the degree-p^s subextension of the twist by chi_j (order E), counted
// directly as a multiplicity of the restricted multiset.
u64 oracle_m(const chargroup::RepMultiset& w, u64 p, unsigned s, u64 E, u64 j) {
    const auto& G = w.group();
    u64 P = G.order();
    u64 sub = P / ipow(p, s);
    chargroup::Character chi{G.element_at((j * (sub / E)) % P)};
    std::vector<chargroup::Element> h{{ipow(p, s) % P}};
    if (P == 1) h = {{}};
    return chargroup::multiplicity(w, chargroup::character_conj(G, chi), h);
}

} // namespace

TEST(Ups, TrivialCount) {
    EXPECT_EQ(ups_trivial_count(make_ups(2, 1, 11)), 2u);
    EXPECT_EQ(ups_trivial_count(make_ups(13, 23, 11)), 2u);
    EXPECT_EQ(ups_trivial_count(make_ups(4, 3, 11)), 1u);
    EXPECT_EQ(ups_trivial_count(make_ups(-1, 1, 11)), 0u);
    // p = 3: a = 2, c = 1 is the double case even though a = c + 1 also holds
    EXPECT_EQ(ups_trivial_count(make_ups(2, 1, 3)), 2u);
    EXPECT_EQ(h_case(make_ups(2, 1, 3)), "a=2,c=1");
    EXPECT_EQ(h_case(make_ups(0, 2, 3)), "a=c+1,a!=2");
    EXPECT_EQ(h_case(make_ups(1, 1, 3)), "otherwise");
}

TEST(Ups, TrivialCountCountsEigenvalues) {
    // roots of x^2 - a x + c equal to 1 mod p, with multiplicity
    for (u64 p : {3u, 5u, 7u, 11u})
        for (u64 a = 0; a < p; ++a)
            for (u64 c = 0; c < p; ++c) {
                u64 at_one = (1 + p - a + c) % p; // value at x = 1
                unsigned want = 0;
                if (at_one == 0) want = (a == 2 % p) ? 2 : 1; // derivative 2 - a vanishes for a double root
                EXPECT_EQ(ups_trivial_count({a, c, p}), want) << p << " " << a << " " << c;
            }
}

TEST(HTable, Values) {
    EXPECT_EQ(h_v(make_ups(2, 1, 11), 11), 20);
    EXPECT_EQ(h_v(make_ups(4, 3, 11), 11), 10);
    EXPECT_EQ(h_v(make_ups(10, 1, 11), 11), 0);
    EXPECT_EQ(h_v(make_ups(2, 1, 11), 1), 0);
    EXPECT_EQ(h_v(Special{unramified_char(true)}, 5), 4);
    EXPECT_EQ(h_v(Special{unramified_char(false)}, 5), 0);
    EXPECT_EQ(h_v(Special{ramified_char(true, true)}, 5), -1);
    EXPECT_EQ(h_v(Special{ramified_char(true, false)}, 5), 0);
    EXPECT_EQ(h_v(Special{ramified_char(false, true)}, 5), 0);
    EXPECT_EQ(h_v(RamifiedPS{ramified_char(true, true), unramified_char(true)}, 25), -1 + 24);
    EXPECT_EQ(h_v(Supercuspidal{}, 7), 0);
    EXPECT_KIDA_ERROR(h_v(make_generic(3, {1, 0, 0}), 3), ErrorCode::GenericUnsupported);
    EXPECT_KIDA_ERROR(h_v(Special{ramified_char(true, true)}, 1), ErrorCode::InvalidArgument);
}

TEST(HTable, InertiaOrderDecidesWhetherCharacterDies) {
    // order 9 on inertia: a degree-3 extension leaves it ramified
    EXPECT_EQ(h_v(Special{ramified_char(true, true, 9)}, 3), 0);
    EXPECT_EQ(h_v(Special{ramified_char(true, true, 9)}, 9), -1);
    EXPECT_EQ(m_extension(Special{ramified_char(true, true, 9)}, 3), 0);
    EXPECT_EQ(m_extension(Special{ramified_char(true, true, 9)}, 9), -1);
}

TEST(MValues, Profiles) {
    EXPECT_EQ(m_profile(make_ups(2, 1, 3), 3), (std::vector<u64>{2, 0, 0}));
    EXPECT_EQ(m_profile(Special{unramified_char(true)}, 3), (std::vector<u64>{1, 0, 0}));
    EXPECT_EQ(m_profile(Special{ramified_char(true, true)}, 3), (std::vector<u64>{0, 0, 1}));
    EXPECT_EQ(m_profile(Special{ramified_char(true, true, 3)}, 9), (std::vector<u64>{0, 0, 0, 0, 0, 0, 1, 0, 0}));
    EXPECT_EQ(m_profile(Supercuspidal{}, 5), (std::vector<u64>(5, 0)));
    EXPECT_EQ(m_single(make_ups(2, 1, 3), {1, 0}), 2u);
    EXPECT_KIDA_ERROR(m_single(make_generic(3, {1, 0, 0}), {3, 0}), ErrorCode::GenericUnsupported);
}

TEST(MValues, ExtensionEqualsHForTabulatedTypes) {
    for (u64 p : {3u, 5u, 7u, 11u})
        for (const auto& t : verify::detail::tabulated_types(p, 2))
            for (u64 e : {p, p * p}) EXPECT_EQ(m_extension(t, e), h_v(t, e)) << to_string(t) << " e=" << e;
}

TEST(MValues, Bounds) {
    // a two-dimensional type has at most two characters to count
    for (u64 p : {3u, 5u})
        for (const auto& t : verify::detail::tabulated_types(p, 2))
            for (u64 E : {u64(1), p, p * p})
                for (u64 j = 0; j < E; ++j) EXPECT_LE(m_value(t, {E, j}), 2u);
}

TEST(Generic, MatchesMultisetOracle) {
    std::mt19937_64 rng(42);
    for (u64 p : {2u, 3u, 5u})
        for (unsigned a = 0; ipow(p, a) <= 27; ++a) {
            u64 P = ipow(p, a);
            for (int t = 0; t < 10; ++t) {
                auto w = random_multiset(P, rng);
                auto g = make_generic(p, verify::generic_values_from_multiset(w));
                for (unsigned s = 0; s <= a; ++s) {
                    auto r = restrict(g, p, ipow(p, s));
                    for (unsigned b = 0; b + s <= a; ++b) {
                        u64 E = ipow(p, b);
                        Int ext = 0;
                        for (u64 j = 0; j < E; ++j) {
                            u64 want = oracle_m(w, p, s, E, j);
                            ASSERT_EQ(m_value(r, {E, j}), want) << "P=" << P << " s=" << s << " E=" << E << " j=" << j;
                            ext += Int(oracle_m(w, p, s, E, 0)) - Int(want);
                        }
                        EXPECT_EQ(m_extension(r, E), ext);
                    }
                }
            }
        }
}

TEST(Generic, Errors) {
    EXPECT_KIDA_ERROR(make_generic(3, {1, 2}), ErrorCode::IncoherentGenericData);
    EXPECT_KIDA_ERROR(make_generic(3, {}), ErrorCode::IncoherentGenericData);
    EXPECT_KIDA_ERROR(make_generic(3, {1, 0, 0}, 2), ErrorCode::IncoherentGenericData);
    auto g = make_generic(3, {1, 0, 0});
    EXPECT_KIDA_ERROR(m_value(g, {9, 1}), ErrorCode::IncoherentGenericData);
    EXPECT_KIDA_ERROR(restrict(g, 5, 5), ErrorCode::IncoherentGenericData);
    EXPECT_KIDA_ERROR(restrict(g, 3, 9), ErrorCode::IncoherentGenericData);
    EXPECT_KIDA_ERROR(restrict(g, 3, 6), ErrorCode::NotPPower);
}

TEST(Restrict, CharacterBehaviour) {
    auto dies9 = Special{ramified_char(true, true, 9)};
    EXPECT_EQ(std::get<Special>(restrict(dies9, 3, 3)).phi.inertia_order, 3u);
    EXPECT_FALSE(std::get<Special>(restrict(dies9, 3, 9)).phi.ramified);
    auto survives = Special{ramified_char(true, false)};
    EXPECT_EQ(restrict(survives, 3, 3), LocalType(survives));
    auto ups = make_ups(2, 1, 5);
    EXPECT_EQ(restrict(ups, 5, 25), LocalType(ups));
}

TEST(Additivity, Examples) {
    auto r = check_tower_additivity(make_ups(2, 1, 3), 3, 3, 9);
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.lhs, 16);
    EXPECT_EQ(r.outer, 4);
    EXPECT_EQ(r.upper, 4);
    auto s = check_tower_additivity(Special{ramified_char(true, true)}, 3, 3, 9);
    EXPECT_TRUE(s.holds);
    EXPECT_EQ(s.lhs, -1);
    EXPECT_EQ(s.rhs, 3 * -1 + 2);
    EXPECT_KIDA_ERROR(check_tower_additivity(Supercuspidal{}, 3, 9, 3), ErrorCode::InvalidArgument);
    EXPECT_KIDA_ERROR(check_tower_additivity(Supercuspidal{}, 3, 2, 4), ErrorCode::NotPPower);
}

TEST(Additivity, SuiteHasNoCounterexamples) {
    auto r = verify::tower_additivity_suite(1, 27, 10);
    EXPECT_TRUE(r.passed()) << (r.counterexamples.empty() ? "" : r.counterexamples.front());
    EXPECT_GT(r.cases, 1000u);
}

TEST(Grammar, Parse) {
    EXPECT_EQ(parse_local_type("ups:a=13,c=-10", 11), LocalType(UnramifiedPS{2, 1, 11}));
    EXPECT_EQ(parse_local_type("sc", 3), LocalType(Supercuspidal{}));
    EXPECT_EQ(parse_local_type("special:unram,triv", 3), LocalType(Special{unramified_char(true)}));
    EXPECT_EQ(parse_local_type("ramps:ram,triv,dies;unram,nontriv", 3),
              LocalType(RamifiedPS{ramified_char(true, true), unramified_char(false)}));
    EXPECT_EQ(parse_local_type("generic:1,0,2", 3), LocalType(make_generic(3, {1, 0, 2})));
    EXPECT_EQ(parse_local_type("generic:1,0,2,0,0,0,0,0,1@1", 3), LocalType(make_generic(3, {1, 0, 2, 0, 0, 0, 0, 0, 1}, 1)));
}

TEST(Grammar, RoundTrip) {
    for (u64 p : {3u, 5u})
        for (const auto& t : verify::detail::tabulated_types(p, 0)) {
            auto text = to_string(t);
            EXPECT_EQ(parse_local_type(text, p), t) << text;
        }
    for (const char* s : {"generic:1,0,2", "generic:0,1,0,0,0,0,0,0,3@1", "special:ram,nontriv,survives", "sc"})
        EXPECT_EQ(to_string(parse_local_type(s, 3)), s);
}

TEST(Grammar, Errors) {
    for (const char* s : {"", "ups", "ups:a=1", "ups:c=1,a=1", "ups:a=x,c=1", "sc:1", "special:", "special:ram,triv",
                          "special:unram,maybe", "special:ram,triv,dies,extra", "ramps:unram,triv", "cusp:1", "generic:1,x,2"})
    {
        SCOPED_TRACE(s);
        EXPECT_KIDA_ERROR(parse_local_type(s, 3), ErrorCode::ParseError);
    }
    EXPECT_KIDA_ERROR(parse_local_type("generic:1,0", 3), ErrorCode::IncoherentGenericData);
}
