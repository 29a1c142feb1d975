#include <catch2/catch_amalgamated.hpp>

#include "abmod/series.hpp"

using namespace abmod;

namespace {

Series poly(std::vector<long> cs, std::size_t order) {
    Series s(order);
    for (std::size_t k = 0; k < cs.size() && k < order; ++k) s.set(k, G(cs[k]));
    return s;
}

} // namespace

TEST_CASE("series construction and access") {
    Series z(5);
    CHECK(z.known_order() == 5);
    CHECK(z.is_zero());
    CHECK_FALSE(z.valuation().has_value());

    Series m = Series::monomial(G(2), 3, 6);
    CHECK(m[3] == G(2));
    REQUIRE(m.valuation().has_value());
    CHECK(*m.valuation() == 3);

    Series c = Series::constant(G(7), 4);
    CHECK(c.at0() == G(7));
    CHECK(*c.valuation() == 0);
}

TEST_CASE("arithmetic respects the minimum known order") {
    Series a = poly({1, 1}, 6);
    Series b = poly({1, -1}, 4);
    Series p = a * b;
    CHECK(p.known_order() == 4);
    CHECK(p[0] == G(1));
    CHECK(p[1] == G(0));
    CHECK(p[2] == G(-1));

    Series s = a + b;
    CHECK(s.known_order() == 4);
    CHECK(s[0] == G(2));
    CHECK(s[1] == G(0));
}

TEST_CASE("derivative satisfies the Leibniz rule") {
    Series f = poly({3, 0, 1, 5}, 8);
    Series g = poly({2, -1, 0, 0, 7}, 8);
    Series lhs = (f * g).derivative();
    Series rhs = f.derivative() * g.truncated(7) + f.truncated(7) * g.derivative();
    CHECK(lhs == rhs.truncated(lhs.known_order()));
}

TEST_CASE("b-power shifts") {
    Series f = poly({0, 0, 3, 1}, 5);
    Series up = f.mul_bpow(2);
    CHECK(up.known_order() == 7);
    CHECK(up[4] == G(3));

    Series down = f.div_bpow(2);
    CHECK(down.known_order() == 3);
    CHECK(down[0] == G(3));
    CHECK(down[1] == G(1));

    CHECK_THROWS_AS(poly({1}, 3).div_bpow(1), BadParameter);
    CHECK_THROWS_AS(poly({0, 0}, 2).div_bpow(3), InsufficientPrecision);
}

TEST_CASE("inverse of a unit") {
    Series f = poly({2, 1, 0, -3}, 7);
    Series inv = f.inverse();
    Series one = f * inv;
    CHECK(one[0] == G(1));
    for (std::size_t k = 1; k < one.known_order(); ++k) CHECK(one[k] == G(0));
    CHECK_THROWS_AS(poly({0, 1}, 4).inverse(), NotAUnit);
}

TEST_CASE("substitution b -> -b is an involution") {
    Series f = poly({1, 2, 3, 4}, 6);
    Series g = f.substitute_neg_b();
    CHECK(g[1] == G(-2));
    CHECK(g[2] == G(3));
    CHECK(g.substitute_neg_b() == f);
}

TEST_CASE("truncation and modular equality") {
    Series f = poly({1, 2, 3}, 6);
    Series g = poly({1, 2, 4}, 6);
    CHECK(f.equal_mod(g, 2));
    CHECK_FALSE(f.equal_mod(g, 3));
    CHECK(f.truncated(2) == g.truncated(2));
}
