#include <catch2/catch_amalgamated.hpp>

#include "abmod/linalg.hpp"
#include "abmod/roots.hpp"

using namespace abmod;

namespace {

QMat mat2(long a, long b, long c, long d) {
    QMat m(2, 2);
    m(0, 0) = G(a);
    m(0, 1) = G(b);
    m(1, 0) = G(c);
    m(1, 1) = G(d);
    return m;
}

} // namespace

TEST_CASE("rank, rref and nullspace") {
    QMat m(2, 3);
    m(0, 0) = G(1);
    m(0, 1) = G(2);
    m(0, 2) = G(3);
    m(1, 0) = G(2);
    m(1, 1) = G(4);
    m(1, 2) = G(6);
    CHECK(m.rank() == 1);
    auto ns = m.nullspace();
    REQUIRE(ns.size() == 2);
    for (const auto& v : ns) {
        QVec image = m.apply(v);
        for (const auto& e : image) CHECK(e.is_zero());
    }
}

TEST_CASE("solve consistent and inconsistent systems") {
    QMat m = mat2(1, 1, 1, -1);
    auto x = m.solve({G(3), G(1)});
    REQUIRE(x.has_value());
    CHECK((*x)[0] == G(2));
    CHECK((*x)[1] == G(1));

    QMat s(2, 2);
    s(0, 0) = G(1);
    s(0, 1) = G(1);
    s(1, 0) = G(2);
    s(1, 1) = G(2);
    CHECK_FALSE(s.solve({G(0), G(1)}).has_value());
}

TEST_CASE("determinant and inverse over Q(i)") {
    QMat m(2, 2);
    m(0, 0) = G::i();
    m(0, 1) = G(1);
    m(1, 0) = G(0);
    m(1, 1) = G(Rational(1, 2));
    CHECK(m.det() == G(Rational(0), Rational(1, 2)));
    QMat inv = m.inverse();
    CHECK(inv * m == QMat::identity(2));
    CHECK(m * inv == QMat::identity(2));

    CHECK_THROWS_AS(mat2(1, 2, 2, 4).inverse(), NotInvertible);
    CHECK(mat2(1, 2, 2, 4).det() == G(0));
}

TEST_CASE("characteristic polynomial, low degree first") {
    auto cp = mat2(2, 1, 0, 3).charpoly();
    REQUIRE(cp.size() == 3);
    CHECK(cp[0] == G(6));
    CHECK(cp[1] == G(-5));
    CHECK(cp[2] == G(1));

    // companion matrix of x^3 - 2x + 5
    QMat c(3, 3);
    c(0, 2) = G(-5);
    c(1, 0) = G(1);
    c(1, 2) = G(2);
    c(2, 1) = G(1);
    auto cp3 = c.charpoly();
    REQUIRE(cp3.size() == 4);
    CHECK(cp3[0] == G(5));
    CHECK(cp3[1] == G(-2));
    CHECK(cp3[2] == G(0));
    CHECK(cp3[3] == G(1));
}

TEST_CASE("exact roots in Q(i)") {
    // (x - 1/2)(x - i)(x + 2), built by multiplying the factors
    auto mul = [](std::vector<G> f, const G& root) {
        std::vector<G> r(f.size() + 1, G(0));
        for (std::size_t k = 0; k < f.size(); ++k) {
            r[k + 1] = r[k + 1] + f[k];
            r[k] = r[k] - root * f[k];
        }
        return r;
    };
    std::vector<G> q = {G(1)};
    q = mul(q, G(Rational(1, 2)));
    q = mul(q, G::i());
    q = mul(q, G(-2));
    auto roots = qi_roots(q);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].first == G(-2));
    CHECK(roots[1].first == G::i());
    CHECK(roots[2].first == G(Rational(1, 2)));
    for (const auto& r : roots) CHECK(r.second == 1);

    // (x - 1)^2 x^2
    std::vector<G> dbl = {G(0), G(0), G(1), G(-2), G(1)};
    auto r2 = qi_roots(dbl);
    REQUIRE(r2.size() == 2);
    CHECK(r2[0].first == G(0));
    CHECK(r2[0].second == 2);
    CHECK(r2[1].first == G(1));
    CHECK(r2[1].second == 2);

    CHECK_THROWS_AS(qi_roots({G(-2), G(0), G(1)}), NonSplitSpectrum);
}
