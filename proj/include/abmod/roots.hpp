#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "scalars.hpp"

namespace abmod {

/// Gaussian integer, used only inside the exact root search.
struct GaussInt {
    Integer re, im;
    GaussInt() : re(0), im(0) {}
    GaussInt(Integer r, Integer i) : re(std::move(r)), im(std::move(i)) {}

    Integer norm() const { return re * re + im * im; }
    bool is_zero() const { return re == 0 && im == 0; }

    friend GaussInt operator*(const GaussInt& a, const GaussInt& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussInt operator-(const GaussInt& a, const GaussInt& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend bool operator<(const GaussInt& a, const GaussInt& b) {
        int c = cmp(a.re, b.re);
        if (c != 0) return c < 0;
        return cmp(a.im, b.im) < 0;
    }
};

namespace detail {

inline Integer round_div(const Integer& n, const Integer& d) {
    // nearest integer to n/d, ties toward zero; |n - q d| <= |d|/2
    Integer q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    Integer ad = abs(d);
    if (2 * r > ad) q += 1;
    return q;
}

/// Exact quotient if b divides a in Z[i].
inline std::optional<GaussInt> gauss_exact_div(const GaussInt& a, const GaussInt& b) {
    Integer n = b.norm();
    Integer re = a.re * b.re + a.im * b.im;
    Integer im = a.im * b.re - a.re * b.im;
    if (re % n != 0 || im % n != 0) return std::nullopt;
    return GaussInt(re / n, im / n);
}

inline GaussInt gauss_mod(const GaussInt& a, const GaussInt& b) {
    Integer n = b.norm();
    GaussInt q(round_div(a.re * b.re + a.im * b.im, n), round_div(a.im * b.re - a.re * b.im, n));
    return a - q * b;
}

inline GaussInt gauss_gcd(GaussInt a, GaussInt b) {
    while (!b.is_zero()) {
        GaussInt r = gauss_mod(a, b);
        a = b;
        b = r;
    }
    return a;
}

/// Gaussian prime above an odd rational prime p = 1 mod 4.
inline GaussInt split_prime(const Integer& p) {
    // find x with x^2 = -1 mod p by scanning; p stays small at desk scale
    Integer x = 2;
    while (true) {
        Integer sq = (x * x + 1) % p;
        if (sq == 0) break;
        x += 1;
        if (x >= p) throw NonSplitSpectrum("failed to split prime during root search");
    }
    return gauss_gcd(GaussInt(p, 0), GaussInt(x, 1));
}

/// Gaussian prime factorization (exponents), up to units.
inline std::map<GaussInt, unsigned> gauss_factor(GaussInt a) {
    std::map<GaussInt, unsigned> fac;
    Integer n = a.norm();
    if (n == 0) throw BadParameter("factoring zero");
    // rational prime factors of the norm by trial division
    std::vector<Integer> primes;
    Integer d = 2;
    while (d * d <= n) {
        if (n % d == 0) {
            primes.push_back(d);
            while (n % d == 0) n /= d;
        }
        d += (d == 2) ? 1 : 2;
        if (d > 2000000)
            throw NonSplitSpectrum("coefficient norm too large for exact root search");
    }
    if (n > 1) primes.push_back(n);
    for (const Integer& p : primes) {
        std::vector<GaussInt> gps;
        if (p == 2) gps = {GaussInt(1, 1)};
        else if (p % 4 == 3) gps = {GaussInt(p, 0)};
        else {
            GaussInt pi = split_prime(p);
            gps = {pi, GaussInt(pi.re, -pi.im)};
        }
        for (const GaussInt& pi : gps) {
            unsigned e = 0;
            while (true) {
                auto q = gauss_exact_div(a, pi);
                if (!q) break;
                a = *q;
                ++e;
            }
            if (e > 0) fac[pi] = e;
        }
    }
    return fac;
}

/// All divisors of a, up to unit factors.
inline std::vector<GaussInt> gauss_divisors(const GaussInt& a) {
    auto fac = gauss_factor(a);
    std::vector<GaussInt> divs = {GaussInt(1, 0)};
    for (const auto& [p, e] : fac) {
        std::vector<GaussInt> next;
        GaussInt pk(1, 0);
        for (unsigned k = 0; k <= e; ++k) {
            for (const auto& d : divs) next.push_back(d * pk);
            pk = pk * p;
        }
        divs = std::move(next);
    }
    return divs;
}

inline G horner(const std::vector<G>& poly, const G& x) {
    G acc;
    for (std::size_t k = poly.size(); k-- > 0;) acc = acc * x + poly[k];
    return acc;
}

} // namespace detail

/// Exact roots in Q(i) of a polynomial over Q(i) (low degree first),
/// with multiplicities. Throws NonSplitSpectrum unless the polynomial
/// splits completely over Q(i).
///
/// Search: clear denominators to Z[i], then candidate roots are
/// unit * p / q with p dividing the constant and q the leading coefficient.
inline std::vector<std::pair<G, std::size_t>> qi_roots(std::vector<G> poly) {
    while (!poly.empty() && poly.back().is_zero()) poly.pop_back();
    if (poly.empty()) throw BadParameter("root search on the zero polynomial");

    std::map<std::pair<Rational, Rational>, std::size_t> found;
    auto record = [&](const G& r) { ++found[{r.re(), r.im()}]; };

    auto deflate = [](std::vector<G>& p, const G& r) {
        // synthetic division by (x - r); remainder is known zero
        std::vector<G> q(p.size() - 1);
        G carry = p.back();
        for (std::size_t k = p.size() - 1; k-- > 0;) {
            q[k] = carry;
            carry = p[k] + r * carry;
        }
        p = std::move(q);
    };

    while (poly.size() > 1) {
        if (poly[0].is_zero()) {
            record(G(0));
            poly.erase(poly.begin());
            continue;
        }
        // clear denominators
        Integer lcm = 1;
        for (const auto& c : poly) {
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.re().get_den().get_mpz_t());
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.im().get_den().get_mpz_t());
        }
        auto to_gauss = [&](const G& c) {
            Rational r = c.re() * Rational(lcm), i = c.im() * Rational(lcm);
            return GaussInt(r.get_num(), i.get_num());
        };
        GaussInt a0 = to_gauss(poly.front()), an = to_gauss(poly.back());
        const GaussInt units[4] = {GaussInt(1, 0), GaussInt(-1, 0), GaussInt(0, 1), GaussInt(0, -1)};
        bool hit = false;
        std::vector<std::pair<Rational, Rational>> seen;
        for (const auto& p : detail::gauss_divisors(a0)) {
            for (const auto& q : detail::gauss_divisors(an)) {
                for (const auto& u : units) {
                    GaussInt num = p * u;
                    G cand(make_rational(num.re, 1), make_rational(num.im, 1));
                    cand /= G(make_rational(q.re, 1), make_rational(q.im, 1));
                    auto key = std::make_pair(cand.re(), cand.im());
                    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
                    seen.push_back(key);
                    if (detail::horner(poly, cand).is_zero()) {
                        record(cand);
                        deflate(poly, cand);
                        hit = true;
                        break;
                    }
                }
                if (hit) break;
            }
            if (hit) break;
        }
        if (!hit)
            throw NonSplitSpectrum("characteristic polynomial does not split over Q(i)");
    }

    std::vector<std::pair<G, std::size_t>> roots;
    for (const auto& [key, mult] : found) roots.push_back({G(key.first, key.second), mult});
    std::sort(roots.begin(), roots.end(),
              [](const auto& x, const auto& y) { return lex_less(x.first, y.first); });
    return roots;
}

} // namespace abmod
