#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "errors.hpp"

namespace abmod {

using Rational = mpq_class;
using Integer = mpz_class;

/// Canonicalized rational from a numerator/denominator pair.
inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw BadParameter("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_integer(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    return c.get_den() == 1;
}

/// Element of Q(i), the exact coefficient field used everywhere.
/// Equality is exact; there is no epsilon anywhere in the library.
class GaussianRational {
public:
    GaussianRational() : re_(0), im_(0) {}
    GaussianRational(long n) : re_(n), im_(0) {}
    GaussianRational(const Rational& re) : re_(re), im_(0) { re_.canonicalize(); }
    GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static GaussianRational i() { return GaussianRational(Rational(0), Rational(1)); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }
    bool is_rational_integer() const { return im_ == 0 && abmod::is_integer(re_); }
    bool is_natural() const { return is_rational_integer() && re_ >= 0; }

    GaussianRational conj() const { return {re_, Rational(-im_)}; }
    Rational norm() const { return re_ * re_ + im_ * im_; }

    GaussianRational operator-() const { return {Rational(-re_), Rational(-im_)}; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        if (o.is_zero()) throw BadParameter("division by zero in Q(i)");
        Rational n = o.norm();
        Rational r = (re_ * o.re_ + im_ * o.im_) / n;
        Rational i = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

private:
    Rational re_, im_;
};

using G = GaussianRational;

/// Lexicographic (re, im) order, the tie-break used for all deterministic choices.
inline bool lex_less(const G& a, const G& b) {
    int c = cmp(a.re(), b.re());
    if (c != 0) return c < 0;
    return cmp(a.im(), b.im()) < 0;
}

/// x - y as a rational integer, when it is one.
inline std::optional<Integer> integer_difference(const G& x, const G& y) {
    if (x.im() != y.im()) return std::nullopt;
    Rational d = x.re() - y.re();
    if (!is_integer(d)) return std::nullopt;
    return d.get_num();
}

/// Same class modulo Z: difference is a rational integer.
inline bool same_integer_class(const G& x, const G& y) {
    return integer_difference(x, y).has_value();
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Canonical text form: "0", "-3", "1/2", "i", "(1/2+3/4i)", "(-1-i)".
/// This is the coefficient syntax the series grammar uses.
inline std::string to_string(const G& z) {
    if (z.im() == 0) return to_string(z.re());
    std::string im_part;
    if (z.im() == 1) im_part = "i";
    else if (z.im() == -1) im_part = "-i";
    else im_part = to_string(z.im()) + "i";
    if (z.re() == 0) return im_part;
    std::string s = "(" + to_string(z.re());
    if (z.im() > 0) s += "+";
    s += im_part + ")";
    return s;
}

} // namespace abmod
