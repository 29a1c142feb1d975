#pragma once

#include <optional>
#include <vector>

#include "scalars.hpp"

namespace abmod {

/// Truncated formal power series in b over Q(i).
///
/// A value represents a series known modulo b^N where N = known_order().
/// Coefficients at or beyond N are never claimed: every operation returns
/// the largest truncation order its inputs justify. A valuation that cannot
/// be resolved below N is reported as "at least N" (empty optional).
class TruncSeries {
public:
    TruncSeries() = default;

    /// Zero modulo b^order (all stored coefficients zero).
    explicit TruncSeries(std::size_t order) : c_(order) {}

    TruncSeries(std::vector<G> coeffs) : c_(std::move(coeffs)) {}

    static TruncSeries constant(const G& v, std::size_t order) {
        TruncSeries s(order);
        if (order > 0) s.c_[0] = v;
        return s;
    }

    /// v * b^k, known modulo b^order.
    static TruncSeries monomial(const G& v, std::size_t k, std::size_t order) {
        TruncSeries s(order);
        if (k < order) s.c_[k] = v;
        return s;
    }

    std::size_t known_order() const { return c_.size(); }

    const G& operator[](std::size_t k) const { return c_[k]; }
    void set(std::size_t k, const G& v) { c_[k] = v; }

    const G& at0() const {
        static const G zero;
        return c_.empty() ? zero : c_[0];
    }

    bool is_zero() const {
        for (const auto& x : c_)
            if (!x.is_zero()) return false;
        return true;
    }

    /// Index of the first nonzero stored coefficient; empty when the series
    /// vanishes modulo b^known_order (valuation >= known_order).
    std::optional<std::size_t> valuation() const {
        for (std::size_t k = 0; k < c_.size(); ++k)
            if (!c_[k].is_zero()) return k;
        return std::nullopt;
    }

    TruncSeries truncated(std::size_t order) const {
        if (order >= c_.size()) return *this;
        return TruncSeries(std::vector<G>(c_.begin(), c_.begin() + order));
    }

    TruncSeries operator-() const {
        TruncSeries r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend TruncSeries operator+(const TruncSeries& a, const TruncSeries& b) {
        std::size_t n = std::min(a.c_.size(), b.c_.size());
        TruncSeries r(n);
        for (std::size_t k = 0; k < n; ++k) r.c_[k] = a.c_[k] + b.c_[k];
        return r;
    }

    friend TruncSeries operator-(const TruncSeries& a, const TruncSeries& b) {
        std::size_t n = std::min(a.c_.size(), b.c_.size());
        TruncSeries r(n);
        for (std::size_t k = 0; k < n; ++k) r.c_[k] = a.c_[k] - b.c_[k];
        return r;
    }

    /// Cauchy product. The coefficient of b^k is determined whenever no
    /// unknown coefficient of either factor can reach it, so the result is
    /// known mod b^{min(Na + val(b), Nb + val(a))}: a factor's valuation
    /// shifts the other factor's horizon up.
    friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
        std::size_t va = a.valuation().value_or(a.c_.size());
        std::size_t vb = b.valuation().value_or(b.c_.size());
        std::size_t n = std::min(a.c_.size() + vb, b.c_.size() + va);
        TruncSeries r(n);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero()) continue;
            for (std::size_t j = 0; j < b.c_.size() && i + j < n; ++j) {
                if (b.c_[j].is_zero()) continue;
                r.c_[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return r;
    }

    TruncSeries& operator+=(const TruncSeries& o) { return *this = *this + o; }
    TruncSeries& operator-=(const TruncSeries& o) { return *this = *this - o; }
    TruncSeries& operator*=(const TruncSeries& o) { return *this = *this * o; }

    friend TruncSeries operator*(const G& v, const TruncSeries& a) {
        TruncSeries r = a;
        for (auto& x : r.c_) x = v * x;
        return r;
    }

    /// b^k * this; gains k orders of knowledge.
    TruncSeries mul_bpow(std::size_t k) const {
        TruncSeries r(c_.size() + k);
        for (std::size_t j = 0; j < c_.size(); ++j) r.c_[j + k] = c_[j];
        return r;
    }

    /// this / b^k. Requires the first k stored coefficients to vanish;
    /// loses k orders of knowledge.
    TruncSeries div_bpow(std::size_t k) const {
        if (k > c_.size())
            throw InsufficientPrecision("dividing by b^k past the known order", c_.size(), k + 1);
        for (std::size_t j = 0; j < k; ++j)
            if (!c_[j].is_zero()) throw BadParameter("series not divisible by b^k");
        return TruncSeries(std::vector<G>(c_.begin() + k, c_.end()));
    }

    /// d/db; known one order less than the input.
    TruncSeries derivative() const {
        if (c_.empty()) return TruncSeries(0);
        TruncSeries r(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) r.c_[k - 1] = G(long(k)) * c_[k];
        return r;
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    TruncSeries inverse() const {
        if (c_.empty() || c_[0].is_zero())
            throw NotAUnit("series has no constant term, not invertible");
        std::size_t n = c_.size();
        TruncSeries r(n);
        G u = G(1) / c_[0];
        r.c_[0] = u;
        for (std::size_t k = 1; k < n; ++k) {
            G acc;
            for (std::size_t j = 1; j <= k; ++j) {
                if (c_[j].is_zero()) continue;
                acc += c_[j] * r.c_[k - j];
            }
            r.c_[k] = -u * acc;
        }
        return r;
    }

    /// S(-b): negate odd coefficients.
    TruncSeries substitute_neg_b() const {
        TruncSeries r = *this;
        for (std::size_t k = 1; k < r.c_.size(); k += 2) r.c_[k] = -r.c_[k];
        return r;
    }

    /// Exact equality of stored data (same order, same coefficients).
    friend bool operator==(const TruncSeries& a, const TruncSeries& b) { return a.c_ == b.c_; }
    friend bool operator!=(const TruncSeries& a, const TruncSeries& b) { return !(a == b); }

    /// Equality modulo b^min(orders, n).
    bool equal_mod(const TruncSeries& o, std::size_t n) const {
        n = std::min({n, c_.size(), o.c_.size()});
        for (std::size_t k = 0; k < n; ++k)
            if (c_[k] != o.c_[k]) return false;
        return true;
    }

private:
    std::vector<G> c_;
};

using Series = TruncSeries;

} // namespace abmod
