#pragma once

#include <vector>

#include "linalg.hpp"
#include "series.hpp"

namespace abmod {

using SVec = std::vector<Series>;

/// Dense matrix of truncated series. All entries are kept at one common
/// truncation order (the minimum of what the inputs justify).
class SMat {
public:
    SMat() : rows_(0), cols_(0), order_(0) {}

    SMat(std::size_t rows, std::size_t cols, std::size_t order)
        : rows_(rows), cols_(cols), order_(order), a_(rows * cols, Series(order)) {}

    static SMat identity(std::size_t n, std::size_t order) {
        SMat m(n, n, order);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, Series::constant(G(1), order));
        return m;
    }

    static SMat from_entries(std::size_t rows, std::size_t cols, std::vector<Series> entries) {
        std::size_t order = SIZE_MAX;
        for (const auto& e : entries) order = std::min(order, e.known_order());
        SMat m(rows, cols, entries.empty() ? 0 : order);
        for (std::size_t k = 0; k < entries.size(); ++k) m.a_[k] = entries[k].truncated(m.order_);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t order() const { return order_; }

    const Series& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    void set(std::size_t i, std::size_t j, const Series& s) {
        a_[i * cols_ + j] = s.truncated(order_);
        if (s.known_order() < order_) retruncate(s.known_order());
    }

    SMat truncated(std::size_t order) const {
        if (order >= order_) return *this;
        SMat m = *this;
        m.retruncate(order);
        return m;
    }

    friend SMat operator+(const SMat& x, const SMat& y) {
        SMat r(x.rows_, x.cols_, std::min(x.order_, y.order_));
        for (std::size_t k = 0; k < r.a_.size(); ++k)
            r.a_[k] = (x.a_[k] + y.a_[k]).truncated(r.order_);
        return r;
    }
    friend SMat operator-(const SMat& x, const SMat& y) {
        SMat r(x.rows_, x.cols_, std::min(x.order_, y.order_));
        for (std::size_t k = 0; k < r.a_.size(); ++k)
            r.a_[k] = (x.a_[k] - y.a_[k]).truncated(r.order_);
        return r;
    }
    friend SMat operator*(const SMat& x, const SMat& y) {
        SMat r(x.rows_, y.cols_, std::min(x.order_, y.order_));
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                if (x(i, k).is_zero()) continue;
                for (std::size_t j = 0; j < y.cols_; ++j) {
                    if (y(k, j).is_zero()) continue;
                    r.a_[i * r.cols_ + j] += (x(i, k) * y(k, j)).truncated(r.order_);
                }
            }
        return r;
    }

    friend bool operator==(const SMat& x, const SMat& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.order_ == y.order_ && x.a_ == y.a_;
    }

    SMat transpose() const {
        SMat r(cols_, rows_, order_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r.a_[j * rows_ + i] = (*this)(i, j);
        return r;
    }

    /// Entrywise d/db; one order less.
    SMat derivative() const {
        SMat r(rows_, cols_, order_ == 0 ? 0 : order_ - 1);
        for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k].derivative();
        return r;
    }

    SMat substitute_neg_b() const {
        SMat r = *this;
        for (auto& e : r.a_) e = e.substitute_neg_b();
        return r;
    }

    SMat mul_bpow(std::size_t k) const {
        SMat r(rows_, cols_, order_ + k);
        for (std::size_t t = 0; t < a_.size(); ++t) r.a_[t] = a_[t].mul_bpow(k);
        return r;
    }

    friend SMat operator*(const Series& s, const SMat& x) {
        SMat r(x.rows_, x.cols_, std::min(s.known_order(), x.order_));
        for (std::size_t k = 0; k < x.a_.size(); ++k) r.a_[k] = (s * x.a_[k]).truncated(r.order_);
        return r;
    }

    /// Coefficient matrix of b^k.
    QMat coeff(std::size_t k) const {
        QMat m(rows_, cols_);
        if (k < order_)
            for (std::size_t i = 0; i < rows_; ++i)
                for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j)[k];
        return m;
    }

    QMat eval0() const { return coeff(0); }

    static SMat from_coeffs(const std::vector<QMat>& coeffs, std::size_t rows, std::size_t cols) {
        SMat m(rows, cols, coeffs.size());
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                Series s(coeffs.size());
                for (std::size_t k = 0; k < coeffs.size(); ++k) s.set(k, coeffs[k](i, j));
                m.a_[i * cols + j] = std::move(s);
            }
        return m;
    }

    SVec apply(const SVec& v) const {
        std::size_t ord = order_;
        for (const auto& s : v) ord = std::min(ord, s.known_order());
        SVec r(rows_, Series(ord));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) {
                if ((*this)(i, j).is_zero() || v[j].is_zero()) continue;
                r[i] += ((*this)(i, j) * v[j]).truncated(ord);
            }
        return r;
    }

    bool is_zero() const {
        for (const auto& e : a_)
            if (!e.is_zero()) return false;
        return true;
    }

    /// Inverse of a matrix whose constant term is invertible over Q(i),
    /// computed order by order. Known to the same order as the input.
    SMat inverse() const {
        QMat m0 = eval0();
        QMat r0 = m0.inverse(); // throws NotInvertible
        std::vector<QMat> mk(order_), rk(order_);
        for (std::size_t k = 0; k < order_; ++k) mk[k] = coeff(k);
        if (order_ > 0) rk[0] = r0;
        for (std::size_t k = 1; k < order_; ++k) {
            QMat acc(rows_, cols_);
            for (std::size_t i = 1; i <= k; ++i) acc = acc + mk[i] * rk[k - i];
            rk[k] = G(-1) * (r0 * acc);
        }
        return from_coeffs(rk, rows_, cols_);
    }

    /// Block-diagonal sum.
    static SMat direct_sum(const SMat& x, const SMat& y) {
        SMat r(x.rows_ + y.rows_, x.cols_ + y.cols_, std::min(x.order_, y.order_));
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t j = 0; j < x.cols_; ++j) r.a_[i * r.cols_ + j] = x(i, j).truncated(r.order_);
        for (std::size_t i = 0; i < y.rows_; ++i)
            for (std::size_t j = 0; j < y.cols_; ++j)
                r.a_[(x.rows_ + i) * r.cols_ + (x.cols_ + j)] = y(i, j).truncated(r.order_);
        return r;
    }

private:
    void retruncate(std::size_t order) {
        order_ = order;
        for (auto& e : a_) e = e.truncated(order);
    }

    std::size_t rows_, cols_, order_;
    std::vector<Series> a_;
};

} // namespace abmod
