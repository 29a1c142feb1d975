#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "scalars.hpp"

namespace abmod {

using QVec = std::vector<G>;

/// Dense matrix over Q(i). Row-major, exact arithmetic throughout.
class QMat {
public:
    QMat() : rows_(0), cols_(0) {}
    QMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static QMat identity(std::size_t n) {
        QMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = G(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    G& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const G& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    friend QMat operator+(const QMat& x, const QMat& y) {
        QMat r(x.rows_, x.cols_);
        for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = x.a_[k] + y.a_[k];
        return r;
    }
    friend QMat operator-(const QMat& x, const QMat& y) {
        QMat r(x.rows_, x.cols_);
        for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = x.a_[k] - y.a_[k];
        return r;
    }
    friend QMat operator*(const QMat& x, const QMat& y) {
        QMat r(x.rows_, y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                if (x(i, k).is_zero()) continue;
                for (std::size_t j = 0; j < y.cols_; ++j) {
                    if (y(k, j).is_zero()) continue;
                    r(i, j) += x(i, k) * y(k, j);
                }
            }
        return r;
    }
    friend QMat operator*(const G& v, const QMat& x) {
        QMat r = x;
        for (auto& e : r.a_) e = v * e;
        return r;
    }
    friend bool operator==(const QMat& x, const QMat& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }

    QMat transpose() const {
        QMat r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    QVec apply(const QVec& v) const {
        QVec r(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) {
                if ((*this)(i, j).is_zero() || v[j].is_zero()) continue;
                r[i] += (*this)(i, j) * v[j];
            }
        return r;
    }

    G trace() const {
        G t;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    bool is_zero() const {
        for (const auto& e : a_)
            if (!e.is_zero()) return false;
        return true;
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    std::vector<std::size_t> rref() {
        std::vector<std::size_t> pivots;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
            std::size_t sel = r;
            while (sel < rows_ && (*this)(sel, c).is_zero()) ++sel;
            if (sel == rows_) continue;
            if (sel != r)
                for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(sel, j), (*this)(r, j));
            G inv = G(1) / (*this)(r, c);
            for (std::size_t j = c; j < cols_; ++j) (*this)(r, j) = inv * (*this)(r, j);
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i == r || (*this)(i, c).is_zero()) continue;
                G f = (*this)(i, c);
                for (std::size_t j = c; j < cols_; ++j) (*this)(i, j) -= f * (*this)(r, j);
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    std::size_t rank() const {
        QMat m = *this;
        return m.rref().size();
    }

    /// Basis of the right nullspace, one vector per free column.
    std::vector<QVec> nullspace() const {
        QMat m = *this;
        auto pivots = m.rref();
        std::vector<bool> is_pivot(cols_, false);
        for (auto c : pivots) is_pivot[c] = true;
        std::vector<QVec> basis;
        for (std::size_t free = 0; free < cols_; ++free) {
            if (is_pivot[free]) continue;
            QVec v(cols_);
            v[free] = G(1);
            for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
            basis.push_back(std::move(v));
        }
        return basis;
    }

    /// One solution of (*this) x = rhs, if any.
    std::optional<QVec> solve(const QVec& rhs) const {
        QMat aug(rows_, cols_ + 1);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
            aug(i, cols_) = rhs[i];
        }
        auto pivots = aug.rref();
        if (!pivots.empty() && pivots.back() == cols_) return std::nullopt;
        QVec x(cols_);
        for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, cols_);
        return x;
    }

    G det() const {
        QMat m = *this;
        G d(1);
        for (std::size_t c = 0; c < cols_; ++c) {
            std::size_t sel = c;
            while (sel < rows_ && m(sel, c).is_zero()) ++sel;
            if (sel == rows_) return G(0);
            if (sel != c) {
                for (std::size_t j = 0; j < cols_; ++j) std::swap(m(sel, j), m(c, j));
                d = -d;
            }
            d *= m(c, c);
            G inv = G(1) / m(c, c);
            for (std::size_t i = c + 1; i < rows_; ++i) {
                if (m(i, c).is_zero()) continue;
                G f = inv * m(i, c);
                for (std::size_t j = c; j < cols_; ++j) m(i, j) -= f * m(c, j);
            }
        }
        return d;
    }

    QMat inverse() const {
        QMat aug(rows_, 2 * cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
            aug(i, cols_ + i) = G(1);
        }
        auto pivots = aug.rref();
        if (pivots.size() != cols_ || pivots.back() != cols_ - 1)
            throw NotInvertible("matrix not invertible over Q(i)");
        QMat r(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(i, j) = aug(i, cols_ + j);
        return r;
    }

    /// Monic characteristic polynomial det(x I - A), low degree first.
    /// Faddeev-LeVerrier: only divisions by 1..n, stays in Q(i) exactly.
    std::vector<G> charpoly() const {
        std::size_t n = rows_;
        std::vector<G> c(n + 1);
        c[n] = G(1);
        QMat m(n, n);
        for (std::size_t k = 1; k <= n; ++k) {
            m = (*this) * m;
            for (std::size_t i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
            G t; // trace of A*m without forming the product
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (!(*this)(i, j).is_zero() && !m(j, i).is_zero()) t += (*this)(i, j) * m(j, i);
            c[n - k] = -(G(1) / G(long(k))) * t;
        }
        return c;
    }

private:
    std::size_t rows_, cols_;
    std::vector<G> a_;
};

} // namespace abmod
