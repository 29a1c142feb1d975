#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "series_matrix.hpp"

namespace abmod {

/// Full-rank lattice over C[[b]] inside the ambient free module, stored as
/// b^{-shift} times the column span of a canonical triangular basis.
///
/// Canonical basis: column j has pivot b^{d_j} at row j, zeros above the
/// pivot, and the entry at row i > j reduced mod b^{d_i}. This form is
/// unique, so two lattices are equal exactly when their normalized
/// representations coincide.
///
/// Truncating the generators at their common known order N replaces the
/// span by the span plus b^N times the ambient module, and that object is
/// polynomial, so the canonical form is computed exactly at an enlarged
/// working order and the result is re-stamped to N. The augmented span has
/// elementary divisor exponents min(d_j, N), so the computed form equals
/// the true one exactly when every pivot stays below b^N; the form is then
/// accepted only with the membership margin N >= 2K+2, where K is the
/// largest divisor exponent, since entries below b^K are meaningless for
/// containment questions.
class Lattice {
public:
    static Lattice standard(std::size_t rank, std::size_t order) {
        std::vector<SVec> gens(rank, SVec(rank, Series(order)));
        for (std::size_t j = 0; j < rank; ++j) gens[j][j] = Series::constant(G(1), order);
        return from_generators(rank, std::move(gens), 0);
    }

    static Lattice from_generators(std::size_t rank, std::vector<SVec> gens, long shift = 0) {
        Lattice L;
        L.rank_ = rank;
        L.shift_ = shift;
        L.echelonize(std::move(gens));
        return L;
    }

    static Lattice from_smat(const SMat& m, long shift = 0) {
        std::vector<SVec> gens;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            SVec c(m.rows(), Series(m.order()));
            for (std::size_t i = 0; i < m.rows(); ++i) c[i] = m(i, j);
            gens.push_back(std::move(c));
        }
        return from_generators(m.rows(), std::move(gens), shift);
    }

    std::size_t rank() const { return rank_; }
    std::size_t order() const { return order_; }
    long shift() const { return shift_; }
    const std::vector<std::size_t>& diag_exponents() const { return diag_; }
    const std::vector<SVec>& columns() const { return cols_; }

    SMat basis_smat() const {
        SMat m(rank_, rank_, order_);
        for (std::size_t j = 0; j < rank_; ++j)
            for (std::size_t i = 0; i < rank_; ++i) m.set(i, j, cols_[j][i]);
        return m;
    }

    /// b^k * L. Pure relabeling of the shift.
    Lattice multiply_bpow(long k) const {
        Lattice L = *this;
        L.shift_ -= k;
        return L;
    }

    /// Divide out the common b-power of the basis so that representations
    /// are directly comparable.
    Lattice normalized() const {
        std::size_t t = order_;
        for (const auto& c : cols_)
            for (const auto& e : c) {
                auto v = e.valuation();
                if (v) t = std::min(t, *v);
            }
        if (t == 0) return *this;
        Lattice L = *this;
        L.shift_ -= static_cast<long>(t);
        for (auto& c : L.cols_)
            for (auto& e : c) e = e.div_bpow(t);
        for (auto& d : L.diag_) d -= t;
        L.order_ -= t;
        return L;
    }

    friend Lattice operator+(const Lattice& x, const Lattice& y) {
        if (x.rank_ != y.rank_) throw ShapeMismatch("lattice sum: rank mismatch");
        long s = std::max(x.shift_, y.shift_);
        std::vector<SVec> gens;
        auto push_rescaled = [&](const Lattice& L) {
            std::size_t up = static_cast<std::size_t>(s - L.shift_);
            for (const auto& c : L.cols_) {
                SVec g;
                g.reserve(L.rank_);
                for (const auto& e : c) g.push_back(e.mul_bpow(up));
                gens.push_back(std::move(g));
            }
        };
        push_rescaled(x);
        push_rescaled(y);
        return from_generators(x.rank_, std::move(gens), s);
    }

    /// Solve H x = w over C[[b]] in the canonical basis H (ignoring the
    /// shift). Returns the coordinates, or nullopt when w is not a
    /// combination of the columns.
    std::optional<SVec> solve_in_basis(const SVec& w) const {
        if (w.size() != rank_) throw ShapeMismatch("lattice membership: length mismatch");
        SVec x(rank_);
        for (std::size_t j = 0; j < rank_; ++j) {
            Series num = w[j];
            for (std::size_t k = 0; k < j; ++k)
                if (!cols_[k][j].is_zero() && !x[k].is_zero()) num = num - cols_[k][j] * x[k];
            std::size_t d = diag_[j];
            if (d > num.known_order())
                throw InsufficientPrecision("lattice membership undecidable at working precision",
                                            num.known_order(), d);
            for (std::size_t t = 0; t < d; ++t)
                if (!num[t].is_zero()) return std::nullopt;
            x[j] = num.div_bpow(d);
        }
        return x;
    }

    /// Does the ambient vector v lie in the lattice? Optionally reports the
    /// coordinates with respect to the canonical basis of b^{-shift} H.
    bool contains(const SVec& v, SVec* coords = nullptr) const {
        SVec w = v;
        if (shift_ > 0)
            for (auto& e : w) e = e.mul_bpow(static_cast<std::size_t>(shift_));
        auto x = solve_in_basis(w);
        if (!x) return false;
        if (shift_ < 0) {
            std::size_t down = static_cast<std::size_t>(-shift_);
            for (auto& e : *x) {
                if (down > e.known_order())
                    throw InsufficientPrecision("lattice membership undecidable at working precision",
                                                e.known_order(), down);
                for (std::size_t t = 0; t < down; ++t)
                    if (!e[t].is_zero()) return false;
                e = e.div_bpow(down);
            }
        }
        if (coords) *coords = *x;
        return true;
    }

    bool contains_lattice(const Lattice& sub) const {
        if (sub.rank_ != rank_) throw ShapeMismatch("lattice containment: rank mismatch");
        for (const auto& c : sub.cols_) {
            SVec v = c;
            long rel = shift_ - sub.shift_;
            if (rel >= 0) {
                for (auto& e : v) e = e.mul_bpow(static_cast<std::size_t>(rel));
                if (!solve_in_basis(v)) return false;
            } else {
                auto x = solve_in_basis(v);
                if (!x) return false;
                std::size_t down = static_cast<std::size_t>(-rel);
                for (auto& e : *x) {
                    if (down > e.known_order())
                        throw InsufficientPrecision(
                            "lattice containment undecidable at working precision",
                            e.known_order(), down);
                    for (std::size_t t = 0; t < down; ++t)
                        if (!e[t].is_zero()) return false;
                }
            }
        }
        return true;
    }

    friend bool operator==(const Lattice& x, const Lattice& y) {
        if (x.rank_ != y.rank_) return false;
        Lattice a = x.normalized(), b = y.normalized();
        if (a.shift_ != b.shift_ || a.diag_ != b.diag_) return false;
        std::size_t need = 1;
        for (auto d : a.diag_) need = std::max(need, d + 1);
        std::size_t common = std::min(a.order_, b.order_);
        if (common < need)
            throw InsufficientPrecision("lattice comparison undecidable at working precision",
                                        common, need);
        for (std::size_t j = 0; j < x.rank_; ++j)
            for (std::size_t i = 0; i < x.rank_; ++i)
                if (!(a.cols_[j][i].truncated(common) == b.cols_[j][i].truncated(common)))
                    return false;
        return true;
    }

    /// Virtual colength: dim(ambient/L) when L sits inside the ambient
    /// module; in general the signed index exponent, additive in towers.
    long index_exponent() const {
        long s = 0;
        for (auto d : diag_) s += static_cast<long>(d);
        return s - static_cast<long>(rank_) * shift_;
    }

    /// dim_C(this / sub) for sub contained in this.
    std::size_t quotient_dim(const Lattice& sub) const {
        if (!contains_lattice(sub)) throw NotASublattice("quotient_dim: not a sublattice");
        return static_cast<std::size_t>(sub.index_exponent() - index_exponent());
    }

    /// Smallest m with L contained in b^{-m} * ambient.
    long min_shift_into_ambient() const {
        Lattice n = normalized();
        std::size_t vmin = n.order_;
        for (const auto& c : n.cols_)
            for (const auto& e : c) {
                auto v = e.valuation();
                if (v) vmin = std::min(vmin, *v);
            }
        return n.shift_ - static_cast<long>(vmin);
    }

    /// Elementary divisor exponents of the canonical basis, ascending.
    std::vector<std::size_t> smith_exponents() const {
        std::vector<SVec> w = cols_;
        std::size_t n = rank_;
        std::vector<std::size_t> ex;
        std::vector<std::size_t> rows(n), colsleft(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i, colsleft[i] = i;
        while (!rows.empty()) {
            std::size_t bi = 0, bj = 0, bv = SIZE_MAX;
            for (std::size_t cj = 0; cj < colsleft.size(); ++cj)
                for (std::size_t ri = 0; ri < rows.size(); ++ri) {
                    auto v = w[colsleft[cj]][rows[ri]].valuation();
                    if (v && *v < bv) bv = *v, bi = ri, bj = cj;
                }
            if (bv == SIZE_MAX)
                throw InsufficientPrecision(
                    "elementary divisors undecidable at working precision", order_, 0);
            ex.push_back(bv);
            std::size_t pc = colsleft[bj], pr = rows[bi];
            Series piv = w[pc][pr];
            Series pu = piv.div_bpow(bv).inverse();
            for (std::size_t cj = 0; cj < colsleft.size(); ++cj) {
                std::size_t c = colsleft[cj];
                if (c == pc || w[c][pr].is_zero()) continue;
                Series q = w[c][pr].div_bpow(bv) * pu;
                for (std::size_t ri = 0; ri < rows.size(); ++ri) {
                    std::size_t r = rows[ri];
                    w[c][r] = (r == pr) ? Series(q.known_order()) : w[c][r] - q * w[pc][r];
                }
            }
            for (std::size_t ri = 0; ri < rows.size(); ++ri) {
                std::size_t r = rows[ri];
                if (r == pr || w[pc][r].is_zero()) continue;
                w[pc][r] = Series(w[pc][r].known_order());
            }
            rows.erase(rows.begin() + static_cast<long>(bi));
            colsleft.erase(colsleft.begin() + static_cast<long>(bj));
        }
        std::sort(ex.begin(), ex.end());
        return ex;
    }

    std::size_t max_elementary_divisor() const {
        auto ex = smith_exponents();
        return ex.empty() ? 0 : ex.back();
    }

    /// {S in C[[b]]^p : Q S = 0 mod b^m}, computed by lifting one b-order at
    /// a time. Always full rank (it contains b^m times the ambient module).
    static Lattice congruence_kernel(const SMat& Q, std::size_t m) {
        if (Q.order() < m)
            throw InsufficientPrecision("congruence kernel needs the matrix mod b^m", Q.order(), m);
        std::size_t p = Q.cols();
        std::size_t ord = Q.order();
        Lattice K = standard(p, ord + m);
        for (std::size_t t = 0; t < m; ++t) {
            SMat B = K.basis_smat();
            SMat QB = Q * B;
            QMat C = QB.coeff(t);
            auto null_basis = C.nullspace();
            std::vector<SVec> gens;
            for (const auto& nv : null_basis) {
                SVec g(p, Series(B.order()));
                for (std::size_t i = 0; i < p; ++i) g[i] = Series::constant(nv[i], B.order());
                gens.push_back(B.apply(g));
            }
            for (std::size_t j = 0; j < p; ++j) {
                SVec g(p, Series(B.order()));
                g[j] = Series::monomial(G(1), 1, B.order());
                gens.push_back(B.apply(g));
            }
            K = from_generators(p, std::move(gens), 0);
        }
        return K;
    }

private:
    Lattice() : rank_(0), order_(0), shift_(0) {}

    static Series refit(const Series& e, std::size_t n) {
        Series r(n);
        std::size_t top = std::min(n, e.known_order());
        for (std::size_t t = 0; t < top; ++t) r.set(t, e[t]);
        return r;
    }

    void echelonize(std::vector<SVec> gens) {
        for (const auto& g : gens)
            if (g.size() != rank_) throw ShapeMismatch("lattice generator: length mismatch");
        std::size_t n0 = SIZE_MAX;
        for (const auto& g : gens)
            for (const auto& e : g) n0 = std::min(n0, e.known_order());
        if (gens.empty() || n0 == SIZE_MAX)
            throw RankDeficient("lattice needs generators of full rank");
        if (n0 == 0)
            throw InsufficientPrecision("lattice needs at least one known order", 0, 1);
        // generators truncated at n0 span the lattice plus b^{n0}.ambient;
        // that augmented span is polynomial, so compute it exactly at a
        // working order large enough to absorb every division by b: each
        // column is reduced against at most 2.rank pivots of depth < n0
        std::size_t w = 2 * (rank_ + 1) * n0 + 4;
        std::vector<SVec> work;
        work.reserve(gens.size() + rank_);
        for (const auto& g : gens) {
            SVec v(rank_);
            for (std::size_t i = 0; i < rank_; ++i) v[i] = refit(g[i], w);
            work.push_back(std::move(v));
        }
        for (std::size_t i = 0; i < rank_; ++i) {
            SVec v(rank_, Series(w));
            v[i] = Series::monomial(G(1), n0, w);
            work.push_back(std::move(v));
        }
        cols_.assign(rank_, SVec());
        diag_.assign(rank_, 0);
        std::vector<bool> used(work.size(), false);
        for (std::size_t row = 0; row < rank_; ++row) {
            std::size_t best = SIZE_MAX, bestval = SIZE_MAX;
            for (std::size_t j = 0; j < work.size(); ++j) {
                if (used[j]) continue;
                auto v = work[j][row].valuation();
                if (v && *v < bestval) bestval = *v, best = j;
            }
            if (best == SIZE_MAX)
                throw RankDeficient("lattice generators are rank deficient at working precision");
            used[best] = true;
            Series unit_inv = work[best][row].div_bpow(bestval).inverse();
            SVec piv(rank_);
            for (std::size_t i = 0; i < rank_; ++i) piv[i] = work[best][i] * unit_inv;
            piv[row] = Series::monomial(G(1), bestval, piv[row].known_order());
            for (std::size_t j = 0; j < work.size(); ++j) {
                if (used[j] || work[j][row].is_zero()) continue;
                Series q = work[j][row].div_bpow(bestval);
                for (std::size_t i = 0; i < rank_; ++i)
                    work[j][i] = (i == row) ? Series(std::min(work[j][i].known_order(),
                                                              q.known_order()))
                                            : work[j][i] - q * piv[i];
            }
            diag_[row] = bestval;
            cols_[row] = std::move(piv);
        }
        // reduce below-pivot entries: entry (i, j) with i > j taken mod b^{d_i}
        for (std::size_t j = 0; j < rank_; ++j)
            for (std::size_t i = j + 1; i < rank_; ++i) {
                const Series& e = cols_[j][i];
                std::size_t d = diag_[i];
                if (e.known_order() <= d) continue;
                bool high = false;
                for (std::size_t t = d; t < e.known_order(); ++t)
                    if (!e[t].is_zero()) {
                        high = true;
                        break;
                    }
                if (!high) continue;
                Series q(e.known_order() - d);
                for (std::size_t t = d; t < e.known_order(); ++t) q.set(t - d, e[t]);
                for (std::size_t r = 0; r < rank_; ++r)
                    cols_[j][r] = cols_[j][r] - q * cols_[i][r];
            }
        // a pivot as deep as b^{n0} came from the ambient augmentation, so
        // the generators alone are not of full rank at this precision
        for (std::size_t d : diag_)
            if (d >= n0)
                throw RankDeficient("lattice generators are rank deficient at working precision");
        // truncation soundness: entries below b^K are meaningless for
        // membership questions, so refuse lattices without a 2K+2 margin
        std::size_t K = max_elementary_divisor();
        std::size_t need = 2 * K + 2;
        if (n0 < need)
            throw InsufficientPrecision("lattice not determined at working precision", n0, need);
        // the canonical entries are polynomials of degree below n0: certify
        // them back at the precision the generators carried
        for (auto& c : cols_)
            for (auto& e : c) {
                if (e.known_order() < n0)
                    throw InsufficientPrecision("echelon margin exhausted", e.known_order(), n0);
                e = refit(e, n0);
            }
        order_ = n0;
    }

    std::size_t rank_;
    std::size_t order_;
    long shift_;
    std::vector<SVec> cols_;          // cols_[j][i]: column j, row i
    std::vector<std::size_t> diag_;   // d_j with pivot b^{d_j} at row j
};

} // namespace abmod
