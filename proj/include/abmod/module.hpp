#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lattice.hpp"
#include "roots.hpp"
#include "series_matrix.hpp"

namespace abmod {

/// Module over C[[b]] with a C-linear action of a satisfying ab - ba = b^2,
/// presented on a free basis e_1..e_p by a matrix M with the row convention
///
///     a . e_j = sum_h M(j,h) . e_h.
///
/// On coordinate columns S (x = sum S_j e_j) the action reads
/// a.x = M^T S + b^2 S', since [a, S(b)] = b^2 S'(b).
class AbModule {
public:
    AbModule(SMat m, std::string label = {}) : m_(std::move(m)), label_(std::move(label)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw ShapeMismatch("module presentation must be square of rank >= 1");
        if (m_.order() < 1)
            throw InsufficientPrecision("module presentation needs at least one b-order", 0, 1);
    }

    std::size_t rank() const { return m_.rows(); }
    std::size_t order() const { return m_.order(); }
    const SMat& matrix() const { return m_; }
    const std::string& label() const { return label_; }
    AbModule with_label(std::string l) const { return AbModule(m_, std::move(l)); }

    AbModule truncated(std::size_t order) const { return AbModule(m_.truncated(order), label_); }

    /// a applied to the coordinate vector of an element.
    SVec apply_a(const SVec& x) const {
        if (x.size() != rank()) throw ShapeMismatch("apply_a: coordinate length mismatch");
        std::size_t ord = m_.order();
        for (const auto& s : x) ord = std::min(ord, s.known_order());
        SVec r(rank(), Series(ord));
        for (std::size_t h = 0; h < rank(); ++h) {
            Series acc(ord);
            for (std::size_t j = 0; j < rank(); ++j) {
                if (m_(j, h).is_zero() || x[j].is_zero()) continue;
                acc += (m_(j, h) * x[j]).truncated(ord);
            }
            acc += x[h].derivative().mul_bpow(2).truncated(ord);
            r[h] = acc;
        }
        return r;
    }

    /// New presentation on the basis f = Q.e (rows of Q are the new basis
    /// vectors): M_f = (Q M + b^2 Q') Q^{-1}. Costs one b-order.
    AbModule change_basis(const SMat& q) const {
        if (q.rows() != rank() || q.cols() != rank())
            throw ShapeMismatch("change_basis: shape mismatch");
        SMat qi = q.inverse(); // throws NotInvertible
        SMat mf = (q * m_ + q.derivative().mul_bpow(2)) * qi;
        return AbModule(mf, label_);
    }

    /// Dual module: presentation tM(-b). An exact involution.
    AbModule dual() const {
        return AbModule(m_.transpose().substitute_neg_b(),
                        label_.empty() ? std::string() : "dual(" + label_ + ")");
    }

    /// Tensor by the rank 1 module of exponent m: a becomes a + m.b.
    AbModule twist(const G& m) const {
        SMat t = m_;
        for (std::size_t j = 0; j < rank(); ++j)
            t.set(j, j, t(j, j) + Series::monomial(m, 1, t.order()));
        return AbModule(t, label_);
    }

    friend AbModule direct_sum(const AbModule& x, const AbModule& y) {
        std::string l;
        if (!x.label_.empty() && !y.label_.empty()) l = x.label_ + "+" + y.label_;
        return AbModule(SMat::direct_sum(x.m_, y.m_), std::move(l));
    }

    /// a.E inside b.E, i.e. the constant term of M vanishes.
    bool is_simple_pole() const { return m_.eval0().is_zero(); }

    /// Eigenvalues of b^{-1}a acting on E/bE, with multiplicities, sorted.
    std::vector<std::pair<G, std::size_t>> spectrum() const {
        if (!is_simple_pole()) throw NotSimplePole("spectrum needs a simple pole module");
        QMat c = m_.coeff(1);
        return qi_roots(c.charpoly());
    }

    std::vector<G> spectrum_list() const {
        std::vector<G> out;
        for (const auto& [v, mult] : spectrum())
            for (std::size_t i = 0; i < mult; ++i) out.push_back(v);
        return out;
    }

    /// Quotient by the normal line spanned by a primitive eigenvector x with
    /// a.x = lambda.b.x. The vector is completed to a basis by replacing the
    /// lowest coordinate carrying a unit entry.
    AbModule quotient_by_line(const SVec& x, const G& lambda) const {
        if (x.size() != rank()) throw ShapeMismatch("quotient_by_line: length mismatch");
        if (rank() == 1) throw BadParameter("quotient_by_line: rank must exceed 1");
        std::size_t pivot = SIZE_MAX;
        for (std::size_t i = 0; i < rank() && pivot == SIZE_MAX; ++i) {
            auto v = x[i].valuation();
            if (v && *v == 0) pivot = i;
        }
        if (pivot == SIZE_MAX) throw NotPrimitive("quotient_by_line: vector lies in b.E");
        std::size_t ord = m_.order();
        for (const auto& s : x) ord = std::min(ord, s.known_order());
        SMat q(rank(), rank(), ord);
        for (std::size_t j = 0; j < rank(); ++j) q.set(0, j, x[j]);
        std::size_t row = 1;
        for (std::size_t i = 0; i < rank(); ++i) {
            if (i == pivot) continue;
            q.set(row, i, Series::constant(G(1), ord));
            ++row;
        }
        AbModule f = change_basis(q);
        const SMat& mf = f.matrix();
        Series want = Series::monomial(lambda, 1, mf.order());
        if (!(mf(0, 0) == want)) throw NotEigen("quotient_by_line: not an eigenvector");
        for (std::size_t h = 1; h < rank(); ++h)
            if (!mf(0, h).is_zero()) throw NotEigen("quotient_by_line: not an eigenvector");
        SMat sub(rank() - 1, rank() - 1, mf.order());
        for (std::size_t j = 1; j < rank(); ++j)
            for (std::size_t h = 1; h < rank(); ++h) sub.set(j - 1, h - 1, mf(j, h));
        return AbModule(sub);
    }

    /// Presentation of an a-stable lattice L = b^{-s} H C[[b]]^p as a module
    /// on the canonical basis of L. Checks stability.
    AbModule on_lattice_basis(const Lattice& latt) const {
        if (latt.rank() != rank()) throw ShapeMismatch("lattice rank mismatch");
        Lattice L = latt.normalized();
        std::size_t p = rank();
        std::size_t ord = std::min(m_.order(), L.order());
        std::vector<SVec> rows(p);
        for (std::size_t j = 0; j < p; ++j) {
            SVec col = L.columns()[j];
            for (auto& e : col) e = e.truncated(ord);
            SVec w = apply_a(col);
            auto xcoords = L.solve_in_basis(w);
            if (!xcoords) throw NotStable("lattice is not stable under a");
            rows[j] = std::move(*xcoords);
        }
        std::size_t mord = SIZE_MAX;
        for (const auto& r : rows)
            for (const auto& e : r) mord = std::min(mord, e.known_order());
        SMat mm(p, p, mord);
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t h = 0; h < p; ++h) mm.set(j, h, rows[j][h]);
        AbModule on_h(mm);
        // basis vectors carry b^{-shift}: a twists by -shift there
        return on_h.twist(G(-L.shift()));
    }

private:
    SMat m_;
    std::string label_;
};

/// E_lambda: a.e = lambda.b.e.
inline AbModule make_rank1(const G& lambda, std::size_t order) {
    SMat m(1, 1, order);
    m.set(0, 0, Series::monomial(lambda, 1, order));
    return AbModule(m, "E(" + to_string(lambda) + ")");
}

/// E_lambda(n), simple pole, basis (x, y):
/// a.x = (lambda+n).b.x + b^{n+1}.y and a.y = lambda.b.y.
inline AbModule make_log(const G& lambda, std::size_t n, std::size_t order) {
    SMat m(2, 2, order);
    m.set(0, 0, Series::monomial(lambda + G(static_cast<long>(n)), 1, order));
    m.set(0, 1, Series::monomial(G(1), n + 1, order));
    m.set(1, 1, Series::monomial(lambda, 1, order));
    return AbModule(m, "Elog(" + to_string(lambda) + "," + std::to_string(n) + ")");
}

/// E_{lambda,mu}, basis (y, t): a.y = mu.b.y and a.t = y + (lambda-1).b.t.
inline AbModule make_pair(const G& lambda, const G& mu, std::size_t order) {
    SMat m(2, 2, order);
    m.set(0, 0, Series::monomial(mu, 1, order));
    m.set(1, 0, Series::constant(G(1), order));
    m.set(1, 1, Series::monomial(lambda - G(1), 1, order));
    return AbModule(m, "Epair(" + to_string(lambda) + "," + to_string(mu) + ")");
}

/// E_{lambda,lambda-n}(alpha), n >= 1, alpha != 0, basis (y, t):
/// a.y = (lambda-n).b.y and a.t = y + (lambda-1).b.t + alpha.b^n.y.
inline AbModule make_alpha(const G& lambda, std::size_t n, const G& alpha, std::size_t order) {
    if (n < 1) throw BadParameter("Ealpha needs n >= 1");
    if (alpha.is_zero()) throw BadParameter("Ealpha needs alpha != 0");
    SMat m(2, 2, order);
    m.set(0, 0, Series::monomial(lambda - G(static_cast<long>(n)), 1, order));
    Series c = Series::constant(G(1), order) + Series::monomial(alpha, n, order);
    m.set(1, 0, c);
    m.set(1, 1, Series::monomial(lambda - G(1), 1, order));
    return AbModule(m, "Ealpha(" + to_string(lambda) + "," + std::to_string(n) + "," +
                           to_string(alpha) + ")");
}

/// J_k(lambda), rank k: a.e_j = (lambda+j-1).b.e_j + e_{j+1}, e_{k+1} = 0.
inline AbModule make_jordan(std::size_t k, const G& lambda, std::size_t order) {
    if (k < 1) throw BadParameter("J needs k >= 1");
    SMat m(k, k, order);
    for (std::size_t j = 0; j < k; ++j) {
        m.set(j, j, Series::monomial(lambda + G(static_cast<long>(j)), 1, order));
        if (j + 1 < k) m.set(j, j + 1, Series::constant(G(1), order));
    }
    return AbModule(m, "J(" + std::to_string(k) + "," + to_string(lambda) + ")");
}

/// F_rho deformation of J_k(lambda): same relations except
/// a.e_k = (lambda+k-1).b.e_k + rho^k.b^k.e_1.
inline AbModule make_final(std::size_t k, const G& lambda, const G& rho, std::size_t order) {
    if (k < 1) throw BadParameter("F needs k >= 1");
    if (rho.is_zero()) throw BadParameter("F needs rho != 0");
    AbModule j = make_jordan(k, lambda, order);
    SMat m = j.matrix();
    G a1(1);
    for (std::size_t t = 0; t < k; ++t) a1 = a1 * rho;
    if (k >= 2) m.set(k - 1, 0, Series::monomial(a1, k, order));
    return AbModule(m, "F(" + std::to_string(k) + "," + to_string(lambda) + "," + to_string(rho) +
                           ")");
}

/// Rank 3 module with a.e_1 = e_2, a.e_2 = b.e_3, a.e_3 = 0.
inline AbModule make_rank3_example(std::size_t order) {
    SMat m(3, 3, order);
    m.set(0, 1, Series::constant(G(1), order));
    m.set(1, 2, Series::monomial(G(1), 1, order));
    return AbModule(m, "Rank3Example");
}

} // namespace abmod
