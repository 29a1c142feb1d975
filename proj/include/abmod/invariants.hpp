#pragma once

/// Invariants of regular modules: the saturation E^sharp by b^{-1}a, the
/// order of regularity, the index delta, the biggest simple pole submodule
/// E^b, per-class widths and the alpha invariant.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "abmod/lattice.hpp"
#include "abmod/module.hpp"

namespace abmod {

struct Saturation {
    Lattice lattice;    // Phi = E^sharp, a lattice in E[b^{-1}] containing E
    AbModule module;    // presentation on the canonical basis of Phi
    std::size_t steps;  // smallest k with Phi_{k+1} = Phi_k
};

struct SimplePolePart {
    Lattice lattice;    // E^b inside E
    AbModule module;
};

struct ClassWidth {
    G lambda_min;           // smallest exponent of the class, read off E^b
    G lambda_max;           // largest exponent of the class, read off E^sharp
    long width_class = 0;   // lambda_max - lambda_min, may be negative
};

struct WidthReport {
    std::vector<ClassWidth> classes;
    long width = 0;         // max of width_class over the classes
};

namespace detail {

inline void require_invariant_precision(const AbModule& e) {
    std::size_t need = 2 * e.rank() + 2;
    if (e.order() < need)
        throw InsufficientPrecision("invariants need known order >= 2*rank + 2",
                                    e.order(), need);
}

inline SVec svec_bpow(const SVec& v, std::size_t k) {
    SVec r = v;
    for (auto& s : r) s = s.mul_bpow(static_cast<long>(k));
    return r;
}

inline SVec unit_vector(std::size_t p, std::size_t i, std::size_t order) {
    SVec v(p, Series(order));
    v[i] = Series::constant(G(1), order);
    return v;
}

} // namespace detail

/// Saturation by b^{-1}a inside E[b^{-1}]: the chain Phi_0 = E,
/// Phi_{k+1} = Phi_k + b^{-1}a.Phi_k stabilizes within rank - 1 steps
/// exactly when E is regular. With Phi_k = b^{-s} H, the next term is
/// spanned at shift s+1 by the columns b.c and a.c of H, because
/// a b^{-s} = b^{-s}(a - s.b) and the s.b.c correction stays in the span.
inline Saturation saturate(const AbModule& e) {
    detail::require_invariant_precision(e);
    std::size_t p = e.rank();
    Lattice phi = Lattice::standard(p, e.order());
    for (std::size_t k = 0; k < p; ++k) {
        Lattice n = phi.normalized();
        std::vector<SVec> gens;
        for (const SVec& c : n.columns()) {
            gens.push_back(e.apply_a(c));
            gens.push_back(detail::svec_bpow(c, 1));
        }
        Lattice next = Lattice::from_generators(p, std::move(gens), n.shift() + 1);
        if (next == phi) {
            AbModule sharp = e.on_lattice_basis(n);
            if (!e.label().empty()) sharp = sharp.with_label(e.label() + "^sharp");
            return Saturation{std::move(n), std::move(sharp), k};
        }
        phi = std::move(next);
    }
    throw NotRegular("saturation chain did not stabilize within rank steps");
}

/// Order of regularity: smallest k with a^{k+1}.E inside
/// Psi_k = sum_{j=0}^k a^j.b^{k-j+1}.E. Testing the basis vectors
/// a^{k+1}.e_i suffices since commuting scalars past a^{k+1} only
/// produces terms already absorbed by Psi_k. Psi is kept at shift 0:
/// it is a sublattice of b.E, and Psi_k = b^{k+1}.E + A(Psi_{k-1})
/// where A(L) is spanned by a.c and b^2.c over the columns of L.
inline std::size_t regularity_order(const AbModule& e) {
    detail::require_invariant_precision(e);
    std::size_t p = e.rank();
    std::size_t ord = e.order();
    std::vector<SVec> apow(p);
    for (std::size_t i = 0; i < p; ++i)
        apow[i] = e.apply_a(detail::unit_vector(p, i, ord));
    std::vector<SVec> g0;
    for (std::size_t i = 0; i < p; ++i)
        g0.push_back(detail::svec_bpow(detail::unit_vector(p, i, ord), 1));
    Lattice psi = Lattice::from_generators(p, std::move(g0), 0);
    for (std::size_t k = 0; k < p; ++k) {
        bool inside = true;
        for (std::size_t i = 0; i < p && inside; ++i)
            inside = psi.contains(apow[i]);
        if (inside) return k;
        if (k + 1 == p) break;
        std::vector<SVec> gens;
        for (std::size_t i = 0; i < p; ++i)
            gens.push_back(detail::svec_bpow(detail::unit_vector(p, i, ord), k + 2));
        for (const SVec& c : psi.columns()) {
            gens.push_back(e.apply_a(c));
            gens.push_back(detail::svec_bpow(c, 2));
        }
        psi = Lattice::from_generators(p, std::move(gens), 0);
        for (std::size_t i = 0; i < p; ++i) apow[i] = e.apply_a(apow[i]);
    }
    throw NotRegular("regularity inclusion fails through k = rank - 1");
}

/// Smallest m with E^sharp inside b^{-m}.E, read off the saturation.
inline std::size_t index_delta(const AbModule& e) {
    Saturation s = saturate(e);
    long m = s.lattice.min_shift_into_ambient();
    return m <= 0 ? 0 : static_cast<std::size_t>(m);
}

namespace detail {

/// Basis of the column span, as columns of the result.
inline QMat column_basis(const QMat& m) {
    QMat t = m.transpose();
    auto piv = t.rref();
    QMat r(m.rows(), piv.size());
    for (std::size_t k = 0; k < piv.size(); ++k)
        for (std::size_t h = 0; h < m.rows(); ++h) r(h, k) = t(k, h);
    return r;
}

/// Stacked coordinates of b^t.c mod b^n over the columns c of a shift-0
/// lattice; coordinate u*p + h stands for b^u.e_h.
inline QMat lattice_image_mod(const Lattice& l, std::size_t n) {
    std::size_t p = l.rank();
    QMat v(n * p, n * l.columns().size());
    std::size_t col = 0;
    for (const SVec& c : l.columns())
        for (std::size_t t = 0; t < n; ++t, ++col)
            for (std::size_t h = 0; h < p; ++h)
                for (std::size_t u = t; u < n; ++u)
                    v(u * p + h, col) = c[h][u - t];
    return v;
}

/// Matrices of a and b acting on E/b^n.E; coordinate u*p + h stands for
/// b^u.e_h.
inline std::pair<QMat, QMat> quotient_action(const AbModule& e, std::size_t n) {
    std::size_t p = e.rank();
    std::size_t dim = n * p;
    if (e.order() < n)
        throw InsufficientPrecision("quotient window exceeds known order", e.order(), n);
    QMat amat(dim, dim), bmat(dim, dim);
    for (std::size_t j = 0; j < p; ++j) {
        SVec aej = e.apply_a(unit_vector(p, j, e.order()));
        for (std::size_t t = 0; t < n; ++t) {
            std::size_t col = t * p + j;
            // a(b^t e_j) = b^t a(e_j) + t b^{t+1} e_j
            for (std::size_t h = 0; h < p; ++h)
                for (std::size_t u = 0; t + u < n; ++u)
                    amat((t + u) * p + h, col) += aej[h][u];
            if (t + 1 < n) {
                amat((t + 1) * p + j, col) += G(static_cast<long>(t));
                bmat((t + 1) * p + j, col) = G(1);
            }
        }
    }
    return {std::move(amat), std::move(bmat)};
}

/// Greatest subspace W of E/b^n.E with a.W inside b.W, compared against
/// the image of the candidate lattice. Finite determination makes the
/// fixed point equal to the image of E^b once n >= delta + 1.
inline void cross_check_simple_pole(const AbModule& e, const Lattice& eb, std::size_t n) {
    std::size_t p = e.rank();
    std::size_t dim = n * p;
    std::size_t have = std::min(e.order(), eb.order());
    if (have < n)
        throw InsufficientPrecision("fixed point window exceeds known order", have, n);
    auto [amat, bmat] = quotient_action(e, n);
    QMat w = QMat::identity(dim);
    while (w.cols() > 0) {
        std::size_t d = w.cols();
        QMat aw = amat * w, bw = bmat * w;
        QMat c(dim, 2 * d);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                c(i, j) = aw(i, j);
                c(i, d + j) = bw(i, j);
            }
        auto ker = c.nullspace();
        QMat x(d, ker.size());
        for (std::size_t k = 0; k < ker.size(); ++k)
            for (std::size_t i = 0; i < d; ++i) x(i, k) = ker[k][i];
        QMat nw = column_basis(w * x);
        if (nw.cols() == d) break;
        w = std::move(nw);
    }
    Lattice nb = eb.normalized();
    if (nb.shift() != 0)
        throw CrossCheckFailed("simple pole candidate escapes the module");
    QMat img = column_basis(lattice_image_mod(nb, n));
    if (img.cols() != w.cols())
        throw CrossCheckFailed("simple pole routes disagree");
    QMat both(dim, img.cols() + w.cols());
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < img.cols(); ++j) both(i, j) = img(i, j);
        for (std::size_t j = 0; j < w.cols(); ++j) both(i, img.cols() + j) = w(i, j);
    }
    if (both.rank() != w.cols())
        throw CrossCheckFailed("simple pole routes disagree");
}

} // namespace detail

/// Biggest simple pole submodule, through duality: (E^b)^* = (E^*)^sharp,
/// so with P the basis matrix of (E^*)^sharp at shift delta,
/// E^b = { S : P(-b)^t . S = 0 mod b^delta }. Cross-checked against the
/// greatest fixed point of W -> {x in W : a.x in b.W} in E/b^{delta+1}.E.
inline SimplePolePart biggest_simple_pole(const AbModule& e) {
    detail::require_invariant_precision(e);
    std::size_t p = e.rank();
    Saturation ds = saturate(e.dual());
    long delta = ds.lattice.min_shift_into_ambient();
    Lattice eb = Lattice::standard(p, e.order());
    if (delta > 0) {
        SMat q = ds.lattice.basis_smat().substitute_neg_b().transpose();
        eb = Lattice::congruence_kernel(q, static_cast<std::size_t>(delta));
    }
    detail::cross_check_simple_pole(e, eb, static_cast<std::size_t>(std::max(delta, 0L)) + 1);
    AbModule mod = e.on_lattice_basis(eb);
    if (!mod.is_simple_pole())
        throw CrossCheckFailed("biggest simple pole presentation keeps a higher pole");
    if (!e.label().empty()) mod = mod.with_label(e.label() + "^b");
    return SimplePolePart{std::move(eb), std::move(mod)};
}

/// Per integer-class widths: the class minimum is read off spectrum(E^b),
/// the class maximum off spectrum(E^sharp). Classes are sorted by their
/// minimum; the two spectra must populate the same classes.
inline WidthReport widths(const AbModule& e) {
    Saturation sat = saturate(e);
    SimplePolePart bp = biggest_simple_pole(e);
    std::vector<ClassWidth> classes;
    for (const auto& [v, mult] : bp.module.spectrum()) {
        bool placed = false;
        for (auto& cw : classes) {
            if (!same_integer_class(cw.lambda_min, v)) continue;
            placed = true;
            auto d = integer_difference(v, cw.lambda_min);
            if (sgn(*d) < 0) cw.lambda_min = v;
            break;
        }
        if (!placed) classes.push_back(ClassWidth{v, v, 0});
    }
    std::vector<bool> has_max(classes.size(), false);
    for (const auto& [v, mult] : sat.module.spectrum()) {
        bool placed = false;
        for (std::size_t i = 0; i < classes.size(); ++i) {
            if (!same_integer_class(classes[i].lambda_min, v)) continue;
            placed = true;
            if (!has_max[i]) {
                classes[i].lambda_max = v;
                has_max[i] = true;
            } else if (sgn(*integer_difference(v, classes[i].lambda_max)) > 0) {
                classes[i].lambda_max = v;
            }
            break;
        }
        if (!placed)
            throw CrossCheckFailed("integer classes of E^b and E^sharp differ");
    }
    for (bool h : has_max)
        if (!h) throw CrossCheckFailed("integer classes of E^b and E^sharp differ");
    WidthReport rep;
    bool first = true;
    for (auto& cw : classes) {
        cw.width_class = integer_difference(cw.lambda_max, cw.lambda_min)->get_si();
        if (first || cw.width_class > rep.width) rep.width = cw.width_class;
        first = false;
    }
    std::sort(classes.begin(), classes.end(),
              [](const ClassWidth& x, const ClassWidth& y) {
                  return lex_less(x.lambda_min, y.lambda_min);
              });
    rep.classes = std::move(classes);
    return rep;
}

/// alpha(E): trace of b^{-1}a on E^sharp/b.E^sharp plus dim E^sharp/E.
/// Equals the sum of the Jordan-Holder exponents.
inline G alpha_invariant(const AbModule& e) {
    Saturation sat = saturate(e);
    G tr = sat.module.matrix().coeff(1).trace();
    std::size_t extra = sat.lattice.quotient_dim(
        Lattice::standard(e.rank(), sat.lattice.order()));
    return tr + G(static_cast<long>(extra));
}

} // namespace abmod
