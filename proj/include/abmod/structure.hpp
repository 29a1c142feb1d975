#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "invariants.hpp"

namespace abmod {

/// Composition series data: exponents of the successive rank 1 quotients
/// and the primitive eigenvector found at each step, in coordinates of the
/// successive quotient modules.
struct JHSequence {
    std::vector<G> exponents;
    std::vector<SVec> witnesses;
};

struct ExtDims {
    std::size_t ext0 = 0;
    std::size_t ext1 = 0;
};

enum class Rank2Variant { Sum, Log, Pair, Alpha };

/// Outcome of the rank 2 classifier. Which fields are meaningful depends
/// on the variant: Sum and Pair use (lambda, mu), Log uses (lambda, n),
/// Alpha uses (lambda, n, alpha) and stores mu = lambda - n for reference.
/// Two classifications describe the same module exactly when the rebuilt
/// standard models are jet-isomorphic; alpha in particular is a witness,
/// not a canonical form.
struct ClassificationRank2 {
    Rank2Variant variant = Rank2Variant::Sum;
    G lambda;
    G mu;
    std::size_t n = 0;
    G alpha;
};

namespace detail {

/// Matrix of x -> (a - nu.b).x on coefficient stacks mod b^K, with the
/// same flat coordinate u*p + h for the grade u part of coordinate h as
/// quotient_action. No minimality assumption: resonant grades simply
/// enlarge the nullspace.
inline QMat graded_eigen_matrix(const AbModule& e, const G& nu, std::size_t K) {
    std::size_t p = e.rank();
    if (e.order() < K)
        throw InsufficientPrecision("graded window exceeds known order", e.order(), K);
    QMat m(K * p, K * p);
    for (std::size_t t = 0; t < K; ++t) {
        QMat mt = e.matrix().coeff(t);
        for (std::size_t v = 0; t + v < K; ++v) {
            std::size_t u = t + v;
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j) m(u * p + i, v * p + j) += mt(j, i);
        }
    }
    for (std::size_t u = 1; u < K; ++u)
        for (std::size_t i = 0; i < p; ++i)
            m(u * p + i, (u - 1) * p + i) += G(static_cast<long>(u - 1)) - nu;
    return m;
}

}  // namespace detail

/// Basis of the solution space of (a - lambda.b).x = 0, for a simple pole
/// module with lambda not exceeding any smaller spectral exponent of its
/// integer class. Writing M = b.C + O(b^2), the grade k part of the
/// equation is (C^T + (k - lambda)).x_k = -(contributions of M_t, t >= 2,
/// from lower grades); minimality makes every step k >= 1 invertible, so
/// each solution is determined by its grade 0 part in ker(C^T - lambda).
/// Solutions are exact mod b^{N-1} when the module is known mod b^N.
inline std::vector<SVec> solve_eigenvector(const AbModule& e, const G& lambda) {
    if (!e.is_simple_pole())
        throw NotSimplePole("eigenvector solving needs a simple pole module");
    if (e.order() < 2)
        throw InsufficientPrecision("eigenvector solving needs two orders", e.order(), 2);
    for (const auto& [mu, mult] : e.spectrum()) {
        auto d = integer_difference(lambda, mu);
        if (d && sgn(*d) > 0)
            throw NotMinimalExponent("a smaller spectral exponent shares the class of " +
                                     to_string(lambda));
    }
    std::size_t p = e.rank();
    std::size_t top = e.order() - 1;
    QMat ct = e.matrix().coeff(1).transpose();
    std::vector<QMat> tails;
    for (std::size_t t = 2; t <= top; ++t) tails.push_back(e.matrix().coeff(t).transpose());
    QMat k0 = ct;
    for (std::size_t i = 0; i < p; ++i) k0(i, i) -= lambda;
    std::vector<SVec> out;
    for (const QVec& seed : k0.nullspace()) {
        std::vector<QVec> x;
        x.push_back(seed);
        for (std::size_t k = 1; k < top; ++k) {
            QVec rhs(p, G(0));
            for (std::size_t t = 2; t <= k + 1; ++t) {
                QVec mv = tails[t - 2].apply(x[k + 1 - t]);
                for (std::size_t i = 0; i < p; ++i) rhs[i] -= mv[i];
            }
            QMat step = ct;
            for (std::size_t i = 0; i < p; ++i)
                step(i, i) += G(static_cast<long>(k)) - lambda;
            auto sol = step.solve(rhs);
            if (!sol)
                throw CrossCheckFailed("eigenvector step not invertible despite minimality");
            x.push_back(std::move(*sol));
        }
        SVec vec(p, Series(top));
        for (std::size_t i = 0; i < p; ++i) {
            Series s(top);
            for (std::size_t k = 0; k < top; ++k) s.set(k, x[k][i]);
            vec[i] = s;
        }
        out.push_back(std::move(vec));
    }
    return out;
}

/// A normal rank 1 submodule: exponent lambda and a primitive x in E with
/// a.x = lambda.b.x. Solves inside E^b at the lexicographically smallest
/// class-minimal exponent of S(E^b), where an eigenvector always exists,
/// then maps back to E and strips b-content.
inline std::pair<G, SVec> find_normal_line(const AbModule& e) {
    SimplePolePart bp = biggest_simple_pole(e);
    std::vector<G> minima;
    for (const auto& [v, mult] : bp.module.spectrum()) {
        bool minimal = true;
        for (const auto& [w, wm] : bp.module.spectrum()) {
            auto d = integer_difference(v, w);
            if (d && sgn(*d) > 0) minimal = false;
        }
        if (minimal) minima.push_back(v);
    }
    if (minima.empty()) throw CrossCheckFailed("spectrum of E^b has no class-minimal exponent");
    G mu = minima.front();
    for (const G& c : minima)
        if (lex_less(c, mu)) mu = c;
    auto sols = solve_eigenvector(bp.module, mu);
    if (sols.empty())
        throw CrossCheckFailed("no eigenvector at a class-minimal exponent of E^b");
    SVec coords = bp.lattice.basis_smat().apply(sols.front());
    std::optional<std::size_t> content;
    for (const Series& s : coords) {
        auto val = s.valuation();
        if (val) content = content ? std::min(*content, *val) : *val;
    }
    if (!content) throw CrossCheckFailed("eigenvector vanished at working precision");
    SVec prim(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) prim[i] = coords[i].div_bpow(*content);
    // honest vector is b^{-shift} times the column combination
    long s = static_cast<long>(*content) - bp.lattice.shift();
    return {mu - G(s), std::move(prim)};
}

/// Composition series by repeated normal lines: each step records the
/// exponent and witness, then divides by the line. Quotients of regular
/// modules stay regular and rank 1 steps need no further division.
inline JHSequence jordan_holder(const AbModule& e) {
    JHSequence jh;
    AbModule cur = e;
    for (std::size_t r = e.rank(); r >= 1; --r) {
        auto [lambda, x] = find_normal_line(cur);
        jh.exponents.push_back(lambda);
        jh.witnesses.push_back(x);
        if (r == 1) break;
        cur = cur.quotient_by_line(x, lambda);
    }
    return jh;
}

namespace detail {

/// Matrix of Lambda(P) = M_E.P - P.M_F - b^2.P' on p_E x p_F coefficient
/// stacks mod b^T; kernel elements are the b-linear maps phi(e_j) =
/// sum_h P(j,h).f_h commuting with a to that order. Flat coordinate of
/// the grade v entry (j,h) is (v*p_E + j)*p_F + h.
inline QMat hom_intertwiner(const AbModule& e, const AbModule& f, std::size_t T) {
    std::size_t pe = e.rank(), pf = f.rank();
    std::size_t have = std::min(e.order(), f.order());
    if (have < T)
        throw InsufficientPrecision("intertwiner window exceeds known order", have, T);
    auto idx = [pe, pf](std::size_t v, std::size_t j, std::size_t h) {
        return (v * pe + j) * pf + h;
    };
    QMat m(T * pe * pf, T * pe * pf);
    for (std::size_t t = 0; t < T; ++t) {
        QMat at = e.matrix().coeff(t);
        QMat bt = f.matrix().coeff(t);
        for (std::size_t v = 0; t + v < T; ++v) {
            std::size_t u = t + v;
            for (std::size_t j = 0; j < pe; ++j)
                for (std::size_t h = 0; h < pf; ++h) {
                    for (std::size_t i = 0; i < pe; ++i)
                        m(idx(u, j, h), idx(v, i, h)) += at(j, i);
                    for (std::size_t g = 0; g < pf; ++g)
                        m(idx(u, j, h), idx(v, j, g)) -= bt(g, h);
                }
        }
    }
    for (std::size_t u = 2; u < T; ++u)
        for (std::size_t j = 0; j < pe; ++j)
            for (std::size_t h = 0; h < pf; ++h)
                m(idx(u, j, h), idx(u - 1, j, h)) -= G(static_cast<long>(u - 1));
    return m;
}

/// dim of the image of ker Lambda_{T+1} -> ker Lambda_T under truncation.
/// The raw truncated kernel carries top-grade solutions that do not extend
/// one more order; restricting from one level up removes them.
inline std::size_t restricted_kernel_dim(const AbModule& e, const AbModule& f, std::size_t T) {
    auto ker = hom_intertwiner(e, f, T + 1).nullspace();
    std::size_t cut = T * e.rank() * f.rank();
    QMat proj(ker.size(), cut);
    for (std::size_t r = 0; r < ker.size(); ++r)
        for (std::size_t c = 0; c < cut; ++c) proj(r, c) = ker[r][c];
    return proj.rank();
}

/// Largest integer gap between eigenvalues of the b-linear parts, used to
/// anchor truncation levels above all resonant grades. Heuristic only:
/// stabilization at consecutive levels is the actual certificate.
inline std::size_t spectral_gap_anchor(const std::vector<G>& xs, const std::vector<G>& ys) {
    long gap = 0;
    for (const G& x : xs)
        for (const G& y : ys) {
            auto d = integer_difference(x, y);
            if (d) gap = std::max(gap, std::abs(d->get_si()));
        }
    return static_cast<std::size_t>(gap);
}

inline std::vector<G> coeff1_eigenvalues(const AbModule& e) {
    try {
        std::vector<G> out;
        for (const auto& [v, mult] : qi_roots(e.matrix().coeff(1).charpoly())) out.push_back(v);
        return out;
    } catch (const NonSplitSpectrum&) {
        return {};
    }
}

}  // namespace detail

/// Dimensions of Hom(E,F) and Ext1(E,F) as kernel and cokernel of the
/// intertwiner Lambda. Both are computed at two consecutive truncation
/// levels and returned once stable, retrying with doubled level a few
/// times. The starting level is pushed past every integer spectral gap
/// when the relevant eigenvalues are available.
inline ExtDims ext_dims(const AbModule& e, const AbModule& f) {
    std::size_t pe = e.rank(), pf = f.rank();
    std::size_t T = std::max<std::size_t>(
        {4, 2 * std::max(pe, pf) + 2,
         detail::spectral_gap_anchor(detail::coeff1_eigenvalues(e),
                                     detail::coeff1_eigenvalues(f)) +
             3});
    for (int attempt = 0; attempt < 5; ++attempt) {
        std::size_t k1 = detail::restricted_kernel_dim(e, f, T);
        std::size_t k2 = detail::restricted_kernel_dim(e, f, T + 1);
        std::size_t c1 = T * pe * pf - detail::hom_intertwiner(e, f, T).rank();
        std::size_t c2 = (T + 1) * pe * pf - detail::hom_intertwiner(e, f, T + 1).rank();
        if (k1 == k2 && c1 == c2) return {k1, c1};
        T *= 2;
    }
    throw NotStabilized("Hom/Ext dimensions kept moving under truncation refinement");
}

/// dim Ext1(E, E_lambda) through the dual-side presentation as the
/// cokernel of (a + lambda.b) acting on E^*. Independent route used to
/// cross-check ext_dims.
inline std::size_t ext1_dual_route(const AbModule& e, const G& lambda) {
    AbModule ed = e.dual();
    std::size_t p = ed.rank();
    std::vector<G> neg = {-lambda};
    std::size_t T = std::max<std::size_t>(
        {4, 2 * p + 2, detail::spectral_gap_anchor(detail::coeff1_eigenvalues(ed), neg) + 3});
    auto coker = [&](std::size_t n) {
        auto [amat, bmat] = detail::quotient_action(ed, n);
        QMat op = amat + lambda * bmat;
        return n * p - op.rank();
    };
    for (int attempt = 0; attempt < 5; ++attempt) {
        std::size_t c1 = coker(T);
        std::size_t c2 = coker(T + 1);
        if (c1 == c2) return c1;
        T *= 2;
    }
    throw NotStabilized("dual-route Ext1 dimension kept moving under truncation refinement");
}

/// Smallest N with b^N.E contained in (a - lambda.b).E. The guaranteed
/// bound B = max(0, m+1) + delta + 1, where m is the largest integer
/// offset of lambda over a class minimum of S(E^b), also covers every
/// larger window, so testing membership inside E/b^{B+1}.E is exact.
inline std::size_t cokernel_b_bound(const AbModule& e, const G& lambda) {
    WidthReport w = widths(e);
    std::size_t delta = index_delta(e);
    std::optional<long> off;
    for (const ClassWidth& c : w.classes) {
        auto d = integer_difference(lambda, c.lambda_min);
        if (d) {
            long v = static_cast<long>(d->get_si());
            off = off ? std::max(*off, v) : v;
        } else {
            G diff = lambda - c.lambda_min;
            Rational re = diff.re();
            if (diff.im() != 0 && re.get_den() == 1)
                throw BoundNotInteger("class offset has integer real part but is not real");
        }
    }
    long m = off ? std::max<long>(0, *off + 1) : 0;
    std::size_t bound = static_cast<std::size_t>(m) + delta + 1;
    std::size_t T = bound + 1;
    std::size_t p = e.rank();
    auto [amat, bmat] = detail::quotient_action(e, T);
    QMat image = amat - lambda * bmat;
    std::size_t base = image.rank();
    for (std::size_t n = 0; n <= bound; ++n) {
        // all of b^n.E must land in the image, so adjoin every graded
        // unit of grade n and above; grades past T need no test, the
        // bound B already covers every larger window
        std::size_t extra = (T - n) * p;
        QMat aug(T * p, T * p + extra);
        for (std::size_t i = 0; i < T * p; ++i)
            for (std::size_t j = 0; j < T * p; ++j) aug(i, j) = image(i, j);
        for (std::size_t j = 0; j < extra; ++j) aug(n * p + j, T * p + j) = G(1);
        if (aug.rank() == base) return n;
    }
    throw CrossCheckFailed("membership search exceeded the sufficiency bound");
}

namespace detail {

/// Classifier for the simple pole half of the rank 2 list. With spectrum
/// lambda1 <= lambda2 (lex): distinct classes always split; an integer
/// gap n splits exactly when a primitive solution of (a - lambda2.b).x = 0
/// survives mod b^{n+3}, which is past the only resonant grade.
inline ClassificationRank2 classify_simple_pole_rank2(const AbModule& e) {
    std::vector<G> sp = e.spectrum_list();
    G l1 = sp[0], l2 = sp[1];
    if (lex_less(l2, l1)) std::swap(l1, l2);
    auto d = integer_difference(l2, l1);
    if (!d) return {Rank2Variant::Sum, l1, l2, 0, G(0)};
    long gap = static_cast<long>(d->get_si());
    if (gap == 0) {
        bool split = solve_eigenvector(e, l1).size() == 2;
        if (split) return {Rank2Variant::Sum, l1, l1, 0, G(0)};
        return {Rank2Variant::Log, l1, l2, 0, G(0)};
    }
    std::size_t K = static_cast<std::size_t>(gap) + 3;
    auto ker = graded_eigen_matrix(e, l2, K).nullspace();
    bool primitive = false;
    for (const QVec& v : ker)
        for (std::size_t i = 0; i < 2; ++i)
            if (!v[i].is_zero()) primitive = true;
    if (primitive) return {Rank2Variant::Sum, l1, l2, 0, G(0)};
    return {Rank2Variant::Log, l1, l2, static_cast<std::size_t>(gap), G(0)};
}

/// Recover alpha for a module whose saturation fingerprint says
/// E_{lambda, lambda-n}(alpha): solve (a - (lambda-1).b).t = (s + alpha.b^n).y
/// for (t, alpha, s) with y the normal eigenvector. The ratio alpha/s is
/// the same for every solution with s != 0, and grade n of the equation
/// pins it, so disagreement or a vanishing result is a broken fingerprint.
inline G recover_alpha(const AbModule& e, const G& lambda, std::size_t n) {
    auto [mu, y] = find_normal_line(e);
    if (!(mu == lambda - G(static_cast<long>(n))))
        throw CrossCheckFailed("normal line exponent disagrees with the saturation");
    std::size_t p = e.rank();
    std::size_t K = e.order();
    for (const Series& s : y) K = std::min(K, s.known_order());
    if (K < n + 2)
        throw InsufficientPrecision("alpha recovery window too small", K, n + 2);
    QMat op = graded_eigen_matrix(e, lambda - G(1), K);
    QMat m(K * p, K * p + 2);
    for (std::size_t i = 0; i < K * p; ++i)
        for (std::size_t j = 0; j < K * p; ++j) m(i, j) = op(i, j);
    for (std::size_t u = 0; u < K; ++u)
        for (std::size_t i = 0; i < p; ++i) {
            if (u >= n) m(u * p + i, K * p) = -y[i][u - n];
            m(u * p + i, K * p + 1) = -y[i][u];
        }
    G alpha;
    bool found = false;
    for (const QVec& v : m.nullspace()) {
        const G& al = v[K * p];
        const G& sc = v[K * p + 1];
        if (sc.is_zero()) {
            if (!al.is_zero())
                throw CrossCheckFailed("alpha recovery is underdetermined");
            continue;
        }
        G cand = al / sc;
        if (found && !(cand == alpha))
            throw CrossCheckFailed("alpha recovery is inconsistent");
        alpha = cand;
        found = true;
    }
    if (!found) throw CrossCheckFailed("defining relations of the twisted pair have no solution");
    if (alpha.is_zero())
        throw CrossCheckFailed("vanishing alpha contradicts the saturation fingerprint");
    return alpha;
}

}  // namespace detail

/// Standard model for a classification outcome, at the given order.
inline AbModule construct_standard(const ClassificationRank2& c, std::size_t order) {
    switch (c.variant) {
    case Rank2Variant::Sum:
        return direct_sum(make_rank1(c.lambda, order), make_rank1(c.mu, order));
    case Rank2Variant::Log:
        return make_log(c.lambda, c.n, order);
    case Rank2Variant::Pair:
        return make_pair(c.lambda, c.mu, order);
    case Rank2Variant::Alpha:
        return make_alpha(c.lambda, c.n, c.alpha, order);
    }
    throw BadParameter("unknown rank 2 variant");
}

/// Decide which member of the rank 2 list the module is isomorphic to.
/// Simple pole modules split into Sum versus Log directly; otherwise the
/// saturation is classified first and its fingerprint decides: a split or
/// Log(nu,0) saturation belongs to a Pair, a Log(nu,n) saturation with
/// n >= 1 belongs to an Alpha whose parameter is then recovered from the
/// defining relations.
inline ClassificationRank2 classify_rank2(const AbModule& e) {
    if (e.rank() != 2) throw BadParameter("classifier needs a rank 2 module");
    if (e.is_simple_pole()) return detail::classify_simple_pole_rank2(e);
    Saturation sat = saturate(e);
    ClassificationRank2 inner = detail::classify_simple_pole_rank2(sat.module);
    if (inner.variant == Rank2Variant::Sum) {
        if (!(inner.lambda == inner.mu)) {
            G mu = find_normal_line(e).first;
            G lo = inner.lambda + G(1), hi = inner.mu + G(1);
            G lambda;
            if (mu == lo)
                lambda = hi;
            else if (mu == hi)
                lambda = lo;
            else
                throw CrossCheckFailed("normal line exponent missing from the saturation");
            return {Rank2Variant::Pair, lambda, mu, 0, G(0)};
        }
        throw CrossCheckFailed("split saturation with equal exponents has a simple pole");
    }
    if (inner.variant != Rank2Variant::Log)
        throw CrossCheckFailed("saturation of a rank 2 module must split or be logarithmic");
    if (inner.n == 0) {
        G lambda = inner.lambda + G(1);
        return {Rank2Variant::Pair, lambda, lambda, 0, G(0)};
    }
    G lambda = inner.lambda + G(static_cast<long>(inner.n)) + G(1);
    G alpha = detail::recover_alpha(e, lambda, inner.n);
    return {Rank2Variant::Alpha, lambda, lambda - G(static_cast<long>(inner.n)), inner.n, alpha};
}

}  // namespace abmod
