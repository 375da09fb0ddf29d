#ifndef PSMF_QUATERNION_HPP
#define PSMF_QUATERNION_HPP

#include <algorithm>
#include <array>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "psmf/exact_matrix.hpp"
#include "psmf/quadratic_field.hpp"

namespace psmf {

// Rational quaternion algebra (a, b | Q): alpha^2 = a, beta^2 = b,
// beta*alpha = -alpha*beta.
struct QuaternionAlgebraQ {
    Rational a, b;

    QuaternionAlgebraQ(Rational aa, Rational bb) : a(std::move(aa)), b(std::move(bb)) {
        if (a == 0 || b == 0)
            throw std::domain_error("QuaternionAlgebraQ: a and b must be nonzero");
    }
};

// Element t + u*alpha + v*beta + s*alpha*beta with rational coordinates.
struct QuaternionElement {
    Rational t, u, v, s;

    QuaternionElement() : t(0), u(0), v(0), s(0) {}
    QuaternionElement(Rational tt, Rational uu, Rational vv, Rational ss)
        : t(std::move(tt)), u(std::move(uu)), v(std::move(vv)), s(std::move(ss)) {}

    static QuaternionElement one() { return {1, 0, 0, 0}; }
    static QuaternionElement alpha() { return {0, 1, 0, 0}; }
    static QuaternionElement beta() { return {0, 0, 1, 0}; }

    QuaternionElement conjugate() const { return {t, -u, -v, -s}; }
    QuaternionElement operator-() const { return {-t, -u, -v, -s}; }

    QuaternionElement operator+(const QuaternionElement& o) const {
        return {t + o.t, u + o.u, v + o.v, s + o.s};
    }
    QuaternionElement operator-(const QuaternionElement& o) const {
        return {t - o.t, u - o.u, v - o.v, s - o.s};
    }

    QuaternionElement scaled(const Rational& c) const { return {t * c, u * c, v * c, s * c}; }

    bool operator==(const QuaternionElement& o) const {
        return t == o.t && u == o.u && v == o.v && s == o.s;
    }
    bool operator<(const QuaternionElement& o) const {
        return std::tie(t, u, v, s) < std::tie(o.t, o.u, o.v, o.s);
    }
};

inline QuaternionElement multiply(const QuaternionElement& x, const QuaternionElement& y,
                                  const QuaternionAlgebraQ& alg) {
    const Rational &a = alg.a, &b = alg.b;
    return {x.t * y.t + a * x.u * y.u + b * x.v * y.v - a * b * x.s * y.s,
            x.t * y.u + x.u * y.t - b * x.v * y.s + b * x.s * y.v,
            x.t * y.v + x.v * y.t + a * x.u * y.s - a * x.s * y.u,
            x.t * y.s + x.s * y.t + x.u * y.v - x.v * y.u};
}

// nrd(g) = g * conj(g) = t^2 - a u^2 - b v^2 + a b s^2
inline Rational reduced_norm(const QuaternionElement& g, const QuaternionAlgebraQ& alg) {
    return g.t * g.t - alg.a * g.u * g.u - alg.b * g.v * g.v + alg.a * alg.b * g.s * g.s;
}

// Z-module basis of an order.  Closure under multiplication (and membership
// of 1) is verified exactly on construction demand.
struct OrderQ {
    std::array<QuaternionElement, 4> basis;

    // Coordinates of x in the basis, as exact rationals; throws if the basis
    // is degenerate.
    std::array<Rational, 4> coordinates(const QuaternionElement& x) const {
        // 4x4 Gaussian elimination over Q
        Rational m[4][5];
        std::array<Rational, 4> rhs = {x.t, x.u, x.v, x.s};
        for (int i = 0; i < 4; ++i) {
            std::array<Rational, 4> bc = {basis[i].t, basis[i].u, basis[i].v, basis[i].s};
            for (int r = 0; r < 4; ++r)
                m[r][i] = bc[r];
        }
        for (int r = 0; r < 4; ++r)
            m[r][4] = rhs[r];
        for (int col = 0; col < 4; ++col) {
            int piv = -1;
            for (int r = col; r < 4; ++r)
                if (m[r][col] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0)
                throw std::domain_error("OrderQ: basis is not linearly independent");
            for (int j = 0; j <= 4; ++j)
                std::swap(m[piv][j], m[col][j]);
            for (int r = 0; r < 4; ++r) {
                if (r == col || m[r][col] == 0)
                    continue;
                Rational f = m[r][col] / m[col][col];
                for (int j = col; j <= 4; ++j)
                    m[r][j] -= f * m[col][j];
            }
        }
        std::array<Rational, 4> out;
        for (int r = 0; r < 4; ++r)
            out[r] = m[r][4] / m[r][r];
        return out;
    }

    static bool all_integral(const std::array<Rational, 4>& c) {
        for (const auto& q : c)
            if (denominator(q) != 1)
                return false;
        return true;
    }

    // Ring axioms on the basis: products land in the lattice, and 1 does.
    void verify_closure(const QuaternionAlgebraQ& alg) const {
        if (!all_integral(coordinates(QuaternionElement::one())))
            throw std::domain_error("OrderQ: 1 is not in the lattice");
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (!all_integral(coordinates(multiply(basis[i], basis[j], alg))))
                    throw std::domain_error("OrderQ: basis not closed under multiplication");
    }
};

// All elements sum n_i basis_i with |n_i| <= height and nrd = 1, one per
// sign class, closed under conjugation, sorted for determinism.
inline std::vector<QuaternionElement> enumerate_norm_one_units(const OrderQ& order,
                                                               const QuaternionAlgebraQ& alg,
                                                               int height) {
    order.verify_closure(alg);
    if (height < 0)
        throw std::domain_error("enumerate_norm_one_units: height must be nonnegative");
    std::vector<QuaternionElement> found;
    auto sign_canonical = [](const QuaternionElement& g) {
        for (const Rational* c : {&g.t, &g.u, &g.v, &g.s}) {
            if (*c != 0)
                return *c > 0 ? g : -g;
        }
        return g;
    };
    auto push_unique = [&](const QuaternionElement& g) {
        QuaternionElement cg = sign_canonical(g);
        if (std::find(found.begin(), found.end(), cg) == found.end())
            found.push_back(cg);
    };
    push_unique(QuaternionElement::one()); // present in every order
    for (int n0 = -height; n0 <= height; ++n0)
        for (int n1 = -height; n1 <= height; ++n1)
            for (int n2 = -height; n2 <= height; ++n2)
                for (int n3 = -height; n3 <= height; ++n3) {
                    QuaternionElement g = order.basis[0].scaled(n0) + order.basis[1].scaled(n1) +
                                          order.basis[2].scaled(n2) + order.basis[3].scaled(n3);
                    if (reduced_norm(g, alg) == 1)
                        push_unique(g);
                }
    // conjugates (= inverses for norm 1) can fall outside the coordinate box
    for (std::size_t i = 0, n = found.size(); i < n; ++i)
        push_unique(found[i].conjugate());
    std::sort(found.begin(), found.end());
    return found;
}

// Splitting B -> M_2(R) by alpha -> diag(sqrt a, -sqrt a), beta -> (0 b; 1 0),
// valid for a > 0.  Norm-1 elements land in SL_2 over Q(sqrt a*) with a* the
// squarefree part of a.
inline ExactMatrix2 embed_unit(const QuaternionElement& g, const QuaternionAlgebraQ& alg) {
    if (!(alg.a > 0))
        throw std::domain_error("embed_unit: splitting requires a > 0");
    if (reduced_norm(g, alg) != 1)
        throw std::domain_error("embed_unit: element must have reduced norm 1");
    // a = (num/den): sqrt(a) = (m / den) sqrt(d) with num*den = d*m^2
    BigInt num = numerator(alg.a), den = denominator(alg.a);
    BigInt nd = num * den;
    long long d = 1;
    BigInt m = 1;
    // strip square factors of nd
    BigInt rest = nd;
    for (BigInt p = 2; p * p <= rest;) {
        if (rest % (p * p) == 0) {
            m *= p;
            rest /= p * p;
        } else {
            ++p;
        }
    }
    d = rest.convert_to<long long>();
    Rational r(m, den); // sqrt(a) = r * sqrt(d)
    QuadExt sqrt_a(Rational(0), r, d);
    QuadExt t(g.t), u(g.u), v(g.v), s(g.s);
    QuadExt bq(alg.b);
    // (t + u sqrt a,  b v + b s sqrt a;  v - s sqrt a,  t - u sqrt a)
    return ExactMatrix2(t + u * sqrt_a, bq * (v + s * sqrt_a), v - s * sqrt_a, t - u * sqrt_a);
}

} // namespace psmf

#endif
