#ifndef PSMF_HYPERBOLIC_HPP
#define PSMF_HYPERBOLIC_HPP

#include <stdexcept>
#include <utility>

#include "psmf/numeric.hpp"

namespace psmf {

// Point of the upper half-plane, im > 0.
template <class R>
struct HalfPlanePoint {
    complex_of<R> z;

    HalfPlanePoint() : z(R(0), R(1)) {}
    explicit HalfPlanePoint(const complex_of<R>& value) : z(value) {
        if (!(value.imag() > 0))
            throw std::domain_error("HalfPlanePoint: imaginary part must be positive");
    }
    R im() const { return R(z.imag()); }
};

// Point of the open unit disc.
template <class R>
struct DiscPoint {
    complex_of<R> w;

    DiscPoint() : w(R(0), R(0)) {}
    explicit DiscPoint(const complex_of<R>& value) : w(value) {
        if (!(sqabs<R>(value) < 1))
            throw std::domain_error("DiscPoint: |w| must be < 1");
    }
    R abs() const {
        using std::sqrt;
        return sqrt(sqabs<R>(w));
    }
};

// Real 2x2 matrix acting on the half-plane, normalized to det 1.  The sign
// is canonicalized (trace >= 0, falling back to the first nonzero entry) so
// that +-g hash and print identically.
template <class R>
struct Mat2 {
    R a, b, c, d;

    Mat2() : a(1), b(0), c(0), d(1) {}
    Mat2(R aa, R bb, R cc, R dd) : a(std::move(aa)), b(std::move(bb)), c(std::move(cc)), d(std::move(dd)) {}

    R det() const { return a * d - b * c; }

    static Mat2 identity() { return Mat2(); }

    Mat2 operator*(const Mat2& o) const {
        return Mat2(a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d);
    }

    Mat2 inverse() const { return Mat2(d, -b, -c, a); } // valid for det 1

    bool is_identity(const R& tol) const {
        using std::abs;
        return abs(a - 1) < tol && abs(b) < tol && abs(c) < tol && abs(d - 1) < tol;
    }

    void canonicalize_sign() {
        R tr = a + d;
        bool flip;
        if (tr != 0)
            flip = tr < 0;
        else if (a != 0)
            flip = a < 0;
        else if (b != 0)
            flip = b < 0;
        else
            flip = c < 0;
        if (flip) {
            a = -a;
            b = -b;
            c = -c;
            d = -d;
        }
    }
};

// Checks |det - 1| against the usual working tolerance and normalizes.
template <class R>
Mat2<R> normalized_det1(Mat2<R> g, const Precision& prec) {
    using std::abs;
    using std::sqrt;
    R det = g.det();
    if (!(det > 0))
        throw std::domain_error("Mat2: determinant must be positive");
    R s = sqrt(det);
    g.a /= s;
    g.b /= s;
    g.c /= s;
    g.d /= s;
    if (abs(g.det() - 1) > tol10<R>(prec, 3))
        throw std::domain_error("Mat2: could not normalize determinant to 1");
    g.canonicalize_sign();
    return g;
}

// w(p; z) = (z - p)/(z - conj p), the disc coordinate centered at p.
template <class R>
DiscPoint<R> to_disc(const HalfPlanePoint<R>& p, const HalfPlanePoint<R>& z) {
    complex_of<R> pc = p.z;
    complex_of<R> w = (z.z - pc) / (z.z - conj(pc));
    return DiscPoint<R>(w);
}

// z(p; w) = (conj(p) w - p)/(w - 1), inverse of to_disc.
template <class R>
HalfPlanePoint<R> from_disc(const HalfPlanePoint<R>& p, const DiscPoint<R>& w) {
    complex_of<R> pc = p.z;
    complex_of<R> z = (conj(pc) * w.w - pc) / (w.w - complex_of<R>(R(1), R(0)));
    return HalfPlanePoint<R>(z);
}

// Moebius action on the half-plane together with the automorphy factor
// j(g, z) = cz + d.
template <class R>
std::pair<HalfPlanePoint<R>, complex_of<R>> act_half_plane(const Mat2<R>& g, const HalfPlanePoint<R>& z) {
    complex_of<R> j = complex_of<R>(g.c, R(0)) * z.z + complex_of<R>(g.d, R(0));
    complex_of<R> num = complex_of<R>(g.a, R(0)) * z.z + complex_of<R>(g.b, R(0));
    return {HalfPlanePoint<R>(num / j), j};
}

// The same action read through the disc chart centered at p.  The factor
// returned is still j(g, z(w)) computed on the half-plane, which is the
// stable evaluation route.
template <class R>
std::pair<DiscPoint<R>, complex_of<R>> act_disc(const Mat2<R>& g, const HalfPlanePoint<R>& p,
                                                const DiscPoint<R>& w) {
    HalfPlanePoint<R> z = from_disc(p, w);
    auto [gz, j] = act_half_plane(g, z);
    return {to_disc(p, gz), j};
}

// Distance from the disc origin: d = 2 artanh |w|.  Monotone in |w|, which
// is what the reduction loop actually compares.
template <class R>
R disc_distance_to_origin(const R& abs_w) {
    using std::atanh;
    return 2 * atanh(abs_w);
}

template <class R>
R hyp_distance(const HalfPlanePoint<R>& z1, const HalfPlanePoint<R>& z2) {
    using std::acosh;
    R q = sqabs<R>(z1.z - z2.z) / (2 * z1.im() * z2.im());
    return acosh(1 + q);
}

} // namespace psmf

#endif
