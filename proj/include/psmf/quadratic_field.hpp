#ifndef PSMF_QUADRATIC_FIELD_HPP
#define PSMF_QUADRATIC_FIELD_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

#include "psmf/numeric.hpp"

namespace psmf {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline bool is_squarefree(long long d) {
    if (d < 1)
        return false;
    for (long long p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0)
            return false;
    return true;
}

// Element x + y*sqrt(d) of the real quadratic field Q(sqrt(d)).  d = 1 is
// the canonical form for plain rationals (y is folded into x).
class QuadExt {
  public:
    Rational x, y;
    long long d;

    QuadExt() : x(0), y(0), d(1) {}
    QuadExt(Rational value) : x(std::move(value)), y(0), d(1) {} // NOLINT: implicit by design
    QuadExt(long long value) : x(value), y(0), d(1) {}           // NOLINT

    QuadExt(Rational xx, Rational yy, long long dd) : x(std::move(xx)), y(std::move(yy)), d(dd) {
        if (d == 1 || y == 0) {
            if (d == 1)
                x += y;
            y = 0;
            d = 1;
            return;
        }
        if (!is_squarefree(d))
            throw std::domain_error("QuadExt: d must be a squarefree positive integer");
    }

    bool is_rational() const { return y == 0; }
    bool is_zero() const { return x == 0 && y == 0; }

    QuadExt conjugate() const { return QuadExt(x, -y, d); }

    QuadExt operator-() const { return QuadExt(-x, -y, d); }

    friend long long common_d(const QuadExt& a, const QuadExt& b) {
        if (a.d == b.d || b.d == 1)
            return a.d;
        if (a.d == 1)
            return b.d;
        throw std::domain_error("QuadExt: mixing different quadratic fields");
    }

    QuadExt operator+(const QuadExt& o) const { return QuadExt(x + o.x, y + o.y, common_d(*this, o)); }
    QuadExt operator-(const QuadExt& o) const { return QuadExt(x - o.x, y - o.y, common_d(*this, o)); }

    QuadExt operator*(const QuadExt& o) const {
        long long dd = common_d(*this, o);
        return QuadExt(x * o.x + y * o.y * dd, x * o.y + y * o.x, dd);
    }

    QuadExt operator/(const QuadExt& o) const {
        if (o.is_zero())
            throw std::domain_error("QuadExt: division by zero");
        long long dd = common_d(*this, o);
        Rational nrm = o.x * o.x - o.y * o.y * dd; // field norm, nonzero since sqrt(d) irrational
        QuadExt num = *this * o.conjugate();
        return QuadExt(num.x / nrm, num.y / nrm, dd);
    }

    QuadExt& operator+=(const QuadExt& o) { return *this = *this + o; }
    QuadExt& operator-=(const QuadExt& o) { return *this = *this - o; }
    QuadExt& operator*=(const QuadExt& o) { return *this = *this * o; }

    bool operator==(const QuadExt& o) const { return x == o.x && y == o.y && d == o.d; }
    bool operator!=(const QuadExt& o) const { return !(*this == o); }

    // Total order usable as a map key.
    bool operator<(const QuadExt& o) const {
        return std::tie(d, x, y) < std::tie(o.d, o.x, o.y);
    }

    // Exact sign of x + y*emb*sqrt(d), emb = +1 or -1.
    int sign_embedded(int emb) const {
        Rational ye = y * emb;
        int sx = x == 0 ? 0 : (x > 0 ? 1 : -1);
        int sy = ye == 0 ? 0 : (ye > 0 ? 1 : -1);
        if (sy == 0)
            return sx;
        if (sx == 0 || sx == sy)
            return sy;
        // opposite signs: compare x^2 against d y^2
        Rational diff = x * x - ye * ye * d;
        if (diff == 0)
            throw std::domain_error("QuadExt: element is zero under embedding but nonzero exactly");
        return (diff > 0) ? sx : sy;
    }

    template <class R>
    R to_real(int emb) const {
        using std::sqrt;
        R xr = rational_to_real<R>(x);
        if (y == 0)
            return xr;
        return xr + rational_to_real<R>(y) * emb * sqrt(R(d));
    }

    template <class R>
    static R rational_to_real(const Rational& q) {
        // exact conversion through the integer parts
        R num(numerator(q).template convert_to<R>());
        R den(denominator(q).template convert_to<R>());
        return num / den;
    }

    std::string str() const {
        std::ostringstream os;
        if (y == 0) {
            os << x;
        } else {
            os << x;
            os << (y < 0 ? "-" : "+");
            Rational ay = y < 0 ? Rational(-y) : y;
            if (ay != 1)
                os << ay << "*";
            os << "sqrt(" << d << ")";
        }
        return os.str();
    }
};

} // namespace psmf

#endif
