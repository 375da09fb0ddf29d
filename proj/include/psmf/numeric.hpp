#ifndef PSMF_NUMERIC_HPP
#define PSMF_NUMERIC_HPP

#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef PSMF_NO_EXTENDED
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#endif

namespace psmf {

// Requested working precision of a pipeline run, in significant decimal
// digits.  Everything downstream derives its tolerances from this single
// number; 15 is the double-precision floor.
struct Precision {
    int significant_decimal_digits;

    explicit Precision(int digits) : significant_decimal_digits(digits) {
        if (digits < 15)
            throw std::domain_error("Precision: need at least 15 significant digits");
    }
};

template <class R>
struct real_traits;

template <>
struct real_traits<double> {
    using complex_type = std::complex<double>;
    static constexpr int digits10 = 15;
    static constexpr bool is_extended = false;
};

#ifndef PSMF_NO_EXTENDED
using real30 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<30>>;
using real50 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>>;
using complex30 = boost::multiprecision::cpp_complex<30>;
using complex50 = boost::multiprecision::cpp_complex<50>;

template <>
struct real_traits<real30> {
    using complex_type = complex30;
    // internal guard-digit type for special functions with long dependency
    // chains (Stirling shifts and the like)
    using wide_type = real50;
    static constexpr int digits10 = 30;
    static constexpr bool is_extended = true;
};

template <>
struct real_traits<real50> {
    using complex_type = complex50;
    using wide_type = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<64>>;
    static constexpr int digits10 = 50;
    static constexpr bool is_extended = true;
};
#endif

template <class R>
using complex_of = typename real_traits<R>::complex_type;

template <class R>
const R& pi() {
    static const R value = 4 * atan(R(1));
    return value;
}

template <class R>
R pow10(int e) {
    using std::pow;
    return pow(R(10), e);
}

// 10^(offset - digits): the recurring tolerance shape used throughout.
template <class R>
R tol10(const Precision& prec, int offset) {
    return pow10<R>(offset - prec.significant_decimal_digits);
}

template <class R>
complex_of<R> make_complex(const R& re, const R& im) {
    return complex_of<R>(re, im);
}

template <class R>
complex_of<R> polar_c(const R& r, const R& theta) {
    using std::cos;
    using std::sin;
    return complex_of<R>(r * cos(theta), r * sin(theta));
}

// |z|^2 without the square root
template <class R>
R sqabs(const complex_of<R>& z) {
    return R(z.real() * z.real() + z.imag() * z.imag());
}

template <class R>
bool is_finite(const R& x) {
    using std::isfinite;
    return isfinite(x);
}

template <class R>
double to_double(const R& x) {
    if constexpr (std::is_same_v<R, double>)
        return x;
    else
        return x.template convert_to<double>();
}

template <class R>
R parse_real(const std::string& s) {
    if constexpr (std::is_same_v<R, double>)
        return std::stod(s);
    else
        return R(s);
}

// Decimal rendering at (slightly more than) the backend's precision, for
// file formats that must survive extended precision.
template <class R>
std::string to_decimal_string(const R& x) {
    std::ostringstream os;
    os << std::setprecision(real_traits<R>::digits10 + 3) << std::scientific << x;
    return os.str();
}

} // namespace psmf

#endif
