#ifndef PSMF_SPECIAL_HPP
#define PSMF_SPECIAL_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "psmf/numeric.hpp"

namespace psmf {

namespace detail {

// Lanczos approximation, g = 7, 9 terms.  Relative error ~1e-15 on x > 0,
// which is all the double backend promises.
inline double gamma_lanczos(double x) {
    static const double coeff[9] = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection
        const double pi_d = 3.141592653589793238462643383279503;
        return pi_d / (std::sin(pi_d * x) * gamma_lanczos(1.0 - x));
    }
    double z = x - 1.0;
    double a = coeff[0];
    for (int i = 1; i < 9; ++i)
        a += coeff[i] / (z + i);
    double t = z + 7.5;
    return std::sqrt(2.0 * 3.141592653589793238462643383279503) *
           std::pow(t, z + 0.5) * std::exp(-t) * a;
}

// Bernoulli numbers B_2 .. B_40 as exact fractions; enough Stirling terms
// for 50-digit backends once the argument is shifted past ~1.5*digits.
template <class R>
const std::array<R, 20>& bernoulli_over_index() {
    // entry j holds B_{2j+2} / ((2j+2)(2j+1))
    static const std::array<R, 20> table = [] {
        static const char* num[20] = {
            "1",  "-1",   "1",  "-1",  "5",   "-691", "7",  "-3617", "43867", "-174611",
            "854513", "-236364091", "8553103", "-23749461029", "8615841276005",
            "-7709321041217", "2577687858367", "-26315271553053477373",
            "2929993913841559", "-261082718496449122051"};
        static const char* den[20] = {
            "6",   "30",  "42",  "30",  "66",  "2730", "6",  "510", "798", "330",
            "138", "2730", "6",   "870", "14322", "510", "6",  "1919190", "6", "13530"};
        std::array<R, 20> t{};
        for (int j = 0; j < 20; ++j) {
            int m = 2 * j + 2;
            t[j] = parse_real<R>(num[j]) / (parse_real<R>(den[j]) * m * (m - 1));
        }
        return t;
    }();
    return table;
}

// log Gamma by the Stirling series after shifting the argument to t >= shift.
template <class R>
R lgamma_stirling(const R& x, int digits) {
    using std::log;
    const R shift = R(3 * digits) / 2 + 10;
    R t = x;
    R log_shift_product(0);
    while (t < shift) {
        log_shift_product += log(t);
        t += 1;
    }
    R s = (t - R(1) / 2) * log(t) - t + log(2 * pi<R>()) / 2;
    const auto& b = bernoulli_over_index<R>();
    R t2 = t * t;
    R tp = t;
    for (int j = 0; j < 20; ++j) {
        s += b[j] / tp;
        tp *= t2;
    }
    return s - log_shift_product;
}

} // namespace detail

// Gamma function on the positive reals at the precision of the backend.
template <class R>
R gamma_eval(const R& x, const Precision& prec) {
    (void)prec;
    if (!(x > 0))
        throw std::domain_error("gamma_eval: argument must be positive");
    if constexpr (!real_traits<R>::is_extended) {
        return detail::gamma_lanczos(x);
    } else {
        // evaluate with guard digits, then round to the working backend
        using W = typename real_traits<R>::wide_type;
        using std::exp;
        W wide = exp(detail::lgamma_stirling(W(x), real_traits<R>::digits10));
        return wide.template convert_to<R>();
    }
}

// Kronecker symbol (a|n), full extension to all integers.
inline int kronecker_symbol(long long a, long long n) {
    if (n == 0)
        return (a == 1 || a == -1) ? 1 : 0;
    if (a % 2 == 0 && n % 2 == 0)
        return 0;
    int k = 1;
    int v = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++v;
    }
    if (v % 2 == 1) {
        long long am8 = ((a % 8) + 8) % 8;
        if (am8 == 3 || am8 == 5)
            k = -k;
    }
    if (n < 0) {
        n = -n;
        if (a < 0)
            k = -k;
    }
    // n now odd and positive: Jacobi symbol by quadratic reciprocity
    a %= n;
    if (a < 0)
        a += n;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            long long nm8 = n % 8;
            if (nm8 == 3 || nm8 == 5)
                k = -k;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3)
            k = -k;
        a %= n;
    }
    return n == 1 ? k : 0;
}

// Pochhammer symbol (a)_m = a(a+1)...(a+m-1), empty product for m = 0.
template <class R>
R pochhammer(const R& a, int m) {
    if (m < 0)
        throw std::domain_error("pochhammer: negative length");
    R prod(1);
    for (int i = 0; i < m; ++i)
        prod *= a + i;
    return prod;
}

// Exact binomial coefficient; n is small everywhere in this library.
inline long long binomial(int n, int k) {
    if (k < 0 || k > n)
        return 0;
    if (n > 61)
        throw std::domain_error("binomial: n too large for exact 64-bit result");
    if (k > n - k)
        k = n - k;
    long long r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

} // namespace psmf

#endif
