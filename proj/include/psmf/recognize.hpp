#ifndef PSMF_RECOGNIZE_HPP
#define PSMF_RECOGNIZE_HPP

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "psmf/quadratic_field.hpp"

namespace psmf {

namespace detail {

inline BigInt round_rational(const Rational& q) {
    BigInt num = numerator(q), den = denominator(q);
    BigInt twice = 2 * num + den; // floor((num + den/2) / den) = floor(twice / (2 den))
    BigInt d2 = 2 * den;
    BigInt fl = twice / d2;
    if (twice < 0 && twice % d2 != 0)
        fl -= 1;
    return fl;
}

template <class R>
BigInt round_to_bigint(const R& x) {
    using std::floor;
    R shifted = floor(x + R(1) / 2);
    if constexpr (std::is_same_v<R, double>) {
        return BigInt(static_cast<long long>(shifted));
    } else {
        return shifted.template convert_to<BigInt>();
    }
}

// Textbook LLL (delta = 0.99) with exact rational Gram-Schmidt; dimensions
// here are 3 or 4, so recomputing the GSO wholesale is free.
inline void lll_reduce(std::vector<std::vector<BigInt>>& basis) {
    const std::size_t n = basis.size();
    const std::size_t m = basis[0].size();
    const Rational delta(99, 100);

    auto dot = [m](const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
        BigInt s = 0;
        for (std::size_t i = 0; i < m; ++i)
            s += a[i] * b[i];
        return s;
    };

    std::vector<std::vector<Rational>> mu(n, std::vector<Rational>(n, 0));
    std::vector<Rational> Bnorm(n, 0);
    auto gso = [&]() {
        // b*_i = b_i - sum_{j<i} mu_ij b*_j ; everything via rational dots
        std::vector<std::vector<Rational>> star(n, std::vector<Rational>(m, 0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < m; ++c)
                star[i][c] = Rational(basis[i][c]);
            for (std::size_t j = 0; j < i; ++j) {
                Rational num = 0;
                for (std::size_t c = 0; c < m; ++c)
                    num += Rational(basis[i][c]) * star[j][c];
                mu[i][j] = Bnorm[j] == 0 ? Rational(0) : num / Bnorm[j];
                for (std::size_t c = 0; c < m; ++c)
                    star[i][c] -= mu[i][j] * star[j][c];
            }
            Rational bn = 0;
            for (std::size_t c = 0; c < m; ++c)
                bn += star[i][c] * star[i][c];
            Bnorm[i] = bn;
        }
        (void)dot;
    };

    gso();
    std::size_t k = 1;
    int guard = 0;
    while (k < n) {
        if (++guard > 10000)
            break; // desk-scale lattices terminate long before this
        for (std::size_t j = k; j-- > 0;) {
            BigInt r = round_rational(mu[k][j]);
            if (r != 0) {
                for (std::size_t c = 0; c < m; ++c)
                    basis[k][c] -= r * basis[j][c];
                gso();
            }
        }
        if (Bnorm[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * Bnorm[k - 1]) {
            ++k;
        } else {
            std::swap(basis[k], basis[k - 1]);
            gso();
            k = k > 1 ? k - 1 : 1;
        }
    }
}

} // namespace detail

// Best continued-fraction convergent with denominator below the bound;
// nothing is returned unless it matches x to 10^(6 - digits).
template <class R>
std::optional<Rational> recognize_rational(const R& x, long long max_denominator) {
    using std::abs;
    using std::floor;
    const R tol = tol10<R>(Precision(real_traits<R>::digits10), 6);
    BigInt h0 = 0, h1 = 1, k0 = 1, k1 = 0; // convergent recurrences
    R frac = x;
    std::optional<Rational> best;
    R best_err(0);
    for (int it = 0; it < 64; ++it) {
        R fl = floor(frac);
        BigInt a = detail::round_to_bigint(fl);
        BigInt h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_denominator)
            break;
        Rational cand(h2, k2);
        R err = abs(x - QuadExt::rational_to_real<R>(cand));
        if (!best || err < best_err) {
            best = cand;
            best_err = err;
        }
        if (err == 0)
            break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        R rem = frac - fl;
        if (abs(rem) < std::numeric_limits<R>::epsilon() * 4)
            break;
        frac = 1 / rem;
    }
    if (best && best_err <= tol)
        return best;
    return std::nullopt;
}

// Recognize x as u + v sqrt(d) with rational u, v by lattice reduction on
// integer combinations A + B x + C sqrt(d), scaled by 10^digits.  `height`
// bounds the admissible integer entries; failure is a value, not an error.
template <class R>
std::optional<std::pair<Rational, Rational>> recognize_quadratic(const R& x, long long d,
                                                                 long long height,
                                                                 int digits = 0) {
    using std::abs;
    using std::sqrt;
    if (d <= 1)
        throw std::domain_error("recognize_quadratic: need d > 1");
    if (digits <= 0)
        digits = real_traits<R>::digits10;
    const R sqrt_d = sqrt(R(d));

    BigInt scale = 1;
    for (int i = 0; i < digits - 2; ++i)
        scale *= 10;
    R scale_r = QuadExt::rational_to_real<R>(Rational(scale));

    std::vector<std::vector<BigInt>> basis = {
        {1, 0, 0, scale},
        {0, 1, 0, detail::round_to_bigint(scale_r * x)},
        {0, 0, 1, detail::round_to_bigint(scale_r * sqrt_d)},
    };
    detail::lll_reduce(basis);

    // shortest vector first; accept the first row that is a genuine relation
    for (const auto& row : basis) {
        BigInt A = row[0], B = row[1], C = row[2];
        if (B == 0)
            continue;
        if (abs(A) > height || abs(B) > height || abs(C) > height)
            continue;
        if (B < 0) { // rational constructors require a positive denominator
            A = -A;
            B = -B;
            C = -C;
        }
        BigInt negA = -A, negC = -C;
        Rational u(negA, B), v(negC, B);
        R approx = QuadExt::rational_to_real<R>(u) + QuadExt::rational_to_real<R>(v) * sqrt_d;
        if (abs(x - approx) <= pow10<R>(6 - digits))
            return std::make_pair(u, v);
    }
    return std::nullopt;
}

} // namespace psmf

#endif
