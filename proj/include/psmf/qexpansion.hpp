#ifndef PSMF_QEXPANSION_HPP
#define PSMF_QEXPANSION_HPP

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "psmf/expansion_result.hpp"
#include "psmf/hyperbolic.hpp"
#include "psmf/special.hpp"

namespace psmf {

// Fourier expansion sum a_n q^n of a classical form, a_1-normalized when
// `normalized` is set.
struct QExpansion {
    std::vector<long long> a; // a[n] is the coefficient of q^n; a[0] = 0 for cusp forms
    int weight = 2;
    int level = 1;
    bool normalized = false;

    void check() const {
        if (normalized && (a.size() < 2 || a[1] != 1))
            throw std::domain_error("QExpansion: normalized eigenform needs a_1 = 1");
    }
};

// q prod (1-q^n)^2 (1-q^(11n))^2 through q^M, by exact integer series
// arithmetic.  The eta factors are expanded with the pentagonal number
// theorem, so the partial products stay small.
inline QExpansion eta_product_expansion(int M) {
    if (M < 1 || M > 1000000)
        throw std::domain_error("eta_product_expansion: M out of range");
    const int len = M + 1;
    // E(q) = prod (1 - q^n) = sum_k (-1)^k q^(k(3k-1)/2)
    std::vector<long long> euler(std::size_t(len), 0);
    euler[0] = 1;
    for (long long k = 1;; ++k) {
        long long p1 = k * (3 * k - 1) / 2, p2 = k * (3 * k + 1) / 2;
        if (p1 >= len && p2 >= len)
            break;
        long long sign = (k % 2 == 0) ? 1 : -1;
        if (p1 < len)
            euler[std::size_t(p1)] += sign;
        if (p2 < len)
            euler[std::size_t(p2)] += sign;
    }
    auto mult_truncated = [len](const std::vector<long long>& f, const std::vector<long long>& g,
                                int stride) {
        std::vector<long long> out(std::size_t(len), 0);
        for (int i = 0; i < len; ++i) {
            if (f[std::size_t(i)] == 0)
                continue;
            for (int j = 0; i + stride * j < len; ++j) {
                if (g[std::size_t(j)] == 0)
                    continue;
                out[std::size_t(i + stride * j)] += f[std::size_t(i)] * g[std::size_t(j)];
            }
        }
        return out;
    };
    auto e2 = mult_truncated(euler, euler, 1);       // E(q)^2
    auto prod = mult_truncated(e2, e2, 11);          // E(q)^2 E(q^11)^2
    QExpansion f;
    f.a.assign(std::size_t(len), 0);
    for (int n = 1; n < len; ++n)
        f.a[std::size_t(n)] = prod[std::size_t(n - 1)]; // shift by the leading q
    f.weight = 2;
    f.level = 11;
    f.normalized = true;
    f.check();
    return f;
}

// Values (D^r f)(p) = sum n^r a_n q^n for r = 0..r_max, q = e^(2 pi i p),
// with a geometric tail estimate.  Throws when the available coefficients
// cannot reach the working accuracy.
template <class R>
std::vector<complex_of<R>> qexp_derivative_values(const QExpansion& f, const HalfPlanePoint<R>& p,
                                                  int r_max, const Precision& prec) {
    using Cx = complex_of<R>;
    using std::exp;
    using std::log;
    using std::pow;
    if (r_max < 0)
        throw std::domain_error("qexp_derivative_values: negative derivative order");
    const std::size_t M = f.a.empty() ? 0 : f.a.size() - 1;
    if (M < 2)
        throw std::domain_error("qexp_derivative_values: empty expansion");

    const R two_pi_y = 2 * pi<R>() * p.im();
    R qabs = exp(-two_pi_y);
    // tail bound with |a_n| <= n^3: sum_{n > M} n^(r+3) |q|^n
    R m1 = R(double(M + 1));
    R tail = pow(m1, r_max + 3) * pow(qabs, m1) / ((1 - qabs) * (1 - qabs));
    R target = tol10<R>(prec, -5);
    if (!(tail < target)) {
        // required M from n^(r+3) |q|^n < target, crude doubling estimate
        double need = double(M);
        double lq = to_double(log(qabs));
        double lt = to_double(log(target));
        for (int it = 0; it < 64; ++it)
            need = (lt - (r_max + 3) * std::log(need + 1)) / lq;
        std::ostringstream os;
        os << "qexp_derivative_values: " << M << " terms cannot reach the target accuracy; "
           << "roughly " << (long long)(need * 1.1) + 1 << " terms are needed";
        throw std::domain_error(os.str());
    }

    Cx q = exp(Cx(R(0), R(1)) * (2 * pi<R>()) * p.z);
    std::vector<Cx> out(std::size_t(r_max) + 1, Cx(R(0), R(0)));
    Cx qn(R(1), R(0));
    for (std::size_t n = 1; n <= M; ++n) {
        qn *= q;
        if (f.a[n] == 0)
            continue;
        Cx term = R(double(f.a[n])) * qn;
        R npow(1);
        for (int r = 0; r <= r_max; ++r) {
            out[std::size_t(r)] += npow * term;
            npow *= R(double(n));
        }
    }
    return out;
}

// Shimura-Maass values from regular derivatives:
// (d^n f)(p) = sum_r C(n,r) (k+r)_(n-r) / (-4 pi y)^(n-r) (D^r f)(p).
template <class R>
std::vector<complex_of<R>> partial_from_regular(const std::vector<complex_of<R>>& dvals, int weight,
                                                const R& y) {
    using Cx = complex_of<R>;
    const R m4py = -4 * pi<R>() * y;
    std::vector<Cx> out(dvals.size());
    for (std::size_t n = 0; n < dvals.size(); ++n) {
        Cx acc(R(0), R(0));
        // powers[r] = (-4 pi y)^(n - r)
        std::vector<R> powers(n + 1);
        powers[n] = R(1);
        for (std::size_t r = n; r-- > 0;)
            powers[r] = powers[r + 1] * m4py;
        for (std::size_t r = 0; r <= n; ++r) {
            R coeff = R(double(binomial(int(n), int(r)))) *
                      pochhammer(R(weight + int(r)), int(n - r)) / powers[r];
            acc += coeff * dvals[r];
        }
        out[n] = acc;
    }
    return out;
}

// Inverse direction, D^n from the Shimura-Maass values (same Pochhammer
// kernel with alternating signs).
template <class R>
std::vector<complex_of<R>> regular_from_partial(const std::vector<complex_of<R>>& pvals, int weight,
                                                const R& y) {
    using Cx = complex_of<R>;
    const R m4py = -4 * pi<R>() * y;
    std::vector<Cx> out(pvals.size());
    for (std::size_t n = 0; n < pvals.size(); ++n) {
        Cx acc(R(0), R(0));
        std::vector<R> powers(n + 1);
        powers[n] = R(1);
        for (std::size_t r = n; r-- > 0;)
            powers[r] = powers[r + 1] * m4py;
        for (std::size_t r = 0; r <= n; ++r) {
            R sign = ((n - r) % 2 == 0) ? R(1) : R(-1);
            R coeff = sign * R(double(binomial(int(n), int(r)))) *
                      pochhammer(R(weight + int(r)), int(n - r)) / powers[r];
            acc += coeff * pvals[r];
        }
        out[n] = acc;
    }
    return out;
}

// Independent ground truth: series coefficients b_n at the center p from a
// classical q-expansion, via b_n = (d^n f)(p) (-4 pi y)^n / n!.
template <class R>
ExpansionResult<R> power_series_from_qexp(const QExpansion& f, const HalfPlanePoint<R>& p, int N,
                                          const Precision& prec) {
    using Cx = complex_of<R>;
    if (N < 0)
        throw std::domain_error("power_series_from_qexp: negative truncation");
    auto dvals = qexp_derivative_values(f, p, N, prec);
    auto pvals = partial_from_regular(dvals, f.weight, p.im());
    ExpansionResult<R> out;
    out.b.resize(std::size_t(N) + 1);
    out.radius = R(1);
    out.weight = f.weight;
    const R m4py = -4 * pi<R>() * p.im();
    R fact(1), pw(1);
    for (int n = 0; n <= N; ++n) {
        if (n > 0) {
            fact *= n;
            pw *= m4py;
        }
        out.b[std::size_t(n)] = pvals[std::size_t(n)] * pw / fact;
    }
    return out;
}

} // namespace psmf

#endif
