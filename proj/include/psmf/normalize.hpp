#ifndef PSMF_NORMALIZE_HPP
#define PSMF_NORMALIZE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "psmf/expansion_result.hpp"
#include "psmf/relations.hpp"
#include "psmf/special.hpp"

namespace psmf {

// Chowla-Selberg period for absolute discriminant d and class number h:
// (1 / sqrt(2 d pi)) (prod_j Gamma(j/d)^((-d|j)))^(1/2h), evaluated in log
// space.
template <class R>
R chowla_selberg_omega(int d, int h, const Precision& prec) {
    if (d <= 0 || h <= 0)
        throw std::domain_error("chowla_selberg_omega: need positive discriminant and class number");
    using std::exp;
    using std::log;
    using std::sqrt;
    R logprod(0);
    for (int j = 1; j < d; ++j) {
        int e = kronecker_symbol(-d, j);
        if (e == 0)
            continue;
        logprod += R(e) * log(gamma_eval(R(j) / d, prec));
    }
    return exp(logprod / (2 * h)) / sqrt(2 * R(d) * pi<R>());
}

// Fill theta and the normalized coefficients: theta = b_1/b_0 unless an
// external period is supplied, and c_n = n! (b_n/b_0) (b_0/b_1)^n, i.e. the
// series becomes b_0 (1-w)^k sum (c_n/n!) (theta w)^n with c_0 = 1.
template <class R>
ExpansionResult<R> normalize_cm(ExpansionResult<R> res,
                                std::optional<complex_of<R>> theta_override = std::nullopt) {
    using Cx = complex_of<R>;
    if (res.b.empty() || sqabs<R>(res.b[0]) == 0)
        throw std::domain_error("normalize_cm: b_0 must be nonzero");
    Cx b0 = res.b[0];
    Cx theta;
    if (theta_override) {
        theta = *theta_override;
        res.theta_provenance = "external";
    } else {
        if (res.b.size() < 2 ||
            sqabs<R>(res.b[1]) < tol10<R>(Precision(real_traits<R>::digits10), 2) * sqabs<R>(b0))
            throw std::domain_error(
                "normalize_cm: b_1 vanishes; supply an external period (theta_override)");
        theta = res.b[1] / b0;
        res.theta_provenance = "from_ratio";
    }
    res.theta = theta;
    std::vector<Cx> c(res.b.size());
    Cx theta_pow(R(1), R(0));
    R fact(1);
    for (std::size_t n = 0; n < res.b.size(); ++n) {
        if (n > 0) {
            fact *= R(double(n));
            theta_pow *= theta;
        }
        c[n] = fact * (res.b[n] / b0) / theta_pow;
    }
    res.c = std::move(c);
    return res;
}

// Max automorphy-relation residual |sum K^a_n(w) b_n| / |b| over
// deterministically sampled points off the fundamental domain.  The norm is
// taken in the radius-scaled coordinates b_n R^n, the same merit the solver
// works in; the raw coefficients grow like R^-n and would drown the signal.
template <class R>
R verify_automorphy(const ExpansionResult<R>& res, const ExpansionProblem<R>& prob, int num_points,
                    std::uint64_t seed = 0) {
    using std::sqrt;
    R bnorm(0), rp(1);
    for (const auto& x : res.b) {
        bnorm += sqabs<R>(x) * rp * rp;
        rp *= prob.radius;
    }
    bnorm = sqrt(bnorm);
    if (bnorm == 0)
        throw std::domain_error("verify_automorphy: zero coefficient vector");

    // splitmix64: portable deterministic sampling
    std::uint64_t state = seed;
    auto next_uniform = [&]() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return double(z >> 11) / 9007199254740992.0;
    };

    R worst(0);
    int used = 0;
    for (int tries = 0; tries < 50 * num_points && used < num_points; ++tries) {
        // sample on the contour |w| = R, where points generically leave D
        double t = next_uniform() * 6.283185307179586;
        DiscPoint<R> w(polar_c<R>(prob.radius, R(t)));
        auto row = automorphy_row(prob, w);
        bool zero = true;
        for (const auto& x : row)
            if (sqabs<R>(x) != 0) {
                zero = false;
                break;
            }
        if (zero)
            continue; // point lies in D: trivial relation
        ++used;
        complex_of<R> resid(R(0), R(0));
        for (std::size_t n = 0; n < row.size(); ++n)
            resid += row[n] * res.b[n];
        worst = std::max(worst, sqrt(sqabs<R>(resid)) / bnorm);
    }
    // a trivial group never produces off-domain points; report zero residual
    return worst;
}

// Hecke eigenrelation residual |a_p b_0 - sum K^h_n b_n| / |a_p b_0|.
template <class R>
R verify_hecke(const ExpansionResult<R>& res, const ExpansionProblem<R>& prob,
               const std::vector<Mat2<R>>& cosets, const complex_of<R>& a_p) {
    using std::sqrt;
    auto row = hecke_row(prob, cosets, a_p);
    complex_of<R> resid(R(0), R(0));
    for (std::size_t n = 0; n < row.size() && n < res.b.size(); ++n)
        resid += row[n] * res.b[n];
    R scale = sqrt(sqabs<R>(a_p * res.b[0]));
    if (scale == 0)
        throw std::domain_error("verify_hecke: a_p b_0 vanishes");
    return sqrt(sqabs<R>(resid)) / scale;
}

} // namespace psmf

#endif
