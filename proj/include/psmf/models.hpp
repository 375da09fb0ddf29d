#ifndef PSMF_MODELS_HPP
#define PSMF_MODELS_HPP

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "psmf/expansion_result.hpp"
#include "psmf/hyperbolic.hpp"
#include "psmf/linalg.hpp"

namespace psmf {

// Term-wise primitive of a weight-2 expansion: integral of f dw/(1-w)^2 is
// sum b_n w^(n+1)/(n+1), the (1-w)^2 factors cancelling at weight 2.
template <class R>
complex_of<R> antiderivative_eval(const ExpansionResult<R>& res, const DiscPoint<R>& w) {
    if (res.weight != 2)
        throw std::domain_error("antiderivative_eval: only weight 2 integrates to weight 0");
    using Cx = complex_of<R>;
    Cx acc(R(0), R(0));
    Cx wp = w.w;
    for (std::size_t n = 0; n < res.b.size(); ++n) {
        acc += res.b[n] * wp / R(double(n + 1));
        wp *= w.w;
    }
    return acc;
}

template <class R>
complex_of<R> period_integral(const ExpansionResult<R>& res, const DiscPoint<R>& from,
                              const DiscPoint<R>& to, const R& validated_radius) {
    using std::sqrt;
    if (sqrt(sqabs<R>(from.w)) > validated_radius || sqrt(sqabs<R>(to.w)) > validated_radius)
        throw std::domain_error("period_integral: endpoint outside the validated radius");
    return antiderivative_eval(res, to) - antiderivative_eval(res, from);
}

// Lattice Z omega1 + Z omega2 with tau = omega1/omega2 normalized into the
// standard fundamental domain (im > 0, |Re| <= 1/2, |tau| >= 1).
template <class R>
class PeriodLattice {
  public:
    complex_of<R> omega1, omega2;
    complex_of<R> tau;

    PeriodLattice(const complex_of<R>& o1, const complex_of<R>& o2) : omega1(o1), omega2(o2) {
        using std::abs;
        complex_of<R> ratio = o1 / o2;
        if (abs(R(ratio.imag())) < tol10<R>(Precision(real_traits<R>::digits10), 8))
            throw std::domain_error("PeriodLattice: periods are proportional over R");
        if (ratio.imag() < 0)
            ratio = o2 / o1; // same lattice, opposite basis orientation
        tau = reduce_tau(ratio);
    }

    static complex_of<R> reduce_tau(complex_of<R> t) {
        using std::floor;
        for (int guard = 0; guard < 400; ++guard) {
            R shift = floor(R(t.real()) + R(1) / 2);
            t -= complex_of<R>(shift, R(0));
            if (sqabs<R>(t) < 1 - std::numeric_limits<R>::epsilon() * 8)
                t = -complex_of<R>(R(1), R(0)) / t;
            else
                return t;
        }
        throw std::runtime_error("PeriodLattice: tau reduction did not settle");
    }
};

// Klein j from the normalized period ratio, via the Eisenstein q-series of
// E4 and E6; |q| <= e^(-pi sqrt 3) on the fundamental domain so the tail is
// a clean geometric estimate.
template <class R>
complex_of<R> j_from_lattice(const PeriodLattice<R>& L) {
    using Cx = complex_of<R>;
    using std::exp;
    const Precision prec(real_traits<R>::digits10);
    if (L.tau.imag() < R(1) / 1000)
        throw std::runtime_error("j_from_lattice: im(tau) too small after normalization");
    Cx q = exp(Cx(R(0), R(1)) * (2 * pi<R>()) * L.tau);
    R qa = sqabs<R>(q);

    // sigma_3 and sigma_5 sums until the geometric tail is negligible
    Cx e4(R(1), R(0)), e6(R(1), R(0));
    Cx qn(R(1), R(0));
    const R tiny = tol10<R>(prec, -4);
    for (int n = 1; n < 4000; ++n) {
        qn *= q;
        long long s3 = 0, s5 = 0;
        for (long long d = 1; d <= n; ++d)
            if (n % d == 0) {
                long long d3 = d * d * d;
                s3 += d3;
                s5 += d3 * d * d;
            }
        e4 += R(240) * R(double(s3)) * qn;
        e6 -= R(504) * R(double(s5)) * qn;
        using std::pow;
        using std::sqrt;
        R tail = pow(R(double(n + 1)), 6) * sqrt(sqabs<R>(qn) * qa);
        if (tail < tiny)
            break;
    }
    Cx e43 = e4 * e4 * e4;
    Cx delta = (e43 - e6 * e6) / R(1728);
    if (sqabs<R>(delta) == 0)
        throw std::runtime_error("j_from_lattice: discriminant vanished");
    return e43 / delta;
}

// Abel-Jacobi representative mod the lattice: subtract the nearest lattice
// point, ties rounded toward zero.
template <class R>
complex_of<R> reduce_mod_lattice(const complex_of<R>& value, const PeriodLattice<R>& L) {
    using std::abs;
    using std::floor;
    // solve value = x omega1 + y omega2 over the reals
    R a = R(L.omega1.real()), b = R(L.omega2.real());
    R c = R(L.omega1.imag()), d = R(L.omega2.imag());
    R det = a * d - b * c;
    R x = (R(value.real()) * d - R(value.imag()) * b) / det;
    R y = (R(value.imag()) * a - R(value.real()) * c) / det;
    auto round_half_to_zero = [](const R& t) {
        R at = abs(t);
        R fl = floor(at + R(1) / 2);
        if (fl == at + R(1) / 2)
            fl -= 1; // exact tie: toward zero
        return t < 0 ? -fl : fl;
    };
    R rx = round_half_to_zero(x), ry = round_half_to_zero(y);
    return value - L.omega1 * rx - L.omega2 * ry;
}

namespace detail {

// Laurent series: coefficients c[0], c[1], ... of s^(lead), s^(lead+1), ...
template <class R>
struct Laurent {
    int lead = 0;
    std::vector<complex_of<R>> c;

    void trim_leading(const R& tol) {
        using std::sqrt;
        std::size_t k = 0;
        while (k + 1 < c.size() && sqrt(sqabs<R>(c[k])) <= tol)
            ++k;
        if (k) {
            c.erase(c.begin(), c.begin() + long(k));
            lead += int(k);
        }
    }

    complex_of<R> at(int power) const {
        long idx = long(power) - lead;
        if (idx < 0 || idx >= long(c.size()))
            return complex_of<R>(R(0), R(0));
        return c[std::size_t(idx)];
    }
};

template <class R>
Laurent<R> laurent_mul(const Laurent<R>& f, const Laurent<R>& g, std::size_t keep) {
    Laurent<R> out;
    out.lead = f.lead + g.lead;
    std::size_t n = std::min(keep, f.c.size() + g.c.size());
    out.c.assign(n, complex_of<R>(R(0), R(0)));
    for (std::size_t i = 0; i < f.c.size(); ++i) {
        if (i >= n)
            break;
        for (std::size_t j = 0; j < g.c.size() && i + j < n; ++j)
            out.c[i + j] += f.c[i] * g.c[j];
    }
    return out;
}

template <class R>
Laurent<R> laurent_div(const Laurent<R>& f, const Laurent<R>& g, std::size_t keep) {
    if (g.c.empty() || sqabs<R>(g.c[0]) == 0)
        throw std::domain_error("laurent_div: division by a series with vanishing leading term");
    Laurent<R> out;
    out.lead = f.lead - g.lead;
    out.c.assign(keep, complex_of<R>(R(0), R(0)));
    for (std::size_t n = 0; n < keep; ++n) {
        complex_of<R> acc = n < f.c.size() ? f.c[n] : complex_of<R>(R(0), R(0));
        for (std::size_t j = 1; j <= n && j < g.c.size(); ++j)
            acc -= g.c[j] * out.c[n - j];
        out.c[n] = acc / g.c[0];
    }
    return out;
}

template <class R>
Laurent<R> laurent_derivative(const Laurent<R>& f) {
    Laurent<R> out;
    out.lead = f.lead - 1;
    out.c.assign(f.c.size(), complex_of<R>(R(0), R(0)));
    for (std::size_t i = 0; i < f.c.size(); ++i)
        out.c[i] = f.c[i] * R(double(f.lead + int(i)));
    // the constant term of f contributes nothing
    return out;
}

} // namespace detail

template <class R>
struct HyperellipticFit {
    std::vector<complex_of<R>> q; // coefficients q_0 .. q_(2g+2)
    R residual{};                 // held-out coefficient mismatch, relative
    std::string variable;         // "theta_w" or "w"
};

// Fit y^2 = q(x) of degree 2g+2 from two weight-2 expansions with x = g/h
// and y = x'/h, h carrying a simple zero at the center.  The linear match
// runs over the pole coefficients; the next ten coefficients are held out
// and reported as the residual.
template <class R>
HyperellipticFit<R> hyperelliptic_fit(const ExpansionResult<R>& g_series,
                                      const ExpansionResult<R>& h_series, int genus = 2) {
    using Cx = complex_of<R>;
    using std::sqrt;
    const Precision prec(real_traits<R>::digits10);
    if (g_series.weight != 2 || h_series.weight != 2)
        throw std::domain_error("hyperelliptic_fit: both inputs must have weight 2");
    if (genus < 1)
        throw std::domain_error("hyperelliptic_fit: genus must be positive");
    const int deg = 2 * genus + 2;
    const int held_out = 10;
    const std::size_t keep = std::size_t(deg) + held_out + 8;
    if (g_series.b.size() < keep || h_series.b.size() < keep)
        throw std::domain_error("hyperelliptic_fit: need at least " + std::to_string(keep) +
                                " series coefficients");

    // series variable: the theta-normalized coordinate when present on both
    bool use_theta = g_series.theta.has_value() && h_series.theta.has_value();
    if (g_series.theta.has_value() != h_series.theta.has_value())
        throw std::domain_error("hyperelliptic_fit: inconsistent normalization between inputs");
    Cx theta = use_theta ? *g_series.theta : Cx(R(1), R(0));
    if (use_theta &&
        sqabs<R>(*g_series.theta - *h_series.theta) > tol10<R>(prec, 8) * sqabs<R>(theta))
        throw std::domain_error("hyperelliptic_fit: the two inputs carry different periods");

    auto to_laurent = [&](const ExpansionResult<R>& e) {
        detail::Laurent<R> s;
        s.lead = 0;
        s.c.resize(keep);
        Cx tp(R(1), R(0));
        for (std::size_t n = 0; n < keep; ++n) {
            s.c[n] = e.b[n] / tp;
            if (use_theta)
                tp *= theta;
        }
        return s;
    };
    auto gs = to_laurent(g_series);
    auto hs = to_laurent(h_series);

    // h needs a simple zero, g must not vanish; judge the zeros against the
    // leading coefficients (the tail may grow geometrically)
    R hscale(0), gscale(0);
    for (std::size_t i = 0; i < 8 && i < hs.c.size(); ++i)
        hscale = std::max(hscale, sqabs<R>(hs.c[i]));
    for (std::size_t i = 0; i < 8 && i < gs.c.size(); ++i)
        gscale = std::max(gscale, sqabs<R>(gs.c[i]));
    const R zero_tol = tol10<R>(prec, 8);
    if (!(sqabs<R>(hs.c[0]) <= zero_tol * hscale) || sqabs<R>(hs.c[1]) <= zero_tol * hscale)
        throw std::domain_error("hyperelliptic_fit: h must vanish to order exactly 1 at the center");
    if (sqabs<R>(gs.c[0]) <= zero_tol * gscale)
        throw std::domain_error("hyperelliptic_fit: g must not vanish at the center");
    hs.c[0] = Cx(R(0), R(0));
    hs.lead = 1;
    hs.c.erase(hs.c.begin());

    auto x = detail::laurent_div(gs, hs, keep);       // pole of order 1
    auto xp = detail::laurent_derivative(x);          // pole of order 2
    auto y = detail::laurent_div(xp, hs, keep);       // pole of order 3
    auto y2 = detail::laurent_mul(y, y, keep);        // pole of order 6 = deg

    // powers of x
    std::vector<detail::Laurent<R>> xpow(std::size_t(deg) + 1);
    xpow[0].lead = 0;
    xpow[0].c.assign(keep, Cx(R(0), R(0)));
    xpow[0].c[0] = Cx(R(1), R(0));
    for (int i = 1; i <= deg; ++i)
        xpow[std::size_t(i)] = detail::laurent_mul(xpow[std::size_t(i - 1)], x, keep);

    // match Laurent coefficients of s^(-deg) .. s^0, hold out the next ten
    const int rows_fit = deg + 1;
    Matrix<Cx> A(std::size_t(rows_fit), std::size_t(deg) + 1);
    std::vector<Cx> rhs(static_cast<std::size_t>(rows_fit));
    for (int r = 0; r < rows_fit; ++r) {
        int power = -deg + r;
        for (int i = 0; i <= deg; ++i)
            A(std::size_t(r), std::size_t(i)) = xpow[std::size_t(i)].at(power);
        rhs[std::size_t(r)] = y2.at(power);
    }
    std::vector<Cx> q = lu_least_squares<R>(A, rhs, prec);

    R qnorm(0);
    for (const auto& v : q)
        qnorm = std::max(qnorm, sqrt(sqabs<R>(v)));
    R worst(0);
    for (int r = 1; r <= held_out; ++r) {
        Cx acc = y2.at(r);
        for (int i = 0; i <= deg; ++i)
            acc -= q[std::size_t(i)] * xpow[std::size_t(i)].at(r);
        worst = std::max(worst, sqrt(sqabs<R>(acc)));
    }
    HyperellipticFit<R> out;
    out.q = std::move(q);
    out.residual = worst / (qnorm > 0 ? qnorm : R(1));
    out.variable = use_theta ? "theta_w" : "w";
    if (out.residual > tol10<R>(prec, 4)) {
        std::ostringstream os;
        os << "hyperelliptic_fit: held-out residual " << to_decimal_string(out.residual)
           << " too large; increase the expansion length N";
        throw std::runtime_error(os.str());
    }
    return out;
}

} // namespace psmf

#endif
