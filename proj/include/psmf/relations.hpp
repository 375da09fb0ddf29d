#ifndef PSMF_RELATIONS_HPP
#define PSMF_RELATIONS_HPP

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "psmf/dirichlet.hpp"
#include "psmf/linalg.hpp"

namespace psmf {

// One expansion task: group, domain, weight, truncation and quadrature
// parameters.  The group and domain are borrowed, not owned.
template <class R>
struct ExpansionProblem {
    const FuchsianGroup<R>& group;
    const DirichletDomain<R>& domain;
    int weight;
    int N;     // truncation degree: unknowns b_0..b_N
    int Q;     // quadrature parameter; Riemann uses Q points, Simpson 2Q
    R radius;  // contour radius, defaults to rho(D)
    bool use_unit_automorphy;
    Precision prec;
};

template <class R>
ExpansionProblem<R> make_problem(const FuchsianGroup<R>& group, const DirichletDomain<R>& domain,
                                 int weight, std::optional<int> N = std::nullopt,
                                 std::optional<int> Q = std::nullopt,
                                 std::optional<R> radius = std::nullopt,
                                 std::optional<bool> unit_automorphy = std::nullopt) {
    if (weight <= 0 || weight % 2 != 0)
        throw std::domain_error("make_problem: weight must be a positive even integer");
    const Precision prec = group.prec;
    R rho = domain.rho();
    R rad = radius ? *radius : rho;
    if (!(rad > 0 && rad < 1))
        throw std::domain_error("make_problem: radius must lie in (0,1)");
    int n;
    if (N) {
        n = *N;
        if (n < 1)
            throw std::domain_error("make_problem: N must be positive");
    } else {
        // N = ceil(log eps / log rho) for eps = 10^-digits
        using std::ceil;
        using std::log;
        R estimate = ceil(log(tol10<R>(prec, 0)) / log(rho));
        n = std::max(int(to_double(estimate)), 1);
    }
    int q = Q ? *Q : 2 * n;
    if (q < 3)
        throw std::domain_error("make_problem: Q must be at least 3");
    bool ua = unit_automorphy ? *unit_automorphy : (rad >= R(6) / 10 || weight >= 8);
    return ExpansionProblem<R>{group, domain, weight, n, q, rad, ua, prec};
}

enum class RowKind { cauchy, automorphy, hecke };

struct RowTag {
    RowKind kind;
    long long hecke_label = 0;
};

// Assembled linear relations on the unknown coefficients.  In operator form
// the matrix K satisfies K b = b approximately; in homogeneous form A b = 0.
template <class R>
struct RelationSystem {
    Matrix<complex_of<R>> matrix;
    bool operator_form = false;
    std::vector<RowTag> tags;
    R radius{};
    int precision_digits = 15;
    bool scaled = false;
    bool diagonally_scaled = false;
    int dropped_zero_rows = 0;
    int diagonal_scaling_skips = 0;
    Matrix<complex_of<R>> unscaled_matrix; // retained by scale_system
};

namespace detail {

template <class R>
complex_of<R> cpow_int(const complex_of<R>& z, int k) {
    complex_of<R> r(R(1), R(0));
    complex_of<R> base = z;
    int e = k < 0 ? -k : k;
    while (e) {
        if (e & 1)
            r *= base;
        base *= base;
        e >>= 1;
    }
    if (k < 0)
        return complex_of<R>(R(1), R(0)) / r;
    return r;
}

} // namespace detail

// Automorphy relation at a sample point: row_n = j(g,z)^k (1-w)^k w^n
// - (1-w')^k (w')^n, annihilating the coefficient vector.  Points already in
// the fundamental domain give an exactly zero row (flagged by the caller).
// With unit-automorphy weighting the row is divided by |j|^k, which turns
// j^k into the modulus-one factor (j/|j|)^k and folds the (im z)^{k/2}
// normalization into the right-hand term.
template <class R>
std::vector<complex_of<R>> automorphy_row(const ExpansionProblem<R>& prob, const DiscPoint<R>& w) {
    using Cx = complex_of<R>;
    using std::pow;
    using std::sqrt;
    const int k = prob.weight;
    auto red = reduce_point(prob.domain, prob.group, w);
    std::vector<Cx> row(std::size_t(prob.N) + 1, Cx(R(0), R(0)));
    if (red.g.is_identity())
        return row; // trivial relation
    HalfPlanePoint<R> z = from_disc(prob.group.center, w);
    Cx j = act_half_plane(red.g.template numeric<R>(), z).second;
    Cx jk = detail::cpow_int<R>(j, k);
    Cx one(R(1), R(0));
    Cx lhs = jk * detail::cpow_int<R>(one - w.w, k);
    Cx rhs = detail::cpow_int<R>(one - red.w_prime.w, k);
    Cx wp(R(1), R(0)), wq(R(1), R(0));
    R weightnorm(1);
    if (prob.use_unit_automorphy)
        weightnorm = pow(sqrt(sqabs<R>(j)), k);
    for (int n = 0; n <= prob.N; ++n) {
        row[std::size_t(n)] = (lhs * wp - rhs * wq) / weightnorm;
        wp *= w.w;
        wq *= red.w_prime.w;
    }
    return row;
}

namespace detail {

// shared quadrature assembly: points w_j on the contour with weights c_j;
// K_nr = sum_j c_j j_j^{-k} (1-w'_j)^k (w'_j)^r / (w_j^n (1-w_j)^k)
template <class R>
RelationSystem<R> cauchy_assemble(const ExpansionProblem<R>& prob,
                                  const std::vector<complex_of<R>>& points,
                                  const std::vector<R>& weights) {
    using Cx = complex_of<R>;
    const int k = prob.weight;
    const std::size_t P = points.size();
    const std::size_t cols = std::size_t(prob.N) + 1;
    Cx one(R(1), R(0));

    Matrix<Cx> J(cols, P);
    Matrix<Cx> W(P, cols);
    for (std::size_t m = 0; m < P; ++m) {
        DiscPoint<R> w(points[m]);
        ReductionOutput<R> red;
        try {
            red = reduce_point(prob.domain, prob.group, w);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "cauchy matrix: quadrature point " << m + 1 << " of " << P
               << " failed to reduce: " << e.what();
            throw std::runtime_error(os.str());
        }
        HalfPlanePoint<R> z = from_disc(prob.group.center, w);
        Cx j = red.g.is_identity() ? one
                                   : act_half_plane(red.g.template numeric<R>(), z).second;
        Cx jmk = cpow_int<R>(j, -k);
        Cx denom_base = jmk / cpow_int<R>(one - w.w, k);
        // J column m: c_m j^-k / (w^n (1-w)^k)
        Cx winv = one / w.w;
        Cx acc = denom_base * weights[m];
        for (std::size_t n = 0; n < cols; ++n) {
            J(n, m) = acc;
            acc *= winv;
        }
        // W row m: (1-w')^k w'^r
        Cx wp = cpow_int<R>(one - red.w_prime.w, k);
        for (std::size_t r = 0; r < cols; ++r) {
            W(m, r) = wp;
            wp *= red.w_prime.w;
        }
    }

    RelationSystem<R> sys;
    sys.matrix = Matrix<Cx>(cols, cols);
    for (std::size_t n = 0; n < cols; ++n)
        for (std::size_t r = 0; r < cols; ++r) {
            Cx s(R(0), R(0));
            for (std::size_t m = 0; m < P; ++m)
                s += J(n, m) * W(m, r);
            sys.matrix(n, r) = s;
        }
    sys.operator_form = true;
    sys.tags.assign(cols, RowTag{RowKind::cauchy, 0});
    sys.radius = prob.radius;
    sys.precision_digits = prob.prec.significant_decimal_digits;
    return sys;
}

} // namespace detail

// Cauchy-integral operator by plain Riemann summation over Q points on the
// contour |w| = radius; satisfies K b = b on true coefficient vectors.
template <class R>
RelationSystem<R> cauchy_matrix_riemann(const ExpansionProblem<R>& prob) {
    if (prob.Q < 3)
        throw std::domain_error("cauchy_matrix_riemann: need Q >= 3");
    std::vector<complex_of<R>> pts;
    std::vector<R> wts;
    const R step = 2 * pi<R>() / prob.Q;
    for (int m = 1; m <= prob.Q; ++m) {
        pts.push_back(polar_c<R>(prob.radius, step * m));
        wts.push_back(R(1) / prob.Q);
    }
    return detail::cauchy_assemble(prob, pts, wts);
}

// Composite Simpson over 2Q panels (endpoint wrapped); error O(Q^-4) versus
// the Riemann sum's O(Q^-1..Q^-2) on generic integrands.
template <class R>
RelationSystem<R> cauchy_matrix_simpson(const ExpansionProblem<R>& prob) {
    if (prob.Q < 2)
        throw std::domain_error("cauchy_matrix_simpson: need Q >= 2");
    std::vector<complex_of<R>> pts;
    std::vector<R> wts;
    const R step = pi<R>() / prob.Q; // 2 pi / (2Q)
    for (int j = 1; j <= 2 * prob.Q; ++j) {
        pts.push_back(polar_c<R>(prob.radius, step * j));
        // 1-4-1 panel weights accumulate to 2 on odd, 4 on even nodes
        wts.push_back(R(j % 2 == 1 ? 2 : 4) / (6 * prob.Q));
    }
    return detail::cauchy_assemble(prob, pts, wts);
}

// Hecke relation a_p b_0 = sum_n K^h_n b_n for the coset action
// sum_i j(pi_i, z)^-k f(pi_i z) = a_p f(z), sampled at z = p.  Cosets must
// be determinant-1 matrices; the caller is responsible for supplying the
// eigenvalue in the normalization matching that scaling.
template <class R>
std::vector<complex_of<R>> hecke_row(const ExpansionProblem<R>& prob,
                                     const std::vector<Mat2<R>>& cosets,
                                     const complex_of<R>& a_p) {
    using Cx = complex_of<R>;
    using std::sqrt;
    const int k = prob.weight;
    const Cx one(R(1), R(0));
    std::vector<Cx> row(std::size_t(prob.N) + 1, Cx(R(0), R(0)));
    const R tol = tol10<R>(prob.prec, 6);
    for (std::size_t i = 0; i < cosets.size(); ++i) {
        auto [zi, j_pi] = act_half_plane(cosets[i], prob.group.center);
        DiscPoint<R> wi = to_disc(prob.group.center, zi);
        auto red = reduce_point(prob.domain, prob.group, wi);
        R wp_abs = red.w_prime.abs();
        if (wp_abs > prob.radius + tol) {
            std::ostringstream os;
            os << "hecke_row: image of the center under coset " << i + 1
               << " reduces to |w| = " << to_decimal_string(wp_abs)
               << " outside the validated radius " << to_decimal_string(prob.radius);
            throw std::runtime_error(os.str());
        }
        Cx j_g = red.g.is_identity()
                     ? one
                     : act_half_plane(red.g.template numeric<R>(), HalfPlanePoint<R>(zi)).second;
        Cx factor = detail::cpow_int<R>(j_pi, -k) * detail::cpow_int<R>(j_g, -k) *
                    detail::cpow_int<R>(one - red.w_prime.w, k);
        Cx wq(R(1), R(0));
        for (int n = 0; n <= prob.N; ++n) {
            row[std::size_t(n)] += factor * wq;
            wq *= red.w_prime.w;
        }
    }
    row[0] -= a_p;
    return row;
}

// Convert the operator form K into the homogeneous system (K - I) b = 0.
template <class R>
RelationSystem<R> homogeneous(RelationSystem<R> sys) {
    if (!sys.operator_form)
        return sys;
    if (sys.matrix.rows() != sys.matrix.cols())
        throw std::invalid_argument("homogeneous: operator must be square");
    for (std::size_t i = 0; i < sys.matrix.rows(); ++i)
        sys.matrix(i, i) -= complex_of<R>(R(1), R(0));
    sys.operator_form = false;
    return sys;
}

// Append a homogeneous relation row; identically-zero rows (sample point was
// already reduced) are dropped and counted.
template <class R>
void append_row(RelationSystem<R>& sys, const std::vector<complex_of<R>>& row, RowTag tag) {
    if (sys.operator_form)
        throw std::invalid_argument("append_row: convert to homogeneous form first");
    if (sys.scaled)
        throw std::invalid_argument("append_row: system already scaled");
    if (row.size() != sys.matrix.cols())
        throw std::invalid_argument("append_row: length mismatch");
    bool zero = true;
    for (const auto& x : row)
        if (sqabs<R>(x) != 0) {
            zero = false;
            break;
        }
    if (zero) {
        ++sys.dropped_zero_rows;
        return;
    }
    Matrix<complex_of<R>> grown(sys.matrix.rows() + 1, sys.matrix.cols());
    for (std::size_t i = 0; i < sys.matrix.rows(); ++i)
        for (std::size_t j = 0; j < sys.matrix.cols(); ++j)
            grown(i, j) = sys.matrix(i, j);
    for (std::size_t j = 0; j < row.size(); ++j)
        grown(sys.matrix.rows(), j) = row[j];
    sys.matrix = std::move(grown);
    sys.tags.push_back(tag);
}

// Stabilizing scalings of the homogeneous system: column r is multiplied by
// radius^-r (the unknowns become b'_r = b_r radius^r, all of comparable
// size), Cauchy rows are divided by their diagonal entry, appended rows by
// their sup norm.  The pre-scaling matrix is retained so unscaling is exact.
template <class R>
RelationSystem<R> scale_system(RelationSystem<R> sys, const R& radius) {
    using std::abs;
    using std::sqrt;
    if (sys.scaled)
        throw std::invalid_argument("scale_system: already scaled");
    if (sys.operator_form)
        throw std::invalid_argument("scale_system: convert to homogeneous form first");
    sys.unscaled_matrix = sys.matrix;
    const std::size_t rows = sys.matrix.rows(), cols = sys.matrix.cols();

    std::vector<R> colscale(cols);
    R p(1);
    for (std::size_t r = 0; r < cols; ++r) {
        colscale[r] = 1 / p;
        p *= radius;
    }
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t r = 0; r < cols; ++r)
            sys.matrix(i, r) *= colscale[r];
    sys.scaled = true;
    sys.radius = radius;

    for (std::size_t i = 0; i < rows; ++i) {
        if (sys.tags[i].kind == RowKind::cauchy && i < cols) {
            // diagonal of the unscaled K - I
            complex_of<R> diag = sys.unscaled_matrix(i, i);
            if (sqrt(sqabs<R>(diag)) < pow10<R>(3 - sys.precision_digits)) {
                ++sys.diagonal_scaling_skips;
                continue;
            }
            complex_of<R> scaled_diag = sys.matrix(i, i);
            for (std::size_t r = 0; r < cols; ++r)
                sys.matrix(i, r) /= scaled_diag;
        } else {
            R sup(0);
            for (std::size_t r = 0; r < cols; ++r)
                sup = std::max(sup, sqabs<R>(sys.matrix(i, r)));
            sup = sqrt(sup);
            if (sup > 0)
                for (std::size_t r = 0; r < cols; ++r)
                    sys.matrix(i, r) /= sup;
        }
    }
    sys.diagonally_scaled = true;
    return sys;
}

template <class R>
RelationSystem<R> unscale_system(RelationSystem<R> sys) {
    if (!sys.scaled)
        throw std::invalid_argument("unscale_system: system is not scaled");
    sys.matrix = sys.unscaled_matrix;
    sys.unscaled_matrix = Matrix<complex_of<R>>();
    sys.scaled = false;
    sys.diagonally_scaled = false;
    return sys;
}

// Map a solution of the scaled system back to the coefficients b_n.
template <class R>
std::vector<complex_of<R>> unscale_solution(const std::vector<complex_of<R>>& bprime,
                                            const R& radius) {
    std::vector<complex_of<R>> b(bprime.size());
    R p(1);
    for (std::size_t n = 0; n < bprime.size(); ++n) {
        b[n] = bprime[n] / p;
        p *= radius;
    }
    return b;
}

} // namespace psmf

#endif
