#include <catch2/catch_amalgamated.hpp>

#include "psmf/normalize.hpp"
#include "psmf/relations.hpp"
#include "support.hpp"

#include <cstring>

using namespace psmf;
using namespace testsupport;
using Cx = std::complex<double>;

namespace {

struct Disc6Fixture {
    FuchsianGroup<double> G = disc6_group<double>();
    DirichletDomain<double> D = disc6_domain(G);
};

// kernel coefficients of the weight-4 form, b_0 normalized to 1
std::vector<Cx> solve_disc6(const Disc6Fixture& fx, int N, int Q, bool simpson = true) {
    auto prob = make_problem<double>(fx.G, fx.D, 4, N, Q);
    auto sys = simpson ? cauchy_matrix_simpson(prob) : cauchy_matrix_riemann(prob);
    auto scaled = scale_system(homogeneous(std::move(sys)), prob.radius);
    auto ker = numerical_kernel<double>(scaled.matrix, prob.prec);
    REQUIRE(ker.dimension == 1);
    auto b = unscale_solution(ker.basis[0], prob.radius);
    Cx b0 = b[0];
    for (auto& x : b)
        x /= b0;
    return b;
}

} // namespace

TEST_CASE("trivial group: quadrature operators equal the identity") {
    auto G = trivial_group<double>();
    DomainOptions<double> opt;
    opt.require_cocompact = false;
    auto D = compute_dirichlet_domain(G, 2, opt);

    const int N = 8;
    auto prob = make_problem<double>(G, D, 4, N, 20, std::optional<double>(0.5));
    for (bool simpson : {false, true}) {
        auto sys = simpson ? cauchy_matrix_simpson(prob) : cauchy_matrix_riemann(prob);
        REQUIRE(sys.operator_form);
        for (int n = 0; n <= N; ++n)
            for (int r = 0; r <= N; ++r) {
                Cx want = n == r ? Cx(1) : Cx(0);
                CHECK(std::abs(sys.matrix(std::size_t(n), std::size_t(r)) - want) < 1e-12);
            }
    }
}

TEST_CASE("trivial group: automorphy rows vanish identically") {
    auto G = trivial_group<double>();
    DomainOptions<double> opt;
    opt.require_cocompact = false;
    auto D = compute_dirichlet_domain(G, 2, opt);
    auto prob = make_problem<double>(G, D, 2, 6, 16, std::optional<double>(0.7));
    SplitMix64 rng(3);
    for (int k = 0; k < 20; ++k) {
        double t = rng.uniform(0, 6.28);
        DiscPoint<double> w(Cx(0.6 * std::cos(t), 0.6 * std::sin(t)));
        for (const auto& e : automorphy_row(prob, w))
            CHECK(e == Cx(0));
    }
}

TEST_CASE("disc-6: kernel coefficients match the known expansion") {
    Disc6Fixture fx;
    auto b = solve_disc6(fx, 35, 70);
    auto exact = disc6_exact_b<double>();
    const double rho = fx.D.rho();
    double worst = 0;
    double rp = 1;
    for (std::size_t n = 0; n < exact.size(); ++n) {
        worst = std::max(worst, rp * std::abs(b[n] - exact[n]));
        rp *= rho;
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("disc-6: automorphy rows annihilate the coefficients") {
    // N = 40 keeps the truncation tail of the relation below the 1e-10 bar
    Disc6Fixture fx;
    auto b = solve_disc6(fx, 40, 80);
    auto prob = make_problem<double>(fx.G, fx.D, 4, 40, 80);

    double bnorm = 0, rp = 1;
    for (auto& x : b) {
        bnorm += std::norm(x) * rp * rp;
        rp *= fx.D.rho();
    }
    bnorm = std::sqrt(bnorm);

    SplitMix64 rng(17);
    int used = 0;
    while (used < 25) {
        double t = rng.uniform(0, 6.283185307179586);
        DiscPoint<double> w(Cx(fx.D.rho() * std::cos(t), fx.D.rho() * std::sin(t)));
        auto row = automorphy_row(prob, w);
        bool zero = true;
        for (auto& e : row)
            if (e != Cx(0))
                zero = false;
        if (zero)
            continue;
        ++used;
        Cx resid(0);
        for (std::size_t n = 0; n < row.size(); ++n)
            resid += row[n] * b[n];
        CHECK(std::abs(resid) < 1e-10 * bnorm);
    }

    // a corrupted coefficient is detected
    auto bad = b;
    bad[5] += 1e-3;
    ExpansionResult<double> res_ok, res_bad;
    res_ok.b = b;
    res_bad.b = bad;
    CHECK(verify_automorphy(res_ok, prob, 30) < 1e-10);
    CHECK(verify_automorphy(res_bad, prob, 30) > 1e-6);
}

TEST_CASE("disc-6: simpson at least as accurate as riemann, and refinement-consistent") {
    Disc6Fixture fx;
    const int N = 35;
    auto prob = make_problem<double>(fx.G, fx.D, 4, N, 2 * N);
    auto b = solve_disc6(fx, N, 2 * N);
    const double rho = fx.D.rho();

    // residuals live in the rho^n-scaled metric; anything else is dominated
    // by the rho^-n growth of the high rows
    auto apply_err = [&](const RelationSystem<double>& sys) {
        double worst = 0, rp = 1;
        for (std::size_t n = 0; n < sys.matrix.rows(); ++n) {
            Cx acc(0);
            for (std::size_t r = 0; r < sys.matrix.cols(); ++r)
                acc += sys.matrix(n, r) * b[r];
            worst = std::max(worst, rp * std::abs(acc - b[n]));
            rp *= rho;
        }
        return worst;
    };
    auto simpson = cauchy_matrix_simpson(prob);
    auto riemann = cauchy_matrix_riemann(prob);
    double es = apply_err(simpson);
    double er = apply_err(riemann);
    // equal point budget: Simpson must not lose beyond truncation noise
    CHECK(es <= er + 1e-10);
    CHECK(es < 1e-9);

    // Q -> 4Q refinement: the two quadratures act identically on the
    // coefficient vector up to quadrature error
    auto prob4 = make_problem<double>(fx.G, fx.D, 4, N, 8 * N);
    auto riemann4 = cauchy_matrix_riemann(prob4);
    double gap = 0, rp = 1;
    for (std::size_t n = 0; n <= std::size_t(N); ++n) {
        Cx a1(0), a2(0);
        for (std::size_t r = 0; r <= std::size_t(N); ++r) {
            a1 += simpson.matrix(n, r) * b[r];
            a2 += riemann4.matrix(n, r) * b[r];
        }
        gap = std::max(gap, rp * std::abs(a1 - a2));
        rp *= rho;
    }
    CHECK(gap < 1e-8);
}

TEST_CASE("scaling: exact unscale, diagonal dominance, hecke row normalization") {
    Disc6Fixture fx;
    auto prob = make_problem<double>(fx.G, fx.D, 4, 35, 70);
    auto hom = homogeneous(cauchy_matrix_simpson(prob));
    auto hom_copy = hom;
    auto scaled = scale_system(hom, prob.radius);
    CHECK(scaled.scaled);
    CHECK(scaled.diagonally_scaled);
    CHECK(scaled.diagonal_scaling_skips == 0);

    auto back = unscale_system(scaled);
    REQUIRE(back.matrix.rows() == hom_copy.matrix.rows());
    CHECK(std::memcmp(back.matrix.data().data(), hom_copy.matrix.data().data(),
                      sizeof(Cx) * back.matrix.data().size()) == 0);

    // diagonal dominance after scaling: diagonals are normalized to 1, the
    // overwhelming majority of rows peak there, and nothing runs away
    // (measured: 35 of 36 rows peak on the diagonal, worst off-diagonal 1.055)
    std::size_t rows_peaking_on_diag = 0;
    double global_max = 0;
    for (std::size_t n = 0; n < scaled.matrix.rows(); ++n) {
        double diag = std::abs(scaled.matrix(n, n));
        CHECK(diag == Catch::Approx(1.0).margin(1e-12));
        double rowmax = 0;
        for (std::size_t r = 0; r < scaled.matrix.cols(); ++r)
            rowmax = std::max(rowmax, std::abs(scaled.matrix(n, r)));
        if (rowmax <= diag * (1 + 1e-12))
            ++rows_peaking_on_diag;
        global_max = std::max(global_max, rowmax);
    }
    CHECK(rows_peaking_on_diag * 10 >= scaled.matrix.rows() * 9);
    CHECK(global_max < 1.1);
}

TEST_CASE("identity coset list gives the tautological hecke row") {
    Disc6Fixture fx;
    auto prob = make_problem<double>(fx.G, fx.D, 4, 10, 20);
    std::vector<Mat2<double>> cosets = {Mat2<double>::identity()};
    auto row = hecke_row(prob, cosets, Cx(1));
    // K^h_n = delta_n0, minus a_p at n = 0: identically zero
    for (const auto& e : row)
        CHECK(std::abs(e) < 1e-14);
}

TEST_CASE("assembly is deterministic") {
    Disc6Fixture fx;
    auto prob = make_problem<double>(fx.G, fx.D, 4, 12, 24);
    auto a1 = cauchy_matrix_simpson(prob);
    auto a2 = cauchy_matrix_simpson(prob);
    REQUIRE(a1.matrix.data().size() == a2.matrix.data().size());
    CHECK(std::memcmp(a1.matrix.data().data(), a2.matrix.data().data(),
                      sizeof(Cx) * a1.matrix.data().size()) == 0);
}

TEST_CASE("kernel stability under quadrature refinement") {
    // the scaled kernel vectors (what the solver actually extracts) agree in
    // angle under Q -> 2Q
    Disc6Fixture fx;
    auto kernel_vec = [&](int Q) {
        auto prob = make_problem<double>(fx.G, fx.D, 4, 35, Q);
        auto scaled = scale_system(homogeneous(cauchy_matrix_simpson(prob)), prob.radius);
        auto ker = numerical_kernel<double>(scaled.matrix, prob.prec);
        REQUIRE(ker.dimension == 1);
        return ker.basis[0];
    };
    auto v1 = kernel_vec(70);
    auto v2 = kernel_vec(140);
    Cx ip(0);
    for (std::size_t i = 0; i < v1.size(); ++i)
        ip += std::conj(v1[i]) * v2[i];
    CHECK(1 - std::abs(ip) < 1e-8); // both unit vectors
}

TEST_CASE("kernel quality of the disc-6 system") {
    Disc6Fixture fx;
    auto prob = make_problem<double>(fx.G, fx.D, 4, 35, 70);
    auto scaled = scale_system(homogeneous(cauchy_matrix_simpson(prob)), prob.radius);
    KernelOptions opt;
    opt.expected_dim = 1;
    auto ker = numerical_kernel<double>(scaled.matrix, prob.prec, opt);
    CHECK(ker.dimension == 1);
    CHECK_FALSE(ker.dimension_mismatch);
    CHECK(ker.quality_ratio >= 1e6);

    // lu dehomogenization (b_0 = 1) agrees with the svd kernel vector
    const std::size_t n = scaled.matrix.cols();
    Matrix<Cx> A(scaled.matrix.rows(), n - 1);
    std::vector<Cx> rhs(scaled.matrix.rows());
    for (std::size_t i = 0; i < scaled.matrix.rows(); ++i) {
        rhs[i] = -scaled.matrix(i, 0);
        for (std::size_t j = 1; j < n; ++j)
            A(i, j - 1) = scaled.matrix(i, j);
    }
    auto x = lu_least_squares<double>(A, rhs, prob.prec);
    auto v = ker.basis[0];
    for (std::size_t j = 1; j < n; ++j)
        CHECK(std::abs(x[j - 1] - v[j] / v[0]) < 1e-10 * (1.0 + std::abs(v[j] / v[0])));
}
