#include <catch2/catch_amalgamated.hpp>

#include "psmf/linalg.hpp"
#include "support.hpp"

#include <complex>

using namespace psmf;
using Cx = std::complex<double>;

namespace {

Matrix<Cx> random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
    testsupport::SplitMix64 rng(seed);
    Matrix<Cx> A(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            A(i, j) = Cx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return A;
}

double frob(const Matrix<Cx>& A) {
    double s = 0;
    for (const auto& x : A.data())
        s += std::norm(x);
    return std::sqrt(s);
}

} // namespace

TEST_CASE("svd of a diagonal matrix") {
    Matrix<Cx> A(2, 2);
    A(0, 0) = 3;
    A(1, 1) = 1;
    auto f = svd<double>(A);
    CHECK(f.S[0] == Catch::Approx(3.0));
    CHECK(f.S[1] == Catch::Approx(1.0));
    CHECK(std::abs(std::abs(f.U(0, 0)) - 1) < 1e-14);
    CHECK(std::abs(std::abs(f.V(1, 1)) - 1) < 1e-14);
}

TEST_CASE("svd of a rank-1 matrix finds the kernel direction") {
    Matrix<Cx> A(2, 2);
    A(0, 0) = 1;
    A(0, 1) = -1;
    A(1, 0) = 2;
    A(1, 1) = -2;
    auto f = svd<double>(A);
    CHECK(f.S[0] == Catch::Approx(std::sqrt(10.0)));
    CHECK(f.S[1] < 1e-15 * 10);
    // kernel vector (1, 1)/sqrt2 up to phase
    Cx ratio = f.V(1, 1) / f.V(0, 1);
    CHECK(std::abs(ratio - Cx(1, 0)) < 1e-13);
}

TEST_CASE("svd reconstruction and unitarity on random matrices") {
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{12, 12}, {20, 9}, {50, 50}}) {
        auto A = random_matrix(m, n, 1000 + m * n);
        auto f = svd<double>(A);
        // descending
        for (std::size_t k = 0; k + 1 < n; ++k)
            CHECK(f.S[k] >= f.S[k + 1]);
        // columnwise unitarity of U and V
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                Cx uu(0), vv(0);
                for (std::size_t i = 0; i < m; ++i)
                    uu += std::conj(f.U(i, a)) * f.U(i, b);
                for (std::size_t i = 0; i < n; ++i)
                    vv += std::conj(f.V(i, a)) * f.V(i, b);
                double target = a == b ? 1.0 : 0.0;
                CHECK(std::abs(uu - Cx(target, 0)) < 1e-11);
                CHECK(std::abs(vv - Cx(target, 0)) < 1e-11);
            }
        // reconstruction ||A - U S V*||_F
        Matrix<Cx> rec(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Cx s(0);
                for (std::size_t k = 0; k < n; ++k)
                    s += f.U(i, k) * f.S[k] * std::conj(f.V(j, k));
                rec(i, j) = A(i, j) - s;
            }
        CHECK(frob(rec) <= double(n) * 1e-13 * frob(A));
    }
}

TEST_CASE("svd: singular values of A and A* coincide") {
    auto A = random_matrix(17, 17, 99);
    Matrix<Cx> At(17, 17);
    for (std::size_t i = 0; i < 17; ++i)
        for (std::size_t j = 0; j < 17; ++j)
            At(i, j) = std::conj(A(j, i));
    auto f1 = svd<double>(A);
    auto f2 = svd<double>(At);
    for (std::size_t k = 0; k < 17; ++k)
        CHECK(f1.S[k] == Catch::Approx(f2.S[k]).margin(1e-11));
}

TEST_CASE("planted kernel vector is recovered") {
    const std::size_t n = 50;
    testsupport::SplitMix64 rng(4);
    std::vector<Cx> v(n);
    double nv = 0;
    for (auto& x : v) {
        x = Cx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        nv += std::norm(x);
    }
    nv = std::sqrt(nv);
    for (auto& x : v)
        x /= nv;
    auto B = random_matrix(n, n, 123);
    // A = B (I - v v*)
    Matrix<Cx> P = Matrix<Cx>::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            P(i, j) -= v[i] * std::conj(v[j]);
    Matrix<Cx> A(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Cx s(0);
            for (std::size_t k = 0; k < n; ++k)
                s += B(i, k) * P(k, j);
            A(i, j) = s;
        }
    auto f = svd<double>(A);
    CHECK(f.S[n - 1] <= 1e-12 * f.S[0]);
    // angle between V's last column and v
    Cx ip(0);
    for (std::size_t i = 0; i < n; ++i)
        ip += std::conj(f.V(i, n - 1)) * v[i];
    CHECK(std::abs(ip) > 1 - 1e-10);

    auto ker = numerical_kernel<double>(A, Precision(15));
    CHECK(ker.dimension == 1);
    CHECK(ker.quality_ratio > 1e6);
}

TEST_CASE("lu solve and least squares") {
    Precision prec(15);
    Matrix<Cx> I3 = Matrix<Cx>::identity(3);
    auto x = lu_least_squares<double>(I3, {Cx(1), Cx(0), Cx(0)}, prec);
    CHECK(std::abs(x[0] - Cx(1, 0)) < 1e-15);
    CHECK(std::abs(x[1]) < 1e-15);

    // 5x5 Vandermonde at distinct nodes recovers polynomial coefficients
    std::vector<double> nodes = {-1.0, -0.4, 0.1, 0.6, 1.2};
    std::vector<Cx> coeff = {Cx(2, 1), Cx(-1, 0), Cx(0.5, -2), Cx(0, 1), Cx(3, 0)};
    Matrix<Cx> V(5, 5);
    std::vector<Cx> rhs(5, Cx(0));
    for (std::size_t i = 0; i < 5; ++i) {
        Cx p(1);
        for (std::size_t j = 0; j < 5; ++j) {
            V(i, j) = p;
            rhs[i] += coeff[j] * p;
            p *= nodes[i];
        }
    }
    auto sol = lu_least_squares<double>(V, rhs, prec);
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(std::abs(sol[j] - coeff[j]) < 1e-11);

    // overdetermined consistent system
    Matrix<Cx> A(6, 2);
    std::vector<Cx> b(6);
    testsupport::SplitMix64 rng(9);
    for (std::size_t i = 0; i < 6; ++i) {
        A(i, 0) = Cx(rng.uniform(-1, 1), 0);
        A(i, 1) = Cx(0, rng.uniform(-1, 1));
        b[i] = A(i, 0) * Cx(2, -1) + A(i, 1) * Cx(-3, 4);
    }
    auto ls = lu_least_squares<double>(A, b, prec);
    CHECK(std::abs(ls[0] - Cx(2, -1)) < 1e-12);
    CHECK(std::abs(ls[1] - Cx(-3, 4)) < 1e-12);

    // rank deficiency carries a condition estimate
    Matrix<Cx> D(2, 2);
    D(0, 0) = 1;
    D(1, 1) = 1e-15;
    CHECK_THROWS_WITH(lu_solve<double>(D, {Cx(1), Cx(1)}, prec),
                      Catch::Matchers::ContainsSubstring("rank deficient"));
}

TEST_CASE("numerical kernel flags and errors") {
    Precision prec(15);
    Matrix<Cx> Z(3, 3);
    CHECK_THROWS_AS(numerical_kernel<double>(Z, prec), std::domain_error);

    // planted two-dimensional kernel
    const std::size_t n = 20;
    auto B = random_matrix(n, n, 31);
    Matrix<Cx> A(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            A(i, j) = j < 2 ? Cx(0) : B(i, j);
    auto ker = numerical_kernel<double>(A, prec);
    CHECK(ker.dimension == 2);
    // orthonormal basis
    Cx ip(0);
    for (std::size_t i = 0; i < n; ++i)
        ip += std::conj(ker.basis[0][i]) * ker.basis[1][i];
    CHECK(std::abs(ip) < 1e-10);

    KernelOptions opt;
    opt.expected_dim = 1;
    auto flagged = numerical_kernel<double>(A, prec, opt);
    CHECK(flagged.dimension == 2);
    CHECK(flagged.dimension_mismatch);
}

#ifndef PSMF_NO_EXTENDED
TEST_CASE("svd at 30 digits keeps tiny singular values accurate") {
    using Cx30 = complex30;
    const std::size_t n = 8;
    Matrix<Cx30> A(n, n);
    // diag(1, 1e-5, 1e-10, ..., 1e-35) mixed by a unitary-ish rotation is
    // overkill; the diagonal case already probes relative accuracy
    for (std::size_t i = 0; i < n; ++i)
        A(i, i) = Cx30(pow10<real30>(-5 * int(i)), real30(0));
    auto f = svd<real30>(A);
    for (std::size_t i = 0; i < n; ++i) {
        using std::abs;
        CHECK(abs(f.S[i] - pow10<real30>(-5 * int(i))) < pow10<real30>(-5 * int(i) - 25));
    }
}
#endif
