#ifndef PSMF_LINALG_HPP
#define PSMF_LINALG_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "psmf/numeric.hpp"

namespace psmf {

// Dense row-major matrix over an arbitrary scalar.
template <class T>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T())
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T(1);
        return m;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

template <class R>
struct SvdResult {
    Matrix<complex_of<R>> U; // M x K, orthonormal columns
    std::vector<R> S;        // K singular values, descending
    Matrix<complex_of<R>> V; // K x K unitary
};

// One-sided Jacobi SVD: unitary 2x2 rotations orthogonalize column pairs of
// a working copy of A; the right factor is accumulated in V.  Chosen for its
// high relative accuracy on the smallest singular values, which is what
// kernel extraction lives on.
template <class R>
SvdResult<R> svd(const Matrix<complex_of<R>>& A) {
    using Cx = complex_of<R>;
    using std::abs;
    using std::sqrt;
    const std::size_t m = A.rows(), n = A.cols();
    if (m < n || n < 1)
        throw std::invalid_argument("svd: need rows >= cols >= 1");

    Matrix<Cx> W = A;
    Matrix<Cx> V = Matrix<Cx>::identity(n);
    const R eps = std::numeric_limits<R>::epsilon();
    const R conv = eps * sqrt(R(double(m)));
    const int max_sweeps = 60;

    std::vector<R> colnorm2(n, R(0));
    auto recompute_norm = [&](std::size_t j) {
        R s(0);
        for (std::size_t i = 0; i < m; ++i)
            s += sqabs<R>(W(i, j));
        colnorm2[j] = s;
    };
    for (std::size_t j = 0; j < n; ++j)
        recompute_norm(j);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                R app = colnorm2[p], aqq = colnorm2[q];
                if (app == 0 && aqq == 0)
                    continue;
                Cx apq(R(0), R(0));
                for (std::size_t i = 0; i < m; ++i)
                    apq += conj(W(i, p)) * W(i, q);
                R mag = sqrt(sqabs<R>(apq));
                if (mag <= conv * sqrt(app * aqq) || mag == 0)
                    continue;
                rotated = true;
                // phase so the coupling becomes real, then a real rotation
                Cx phase = apq / mag;
                R tau = (aqq - app) / (2 * mag);
                R t = (tau >= 0 ? R(1) : R(-1)) / (abs(tau) + sqrt(1 + tau * tau));
                R cs = 1 / sqrt(1 + t * t);
                R sn = cs * t;
                Cx phc = conj(phase);
                for (std::size_t i = 0; i < m; ++i) {
                    Cx wp = W(i, p), wq = W(i, q);
                    W(i, p) = wp * cs - wq * phc * sn;
                    W(i, q) = wp * phase * sn + wq * cs;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    Cx vp = V(i, p), vq = V(i, q);
                    V(i, p) = vp * cs - vq * phc * sn;
                    V(i, q) = vp * phase * sn + vq * cs;
                }
                recompute_norm(p);
                recompute_norm(q);
            }
        }
        if (!rotated)
            break;
        if (sweep == max_sweeps - 1)
            throw std::runtime_error("svd: Jacobi sweeps did not converge");
    }

    SvdResult<R> out;
    out.S.assign(n, R(0));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::vector<R> norms(n);
    for (std::size_t j = 0; j < n; ++j)
        norms[j] = sqrt(colnorm2[j]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    out.U = Matrix<Cx>(m, n);
    out.V = Matrix<Cx>(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t j = order[k];
        out.S[k] = norms[j];
        for (std::size_t i = 0; i < n; ++i)
            out.V(i, k) = V(i, j);
        if (norms[j] > 0)
            for (std::size_t i = 0; i < m; ++i)
                out.U(i, k) = W(i, j) / norms[j];
    }
    return out;
}

// LU with partial pivoting on a square system; throws on numerically
// singular input, carrying the pivot-ratio condition estimate.
template <class R>
std::vector<complex_of<R>> lu_solve(Matrix<complex_of<R>> A, std::vector<complex_of<R>> b,
                                    const Precision& prec) {
    using Cx = complex_of<R>;
    using std::sqrt;
    const std::size_t n = A.rows();
    if (A.cols() != n || b.size() != n)
        throw std::invalid_argument("lu_solve: need a square system");
    R pmax(0), pmin(0);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        R best = sqabs<R>(A(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            R cand = sqabs<R>(A(r, col));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        R pabs = sqrt(best);
        if (col == 0)
            pmax = pmin = pabs;
        pmax = std::max(pmax, pabs);
        pmin = std::min(pmin, pabs);
        if (pabs == 0 || (pmax > 0 && pabs / pmax < tol10<R>(prec, 2))) {
            std::ostringstream os;
            os << "lu_solve: matrix numerically rank deficient (pivot ratio "
               << to_decimal_string(R(pabs / pmax)) << ")";
            throw std::runtime_error(os.str());
        }
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(A(col, j), A(piv, j));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            Cx f = A(r, col) / A(col, col);
            if (f == Cx(R(0), R(0)))
                continue;
            for (std::size_t j = col; j < n; ++j)
                A(r, j) -= f * A(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<Cx> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Cx s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j)
            s -= A(ii, j) * x[j];
        x[ii] = s / A(ii, ii);
    }
    return x;
}

// Least squares via LU: direct solve when square, normal equations
// otherwise.
template <class R>
std::vector<complex_of<R>> lu_least_squares(const Matrix<complex_of<R>>& A,
                                            const std::vector<complex_of<R>>& rhs,
                                            const Precision& prec) {
    using Cx = complex_of<R>;
    const std::size_t m = A.rows(), n = A.cols();
    if (rhs.size() != m)
        throw std::invalid_argument("lu_least_squares: rhs length mismatch");
    if (m < n)
        throw std::invalid_argument("lu_least_squares: underdetermined system");
    if (m == n)
        return lu_solve<R>(A, rhs, prec);
    Matrix<Cx> G(n, n);
    std::vector<Cx> g(n, Cx(R(0), R(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Cx s(R(0), R(0));
            for (std::size_t k = 0; k < m; ++k)
                s += conj(A(k, i)) * A(k, j);
            G(i, j) = s;
        }
        for (std::size_t k = 0; k < m; ++k)
            g[i] += conj(A(k, i)) * rhs[k];
    }
    return lu_solve<R>(G, g, prec);
}

struct KernelOptions {
    std::optional<int> expected_dim;
    std::optional<double> threshold_floor_exponent; // overrides 10^(6-digits)
};

template <class R>
struct KernelResult {
    std::vector<std::vector<complex_of<R>>> basis; // unit right singular vectors
    std::vector<R> singular_values;                // descending
    R kernel_threshold{};
    int dimension = 0;
    R quality_ratio{}; // sigma(smallest kept) / sigma(largest dropped)
    bool dimension_mismatch = false;
};

// Numerical kernel via the SVD: singular values below
// max(1e3 * roundoff * sigma_max, floor) span the kernel.  A mismatch with
// the caller's expected dimension is flagged, never truncated.
template <class R>
KernelResult<R> numerical_kernel(const Matrix<complex_of<R>>& A, const Precision& prec,
                                 const KernelOptions& opt = {}) {
    auto fact = svd<R>(A);
    const std::size_t n = A.cols();
    R sigma_max = fact.S.empty() ? R(0) : fact.S.front();
    if (sigma_max == 0)
        throw std::domain_error("numerical_kernel: zero matrix is degenerate input");
    R floor_exp = opt.threshold_floor_exponent
                      ? pow10<R>(int(*opt.threshold_floor_exponent))
                      : tol10<R>(prec, 6);
    R u = std::numeric_limits<R>::epsilon();
    KernelResult<R> out;
    out.singular_values = fact.S;
    out.kernel_threshold = std::max(R(1000) * u * sigma_max, floor_exp);

    for (std::size_t k = 0; k < n; ++k) {
        if (fact.S[k] < out.kernel_threshold) {
            ++out.dimension;
            std::vector<complex_of<R>> v(n);
            for (std::size_t i = 0; i < n; ++i)
                v[i] = fact.V(i, k);
            out.basis.push_back(std::move(v));
        }
    }
    if (out.dimension > 0 && out.dimension < int(n)) {
        R kept = fact.S[n - std::size_t(out.dimension) - 1];
        R dropped = fact.S[n - std::size_t(out.dimension)];
        out.quality_ratio = dropped > 0 ? kept / dropped : R(0);
    }
    if (opt.expected_dim && *opt.expected_dim != out.dimension)
        out.dimension_mismatch = true;
    return out;
}

} // namespace psmf

#endif
