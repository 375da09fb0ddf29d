#ifndef PSMF_EXACT_MATRIX_HPP
#define PSMF_EXACT_MATRIX_HPP

#include <stdexcept>
#include <string>
#include <tuple>

#include "psmf/hyperbolic.hpp"
#include "psmf/quadratic_field.hpp"

namespace psmf {

// Exact 2x2 matrix over Q(sqrt(d)) with determinant 1, together with the
// chosen real embedding of sqrt(d).  Group elements stay exact through all
// products; the numeric image is recomputed on demand.
class ExactMatrix2 {
  public:
    QuadExt a, b, c, d;
    int embedding_sign = +1;

    ExactMatrix2() : a(1), b(0), c(0), d(1) {}

    ExactMatrix2(QuadExt aa, QuadExt bb, QuadExt cc, QuadExt dd, int emb = +1)
        : a(std::move(aa)), b(std::move(bb)), c(std::move(cc)), d(std::move(dd)), embedding_sign(emb) {
        if (emb != 1 && emb != -1)
            throw std::domain_error("ExactMatrix2: embedding sign must be +1 or -1");
        QuadExt det = a * d - b * c;
        if (!(det == QuadExt(1)))
            throw std::domain_error("ExactMatrix2: determinant must be exactly 1, got " + det.str());
    }

    static ExactMatrix2 identity() { return ExactMatrix2(); }

    bool is_identity() const {
        ExactMatrix2 g = canonical();
        return g.a == QuadExt(1) && g.b == QuadExt(0) && g.c == QuadExt(0) && g.d == QuadExt(1);
    }

    ExactMatrix2 operator*(const ExactMatrix2& o) const {
        if (embedding_sign != o.embedding_sign)
            throw std::domain_error("ExactMatrix2: mixing embeddings");
        return ExactMatrix2(a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
                            c * o.b + d * o.d, embedding_sign);
    }

    ExactMatrix2 inverse() const { return ExactMatrix2(d, -b, -c, a, embedding_sign); }

    // Representative of {+g, -g} with positive embedded trace, falling back
    // to the first nonzero entry.  Used for dedup keys and stable output.
    ExactMatrix2 canonical() const {
        QuadExt tr = a + d;
        int s = tr.is_zero() ? 0 : tr.sign_embedded(embedding_sign);
        if (s == 0) {
            for (const QuadExt* e : {&a, &b, &c, &d}) {
                if (!e->is_zero()) {
                    s = e->sign_embedded(embedding_sign);
                    break;
                }
            }
        }
        if (s >= 0)
            return *this;
        return ExactMatrix2(-a, -b, -c, -d, embedding_sign);
    }

    bool operator==(const ExactMatrix2& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d && embedding_sign == o.embedding_sign;
    }

    bool operator<(const ExactMatrix2& o) const {
        return std::tie(embedding_sign, a, b, c, d) < std::tie(o.embedding_sign, o.a, o.b, o.c, o.d);
    }

    template <class R>
    Mat2<R> numeric() const {
        return Mat2<R>(a.to_real<R>(embedding_sign), b.to_real<R>(embedding_sign),
                       c.to_real<R>(embedding_sign), d.to_real<R>(embedding_sign));
    }

    std::string str() const {
        return "[" + a.str() + ", " + b.str() + "; " + c.str() + ", " + d.str() + "]";
    }
};

} // namespace psmf

#endif
