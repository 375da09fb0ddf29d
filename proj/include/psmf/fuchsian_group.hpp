#ifndef PSMF_FUCHSIAN_GROUP_HPP
#define PSMF_FUCHSIAN_GROUP_HPP

#include <set>
#include <stdexcept>
#include <vector>

#include "psmf/exact_matrix.hpp"
#include "psmf/hyperbolic.hpp"

namespace psmf {

// Disc-model Moebius coefficients of a half-plane isometry read through the
// chart centered at p:  w -> (A w + B) / (conj(B) w + conj(A)),
// |A|^2 - |B|^2 = 1.  Cached because reduction applies these millions of
// times.
template <class R>
struct DiscIsometry {
    complex_of<R> A, B;

    complex_of<R> apply(const complex_of<R>& w) const {
        return (A * w + B) / (conj(B) * w + conj(A));
    }
    complex_of<R> origin_image() const { return B / conj(A); }
};

template <class R>
DiscIsometry<R> disc_isometry(const Mat2<R>& g, const HalfPlanePoint<R>& p) {
    const complex_of<R> pc = p.z;
    const complex_of<R> pbar = conj(pc);
    const complex_of<R> two_i_y(R(0), 2 * p.im());
    complex_of<R> a(g.a, R(0)), b(g.b, R(0)), c(g.c, R(0)), d(g.d, R(0));
    DiscIsometry<R> out;
    out.A = (-a * pbar + pc * pbar * c - b + pc * d) / two_i_y;
    out.B = (a * pc - pc * pc * c + b - pc * d) / two_i_y;
    return out;
}

// Exact Fuchsian group data: generators (augmented with inverses, one
// canonical representative per sign class) plus the expansion center and a
// numeric cache of the embedded generators.
template <class R>
class FuchsianGroup {
  public:
    std::vector<ExactMatrix2> generators;
    std::vector<Mat2<R>> generators_numeric;
    HalfPlanePoint<R> center;
    Precision prec;

    FuchsianGroup(const std::vector<ExactMatrix2>& gens, HalfPlanePoint<R> p, Precision precision)
        : center(std::move(p)), prec(precision) {
        std::set<ExactMatrix2> seen;
        auto add = [&](const ExactMatrix2& g) {
            ExactMatrix2 cg = g.canonical();
            if (cg.is_identity())
                return;
            if (seen.insert(cg).second)
                generators.push_back(cg);
        };
        for (const auto& g : gens) {
            add(g);
            add(g.inverse());
        }
        generators_numeric.reserve(generators.size());
        const R tol = tol10<R>(prec, 6);
        for (const auto& g : generators) {
            Mat2<R> m = g.template numeric<R>();
            using std::abs;
            if (abs(m.det() - 1) > tol10<R>(prec, 3))
                throw std::domain_error("FuchsianGroup: embedded generator determinant drifts from 1");
            auto [gp, j] = act_half_plane(m, center);
            (void)j;
            if (hyp_distance(gp, center) <= 10 * tol)
                throw std::domain_error("FuchsianGroup: center is fixed by generator " + g.str());
            generators_numeric.push_back(m);
        }
    }

    bool trivial() const { return generators.empty(); }
    std::size_t size() const { return generators.size(); }
};

} // namespace psmf

#endif
