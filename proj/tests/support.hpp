#ifndef PSMF_TESTS_SUPPORT_HPP
#define PSMF_TESTS_SUPPORT_HPP

// Shared fixtures: the discriminant-6 quaternion group (the workhorse
// cocompact example) and the level-11 classical group.

#include <cstdint>
#include <vector>

#include "psmf/dirichlet.hpp"
#include "psmf/fuchsian_group.hpp"
#include "psmf/normalize.hpp"
#include "psmf/quaternion.hpp"

namespace testsupport {

using namespace psmf;

inline QuaternionAlgebraQ disc6_algebra() { return QuaternionAlgebraQ(3, -1); }

inline OrderQ disc6_order() {
    OrderQ o;
    o.basis[0] = QuaternionElement::one();
    o.basis[1] = QuaternionElement::alpha();
    o.basis[2] = QuaternionElement::beta();
    o.basis[3] = QuaternionElement(Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(1, 2));
    return o;
}

template <class R>
HalfPlanePoint<R> disc6_center() {
    using std::sqrt;
    R im = (sqrt(R(6)) - sqrt(R(2))) / 2;
    return HalfPlanePoint<R>(complex_of<R>(R(0), im));
}

template <class R>
FuchsianGroup<R> disc6_group(int unit_height = 3) {
    auto alg = disc6_algebra();
    auto units = enumerate_norm_one_units(disc6_order(), alg, unit_height);
    std::vector<ExactMatrix2> gens;
    for (const auto& u : units)
        gens.push_back(embed_unit(u, alg));
    return FuchsianGroup<R>(gens, disc6_center<R>(), Precision(real_traits<R>::digits10));
}

template <class R>
DirichletDomain<R> disc6_domain(const FuchsianGroup<R>& G, bool check_signature = true) {
    DomainOptions<R> opt;
    opt.require_cocompact = true;
    if (check_signature)
        opt.signature = std::make_pair(0, std::vector<int>{2, 2, 3, 3});
    return compute_dirichlet_domain(G, 4, opt);
}

inline std::vector<ExactMatrix2> gamma0_11_generators() {
    auto m = [](long long a, long long b, long long c, long long d) {
        return ExactMatrix2(QuadExt(a), QuadExt(b), QuadExt(c), QuadExt(d));
    };
    return {m(1, 1, 0, 1), m(-2, -1, 11, 5), m(4, 1, 11, 3), m(3, 1, 11, 4)};
}

// Heegner point (-9 + sqrt(-7))/22
template <class R>
HalfPlanePoint<R> gamma0_11_center() {
    using std::sqrt;
    return HalfPlanePoint<R>(complex_of<R>(R(-9) / 22, sqrt(R(7)) / 22));
}

template <class R>
FuchsianGroup<R> trivial_group() {
    return FuchsianGroup<R>({}, HalfPlanePoint<R>(complex_of<R>(R(0), R(1))),
                            Precision(real_traits<R>::digits10));
}

// Exact normalized coefficients of the weight-4 generator on the disc-6
// group (b_0 = 1): even entries 12 r_n Theta^n / n! for
// r = (1/12, 5/12, -45/8, 555/4, 57165/8), Theta = -4 pi Omega(24, 2)^2;
// odd entries vanish.  Known through n = 9.
template <class R>
std::vector<complex_of<R>> disc6_exact_b() {
    Precision prec(real_traits<R>::digits10);
    R omega = chowla_selberg_omega<R>(24, 2, prec);
    R theta = -4 * pi<R>() * omega * omega;
    const std::pair<long long, long long> r[5] = {{1, 12}, {5, 12}, {-45, 8}, {555, 4}, {57165, 8}};
    std::vector<complex_of<R>> b(10, complex_of<R>(R(0), R(0)));
    R theta_pow(1), fact(1);
    for (int n = 0; n <= 9; ++n) {
        if (n > 0) {
            fact *= n;
            theta_pow *= theta;
        }
        if (n % 2 == 0)
            b[std::size_t(n)] =
                complex_of<R>(R(12) * R(r[n / 2].first) / R(r[n / 2].second) * theta_pow / fact,
                              R(0));
    }
    return b;
}

// deterministic PRNG for property tests
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) / 9007199254740992.0; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

} // namespace testsupport

#endif
