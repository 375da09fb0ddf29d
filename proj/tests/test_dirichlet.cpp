#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace psmf;
using namespace testsupport;
using Cx = std::complex<double>;

TEST_CASE("disc-6 domain reproduces the known radius and area") {
    auto G = disc6_group<double>();
    CHECK(G.size() >= 16); // 8+ sign classes, each with its inverse
    auto D = disc6_domain(G);

    CHECK(D.converged);
    CHECK_FALSE(D.has_free_boundary);
    CHECK(D.rho() == Catch::Approx(0.447213).margin(5e-7));
    CHECK(D.area() == Catch::Approx(2 * 3.14159265358979324 / 3).margin(1e-6));
    CHECK(D.side_count() >= 4);
    CHECK(D.vertices.size() == D.arcs.size());

    // vertices satisfy the defining inequalities and are ccw-ordered
    for (const auto& v : D.vertices) {
        CHECK(D.contains(v, 1e-8));
        CHECK(std::abs(v) <= D.rho() + 1e-12);
    }
    double prev = std::arg(D.vertices.back());
    int wraps = 0;
    for (const auto& v : D.vertices) {
        double a = std::arg(v);
        if (a < prev)
            ++wraps;
        prev = a;
    }
    CHECK(wraps <= 1);
}

TEST_CASE("disc-6 domain is stable under a larger search height") {
    auto G = disc6_group<double>();
    auto D4 = disc6_domain(G);
    DomainOptions<double> opt;
    opt.signature = std::make_pair(0, std::vector<int>{2, 2, 3, 3});
    auto D6 = compute_dirichlet_domain(G, 6, opt);
    REQUIRE(D4.vertices.size() == D6.vertices.size());
    for (std::size_t i = 0; i < D4.vertices.size(); ++i)
        CHECK(std::abs(D4.vertices[i] - D6.vertices[i]) < 1e-10);
}

TEST_CASE("reduction: already reduced points and one-step inverses") {
    auto G = disc6_group<double>();
    auto D = disc6_domain(G);

    DiscPoint<double> inside(Cx(0.05, 0.02));
    REQUIRE(D.contains(inside.w, 1e-9));
    auto r = reduce_point(D, G, inside);
    CHECK(r.word_length == 0);
    CHECK(r.g.is_identity());
    CHECK(std::abs(r.w_prime.w - inside.w) < 1e-15);

    // push an interior point out by a pairing element, reduce back
    for (std::size_t i = 0; i < D.pairing_elements.size(); ++i) {
        auto iso = disc_isometry(D.pairing_elements[i].numeric<double>(), G.center);
        DiscPoint<double> moved(iso.apply(inside.w));
        auto back = reduce_point(D, G, moved);
        CHECK(back.word_length >= 1);
        CHECK(std::abs(back.w_prime.w - inside.w) < 1e-10);
    }
}

TEST_CASE("reduction: random points land in the domain quickly") {
    auto G = disc6_group<double>();
    auto D = disc6_domain(G);
    SplitMix64 rng(2024);
    const double rho = D.rho();
    int max_word = 0;
    for (int k = 0; k < 1000; ++k) {
        double r = rho * std::sqrt(rng.uniform());
        double t = rng.uniform(0, 2 * 3.14159265358979324);
        DiscPoint<double> w(Cx(r * std::cos(t), r * std::sin(t)));
        auto red = reduce_point(D, G, w);
        max_word = std::max(max_word, red.word_length);
        CHECK(D.contains(red.w_prime.w, 1e-12));
        // w' = g w numerically
        auto iso = disc_isometry(red.g.numeric<double>(), G.center);
        CHECK(std::abs(iso.apply(w.w) - red.w_prime.w) < 1e-12);
        // idempotence
        auto again = reduce_point(D, G, red.w_prime);
        CHECK(again.word_length == 0);
    }
    CHECK(max_word <= 30);
}

TEST_CASE("reduction is equivariant along the orbit") {
    auto G = disc6_group<double>();
    auto D = disc6_domain(G);
    SplitMix64 rng(77);
    for (int k = 0; k < 50; ++k) {
        double r = 0.3 * std::sqrt(rng.uniform());
        double t = rng.uniform(0, 6.283185307179586);
        DiscPoint<double> w(Cx(r * std::cos(t), r * std::sin(t)));
        auto red = reduce_point(D, G, w);
        for (std::size_t i = 0; i < std::min<std::size_t>(3, D.pairing_elements.size()); ++i) {
            auto iso = disc_isometry(D.pairing_numeric[i], G.center);
            DiscPoint<double> moved(iso.apply(w.w));
            auto red2 = reduce_point(D, G, moved);
            CHECK(std::abs(red2.w_prime.w - red.w_prime.w) < 1e-9);
        }
    }
}

TEST_CASE("trivial group: full disc with free boundary") {
    auto G = trivial_group<double>();
    DomainOptions<double> opt;
    opt.require_cocompact = false;
    auto D = compute_dirichlet_domain(G, 2, opt);
    CHECK(D.has_free_boundary);
    CHECK(D.converged);
    CHECK(D.side_count() == 0);
    auto r = reduce_point(D, G, DiscPoint<double>(Cx(0.5, 0.3)));
    CHECK(r.word_length == 0);

    DomainOptions<double> strict;
    strict.require_cocompact = true;
    CHECK_THROWS_AS(compute_dirichlet_domain(G, 2, strict), std::runtime_error);
}

TEST_CASE("level-11 group: truncated domain with usable radius override") {
    auto gens = gamma0_11_generators();
    FuchsianGroup<double> G(gens, gamma0_11_center<double>(), Precision(15));
    DomainOptions<double> opt;
    opt.cap = 0.9;
    opt.require_cocompact = false;
    opt.rho_override = 0.85;
    auto D = compute_dirichlet_domain(G, 8, opt);
    CHECK(D.has_free_boundary);
    CHECK(D.rho() == 0.85);
    CHECK(D.side_count() >= 4);

    // quadrature-circle points reduce into the capped region
    SplitMix64 rng(5);
    for (int k = 0; k < 200; ++k) {
        double t = rng.uniform(0, 6.283185307179586);
        DiscPoint<double> w(Cx(0.85 * std::cos(t), 0.85 * std::sin(t)));
        auto red = reduce_point(D, G, w);
        CHECK(std::abs(red.w_prime.w) <= 0.85 + 1e-12);
        CHECK(D.contains(red.w_prime.w, 1e-9));
    }
}

TEST_CASE("non-cocompact without acceptance is an error") {
    auto gens = gamma0_11_generators();
    FuchsianGroup<double> G(gens, gamma0_11_center<double>(), Precision(15));
    DomainOptions<double> opt;
    opt.cap = 0.9;
    opt.require_cocompact = true;
    CHECK_THROWS_WITH(compute_dirichlet_domain(G, 6, opt),
                      Catch::Matchers::ContainsSubstring("free boundary"));
}

TEST_CASE("domain text export lists vertices in order") {
    auto G = disc6_group<double>();
    auto D = disc6_domain(G);
    auto text = D.to_text();
    CHECK(text.find("rho") == 0);
    for (std::size_t i = 0; i < D.vertices.size(); ++i)
        CHECK(text.find("vertex " + std::to_string(i) + " ") != std::string::npos);
    CHECK(text.find("pairing [") != std::string::npos);
}

#ifndef PSMF_NO_EXTENDED
TEST_CASE("disc-6 domain at 30 digits") {
    auto G = disc6_group<real30>();
    auto D = disc6_domain(G);
    CHECK(D.converged);
    using std::abs;
    CHECK(abs(D.rho() - real30("0.4472135954999579392818347337462")) < 1e-25);
}
#endif
