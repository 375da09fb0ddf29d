#ifndef PSMF_DIRICHLET_HPP
#define PSMF_DIRICHLET_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "psmf/fuchsian_group.hpp"

namespace psmf {

// One boundary arc of the domain polygon.  Side arcs lie on the Dirichlet
// bisector of [0, g*0] for a group element g and are traversed clockwise
// around their circle center (the region is outside the circle); cap arcs
// lie on the truncation circle |w| = cap and are traversed counterclockwise.
template <class R>
struct DomainArc {
    complex_of<R> center;
    R radius;
    int element; // index into pairing_elements, -1 for cap arcs

    bool is_cap() const { return element < 0; }
    int direction() const { return is_cap() ? +1 : -1; }
};

template <class R>
struct ReductionOutput {
    DiscPoint<R> w_prime;
    ExactMatrix2 g;
    int word_length = 0;
};

namespace detail {

template <class R>
R arg_c(const complex_of<R>& z) {
    using std::atan2;
    return atan2(R(z.imag()), R(z.real()));
}

template <class R>
R abs_c(const complex_of<R>& z) {
    using std::sqrt;
    return sqrt(sqabs<R>(z));
}

template <class R>
R norm_angle(R a) {
    const R tp = 2 * pi<R>();
    while (a < 0)
        a += tp;
    while (a >= tp)
        a -= tp;
    return a;
}

// Intersection points of two circles; 0, 1 (tangent) or 2 results.
template <class R>
std::vector<complex_of<R>> circle_intersections(const complex_of<R>& c1, const R& r1,
                                                const complex_of<R>& c2, const R& r2, const R& eps) {
    using std::sqrt;
    std::vector<complex_of<R>> out;
    complex_of<R> delta = c2 - c1;
    R dist = abs_c<R>(delta);
    if (dist < eps)
        return out; // concentric
    R a = (dist * dist + r1 * r1 - r2 * r2) / (2 * dist);
    R h2 = r1 * r1 - a * a;
    complex_of<R> u = delta / dist;
    complex_of<R> base = c1 + u * a;
    if (h2 < -eps * eps)
        return out;
    if (h2 <= eps * eps) {
        out.push_back(base);
        return out;
    }
    R h = sqrt(h2);
    complex_of<R> perp = complex_of<R>(R(0), R(1)) * u * h;
    out.push_back(base + perp);
    out.push_back(base - perp);
    return out;
}

// Region of the disc bounded by circular arcs, star-shaped about the
// origin, supporting incremental intersection with circle exteriors.
template <class R>
struct ArcPolygon {
    using Cx = complex_of<R>;
    std::vector<Cx> verts;          // verts[i] starts arcs[i]
    std::vector<DomainArc<R>> arcs; // arcs[i]: verts[i] -> verts[(i+1) % n]
    R eps;

    static ArcPolygon cap_disc(const R& cap, const R& eps) {
        ArcPolygon p;
        p.eps = eps;
        p.verts = {Cx(cap, R(0)), Cx(-cap, R(0))};
        p.arcs = {DomainArc<R>{Cx(R(0), R(0)), cap, -1}, DomainArc<R>{Cx(R(0), R(0)), cap, -1}};
        return p;
    }

    std::size_t size() const { return verts.size(); }

    // angular parameter of x (assumed on arc i's circle) from the arc start,
    // measured in travel direction
    R param_on(std::size_t i, const Cx& x) const {
        const auto& a = arcs[i];
        R from = arg_c<R>(verts[i] - a.center);
        R at = arg_c<R>(x - a.center);
        return norm_angle<R>(R(a.direction()) * (at - from));
    }

    R span_of(std::size_t i) const { return param_on(i, verts[(i + 1) % verts.size()]); }

    Cx point_at(std::size_t i, const R& t) const {
        const auto& a = arcs[i];
        R from = arg_c<R>(verts[i] - a.center);
        return a.center + polar_c<R>(a.radius, from + R(a.direction()) * t);
    }

    R max_vertex_radius() const {
        R m(0);
        for (const auto& v : verts)
            m = std::max(m, abs_c<R>(v));
        return m;
    }

    bool has_cap_arc() const {
        for (const auto& a : arcs)
            if (a.is_cap())
                return true;
        return false;
    }

    // intersect with the exterior of circle(q, s); returns true if changed
    bool clip(const Cx& q, const R& s, int element) {
        const std::size_t n = verts.size();
        std::vector<R> sf(n);
        std::vector<bool> violating(n);
        bool any_violating = false;
        bool all_in_zone = true;
        for (std::size_t i = 0; i < n; ++i) {
            sf[i] = abs_c<R>(verts[i] - q) - s;
            violating[i] = sf[i] < -eps;
            any_violating = any_violating || violating[i];
            all_in_zone = all_in_zone && sf[i] < eps;
        }
        if (!any_violating)
            return clip_bite(q, s, element);
        if (all_in_zone)
            throw std::runtime_error("ArcPolygon::clip: circle swallows every vertex");

        // contiguous cyclic run of vertices to remove; vertices on the circle
        // (|sf| <= eps) neither break nor anchor the run
        std::size_t first = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (sf[i] >= eps) {
                first = i;
                break;
            }
        long run_start = -1, run_end = -1;
        bool in_run = false, run_done = false;
        for (std::size_t k = 1; k <= n; ++k) {
            std::size_t i = (first + k) % n;
            if (violating[i]) {
                if (run_done)
                    throw std::runtime_error("ArcPolygon::clip: violating vertices not contiguous");
                if (!in_run) {
                    in_run = true;
                    run_start = long(i);
                }
                run_end = long(i);
            } else if (sf[i] >= eps && in_run) {
                in_run = false;
                run_done = true;
            }
        }

        std::size_t f = std::size_t(run_start), l = std::size_t(run_end);
        // nearest strictly-kept vertices on both sides; vertices sitting on
        // the circle are absorbed into the removed chain
        std::size_t pv = (f + n - 1) % n;
        while (sf[pv] > -eps && sf[pv] < eps)
            pv = (pv + n - 1) % n;
        std::size_t nx = (l + 1) % n;
        while (sf[nx] > -eps && sf[nx] < eps)
            nx = (nx + 1) % n;
        // arcs carrying the entry/exit crossings
        std::size_t entry_arc = pv;
        std::size_t exit_arc = (nx + n - 1) % n;

        Cx entry = pick_crossing(entry_arc, q, s, /*nearest_start=*/true);
        Cx exitp = pick_crossing(exit_arc, q, s, /*nearest_start=*/false);

        std::vector<Cx> nv;
        std::vector<DomainArc<R>> na;
        for (std::size_t k = 0;; ++k) {
            std::size_t i = (nx + k) % n;
            nv.push_back(verts[i]);
            if (i == pv)
                break;
            na.push_back(arcs[i]);
            if (nv.size() > n)
                throw std::runtime_error("ArcPolygon::clip: rebuild walk failed");
        }
        na.push_back(arcs[entry_arc]); // pv -> entry along the old circle
        nv.push_back(entry);
        na.push_back(DomainArc<R>{q, s, element});
        nv.push_back(exitp);
        na.push_back(arcs[exit_arc]); // exit -> nx along the old circle
        verts = std::move(nv);
        arcs = std::move(na);
        normalize();
        if (verts.size() < 2)
            throw std::runtime_error("ArcPolygon::clip: region degenerated");
        return true;
    }

    // no vertex strictly inside: the circle may still cut a lens out of one
    // arc (both crossings interior to the same arc)
    bool clip_bite(const Cx& q, const R& s, int element) {
        const std::size_t n = verts.size();
        for (std::size_t i = 0; i < n; ++i) {
            R epsa = eps / std::max(R(1), arcs[i].radius);
            auto pts = circle_intersections<R>(arcs[i].center, arcs[i].radius, q, s, eps);
            std::vector<std::pair<R, Cx>> on_arc;
            R span = span_of(i);
            for (const auto& x : pts) {
                R t = param_on(i, x);
                if (t > epsa && t < span - epsa && abs_c<R>(x - verts[i]) > eps &&
                    abs_c<R>(x - verts[(i + 1) % n]) > eps)
                    on_arc.emplace_back(t, x);
            }
            if (on_arc.size() != 2)
                continue;
            std::sort(on_arc.begin(), on_arc.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            R tmid = (on_arc[0].first + on_arc[1].first) / 2;
            if (abs_c<R>(point_at(i, tmid) - q) >= s - eps)
                continue; // lens lies outside: nothing to cut
            std::vector<Cx> nv;
            std::vector<DomainArc<R>> na;
            for (std::size_t k = 0; k < n; ++k) {
                nv.push_back(verts[k]);
                na.push_back(arcs[k]);
                if (k == i) {
                    nv.push_back(on_arc[0].second);
                    na.push_back(DomainArc<R>{q, s, element});
                    nv.push_back(on_arc[1].second);
                    na.push_back(arcs[i]);
                }
            }
            verts = std::move(nv);
            arcs = std::move(na);
            normalize();
            return true;
        }
        return false;
    }

    Cx pick_crossing(std::size_t arc_index, const Cx& q, const R& s, bool nearest_start) const {
        auto pts = circle_intersections<R>(arcs[arc_index].center, arcs[arc_index].radius, q, s, eps);
        R epsa = eps / std::max(R(1), arcs[arc_index].radius);
        R span = span_of(arc_index);
        std::vector<std::pair<R, Cx>> on_arc;
        for (const auto& x : pts) {
            R t = param_on(arc_index, x);
            if (t >= -epsa && t <= span + epsa)
                on_arc.emplace_back(t, x);
        }
        if (on_arc.empty())
            throw std::runtime_error("ArcPolygon::clip: expected a boundary crossing");
        std::sort(on_arc.begin(), on_arc.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return nearest_start ? on_arc.front().second : on_arc.back().second;
    }

    // drop arcs whose endpoints collapsed during clipping
    void normalize() {
        bool changed = true;
        while (changed && verts.size() > 2) {
            changed = false;
            const std::size_t n = verts.size();
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t j = (i + 1) % n;
                R arclen = span_of(i) * arcs[i].radius;
                if (abs_c<R>(verts[i] - verts[j]) < eps && arclen < R(1) / 2) {
                    // vertex i absorbs arc i; the arc leaving j reattaches to i
                    std::vector<Cx> nv;
                    std::vector<DomainArc<R>> na;
                    for (std::size_t k = 0; k < n; ++k) {
                        if (k == j)
                            continue;
                        nv.push_back(verts[k]);
                        na.push_back(k == i ? arcs[j] : arcs[k]);
                    }
                    verts = std::move(nv);
                    arcs = std::move(na);
                    changed = true;
                    break;
                }
            }
        }
    }
};

} // namespace detail

// Dirichlet fundamental domain in the disc chart centered at the group's
// expansion point, plus everything point reduction needs.
template <class R>
class DirichletDomain {
  public:
    std::vector<complex_of<R>> vertices; // counterclockwise; vertex i starts arc i
    std::vector<DomainArc<R>> arcs;
    std::vector<ExactMatrix2> pairing_elements;
    std::vector<Mat2<R>> pairing_numeric;
    std::vector<std::pair<complex_of<R>, R>> half_spaces; // bisector circle per pairing element
    R cap{};
    bool converged = false;
    bool has_free_boundary = false;
    R rho_geometric{};
    std::optional<R> rho_override;

    // move candidates for greedy reduction: the pairing set and its inverses
    std::vector<ExactMatrix2> reduction_exact;
    std::vector<DiscIsometry<R>> reduction_iso;

    R rho() const { return rho_override ? *rho_override : rho_geometric; }

    std::size_t side_count() const {
        std::size_t c = 0;
        for (const auto& a : arcs)
            if (!a.is_cap())
                ++c;
        return c;
    }

    // Dirichlet inequalities at w with Euclidean slack tol on each bisector
    bool contains(const complex_of<R>& w, const R& tol) const {
        using std::sqrt;
        for (const auto& hs : half_spaces)
            if (sqrt(sqabs<R>(w - hs.first)) < hs.second - tol)
                return false;
        return true;
    }

    // Hyperbolic area by Gauss-Bonnet: (n-2) pi - sum of interior angles.
    R area() const {
        if (has_free_boundary)
            throw std::domain_error("DirichletDomain::area: domain has free boundary arcs");
        const std::size_t n = arcs.size();
        if (n < 3)
            throw std::domain_error("DirichletDomain::area: degenerate polygon");
        using std::atan2;
        using std::sqrt;
        R interior_sum(0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& incoming = arcs[(i + n - 1) % n];
            const auto& outgoing = arcs[i];
            const complex_of<R>& v = vertices[i];
            auto tangent = [&](const DomainArc<R>& a) {
                complex_of<R> radial = v - a.center;
                radial /= sqrt(sqabs<R>(radial));
                complex_of<R> t = complex_of<R>(R(0), R(1)) * radial;
                return a.direction() < 0 ? -t : t;
            };
            complex_of<R> ratio = tangent(outgoing) / tangent(incoming);
            R turn = atan2(R(ratio.imag()), R(ratio.real()));
            interior_sum += pi<R>() - turn;
        }
        return R(int(n) - 2) * pi<R>() - interior_sum;
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "rho " << to_decimal_string(rho()) << "\n";
        os << "converged " << (converged ? 1 : 0) << " free_boundary " << (has_free_boundary ? 1 : 0)
           << "\n";
        for (std::size_t i = 0; i < vertices.size(); ++i)
            os << "vertex " << i << " " << to_decimal_string(R(vertices[i].real())) << " "
               << to_decimal_string(R(vertices[i].imag())) << "\n";
        for (std::size_t i = 0; i < arcs.size(); ++i) {
            os << "side " << i;
            if (arcs[i].is_cap())
                os << " cap";
            else
                os << " pairing " << pairing_elements[std::size_t(arcs[i].element)].str();
            os << "\n";
        }
        return os.str();
    }
};

template <class R>
struct DomainOptions {
    R cap = R(0.995);
    bool require_cocompact = true;
    std::optional<R> rho_override;
    // (genus, elliptic orders): enables the Gauss-Bonnet signature check
    std::optional<std::pair<int, std::vector<int>>> signature;
};

// Group element together with its bisector geometry in the disc chart.
template <class R>
struct BisectorCandidate {
    ExactMatrix2 element;
    complex_of<R> q; // bisector circle center u/|u|^2 for u = g * 0
    R s;             // bisector circle radius
    R dist0;         // hyperbolic distance from 0 to g * 0
};

template <class R>
BisectorCandidate<R> make_candidate(const ExactMatrix2& g, const FuchsianGroup<R>& G) {
    using std::sqrt;
    BisectorCandidate<R> c;
    c.element = g;
    auto [gp, j] = act_half_plane(g.template numeric<R>(), G.center);
    (void)j;
    complex_of<R> u = to_disc(G.center, gp).w;
    R uu = sqabs<R>(u);
    c.q = u / uu;
    c.s = sqrt(R(1) / uu - 1);
    c.dist0 = disc_distance_to_origin<R>(sqrt(uu));
    return c;
}

// Dirichlet domain by incremental half-space intersection over words in the
// generators: `search_height` breadth-first rounds, candidates pruned by the
// relevance bound d(0, g*0) <= 2 d_max(region) + slack.
template <class R>
DirichletDomain<R> compute_dirichlet_domain(const FuchsianGroup<R>& G, int search_height,
                                            const DomainOptions<R>& opt = DomainOptions<R>{}) {
    if (search_height < 1)
        throw std::domain_error("compute_dirichlet_domain: search_height must be positive");
    const R eps = tol10<R>(G.prec, 6);
    const R slack(1);

    auto poly = detail::ArcPolygon<R>::cap_disc(opt.cap, eps);

    std::set<ExactMatrix2> known(G.generators.begin(), G.generators.end());
    std::vector<ExactMatrix2> frontier = G.generators;
    std::vector<BisectorCandidate<R>> used; // circles that clipped, in order
    std::size_t relevant_count = 0;

    auto apply_candidates = [&](std::vector<BisectorCandidate<R>>& cands) {
        std::stable_sort(cands.begin(), cands.end(),
                         [](const auto& a, const auto& b) { return a.dist0 < b.dist0; });
        bool any = false;
        for (auto& c : cands) {
            R rmax = poly.has_cap_arc() ? opt.cap : poly.max_vertex_radius();
            if (detail::abs_c<R>(c.q) - c.s > rmax + eps)
                continue; // bisector cannot reach the region
            if (poly.clip(c.q, c.s, int(used.size()))) {
                used.push_back(c);
                any = true;
            }
        }
        return any;
    };

    {
        std::vector<BisectorCandidate<R>> initial;
        initial.reserve(frontier.size());
        for (const auto& g : frontier)
            initial.push_back(make_candidate(g, G));
        relevant_count += initial.size();
        apply_candidates(initial);
    }

    bool stable_round = false;
    for (int round = 2; round <= search_height && !G.trivial() && !frontier.empty(); ++round) {
        R cut = 2 * disc_distance_to_origin<R>(poly.has_cap_arc() ? opt.cap
                                                                  : poly.max_vertex_radius()) +
                slack;
        std::vector<ExactMatrix2> next;
        std::vector<BisectorCandidate<R>> cands;
        for (const auto& f : frontier) {
            for (const auto& g : G.generators) {
                ExactMatrix2 prod = (f * g).canonical();
                if (prod.is_identity() || known.count(prod))
                    continue;
                known.insert(prod);
                auto cand = make_candidate<R>(prod, G);
                if (cand.dist0 > cut)
                    continue;
                next.push_back(prod);
                cands.push_back(std::move(cand));
            }
        }
        relevant_count += cands.size();
        if (relevant_count > 10000)
            throw std::runtime_error("compute_dirichlet_domain: more than 10^4 relevant bisectors; "
                                     "input group looks non-discrete");
        bool clipped = apply_candidates(cands);
        stable_round = !clipped;
        frontier = std::move(next);
    }

    DirichletDomain<R> D;
    D.cap = opt.cap;
    D.vertices = poly.verts;
    D.converged = stable_round || G.trivial();
    D.has_free_boundary = poly.has_cap_arc();
    D.rho_override = opt.rho_override;

    if (D.has_free_boundary && opt.require_cocompact) {
        std::ostringstream os;
        os << "compute_dirichlet_domain: domain is not compact; free boundary arc remains at |w| = "
           << to_decimal_string(opt.cap)
           << " (pass require_cocompact = false to accept a truncated domain)";
        throw std::runtime_error(os.str());
    }

    // keep only elements supporting final sides, remapping arc indices
    std::map<int, int> remap;
    for (const auto& a : poly.arcs)
        if (!a.is_cap() && !remap.count(a.element)) {
            remap[a.element] = int(D.pairing_elements.size());
            D.pairing_elements.push_back(used[std::size_t(a.element)].element);
            D.half_spaces.emplace_back(used[std::size_t(a.element)].q,
                                       used[std::size_t(a.element)].s);
        }
    D.arcs = poly.arcs;
    for (auto& a : D.arcs)
        if (!a.is_cap())
            a.element = remap[a.element];
    for (const auto& g : D.pairing_elements)
        D.pairing_numeric.push_back(g.template numeric<R>());

    D.rho_geometric = D.has_free_boundary ? opt.cap : poly.max_vertex_radius();

    {
        std::set<ExactMatrix2> seen;
        for (const auto& g : D.pairing_elements)
            for (const ExactMatrix2& cand : {g.inverse().canonical(), g.canonical()})
                if (seen.insert(cand).second) {
                    D.reduction_exact.push_back(cand);
                    D.reduction_iso.push_back(disc_isometry(cand.template numeric<R>(), G.center));
                }
    }

    if (opt.signature) {
        const auto& [genus, orders] = *opt.signature;
        R expected = R(2 * genus - 2) * 2 * pi<R>();
        for (int m : orders)
            expected += 2 * pi<R>() * (1 - R(1) / m);
        R got = D.area();
        using std::abs;
        if (abs(got - expected) > abs(expected) / 1000000) {
            std::ostringstream os;
            os << "compute_dirichlet_domain: Gauss-Bonnet area " << to_decimal_string(got)
               << " does not match the signature area " << to_decimal_string(expected);
            throw std::runtime_error(os.str());
        }
    }
    return D;
}

// Greedy reduction into the fundamental domain: repeatedly apply the move
// bringing the point closest to the origin (ties broken by candidate index),
// stopping when no move improves the distance by more than the boundary
// tolerance.
template <class R>
ReductionOutput<R> reduce_point(const DirichletDomain<R>& D, const FuchsianGroup<R>& G,
                                const DiscPoint<R>& w) {
    using std::sqrt;
    const R tol = tol10<R>(G.prec, 6);
    complex_of<R> cur = w.w;
    ExactMatrix2 acc = ExactMatrix2::identity();
    int word = 0;
    while (true) {
        if (word >= 10000)
            throw std::runtime_error(
                "reduce_point: iteration cap exceeded; pairing set is likely incomplete");
        R cur_sq = sqabs<R>(cur);
        int best = -1;
        R best_sq = cur_sq;
        for (std::size_t i = 0; i < D.reduction_iso.size(); ++i) {
            R sq = sqabs<R>(D.reduction_iso[i].apply(cur));
            if (sq < best_sq) {
                best_sq = sq;
                best = int(i);
            }
        }
        if (best < 0)
            break;
        if (disc_distance_to_origin<R>(sqrt(cur_sq)) - disc_distance_to_origin<R>(sqrt(best_sq)) <=
            tol)
            break;
        cur = D.reduction_iso[std::size_t(best)].apply(cur);
        acc = D.reduction_exact[std::size_t(best)] * acc;
        ++word;
    }
    ReductionOutput<R> out;
    out.word_length = word;
    if (word == 0) {
        out.w_prime = w;
        out.g = ExactMatrix2::identity();
    } else {
        // evaluate the accumulated exact word once for a consistent image
        out.g = acc;
        out.w_prime = DiscPoint<R>(disc_isometry(acc.template numeric<R>(), G.center).apply(w.w));
    }
    return out;
}

} // namespace psmf

#endif
