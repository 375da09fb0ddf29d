#ifndef PSMF_SVG_HPP
#define PSMF_SVG_HPP

#include <sstream>
#include <string>

#include "psmf/dirichlet.hpp"

namespace psmf {

// Fundamental domain plot: unit circle, domain boundary, quadrature circle,
// and the vertex list (in domain order, as circle elements of class
// "vertex").
template <class R>
std::string domain_svg(const DirichletDomain<R>& D, const R& quadrature_radius) {
    const double size = 640.0, cx = size / 2, cy = size / 2, scale = size / 2.2;
    auto X = [&](const complex_of<R>& w) { return cx + scale * to_double(R(w.real())); };
    auto Y = [&](const complex_of<R>& w) { return cy - scale * to_double(R(w.imag())); };

    std::ostringstream os;
    os.precision(8);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << int(size) << "' height='"
       << int(size) << "' viewBox='0 0 " << int(size) << " " << int(size) << "'>\n";
    os << "  <circle cx='" << cx << "' cy='" << cy << "' r='" << scale
       << "' fill='none' stroke='#999' stroke-width='1'/>\n";
    os << "  <circle cx='" << cx << "' cy='" << cy << "' r='"
       << scale * to_double(quadrature_radius)
       << "' fill='none' stroke='#c33' stroke-width='1' stroke-dasharray='6 4'/>\n";

    const std::size_t n = D.arcs.size();
    if (n > 0 && D.vertices.size() == n) {
        os << "  <path fill='none' stroke='#136' stroke-width='2' d='";
        os << "M " << X(D.vertices[0]) << " " << Y(D.vertices[0]) << " ";
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = D.arcs[i];
            const auto& to = D.vertices[(i + 1) % n];
            // angular span in travel direction decides the large-arc flag
            const auto& from = D.vertices[i];
            double af = std::atan2(to_double(R(from.imag() - a.center.imag())),
                                   to_double(R(from.real() - a.center.real())));
            double at = std::atan2(to_double(R(to.imag() - a.center.imag())),
                                   to_double(R(to.real() - a.center.real())));
            double span = a.direction() > 0 ? at - af : af - at;
            while (span < 0)
                span += 6.283185307179586;
            int large = span > 3.141592653589793 ? 1 : 0;
            int sweep = a.direction() > 0 ? 0 : 1; // svg y axis points down
            os << "A " << scale * to_double(a.radius) << " " << scale * to_double(a.radius)
               << " 0 " << large << " " << sweep << " " << X(to) << " " << Y(to) << " ";
        }
        os << "Z'/>\n";
    }
    for (std::size_t i = 0; i < D.vertices.size(); ++i)
        os << "  <circle class='vertex' id='v" << i << "' cx='" << X(D.vertices[i]) << "' cy='"
           << Y(D.vertices[i]) << "' r='3' fill='#136'/>\n";
    os << "  <circle cx='" << cx << "' cy='" << cy << "' r='2.5' fill='#c33'/>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace psmf

#endif
