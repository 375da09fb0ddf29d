#ifndef PSMF_EXPANSION_RESULT_HPP
#define PSMF_EXPANSION_RESULT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psmf/numeric.hpp"

namespace psmf {

// A computed power series expansion (1-w)^k sum b_n w^n together with its
// normalization data and solver diagnostics.
template <class R>
struct ExpansionResult {
    std::vector<complex_of<R>> b; // coefficients, unscaled
    R radius{};                   // quadrature/scaling radius the run used
    int weight = 0;

    std::optional<complex_of<R>> theta;
    std::optional<std::vector<complex_of<R>>> c; // normalized coefficients
    std::string theta_provenance;                // "from_ratio" | "external" | ""

    std::vector<R> singular_values;
    std::optional<R> kernel_quality;
    std::optional<int> kernel_dimension;
    R automorphy_residual{};
    std::map<long long, R> hecke_residuals;
};

} // namespace psmf

#endif
