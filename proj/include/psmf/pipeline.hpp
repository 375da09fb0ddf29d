#ifndef PSMF_PIPELINE_HPP
#define PSMF_PIPELINE_HPP

#include <chrono>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>

#include "psmf/config.hpp"
#include "psmf/models.hpp"
#include "psmf/normalize.hpp"
#include "psmf/qexpansion.hpp"
#include "psmf/svg.hpp"

namespace psmf {

// Everything a run leaves behind; the JSON carries the machine-readable
// contract, the rest is for humans.
struct RunArtifacts {
    nlohmann::json result;
    std::string svg;
    std::string domain_text;
    std::string log;
    bool verifications_passed = false;
};

enum class RunMode { full, domain_only, oracle };

namespace detail {

class StageClock {
  public:
    void start(const std::string& name) {
        current_ = name;
        t0_ = std::chrono::steady_clock::now();
    }
    void stop() {
        auto dt = std::chrono::steady_clock::now() - t0_;
        timings_[current_] +=
            double(std::chrono::duration_cast<std::chrono::microseconds>(dt).count()) / 1000.0;
    }
    const std::map<std::string, double>& timings() const { return timings_; }

  private:
    std::string current_;
    std::chrono::steady_clock::time_point t0_;
    std::map<std::string, double> timings_;
};

template <class R>
nlohmann::json complex_json(const complex_of<R>& z) {
    return nlohmann::json::array({to_decimal_string(R(z.real())), to_decimal_string(R(z.imag()))});
}

template <class R>
R eval_real_expr(const std::string& s, const std::string& what) {
    auto node = expr::parse(s);
    auto v = expr::eval_complex<R>(*node);
    using std::abs;
    if (abs(R(v.imag())) > abs(R(v.real())) * std::numeric_limits<R>::epsilon() * 16 &&
        v.imag() != 0)
        throw ConfigError(what + ": expected a real value, got an imaginary part");
    return R(v.real());
}

template <class R>
std::vector<Mat2<R>> classical_hecke_cosets(long long p, const Precision& prec) {
    using std::sqrt;
    if (p < 2)
        throw ConfigError("classical Hecke operators need a prime >= 2");
    std::vector<Mat2<R>> out;
    R s = 1 / sqrt(R(double(p)));
    for (long long j = 0; j < p; ++j)
        out.push_back(normalized_det1(Mat2<R>(s, R(double(j)) * s, R(0), R(double(p)) * s), prec));
    out.push_back(normalized_det1(Mat2<R>(R(double(p)) * s, R(0), R(0), s), prec));
    return out;
}

// exact coset matrix from the file grammar, determinant-normalized
template <class R>
Mat2<R> file_coset_matrix(const std::array<std::string, 4>& entries, const Precision& prec) {
    QuadExt e[4];
    for (int i = 0; i < 4; ++i)
        e[i] = expr::eval_quadext(*expr::parse(entries[std::size_t(i)]));
    QuadExt det = e[0] * e[3] - e[1] * e[2];
    if (det == QuadExt(1)) {
        ExactMatrix2 m(e[0], e[1], e[2], e[3]);
        return m.template numeric<R>();
    }
    if (!det.is_rational() || !(det.x > 0))
        throw ConfigError("hecke coset matrix needs determinant 1 or a positive rational "
                          "determinant, got " +
                          det.str());
    Mat2<R> m(e[0].to_real<R>(+1), e[1].to_real<R>(+1), e[2].to_real<R>(+1), e[3].to_real<R>(+1));
    return normalized_det1(m, prec);
}

} // namespace detail

template <class R>
class PipelineRun {
  public:
    PipelineRun(const RunConfig& cfg, RunMode mode) : cfg_(cfg), mode_(mode), prec_(cfg.digits) {}

    RunArtifacts execute() {
        RunArtifacts art;
        if (mode_ == RunMode::oracle)
            return execute_oracle();

        clock_.start("group");
        build_group();
        clock_.stop();

        clock_.start("domain");
        DomainOptions<R> opt;
        if (cfg_.cap)
            opt.cap = detail::eval_real_expr<R>(*cfg_.cap, "cap");
        opt.require_cocompact = cfg_.cocompact;
        if (cfg_.rho_override)
            opt.rho_override = detail::eval_real_expr<R>(*cfg_.rho_override, "rho");
        opt.signature = cfg_.signature;
        domain_.emplace(compute_dirichlet_domain(*group_, cfg_.search_height, opt));
        clock_.stop();

        art.domain_text = domain_->to_text();

        if (mode_ == RunMode::domain_only) {
            art.svg = domain_svg<R>(*domain_, domain_->rho());
            art.result = base_json();
            art.result["status"] = "ok";
            art.verifications_passed = true;
            append_log(art);
            return art;
        }

        clock_.start("assembly");
        build_problem();
        auto sys = (cfg_.quadrature == QuadratureKind::simpson) ? cauchy_matrix_simpson(*prob_)
                                                                : cauchy_matrix_riemann(*prob_);
        auto hom = homogeneous(std::move(sys));
        attach_hecke_rows(hom);
        auto scaled = scale_system(std::move(hom), prob_->radius);
        clock_.stop();

        clock_.start("kernel");
        solve(scaled);
        clock_.stop();

        clock_.start("normalize");
        normalize_result();
        clock_.stop();

        clock_.start("verify");
        bool ok = verify();
        clock_.stop();

        clock_.start("postprocess");
        nlohmann::json extras = postprocess();
        clock_.stop();

        art.svg = domain_svg<R>(*domain_, prob_->radius);
        art.result = result_json();
        for (auto& [k, v] : extras.items())
            art.result[k] = v;
        art.result["status"] = ok ? "ok" : "verification_failed";
        art.verifications_passed = ok;
        append_log(art);
        return art;
    }

    // Re-check a previously written result: rebuild the geometry, read the
    // coefficients back from their decimal strings, rerun the verifications.
    bool verify_existing(const nlohmann::json& result, std::string& report) {
        build_group();
        DomainOptions<R> opt;
        if (cfg_.cap)
            opt.cap = detail::eval_real_expr<R>(*cfg_.cap, "cap");
        opt.require_cocompact = cfg_.cocompact;
        if (cfg_.rho_override)
            opt.rho_override = detail::eval_real_expr<R>(*cfg_.rho_override, "rho");
        opt.signature = cfg_.signature;
        domain_.emplace(compute_dirichlet_domain(*group_, cfg_.search_height, opt));
        build_problem();

        if (!result.contains("coefficients") || !result["coefficients"].is_array())
            throw ConfigError("result file carries no coefficient array");
        res_ = ExpansionResult<R>{};
        for (const auto& pair : result["coefficients"]) {
            res_.b.push_back(complex_of<R>(parse_real<R>(pair.at(0).get<std::string>()),
                                           parse_real<R>(pair.at(1).get<std::string>())));
        }
        res_.radius = prob_->radius;
        res_.weight = cfg_.weight;
        bool ok = verify();
        std::ostringstream os;
        os << "automorphy residual " << to_decimal_string(res_.automorphy_residual) << "\n";
        for (const auto& [p, r] : res_.hecke_residuals)
            os << "hecke residual (" << p << ") " << to_decimal_string(r) << "\n";
        for (const auto& [name, passed] : checks_)
            os << "check " << name << ": " << (passed ? "pass" : "FAIL") << "\n";
        report = os.str();
        return ok;
    }

  private:
    const RunConfig& cfg_;
    RunMode mode_;
    Precision prec_;
    detail::StageClock clock_;

    std::optional<QuaternionAlgebraQ> alg_;
    std::optional<FuchsianGroup<R>> group_;
    std::optional<DirichletDomain<R>> domain_;
    std::optional<ExpansionProblem<R>> prob_;
    ExpansionResult<R> res_;
    std::vector<std::string> notes_;
    std::map<std::string, bool> checks_;

    void build_group() {
        HalfPlanePoint<R> center(expr::eval_complex<R>(*expr::parse(cfg_.center)));
        std::vector<ExactMatrix2> gens;
        if (cfg_.group == RunConfig::GroupKind::quaternion) {
            QuadExt a = expr::eval_quadext(*expr::parse(cfg_.quaternion_a));
            QuadExt b = expr::eval_quadext(*expr::parse(cfg_.quaternion_b));
            if (!a.is_rational() || !b.is_rational())
                throw ConfigError("quaternion_a / quaternion_b must be rational");
            alg_.emplace(a.x, b.x);
            OrderQ order;
            for (int i = 0; i < 4; ++i)
                order.basis[std::size_t(i)] =
                    expr::eval_quaternion(*expr::parse(cfg_.order_basis[std::size_t(i)]), *alg_);
            auto units = enumerate_norm_one_units(order, *alg_, cfg_.unit_height);
            if (units.size() <= 1)
                notes_.push_back("unit enumeration found only +-1; unit_height is likely too small");
            for (const auto& u : units)
                gens.push_back(embed_unit(u, *alg_));
        } else {
            for (const auto& m : cfg_.generators) {
                QuadExt e[4];
                for (int i = 0; i < 4; ++i)
                    e[i] = expr::eval_quadext(*expr::parse(m[std::size_t(i)]));
                gens.emplace_back(e[0], e[1], e[2], e[3], cfg_.embedding_sign);
            }
        }
        group_.emplace(gens, center, prec_);
    }

    void build_problem() {
        std::optional<int> N = cfg_.N;
        if (!N && cfg_.epsilon) {
            using std::ceil;
            using std::log;
            R eps = detail::eval_real_expr<R>(*cfg_.epsilon, "epsilon");
            R estimate = ceil(log(eps) / log(domain_->rho()));
            N = std::max(1, int(to_double(estimate)));
        }
        std::optional<R> radius;
        if (cfg_.radius)
            radius = detail::eval_real_expr<R>(*cfg_.radius, "radius");
        prob_.emplace(make_problem<R>(*group_, *domain_, cfg_.weight, N, cfg_.Q, radius,
                                      cfg_.unit_automorphy));
    }

    std::vector<Mat2<R>> cosets_of(const HeckeOperatorSpec& spec) const {
        std::vector<Mat2<R>> cosets;
        if (spec.classical) {
            cosets = detail::classical_hecke_cosets<R>(spec.prime, prec_);
        } else {
            for (const auto& entries : spec.cosets)
                cosets.push_back(detail::file_coset_matrix<R>(entries, prec_));
        }
        return cosets;
    }

    void attach_hecke_rows(RelationSystem<R>& hom) {
        for (const auto& spec : cfg_.hecke) {
            auto a_p = expr::eval_complex<R>(*expr::parse(spec.eigenvalue));
            auto row = hecke_row(*prob_, cosets_of(spec), a_p);
            long long label = spec.classical ? spec.prime : (long long)(spec.cosets.size()) - 1;
            append_row(hom, row, RowTag{RowKind::hecke, label});
        }
    }

    void solve(const RelationSystem<R>& scaled) {
        std::vector<complex_of<R>> bprime;
        if (cfg_.solver != SolverKind::lu) {
            KernelOptions kopt;
            kopt.expected_dim = cfg_.expected_dim;
            auto ker = numerical_kernel<R>(scaled.matrix, prec_, kopt);
            res_.singular_values = ker.singular_values;
            res_.kernel_dimension = ker.dimension;
            res_.kernel_quality = ker.quality_ratio;
            if (ker.dimension < 1)
                throw std::runtime_error(
                    "numerical kernel is empty; smallest singular value " +
                    to_decimal_string(ker.singular_values.back()) + " sits above the threshold " +
                    to_decimal_string(ker.kernel_threshold));
            if (ker.dimension_mismatch) {
                notes_.push_back("kernel dimension " + std::to_string(ker.dimension) +
                                 " differs from the expected " +
                                 std::to_string(*cfg_.expected_dim));
                checks_["kernel_dimension"] = false;
            } else if (cfg_.expected_dim) {
                checks_["kernel_dimension"] = true;
            }
            bprime = ker.basis.back(); // smallest singular value
        }
        if (cfg_.solver != SolverKind::svd) {
            // dehomogenize with b_0 = 1 and least-squares the rest
            const std::size_t rows = scaled.matrix.rows(), cols = scaled.matrix.cols();
            Matrix<complex_of<R>> A(rows, cols - 1);
            std::vector<complex_of<R>> rhs(rows);
            for (std::size_t i = 0; i < rows; ++i) {
                rhs[i] = -scaled.matrix(i, 0);
                for (std::size_t j = 1; j < cols; ++j)
                    A(i, j - 1) = scaled.matrix(i, j);
            }
            auto x = lu_least_squares<R>(A, rhs, prec_);
            std::vector<complex_of<R>> lu_vec(cols);
            lu_vec[0] = complex_of<R>(R(1), R(0));
            for (std::size_t j = 1; j < cols; ++j)
                lu_vec[j] = x[j - 1];
            if (cfg_.solver == SolverKind::lu) {
                bprime = std::move(lu_vec);
            } else {
                // agreement in angle between the two routes
                complex_of<R> ip(R(0), R(0));
                R n1(0), n2(0);
                for (std::size_t j = 0; j < cols; ++j) {
                    ip += conj(bprime[j]) * lu_vec[j];
                    n1 += sqabs<R>(bprime[j]);
                    n2 += sqabs<R>(lu_vec[j]);
                }
                using std::sqrt;
                R gap = 1 - sqrt(sqabs<R>(ip) / (n1 * n2));
                notes_.push_back("svd/lu agreement gap: " + to_decimal_string(gap));
                checks_["solver_agreement"] = gap < tol10<R>(prec_, 8);
            }
        }
        res_.b = unscale_solution(bprime, prob_->radius);
        res_.radius = prob_->radius;
        res_.weight = cfg_.weight;
        // normalize the overall scale to b_0 = 1 when sensible
        if (sqabs<R>(res_.b[0]) > tol10<R>(prec_, 6)) {
            complex_of<R> b0 = res_.b[0];
            for (auto& x : res_.b)
                x /= b0;
        } else {
            notes_.push_back("b_0 is numerically zero; coefficients left with unit scaled norm");
        }
    }

    std::optional<complex_of<R>> theta_override() const {
        if (cfg_.theta)
            return expr::eval_complex<R>(*expr::parse(*cfg_.theta));
        if (cfg_.theta_cs) {
            R omega = chowla_selberg_omega<R>(cfg_.theta_cs->first, cfg_.theta_cs->second, prec_);
            return complex_of<R>(-4 * pi<R>() * omega * omega, R(0));
        }
        return std::nullopt;
    }

    void normalize_result() {
        if (!cfg_.normalize)
            return;
        res_ = normalize_cm(res_, theta_override());
    }

    bool verify() {
        R atol = cfg_.automorphy_tol ? detail::eval_real_expr<R>(*cfg_.automorphy_tol, "automorphy_tol")
                                     : tol10<R>(prec_, 5);
        R htol = cfg_.hecke_tol ? detail::eval_real_expr<R>(*cfg_.hecke_tol, "hecke_tol")
                                : tol10<R>(prec_, 5);
        res_.automorphy_residual = verify_automorphy(res_, *prob_, cfg_.verify_points, cfg_.seed);
        checks_["automorphy"] = res_.automorphy_residual <= atol;
        for (const auto& spec : cfg_.hecke) {
            auto a_p = expr::eval_complex<R>(*expr::parse(spec.eigenvalue));
            R r = verify_hecke(res_, *prob_, cosets_of(spec), a_p);
            long long label = spec.classical ? spec.prime : (long long)(spec.cosets.size()) - 1;
            res_.hecke_residuals[label] = r;
            checks_["hecke_" + spec.label] = r <= htol;
        }
        bool ok = true;
        for (const auto& [name, passed] : checks_)
            ok = ok && passed;
        return ok;
    }

    nlohmann::json postprocess() {
        nlohmann::json extras = nlohmann::json::object();
        if (cfg_.period_pairs.empty())
            return extras;
        if (cfg_.weight != 2)
            throw std::runtime_error("period integrals need weight 2");
        std::vector<complex_of<R>> periods;
        nlohmann::json parr = nlohmann::json::array();
        for (auto [from, to] : cfg_.period_pairs) {
            if (from < 0 || to < 0 || std::size_t(from) >= domain_->vertices.size() ||
                std::size_t(to) >= domain_->vertices.size())
                throw std::runtime_error("period_pairs index outside the vertex list");
            auto v1 = DiscPoint<R>(domain_->vertices[std::size_t(from)]);
            auto v2 = DiscPoint<R>(domain_->vertices[std::size_t(to)]);
            // vertices sit within the validated radius since R >= rho
            complex_of<R> val =
                period_integral(res_, v1, v2, std::max(prob_->radius, domain_->rho_geometric));
            periods.push_back(val);
            parr.push_back(detail::complex_json<R>(val));
        }
        extras["periods"] = parr;
        if (periods.size() == 2) {
            PeriodLattice<R> L(periods[0], periods[1]);
            extras["tau"] = detail::complex_json<R>(L.tau);
            extras["j_invariant"] = detail::complex_json<R>(j_from_lattice(L));
        }
        return extras;
    }

    nlohmann::json base_json() const {
        nlohmann::json j;
        j["precision_digits"] = cfg_.digits;
        j["rho"] = to_decimal_string(domain_->rho());
        j["converged"] = domain_->converged;
        j["free_boundary"] = domain_->has_free_boundary;
        nlohmann::json t = nlohmann::json::object();
        for (const auto& [k, ms] : clock_.timings())
            t[k] = ms;
        j["timings_ms"] = t;
        return j;
    }

    nlohmann::json result_json() const {
        nlohmann::json j = base_json();
        j["N"] = prob_->N;
        j["Q"] = prob_->Q;
        j["R"] = to_decimal_string(prob_->radius);
        j["scaled"] = false; // coefficients below are the b_n themselves
        nlohmann::json coeffs = nlohmann::json::array();
        for (const auto& b : res_.b)
            coeffs.push_back(detail::complex_json<R>(b));
        j["coefficients"] = coeffs;
        j["theta"] = res_.theta ? detail::complex_json<R>(*res_.theta) : nlohmann::json();
        if (res_.c) {
            nlohmann::json c = nlohmann::json::array();
            for (const auto& v : *res_.c)
                c.push_back(detail::complex_json<R>(v));
            j["c"] = c;
        } else {
            j["c"] = nlohmann::json();
        }
        if (!res_.theta_provenance.empty())
            j["theta_provenance"] = res_.theta_provenance;
        nlohmann::json sv = nlohmann::json::array();
        for (const auto& s : res_.singular_values)
            sv.push_back(to_decimal_string(s));
        j["singular_values"] = sv;
        if (res_.kernel_dimension)
            j["kernel_dimension"] = *res_.kernel_dimension;
        if (res_.kernel_quality)
            j["kernel_quality"] = to_decimal_string(*res_.kernel_quality);
        nlohmann::json resid;
        resid["automorphy"] = to_decimal_string(res_.automorphy_residual);
        nlohmann::json hk = nlohmann::json::object();
        for (const auto& [p, r] : res_.hecke_residuals)
            hk[std::to_string(p)] = to_decimal_string(r);
        resid["hecke"] = hk;
        j["residuals"] = resid;
        return j;
    }

    RunArtifacts execute_oracle() {
        if (cfg_.oracle != "eta11")
            throw ConfigError("oracle must be 'eta11'");
        RunArtifacts art;
        clock_.start("oracle");
        auto f = eta_product_expansion(cfg_.oracle_terms);
        HalfPlanePoint<R> p(expr::eval_complex<R>(*expr::parse(cfg_.center)));
        res_ = power_series_from_qexp(f, p, cfg_.oracle_n, prec_);
        res_ = normalize_cm(res_, theta_override());
        clock_.stop();

        nlohmann::json j;
        j["status"] = "ok";
        j["precision_digits"] = cfg_.digits;
        j["rho"] = to_decimal_string(R(0));
        j["N"] = cfg_.oracle_n;
        j["Q"] = 0;
        j["R"] = to_decimal_string(res_.radius);
        j["scaled"] = false;
        nlohmann::json coeffs = nlohmann::json::array();
        for (const auto& b : res_.b)
            coeffs.push_back(detail::complex_json<R>(b));
        j["coefficients"] = coeffs;
        j["theta"] = res_.theta ? detail::complex_json<R>(*res_.theta) : nlohmann::json();
        nlohmann::json c = nlohmann::json::array();
        for (const auto& v : *res_.c)
            c.push_back(detail::complex_json<R>(v));
        j["c"] = c;
        j["theta_provenance"] = res_.theta_provenance;
        j["singular_values"] = nlohmann::json::array();
        j["residuals"] = {{"automorphy", to_decimal_string(R(0))},
                          {"hecke", nlohmann::json::object()}};
        nlohmann::json t = nlohmann::json::object();
        for (const auto& [k, ms] : clock_.timings())
            t[k] = ms;
        j["timings_ms"] = t;
        art.result = j;
        art.verifications_passed = true;
        append_log(art);
        return art;
    }

    void append_log(RunArtifacts& art) const {
        std::ostringstream os;
        os << "digits " << cfg_.digits << "\n";
        if (domain_) {
            os << "rho " << to_decimal_string(domain_->rho()) << " sides "
               << domain_->side_count() << " vertices " << domain_->vertices.size()
               << " converged " << domain_->converged << " free_boundary "
               << domain_->has_free_boundary << "\n";
        }
        if (prob_)
            os << "N " << prob_->N << " Q " << prob_->Q << " radius "
               << to_decimal_string(prob_->radius) << " unit_automorphy "
               << prob_->use_unit_automorphy << "\n";
        if (!res_.singular_values.empty()) {
            os << "singular values (top, bottom):\n";
            std::size_t n = res_.singular_values.size();
            for (std::size_t i = 0; i < std::min<std::size_t>(5, n); ++i)
                os << "  sigma[" << i << "] = " << to_decimal_string(res_.singular_values[i])
                   << "\n";
            for (std::size_t i = n >= 5 ? n - 5 : 0; i < n; ++i)
                os << "  sigma[" << i << "] = " << to_decimal_string(res_.singular_values[i])
                   << "\n";
        }
        for (const auto& [name, passed] : checks_)
            os << "check " << name << ": " << (passed ? "pass" : "FAIL") << "\n";
        for (const auto& note : notes_)
            os << "note: " << note << "\n";
        for (const auto& [k, ms] : clock_.timings())
            os << "timing " << k << " " << ms << " ms\n";
        art.log = os.str();
    }
};

// Dispatch over the precision ladder: double up to 15 digits, then the
// extended backends.
inline RunArtifacts run_pipeline(const RunConfig& cfg, RunMode mode = RunMode::full) {
    if (cfg.digits < 15)
        throw ConfigError("digits must be at least 15");
    if (cfg.digits <= 15)
        return PipelineRun<double>(cfg, mode).execute();
#ifndef PSMF_NO_EXTENDED
    if (cfg.digits <= 30)
        return PipelineRun<real30>(cfg, mode).execute();
    if (cfg.digits <= 50)
        return PipelineRun<real50>(cfg, mode).execute();
    throw ConfigError("digits beyond 50 are not supported");
#else
    throw ConfigError("extended precision backends are disabled in this build");
#endif
}

inline bool verify_pipeline_result(const RunConfig& cfg, const nlohmann::json& result,
                                   std::string& report) {
    if (cfg.digits <= 15)
        return PipelineRun<double>(cfg, RunMode::full).verify_existing(result, report);
#ifndef PSMF_NO_EXTENDED
    if (cfg.digits <= 30)
        return PipelineRun<real30>(cfg, RunMode::full).verify_existing(result, report);
    if (cfg.digits <= 50)
        return PipelineRun<real50>(cfg, RunMode::full).verify_existing(result, report);
#endif
    throw ConfigError("unsupported digit count for verification");
}

} // namespace psmf

#endif
