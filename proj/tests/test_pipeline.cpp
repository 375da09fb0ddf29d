#include <catch2/catch_amalgamated.hpp>

#include "psmf/pipeline.hpp"
#include "support.hpp"

using namespace psmf;

namespace {

RunConfig disc6_config() {
    return parse_config_file(std::string(PSMF_CONFIG_DIR) + "/disc6_weight4.cfg");
}

} // namespace

TEST_CASE("disc-6 pipeline run: status, kernel, coefficients") {
    auto cfg = disc6_config();
    auto art = run_pipeline(cfg);
    REQUIRE(art.result["status"] == "ok");
    CHECK(art.verifications_passed);
    CHECK(art.result["N"] == 35);
    CHECK(art.result["Q"] == 70);
    CHECK(art.result["kernel_dimension"] == 1);
    CHECK(art.result["scaled"] == false);

    double rho = std::stod(art.result["rho"].get<std::string>());
    CHECK(rho == Catch::Approx(0.447213).margin(5e-7));

    // coefficients against the known expansion, in the scaled metric
    auto exact = testsupport::disc6_exact_b<double>();
    auto coeffs = art.result["coefficients"];
    REQUIRE(coeffs.size() == 36);
    double rp = 1, worst = 0;
    for (std::size_t n = 0; n < exact.size(); ++n) {
        double re = std::stod(coeffs[n][0].get<std::string>());
        double im = std::stod(coeffs[n][1].get<std::string>());
        worst = std::max(worst, rp * std::abs(std::complex<double>(re, im) - exact[n]));
        rp *= rho;
    }
    CHECK(worst < 1e-11);

    // normalized coefficients are produced and real to working accuracy
    REQUIRE(!art.result["c"].is_null());
    CHECK(art.result["theta_provenance"] == "external");

    // automorphy check ran and is small
    double resid = std::stod(art.result["residuals"]["automorphy"].get<std::string>());
    CHECK(resid < 1e-10);
}

TEST_CASE("pipeline output is deterministic") {
    auto cfg = disc6_config();
    cfg.N = 12; // keep it quick
    cfg.Q = 24;
    auto a1 = run_pipeline(cfg);
    auto a2 = run_pipeline(cfg);
    CHECK(a1.result["coefficients"].dump() == a2.result["coefficients"].dump());
    CHECK(a1.result["singular_values"].dump() == a2.result["singular_values"].dump());
}

TEST_CASE("svg vertex list mirrors the domain vertices in order") {
    auto cfg = disc6_config();
    auto art = run_pipeline(cfg, RunMode::domain_only);
    REQUIRE(art.result["status"] == "ok");

    // vertex coordinates from the text export
    std::vector<std::pair<double, double>> verts;
    std::istringstream dt(art.domain_text);
    std::string line;
    while (std::getline(dt, line)) {
        if (line.rfind("vertex ", 0) != 0)
            continue;
        std::istringstream ls(line);
        std::string word;
        int idx;
        double re, im;
        ls >> word >> idx >> re >> im;
        verts.emplace_back(re, im);
    }
    REQUIRE(!verts.empty());

    // circle elements of class "vertex" in the svg, in the same order
    std::size_t pos = 0;
    std::size_t count = 0;
    const double size = 640.0, cx = size / 2, cy = size / 2, scale = size / 2.2;
    while ((pos = art.svg.find("class='vertex'", pos)) != std::string::npos) {
        auto cxp = art.svg.find("cx='", pos);
        auto cyp = art.svg.find("cy='", pos);
        REQUIRE(cxp != std::string::npos);
        double x = std::stod(art.svg.substr(cxp + 4));
        double y = std::stod(art.svg.substr(cyp + 4));
        REQUIRE(count < verts.size());
        CHECK(x == Catch::Approx(cx + scale * verts[count].first).margin(1e-3));
        CHECK(y == Catch::Approx(cy - scale * verts[count].second).margin(1e-3));
        ++count;
        ++pos;
    }
    CHECK(count == verts.size());
}

TEST_CASE("verify subcommand logic accepts its own output and rejects corruption") {
    auto cfg = disc6_config();
    cfg.N = 20;
    cfg.Q = 40;
    auto art = run_pipeline(cfg);
    REQUIRE(art.result["status"] == "ok");

    std::string report;
    CHECK(verify_pipeline_result(cfg, art.result, report));
    CHECK(report.find("automorphy residual") != std::string::npos);

    auto corrupted = art.result;
    corrupted["coefficients"][5][0] = "0.25";
    CHECK_FALSE(verify_pipeline_result(cfg, corrupted, report));
}

TEST_CASE("oracle mode emits the normalized integers") {
    auto cfg = parse_config_file(std::string(PSMF_CONFIG_DIR) + "/gamma0_11_oracle.cfg");
#ifdef PSMF_NO_EXTENDED
    cfg.digits = 15;
#endif
    auto art = run_pipeline(cfg, RunMode::oracle);
    REQUIRE(art.result["status"] == "ok");
    const double targets[6] = {1, 1, 5, -123, -59, -6435};
    for (int n = 0; n <= 5; ++n) {
        double re = std::stod(art.result["c"][std::size_t(n)][0].get<std::string>());
        CHECK(std::abs(re - targets[n]) < 1e-6);
    }
}

TEST_CASE("hecke rows from an include file participate in the run") {
    std::istringstream in(R"(
group = quaternion
quaternion_a = 3
quaternion_b = -1
order_basis = 1; alpha; beta; (1+alpha+beta+alpha*beta)/2
unit_height = 3
center = ((sqrt(6)-sqrt(2))/2)*i
weight = 4
digits = 15
n = 20
q = 40
signature = 0;2,2,3,3
include hecke_identity.txt
)");
    auto cfg = parse_config_stream(in, "inline.cfg", std::string(PSMF_TEST_DATA_DIR));
    REQUIRE(cfg.hecke.size() == 1);
    auto art = run_pipeline(cfg);
    CHECK(art.result["status"] == "ok");
    // tautological operator: residual is zero out of the box
    auto hecke = art.result["residuals"]["hecke"];
    REQUIRE(hecke.size() == 1);
    for (auto& [k, v] : hecke.items())
        CHECK(std::stod(v.get<std::string>()) < 1e-12);
}

TEST_CASE("config errors carry diagnostics") {
    CHECK_THROWS_AS(parse_config_file(std::string(PSMF_TEST_DATA_DIR) + "/malformed.cfg"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}
