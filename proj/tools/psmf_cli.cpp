// Batch front-end: compute expansions, verify stored results, run the
// level-11 q-expansion oracle, or just plot a fundamental domain.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "psmf/pipeline.hpp"

namespace {

int write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return 1;
    }
    out << content;
    return 0;
}

void apply_overrides(psmf::RunConfig& cfg, int digits, int n, int q,
                     const std::string& quadrature, long long seed) {
    if (digits > 0)
        cfg.digits = digits;
    if (n > 0)
        cfg.N = n;
    if (q > 0)
        cfg.Q = q;
    if (!quadrature.empty()) {
        if (quadrature == "riemann")
            cfg.quadrature = psmf::QuadratureKind::riemann;
        else if (quadrature == "simpson")
            cfg.quadrature = psmf::QuadratureKind::simpson;
        else
            throw psmf::ConfigError("--quadrature must be riemann or simpson");
    }
    if (seed >= 0)
        cfg.seed = std::uint64_t(seed);
}

int emit(const psmf::RunArtifacts& art, const std::string& outdir) {
    int rc = 0;
    rc |= write_file(outdir + "/result.json", art.result.dump(2) + "\n");
    rc |= write_file(outdir + "/run.log", art.log);
    if (!art.svg.empty())
        rc |= write_file(outdir + "/domain.svg", art.svg);
    if (!art.domain_text.empty())
        rc |= write_file(outdir + "/domain.txt", art.domain_text);
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"power series expansions of modular forms on Fuchsian groups"};
    app.require_subcommand(1);

    std::string config_path, result_path, outdir = ".", quadrature;
    int digits = 0, n = 0, q = 0;
    long long seed = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "run configuration file")->required();
        sub->add_option("-o,--out", outdir, "output directory (default: .)");
        sub->add_option("--digits", digits, "override working precision");
        sub->add_option("--seed", seed, "override verification sampling seed");
    };

    auto* compute = app.add_subcommand("compute", "run the expansion pipeline");
    add_common(compute);
    compute->add_option("--n", n, "override truncation degree N");
    compute->add_option("--q", q, "override quadrature parameter Q");
    compute->add_option("--quadrature", quadrature, "riemann or simpson");

    auto* verify = app.add_subcommand("verify", "re-check a stored result against its config");
    verify->add_option("config", config_path, "run configuration file")->required();
    verify->add_option("result", result_path, "result.json from a compute run")->required();
    verify->add_option("--digits", digits, "override working precision");
    verify->add_option("--seed", seed, "override verification sampling seed");

    auto* oracle = app.add_subcommand("oracle-qexp", "run the level-11 q-expansion oracle");
    add_common(oracle);

    auto* domain = app.add_subcommand("domain", "compute the fundamental domain and its plot");
    add_common(domain);

    CLI11_PARSE(app, argc, argv);

    psmf::RunConfig cfg;
    try {
        cfg = psmf::parse_config_file(config_path);
        apply_overrides(cfg, digits, n, q, quadrature, seed);
    } catch (const psmf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(verify)) {
            std::ifstream in(result_path);
            if (!in) {
                std::cerr << "cannot read " << result_path << "\n";
                return 2;
            }
            nlohmann::json result = nlohmann::json::parse(in);
            std::string report;
            bool ok = psmf::verify_pipeline_result(cfg, result, report);
            std::cout << report;
            std::cout << (ok ? "verification passed" : "verification FAILED") << "\n";
            return ok ? 0 : 1;
        }

        psmf::RunMode mode = psmf::RunMode::full;
        if (app.got_subcommand(oracle))
            mode = psmf::RunMode::oracle;
        if (app.got_subcommand(domain))
            mode = psmf::RunMode::domain_only;

        auto art = psmf::run_pipeline(cfg, mode);
        int rc = emit(art, outdir);
        if (rc)
            return 1;
        std::cout << art.log;
        if (!art.verifications_passed) {
            std::cerr << "one or more verifications failed (see run.log)\n";
            return 1;
        }
        return 0;
    } catch (const psmf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        // partial results still land on disk with an error status
        nlohmann::json j;
        j["status"] = std::string("error: ") + e.what();
        write_file(outdir + "/result.json", j.dump(2) + "\n");
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
