#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chainlab/error.hpp"
#include "chainlab/scenario.hpp"

namespace {

struct SharedFlags {
    std::optional<std::size_t> horizon;
    std::optional<double> tol_span;
    std::optional<double> tol_cluster;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

void add_shared(CLI::App* app, SharedFlags& f) {
    app->add_option("--horizon", f.horizon, "Horizon N")->check(CLI::PositiveNumber);
    app->add_option("--tol-span", f.tol_span, "Row-span tolerance for the ergodicity probe")->check(CLI::PositiveNumber);
    app->add_option("--tol-cluster", f.tol_cluster, "Row-distance tolerance for clustering")->check(CLI::PositiveNumber);
    app->add_option("--seed", f.seed, "Seed for random generators");
    app->add_option("--out-dir", f.out_dir, "Report directory");
}

void apply(const SharedFlags& f, chainlab::Scenario& sc) {
    if (f.horizon) sc.horizon = *f.horizon;
    if (f.tol_span) sc.tol.span = *f.tol_span;
    if (f.tol_cluster) sc.tol.cluster = *f.tol_cluster;
    if (f.seed) sc.seed = *f.seed;
}

// --out-dir, then CHAINLAB_OUT_DIR, then the manifest's own setting.
std::filesystem::path output_dir(const SharedFlags& f, const chainlab::Scenario& sc) {
    if (!f.out_dir.empty()) return f.out_dir;
    if (const char* env = std::getenv("CHAINLAB_OUT_DIR"); env && *env) return env;
    return sc.output_dir;
}

chainlab::Scenario chain_scenario(const std::string& chain_path, std::vector<chainlab::Analysis> analyses) {
    chainlab::Scenario sc;
    sc.chain = chain_path;
    sc.analyses = std::move(analyses);
    sc.cross_checks = std::vector<chainlab::Theorem>{};
    return sc;
}

int execute(chainlab::Scenario sc, const SharedFlags& flags, bool print_summary) {
    apply(flags, sc);
    const chainlab::ScenarioResult result = chainlab::run_scenario(sc);
    const auto dir = output_dir(flags, sc);
    if (!dir.empty()) {
        for (const auto& name : chainlab::emit_reports(result, dir)) std::cerr << "wrote " << (dir / name).string() << '\n';
    }
    if (print_summary || dir.empty()) {
        std::cout << chainlab::summary_json(result).dump(2) << '\n';
    } else {
        for (const auto& c : result.cross_checks)
            std::cout << chainlab::to_string(c.theorem) << ": " << (c.agreement ? "agree" : "DISAGREE")
                      << " (predicted " << c.prediction << ", observed " << c.observation << ")\n";
    }
    return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Consensus chain analysis: ergodicity probes, flow certificates, islands and Lyapunov checks"};
    app.require_subcommand(1);

    SharedFlags run_flags, cert_flags, flow_flags, sim_flags;
    std::string manifest, cert_chain, flow_chain, sim_chain, variant = "full";
    std::vector<double> x0;
    bool lyapunov = false;

    auto* run = app.add_subcommand("run", "Run a scenario manifest");
    run->add_option("manifest", manifest, "Scenario manifest (JSON)")->required();
    add_shared(run, run_flags);

    auto* cert = app.add_subcommand("certify", "Balanced-asymmetry, cut-balance and self-confidence certificates");
    cert->add_option("chain", cert_chain, "Chain manifest (JSON) or matrix (CSV)")->required();
    add_shared(cert, cert_flags);

    auto* flow = app.add_subcommand("flow", "Minimal subset flows and the unbounded interactions graph");
    flow->add_option("chain", flow_chain, "Chain manifest (JSON) or matrix (CSV)")->required();
    flow->add_option("--variant", variant, "full or reduced")->check(CLI::IsMember({"full", "reduced"}));
    add_shared(flow, flow_flags);

    auto* sim = app.add_subcommand("simulate", "Trajectory, sorted states and cluster detection");
    sim->add_option("chain", sim_chain, "Chain manifest (JSON) or matrix (CSV)")->required();
    sim->add_option("--x0", x0, "Initial state")->delimiter(',');
    sim->add_flag("--lyapunov", lyapunov, "Also evaluate the Lyapunov partial sums");
    add_shared(sim, sim_flags);

    CLI11_PARSE(app, argc, argv);

    using chainlab::Analysis;
    try {
        if (run->parsed()) return execute(chainlab::load_scenario(manifest), run_flags, false);
        if (cert->parsed()) return execute(chain_scenario(cert_chain, {Analysis::certificates}), cert_flags, true);
        if (flow->parsed()) {
            auto sc = chain_scenario(flow_chain, {Analysis::aif, Analysis::islands});
            sc.flow_variant = variant == "reduced" ? chainlab::FlowVariant::reduced : chainlab::FlowVariant::full;
            return execute(std::move(sc), flow_flags, true);
        }
        if (sim->parsed()) {
            std::vector<Analysis> analyses{Analysis::simulate};
            if (lyapunov) analyses.push_back(Analysis::lyapunov);
            auto sc = chain_scenario(sim_chain, std::move(analyses));
            if (!x0.empty()) sc.x0 = x0;
            return execute(std::move(sc), sim_flags, true);
        }
    } catch (const chainlab::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
