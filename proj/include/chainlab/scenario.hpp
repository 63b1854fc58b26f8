#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chainlab/io.hpp"

namespace chainlab {

enum class Analysis { ergodicity, class_ergodicity, certificates, aif, islands, lyapunov, simulate };

const char* to_string(Analysis a);
std::optional<Analysis> analysis_from_name(const std::string& name);

enum class Theorem { T2, T3, T4 };

const char* to_string(Theorem t);

struct Tolerances {
    double span = kDefaultSpanTol;
    double cluster = kDefaultClusterTol;
    double row = kDefaultRowTol;
};

struct Scenario {
    io::json chain;  ///< inline spec, generator spec, or a path string
    std::filesystem::path base_dir;  ///< relative chain paths resolve here
    std::vector<Analysis> analyses;
    std::optional<std::size_t> horizon;  ///< defaults to the chain's own horizon
    std::size_t start = 0;
    std::vector<std::size_t> starts;     ///< ergodicity probe starts; {start} when empty
    Tolerances tol;
    std::optional<StateVector> x0;
    std::optional<std::size_t> cluster_window;  ///< max(1, N/10) when unset
    FlowVariant flow_variant = FlowVariant::full;
    FlowThresholds flow_thresholds;
    DivergenceRule divergence;
    std::optional<std::vector<Theorem>> cross_checks;  ///< defaults from the analyses
    std::optional<std::uint64_t> seed;
    std::filesystem::path output_dir;

    bool wants(Analysis a) const;
};

/// Throws ManifestError naming the offending field.
Scenario parse_scenario(const io::json& manifest, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

struct TheoremCrossCheck {
    Theorem theorem = Theorem::T2;
    std::string prediction;
    std::string observation;
    bool agreement = true;
    std::string note;
};

struct IslandAnalysis {
    InteractionGraph graph;
    IslandPartition partition;
    std::vector<IslandFlow> flows;
};

struct LyapunovAnalysis {
    bool applicable = false;
    std::optional<LyapunovSeries> series;
    std::optional<MonotonicityReport> monotonicity;
};

struct ScenarioResult {
    Scenario scenario;
    std::size_t horizon = 0;
    io::LoadedChain chain;
    std::optional<CertificateReport> certificates;
    std::optional<FlowProfile> flow;
    std::optional<IslandAnalysis> islands;
    std::vector<ErgodicityVerdict> ergodicity;  ///< one per start
    std::optional<ErgodicityVerdict> class_ergodicity;
    std::optional<Trajectory> trajectory;
    std::optional<ClusterReport> clusters;
    std::optional<LyapunovAnalysis> lyapunov;
    std::optional<models::FlockingCheck> flocking;
    std::vector<TheoremCrossCheck> cross_checks;

    /// 0 when every cross-check agrees, 2 otherwise.
    int exit_code() const;
    /// Ergodic only when every start is.
    std::optional<VerdictKind> ergodicity_kind() const;
};

/// Runs analyses in dependency order, independent ones concurrently.
ScenarioResult run_scenario(const Scenario& scenario);

/// Throws MissingArtifact when the result lacks an input the theorem needs.
TheoremCrossCheck cross_check(Theorem theorem, const ScenarioResult& result);

io::json summary_json(const ScenarioResult& result);

/// Writes summary.json plus the CSV/JSON artifacts of the analyses that ran.
/// Returns the file names written, in order.
std::vector<std::string> emit_reports(const ScenarioResult& result, const std::filesystem::path& dir);

}  // namespace chainlab
