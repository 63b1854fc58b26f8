#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "chainlab/certificates.hpp"
#include "chainlab/chain.hpp"
#include "chainlab/dynamics.hpp"
#include "chainlab/flow.hpp"
#include "chainlab/graph.hpp"
#include "chainlab/models.hpp"

namespace chainlab::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string format_double(double v);

/// Extended reals in JSON: finite numbers as numbers, +inf as "inf".
json extended_real(double v);
double extended_real_from(const json& j);

/// Headerless row-major CSV.
Matrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Matrix& m);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& field = "matrix");

json subset_to_json(SubsetMask mask, std::size_t order);  ///< sorted 1-based agents
json partition_to_json(const Partition& p);                ///< 1-based

/// Chain manifest with the first N matrices inline, plus declared edges.
json chain_to_manifest(const ChainSource& chain, std::size_t N);

struct LoadedChain {
    ChainSource chain;
    std::string generator;  ///< "inline" for inline matrices
    std::optional<Trajectory> trajectory;               ///< endogenous generators
    std::optional<models::CuckerSmaleRun> cucker_smale;
    std::optional<models::CuckerSmaleParams> cucker_smale_params;
};

struct ChainLoadOptions {
    std::size_t default_horizon = 0;      ///< used when the spec names none
    std::optional<std::uint64_t> seed;    ///< overrides the spec's seed
    double tol_row = kDefaultRowTol;
};

/// Parses an inline or generator chain spec. Throws ManifestError naming the
/// offending field.
LoadedChain load_chain(const json& spec, const ChainLoadOptions& options);

json read_json_file(const std::filesystem::path& path);
/// A .csv file is read as one matrix repeated forever; anything else as a
/// JSON chain manifest.
LoadedChain load_chain_file(const std::filesystem::path& path, const ChainLoadOptions& options);

// Report encoders. CSV uses LF line endings and a header row.
std::string trajectory_csv(const Trajectory& t);
std::string sorted_csv(const Trajectory& t);
std::string lyapunov_csv(const LyapunovSeries& series, const MonotonicityReport& mono);
std::string flow_csv(const FlowProfile& p);
std::string graph_csv(const InteractionGraph& g);

json certificates_json(const CertificateReport& r, std::size_t order);
json flow_profile_json(const FlowProfile& p);
json verdict_json(const ErgodicityVerdict& v);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace chainlab::io
