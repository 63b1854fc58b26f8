#include "chainlab/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "chainlab/error.hpp"

namespace chainlab::io {

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

json extended_real(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    return v;
}

double extended_real_from(const json& j) {
    if (j.is_string()) {
        if (j == "inf") return std::numeric_limits<double>::infinity();
        if (j == "-inf") return -std::numeric_limits<double>::infinity();
    }
    if (!j.is_number()) throw ManifestError("value", "expected a number or \"inf\"");
    return j.get<double>();
}

namespace {

double parse_double(std::string_view text, const std::string& where) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw IoError("cannot parse number '" + std::string(text) + "' at " + where);
    return v;
}

}  // namespace

Matrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            const std::string_view cell(line.data() + pos, (comma == std::string::npos ? line.size() : comma) - pos);
            row.push_back(parse_double(cell, "line " + std::to_string(line_no)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("empty matrix CSV");
    return Matrix::from_rows(rows);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
    for (std::size_t i = 0; i < m.order(); ++i) {
        for (std::size_t j = 0; j < m.order(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.order(); ++i) {
        json r = json::array();
        for (double v : m.row(i)) r.push_back(v);
        rows.push_back(std::move(r));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ManifestError(field, "expected a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : j) {
        if (!r.is_array()) throw ManifestError(field, "expected an array of rows");
        std::vector<double> row;
        for (const auto& v : r) {
            if (!v.is_number()) throw ManifestError(field, "matrix entries must be numbers");
            row.push_back(v.get<double>());
        }
        rows.push_back(std::move(row));
    }
    try {
        return Matrix::from_rows(rows);
    } catch (const NotSquare& e) {
        throw ManifestError(field, e.what());
    }
}

json subset_to_json(SubsetMask mask, std::size_t order) {
    json out = json::array();
    for (std::size_t i : members(mask, order)) out.push_back(i + 1);
    return out;
}

json partition_to_json(const Partition& p) {
    json out = json::array();
    for (const auto& block : p) {
        json b = json::array();
        for (std::size_t i : block) b.push_back(i + 1);
        out.push_back(std::move(b));
    }
    return out;
}

json chain_to_manifest(const ChainSource& chain, std::size_t N) {
    json j;
    j["schema"] = kSchemaVersion;
    j["order"] = chain.order();
    j["name"] = chain.name();
    json mats = json::array();
    for (const auto& m : chain.take(N)) mats.push_back(matrix_to_json(m.matrix()));
    j["matrices"] = std::move(mats);
    if (chain.declared_unbounded()) {
        json edges = json::array();
        for (const auto& [a, b] : *chain.declared_unbounded()) edges.push_back({a + 1, b + 1});
        j["unbounded_edges"] = std::move(edges);
    }
    return j;
}

namespace {

const json& require(const json& obj, const std::string& key, const std::string& prefix) {
    if (!obj.is_object() || !obj.contains(key)) throw ManifestError(prefix + key, "missing");
    return obj.at(key);
}

double number_field(const json& obj, const std::string& key, const std::string& prefix) {
    const json& v = require(obj, key, prefix);
    if (!v.is_number()) throw ManifestError(prefix + key, "expected a number");
    return v.get<double>();
}

std::size_t count_field(const json& obj, const std::string& key, const std::string& prefix) {
    const json& v = require(obj, key, prefix);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw ManifestError(prefix + key, "expected a positive integer");
    return v.get<std::size_t>();
}

StateVector state_field(const json& obj, const std::string& key, const std::string& prefix) {
    const json& v = require(obj, key, prefix);
    if (!v.is_array() || v.empty()) throw ManifestError(prefix + key, "expected a non-empty array of numbers");
    StateVector x;
    for (const auto& e : v) {
        if (!e.is_number()) throw ManifestError(prefix + key, "expected numbers");
        x.push_back(e.get<double>());
    }
    return x;
}

std::vector<models::Vec3> vec3_field(const json& obj, const std::string& key, const std::string& prefix) {
    const json& v = require(obj, key, prefix);
    if (!v.is_array() || v.empty()) throw ManifestError(prefix + key, "expected an array of 3-vectors");
    std::vector<models::Vec3> out;
    for (const auto& e : v) {
        if (!e.is_array() || e.size() != 3) throw ManifestError(prefix + key, "each entry must have 3 numbers");
        models::Vec3 p{};
        for (std::size_t d = 0; d < 3; ++d) {
            if (!e[d].is_number()) throw ManifestError(prefix + key, "expected numbers");
            p[d] = e[d].get<double>();
        }
        out.push_back(p);
    }
    return out;
}

std::vector<Edge> edges_field(const json& j, std::size_t order, const std::string& field) {
    if (!j.is_array()) throw ManifestError(field, "expected an array of [i, j] pairs");
    std::vector<Edge> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw ManifestError(field, "expected [i, j] integer pairs");
        const long long a = e[0].get<long long>();
        const long long b = e[1].get<long long>();
        if (a < 1 || b < 1 || a > static_cast<long long>(order) || b > static_cast<long long>(order))
            throw ManifestError(field, "agent index out of range 1..order");
        out.emplace_back(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
    }
    return out;
}

std::size_t horizon_of(const json& spec, const ChainLoadOptions& options) {
    if (spec.contains("horizon")) return count_field(spec, "horizon", "chain.");
    if (options.default_horizon == 0) throw ManifestError("chain.horizon", "missing and no default horizon given");
    return options.default_horizon;
}

StochasticMatrix validated(const Matrix& m, double tol, const std::string& field) {
    try {
        return StochasticMatrix::validate(m, tol);
    } catch (const NegativeEntry& e) {
        throw ManifestError(field, e.what());
    } catch (const RowSumViolation& e) {
        throw ManifestError(field, e.what());
    }
}

}  // namespace

LoadedChain load_chain(const json& spec, const ChainLoadOptions& options) {
    if (!spec.is_object()) throw ManifestError("chain", "expected an object");
    if (spec.contains("schema") && spec.at("schema") != kSchemaVersion)
        throw ManifestError("chain.schema", "unsupported schema version");
    LoadedChain out;

    if (spec.contains("matrices")) {
        const json& mats = spec.at("matrices");
        if (!mats.is_array() || mats.empty()) throw ManifestError("chain.matrices", "expected a non-empty array");
        std::vector<StochasticMatrix> list;
        for (std::size_t n = 0; n < mats.size(); ++n) {
            const std::string field = "chain.matrices[" + std::to_string(n) + "]";
            list.push_back(validated(matrix_from_json(mats[n], field), options.tol_row, field));
        }
        const std::size_t s = list.front().order();
        for (const auto& m : list)
            if (m.order() != s) throw ManifestError("chain.matrices", "matrices differ in order");
        out.chain = ChainSource::from_matrices(std::move(list), spec.value("name", std::string("inline")));
        out.generator = "inline";
        if (spec.contains("unbounded_edges"))
            out.chain = out.chain.with_declared_unbounded(edges_field(spec.at("unbounded_edges"), s, "chain.unbounded_edges"));
        return out;
    }

    const json& gen = require(spec, "generator", "chain.");
    if (!gen.is_string()) throw ManifestError("chain.generator", "expected a string");
    out.generator = gen.get<std::string>();
    const json params = spec.value("params", json::object());
    const std::string p = "chain.params.";

    std::uint64_t seed = 0;
    if (spec.contains("seed")) {
        if (!spec.at("seed").is_number_unsigned()) throw ManifestError("chain.seed", "expected a nonnegative integer");
        seed = spec.at("seed").get<std::uint64_t>();
    }
    if (options.seed) seed = *options.seed;

    if (auto ex = models::fixture_from_name(out.generator)) {
        out.chain = models::fixture_chain(*ex);
    } else if (out.generator == "identity") {
        out.chain = models::identity_chain(count_field(params, "order", p));
    } else if (out.generator == "constant") {
        out.chain = ChainSource::constant(
            validated(matrix_from_json(require(params, "matrix", p), p + "matrix"), options.tol_row, p + "matrix"));
    } else if (out.generator == "random_doubly_stochastic") {
        const std::size_t s = count_field(params, "order", p);
        const std::size_t mix = params.contains("mix") ? count_field(params, "mix", p) : 2;
        out.chain = models::random_doubly_stochastic_chain(seed, s, horizon_of(spec, options), mix);
    } else if (out.generator == "krause") {
        const double radius = number_field(params, "radius", p);
        if (!(radius > 0.0)) throw ManifestError(p + "radius", "must be positive");
        const std::string kernel = params.value("kernel", std::string("indicator"));
        models::KrauseParams kp;
        if (kernel == "indicator")
            kp.kernel = models::indicator_kernel(radius);
        else if (kernel == "tent")
            kp.kernel = models::tent_kernel(radius);
        else
            throw ManifestError(p + "kernel", "unknown kernel '" + kernel + "'");
        kp.x0 = state_field(params, "x0", p);
        auto run = models::krause_chain(kp, horizon_of(spec, options));
        out.chain = std::move(run.chain);
        out.trajectory = std::move(run.trajectory);
    } else if (out.generator == "jlm") {
        const double radius = number_field(params, "radius", p);
        if (!(radius > 0.0)) throw ManifestError(p + "radius", "must be positive");
        auto run = models::jlm_chain(state_field(params, "x0", p), radius, horizon_of(spec, options));
        out.chain = std::move(run.chain);
        out.trajectory = std::move(run.trajectory);
    } else if (out.generator == "cucker_smale") {
        const json& k = require(params, "kernel", p);
        models::PowerKernel f{number_field(k, "K", p + "kernel."), number_field(k, "sigma", p + "kernel."),
                              number_field(k, "beta", p + "kernel.")};
        if (!(f.K > 0.0) || !(f.sigma > 0.0) || !(f.beta >= 0.0))
            throw ManifestError(p + "kernel", "needs K > 0, sigma > 0, beta >= 0");
        const double h = number_field(params, "h", p);
        if (!(h > 0.0)) throw ManifestError(p + "h", "must be positive");
        auto x0 = vec3_field(params, "x0", p);
        auto v0 = vec3_field(params, "v0", p);
        if (x0.size() != v0.size()) throw ManifestError(p + "v0", "must have one velocity per agent");
        auto cs = models::cucker_smale_params(f, h, std::move(x0), std::move(v0));
        auto run = models::cucker_smale_simulate(cs, horizon_of(spec, options));
        out.chain = run.velocity_chain;
        out.cucker_smale = std::move(run);
        out.cucker_smale_params = std::move(cs);
    } else {
        throw ManifestError("chain.generator", "unknown generator '" + out.generator + "'");
    }
    if (spec.contains("horizon") && !out.chain.is_static()) {
        // Generators with an unbounded domain are truncated to the declared horizon.
        const std::size_t N = count_field(spec, "horizon", "chain.");
        ChainSource base = out.chain;
        out.chain = ChainSource::generator(base.order(), [base](std::size_t n) { return base.at(n); }, N, base.name());
        if (base.declared_unbounded()) out.chain = out.chain.with_declared_unbounded(*base.declared_unbounded());
    }
    if (spec.contains("unbounded_edges"))
        out.chain = out.chain.with_declared_unbounded(
            edges_field(spec.at("unbounded_edges"), out.chain.order(), "chain.unbounded_edges"));
    return out;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ManifestError(path.filename().string(), std::string("invalid JSON: ") + e.what());
    }
}

LoadedChain load_chain_file(const std::filesystem::path& path, const ChainLoadOptions& options) {
    if (path.extension() == ".csv") {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path.string());
        LoadedChain out;
        out.chain = ChainSource::constant(validated(read_matrix_csv(in), options.tol_row, path.filename().string()),
                                          std::nullopt, path.stem().string());
        out.generator = "constant";
        return out;
    }
    json j = read_json_file(path);
    // A scenario manifest works too: take its chain, and its horizon if the chain has none.
    if (j.is_object() && j.contains("chain") && j.at("chain").is_object() && !j.contains("generator") &&
        !j.contains("matrices")) {
        json inner = j.at("chain");
        if (!inner.contains("horizon") && j.contains("horizon")) inner["horizon"] = j.at("horizon");
        j = std::move(inner);
    }
    return load_chain(j, options);
}

namespace {

std::string states_csv(const Trajectory& t, bool sorted) {
    std::ostringstream out;
    const std::size_t s = t.order();
    out << 'n';
    for (std::size_t i = 1; i <= s; ++i) out << ',' << (sorted ? 'z' : 'X') << '_' << i;
    out << '\n';
    for (std::size_t k = 0; k < t.states.size(); ++k) {
        out << t.start + k;
        const auto& row = sorted ? t.sorted[k].z : t.states[k];
        for (double v : row) out << ',' << format_double(v);
        out << '\n';
    }
    return out.str();
}

}  // namespace

std::string trajectory_csv(const Trajectory& t) { return states_csv(t, false); }
std::string sorted_csv(const Trajectory& t) { return states_csv(t, true); }

std::string lyapunov_csv(const LyapunovSeries& series, const MonotonicityReport& mono) {
    std::ostringstream out;
    const std::size_t s = series.order();
    out << 'n';
    for (std::size_t r = 1; r <= s; ++r) out << ",S_" << r;
    for (std::size_t r = 1; r <= s; ++r) out << ",LB_" << r;
    out << '\n';
    for (std::size_t t = 0; t < series.length(); ++t) {
        out << series.start + t;
        for (std::size_t r = 0; r < s; ++r) out << ',' << format_double(series.values[r][t]);
        for (std::size_t r = 0; r < s; ++r) {
            out << ',';
            if (t + 1 < series.length()) out << format_double(mono.lower_bounds[r][t]);
        }
        out << '\n';
    }
    return out.str();
}

std::string flow_csv(const FlowProfile& p) {
    std::ostringstream out;
    out << "n,c,F_c\n";
    for (const auto& mf : p.per_cardinality)
        for (std::size_t n = 0; n < mf.curve.size(); ++n)
            out << n << ',' << mf.cardinality << ',' << format_double(mf.curve[n]) << '\n';
    return out.str();
}

std::string graph_csv(const InteractionGraph& g) {
    std::ostringstream out;
    out << "i,j,W_ij,flagged\n";
    for (std::size_t i = 0; i < g.order; ++i)
        for (std::size_t j = 0; j < g.order; ++j) {
            if (i == j) continue;
            out << i + 1 << ',' << j + 1 << ',' << format_double(g.weights(i, j)) << ','
                << (g.is_unbounded(i, j) ? 1 : 0) << '\n';
        }
    return out.str();
}

json certificates_json(const CertificateReport& r, std::size_t order) {
    json steps = json::array();
    for (std::size_t n = 0; n < r.horizon; ++n) {
        json e;
        e["step"] = n;
        e["M"] = extended_real(r.per_step_M[n].value);
        e["K"] = extended_real(r.per_step_K[n].value);
        e["witness_S1"] = subset_to_json(r.per_step_M[n].s1, order);
        e["witness_S2"] = subset_to_json(r.per_step_M[n].s2, order);
        e["witness_E"] = subset_to_json(r.per_step_K[n].s1, order);
        e["delta_running"] = r.delta_running[n];
        e["doubly_stochastic"] = static_cast<bool>(r.doubly_stochastic[n]);
        steps.push_back(std::move(e));
    }
    json j;
    j["horizon"] = r.horizon;
    j["chain_M"] = extended_real(r.chain_M);
    j["chain_K"] = extended_real(r.chain_K);
    j["delta"] = r.delta;
    j["balanced_asymmetric"] = r.balanced_asymmetric();
    j["steps"] = std::move(steps);
    return j;
}

json flow_profile_json(const FlowProfile& p) {
    json j;
    j["variant"] = to_string(p.variant);
    j["horizon"] = p.horizon;
    j["verdict"] = to_string(p.verdict);
    j["min_over_c"] = p.min_over_c.empty() ? 0.0 : p.min_over_c.back();
    j["argmin_cardinality"] = p.argmin_cardinality;
    j["tail_increase"] = p.tail.increase;
    j["tail_slope"] = p.tail.slope;
    j["tail_log_slope"] = p.tail.log_slope;
    json per = json::array();
    for (const auto& mf : p.per_cardinality) {
        json e;
        e["c"] = mf.cardinality;
        e["F"] = mf.value();
        json seq = json::array();
        for (SubsetMask m : mf.witness.sets) seq.push_back(subset_to_json(m, p.order));
        e["witness"] = std::move(seq);
        per.push_back(std::move(e));
    }
    j["per_cardinality"] = std::move(per);
    return j;
}

json verdict_json(const ErgodicityVerdict& v) {
    json j;
    j["kind"] = to_string(v.kind);
    j["start"] = v.start;
    j["horizon"] = v.horizon;
    j["tolerance"] = v.tolerance;
    j["final_span"] = v.span_curve.empty() ? 0.0 : v.span_curve.back();
    j["clusters"] = partition_to_json(v.clusters);
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << contents;
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace chainlab::io
