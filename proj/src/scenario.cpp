#include "chainlab/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <future>

#include "chainlab/error.hpp"

namespace chainlab {

namespace {

constexpr Analysis kAllAnalyses[] = {Analysis::ergodicity, Analysis::class_ergodicity, Analysis::certificates,
                                     Analysis::aif,        Analysis::islands,          Analysis::lyapunov,
                                     Analysis::simulate};

}  // namespace

const char* to_string(Analysis a) {
    switch (a) {
        case Analysis::ergodicity: return "ergodicity";
        case Analysis::class_ergodicity: return "class-ergodicity";
        case Analysis::certificates: return "certificates";
        case Analysis::aif: return "aif";
        case Analysis::islands: return "islands";
        case Analysis::lyapunov: return "lyapunov";
        case Analysis::simulate: return "simulate";
    }
    return "?";
}

std::optional<Analysis> analysis_from_name(const std::string& name) {
    for (Analysis a : kAllAnalyses)
        if (name == to_string(a)) return a;
    return std::nullopt;
}

const char* to_string(Theorem t) {
    switch (t) {
        case Theorem::T2: return "T2";
        case Theorem::T3: return "T3";
        case Theorem::T4: return "T4";
    }
    return "?";
}

bool Scenario::wants(Analysis a) const { return std::find(analyses.begin(), analyses.end(), a) != analyses.end(); }

namespace {

using io::json;

std::size_t positive_count(const json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<long long>() <= 0) throw ManifestError(field, "expected a positive integer");
    return v.get<std::size_t>();
}

std::size_t nonnegative_count(const json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ManifestError(field, "expected a nonnegative integer");
    return v.get<std::size_t>();
}

double positive_number(const json& v, const std::string& field) {
    if (!v.is_number() || !(v.get<double>() > 0.0)) throw ManifestError(field, "expected a positive number");
    return v.get<double>();
}

}  // namespace

Scenario parse_scenario(const json& m, const std::filesystem::path& base_dir) {
    if (!m.is_object()) throw ManifestError("manifest", "expected a JSON object");
    if (!m.contains("schema")) throw ManifestError("schema", "missing");
    if (m.at("schema") != io::kSchemaVersion) throw ManifestError("schema", "unsupported schema version");

    Scenario sc;
    sc.base_dir = base_dir;
    if (!m.contains("chain")) throw ManifestError("chain", "missing");
    sc.chain = m.at("chain");
    if (!sc.chain.is_object() && !sc.chain.is_string()) throw ManifestError("chain", "expected an object or a path");

    if (m.contains("analyses")) {
        const json& list = m.at("analyses");
        if (!list.is_array()) throw ManifestError("analyses", "expected an array of names");
        for (const auto& e : list) {
            if (!e.is_string()) throw ManifestError("analyses", "expected an array of names");
            auto a = analysis_from_name(e.get<std::string>());
            if (!a) throw ManifestError("analyses", "unknown analysis '" + e.get<std::string>() + "'");
            if (!sc.wants(*a)) sc.analyses.push_back(*a);
        }
    }
    if (m.contains("horizon")) sc.horizon = positive_count(m.at("horizon"), "horizon");
    if (m.contains("start")) sc.start = nonnegative_count(m.at("start"), "start");
    if (m.contains("starts")) {
        const json& list = m.at("starts");
        if (!list.is_array() || list.empty()) throw ManifestError("starts", "expected a non-empty array");
        for (const auto& e : list) sc.starts.push_back(nonnegative_count(e, "starts"));
    }
    if (m.contains("tolerances")) {
        const json& t = m.at("tolerances");
        if (!t.is_object()) throw ManifestError("tolerances", "expected an object");
        if (t.contains("span")) sc.tol.span = positive_number(t.at("span"), "tolerances.span");
        if (t.contains("cluster")) sc.tol.cluster = positive_number(t.at("cluster"), "tolerances.cluster");
        if (t.contains("row")) sc.tol.row = positive_number(t.at("row"), "tolerances.row");
    }
    if (m.contains("x0")) {
        const json& x = m.at("x0");
        if (!x.is_array() || x.empty()) throw ManifestError("x0", "expected a non-empty array of numbers");
        StateVector v;
        for (const auto& e : x) {
            if (!e.is_number()) throw ManifestError("x0", "expected numbers");
            v.push_back(e.get<double>());
        }
        sc.x0 = std::move(v);
    }
    if (m.contains("cluster_window")) sc.cluster_window = positive_count(m.at("cluster_window"), "cluster_window");
    if (m.contains("flow_variant")) {
        const json& v = m.at("flow_variant");
        if (v == "full")
            sc.flow_variant = FlowVariant::full;
        else if (v == "reduced")
            sc.flow_variant = FlowVariant::reduced;
        else
            throw ManifestError("flow_variant", "expected \"full\" or \"reduced\"");
    }
    if (m.contains("flow_thresholds")) {
        const json& t = m.at("flow_thresholds");
        if (!t.is_object()) throw ManifestError("flow_thresholds", "expected an object");
        if (t.contains("min_total"))
            sc.flow_thresholds.min_total = positive_number(t.at("min_total"), "flow_thresholds.min_total");
        if (t.contains("min_log_slope"))
            sc.flow_thresholds.min_log_slope = positive_number(t.at("min_log_slope"), "flow_thresholds.min_log_slope");
        if (t.contains("zero_tail"))
            sc.flow_thresholds.zero_tail = positive_number(t.at("zero_tail"), "flow_thresholds.zero_tail");
    }
    if (m.contains("divergence")) {
        const json& d = m.at("divergence");
        if (!d.is_object()) throw ManifestError("divergence", "expected an object");
        if (d.contains("tau_abs")) sc.divergence.tau_abs = positive_number(d.at("tau_abs"), "divergence.tau_abs");
        if (d.contains("tau_tail")) sc.divergence.tau_tail = positive_number(d.at("tau_tail"), "divergence.tau_tail");
    }
    if (m.contains("cross_checks")) {
        const json& list = m.at("cross_checks");
        if (!list.is_array()) throw ManifestError("cross_checks", "expected an array");
        std::vector<Theorem> th;
        for (const auto& e : list) {
            if (e == "T2")
                th.push_back(Theorem::T2);
            else if (e == "T3")
                th.push_back(Theorem::T3);
            else if (e == "T4")
                th.push_back(Theorem::T4);
            else
                throw ManifestError("cross_checks", "expected T2, T3 or T4");
        }
        sc.cross_checks = std::move(th);
    }
    if (m.contains("seed")) {
        if (!m.at("seed").is_number_unsigned()) throw ManifestError("seed", "expected a nonnegative integer");
        sc.seed = m.at("seed").get<std::uint64_t>();
    }
    if (m.contains("output_dir")) {
        if (!m.at("output_dir").is_string()) throw ManifestError("output_dir", "expected a string");
        sc.output_dir = m.at("output_dir").get<std::string>();
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(io::read_json_file(path), path.parent_path());
}

namespace {

std::vector<Theorem> default_cross_checks(const Scenario& sc) {
    std::vector<Theorem> out;
    if (sc.wants(Analysis::ergodicity) && sc.wants(Analysis::aif)) out.push_back(Theorem::T2);
    if (sc.wants(Analysis::class_ergodicity) && sc.wants(Analysis::islands)) out.push_back(Theorem::T3);
    if (sc.wants(Analysis::class_ergodicity)) out.push_back(Theorem::T4);
    return out;
}

io::LoadedChain load(const Scenario& sc) {
    io::ChainLoadOptions opts;
    opts.default_horizon = sc.horizon.value_or(0);
    opts.seed = sc.seed;
    opts.tol_row = sc.tol.row;
    if (sc.chain.is_string()) {
        std::filesystem::path p = sc.chain.get<std::string>();
        if (p.is_relative() && !sc.base_dir.empty()) p = sc.base_dir / p;
        return io::load_chain_file(p, opts);
    }
    return io::load_chain(sc.chain, opts);
}

StateVector default_state(const ScenarioResult& r) {
    if (r.scenario.x0) return *r.scenario.x0;
    if (r.chain.trajectory) return r.chain.trajectory->states.front();
    if (r.chain.cucker_smale_params) {
        StateVector x;
        for (const auto& v : r.chain.cucker_smale_params->v0) x.push_back(v[0]);
        return x;
    }
    const std::size_t s = r.chain.chain.order();
    StateVector x(s, 0.0);
    for (std::size_t i = 0; i < s; ++i) x[i] = s == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(s - 1);
    return x;
}

}  // namespace

int ScenarioResult::exit_code() const {
    for (const auto& c : cross_checks)
        if (!c.agreement) return 2;
    return 0;
}

std::optional<VerdictKind> ScenarioResult::ergodicity_kind() const {
    if (ergodicity.empty()) return std::nullopt;
    for (const auto& v : ergodicity)
        if (v.kind != VerdictKind::ergodic) return VerdictKind::undecided_at_horizon;
    return VerdictKind::ergodic;
}

ScenarioResult run_scenario(const Scenario& scenario) {
    ScenarioResult r;
    r.scenario = scenario;
    r.chain = load(scenario);
    const ChainSource& chain = r.chain.chain;
    if (scenario.horizon)
        r.horizon = *scenario.horizon;
    else if (chain.horizon())
        r.horizon = *chain.horizon();
    else
        throw ManifestError("horizon", "missing and the chain has no finite horizon");
    const std::size_t N = r.horizon;
    chain.require_defined_until(N);
    if (scenario.start >= N) throw ManifestError("start", "must be smaller than the horizon");
    for (std::size_t k : scenario.starts)
        if (k >= N) throw ManifestError("starts", "every start must be smaller than the horizon");

    const std::vector<Theorem> checks = scenario.cross_checks.value_or(default_cross_checks(scenario));
    auto needs = [&](Theorem t) { return std::find(checks.begin(), checks.end(), t) != checks.end(); };
    const bool want_cert = scenario.wants(Analysis::certificates) || scenario.wants(Analysis::lyapunov) ||
                           needs(Theorem::T2) || needs(Theorem::T4);
    const bool want_flow = scenario.wants(Analysis::aif) || needs(Theorem::T2);
    const bool want_islands = scenario.wants(Analysis::islands) || needs(Theorem::T3);
    const bool want_erg = scenario.wants(Analysis::ergodicity) || needs(Theorem::T2);
    const bool want_class = scenario.wants(Analysis::class_ergodicity) || needs(Theorem::T3) || needs(Theorem::T4);
    const bool want_sim = scenario.wants(Analysis::simulate) || scenario.wants(Analysis::lyapunov);

    const auto policy = std::launch::async;
    std::future<CertificateReport> cert;
    std::future<FlowProfile> flow;
    std::future<IslandAnalysis> isl;
    std::future<std::vector<ErgodicityVerdict>> erg;
    std::future<ErgodicityVerdict> cls;
    std::future<Trajectory> sim;

    if (want_cert) cert = std::async(policy, [&] { return certify(chain, N); });
    if (want_flow)
        flow = std::async(policy, [&] { return aif_profile(chain, N, scenario.flow_variant, scenario.flow_thresholds); });
    if (want_islands)
        isl = std::async(policy, [&] {
            IslandAnalysis a;
            a.graph = unbounded_graph(chain, N, scenario.divergence);
            a.partition = islands(a.graph);
            a.flows = per_island_aif(chain, a.partition, N, scenario.flow_thresholds);
            return a;
        });
    if (want_erg)
        erg = std::async(policy, [&] {
            std::vector<ErgodicityVerdict> out;
            const std::vector<std::size_t> starts =
                scenario.starts.empty() ? std::vector<std::size_t>{scenario.start} : scenario.starts;
            for (std::size_t k : starts) out.push_back(ergodicity_probe(chain, k, N, scenario.tol.span));
            return out;
        });
    if (want_class)
        cls = std::async(policy, [&] { return class_ergodicity_probe(chain, scenario.start, N, scenario.tol.cluster); });
    StateVector x0;
    if (want_sim) {
        x0 = default_state(r);
        sim = std::async(policy, [&] { return trajectory(chain, x0, scenario.start, N); });
    }

    // Join in a fixed order; the first failure is rethrown after every task
    // has finished so no task outlives the references it captured.
    std::exception_ptr failure;
    auto join = [&](auto& fut, auto& slot) {
        if (!fut.valid()) return;
        try {
            slot = fut.get();
        } catch (...) {
            if (!failure) failure = std::current_exception();
        }
    };
    join(cert, r.certificates);
    join(flow, r.flow);
    join(isl, r.islands);
    join(erg, r.ergodicity);
    join(cls, r.class_ergodicity);
    join(sim, r.trajectory);
    if (failure) std::rethrow_exception(failure);

    if (r.trajectory) {
        const std::size_t window = scenario.cluster_window.value_or(std::max<std::size_t>(1, (N - scenario.start) / 10));
        r.clusters = detect_clusters(*r.trajectory, scenario.tol.cluster, std::min(window, N - scenario.start));
    }
    if (scenario.wants(Analysis::lyapunov)) {
        LyapunovAnalysis la;
        if (r.certificates->balanced_asymmetric()) {
            la.applicable = true;
            la.series = lyapunov_series(*r.trajectory, r.certificates->chain_M, {});
            la.monotonicity = check_S_monotonic(*la.series, *r.trajectory, chain);
        }
        r.lyapunov = std::move(la);
    }
    if (r.chain.cucker_smale_params) r.flocking = models::flocking_condition(*r.chain.cucker_smale_params);

    for (Theorem t : checks) r.cross_checks.push_back(cross_check(t, r));
    return r;
}

namespace {

std::string cluster_count(std::size_t n) { return std::to_string(n) + (n == 1 ? " cluster" : " clusters"); }

bool flow_predicts_consensus(FlowClass c) {
    return c == FlowClass::divergent_trend || c == FlowClass::trivially_satisfied;
}

TheoremCrossCheck check_t2(const ScenarioResult& r) {
    if (!r.certificates || !r.flow || r.ergodicity.empty())
        throw MissingArtifact("T2 needs certificates, an AIF profile and the ergodicity probe");
    TheoremCrossCheck c;
    c.theorem = Theorem::T2;
    const VerdictKind observed = *r.ergodicity_kind();
    c.observation = to_string(observed);
    if (!r.certificates->balanced_asymmetric()) {
        c.prediction = "none";
        c.note = "outside-scope-of-theorems: chain not certified balanced asymmetric";
        return c;
    }
    switch (r.flow->verdict) {
        case FlowClass::divergent_trend:
        case FlowClass::trivially_satisfied:
            c.prediction = "ergodic";
            if (observed != VerdictKind::ergodic) c.note = "probe undecided at horizon; not a refutation";
            break;
        case FlowClass::bounded_witness:
            c.prediction = "not-ergodic";
            c.agreement = observed != VerdictKind::ergodic;
            if (!c.agreement) c.note = "bounded-flow witness paired with a contracting span";
            break;
        case FlowClass::undecided:
            c.prediction = "none";
            c.note = "flow undecided at horizon";
            break;
    }
    return c;
}

TheoremCrossCheck check_t3(const ScenarioResult& r) {
    if (!r.islands || !r.class_ergodicity)
        throw MissingArtifact("T3 needs islands, per-island AIF and the class-ergodicity probe");
    TheoremCrossCheck c;
    c.theorem = Theorem::T3;
    const ErgodicityVerdict& probe = *r.class_ergodicity;
    const bool settled = probe.kind != VerdictKind::undecided_at_horizon;
    c.observation = settled ? cluster_count(probe.clusters.size()) : to_string(probe.kind);

    const auto& flows = r.islands->flows;
    const bool all_divergent = std::all_of(flows.begin(), flows.end(),
                                           [](const IslandFlow& f) { return flow_predicts_consensus(f.verdict); });
    if (all_divergent) {
        c.prediction = cluster_count(flows.size());
        if (!settled)
            c.note = "probe undecided at horizon; not a refutation";
        else
            c.agreement = probe.clusters == r.islands->partition.islands;
        return c;
    }
    c.prediction = "no consensus on bounded-flow islands";
    if (!settled) {
        c.note = "probe undecided at horizon; not a refutation";
        return c;
    }
    std::vector<std::size_t> label(r.chain.chain.order());
    for (std::size_t b = 0; b < probe.clusters.size(); ++b)
        for (std::size_t i : probe.clusters[b]) label[i] = b;
    for (const auto& f : flows) {
        if (f.verdict != FlowClass::bounded_witness || f.members.size() < 2) continue;
        const bool merged = std::all_of(f.members.begin(), f.members.end(),
                                        [&](std::size_t i) { return label[i] == label[f.members.front()]; });
        if (merged) {
            c.agreement = false;
            c.note = "island with a bounded-flow witness reached consensus";
            return c;
        }
    }
    return c;
}

TheoremCrossCheck check_t4(const ScenarioResult& r) {
    if (!r.certificates || !r.class_ergodicity)
        throw MissingArtifact("T4 needs the self-confidence and cut-balance certificates and the class probe");
    TheoremCrossCheck c;
    c.theorem = Theorem::T4;
    c.observation = to_string(r.class_ergodicity->kind);
    if (r.certificates->delta > 0.0 && r.certificates->cut_balanced()) {
        c.prediction = "class-ergodic";
        if (r.class_ergodicity->kind == VerdictKind::undecided_at_horizon)
            c.note = "probe undecided at horizon; not a refutation";
    } else {
        c.prediction = "none";
        c.note = "outside-scope-of-theorems: needs delta > 0 and finite K";
    }
    return c;
}

}  // namespace

TheoremCrossCheck cross_check(Theorem theorem, const ScenarioResult& result) {
    switch (theorem) {
        case Theorem::T2: return check_t2(result);
        case Theorem::T3: return check_t3(result);
        case Theorem::T4: return check_t4(result);
    }
    throw MissingArtifact("unknown theorem");
}

json summary_json(const ScenarioResult& r) {
    const std::size_t s = r.chain.chain.order();
    json j;
    j["schema"] = io::kSchemaVersion;
    j["chain"] = {{"name", r.chain.chain.name()}, {"generator", r.chain.generator}, {"order", s}};
    j["horizon"] = r.horizon;
    j["start"] = r.scenario.start;
    json analyses = json::array();
    for (Analysis a : r.scenario.analyses) analyses.push_back(to_string(a));
    j["analyses"] = std::move(analyses);
    j["tolerances"] = {{"span", r.scenario.tol.span}, {"cluster", r.scenario.tol.cluster}, {"row", r.scenario.tol.row}};
    if (r.scenario.seed) j["seed"] = *r.scenario.seed;

    if (r.certificates) {
        const auto& c = *r.certificates;
        j["certificates"] = {{"M", io::extended_real(c.chain_M)},
                             {"K", io::extended_real(c.chain_K)},
                             {"delta", c.delta},
                             {"balanced_asymmetric", c.balanced_asymmetric()},
                             {"cut_balanced", c.cut_balanced()},
                             {"doubly_stochastic", std::all_of(c.doubly_stochastic.begin(), c.doubly_stochastic.end(),
                                                               [](bool b) { return b; })},
                             {"worst_M_step", c.worst_M_step},
                             {"witness_S1", io::subset_to_json(c.per_step_M.empty() ? 0 : c.per_step_M[c.worst_M_step].s1, s)},
                             {"witness_S2", io::subset_to_json(c.per_step_M.empty() ? 0 : c.per_step_M[c.worst_M_step].s2, s)}};
    }
    if (r.flow) j["aif"] = io::flow_profile_json(*r.flow);
    if (r.islands) {
        const auto& a = *r.islands;
        json edges = json::array();
        for (const auto& [u, v] : a.graph.unbounded_edges) edges.push_back({u + 1, v + 1});
        json flows = json::array();
        for (const auto& f : a.flows) {
            json members = json::array();
            for (std::size_t i : f.members) members.push_back(i + 1);
            flows.push_back({{"members", std::move(members)}, {"verdict", to_string(f.verdict)}});
        }
        j["islands"] = {{"count", a.partition.islands.size()},
                        {"islands", io::partition_to_json(a.partition.islands)},
                        {"weak_components", io::partition_to_json(a.partition.weak_components)},
                        {"weak_components_strongly_connected", a.partition.weak_components_strongly_connected()},
                        {"unbounded_edges", std::move(edges)},
                        {"declared", a.graph.declared},
                        {"per_island_aif", std::move(flows)}};
    }
    if (!r.ergodicity.empty()) {
        json per = json::array();
        for (const auto& v : r.ergodicity) per.push_back(io::verdict_json(v));
        j["ergodicity"] = {{"verdict", to_string(*r.ergodicity_kind())}, {"per_start", std::move(per)}};
    }
    if (r.class_ergodicity) j["class_ergodicity"] = io::verdict_json(*r.class_ergodicity);
    if (r.trajectory && r.clusters) {
        j["simulate"] = {{"x0", r.trajectory->states.front()},
                         {"final", r.trajectory->states.back()},
                         {"L", r.trajectory->L},
                         {"clusters", io::partition_to_json(r.clusters->clusters)},
                         {"cluster_verdict", to_string(r.clusters->verdict)},
                         {"accumulation_points", r.clusters->accumulation_points},
                         {"max_agent_variation", r.clusters->max_agent_variation}};
    }
    if (r.lyapunov) {
        json l = {{"applicable", r.lyapunov->applicable}};
        if (r.lyapunov->applicable) {
            l["K"] = r.lyapunov->series->K;
            l["monotone"] = r.lyapunov->monotonicity->ok();
            l["violations"] = r.lyapunov->monotonicity->violations.size();
        } else {
            l["note"] = "balanced-asymmetry constant is infinite";
        }
        j["lyapunov"] = std::move(l);
    }
    if (r.flocking) {
        const auto& f = *r.flocking;
        j["flocking"] = {{"f_bound_ok", f.f_bound_ok},
                         {"initial_condition_ok", f.initial_condition_ok},
                         {"M_x", f.M_x},
                         {"M_v", f.M_v},
                         {"kernel_sup", f.kernel_sup},
                         {"integral", io::extended_real(f.integral_value)},
                         {"velocity_bound", io::extended_real(f.velocity_bound)},
                         {"analytic", f.analytic}};
        const auto& cs = *r.chain.cucker_smale;
        j["flocking"]["final_velocity_diameter"] = cs.velocity_diameter.back();
        j["flocking"]["max_position_diameter"] =
            *std::max_element(cs.position_diameter.begin(), cs.position_diameter.end());
    }
    json checks = json::array();
    for (const auto& c : r.cross_checks) {
        json e = {{"theorem", to_string(c.theorem)},
                  {"prediction", c.prediction},
                  {"observation", c.observation},
                  {"agreement", c.agreement}};
        if (!c.note.empty()) e["note"] = c.note;
        checks.push_back(std::move(e));
    }
    j["cross_checks"] = std::move(checks);
    j["exit_code"] = r.exit_code();
    return j;
}

std::vector<std::string> emit_reports(const ScenarioResult& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("summary.json", summary_json(r).dump(2) + "\n");
    const Scenario& sc = r.scenario;
    if (sc.wants(Analysis::simulate) && r.trajectory) {
        files.emplace_back("trajectory.csv", io::trajectory_csv(*r.trajectory));
        files.emplace_back("sorted.csv", io::sorted_csv(*r.trajectory));
    }
    if (sc.wants(Analysis::lyapunov) && r.lyapunov && r.lyapunov->applicable)
        files.emplace_back("lyapunov.csv", io::lyapunov_csv(*r.lyapunov->series, *r.lyapunov->monotonicity));
    if (sc.wants(Analysis::aif) && r.flow) files.emplace_back("flow.csv", io::flow_csv(*r.flow));
    if (sc.wants(Analysis::islands) && r.islands) files.emplace_back("graph.csv", io::graph_csv(r.islands->graph));
    if (sc.wants(Analysis::certificates) && r.certificates)
        files.emplace_back("certificates.json",
                           io::certificates_json(*r.certificates, r.chain.chain.order()).dump(2) + "\n");

    std::vector<std::string> names;
    for (const auto& [name, body] : files) {
        io::write_text_file(dir / name, body);
        names.push_back(name);
    }
    return names;
}

}  // namespace chainlab
