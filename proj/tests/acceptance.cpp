// Acceptance gate: one PASS/FAIL line per criterion. Run all, or a single
// criterion with --criterion N.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chainlab/certificates.hpp"
#include "chainlab/error.hpp"
#include "chainlab/graph.hpp"
#include "chainlab/models.hpp"
#include "chainlab/scenario.hpp"

using namespace chainlab;
using io::json;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void clause(bool ok, const std::string& text) {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + text);
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ChainSource random_chain(std::uint64_t seed, std::size_t s, std::size_t N) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<StochasticMatrix> ms;
    for (std::size_t n = 0; n < N; ++n) {
        std::vector<std::vector<double>> rows(s, std::vector<double>(s));
        for (auto& row : rows) {
            double sum = 0.0;
            for (auto& v : row) {
                v = u(rng) < 0.3 ? 0.0 : u(rng);
                sum += v;
            }
            if (sum == 0.0) row[n % s] = sum = 1.0;
            for (auto& v : row) v /= sum;
        }
        ms.push_back(StochasticMatrix::validate(Matrix::from_rows(rows), 1e-9));
    }
    return ChainSource::from_matrices(std::move(ms), "random");
}

ScenarioResult run(const std::string& manifest) { return run_scenario(parse_scenario(json::parse(manifest))); }

const TheoremCrossCheck* find_check(const ScenarioResult& r, Theorem t) {
    for (const auto& c : r.cross_checks)
        if (c.theorem == t) return &c;
    return nullptr;
}

Outcome c01() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t comparisons = 0;
    std::size_t mismatches = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const std::size_t s = 2 + i % 3;
        const std::size_t N = 1 + i % 5;
        const auto chain = random_chain(1000 + i, s, N);
        for (std::size_t c = 1; c < s; ++c)
            for (auto v : {FlowVariant::full, FlowVariant::reduced}) {
                ++comparisons;
                if (min_flow_dp(chain, N, c, v).value() != brute_force_min_flow(chain, N, c, v)) ++mismatches;
            }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.clause(mismatches == 0, std::to_string(comparisons) + " comparisons, " + std::to_string(mismatches) +
                                  " mismatches (exact equality)");
    o.clause(secs < 60.0, "runtime " + fmt(secs) + " s < 60 s");
    return o;
}

Outcome c02() {
    Outcome o;
    const auto chain = models::fixture_chain(models::Fixture::inv_n);
    const std::size_t N = 500;
    const auto cert = certify(chain, N);
    bool per_step = true;
    for (const auto& m : cert.per_step_M) per_step = per_step && m.value <= 1.0;
    const bool ds = std::all_of(cert.doubly_stochastic.begin(), cert.doubly_stochastic.end(), [](bool b) { return b; });
    o.clause(per_step && ds, "M <= 1 at every step and every matrix doubly stochastic");
    const auto flow = aif_profile(chain, N, FlowVariant::full);
    o.clause(flow.verdict == FlowClass::divergent_trend, std::string("aif verdict ") + to_string(flow.verdict));
    for (std::size_t k = 1; k <= 10; ++k) {
        const auto v = ergodicity_probe(chain, k, N, 1e-6);
        o.clause(v.span_curve.back() < 1e-6, "k = " + std::to_string(k) + ": span(A(500,k)) = " + fmt(v.span_curve.back()) +
                                                 " < 1e-6");
    }
    const auto r = run(R"({"schema": 1, "chain": {"generator": "inv_n"}, "analyses": ["certificates", "aif", "ergodicity"],
        "horizon": 500, "starts": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10], "tolerances": {"span": 1e-6}})");
    const auto* t2 = find_check(r, Theorem::T2);
    o.clause(t2 && t2->agreement, "T2 agreement (predicted " + (t2 ? t2->prediction : "?") + ", observed " +
                                      (t2 ? t2->observation : "?") + ")");
    return o;
}

Outcome c03() {
    Outcome o;
    const auto r = run(R"({"schema": 1, "chain": {"generator": "non_balanced"}, "analyses": ["certificates", "aif", "ergodicity"],
        "horizon": 100, "tolerances": {"span": 1e-6}})");
    const auto& cert = *r.certificates;
    const auto& w = cert.per_step_M[cert.worst_M_step];
    o.clause(cert.chain_M == kInfinity, "M = +inf");
    o.clause(members(w.s1, 2) == std::vector<std::size_t>{0} && members(w.s2, 2) == std::vector<std::size_t>{1},
             "witness S1 = {1}, S2 = {2}");
    o.clause(r.ergodicity.at(0).span_curve.back() < 1e-6,
             "span(A(100,0)) = " + fmt(r.ergodicity.at(0).span_curve.back()) + " < 1e-6");
    const auto* t2 = find_check(r, Theorem::T2);
    o.clause(t2 && t2->agreement && t2->note.rfind("outside-scope-of-theorems", 0) == 0,
             "T2 recorded outside scope, not a disagreement");
    return o;
}

Outcome c04() {
    Outcome o;
    const auto r = run(R"({"schema": 1, "chain": {"generator": "swap"},
        "analyses": ["certificates", "aif", "ergodicity", "simulate"], "horizon": 1000, "x0": [0, 1]})");
    o.clause(r.flow->verdict == FlowClass::bounded_witness, std::string("aif verdict ") + to_string(r.flow->verdict));
    bool zero = true;
    for (const auto& mf : r.flow->per_cardinality)
        for (double v : mf.curve) zero = zero && v == 0.0;
    o.clause(zero, "F = 0 at every horizon n = 0..1000");
    bool oscillates = true;
    const auto& st = r.trajectory->states;
    for (std::size_t n = 0; n + 1 < st.size(); ++n) oscillates = oscillates && st[n] != st[n + 1];
    o.clause(oscillates, "trajectory from (0,1) changes at every step");
    o.clause(r.clusters->verdict != ClusterVerdict::consensus,
             std::string("no consensus at N = 1000 (") + to_string(r.clusters->verdict) + ")");
    o.clause(r.certificates->chain_M == 1.0, "certificate M = 1");
    o.clause(r.ergodicity_kind() != VerdictKind::ergodic, "probe not ergodic");
    const auto* t2 = find_check(r, Theorem::T2);
    o.clause(t2 && t2->agreement, "T2 agreement");
    return o;
}

struct SuiteStats {
    double worst_tail = 0.0;
    double worst_drop = 0.0;    // most negative S_r increment
    double worst_margin = 0.0;  // most negative increment minus its lower bound
    std::size_t chains = 0;
};

const SuiteStats& doubly_stochastic_suite() {
    static const SuiteStats stats = [] {
        SuiteStats st;
        const std::size_t N = 2000;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const std::size_t s = 2 + seed % 5;
            const auto chain = models::random_doubly_stochastic_chain(seed, s, N, 3);
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            StateVector x0(s);
            for (auto& v : x0) v = u(rng);
            const auto traj = trajectory(chain, x0, 0, N);
            const double M = certify(chain, N).chain_M;
            const auto series = lyapunov_series(traj, M, {});
            const auto mono = check_S_monotonic(series, traj, chain);
            const std::size_t from = N - N / 10;
            for (std::size_t i = 0; i < s; ++i) {
                double lo = traj.sorted[from].z[i];
                double hi = lo;
                for (std::size_t n = from; n <= N; ++n) {
                    lo = std::min(lo, traj.sorted[n].z[i]);
                    hi = std::max(hi, traj.sorted[n].z[i]);
                }
                st.worst_tail = std::max(st.worst_tail, hi - lo);
            }
            for (std::size_t r = 0; r < s; ++r)
                for (std::size_t t = 0; t < N; ++t) {
                    st.worst_drop = std::min(st.worst_drop, mono.increments[r][t]);
                    st.worst_margin = std::min(st.worst_margin, mono.increments[r][t] - mono.lower_bounds[r][t]);
                }
            ++st.chains;
        }
        return st;
    }();
    return stats;
}

Outcome c05() {
    Outcome o;
    const auto& st = doubly_stochastic_suite();
    o.clause(st.worst_tail < 1e-6, std::to_string(st.chains) + " chains: worst tail oscillation of z_i " +
                                       fmt(st.worst_tail) + " < 1e-6");
    o.clause(st.worst_drop >= -1e-10, "worst S_r increment " + fmt(st.worst_drop) + " >= -1e-10");
    return o;
}

Outcome c06() {
    Outcome o;
    const auto& st = doubly_stochastic_suite();
    o.clause(st.worst_margin >= -1e-10,
             std::to_string(st.chains) + " chains: min(increment - lower bound) = " + fmt(st.worst_margin) + " >= -1e-10");
    return o;
}

Outcome c07() {
    Outcome o;
    const auto r = run(R"({"schema": 1,
        "chain": {"generator": "krause", "params": {"radius": 1.0, "kernel": "indicator",
                  "x0": [0.0, 0.2, 0.5, 0.9, 3.9, 4.1, 4.4, 4.8]}},
        "analyses": ["certificates", "islands", "class-ergodicity"], "horizon": 200})");
    o.clause(r.islands->partition.islands.size() == 2,
             "islands = " + std::to_string(r.islands->partition.islands.size()));
    bool divergent = true;
    for (const auto& f : r.islands->flows) divergent = divergent && f.verdict == FlowClass::divergent_trend;
    o.clause(divergent, "per-island AIF divergent");
    o.clause(r.class_ergodicity->kind == VerdictKind::class_ergodic && r.class_ergodicity->clusters.size() == 2,
             "class probe: " + std::string(to_string(r.class_ergodicity->kind)) + ", " +
                 std::to_string(r.class_ergodicity->clusters.size()) + " clusters");
    const auto* t3 = find_check(r, Theorem::T3);
    const auto* t4 = find_check(r, Theorem::T4);
    o.clause(t3 && t3->agreement, "T3 agreement");
    o.clause(t4 && t4->agreement && t4->prediction == "class-ergodic", "T4 agreement");
    return o;
}

void flocking_run(Outcome& o, const std::string& label, const models::PowerKernel& f, std::vector<models::Vec3> x0,
                  std::vector<models::Vec3> v0) {
    const auto p = models::cucker_smale_params(f, 0.1, std::move(x0), std::move(v0));
    const auto fc = models::flocking_condition(p);
    o.clause(fc.f_bound_ok && fc.initial_condition_ok,
             label + ": flocking conditions hold (M_v = " + fmt(fc.M_v) + ", bound = " + fmt(fc.velocity_bound) + ")");
    const std::size_t N = 10000;
    const auto run = models::cucker_smale_simulate(p, N);
    o.clause(run.velocity_diameter.back() < 1e-6,
             label + ": velocity diameter at N = 1e4 is " + fmt(run.velocity_diameter.back()) + " < 1e-6");
    const double peak = *std::max_element(run.position_diameter.begin(), run.position_diameter.end());
    const double late = run.position_diameter[N] - run.position_diameter[N - N / 10];
    o.clause(std::isfinite(peak) && std::abs(late) < 1e-6,
             label + ": position diameter peaks at " + fmt(peak) + ", drift over the last 10% is " + fmt(late));
}

Outcome c08() {
    Outcome o;
    flocking_run(o, "(i) beta = 1/2", {0.1, 1.0, 0.5}, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}},
                 {{0.1, 0, 0}, {0, 0.2, 0}, {0, 0, -0.1}});
    const models::PowerKernel quad{0.1, 1.0, 1.0};
    const double bound = models::flocking_velocity_bound(quad, 3, 0.1, 1.0);
    o.clause(std::abs(bound - 0.5) < 1e-12, "(ii) bound at M_x = 1 is " + fmt(bound));
    flocking_run(o, "(ii) beta = 1, M_v = 0.5 x bound", quad, {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}},
                 {{0.5 * bound / 2, 0, 0}, {-0.5 * bound / 2, 0, 0}, {0, 0, 0}});
    bool rejected = false;
    try {
        models::cucker_smale_simulate(
            models::cucker_smale_params({1.0 / 3.0, 1.0, 0.5}, 0.1, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}},
                                        {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}),
            10);
    } catch (const KernelBoundViolated&) {
        rejected = true;
    }
    o.clause(rejected, "(iii) f(0) = 1/s rejected with KernelBoundViolated");
    return o;
}

Outcome c09() {
    Outcome o;
    std::size_t audited = 0;
    std::size_t failed = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const std::size_t s = 2 + seed % 5;
        const auto chain = models::random_doubly_stochastic_chain(seed, s, 200, 1 + seed % 3);
        if (!certify(chain, 200).balanced_asymmetric()) continue;
        ++audited;
        if (!islands(unbounded_graph(chain, 200)).weak_components_strongly_connected()) ++failed;
    }
    o.clause(audited == 100 && failed == 0, std::to_string(audited) + " balanced asymmetric fixtures, " +
                                                std::to_string(failed) + " with a weak component not strongly connected");
    const auto counter = islands(graph_from_edges(2, {{0, 1}}));
    o.clause(!counter.weak_components_strongly_connected(), "single directed edge: audit reports failure");
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome c10() {
    Outcome o;
    const std::filesystem::path dir = CHAINLAB_MANIFEST_DIR;
    std::vector<std::filesystem::path> manifests;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".json") manifests.push_back(e.path());
    std::sort(manifests.begin(), manifests.end());
    const auto scratch = std::filesystem::temp_directory_path() / "chainlab_acceptance_c10";
    for (const auto& m : manifests) {
        std::filesystem::remove_all(scratch);
        std::vector<std::string> files;
        for (const char* pass : {"a", "b"}) {
            const auto out = scratch / pass;
            files = emit_reports(run_scenario(load_scenario(m)), out);
        }
        bool same = true;
        for (const auto& f : files) same = same && slurp(scratch / "a" / f) == slurp(scratch / "b" / f);
        o.clause(same, m.filename().string() + ": " + std::to_string(files.size()) + " files byte-identical");
    }
    std::filesystem::remove_all(scratch);
    o.clause(!manifests.empty(), std::to_string(manifests.size()) + " manifests checked");
    return o;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    bool verbose = false;
    app.add_option("--criterion", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
    app.add_flag("-v,--verbose", verbose, "Print every clause");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "DP equals brute-force oracle", c01},
        {2, "inv_n fixture", c02},
        {3, "non_balanced fixture", c03},
        {4, "swap fixture", c04},
        {5, "sorted-state convergence and S_r monotonicity", c05},
        {6, "per-step lower bound on S_r increments", c06},
        {7, "Krause two groups", c07},
        {8, "Cucker-Smale flocking", c08},
        {9, "weak components of the unbounded graph", c09},
        {10, "byte-identical reruns", c10},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (only && c.id != only) continue;
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.clause(false, std::string("threw: ") + e.what());
        }
        std::printf("criterion %d: %s  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title);
        if (verbose || !o.pass || only)
            for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
