// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <sstream>

#include "fkpde/harness.hpp"
#include "json.hpp"

namespace fkpde {

using json = nlohmann::json;

namespace {

struct KindName {
    ExperimentKind kind;
    const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::solve, "solve"},
    {ExperimentKind::depth_sweep, "depth_sweep"},
    {ExperimentKind::scaling, "scaling"},
    {ExperimentKind::multigrid, "multigrid"},
    {ExperimentKind::spectral, "spectral"},
    {ExperimentKind::qnpu_verify, "qnpu_verify"},
    {ExperimentKind::gradient_variance, "gradient_variance"},
    {ExperimentKind::sample, "sample"},
    {ExperimentKind::fine_grid, "fine_grid"},
};

template <typename T>
T read(const json& j, const char* key, const T& fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + "." + key + " has the wrong type");
    }
}

Ordering ordering_from(const std::string& s, const std::string& field) {
    if (s == "sequential") return Ordering::sequential;
    if (s == "reversed_space") return Ordering::reversed_space;
    throw ValidationError(field + " must be sequential or reversed_space");
}

std::string ordering_name(Ordering o) { return o == Ordering::sequential ? "sequential" : "reversed_space"; }

OptimizerKind optimizer_from(const std::string& s) {
    if (s == "adam") return OptimizerKind::adam;
    if (s == "quasi_newton" || s == "lbfgs") return OptimizerKind::quasi_newton;
    throw ValidationError("protocol.optimizer must be adam or quasi_newton");
}

CostMode::Kind mode_from(const std::string& s) {
    if (s == "self_consistent") return CostMode::Kind::self_consistent;
    if (s == "relinearized") return CostMode::Kind::relinearized;
    throw ValidationError("protocol.mode must be self_consistent or relinearized");
}

std::string mode_name(CostMode::Kind k) {
    return k == CostMode::Kind::relinearized ? "relinearized" : "self_consistent";
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ValidationError("unknown field " + where + "." + it.key());
    }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    for (const KindName& k : kKinds)
        if (k.kind == kind) return k.name;
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (const KindName& k : kKinds)
        if (name == k.name) return k.kind;
    throw ValidationError("kind: unknown experiment kind '" + name + "'");
}

void validate(const ExperimentConfig& c) {
    if (c.schema_version != kSchemaVersion)
        throw ValidationError("schema_version must be " + std::to_string(kSchemaVersion));
    const PdeProblem& p = c.problem;
    if (p.grid.n_x < 1) throw ValidationError("problem.n_x must be >= 1");
    if (p.grid.n_t < 1) throw ValidationError("problem.n_t must be >= 1");
    if (p.grid.n_x + p.grid.n_t > 14) throw ValidationError("problem.n_x + problem.n_t must be <= 14");
    if (!(p.grid.dt > 0.0)) throw ValidationError("problem.dt must be positive");
    if (!(p.grid.domain_length > 0.0)) throw ValidationError("problem.domain_length must be positive");
    try {
        p.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("problem.") + e.what());
    }
    if (c.ansatz.layers < 1 && c.ansatz.family == AnsatzFamily::brickwall)
        throw ValidationError("ansatz.layers must be >= 1");
    if (c.ansatz.r < 1) throw ValidationError("ansatz.r must be >= 1");
    if (c.ansatz.family == AnsatzFamily::custom) throw ValidationError("ansatz.family must be brickwall or qmps");
    if (c.protocol.seeds < 1) throw ValidationError("protocol.seeds must be >= 1");
    if (c.protocol.budget < 0) throw ValidationError("protocol.budget must be >= 0");
    if (c.protocol.schedule != "ramp" && c.protocol.schedule != "single")
        throw ValidationError("protocol.schedule must be ramp or single");
    if (c.output_dir.empty()) throw ValidationError("outputs.directory must not be empty");
    if (c.sampler.shots < 1) throw ValidationError("sampler.shots must be >= 1");
    if (c.sampler.source != "solve" && c.sampler.source != "history")
        throw ValidationError("sampler.source must be solve or history");
    if (c.kind == ExperimentKind::depth_sweep && (c.sweep_layers.empty() || c.sweep_orderings.empty()))
        throw ValidationError("sweep.layers and sweep.orderings must be non-empty");
    for (int l : c.sweep_layers)
        if (l < 1) throw ValidationError("sweep.layers entries must be >= 1");
    if (c.kind == ExperimentKind::scaling && c.scaling.empty()) throw ValidationError("scaling.points must be non-empty");
    for (const ScalingPoint& s : c.scaling)
        if (s.n < 1 || s.n > 7 || !(s.dt > 0.0) || s.layers < 1)
            throw ValidationError("scaling.points entries need 1 <= n <= 7, dt > 0, layers >= 1");
    for (double dt : c.stability_dts)
        if (!(dt > 0.0)) throw ValidationError("spectral.dts entries must be positive");
    for (int nt : c.gap_n_t)
        if (nt < 1 || nt + p.grid.n_x > 12) throw ValidationError("spectral.n_t_values entries out of range");
    if (c.kind == ExperimentKind::multigrid) {
        if (p.grid.n_x < 2 || p.grid.n_t < 2) throw ValidationError("problem.n_x and problem.n_t must be >= 2 for multigrid");
        if (c.ansatz.family != AnsatzFamily::brickwall || c.ansatz.r != 2 || c.ansatz.ordering != Ordering::reversed_space)
            throw ValidationError("ansatz must be an r=2 reversed_space brickwall for multigrid");
    }
    if (c.multigrid_random_inits < 1) throw ValidationError("multigrid.random_inits must be >= 1");
    if (c.qnpu_vectors < 1) throw ValidationError("qnpu.random_vectors must be >= 1");
    if (c.kind == ExperimentKind::qnpu_verify && c.ansatz.ordering != Ordering::reversed_space)
        throw ValidationError("ansatz.ordering must be reversed_space for qnpu_verify");
    for (int r : c.refinements)
        if (r < 1 || (r & (r - 1)) != 0) throw ValidationError("fine_grid.refinements entries must be powers of two");
    const GradientVarianceSettings& gv = c.gradient_variance;
    if (gv.seeds < 2) throw ValidationError("gradient_variance.seeds must be >= 2");
    for (int n : gv.qubit_sizes)
        if (n < 2 || n % 2 != 0 || n > 14) throw ValidationError("gradient_variance.qubit_sizes entries must be even, 2..14");
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, {"schema_version", "kind", "problem", "ansatz", "protocol", "outputs", "sampler", "sweep", "scaling",
                   "spectral", "gradient_variance", "multigrid", "qnpu", "fine_grid"},
               "config");
    ExperimentConfig c;
    if (!j.contains("schema_version")) throw ValidationError("schema_version is required");
    c.schema_version = read<int>(j, "schema_version", 0, "config");
    c.kind = experiment_kind_from_string(read<std::string>(j, "kind", "solve", "config"));

    if (j.contains("problem")) {
        const json& p = j["problem"];
        check_keys(p, {"n_x", "n_t", "domain_length", "dt", "diffusion", "nonlinearity", "taylor_order", "profile",
                       "shift", "x_offset", "c0", "c3"},
                   "problem");
        PdeProblem& q = c.problem;
        q.grid.n_x = read<int>(p, "n_x", 3, "problem");
        q.grid.n_t = read<int>(p, "n_t", 3, "problem");
        q.grid.domain_length = read<double>(p, "domain_length", 1.0, "problem");
        q.grid.dt = read<double>(p, "dt", 0.00625, "problem");
        q.diffusion = read<double>(p, "diffusion", 1.0, "problem");
        q.nonlinearity = read<double>(p, "nonlinearity", 0.0, "problem");
        q.taylor_order = read<int>(p, "taylor_order", 2, "problem");
        const std::string prof = read<std::string>(p, "profile", "shifted_sine", "problem");
        if (prof == "gaussian") {
            q.profile = gaussian_profile();
        } else if (prof == "shifted_sine") {
            q.profile = shifted_sine_profile(read<double>(p, "shift", 2.0, "problem"));
        } else {
            throw ValidationError("problem.profile must be gaussian or shifted_sine");
        }
        q.profile.x_offset = read<double>(p, "x_offset", 0.0, "problem");
        q.c0 = read<double>(p, "c0", 2.0, "problem");
        q.c3 = read<double>(p, "c3", 0.0, "problem");
    } else {
        c.problem.grid = build_grid(3, 3, 1.0, 0.00625);
        c.problem.profile = shifted_sine_profile(2.0);
    }
    if (j.contains("ansatz")) {
        const json& a = j["ansatz"];
        check_keys(a, {"family", "layers", "r", "chi", "sparse", "ordering"}, "ansatz");
        const std::string fam = read<std::string>(a, "family", "brickwall", "ansatz");
        if (fam == "brickwall")
            c.ansatz.family = AnsatzFamily::brickwall;
        else if (fam == "qmps")
            c.ansatz.family = AnsatzFamily::qmps;
        else
            throw ValidationError("ansatz.family must be brickwall or qmps");
        c.ansatz.layers = read<int>(a, "layers", 3, "ansatz");
        c.ansatz.r = read<int>(a, "r", 1, "ansatz");
        c.ansatz.chi = read<int>(a, "chi", 4, "ansatz");
        c.ansatz.sparse = read<bool>(a, "sparse", true, "ansatz");
        c.ansatz.ordering = ordering_from(read<std::string>(a, "ordering", "reversed_space", "ansatz"), "ansatz.ordering");
    }
    if (j.contains("protocol")) {
        const json& p = j["protocol"];
        check_keys(p, {"schedule", "optimizer", "seeds", "first_seed", "budget", "mode"}, "protocol");
        c.protocol.schedule = read<std::string>(p, "schedule", "ramp", "protocol");
        c.protocol.optimizer = optimizer_from(read<std::string>(p, "optimizer", "quasi_newton", "protocol"));
        c.protocol.seeds = read<int>(p, "seeds", 20, "protocol");
        c.protocol.first_seed = read<std::uint64_t>(p, "first_seed", 0, "protocol");
        c.protocol.budget = read<int>(p, "budget", 0, "protocol");
        c.protocol.mode = mode_from(read<std::string>(p, "mode", "self_consistent", "protocol"));
    }
    if (j.contains("outputs")) {
        const json& o = j["outputs"];
        check_keys(o, {"directory", "gap_normalized"}, "outputs");
        c.output_dir = read<std::string>(o, "directory", "artifacts", "outputs");
        c.gap_normalized = read<bool>(o, "gap_normalized", false, "outputs");
    }
    if (j.contains("sampler")) {
        const json& s = j["sampler"];
        check_keys(s, {"shots", "seed", "source"}, "sampler");
        c.sampler.shots = read<long long>(s, "shots", 25000, "sampler");
        c.sampler.seed = read<std::uint64_t>(s, "seed", 0, "sampler");
        c.sampler.source = read<std::string>(s, "source", "solve", "sampler");
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        check_keys(s, {"layers", "orderings"}, "sweep");
        c.sweep_layers = read<std::vector<int>>(s, "layers", c.sweep_layers, "sweep");
        if (s.contains("orderings")) {
            c.sweep_orderings.clear();
            for (const std::string& o : read<std::vector<std::string>>(s, "orderings", {}, "sweep"))
                c.sweep_orderings.push_back(ordering_from(o, "sweep.orderings"));
        }
    }
    if (j.contains("scaling")) {
        const json& s = j["scaling"];
        check_keys(s, {"points"}, "scaling");
        if (s.contains("points")) {
            if (!s["points"].is_array()) throw ValidationError("scaling.points must be an array");
            for (const json& pt : s["points"]) {
                check_keys(pt, {"n", "dt", "layers"}, "scaling.points[]");
                ScalingPoint sp;
                sp.n = read<int>(pt, "n", 4, "scaling.points[]");
                sp.dt = read<double>(pt, "dt", 1.0 / 320.0, "scaling.points[]");
                sp.layers = read<int>(pt, "layers", 4, "scaling.points[]");
                c.scaling.push_back(sp);
            }
        }
    }
    if (j.contains("spectral")) {
        const json& s = j["spectral"];
        check_keys(s, {"dts", "n_t_values", "excited_ite"}, "spectral");
        c.stability_dts = read<std::vector<double>>(s, "dts", c.stability_dts, "spectral");
        c.gap_n_t = read<std::vector<int>>(s, "n_t_values", c.gap_n_t, "spectral");
        c.excited_ite = read<bool>(s, "excited_ite", false, "spectral");
    }
    if (j.contains("gradient_variance")) {
        const json& g = j["gradient_variance"];
        check_keys(g, {"qubit_sizes", "layers", "seeds", "include_after_ramp", "dt_for_6", "ramp_budget"},
                   "gradient_variance");
        GradientVarianceSettings& gv = c.gradient_variance;
        gv.qubit_sizes = read<std::vector<int>>(g, "qubit_sizes", gv.qubit_sizes, "gradient_variance");
        gv.layers = read<std::vector<int>>(g, "layers", gv.layers, "gradient_variance");
        gv.seeds = read<int>(g, "seeds", gv.seeds, "gradient_variance");
        gv.include_after_ramp = read<bool>(g, "include_after_ramp", true, "gradient_variance");
        gv.dt_for_6 = read<double>(g, "dt_for_6", gv.dt_for_6, "gradient_variance");
        const int rb = read<int>(g, "ramp_budget", 0, "gradient_variance");
        if (rb > 0) gv.ramp_budget = rb;
    }
    if (j.contains("multigrid")) {
        const json& m = j["multigrid"];
        check_keys(m, {"random_inits", "direct"}, "multigrid");
        c.multigrid_random_inits = read<int>(m, "random_inits", 5, "multigrid");
        c.multigrid_direct = read<bool>(m, "direct", true, "multigrid");
    }
    if (j.contains("qnpu")) {
        const json& q = j["qnpu"];
        check_keys(q, {"random_vectors", "export"}, "qnpu");
        c.qnpu_vectors = read<int>(q, "random_vectors", 20, "qnpu");
        c.qnpu_export = read<bool>(q, "export", true, "qnpu");
    }
    if (j.contains("fine_grid")) {
        const json& f = j["fine_grid"];
        check_keys(f, {"refinements"}, "fine_grid");
        c.refinements = read<std::vector<int>>(f, "refinements", c.refinements, "fine_grid");
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    const PdeProblem& p = c.problem;
    json j;
    j["schema_version"] = c.schema_version;
    j["kind"] = to_string(c.kind);
    json& pj = j["problem"];
    pj["n_x"] = p.grid.n_x;
    pj["n_t"] = p.grid.n_t;
    pj["domain_length"] = p.grid.domain_length;
    pj["dt"] = p.grid.dt;
    pj["diffusion"] = p.diffusion;
    pj["nonlinearity"] = p.nonlinearity;
    pj["taylor_order"] = p.taylor_order;
    pj["profile"] = p.profile.kind == ProfileKind::gaussian ? "gaussian" : "shifted_sine";
    if (p.profile.kind == ProfileKind::shifted_sine) pj["shift"] = p.profile.shift;
    pj["x_offset"] = p.profile.x_offset;
    pj["c0"] = p.c0;
    pj["c3"] = p.c3;
    json& aj = j["ansatz"];
    aj["family"] = c.ansatz.family == AnsatzFamily::qmps ? "qmps" : "brickwall";
    aj["layers"] = c.ansatz.layers;
    aj["r"] = c.ansatz.r;
    aj["chi"] = c.ansatz.chi;
    aj["sparse"] = c.ansatz.sparse;
    aj["ordering"] = ordering_name(c.ansatz.ordering);
    json& pr = j["protocol"];
    pr["schedule"] = c.protocol.schedule;
    pr["optimizer"] = c.protocol.optimizer == OptimizerKind::adam ? "adam" : "quasi_newton";
    pr["seeds"] = c.protocol.seeds;
    pr["first_seed"] = c.protocol.first_seed;
    pr["budget"] = c.protocol.budget;
    pr["mode"] = mode_name(c.protocol.mode);
    j["outputs"] = {{"directory", c.output_dir}, {"gap_normalized", c.gap_normalized}};
    j["sampler"] = {{"shots", c.sampler.shots}, {"seed", c.sampler.seed}, {"source", c.sampler.source}};
    json orders = json::array();
    for (Ordering o : c.sweep_orderings) orders.push_back(ordering_name(o));
    j["sweep"] = {{"layers", c.sweep_layers}, {"orderings", orders}};
    json pts = json::array();
    for (const ScalingPoint& s : c.scaling) pts.push_back({{"n", s.n}, {"dt", s.dt}, {"layers", s.layers}});
    j["scaling"] = {{"points", pts}};
    j["spectral"] = {{"dts", c.stability_dts}, {"n_t_values", c.gap_n_t}, {"excited_ite", c.excited_ite}};
    const GradientVarianceSettings& gv = c.gradient_variance;
    j["gradient_variance"] = {{"qubit_sizes", gv.qubit_sizes},
                              {"layers", gv.layers},
                              {"seeds", gv.seeds},
                              {"include_after_ramp", gv.include_after_ramp},
                              {"dt_for_6", gv.dt_for_6},
                              {"ramp_budget", gv.ramp_budget.value_or(0)}};
    j["multigrid"] = {{"random_inits", c.multigrid_random_inits}, {"direct", c.multigrid_direct}};
    j["qnpu"] = {{"random_vectors", c.qnpu_vectors}, {"export", c.qnpu_export}};
    j["fine_grid"] = {{"refinements", c.refinements}};
    return j.dump(2);
}

Ansatz make_ansatz(const AnsatzConfig& a, int n_x, int n_t) {
    const QubitOrdering ord = QubitOrdering::make(a.ordering, n_x, n_t);
    if (a.family == AnsatzFamily::qmps) return build_qmps(n_x + n_t, a.chi, a.r, a.sparse, ord);
    return build_brickwall(n_x + n_t, a.layers, a.r, ord);
}

RampSchedule make_schedule(const ExperimentConfig& c) {
    const PdeProblem& p = c.problem;
    const int budget = c.protocol.budget > 0 ? c.protocol.budget : default_budget(p.grid.n_qubits());
    if (c.protocol.schedule == "single") return RampSchedule::single(p, c.protocol.optimizer, budget);
    if (!p.linear()) return RampSchedule::burgers_default(p.diffusion, p.nonlinearity, budget);
    return RampSchedule::diffusion_default(p.diffusion, budget);
}

ProtocolSettings make_protocol_settings(const ProtocolConfig& c) {
    ProtocolSettings s;
    s.mode = c.mode;
    return s;
}

}  // namespace fkpde
