#include "fluxrabi/app/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace fluxrabi::app {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class Section {
public:
    Section(const json* obj, std::string path, std::vector<std::string>& defaults)
        : obj_(obj), path_(std::move(path)), defaults_(defaults) {
        if (obj_ && !obj_->is_object()) throw ConfigError(name("") + " must be an object");
    }

    bool has(const std::string& key) const { return obj_ && obj_->contains(key); }

    double number(const std::string& key, double fallback) {
        const json* v = take(key);
        double x = fallback;
        if (v) {
            if (!v->is_number()) throw ConfigError(name(key) + " must be a number");
            x = v->get<double>();
        }
        out_[key] = x;
        return x;
    }

    int integer(const std::string& key, int fallback) {
        const json* v = take(key);
        int x = fallback;
        if (v) {
            if (!v->is_number_integer()) throw ConfigError(name(key) + " must be an integer");
            x = v->get<int>();
        }
        out_[key] = x;
        return x;
    }

    template <class T>
    std::vector<T> list(const std::string& key, const std::vector<T>& fallback) {
        const json* v = take(key);
        std::vector<T> x = fallback;
        if (v) {
            if (!v->is_array() || v->empty()) throw ConfigError(name(key) + " must be a non-empty array");
            x.clear();
            for (const json& e : *v) {
                if constexpr (std::is_same_v<T, int>) {
                    if (!e.is_number_integer()) throw ConfigError(name(key) + " entries must be integers");
                } else {
                    if (!e.is_number()) throw ConfigError(name(key) + " entries must be numbers");
                }
                x.push_back(e.get<T>());
            }
        }
        out_[key] = x;
        return x;
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const json* v = take(key);
        std::string x = fallback;
        if (v) {
            if (!v->is_string()) throw ConfigError(name(key) + " must be a string");
            x = v->get<std::string>();
        }
        out_[key] = x;
        return x;
    }

    Section child(const std::string& key) {
        const json* v = take(key, false);
        return Section(v, name(key), defaults_);
    }

    void attach(const std::string& key, Section& sub) { out_[key] = sub.finish(); }

    /// Marks a key that is read elsewhere as known.
    void mark(const std::string& key) { seen_.insert(key); }

    ordered_json finish() {
        if (obj_) {
            for (auto it = obj_->begin(); it != obj_->end(); ++it) {
                if (!seen_.count(it.key())) throw ConfigError("unknown key " + name(it.key()));
            }
        }
        return out_.is_null() ? ordered_json::object() : out_;
    }

    std::string name(const std::string& key) const {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const json* take(const std::string& key, bool record_default = true) {
        seen_.insert(key);
        if (has(key)) return &obj_->at(key);
        if (record_default) defaults_.push_back(name(key));
        return nullptr;
    }

    const json* obj_;
    std::string path_;
    std::vector<std::string>& defaults_;
    std::set<std::string> seen_;
    ordered_json out_ = ordered_json::object();
};

Truncation read_truncation(Section s, Truncation fallback, Section& parent, const std::string& key) {
    Truncation t{s.integer("Nq", fallback.Nq), s.integer("Nph", fallback.Nph)};
    parent.attach(key, s);
    return t;
}

}  // namespace

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{
        "qubit-spectrum", "inductance-compare", "circuit-spectrum-flux", "circuit-spectrum-charge",
        "rabi-map",       "rabi-fit",           "fig4-flux",             "fig4-charge",
        "fig5",           "matrix-elements",    "observables",           "perturbation",
        "wavefunctions",  "gauge-check",        "paper-regression"};
    return names;
}

void validate_tasks(const std::vector<std::string>& tasks) {
    if (tasks.empty()) throw ConfigError("no tasks requested");
    for (const std::string& t : tasks) {
        if (std::find(task_names().begin(), task_names().end(), t) == task_names().end()) {
            throw ConfigError("unknown task '" + t + "'");
        }
    }
}

std::vector<RawCircuit> RunConfig::circuits() const {
    std::vector<RawCircuit> out;
    for (double Lc : Lc_list) {
        out.push_back(RawCircuit::with_fixed_sums(Lc, sum1, sum2, circuit.C, circuit.CJ, circuit.EJ));
    }
    return out;
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    RunConfig cfg;
    Section root(&doc, "", cfg.defaults_used);

    if (!root.has("schema_version")) throw ConfigError("missing schema_version");
    const int version = root.integer("schema_version", 0);
    if (version != schema_version) {
        throw ConfigError("unsupported schema_version " + std::to_string(version));
    }

    Section c = root.child("circuit");
    RawCircuit& r = cfg.circuit;
    r.Lc = c.number("Lc_pH", 20.0);
    r.L1 = c.number("L1_pH", 780.0);
    r.L2 = c.number("L2_pH", 2030.0);
    r.C = c.number("C_pF", 0.87);
    r.CJ = c.number("CJ_fF", 4.84);
    if (c.has("EJ_GHz") && c.has("LJ_pH")) throw ConfigError("give either circuit.EJ_GHz or circuit.LJ_pH");
    if (c.has("EJ_GHz")) {
        r.EJ = c.number("EJ_GHz", 0.0);
    } else {
        r.EJ = josephson_energy_ghz(c.number("LJ_pH", 990.0));
    }
    root.attach("circuit", c);

    Section s = root.child("sweep");
    Section g = s.child("phix_Phi0");
    cfg.phix = {g.number("start", 0.494), g.number("stop", 0.506), g.integer("points", 41)};
    s.attach("phix_Phi0", g);
    cfg.Lc_list = s.list<double>("Lc_pH", {r.Lc});
    cfg.sum1 = s.number("Lc_plus_L1_pH", r.Lc + r.L1);
    cfg.sum2 = s.number("Lc_plus_L2_pH", r.Lc + r.L2);
    cfg.wavefunction_phix = s.list<double>("wavefunction_phix_Phi0", {0.5});
    root.attach("sweep", s);

    Section n = root.child("numerics");
    Section b = n.child("qubit_basis");
    cfg.qubit_basis = {b.number("n_max", 8.0), b.integer("waves", 32), b.integer("grid_points", 128)};
    n.attach("qubit_basis", b);
    cfg.trunc_flux = read_truncation(n.child("truncation_flux"), default_truncation(Gauge::flux), n,
                                     "truncation_flux");
    cfg.trunc_charge = read_truncation(n.child("truncation_charge"), default_truncation(Gauge::charge),
                                       n, "truncation_charge");
    cfg.convergence_tol = n.number("convergence_tol_GHz", 1e-3);
    cfg.qubit_levels = n.integer("qubit_levels", 6);
    cfg.coupled_levels = n.integer("coupled_levels", 8);
    cfg.observable_states = n.integer("observable_states", 4);
    Section f = n.child("fit");
    cfg.fit_levels = f.list<int>("levels", {3});
    cfg.fit.restarts = f.integer("restarts", 3);
    cfg.fit.max_evals_per_run = f.integer("max_evals_per_run", 2000);
    cfg.fit.tolerance = f.number("tolerance", 1e-10);
    cfg.fit.initial_step = f.number("initial_step", 0.02);
    n.attach("fit", f);
    Section p = n.child("perturbation");
    cfg.pert_max_m = p.integer("max_m", 5);
    cfg.pert_qubit_levels = p.integer("qubit_levels", 6);
    n.attach("perturbation", p);
    root.attach("numerics", n);

    {
        const json* t = doc.contains("tasks") ? &doc.at("tasks") : nullptr;
        if (t) {
            if (!t->is_array()) throw ConfigError("tasks must be an array of names");
            for (const json& e : *t) {
                if (!e.is_string()) throw ConfigError("tasks must be an array of names");
                cfg.tasks.push_back(e.get<std::string>());
            }
        }
    }
    Section o = root.child("output");
    cfg.out_dir = o.text("dir", "out");
    root.attach("output", o);

    root.mark("tasks");
    cfg.effective = root.finish();
    cfg.effective["tasks"] = cfg.tasks;

    // validation
    try {
        RawCircuit probe = r;
        probe.validate();
        cfg.qubit_basis.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.phix.points < 1) throw ConfigError("sweep.phix_Phi0.points must be positive");
    if (!(cfg.phix.start <= cfg.phix.stop)) throw ConfigError("sweep.phix_Phi0 needs start <= stop");
    if (!(cfg.phix.start > 0.0 && cfg.phix.stop < 1.0)) {
        throw ConfigError("sweep.phix_Phi0 must lie inside (0, 1)");
    }
    for (double Lc : cfg.Lc_list) {
        if (!(Lc >= 0.0)) throw ConfigError("sweep.Lc_pH entries must be >= 0");
        if (!(cfg.sum1 - Lc > 0.0) || !(cfg.sum2 - Lc > 0.0)) {
            throw ConfigError("fixed sums leave a non-positive L1 or L2 at Lc = " + std::to_string(Lc));
        }
    }
    for (const Truncation& t : {cfg.trunc_flux, cfg.trunc_charge}) {
        if (t.Nq < 4 || t.Nph < 20) throw ConfigError("truncations need Nq >= 4 and Nph >= 20");
        if (t.Nq > cfg.qubit_basis.n_waves) throw ConfigError("truncation Nq exceeds the qubit basis");
    }
    if (cfg.qubit_levels < 6 || cfg.qubit_levels > cfg.qubit_basis.n_waves) {
        throw ConfigError("numerics.qubit_levels must be in [6, waves]");
    }
    if (cfg.coupled_levels < 4) throw ConfigError("numerics.coupled_levels must be >= 4");
    if (cfg.observable_states < 1 || cfg.observable_states > cfg.coupled_levels) {
        throw ConfigError("numerics.observable_states must be in [1, coupled_levels]");
    }
    for (int lv : cfg.fit_levels) {
        if (lv < 1 || lv + 1 > cfg.coupled_levels) {
            throw ConfigError("numerics.fit.levels entries must be in [1, coupled_levels - 1]");
        }
    }
    if (cfg.fit.restarts < 0 || cfg.fit.max_evals_per_run < 1 || !(cfg.fit.tolerance > 0.0) ||
        !(cfg.fit.initial_step > 0.0)) {
        throw ConfigError("numerics.fit settings out of range");
    }
    if (cfg.pert_max_m < 1 || cfg.pert_qubit_levels < 2 || cfg.pert_qubit_levels > cfg.qubit_levels) {
        throw ConfigError("numerics.perturbation settings out of range");
    }
    if (!(cfg.convergence_tol > 0.0)) throw ConfigError("numerics.convergence_tol_GHz must be positive");
    for (double x : cfg.wavefunction_phix) {
        if (!(x > 0.0 && x < 1.0)) throw ConfigError("sweep.wavefunction_phix_Phi0 must lie inside (0, 1)");
    }
    if (!cfg.tasks.empty()) validate_tasks(cfg.tasks);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace fluxrabi::app
