#include "wavekin/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wavekin {

using nlohmann::json;

void RunConfig::validate() const {
    if (epsilon <= 0) throw ConfigError("kernel.epsilon must be positive");
    if (quad_order < 2 || quad_order > 32) throw ConfigError("kernel.quad_order out of range");
    if (grid_n < 8) throw ConfigError("grid.n must be >= 8");
    if (box_halfwidth <= 0) throw ConfigError("grid.box must be positive");
    if (dt <= 0) throw ConfigError("integrator.dt must be positive");
    if (T <= 0) throw ConfigError("integrator.T must be positive");
    const double h = spacing();
    if (dt > h / std::sqrt(3.0) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "integrator.dt=" << dt << " violates the CFL bound h/sqrt(3)=" << h / std::sqrt(3.0);
        throw ConfigError(os.str());
    }
    if (box_halfwidth < support_radius + T) {
        std::ostringstream os;
        os << "grid.box=" << box_halfwidth << " too small: need >= R + T = "
           << support_radius + T << " (domain-of-dependence guard)";
        throw ConfigError(os.str());
    }
    if (ensemble_kind != "two-body" && ensemble_kind != "ground-state" &&
        ensemble_kind != "eight-body" && ensemble_kind != "sampler" &&
        ensemble_kind != "file")
        throw ConfigError("ensemble.kind must be one of two-body|ground-state|eight-body|"
                          "sampler|file, got '" + ensemble_kind + "'");
    if (ensemble_kind != "file" && n_particles == 0)
        throw ConfigError("ensemble.n must be positive");
    if (snapshot_stride < 1) throw ConfigError("integrator.snapshot_stride must be >= 1");
    const int steps = static_cast<int>(std::llround(T / dt));
    if (std::abs(steps * dt - T) > 1e-9 * std::max(1.0, T))
        throw ConfigError("integrator.T must be an integer multiple of integrator.dt");
    if (clt_replicas == 1) throw ConfigError("study.clt_replicas must be >= 2");
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    if (name == "two-body") {
        c.ensemble_kind = "two-body";
        c.n_particles = 2;
        c.epsilon = 0.75;
        c.grid_n = 96;
        c.box_halfwidth = 7.2;
        c.support_radius = 2.0;
        c.dt = 0.0625;
        c.T = 5.0;
        c.diagnostics_stride = 5;
    } else if (name == "ground-state") {
        c.ensemble_kind = "ground-state";
        c.n_particles = 8;
        c.epsilon = 0.75;
        c.grid_n = 128;
        c.box_halfwidth = 3.0;
        c.support_radius = 1.5;
        c.dt = 0.025;
        c.T = 1.0;
        c.diagnostics_stride = 8;
    } else if (name == "eight-body") {
        c.ensemble_kind = "eight-body";
        c.n_particles = 8;
        c.epsilon = 0.5;
        c.grid_n = 80;
        c.box_halfwidth = 6.0;
        c.support_radius = 2.2;
        c.dt = 0.0625;
        c.T = 3.0;
        c.diagnostics_stride = 4;
    } else if (name == "lln-default") {
        c.ensemble_kind = "sampler";
        c.sampler.kind = "ring";
        c.sampler.ring = {0.8, 0.3367};
        c.n_particles = 256;
        c.epsilon = 0.4;
        c.grid_n = 48;
        c.box_halfwidth = 4.0;
        c.support_radius = 1.25;
        c.dt = 0.05;
        c.T = 2.0;
        c.diagnostics_stride = 0;
        c.lln_sweep = {64, 128, 256, 512, 1024, 2048};
        c.lln_replicas = 16;
        c.reference_n = 16384;
        c.study_times = {0.0, 1.0, 2.0};
    } else if (name == "clt-default") {
        c.ensemble_kind = "sampler";
        c.sampler.kind = "ring";
        c.sampler.ring = {0.8, 0.3367};
        c.n_particles = 1024;
        c.epsilon = 0.4;
        c.grid_n = 48;
        c.box_halfwidth = 4.0;
        c.support_radius = 1.25;
        c.dt = 0.05;
        c.T = 2.0;
        c.diagnostics_stride = 0;
        c.clt_sweep = {64, 256, 1024};
        c.clt_replicas = 200;
        c.sensitivity_atoms = 512;
        c.covariance_nodes = 256;
        c.probe_times = {1.0, 2.0};
        c.reference_n = 8192;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
}

std::vector<std::string> preset_names() {
    return {"two-body", "ground-state", "eight-body", "lln-default", "clt-default"};
}

namespace {

template <class T>
void get_to(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

void parse_section(RunConfig& c, const json& j) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& sec = it.key();
        const json& v = it.value();
        if (sec == "kernel") {
            get_to(v, "epsilon", c.epsilon);
            get_to(v, "quad_order", c.quad_order);
            get_to(v, "radial_table_n", c.radial_table_n);
        } else if (sec == "grid") {
            get_to(v, "n", c.grid_n);
            get_to(v, "box", c.box_halfwidth);
            get_to(v, "R", c.support_radius);
        } else if (sec == "integrator") {
            get_to(v, "dt", c.dt);
            get_to(v, "T", c.T);
            get_to(v, "snapshot_stride", c.snapshot_stride);
            get_to(v, "diagnostics_stride", c.diagnostics_stride);
        } else if (sec == "ensemble") {
            get_to(v, "kind", c.ensemble_kind);
            get_to(v, "n", c.n_particles);
            get_to(v, "seed", c.seed);
            get_to(v, "file", c.ensemble_file);
            get_to(v, "pair_separation", c.pair_separation);
            get_to(v, "pair_momentum", c.pair_momentum);
            if (v.contains("sampler")) {
                const json& s = v.at("sampler");
                get_to(s, "kind", c.sampler.kind);
                get_to(s, "ring_radius", c.sampler.ring.radius);
                get_to(s, "ring_momentum", c.sampler.ring.momentum);
                get_to(s, "ball_q_radius", c.sampler.ball.q_radius);
                get_to(s, "ball_p_radius", c.sampler.ball.p_radius);
            }
        } else if (sec == "study") {
            get_to(v, "lln_sweep", c.lln_sweep);
            get_to(v, "lln_replicas", c.lln_replicas);
            get_to(v, "reference_n", c.reference_n);
            get_to(v, "times", c.study_times);
            get_to(v, "clt_sweep", c.clt_sweep);
            get_to(v, "clt_replicas", c.clt_replicas);
            get_to(v, "sensitivity_atoms", c.sensitivity_atoms);
            get_to(v, "covariance_nodes", c.covariance_nodes);
            get_to(v, "probe_times", c.probe_times);
            if (v.contains("test_particle")) {
                const auto a = v.at("test_particle").get<std::vector<double>>();
                if (a.size() != 6) throw ConfigError("study.test_particle needs 6 numbers");
                c.test_particle = {{a[0], a[1], a[2]}, {a[3], a[4], a[5]}};
            }
        } else if (sec == "output") {
            get_to(v, "dir", c.output_dir);
        } else if (sec == "run") {
            get_to(v, "threads", c.threads);
            get_to(v, "coupling_scale", c.coupling_scale);
        } else {
            throw ConfigError("unknown config section '" + sec + "'");
        }
    }
}

} // namespace

namespace {
RunConfig config_from_json(json j) {
    RunConfig c;
    if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
    j.erase("preset");
    parse_section(c, j);
    return c;
}
} // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(std::move(j));
}

RunConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(std::move(j));
}

void apply_override(RunConfig& c, const std::string& keyval) {
    const auto eq = keyval.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be key=value, got '" + keyval + "'");
    const std::string key = keyval.substr(0, eq);
    const std::string val = keyval.substr(eq + 1);
    const auto dotpos = key.find('.');
    if (dotpos == std::string::npos)
        throw ConfigError("override key must be section.key, got '" + key + "'");
    json j;
    json leaf;
    // parse value as JSON when possible, else treat as string
    try {
        leaf = json::parse(val);
    } catch (...) {
        leaf = val;
    }
    // nested path support (section.key or section.sub.key)
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : key) {
        if (ch == '.') {
            parts.push_back(cur);
            cur.clear();
        } else
            cur += ch;
    }
    parts.push_back(cur);
    json* node = &j;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
    (*node)[parts.back()] = leaf;
    parse_section(c, j);
}

std::string dump_config(const RunConfig& c) {
    json j;
    j["kernel"] = {{"epsilon", c.epsilon},
                   {"quad_order", c.quad_order},
                   {"radial_table_n", c.radial_table_n}};
    j["grid"] = {{"n", c.grid_n}, {"box", c.box_halfwidth}, {"R", c.support_radius}};
    j["integrator"] = {{"dt", c.dt},
                       {"T", c.T},
                       {"snapshot_stride", c.snapshot_stride},
                       {"diagnostics_stride", c.diagnostics_stride}};
    j["ensemble"] = {{"kind", c.ensemble_kind},
                     {"n", c.n_particles},
                     {"seed", c.seed},
                     {"file", c.ensemble_file},
                     {"pair_separation", c.pair_separation},
                     {"pair_momentum", c.pair_momentum},
                     {"sampler",
                      {{"kind", c.sampler.kind},
                       {"ring_radius", c.sampler.ring.radius},
                       {"ring_momentum", c.sampler.ring.momentum},
                       {"ball_q_radius", c.sampler.ball.q_radius},
                       {"ball_p_radius", c.sampler.ball.p_radius}}}};
    j["study"] = {{"lln_sweep", c.lln_sweep},
                  {"lln_replicas", c.lln_replicas},
                  {"reference_n", c.reference_n},
                  {"times", c.study_times},
                  {"clt_sweep", c.clt_sweep},
                  {"clt_replicas", c.clt_replicas},
                  {"sensitivity_atoms", c.sensitivity_atoms},
                  {"covariance_nodes", c.covariance_nodes},
                  {"probe_times", c.probe_times},
                  {"test_particle",
                   {c.test_particle.q.x, c.test_particle.q.y, c.test_particle.q.z,
                    c.test_particle.p.x, c.test_particle.p.y, c.test_particle.p.z}}};
    j["output"] = {{"dir", c.output_dir}};
    j["run"] = {{"threads", c.threads}, {"coupling_scale", c.coupling_scale}};
    return j.dump(2);
}

std::string default_output_root() {
    if (const char* env = std::getenv("WAVEKIN_OUT")) return env;
    return "runs";
}

} // namespace wavekin
