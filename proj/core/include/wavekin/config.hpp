#pragma once

#include "wavekin/geometry.hpp"
#include "wavekin/samplers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wavekin {

inline constexpr const char* kVersion = "wavekin 0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Declarative run configuration. Every key has a flat dotted path used by
/// the config file and the --set overrides (documented in the README).
struct RunConfig {
    // kernel
    double epsilon = 0.75;
    int quad_order = 8;
    int radial_table_n = 4096;

    // grid / box
    int grid_n = 64;
    double box_halfwidth = 6.0;
    double support_radius = 2.0; // B_R

    // integrator
    double dt = 0.08;
    double T = 5.0;
    int snapshot_stride = 1;     // field recording stride (steps)
    int diagnostics_stride = 5;  // diagnostics sampling stride

    // ensemble
    std::string ensemble_kind = "two-body"; // two-body | ground-state |
                                            // eight-body | sampler | file
    std::size_t n_particles = 2;
    std::uint64_t seed = 20240801;
    std::string ensemble_file;
    SamplerSpec sampler;

    // two-body geometry
    double pair_separation = 2.0;
    double pair_momentum = 0.1002;

    // studies
    std::vector<std::size_t> lln_sweep = {64, 128, 256, 512, 1024, 2048};
    int lln_replicas = 16;
    std::size_t reference_n = 16384;
    std::vector<double> study_times = {0.0, 1.0, 2.0};
    std::vector<std::size_t> clt_sweep = {64, 256, 1024};
    int clt_replicas = 200;
    std::size_t sensitivity_atoms = 512;
    std::size_t covariance_nodes = 256;
    std::vector<double> probe_times = {1.0, 2.0};
    Phase test_particle{{0.0, 0.8, 0.0}, {-0.3367, 0.0, 0.0}};

    // misc
    std::string output_dir;
    int threads = 0;
    double coupling_scale = 1.0;

    double spacing() const { return 2.0 * box_halfwidth / (grid_n - 1); }
    void validate() const;
};

/// Named presets: ground-state, two-body, eight-body, lln-default, clt-default.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Reads a JSON config file; unknown keys are rejected with their path.
RunConfig load_config(const std::string& path);

/// Parses a config from JSON text (the manifest echo).
RunConfig parse_config_json(const std::string& text);

/// Applies one "key=value" override with dotted keys matching the file format.
void apply_override(RunConfig& c, const std::string& keyval);

/// Serializes the config back to JSON (the manifest echo).
std::string dump_config(const RunConfig& c);

/// Default output root: $WAVEKIN_OUT or "./runs".
std::string default_output_root();

} // namespace wavekin
