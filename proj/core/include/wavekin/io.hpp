#pragma once

#include "wavekin/conservation.hpp"
#include "wavekin/field.hpp"
#include "wavekin/particles.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace wavekin {

/// Ensemble CSV: header "id,q1,q2,q3,p1,p2,p3,weight", one row per particle,
/// %.17g fields so reruns are byte-identical.
void write_ensemble_csv(const std::filesystem::path& path, const ParticleEnsemble& e);
ParticleEnsemble read_ensemble_csv(const std::filesystem::path& path);

/// Binary twin: flat little-endian f64 array [q1 q2 q3 p1 p2 p3 w] per
/// particle, with a JSON sidecar header (count, layout, byte order).
void write_ensemble_binary(const std::filesystem::path& stem, const ParticleEnsemble& e);
ParticleEnsemble read_ensemble_binary(const std::filesystem::path& stem);

/// Field snapshot: flat little-endian f64 grids psi then pi, JSON sidecar
/// with dims, spacing, box, time, tail.
void write_field_binary(const std::filesystem::path& stem, const WaveField& f);
WaveField read_field_binary(const std::filesystem::path& stem);

/// Diagnostics stream, one row per sample time.
void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRecord>& recs);
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path);

std::string format_double(double v); // %.17g

} // namespace wavekin
