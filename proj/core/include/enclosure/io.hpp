#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "enclosure/grid.hpp"
#include "enclosure/indicator.hpp"
#include "enclosure/recovery.hpp"
#include "enclosure/scene.hpp"
#include "enclosure/solver.hpp"

namespace enclosure::io {

namespace fs = std::filesystem;

// Scene files. Unknown keys and malformed values raise ConfigError; the
// returned config is not yet validated.
SceneConfig parse_scene(const std::string& text);
SceneConfig read_scene(const fs::path& path);
std::string scene_to_json(const SceneConfig& config);
void write_scene(const fs::path& path, const SceneConfig& config);

/// 16 hex digits of FNV-1a over the canonical JSON form.
std::string scene_hash(const SceneConfig& config);

std::string fnv1a_hex(const std::string& bytes);

/// `# key: value` lines at the top of every tabular output, followed by
/// one `# columns:` line.
struct Header {
    std::map<std::string, std::string> fields;
    std::vector<std::string> columns;

    const std::string& get(const std::string& key) const;  ///< FormatError when absent
    double number(const std::string& key) const;
};

/// Shortest text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

struct TraceMeta {
    std::string scene_hash;
    Formulation formulation = Formulation::scattered_field;
    Vec3 probe_center;
    double probe_radius = 0.0;
    double amplitude = 1.0;
};

/// Gzip CSV: face_id, x, y, z, nx, ny, nz, area, then u at every step.
void write_trace(const fs::path& path, const BoundaryTrace& trace, const TraceMeta& meta);
BoundaryTrace read_trace(const fs::path& path, TraceMeta* meta = nullptr);

/// Boundary Laplace accumulators: face_id, then one column per tau.
void write_accumulators(const fs::path& path, const LaplaceAccumulator& acc, const std::string& hash);
LaplaceAccumulator read_accumulators(const fs::path& path);

/// Binary snapshot: magic, scene hash, dims, h, t, origin, then the
/// unpadded cell values (x fastest) as little-endian 64-bit floats.
void write_snapshot(const fs::path& path, const GridField& field, double t, const std::string& hash);
GridField read_snapshot(const fs::path& path, double* t = nullptr, std::string* hash = nullptr);
void write_occupancy(const fs::path& path, const EnclosureEnvelope& envelope, const std::string& hash);

void write_curve(const fs::path& path, const IndicatorCurve& curve, const std::string& hash);
IndicatorCurve read_curve(const fs::path& path, Header* header = nullptr);

/// Plot-ready fit table: tau, log_abs_I, sign, in_window, fit_log_I.
void write_fit_table(const fs::path& path, const IndicatorCurve& curve, IndicatorVariant variant,
                     const FitResult& fit, const std::string& hash);

std::string probe_result_to_json(const ProbeResult& r, const std::string& hash);
ProbeResult probe_result_from_json(const std::string& text);
/// `cumulative_volumes[k]` is the admissible volume using the first k + 1
/// probes (omitted when empty).
std::string envelope_to_json(const EnclosureEnvelope& env, const std::vector<ProbeResult>& results,
                             const std::string& hash, const std::vector<double>& cumulative_volumes = {});

struct OutputEntry {
    std::string path;  ///< relative to the manifest directory
    std::uintmax_t bytes = 0;
    std::string checksum;
};

struct RunManifest {
    std::string scene_hash;
    std::string command;
    std::map<std::string, std::string> parameters;
    std::string tool_version;
    std::string started;
    std::string finished;
    std::vector<OutputEntry> outputs;
    std::vector<std::pair<std::string, double>> stage_seconds;

    /// Records size and checksum of a file already written under `dir`.
    void add_output(const fs::path& dir, const std::string& relative);
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);
void write_manifest(const fs::path& path, const RunManifest& m);
RunManifest read_manifest(const fs::path& path);

/// Scene hash embedded in an output file's header (CSV, gzip CSV, JSON or
/// snapshot); empty when none is found.
std::string embedded_hash(const fs::path& path);

/// Problems with the files listed in a manifest; empty when all exist,
/// match size and checksum, and carry the manifest's hash.
std::vector<std::string> verify_manifest(const fs::path& manifest_path);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
std::string utc_timestamp();

}  // namespace enclosure::io
