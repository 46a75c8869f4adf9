#pragma once

// Persistence: FNG1 binary snapshots, round-trippable CSV emission, flat
// key=value run configuration, and the run manifest with checksums.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fng/grid.hpp"

namespace fng {

struct BdGSpinor; // modes.hpp

// --- FNG1 snapshot format ---------------------------------------------------
// magic "FNG1", version u32 (1 = wavefunction, 2 = BdG spinor), N u64,
// L f64, t f64, then N (version 1) or 2N (version 2) interleaved (re,im)
// f64 pairs, all little-endian.

void write_snapshot(const std::filesystem::path& file, const Grid1D& g, const FieldState& s);
FieldState read_snapshot(const std::filesystem::path& file, Grid1D& g_out);

void write_spinor_snapshot(const std::filesystem::path& file, const Grid1D& g,
                           const BdGSpinor& z, double t);
BdGSpinor read_spinor_snapshot(const std::filesystem::path& file, Grid1D& g_out, double& t_out);

// --- CSV ---------------------------------------------------------------------

// Writes rows of doubles in scientific notation with 17 significant digits,
// so a reload reproduces the values bit-exactly.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& columns);
    ~CsvWriter();
    void row(const std::vector<double>& values);
    void raw_row(const std::string& line);
    void close();

private:
    std::string path_;
    void* out_;
};

std::string format_double(double v);

// Reads back a CSV written by CsvWriter; returns column names and rows.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& file);

// --- run configuration --------------------------------------------------------

// Flat key=value configuration with '#' comments. Typed getters throw
// ConfigError naming the offending key and the accepted domain.
class KvConfig {
public:
    KvConfig() = default;
    static KvConfig from_file(const std::filesystem::path& file);
    static KvConfig from_pairs(const std::vector<std::pair<std::string, std::string>>& kv);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return kv_; }

    // merge with precedence: values in 'over' win
    KvConfig merged_under(const KvConfig& over) const;

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double lo, double hi) const;
    long get_int(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double_or(const std::string& key, double fallback) const;
    long get_int_or(const std::string& key, long fallback) const;

    // rejects keys outside the accepted set
    void restrict_keys(const std::vector<std::string>& accepted) const;

    // canonical text form: sorted keys, one per line, numbers untouched
    std::string serialize() const;

private:
    std::map<std::string, std::string> kv_;
};

// --- manifest ------------------------------------------------------------------

std::uint64_t fnv1a64_file(const std::filesystem::path& file);

struct ManifestEntry {
    std::string path; // relative to the manifest directory
    std::uint64_t bytes = 0;
    std::string fnv64; // hex
};

// Run manifest: config echo, code version, timestamps, produced files with
// checksums. Written atomically (temp file + rename) as JSON.
struct RunManifest {
    std::map<std::string, std::string> config;
    std::string code_version;
    std::string started;
    std::string finished;
    std::vector<ManifestEntry> files;

    void add_file(const std::filesystem::path& dir, const std::string& relpath);
    void write(const std::filesystem::path& file) const;
    static std::optional<RunManifest> load(const std::filesystem::path& file);

    // returns the relative paths whose checksum or size no longer matches
    std::vector<std::string> verify(const std::filesystem::path& dir) const;
};

std::string code_version_string();
std::string timestamp_utc();

} // namespace fng
