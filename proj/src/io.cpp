#include "fng/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fng/errors.hpp"
#include "fng/modes.hpp"

namespace fng {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kVersionField = 1;
constexpr std::uint32_t kVersionSpinor = 2;

void put_bytes(std::ofstream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::ifstream& in, void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw NumericalError("snapshot: truncated file");
}

void write_header(std::ofstream& out, std::uint32_t version, std::uint64_t n, double L, double t) {
    put_bytes(out, "FNG1", 4);
    put_bytes(out, &version, sizeof version);
    put_bytes(out, &n, sizeof n);
    put_bytes(out, &L, sizeof L);
    put_bytes(out, &t, sizeof t);
}

struct Header {
    std::uint32_t version;
    std::uint64_t n;
    double L;
    double t;
};

Header read_header(std::ifstream& in, const fs::path& file) {
    char magic[4];
    get_bytes(in, magic, 4);
    if (std::memcmp(magic, "FNG1", 4) != 0)
        throw NumericalError("snapshot: bad magic in " + file.string());
    Header h{};
    get_bytes(in, &h.version, sizeof h.version);
    get_bytes(in, &h.n, sizeof h.n);
    get_bytes(in, &h.L, sizeof h.L);
    get_bytes(in, &h.t, sizeof h.t);
    return h;
}

void write_field_block(std::ofstream& out, const std::vector<cplx>& f) {
    for (const auto& a : f) {
        const double re = a.real(), im = a.imag();
        put_bytes(out, &re, sizeof re);
        put_bytes(out, &im, sizeof im);
    }
}

void read_field_block(std::ifstream& in, std::vector<cplx>& f, std::size_t n) {
    f.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double re, im;
        get_bytes(in, &re, sizeof re);
        get_bytes(in, &im, sizeof im);
        f[i] = {re, im};
    }
}

} // namespace

void write_snapshot(const fs::path& file, const Grid1D& g, const FieldState& s) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("snapshot: cannot open " + file.string());
    write_header(out, kVersionField, g.n, g.length, s.t);
    write_field_block(out, s.psi);
    if (!out) throw NumericalError("snapshot: write failed for " + file.string());
}

FieldState read_snapshot(const fs::path& file, Grid1D& g_out) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("snapshot: cannot open " + file.string());
    const Header h = read_header(in, file);
    if (h.version != kVersionField)
        throw NumericalError("snapshot: expected wavefunction record in " + file.string());
    g_out = Grid1D(h.L, h.n);
    FieldState s;
    s.t = h.t;
    read_field_block(in, s.psi, h.n);
    return s;
}

void write_spinor_snapshot(const fs::path& file, const Grid1D& g, const BdGSpinor& z, double t) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("snapshot: cannot open " + file.string());
    write_header(out, kVersionSpinor, g.n, g.length, t);
    write_field_block(out, z.u);
    write_field_block(out, z.v);
    if (!out) throw NumericalError("snapshot: write failed for " + file.string());
}

BdGSpinor read_spinor_snapshot(const fs::path& file, Grid1D& g_out, double& t_out) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("snapshot: cannot open " + file.string());
    const Header h = read_header(in, file);
    if (h.version != kVersionSpinor)
        throw NumericalError("snapshot: expected spinor record in " + file.string());
    g_out = Grid1D(h.L, h.n);
    t_out = h.t;
    BdGSpinor z;
    read_field_block(in, z.u, h.n);
    read_field_block(in, z.v, h.n);
    return z;
}

// --- CSV ---

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const fs::path& file, const std::vector<std::string>& columns)
    : path_(file.string()) {
    auto* out = new std::ofstream(file, std::ios::trunc);
    if (!*out) {
        delete out;
        throw ConfigError("csv: cannot open " + path_);
    }
    out_ = out;
    std::string line;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) line += ',';
        line += columns[i];
    }
    *out << line << '\n';
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::row(const std::vector<double>& values) {
    auto* out = static_cast<std::ofstream*>(out_);
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_double(values[i]);
    }
    *out << line << '\n';
}

void CsvWriter::raw_row(const std::string& line) {
    *static_cast<std::ofstream*>(out_) << line << '\n';
}

void CsvWriter::close() {
    if (out_) {
        auto* out = static_cast<std::ofstream*>(out_);
        out->flush();
        delete out;
        out_ = nullptr;
    }
}

CsvTable read_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("csv: cannot open " + file.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.columns = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
        table.rows.push_back(std::move(row));
    }
    return table;
}

// --- configuration ---

KvConfig KvConfig::from_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config: cannot open " + file.string());
    KvConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto issp = [](unsigned char c) { return std::isspace(c); };
        while (!line.empty() && issp(line.back())) line.pop_back();
        std::size_t b = 0;
        while (b < line.size() && issp(line[b])) ++b;
        if (b == line.size()) continue;
        const auto eq = line.find('=', b);
        if (eq == std::string::npos)
            throw ConfigError("config: missing '=' at " + file.string() + ":" +
                              std::to_string(lineno));
        std::string key = line.substr(b, eq - b);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && issp(key.back())) key.pop_back();
        std::size_t vb = 0;
        while (vb < value.size() && issp(value[vb])) ++vb;
        value.erase(0, vb);
        if (key.empty())
            throw ConfigError("config: empty key at " + file.string() + ":" +
                              std::to_string(lineno));
        cfg.kv_[key] = value;
    }
    return cfg;
}

KvConfig KvConfig::from_pairs(const std::vector<std::pair<std::string, std::string>>& kv) {
    KvConfig cfg;
    for (const auto& [k, v] : kv) cfg.kv_[k] = v;
    return cfg;
}

void KvConfig::set(const std::string& key, const std::string& value) { kv_[key] = value; }

bool KvConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

KvConfig KvConfig::merged_under(const KvConfig& over) const {
    KvConfig out = *this;
    for (const auto& [k, v] : over.kv_) out.kv_[k] = v;
    return out;
}

std::string KvConfig::get_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing required key '" + key + "'");
    return it->second;
}

double KvConfig::get_double(const std::string& key) const {
    const std::string raw = get_string(key);
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0')
        throw ConfigError("config: key '" + key + "' expects a real number, got '" + raw + "'");
    return v;
}

double KvConfig::get_double(const std::string& key, double lo, double hi) const {
    const double v = get_double(key);
    if (!(v >= lo && v <= hi))
        throw ConfigError("config: key '" + key + "' must lie in [" + format_double(lo) + ", " +
                          format_double(hi) + "], got " + format_double(v));
    return v;
}

long KvConfig::get_int(const std::string& key) const {
    const std::string raw = get_string(key);
    char* end = nullptr;
    const long v = std::strtol(raw.c_str(), &end, 10);
    if (end == raw.c_str() || *end != '\0')
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + raw + "'");
    return v;
}

std::string KvConfig::get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double KvConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long KvConfig::get_int_or(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

void KvConfig::restrict_keys(const std::vector<std::string>& accepted) const {
    for (const auto& [k, v] : kv_) {
        (void)v;
        bool ok = false;
        for (const auto& a : accepted)
            if (k == a) {
                ok = true;
                break;
            }
        if (!ok) {
            std::string domain;
            for (std::size_t i = 0; i < accepted.size(); ++i) {
                if (i) domain += ", ";
                domain += accepted[i];
            }
            throw ConfigError("config: unknown key '" + k + "'; accepted keys: " + domain);
        }
    }
}

std::string KvConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : kv_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

// --- manifest ---

std::uint64_t fnv1a64_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("checksum: cannot open " + file.string());
    std::uint64_t h = 1469598103934665603ull;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof buf);
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

void RunManifest::add_file(const fs::path& dir, const std::string& relpath) {
    ManifestEntry e;
    e.path = relpath;
    const fs::path full = dir / relpath;
    e.bytes = static_cast<std::uint64_t>(fs::file_size(full));
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016" PRIx64, fnv1a64_file(full));
    e.fnv64 = hex;
    files.push_back(std::move(e));
}

void RunManifest::write(const fs::path& file) const {
    nlohmann::json j;
    j["config"] = config;
    j["code_version"] = code_version;
    j["started"] = started;
    j["finished"] = finished;
    auto& arr = j["files"] = nlohmann::json::array();
    for (const auto& e : files)
        arr.push_back({{"path", e.path}, {"bytes", e.bytes}, {"fnv64", e.fnv64}});
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw ConfigError("manifest: cannot open " + tmp.string());
        out << j.dump(2) << '\n';
    }
    fs::rename(tmp, file);
}

std::optional<RunManifest> RunManifest::load(const fs::path& file) {
    std::ifstream in(file);
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
    RunManifest m;
    if (j.contains("config"))
        for (const auto& [k, v] : j["config"].items()) m.config[k] = v.get<std::string>();
    m.code_version = j.value("code_version", "");
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    if (j.contains("files"))
        for (const auto& e : j["files"])
            m.files.push_back({e.value("path", ""), e.value("bytes", std::uint64_t{0}),
                               e.value("fnv64", "")});
    return m;
}

std::vector<std::string> RunManifest::verify(const fs::path& dir) const {
    std::vector<std::string> bad;
    for (const auto& e : files) {
        const fs::path full = dir / e.path;
        if (!fs::exists(full)) {
            bad.push_back(e.path);
            continue;
        }
        if (static_cast<std::uint64_t>(fs::file_size(full)) != e.bytes) {
            bad.push_back(e.path);
            continue;
        }
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016" PRIx64, fnv1a64_file(full));
        if (e.fnv64 != hex) bad.push_back(e.path);
    }
    return bad;
}

std::string code_version_string() { return "fng 0.1.0"; }

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

} // namespace fng
