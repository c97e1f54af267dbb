#pragma once

// Readers and writers for every external format: VOS map and network files,
// Pajek network/vector/cluster files, CSV accumulation tables, symmetric
// matrix CSVs, and the sparse 2-mode dump.
//
// Output conventions: 6-decimal fixed-point reals with '.' regardless of
// locale, single line feeds, trailing newline at EOF, no timestamps. Given
// identical inputs every writer is byte-deterministic.

#include <errno.h>
#include <fcntl.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "patmap/cluster.hpp"
#include "patmap/common.hpp"
#include "patmap/diversity.hpp"
#include "patmap/portfolio.hpp"
#include "patmap/similarity.hpp"
#include "patmap/two_mode.hpp"

namespace patmap {

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("write failed for '" + path + "'");
}

// Splits on '\n'; ignores a trailing empty segment from the final newline.
inline std::vector<std::string> read_lines(const std::string& path) {
    std::string content = read_file(path);
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= content.size()) {
        size_t pos = content.find('\n', start);
        std::string line = pos == std::string::npos ? content.substr(start)
                                                    : content.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (pos == std::string::npos) {
            if (!line.empty()) lines.push_back(std::move(line));
            break;
        }
        lines.push_back(std::move(line));
        start = pos + 1;
    }
    return lines;
}

inline double parse_real_field(std::string_view field, const std::string& path, size_t line_no) {
    auto v = parse_double(field);
    if (!v || !std::isfinite(*v))
        throw Error(path + ":" + std::to_string(line_no) + ": expected a finite number, got '" +
                    std::string(field) + "'");
    return *v;
}

inline long parse_int_field(std::string_view field, const std::string& path, size_t line_no) {
    auto v = parse_int(field);
    if (!v)
        throw Error(path + ":" + std::to_string(line_no) + ": expected an integer, got '" +
                    std::string(field) + "'");
    return *v;
}

}  // namespace detail

// Exclusive per-path writer access. Concurrent runs against the same table
// are rejected, not queued.
class PathLock {
public:
    explicit PathLock(const std::string& path) : lock_path_(path + ".lock") {
        fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            if (errno == EEXIST)
                throw Error("'" + path + "' is locked by another run (remove '" + lock_path_ +
                            "' if stale)");
            throw Error("cannot create lock file '" + lock_path_ + "'");
        }
    }
    ~PathLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(lock_path_.c_str());
        }
    }
    PathLock(const PathLock&) = delete;
    PathLock& operator=(const PathLock&) = delete;

private:
    std::string lock_path_;
    int fd_ = -1;
};

// --- VOS map files -----------------------------------------------------------

// Tab-separated, header row. Columns: id, label, x, y, cluster, then
// optionally weight, then score and color on difference maps.

struct VosRow {
    int id = 0;
    std::string label;
    double x = 0.0;
    double y = 0.0;
    int cluster = 0;
    std::optional<double> weight;
    std::optional<double> score;
    std::optional<DiffColor> color;
};

struct VosMapFile {
    bool has_weight = false;
    bool has_score = false;
    bool has_color = false;
    std::vector<VosRow> rows;
};

inline std::string render_vos_map(const BaseMap& base) {
    std::string out = "id\tlabel\tx\ty\tcluster\n";
    for (const auto& n : base.nodes) {
        out += std::to_string(n.id) + '\t' + n.label + '\t' + format_fixed(n.x) + '\t' +
               format_fixed(n.y) + '\t' + std::to_string(n.cluster) + '\n';
    }
    return out;
}

inline std::string render_vos_map(const OverlayMap& map) {
    std::string out = "id\tlabel\tx\ty\tcluster\tweight";
    if (map.is_difference) out += "\tscore\tcolor";
    out += '\n';
    for (const auto& n : map.nodes) {
        out += std::to_string(n.id) + '\t' + n.label + '\t' + format_fixed(n.x) + '\t' +
               format_fixed(n.y) + '\t' + std::to_string(n.cluster) + '\t' +
               format_fixed(n.weight);
        if (map.is_difference) {
            out += '\t' + format_fixed(n.score) + '\t' + std::string(to_string(n.color));
        }
        out += '\n';
    }
    return out;
}

template <typename Map>
void write_vos_map(const Map& map, const std::string& path) {
    detail::write_file(path, render_vos_map(map));
}

inline VosMapFile read_vos_map(const std::string& path) {
    const std::vector<std::string> lines = detail::read_lines(path);
    if (lines.empty()) throw Error(path + ": empty map file");

    const auto header = split(lines[0], '\t');
    static const std::vector<std::string> full = {"id", "label", "x", "y",
                                                  "cluster", "weight", "score", "color"};
    if (header.size() < 5 || header.size() > full.size())
        throw Error(path + ":1: malformed header");
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] != full[i]) throw Error(path + ":1: malformed header");

    VosMapFile file;
    file.has_weight = header.size() >= 6;
    file.has_score = header.size() >= 7;
    file.has_color = header.size() >= 8;

    for (size_t ln = 1; ln < lines.size(); ++ln) {
        const auto fields = split(lines[ln], '\t');
        if (fields.size() != header.size())
            throw Error(path + ":" + std::to_string(ln + 1) + ": expected " +
                        std::to_string(header.size()) + " columns, got " +
                        std::to_string(fields.size()));
        VosRow row;
        row.id = static_cast<int>(detail::parse_int_field(fields[0], path, ln + 1));
        row.label = std::string(fields[1]);
        row.x = detail::parse_real_field(fields[2], path, ln + 1);
        row.y = detail::parse_real_field(fields[3], path, ln + 1);
        row.cluster = static_cast<int>(detail::parse_int_field(fields[4], path, ln + 1));
        if (file.has_weight) row.weight = detail::parse_real_field(fields[5], path, ln + 1);
        if (file.has_score) row.score = detail::parse_real_field(fields[6], path, ln + 1);
        if (file.has_color) {
            if (fields[7] == "red") row.color = DiffColor::red;
            else if (fields[7] == "green") row.color = DiffColor::green;
            else if (fields[7] == "neutral") row.color = DiffColor::neutral;
            else
                throw Error(path + ":" + std::to_string(ln + 1) + ": unknown color '" +
                            std::string(fields[7]) + "'");
        }
        file.rows.push_back(std::move(row));
    }
    return file;
}

inline BaseMap to_base_map(const VosMapFile& file) {
    BaseMap base;
    base.nodes.reserve(file.rows.size());
    for (const auto& r : file.rows) base.nodes.push_back({r.id, r.label, r.x, r.y, r.cluster});
    return base;
}

inline OverlayMap to_overlay_map(const VosMapFile& file) {
    if (!file.has_weight) throw Error("map file has no weight column");
    OverlayMap map;
    map.is_difference = file.has_score && file.has_color;
    map.nodes.reserve(file.rows.size());
    for (const auto& r : file.rows) {
        map.nodes.push_back({r.id, r.label, r.x, r.y, r.cluster, *r.weight,
                             map.is_difference ? *r.score : 0.0,
                             map.is_difference ? *r.color : DiffColor::neutral});
    }
    return map;
}

// --- VOS network files -------------------------------------------------------

// One "i<TAB>j<TAB>strength" line per retained edge (i < j, 1-based ids),
// strengths scaled at export.
inline std::string render_vos_network(const SymmetricMatrix& s, double threshold, double scale) {
    if (threshold < 0) throw Error("network threshold must be >= 0");
    if (!(scale > 0)) throw Error("scale factor must be positive");
    std::string out;
    for (int i = 0; i < s.size(); ++i) {
        for (int j = i + 1; j < s.size(); ++j) {
            const double strength = s(i, j) * scale;
            if (strength >= threshold && strength > 0) {
                out += std::to_string(i + 1) + '\t' + std::to_string(j + 1) + '\t' +
                       format_fixed(strength) + '\n';
            }
        }
    }
    return out;
}

inline void write_vos_network(const SymmetricMatrix& s, double threshold, double scale,
                              const std::string& path) {
    detail::write_file(path, render_vos_network(s, threshold, scale));
}

// --- Pajek files -------------------------------------------------------------

struct PajekEdge {
    int from = 0;  // 0-based here; written 1-based
    int to = 0;
    double weight = 0.0;
};

struct PajekBundle {
    std::vector<std::string> labels;
    std::vector<PajekEdge> edges;
    std::vector<double> vector_values;   // one per vertex
    std::vector<int> cluster_values;     // one per vertex
};

inline std::string render_pajek_network(const std::vector<std::string>& labels,
                                        const std::vector<PajekEdge>& edges) {
    std::string out = "*Vertices " + std::to_string(labels.size()) + '\n';
    for (size_t i = 0; i < labels.size(); ++i)
        out += std::to_string(i + 1) + " \"" + labels[i] + "\"\n";
    out += "*Edges\n";
    for (const auto& e : edges)
        out += std::to_string(e.from + 1) + ' ' + std::to_string(e.to + 1) + ' ' +
               format_fixed(e.weight) + '\n';
    return out;
}

inline std::string render_pajek_vector(const std::vector<double>& values) {
    std::string out = "*Vertices " + std::to_string(values.size()) + '\n';
    for (double v : values) out += format_fixed(v) + '\n';
    return out;
}

inline std::string render_pajek_cluster(const std::vector<int>& values) {
    std::string out = "*Vertices " + std::to_string(values.size()) + '\n';
    for (int v : values) out += std::to_string(v) + '\n';
    return out;
}

inline void write_pajek_network(const std::vector<std::string>& labels,
                                const std::vector<PajekEdge>& edges, const std::string& path) {
    detail::write_file(path, render_pajek_network(labels, edges));
}

inline void write_pajek_vector(const std::vector<double>& values, const std::string& path) {
    detail::write_file(path, render_pajek_vector(values));
}

inline void write_pajek_cluster(const std::vector<int>& values, const std::string& path) {
    detail::write_file(path, render_pajek_cluster(values));
}

// Writes base_path + ".net" / ".vec" / ".cls".
inline void write_pajek(const PajekBundle& bundle, const std::string& base_path) {
    const size_t n = bundle.labels.size();
    if (bundle.vector_values.size() != n || bundle.cluster_values.size() != n)
        throw Error("pajek bundle: vertex counts disagree across files");
    for (const auto& e : bundle.edges)
        if (e.from < 0 || e.to < 0 || e.from >= static_cast<int>(n) || e.to >= static_cast<int>(n))
            throw Error("pajek bundle: edge endpoint out of range");
    write_pajek_network(bundle.labels, bundle.edges, base_path + ".net");
    write_pajek_vector(bundle.vector_values, base_path + ".vec");
    write_pajek_cluster(bundle.cluster_values, base_path + ".cls");
}

namespace detail {

inline size_t parse_pajek_vertices(const std::vector<std::string>& lines,
                                   const std::string& path) {
    if (lines.empty() || lines[0].rfind("*Vertices ", 0) != 0)
        throw Error(path + ":1: expected '*Vertices n'");
    auto n = parse_int(std::string_view(lines[0]).substr(10));
    if (!n || *n < 0) throw Error(path + ":1: invalid vertex count");
    return static_cast<size_t>(*n);
}

}  // namespace detail

inline void read_pajek_network(const std::string& path, std::vector<std::string>& labels,
                               std::vector<PajekEdge>& edges) {
    const auto lines = detail::read_lines(path);
    const size_t n = detail::parse_pajek_vertices(lines, path);
    if (lines.size() < n + 2 || lines[n + 1] != "*Edges")
        throw Error(path + ": expected '*Edges' after " + std::to_string(n) + " vertices");

    labels.clear();
    for (size_t i = 1; i <= n; ++i) {
        const std::string& line = lines[i];
        const size_t q1 = line.find('"');
        const size_t q2 = line.rfind('"');
        if (q1 == std::string::npos || q2 <= q1)
            throw Error(path + ":" + std::to_string(i + 1) + ": expected quoted label");
        labels.push_back(line.substr(q1 + 1, q2 - q1 - 1));
    }

    edges.clear();
    for (size_t i = n + 2; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::istringstream iss(lines[i]);
        long a = 0, b = 0;
        std::string w;
        if (!(iss >> a >> b >> w))
            throw Error(path + ":" + std::to_string(i + 1) + ": malformed edge");
        edges.push_back({static_cast<int>(a - 1), static_cast<int>(b - 1),
                         detail::parse_real_field(w, path, i + 1)});
    }
}

inline std::vector<double> read_pajek_vector(const std::string& path) {
    const auto lines = detail::read_lines(path);
    const size_t n = detail::parse_pajek_vertices(lines, path);
    if (lines.size() != n + 1) throw Error(path + ": vertex count does not match line count");
    std::vector<double> values;
    values.reserve(n);
    for (size_t i = 1; i <= n; ++i)
        values.push_back(detail::parse_real_field(lines[i], path, i + 1));
    return values;
}

inline std::vector<int> read_pajek_cluster(const std::string& path) {
    const auto lines = detail::read_lines(path);
    const size_t n = detail::parse_pajek_vertices(lines, path);
    if (lines.size() != n + 1) throw Error(path + ": vertex count does not match line count");
    std::vector<int> values;
    values.reserve(n);
    for (size_t i = 1; i <= n; ++i)
        values.push_back(static_cast<int>(detail::parse_int_field(lines[i], path, i + 1)));
    return values;
}

// --- CSV ----------------------------------------------------------------------

namespace detail {

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> parse_csv_line(std::string_view line, const std::string& path,
                                               size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"' && current.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
        ++i;
    }
    if (quoted) throw Error(path + ":" + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(current));
    return fields;
}

}  // namespace detail

// Class scheme CSV: header "code,title".
inline ClassScheme read_class_scheme(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw Error(path + ": empty scheme file");
    const auto header = detail::parse_csv_line(lines[0], path, 1);
    if (header.size() < 2 || header[0] != "code" || header[1] != "title")
        throw Error(path + ":1: expected header 'code,title'");
    std::vector<std::pair<std::string, std::string>> entries;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = detail::parse_csv_line(lines[i], path, i + 1);
        if (fields.size() < 2)
            throw Error(path + ":" + std::to_string(i + 1) + ": expected code,title");
        entries.emplace_back(fields[0], fields[1]);
    }
    return ClassScheme(std::move(entries));
}

inline std::string render_class_scheme(const ClassScheme& scheme) {
    std::string out = "code,title\n";
    for (int i = 0; i < scheme.size(); ++i)
        out += scheme.code(i) + ',' + detail::csv_field(scheme.title(i)) + '\n';
    return out;
}

inline void write_class_scheme(const ClassScheme& scheme, const std::string& path) {
    detail::write_file(path, render_class_scheme(scheme));
}

// Symmetric matrix CSV: first row and column carry the class codes; the
// corner cell records the similarity kind so readers can enforce the
// cosine-only distance policy.
inline std::string render_symmetric_csv(const SymmetricMatrix& s,
                                        const std::vector<std::string>& codes,
                                        double scale = 1.0) {
    if (static_cast<int>(codes.size()) != s.size())
        throw Error("symmetric csv: label count does not match matrix size");
    if (!(scale > 0)) throw Error("scale factor must be positive");
    std::string out(to_string(s.kind()));
    for (const auto& c : codes) out += ',' + detail::csv_field(c);
    out += '\n';
    for (int i = 0; i < s.size(); ++i) {
        out += detail::csv_field(codes[i]);
        for (int j = 0; j < s.size(); ++j) out += ',' + format_fixed(s(i, j) * scale);
        out += '\n';
    }
    return out;
}

// Without an explicit scale the matrix's own export_scale applies (default 1).
inline void write_symmetric_csv(const SymmetricMatrix& s, const std::vector<std::string>& codes,
                                const std::string& path) {
    detail::write_file(path, render_symmetric_csv(s, codes, s.export_scale));
}

inline void write_symmetric_csv(const SymmetricMatrix& s, const std::vector<std::string>& codes,
                                const std::string& path, double scale) {
    detail::write_file(path, render_symmetric_csv(s, codes, scale));
}

struct SymmetricCsv {
    std::vector<std::string> codes;
    SymmetricMatrix matrix;
};

inline SymmetricCsv read_symmetric_csv(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw Error(path + ": empty matrix file");
    const auto header = detail::parse_csv_line(lines[0], path, 1);
    if (header.size() < 2) throw Error(path + ":1: malformed header");

    SymmetricCsv out;
    const SimilarityKind kind = similarity_kind_from_string(header[0]);
    out.codes.assign(header.begin() + 1, header.end());
    const int n = static_cast<int>(out.codes.size());
    if (static_cast<int>(lines.size()) != n + 1)
        throw Error(path + ": expected " + std::to_string(n) + " data rows");

    out.matrix = SymmetricMatrix(n, kind);
    for (int i = 0; i < n; ++i) {
        const auto fields = detail::parse_csv_line(lines[i + 1], path, i + 2);
        if (static_cast<int>(fields.size()) != n + 1)
            throw Error(path + ":" + std::to_string(i + 2) + ": expected " +
                        std::to_string(n + 1) + " fields");
        if (fields[0] != out.codes[i])
            throw Error(path + ":" + std::to_string(i + 2) + ": row label '" + fields[0] +
                        "' does not match column label '" + out.codes[i] + "'");
        for (int j = i; j < n; ++j)
            out.matrix.set(i, j, detail::parse_real_field(fields[j + 1], path, i + 2));
    }
    return out;
}

// --- accumulation tables -------------------------------------------------------

// Sample names act as table labels; 10 characters are honored, longer names
// are truncated.
inline std::string table_label(const std::string& sample_name) {
    std::string label = sample_name.substr(0, 10);
    if (label.empty()) throw Error("sample name is required for table appends");
    if (label.find_first_of(",\"\n\r") != std::string::npos)
        throw Error("sample name '" + label + "' contains characters not allowed in table labels");
    return label;
}

inline MatrixTable read_matrix_table(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw Error(path + ": empty table");
    const auto header = detail::parse_csv_line(lines[0], path, 1);
    if (header.empty() || header[0] != "class")
        throw Error(path + ":1: expected header starting with 'class'");

    MatrixTable table;
    table.names.assign(header.begin() + 1, header.end());
    table.columns.assign(table.names.size(), {});
    for (size_t i = 1; i < lines.size(); ++i) {
        const auto fields = detail::parse_csv_line(lines[i], path, i + 1);
        if (fields.size() != header.size())
            throw Error(path + ":" + std::to_string(i + 1) + ": expected " +
                        std::to_string(header.size()) + " fields");
        table.codes.push_back(fields[0]);
        for (size_t j = 1; j < fields.size(); ++j)
            table.columns[j - 1].push_back(detail::parse_real_field(fields[j], path, i + 1));
    }
    return table;
}

// Adds one column per run. Creates the table de novo when absent; existing
// column bytes are preserved verbatim. Duplicate sample names and row-set
// mismatches are errors.
inline void append_matrix_table(const std::string& path, const PortfolioDistribution& p,
                                const ClassScheme& scheme) {
    if (static_cast<int>(p.weights.size()) != scheme.size())
        throw Error("append_matrix_table: distribution and scheme dimensions differ");
    const std::string label = table_label(p.sample_name);
    PathLock lock(path);

    if (!std::filesystem::exists(path)) {
        std::string out = "class," + label + '\n';
        for (int i = 0; i < scheme.size(); ++i)
            out += scheme.code(i) + ',' + format_fixed(p.weights[i]) + '\n';
        detail::write_file(path, out);
        return;
    }

    const auto lines = detail::read_lines(path);
    if (static_cast<int>(lines.size()) != scheme.size() + 1)
        throw Error(path + ": row set does not match the scheme (" +
                    std::to_string(lines.size()) + " lines for " + std::to_string(scheme.size()) +
                    " classes)");
    const auto header = detail::parse_csv_line(lines[0], path, 1);
    if (header.empty() || header[0] != "class")
        throw Error(path + ":1: expected header starting with 'class'");
    for (size_t j = 1; j < header.size(); ++j)
        if (header[j] == label)
            throw Error(path + ": sample name '" + label + "' already present");

    std::string out = lines[0] + ',' + label + '\n';
    for (int i = 0; i < scheme.size(); ++i) {
        const std::string& line = lines[i + 1];
        const auto fields = detail::parse_csv_line(line, path, i + 2);
        if (fields.empty() || fields[0] != scheme.code(i))
            throw Error(path + ":" + std::to_string(i + 2) + ": row '" +
                        (fields.empty() ? "" : fields[0]) + "' does not match scheme code '" +
                        scheme.code(i) + "'");
        out += line + ',' + format_fixed(p.weights[i]) + '\n';
    }
    detail::write_file(path, out);
}

struct RaoRow {
    std::string name;
    double delta = 0.0;
    double d2_3 = 1.0;
    long n = 0;
};

inline std::vector<RaoRow> read_rao_table(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw Error(path + ": empty table");
    if (lines[0] != "name,delta,d2_3,n")
        throw Error(path + ":1: expected header 'name,delta,d2_3,n'");
    std::vector<RaoRow> rows;
    for (size_t i = 1; i < lines.size(); ++i) {
        const auto fields = detail::parse_csv_line(lines[i], path, i + 1);
        if (fields.size() != 4)
            throw Error(path + ":" + std::to_string(i + 1) + ": expected 4 fields");
        rows.push_back({fields[0], detail::parse_real_field(fields[1], path, i + 1),
                        detail::parse_real_field(fields[2], path, i + 1),
                        detail::parse_int_field(fields[3], path, i + 1)});
    }
    return rows;
}

// Appends one row per run in insertion order; creates the table when absent.
inline void append_rao_table(const std::string& path, const DiversityResult& r) {
    const std::string label = table_label(r.sample_name);
    PathLock lock(path);

    std::string out;
    if (!std::filesystem::exists(path)) {
        out = "name,delta,d2_3,n\n";
    } else {
        const auto lines = detail::read_lines(path);
        if (lines.empty() || lines[0] != "name,delta,d2_3,n")
            throw Error(path + ":1: expected header 'name,delta,d2_3,n'");
        for (size_t i = 1; i < lines.size(); ++i) {
            const auto fields = detail::parse_csv_line(lines[i], path, i + 1);
            if (!fields.empty() && fields[0] == label)
                throw Error(path + ": sample name '" + label + "' already present");
            out += lines[i] + '\n';
        }
        out = lines[0] + '\n' + out;
    }
    out += label + ',' + format_fixed(r.delta) + ',' + format_fixed(r.d2_3) + ',' +
           std::to_string(r.n_patents) + '\n';
    detail::write_file(path, out);
}

// Presentation order of Table-style diversity listings.
inline std::vector<RaoRow> rao_rows_by_delta_desc(std::vector<RaoRow> rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const RaoRow& a, const RaoRow& b) { return a.delta > b.delta; });
    return rows;
}

// Stopword list: one word per line, '#' comments allowed.
inline std::unordered_set<std::string> read_stopwords(const std::string& path) {
    std::unordered_set<std::string> words;
    for (const auto& line : detail::read_lines(path)) {
        if (line.empty() || line[0] == '#') continue;
        words.insert(to_lower(line));
    }
    return words;
}

// --- sparse 2-mode dump ---------------------------------------------------------

// Header "rows cols nnz", then one "row col value" triple per line,
// row-major sorted, 0-based indices.
inline std::string render_sparse_dump(const TwoModeMatrix& m) {
    std::string out = std::to_string(m.n_rows()) + ' ' + std::to_string(m.n_cols()) + ' ' +
                      std::to_string(m.nnz()) + '\n';
    for (int r = 0; r < m.n_rows(); ++r)
        for (const auto& e : m.row(r))
            out += std::to_string(r) + ' ' + std::to_string(e.col) + ' ' + format_fixed(e.value) +
                   '\n';
    return out;
}

inline void write_sparse_dump(const TwoModeMatrix& m, const std::string& path) {
    detail::write_file(path, render_sparse_dump(m));
}

struct SparseDump {
    int rows = 0;
    int cols = 0;
    std::vector<std::tuple<int, int, double>> entries;
};

inline SparseDump read_sparse_dump(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw Error(path + ": empty dump");
    std::istringstream header(lines[0]);
    SparseDump dump;
    size_t nnz = 0;
    if (!(header >> dump.rows >> dump.cols >> nnz))
        throw Error(path + ":1: expected 'rows cols nnz'");
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::istringstream iss(lines[i]);
        int r = 0, c = 0;
        std::string v;
        if (!(iss >> r >> c >> v))
            throw Error(path + ":" + std::to_string(i + 1) + ": expected 'row col value'");
        dump.entries.emplace_back(r, c, detail::parse_real_field(v, path, i + 1));
    }
    if (dump.entries.size() != nnz)
        throw Error(path + ": header claims " + std::to_string(nnz) + " entries, found " +
                    std::to_string(dump.entries.size()));
    return dump;
}

// --- cluster tree output --------------------------------------------------------

// One VOS map file per tree node (coordinates from the basemap when given,
// zero otherwise; cluster column from the node's partition) plus a manifest:
// "label<TAB>size<TAB>file" per node, depth-first.
inline std::vector<std::string> write_cluster_tree(const ClusterTree& tree,
                                                   const ClassScheme& scheme,
                                                   const BaseMap* base,
                                                   const std::string& dir,
                                                   const std::string& stem = "map") {
    if (base) require_aligned(*base, scheme);
    std::filesystem::create_directories(dir);

    std::vector<std::string> manifest_lines;
    std::vector<std::string> files;

    auto emit = [&](const ClusterTree& node, auto&& self) -> void {
        const std::string file_name = stem + '_' + node.label + ".txt";
        BaseMap node_map;
        node_map.nodes.reserve(node.classes.size());
        for (size_t i = 0; i < node.classes.size(); ++i) {
            const int ord = node.classes[i];
            const BaseMapNode* src = base ? &base->nodes[ord] : nullptr;
            const int cluster =
                node.is_leaf() ? 1 : node.partition.assignment[static_cast<int>(i)];
            node_map.nodes.push_back({ord + 1, scheme.code(ord), src ? src->x : 0.0,
                                      src ? src->y : 0.0, cluster});
        }
        const std::string path = (std::filesystem::path(dir) / file_name).string();
        detail::write_file(path, render_vos_map(node_map));
        files.push_back(path);
        manifest_lines.push_back(node.label + '\t' + std::to_string(node.classes.size()) + '\t' +
                                 file_name);
        for (const auto& child : node.children) self(child, self);
    };
    emit(tree, emit);

    std::string manifest;
    for (const auto& line : manifest_lines) manifest += line + '\n';
    const std::string manifest_path = (std::filesystem::path(dir) / (stem + "_manifest.txt")).string();
    detail::write_file(manifest_path, manifest);
    files.push_back(manifest_path);
    return files;
}

}  // namespace patmap
