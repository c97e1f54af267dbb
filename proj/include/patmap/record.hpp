#pragma once

// Canonical patent records, the CPC-4 class scheme, corpus parsing and
// filtering. Input is one JSON object per line:
//   {"id":"...","date":"YYYY-MM-DD","cpc4":[...],"cited":[...],
//    "assignee":"...","city":"...","country":"..."}
// assignee/city/country are optional.

#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "patmap/common.hpp"

namespace patmap {

// CPC-4 shape: section letter, two digits, subclass letter.
inline bool is_cpc4_code(std::string_view code) {
    return code.size() == 4 &&
           std::isupper(static_cast<unsigned char>(code[0])) &&
           std::isdigit(static_cast<unsigned char>(code[1])) &&
           std::isdigit(static_cast<unsigned char>(code[2])) &&
           std::isupper(static_cast<unsigned char>(code[3]));
}

struct PatentRecord {
    std::string id;
    Date date;
    std::vector<std::string> classes;  // sorted, deduplicated, uppercase
    std::vector<std::string> cited;    // multiset, input order preserved
    std::optional<std::string> assignee;
    std::optional<std::string> city;
    std::optional<std::string> country;

    friend bool operator==(const PatentRecord&, const PatentRecord&) = default;
};

class ClassScheme {
public:
    ClassScheme() = default;

    // Codes are uppercased; pattern and uniqueness enforced. The ordering of
    // `entries` fixes vector coordinates for the lifetime of a run.
    explicit ClassScheme(std::vector<std::pair<std::string, std::string>> entries) {
        codes_.reserve(entries.size());
        titles_.reserve(entries.size());
        for (auto& [code, title] : entries) {
            std::string up = to_upper(code);
            if (!is_cpc4_code(up)) throw Error("invalid class code in scheme: '" + code + "'");
            if (!index_.emplace(up, static_cast<int>(codes_.size())).second)
                throw Error("duplicate class code in scheme: '" + up + "'");
            codes_.push_back(std::move(up));
            titles_.push_back(std::move(title));
        }
    }

    int size() const { return static_cast<int>(codes_.size()); }
    const std::string& code(int ordinal) const { return codes_.at(ordinal); }
    const std::string& title(int ordinal) const { return titles_.at(ordinal); }
    const std::vector<std::string>& codes() const { return codes_; }

    std::optional<int> ordinal(std::string_view code) const {
        auto it = index_.find(std::string(code));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::vector<std::string> codes_;
    std::vector<std::string> titles_;
    std::unordered_map<std::string, int> index_;
};

// First character of every scheme code (CPC sections A-H, Y).
inline std::vector<std::string> section_labels(const ClassScheme& scheme) {
    std::vector<std::string> out;
    out.reserve(scheme.size());
    for (int i = 0; i < scheme.size(); ++i) out.push_back(scheme.code(i).substr(0, 1));
    return out;
}

struct DateRange {
    Date from;
    Date to;  // inclusive
};

// An empty filter matches everything.
struct RecordFilter {
    std::optional<DateRange> date_range;
    std::optional<std::string> city;                // exact, case-insensitive
    std::optional<std::string> country;             // exact, case-insensitive
    std::optional<std::string> assignee_substring;  // case-insensitive substring

    bool matches(const PatentRecord& r) const {
        if (date_range && (r.date < date_range->from || date_range->to < r.date)) return false;
        if (city && (!r.city || !iequals(*r.city, *city))) return false;
        if (country && (!r.country || !iequals(*r.country, *country))) return false;
        if (assignee_substring && (!r.assignee || !icontains(*r.assignee, *assignee_substring)))
            return false;
        return true;
    }
};

enum class ParseMode { lenient, strict };

struct ParseWarning {
    size_t line = 0;
    std::string message;
};

struct ParseResult {
    std::vector<PatentRecord> records;
    std::vector<ParseWarning> warnings;
};

namespace detail {

inline PatentRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("record is not an object");
    PatentRecord r;

    auto id_it = j.find("id");
    if (id_it == j.end() || !id_it->is_string() || id_it->get<std::string>().empty())
        throw Error("missing or empty 'id'");
    r.id = id_it->get<std::string>();

    auto date_it = j.find("date");
    if (date_it == j.end() || !date_it->is_string())
        throw Error("missing 'date'");
    auto date = parse_date(date_it->get<std::string>());
    if (!date) throw Error("invalid date '" + date_it->get<std::string>() + "'");
    r.date = *date;

    auto cls_it = j.find("cpc4");
    if (cls_it == j.end() || !cls_it->is_array()) throw Error("missing 'cpc4' array");
    std::set<std::string> classes;
    for (const auto& c : *cls_it) {
        if (!c.is_string()) throw Error("non-string class code");
        std::string up = to_upper(c.get<std::string>());
        if (is_cpc4_code(up)) classes.insert(std::move(up));
    }
    r.classes.assign(classes.begin(), classes.end());

    auto cited_it = j.find("cited");
    if (cited_it != j.end()) {
        if (!cited_it->is_array()) throw Error("'cited' is not an array");
        for (const auto& c : *cited_it) {
            if (!c.is_string()) throw Error("non-string cited id");
            r.cited.push_back(c.get<std::string>());
        }
    }

    auto opt_string = [&](const char* key) -> std::optional<std::string> {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) throw Error(std::string("'") + key + "' is not a string");
        return it->get<std::string>();
    };
    r.assignee = opt_string("assignee");
    r.city = opt_string("city");
    r.country = opt_string("country");
    return r;
}

}  // namespace detail

// Parses the line-delimited corpus. Lenient mode skips malformed lines and
// counts them as warnings; strict mode throws with the line number. Records
// whose classes all fail the CPC-4 pattern are skipped and counted in either
// mode. Duplicate patent ids are always an error.
inline ParseResult parse_corpus(std::istream& in, ParseMode mode = ParseMode::lenient) {
    ParseResult result;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        PatentRecord rec;
        try {
            rec = detail::record_from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception&) {
            if (mode == ParseMode::strict)
                throw Error("line " + std::to_string(line_no) + ": invalid JSON");
            result.warnings.push_back({line_no, "invalid JSON"});
            continue;
        } catch (const Error& e) {
            if (mode == ParseMode::strict)
                throw Error("line " + std::to_string(line_no) + ": " + e.what());
            result.warnings.push_back({line_no, e.what()});
            continue;
        }
        if (rec.classes.empty()) {
            result.warnings.push_back({line_no, "record '" + rec.id + "' has no valid classes"});
            continue;
        }
        if (!seen_ids.insert(rec.id).second)
            throw Error("line " + std::to_string(line_no) + ": duplicate patent id '" + rec.id + "'");
        result.records.push_back(std::move(rec));
    }
    return result;
}

inline ParseResult parse_corpus(const std::string& text, ParseMode mode = ParseMode::lenient) {
    std::istringstream in(text);
    return parse_corpus(in, mode);
}

inline void serialize_record(const PatentRecord& r, std::ostream& out) {
    nlohmann::json j;
    j["id"] = r.id;
    j["date"] = format_date(r.date);
    j["cpc4"] = r.classes;
    j["cited"] = r.cited;
    if (r.assignee) j["assignee"] = *r.assignee;
    if (r.city) j["city"] = *r.city;
    if (r.country) j["country"] = *r.country;
    out << j.dump() << '\n';
}

inline std::string serialize_corpus(const std::vector<PatentRecord>& corpus) {
    std::ostringstream out;
    for (const auto& r : corpus) serialize_record(r, out);
    return out.str();
}

inline std::vector<PatentRecord> filter_corpus(const std::vector<PatentRecord>& corpus,
                                               const RecordFilter& f) {
    std::vector<PatentRecord> out;
    for (const auto& r : corpus)
        if (f.matches(r)) out.push_back(r);
    return out;
}

struct UnknownClass {
    std::string code;
    std::string patent_id;
};

struct ValidationResult {
    std::vector<PatentRecord> corpus;     // cleaned (lenient) or verbatim (strict, all known)
    std::vector<UnknownClass> unknown;    // codes present in records but absent from the scheme
    size_t dropped_records = 0;           // records left with zero known classes
};

// Strict mode fails on the first unknown code, naming the code and patent id.
// Lenient mode drops unknown codes (and records left empty) and reports them.
inline ValidationResult validate_against_scheme(const std::vector<PatentRecord>& corpus,
                                                const ClassScheme& scheme,
                                                ParseMode mode = ParseMode::lenient) {
    ValidationResult result;
    result.corpus.reserve(corpus.size());
    for (const auto& r : corpus) {
        std::vector<std::string> known;
        known.reserve(r.classes.size());
        for (const auto& c : r.classes) {
            if (scheme.ordinal(c)) {
                known.push_back(c);
            } else {
                if (mode == ParseMode::strict)
                    throw Error("unknown class code '" + c + "' in patent '" + r.id + "'");
                result.unknown.push_back({c, r.id});
            }
        }
        if (known.empty()) {
            ++result.dropped_records;
            continue;
        }
        PatentRecord cleaned = r;
        cleaned.classes = std::move(known);
        result.corpus.push_back(std::move(cleaned));
    }
    return result;
}

}  // namespace patmap
