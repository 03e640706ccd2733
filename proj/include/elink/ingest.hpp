#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "elink/csv.hpp"
#include "elink/errors.hpp"
#include "elink/metrics.hpp"

namespace elink {

struct FieldSpec {
    std::string name;
    Comparator comparator;
    // Similarity at or above which the Fellegi-Sunter baseline counts the
    // field as agreeing.
    double agreement_threshold = 0.88;

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

struct LinkageSchema {
    std::string id_field = "IDENTIFIER";
    // Optional column naming the dataset a row belongs to. When present in a
    // file, rows labelled for the other dataset are skipped.
    std::string source_field = "DS";
    std::vector<FieldSpec> compared_fields;
    char delimiter = ',';
    std::vector<std::string> missing_tokens{"", "NA"};
    Normalization normalization;

    friend bool operator==(const LinkageSchema&, const LinkageSchema&) = default;

    void validate() const {
        if (id_field.empty()) throw UsageError("schema: id_field must be set");
        if (compared_fields.empty()) throw UsageError("schema: compared_fields must not be empty");
        std::set<std::string> seen;
        for (const auto& f : compared_fields) {
            if (f.name == id_field)
                throw UsageError("schema: id field '" + id_field + "' cannot also be a compared field");
            if (!seen.insert(f.name).second)
                throw UsageError("schema: field '" + f.name + "' listed twice");
            if (!(f.agreement_threshold >= 0.0 && f.agreement_threshold <= 1.0))
                throw UsageError("schema: agreement threshold for '" + f.name + "' outside [0,1]");
            f.comparator.validate();
        }
    }

    bool is_missing(std::string_view raw) const {
        std::string_view v = raw;
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
        return std::find(missing_tokens.begin(), missing_tokens.end(), v) != missing_tokens.end();
    }

    std::vector<std::string> field_names() const {
        std::vector<std::string> out;
        for (const auto& f : compared_fields) out.push_back(f.name);
        return out;
    }

    // SURNAME/NAME/STREET by Jaro-Winkler, LASTCODE exact, NUMCODE by
    // capped absolute difference.
    static LinkageSchema census() {
        LinkageSchema s;
        Comparator jw{ComparatorKind::jaro_winkler};
        Comparator exact{ComparatorKind::exact};
        Comparator number{ComparatorKind::absolute_difference_normalized};
        number.difference_cap = 10.0;
        s.compared_fields = {{"SURNAME", jw}, {"NAME", jw}, {"LASTCODE", exact}, {"NUMCODE", number},
                             {"STREET", jw}};
        return s;
    }
};

struct LoadReport {
    std::string path;
    std::string source_label;
    std::size_t read = 0;
    std::size_t dropped = 0;
    std::size_t retained = 0;
    std::size_t other_source = 0;  // rows skipped because DS named the other dataset
    std::vector<std::string> dropped_ids;
};

struct Record {
    std::string id;
    std::vector<std::string> values;  // aligned with RecordTable::field_names
};

struct RecordTable {
    std::string source_label;
    std::vector<std::string> field_names;
    std::vector<Record> records;
    LoadReport report;

    std::size_t size() const { return records.size(); }

    const std::string& value(std::size_t row, std::string_view field) const {
        for (std::size_t k = 0; k < field_names.size(); ++k)
            if (field_names[k] == field) return records[row].values[k];
        throw UsageError("no field '" + std::string(field) + "' in table " + source_label);
    }
};

inline RecordTable parse_table(std::string_view text, const LinkageSchema& schema,
                               const std::string& source_label, const std::string& path = "<memory>") {
    schema.validate();
    const auto rows = csv::parse(text, schema.delimiter);
    if (rows.empty()) throw DataError(path + ": missing header row");

    const auto& header = rows.front().fields;
    auto column = [&](const std::string& name) -> std::ptrdiff_t {
        for (std::size_t k = 0; k < header.size(); ++k) {
            std::string_view h = header[k];
            while (!h.empty() && h.back() == ' ') h.remove_suffix(1);
            while (!h.empty() && h.front() == ' ') h.remove_prefix(1);
            if (h == name) return static_cast<std::ptrdiff_t>(k);
        }
        return -1;
    };

    const auto id_col = column(schema.id_field);
    if (id_col < 0) throw DataError(path + ": missing required column '" + schema.id_field + "'");
    std::vector<std::size_t> cols;
    for (const auto& f : schema.compared_fields) {
        const auto c = column(f.name);
        if (c < 0) throw DataError(path + ": missing required column '" + f.name + "'");
        cols.push_back(static_cast<std::size_t>(c));
    }
    const auto source_col = schema.source_field.empty() ? -1 : column(schema.source_field);

    RecordTable table;
    table.source_label = source_label;
    table.field_names = schema.field_names();
    table.report.path = path;
    table.report.source_label = source_label;

    std::map<std::string, std::vector<std::size_t>> lines_by_id;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != header.size())
            throw DataError(path + ": line " + std::to_string(row.line) + " has " +
                            std::to_string(row.fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
        if (source_col >= 0) {
            const auto& ds = row.fields[static_cast<std::size_t>(source_col)];
            if (!schema.is_missing(ds) && ds != source_label) {
                ++table.report.other_source;
                continue;
            }
        }
        ++table.report.read;

        const auto& id = row.fields[static_cast<std::size_t>(id_col)];
        bool complete = !schema.is_missing(id);
        if (complete) lines_by_id[id].push_back(row.line);

        Record rec;
        rec.id = id;
        for (std::size_t c : cols) {
            if (schema.is_missing(row.fields[c])) complete = false;
            rec.values.push_back(row.fields[c]);
        }
        if (!complete) {
            ++table.report.dropped;
            table.report.dropped_ids.push_back(id);
            continue;
        }
        table.records.push_back(std::move(rec));
    }

    std::string duplicates;
    for (const auto& [id, lines] : lines_by_id) {
        if (lines.size() < 2) continue;
        if (!duplicates.empty()) duplicates += "; ";
        duplicates += "'" + id + "' on lines";
        for (auto l : lines) duplicates += " " + std::to_string(l);
    }
    if (!duplicates.empty()) throw DataError(path + ": duplicate identifiers: " + duplicates);

    table.report.retained = table.records.size();
    return table;
}

inline RecordTable load_table(const std::string& path, const LinkageSchema& schema,
                              const std::string& source_label) {
    return parse_table(csv::read_file(path), schema, source_label, path);
}

using LinkSet = std::set<std::pair<std::string, std::string>>;

// Cross pairs sharing an identifier.
inline LinkSet true_links(const RecordTable& a, const RecordTable& b) {
    std::unordered_map<std::string, std::size_t> in_b;
    for (std::size_t k = 0; k < b.records.size(); ++k) in_b.emplace(b.records[k].id, k);
    LinkSet links;
    for (const auto& rec : a.records)
        if (in_b.contains(rec.id)) links.emplace(rec.id, rec.id);
    return links;
}

// Identifier links among every row read, including rows later dropped for
// missing values.
inline LinkSet true_links_including_dropped(const RecordTable& a, const RecordTable& b) {
    auto ids = [](const RecordTable& t) {
        std::set<std::string> out;
        for (const auto& r : t.records) out.insert(r.id);
        for (const auto& id : t.report.dropped_ids)
            if (!id.empty()) out.insert(id);
        return out;
    };
    const auto ia = ids(a);
    const auto ib = ids(b);
    LinkSet links;
    for (const auto& id : ia)
        if (ib.contains(id)) links.emplace(id, id);
    return links;
}

}  // namespace elink
