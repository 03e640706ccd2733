#pragma once

// JSON documents for models, schemas, run configuration and reports.
// Doubles are written in shortest round-trip form, so reading a document back
// reproduces every value bit for bit.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "elink/calibration.hpp"
#include "elink/electre.hpp"
#include "elink/errors.hpp"
#include "elink/evaluation.hpp"
#include "elink/fellegi_sunter.hpp"
#include "elink/ingest.hpp"
#include "elink/linkage.hpp"

namespace elink::io {

using json = nlohmann::ordered_json;

inline json parse_document(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline json read_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_document(ss.str(), path);
}

inline void write_document(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

namespace detail {

template <typename T>
T get(const json& doc, const char* key, const std::string& where) {
    if (!doc.is_object() || !doc.contains(key)) throw ParseError(where + ": missing key '" + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
void get_if(const json& doc, const char* key, T& out, const std::string& where) {
    if (doc.is_object() && doc.contains(key)) out = get<T>(doc, key, where);
}

}  // namespace detail

// ---- ElectreModel ----------------------------------------------------------

inline json to_json(const ElectreModel& model) {
    json criteria = json::array();
    for (const auto& c : model.criteria()) {
        criteria.push_back({{"name", c.name},
                            {"direction", std::string(to_string(c.direction))},
                            {"weight", c.weight},
                            {"q", c.indifference},
                            {"p", c.preference},
                            {"v", c.veto ? json(*c.veto) : json(nullptr)}});
    }
    json doc = {{"criteria", criteria},
                {"profiles", model.profiles().rows()},
                {"lambda", model.lambda()},
                {"epsilon", model.epsilon()}};
    if (!model.category_labels().empty()) doc["categories"] = model.category_labels();
    return doc;
}

inline ElectreModel electre_model_from_json(const json& doc, const std::string& where = "model") {
    if (!doc.is_object()) throw ParseError(where + ": expected an object");
    const auto& crit = doc.contains("criteria") ? doc.at("criteria") : json();
    if (!crit.is_array()) throw ParseError(where + ": 'criteria' must be an array");
    std::vector<Criterion> criteria;
    for (std::size_t j = 0; j < crit.size(); ++j) {
        const std::string at = where + ".criteria[" + std::to_string(j) + "]";
        const auto& c = crit[j];
        Criterion out;
        out.name = detail::get<std::string>(c, "name", at);
        const auto dir = detail::get<std::string>(c, "direction", at);
        if (dir == "gain") out.direction = Direction::gain;
        else if (dir == "cost") out.direction = Direction::cost;
        else throw ParseError(at + ".direction: expected gain|cost, got '" + dir + "'");
        out.weight = detail::get<double>(c, "weight", at);
        out.indifference = detail::get<double>(c, "q", at);
        out.preference = detail::get<double>(c, "p", at);
        if (c.contains("v") && !c.at("v").is_null()) out.veto = detail::get<double>(c, "v", at);
        criteria.push_back(std::move(out));
    }
    const auto rows = detail::get<std::vector<std::vector<double>>>(doc, "profiles", where);
    std::vector<std::string> labels;
    detail::get_if(doc, "categories", labels, where);
    return ElectreModel(std::move(criteria), ProfileSet(rows), detail::get<double>(doc, "lambda", where),
                        detail::get<double>(doc, "epsilon", where), std::move(labels));
}

// ---- FsModel ---------------------------------------------------------------

inline json to_json(const FsModel& model) {
    json fields = json::array();
    for (const auto& f : model.fields)
        fields.push_back({{"name", f.name},
                          {"m", f.m},
                          {"u", f.u},
                          {"agreement_threshold", f.agreement_threshold},
                          {"agreement_weight", f.agreement_weight()},
                          {"disagreement_weight", f.disagreement_weight()}});
    return {{"fields", fields}, {"lower", model.lower}, {"upper", model.upper}, {"scale", "log2"}};
}

inline FsModel fs_model_from_json(const json& doc, const std::string& where = "fs_model") {
    FsModel model;
    const auto& fields = doc.contains("fields") ? doc.at("fields") : json();
    if (!fields.is_array()) throw ParseError(where + ": 'fields' must be an array");
    for (std::size_t j = 0; j < fields.size(); ++j) {
        const std::string at = where + ".fields[" + std::to_string(j) + "]";
        model.fields.push_back({detail::get<std::string>(fields[j], "name", at),
                                detail::get<double>(fields[j], "m", at), detail::get<double>(fields[j], "u", at),
                                detail::get<double>(fields[j], "agreement_threshold", at)});
    }
    model.lower = detail::get<double>(doc, "lower", where);
    model.upper = detail::get<double>(doc, "upper", where);
    model.validate();
    return model;
}

// ---- LinkageSchema ---------------------------------------------------------

inline std::string delimiter_name(char d) { return d == '\t' ? "tab" : std::string(1, d); }

inline char parse_delimiter(const std::string& s) {
    if (s == "tab" || s == "\t" || s == "\\t") return '\t';
    if (s.size() != 1) throw ParseError("delimiter must be a single character or 'tab'");
    return s[0];
}

inline json to_json(const LinkageSchema& s) {
    json fields = json::array();
    for (const auto& f : s.compared_fields) {
        json jf = {{"name", f.name}, {"comparator", std::string(to_string(f.comparator.kind))}};
        switch (f.comparator.kind) {
            case ComparatorKind::jaro_winkler:
                jf["prefix_scale"] = f.comparator.prefix_scale;
                jf["prefix_cap"] = f.comparator.prefix_cap;
                break;
            case ComparatorKind::absolute_difference_normalized:
                jf["difference_cap"] = f.comparator.difference_cap;
                break;
            default: break;
        }
        jf["agreement_threshold"] = f.agreement_threshold;
        fields.push_back(std::move(jf));
    }
    return {{"id_field", s.id_field},
            {"source_field", s.source_field},
            {"delimiter", delimiter_name(s.delimiter)},
            {"missing_tokens", s.missing_tokens},
            {"normalization",
             {{"uppercase", s.normalization.uppercase},
              {"trim", s.normalization.trim},
              {"collapse_whitespace", s.normalization.collapse_whitespace}}},
            {"fields", fields}};
}

inline LinkageSchema schema_from_json(const json& doc, LinkageSchema base = {}, const std::string& where = "schema") {
    if (!doc.is_object()) throw ParseError(where + ": expected an object");
    detail::get_if(doc, "id_field", base.id_field, where);
    detail::get_if(doc, "source_field", base.source_field, where);
    if (doc.contains("delimiter")) base.delimiter = parse_delimiter(detail::get<std::string>(doc, "delimiter", where));
    detail::get_if(doc, "missing_tokens", base.missing_tokens, where);
    if (doc.contains("normalization")) {
        const auto& n = doc.at("normalization");
        const std::string at = where + ".normalization";
        detail::get_if(n, "uppercase", base.normalization.uppercase, at);
        detail::get_if(n, "trim", base.normalization.trim, at);
        detail::get_if(n, "collapse_whitespace", base.normalization.collapse_whitespace, at);
    }
    if (doc.contains("fields")) {
        const auto& fields = doc.at("fields");
        if (!fields.is_array()) throw ParseError(where + ".fields: expected an array");
        base.compared_fields.clear();
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string at = where + ".fields[" + std::to_string(j) + "]";
            FieldSpec f;
            f.name = detail::get<std::string>(fields[j], "name", at);
            try {
                f.comparator.kind = parse_comparator_kind(detail::get<std::string>(fields[j], "comparator", at));
            } catch (const UsageError& e) {
                throw ParseError(at + ": " + e.what());
            }
            detail::get_if(fields[j], "prefix_scale", f.comparator.prefix_scale, at);
            detail::get_if(fields[j], "prefix_cap", f.comparator.prefix_cap, at);
            detail::get_if(fields[j], "difference_cap", f.comparator.difference_cap, at);
            detail::get_if(fields[j], "agreement_threshold", f.agreement_threshold, at);
            base.compared_fields.push_back(std::move(f));
        }
    }
    base.validate();
    return base;
}

// ---- Reports ---------------------------------------------------------------

inline json to_json(const LoadReport& r) {
    return {{"path", r.path},
            {"source", r.source_label},
            {"read", r.read},
            {"dropped", r.dropped},
            {"retained", r.retained},
            {"other_source_rows", r.other_source},
            {"dropped_ids", r.dropped_ids}};
}

inline json to_json(const RecordTable& t) {
    json records = json::array();
    for (const auto& r : t.records) records.push_back({{"id", r.id}, {"values", r.values}});
    return {{"source", t.source_label}, {"fields", t.field_names}, {"records", records}, {"report", to_json(t.report)}};
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const EvalReport& r) {
    json doc;
    if (r.lambda) doc["lambda"] = *r.lambda;
    if (r.procedure) doc["procedure"] = std::string(to_string(*r.procedure));
    doc["pairs"] = r.total;
    doc["correct"] = r.correct;
    doc["accuracy"] = r.accuracy();
    doc["accuracy_definition"] = r.two_class_truth
                                     ? "truth is link/nonlink only; a potential-match output counts as an error"
                                     : "exact category agreement";
    doc["match_precision"] = optional_number(r.match_precision());
    doc["match_recall"] = optional_number(r.match_recall());
    doc["missed_true_links"] = r.missed_links;
    doc["misclassified_nonlinks"] = r.misclassified_nonlinks;
    doc["false_links"] = r.false_links;
    doc["potential_matches_assigned"] = r.potential_assigned;
    json table = json::object();
    for (std::size_t p = 1; p <= r.category_count; ++p) {
        json row = json::object();
        for (std::size_t t = 1; t <= r.category_count; ++t) {
            if (r.two_class_truth && t != 1 && t != r.category_count) continue;
            row["truth_C" + std::to_string(t)] = r.contingency[p - 1][t - 1];
        }
        table["predicted_C" + std::to_string(p)] = row;
    }
    doc["contingency"] = table;
    return doc;
}

// lambda, accuracy and error composition per row.
inline std::string sweep_table(const std::vector<EvalReport>& reports) {
    std::ostringstream out;
    out << "lambda,procedure,pairs,accuracy,missed_true_links,misclassified_nonlinks,false_links,potential_matches\n";
    for (const auto& r : reports) {
        out << format_real(r.lambda.value_or(0.0)) << ',' << (r.procedure ? to_string(*r.procedure) : "") << ','
            << r.total << ',' << format_real(r.accuracy()) << ',' << r.missed_links << ','
            << r.misclassified_nonlinks << ',' << r.false_links << ',' << r.potential_assigned << '\n';
    }
    return out.str();
}

inline json to_json(const LpSolution& lp, const std::vector<std::string>& names) {
    json crit = json::array();
    for (std::size_t j = 0; j < names.size(); ++j) {
        json profile = json::array();
        for (std::size_t h = 0; h < lp.profiles.profile_count(); ++h) profile.push_back(lp.profiles.value(h, j));
        crit.push_back({{"name", names[j]}, {"objective", lp.criterion_objectives[j]}, {"profiles", profile}});
    }
    return {{"objective", lp.objective}, {"criteria", crit}, {"warnings", lp.warnings}};
}

inline json to_json(const std::vector<LambdaPoint>& curve) {
    json out = json::array();
    for (const auto& pt : curve)
        out.push_back({{"lambda", pt.lambda}, {"correct", pt.correct}, {"total", pt.total}, {"accuracy", pt.accuracy()}});
    return out;
}

}  // namespace elink::io
