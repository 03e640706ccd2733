#pragma once

// Comparison space A x B, ground-truth labeling, and Electre Tri
// classification of candidate pairs.

#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elink/comparison.hpp"
#include "elink/csv.hpp"
#include "elink/electre.hpp"
#include "elink/errors.hpp"
#include "elink/fellegi_sunter.hpp"
#include "elink/ingest.hpp"
#include "elink/metrics.hpp"

namespace elink {

// Full cross product of two record tables, evaluated lazily in row-major
// order: pair k is (A[k / |B|], B[k % |B|]). Field values are normalized and,
// for numeric comparators, parsed once at construction.
class ComparisonSpace {
public:
    ComparisonSpace(const RecordTable& a, const RecordTable& b, const LinkageSchema& schema)
        : fields_(schema.compared_fields) {
        schema.validate();
        side_a_ = prepare(a, schema);
        side_b_ = prepare(b, schema);
    }

    std::size_t size() const { return side_a_.ids.size() * side_b_.ids.size(); }
    std::size_t criterion_count() const { return fields_.size(); }

    ComparisonVector at(std::size_t k) const {
        const std::size_t nb = side_b_.ids.size();
        return make(k / nb, k % nb);
    }

    // Calls f(const ComparisonVector&) for every pair in row-major order.
    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < side_a_.ids.size(); ++i)
            for (std::size_t k = 0; k < side_b_.ids.size(); ++k) f(make(i, k));
    }

    std::vector<ComparisonVector> materialize() const {
        std::vector<ComparisonVector> out;
        out.reserve(size());
        for_each([&](const ComparisonVector& v) { out.push_back(v); });
        return out;
    }

private:
    struct Side {
        std::vector<std::string> ids;
        std::vector<std::vector<std::u32string>> text;  // [record][field]
        std::vector<std::vector<double>> numbers;       // [record][field], numeric comparators only
    };

    Side prepare(const RecordTable& t, const LinkageSchema& schema) const {
        if (t.field_names != schema.field_names())
            throw UsageError("table " + t.source_label + " was loaded with a different schema");
        Side s;
        for (const auto& rec : t.records) {
            s.ids.push_back(rec.id);
            auto& text = s.text.emplace_back();
            auto& nums = s.numbers.emplace_back(fields_.size(), 0.0);
            for (std::size_t j = 0; j < fields_.size(); ++j) {
                text.push_back(normalize(rec.values[j], schema.normalization));
                if (fields_[j].comparator.kind == ComparatorKind::absolute_difference_normalized) {
                    try {
                        nums[j] = parse_number(text.back());
                    } catch (const UsageError& e) {
                        throw UsageError("table " + t.source_label + ", record '" + rec.id + "', field " +
                                         fields_[j].name + ": " + e.what());
                    }
                }
            }
        }
        return s;
    }

    ComparisonVector make(std::size_t i, std::size_t k) const {
        ComparisonVector v;
        v.id_a = side_a_.ids[i];
        v.id_b = side_b_.ids[k];
        v.performances.resize(fields_.size());
        for (std::size_t j = 0; j < fields_.size(); ++j) {
            const auto& cmp = fields_[j].comparator;
            v.performances[j] = cmp.kind == ComparatorKind::absolute_difference_normalized
                                    ? cmp.compare_numbers(side_a_.numbers[i][j], side_b_.numbers[k][j])
                                    : cmp(side_a_.text[i][j], side_b_.text[k][j]);
        }
        return v;
    }

    std::vector<FieldSpec> fields_;
    Side side_a_;
    Side side_b_;
};

inline std::vector<ComparisonVector> build_pairs(const RecordTable& a, const RecordTable& b,
                                                 const LinkageSchema& schema) {
    return ComparisonSpace(a, b, schema).materialize();
}

// two_class: true links are C_3, everything else C_1.
// banded: as two_class, but non-links whose Fellegi-Sunter log2 R falls in
// [Lower, Upper] are labeled C_2.
enum class LabelPolicy { two_class, banded };

inline std::string_view to_string(LabelPolicy p) { return p == LabelPolicy::two_class ? "two_class" : "banded"; }

inline LabelPolicy parse_label_policy(std::string_view s) {
    if (s == "two_class") return LabelPolicy::two_class;
    if (s == "banded") return LabelPolicy::banded;
    throw UsageError("unknown label policy '" + std::string(s) + "' (expected two_class|banded)");
}

inline void label_pairs(std::span<ComparisonVector> pairs, const LinkSet& links, LabelPolicy policy,
                        const FsModel* fs = nullptr) {
    if (policy == LabelPolicy::banded && fs == nullptr)
        throw UsageError("banded label policy needs a fitted Fellegi-Sunter model");
    for (auto& p : pairs) {
        if (links.contains({p.id_a, p.id_b})) {
            p.label = kMatch;
        } else if (policy == LabelPolicy::banded && fs_decide(*fs, p) == kPotentialMatch) {
            p.label = kPotentialMatch;
        } else {
            p.label = kNonmatch;
        }
    }
}

struct ClassifiedPair {
    ComparisonVector pair;
    Category category;
    std::vector<double> sigma;  // sigma(a, b_h) per profile
};

inline ClassifiedPair classify_pair(const ComparisonVector& pair, const ElectreModel& model, Procedure procedure) {
    if (pair.performances.size() != model.criterion_count())
        throw UsageError("pair (" + pair.id_a + ", " + pair.id_b + ") has " +
                         std::to_string(pair.performances.size()) + " performances, model has " +
                         std::to_string(model.criterion_count()) + " criteria");
    return {pair, assign(model, pair.performances, procedure), credibilities(model, pair.performances)};
}

inline std::vector<ClassifiedPair> classify_pairs(std::span<const ComparisonVector> pairs,
                                                  const ElectreModel& model, Procedure procedure) {
    std::vector<ClassifiedPair> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(classify_pair(p, model, procedure));
    return out;
}

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// id_a, id_b, one column per compared field, sigma_b1..sigma_b{p-1},
// category, truth (empty when unknown).
inline void write_classified(std::ostream& out, const std::vector<std::string>& field_names,
                             std::span<const ClassifiedPair> rows, std::size_t profile_count) {
    std::vector<std::string> header{"id_a", "id_b"};
    header.insert(header.end(), field_names.begin(), field_names.end());
    for (std::size_t h = 0; h < profile_count; ++h) header.push_back("sigma_b" + std::to_string(h + 1));
    header.push_back("category");
    header.push_back("truth");
    out << csv::format_row(header) << '\n';
    for (const auto& r : rows) {
        std::vector<std::string> cells{r.pair.id_a, r.pair.id_b};
        for (double g : r.pair.performances) cells.push_back(format_real(g));
        for (double s : r.sigma) cells.push_back(format_real(s));
        cells.push_back(std::to_string(r.category.index));
        cells.push_back(r.pair.label ? std::to_string(r.pair.label->index) : "");
        out << csv::format_row(cells) << '\n';
    }
}

inline std::vector<ClassifiedPair> read_classified(std::string_view text, const std::string& path = "<memory>") {
    const auto rows = csv::parse(text);
    if (rows.empty()) throw DataError(path + ": missing header row");
    const auto& header = rows.front().fields;
    auto find = [&](std::string_view name) -> std::size_t {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return k;
        throw DataError(path + ": missing column '" + std::string(name) + "'");
    };
    const std::size_t ia = find("id_a"), ib = find("id_b"), icat = find("category"), itruth = find("truth");
    std::vector<std::size_t> perf_cols, sigma_cols;
    for (std::size_t k = ib + 1; k < header.size(); ++k) {
        if (header[k].starts_with("sigma_b")) sigma_cols.push_back(k);
        else if (k != icat && k != itruth) perf_cols.push_back(k);
    }
    auto number = [&](const std::string& s, std::size_t line) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw DataError(path + ": line " + std::to_string(line) + ": bad number '" + s + "'");
        }
    };
    auto category = [&](const std::string& s, std::size_t line) {
        const double v = number(s, line);
        if (v != static_cast<int>(v) || v < 1)
            throw DataError(path + ": line " + std::to_string(line) + ": bad category '" + s + "'");
        return Category{static_cast<int>(v)};
    };

    std::vector<ClassifiedPair> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != header.size())
            throw DataError(path + ": line " + std::to_string(row.line) + " has wrong field count");
        ClassifiedPair cp;
        cp.pair.id_a = row.fields[ia];
        cp.pair.id_b = row.fields[ib];
        for (auto k : perf_cols) cp.pair.performances.push_back(number(row.fields[k], row.line));
        for (auto k : sigma_cols) cp.sigma.push_back(number(row.fields[k], row.line));
        cp.category = category(row.fields[icat], row.line);
        if (!row.fields[itruth].empty()) cp.pair.label = category(row.fields[itruth], row.line);
        out.push_back(std::move(cp));
    }
    return out;
}

}  // namespace elink
