#pragma once

// Run configuration and the end-to-end steps the CLI composes:
// ingest -> pairs -> labels -> split -> calibrate -> classify -> evaluate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elink/calibration.hpp"
#include "elink/evaluation.hpp"
#include "elink/fellegi_sunter.hpp"
#include "elink/ingest.hpp"
#include "elink/io.hpp"
#include "elink/linkage.hpp"

namespace elink {

struct RunConfig {
    std::string dataset_a;
    std::string dataset_b;
    std::string label_a = "A";
    std::string label_b = "B";
    LinkageSchema schema = LinkageSchema::census();
    LabelPolicy label_policy = LabelPolicy::two_class;
    CalibrationOptions calibration;
    double train_fraction = 0.5;
    std::uint64_t seed = 42;
    double fs_band_rate = kDefaultPotentialBandRate;
    std::vector<double> sweep_grid{0.50, 0.70, 0.85};
    std::string output_dir = "elink-out";

    void validate() const {
        if (dataset_a.empty() || dataset_b.empty()) throw UsageError("config: dataset_a and dataset_b are required");
        schema.validate();
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw UsageError("config: train_fraction must lie strictly between 0 and 1");
        if (sweep_grid.empty()) throw UsageError("config: sweep grid must not be empty");
        for (double l : sweep_grid)
            if (!(l >= 0.5 && l <= 1.0)) throw UsageError("config: sweep lambda outside [0.5, 1.0]");
    }
};

inline const std::vector<std::string>& linkage_category_labels() {
    static const std::vector<std::string> labels{"nonmatch", "potential match", "match"};
    return labels;
}

namespace io {

inline json to_json(const RunConfig& c) {
    json weights = c.calibration.weights.empty() ? json(nullptr) : json(c.calibration.weights);
    json vetoes = json(nullptr);
    if (!c.calibration.vetoes.empty()) {
        vetoes = json::array();
        for (const auto& v : c.calibration.vetoes) vetoes.push_back(v ? json(*v) : json(nullptr));
    }
    return {{"dataset_a", c.dataset_a},
            {"dataset_b", c.dataset_b},
            {"label_a", c.label_a},
            {"label_b", c.label_b},
            {"schema", to_json(c.schema)},
            {"label_policy", std::string(to_string(c.label_policy))},
            {"calibration",
             {{"epsilon", c.calibration.epsilon},
              {"q_fraction", c.calibration.q_fraction},
              {"p_fraction", c.calibration.p_fraction},
              {"lambda_grid_step", c.calibration.grid_step},
              {"procedure", std::string(to_string(c.calibration.procedure))},
              {"weights", weights},
              {"vetoes", vetoes},
              {"lambda", c.calibration.fixed_lambda ? json(*c.calibration.fixed_lambda) : json(nullptr)}}},
            {"split", {{"train_fraction", c.train_fraction}, {"seed", c.seed}}},
            {"fellegi_sunter", {{"band_rate", c.fs_band_rate}}},
            {"sweep", {{"grid", c.sweep_grid}}},
            {"output_dir", c.output_dir}};
}

// Keys present in doc override the corresponding fields of base.
inline RunConfig config_from_json(const json& doc, RunConfig base = {}, const std::string& where = "config") {
    if (!doc.is_object()) throw ParseError(where + ": expected an object");
    detail::get_if(doc, "dataset_a", base.dataset_a, where);
    detail::get_if(doc, "dataset_b", base.dataset_b, where);
    detail::get_if(doc, "label_a", base.label_a, where);
    detail::get_if(doc, "label_b", base.label_b, where);
    detail::get_if(doc, "output_dir", base.output_dir, where);
    if (doc.contains("schema")) base.schema = schema_from_json(doc.at("schema"), base.schema, where + ".schema");
    if (doc.contains("label_policy")) {
        try {
            base.label_policy = parse_label_policy(detail::get<std::string>(doc, "label_policy", where));
        } catch (const UsageError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (doc.contains("calibration")) {
        const auto& c = doc.at("calibration");
        const std::string at = where + ".calibration";
        detail::get_if(c, "epsilon", base.calibration.epsilon, at);
        detail::get_if(c, "q_fraction", base.calibration.q_fraction, at);
        detail::get_if(c, "p_fraction", base.calibration.p_fraction, at);
        detail::get_if(c, "lambda_grid_step", base.calibration.grid_step, at);
        if (c.contains("procedure")) {
            try {
                base.calibration.procedure = parse_procedure(detail::get<std::string>(c, "procedure", at));
            } catch (const UsageError& e) {
                throw ParseError(at + ": " + e.what());
            }
        }
        if (c.contains("weights"))
            base.calibration.weights =
                c.at("weights").is_null() ? std::vector<double>{} : detail::get<std::vector<double>>(c, "weights", at);
        if (c.contains("vetoes")) {
            base.calibration.vetoes.clear();
            if (!c.at("vetoes").is_null()) {
                if (!c.at("vetoes").is_array()) throw ParseError(at + ".vetoes: expected an array");
                for (const auto& v : c.at("vetoes")) {
                    if (v.is_null()) base.calibration.vetoes.emplace_back(std::nullopt);
                    else if (v.is_number()) base.calibration.vetoes.emplace_back(v.get<double>());
                    else throw ParseError(at + ".vetoes: entries must be numbers or null");
                }
            }
        }
        if (c.contains("lambda")) {
            if (c.at("lambda").is_null()) base.calibration.fixed_lambda.reset();
            else base.calibration.fixed_lambda = detail::get<double>(c, "lambda", at);
        }
    }
    if (doc.contains("split")) {
        detail::get_if(doc.at("split"), "train_fraction", base.train_fraction, where + ".split");
        detail::get_if(doc.at("split"), "seed", base.seed, where + ".split");
    }
    if (doc.contains("fellegi_sunter")) detail::get_if(doc.at("fellegi_sunter"), "band_rate", base.fs_band_rate, where + ".fellegi_sunter");
    if (doc.contains("sweep")) detail::get_if(doc.at("sweep"), "grid", base.sweep_grid, where + ".sweep");
    return base;
}

}  // namespace io

struct LoadedData {
    RecordTable a;
    RecordTable b;
    LinkSet links;
};

inline LoadedData load_data(const RunConfig& config) {
    config.validate();
    LoadedData d;
    d.a = load_table(config.dataset_a, config.schema, config.label_a);
    d.b = load_table(config.dataset_b, config.schema, config.label_b);
    d.links = true_links(d.a, d.b);
    return d;
}

// Full comparison space with two-class truth labels attached.
inline std::vector<ComparisonVector> labeled_pairs(const LoadedData& data, const LinkageSchema& schema) {
    auto pairs = build_pairs(data.a, data.b, schema);
    label_pairs(pairs, data.links, LabelPolicy::two_class);
    return pairs;
}

inline std::vector<double> agreement_thresholds(const LinkageSchema& schema) {
    std::vector<double> out;
    for (const auto& f : schema.compared_fields) out.push_back(f.agreement_threshold);
    return out;
}

struct TrainedModels {
    CalibrationResult electre;
    FsModel fs;
    SplitResult split;  // training side relabeled per the label policy; test keeps two-class truth
};

inline TrainedModels train_models(const RunConfig& config, std::span<const ComparisonVector> pairs) {
    auto split = elink::split(pairs, config.train_fraction, config.seed);
    const auto names = config.schema.field_names();
    FsModel fs = fit_fs(split.train_pairs, names, agreement_thresholds(config.schema), {config.fs_band_rate});

    if (config.label_policy == LabelPolicy::banded) {
        LinkSet links;
        for (const auto& p : split.train_pairs)
            if (p.label == kMatch) links.emplace(p.id_a, p.id_b);
        label_pairs(split.train_pairs, links, LabelPolicy::banded, &fs);
        split.train = to_training_set(split.train_pairs);
    }
    auto electre = calibrate(split.train, names, config.calibration, linkage_category_labels());
    return {std::move(electre), std::move(fs), std::move(split)};
}

}  // namespace elink
