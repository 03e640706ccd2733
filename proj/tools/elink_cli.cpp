#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "elink/pipeline.hpp"
#include "elink/synthetic.hpp"

namespace fs = std::filesystem;
using elink::io::json;

namespace {

// Flag values; only those the user set are applied over the defaults.
struct Flags {
    std::string config;
    std::optional<std::string> dataset_a, dataset_b, label_a, label_b, output_dir, label_policy, procedure;
    std::optional<double> epsilon, q_fraction, p_fraction, lambda_step, lambda, train_fraction, band_rate;
    std::optional<std::uint64_t> seed;
    std::vector<double> weights, grid;
};

void add_run_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("-c,--config", f.config, "JSON run configuration; its keys override flags");
    cmd.add_option("--dataset-a", f.dataset_a, "CSV file A");
    cmd.add_option("--dataset-b", f.dataset_b, "CSV file B");
    cmd.add_option("--label-a", f.label_a, "source label of file A (DS column)");
    cmd.add_option("--label-b", f.label_b, "source label of file B (DS column)");
    cmd.add_option("-o,--output-dir", f.output_dir, "directory for run outputs");
    cmd.add_option("--label-policy", f.label_policy, "two_class or banded");
    cmd.add_option("--epsilon", f.epsilon, "profile separation");
    cmd.add_option("--q-fraction", f.q_fraction, "indifference threshold as a fraction of the criterion range");
    cmd.add_option("--p-fraction", f.p_fraction, "preference threshold as a fraction of the criterion range");
    cmd.add_option("--lambda-step", f.lambda_step, "cutting-level grid step");
    cmd.add_option("--lambda", f.lambda, "fixed cutting level (skips the grid search)");
    cmd.add_option("--procedure", f.procedure, "pessimistic or optimistic");
    cmd.add_option("--weights", f.weights, "criterion weights")->expected(1, -1);
    cmd.add_option("--train-fraction", f.train_fraction, "fraction of pairs used for training");
    cmd.add_option("--seed", f.seed, "split seed");
    cmd.add_option("--fs-band-rate", f.band_rate, "share of training pairs allowed in the baseline's potential band");
    cmd.add_option("--grid", f.grid, "cutting levels for the sweep")->expected(1, -1);
}

std::string resolve(const fs::path& base, const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (base / p).lexically_normal().string();
}

elink::RunConfig make_config(const Flags& f) {
    elink::RunConfig c;
    if (f.dataset_a) c.dataset_a = *f.dataset_a;
    if (f.dataset_b) c.dataset_b = *f.dataset_b;
    if (f.label_a) c.label_a = *f.label_a;
    if (f.label_b) c.label_b = *f.label_b;
    if (f.output_dir) c.output_dir = *f.output_dir;
    if (f.label_policy) c.label_policy = elink::parse_label_policy(*f.label_policy);
    if (f.procedure) c.calibration.procedure = elink::parse_procedure(*f.procedure);
    if (f.epsilon) c.calibration.epsilon = *f.epsilon;
    if (f.q_fraction) c.calibration.q_fraction = *f.q_fraction;
    if (f.p_fraction) c.calibration.p_fraction = *f.p_fraction;
    if (f.lambda_step) c.calibration.grid_step = *f.lambda_step;
    if (f.lambda) c.calibration.fixed_lambda = *f.lambda;
    if (!f.weights.empty()) c.calibration.weights = f.weights;
    if (f.train_fraction) c.train_fraction = *f.train_fraction;
    if (f.seed) c.seed = *f.seed;
    if (f.band_rate) c.fs_band_rate = *f.band_rate;
    if (!f.grid.empty()) c.sweep_grid = f.grid;

    if (!f.config.empty()) {
        const auto doc = elink::io::read_document(f.config);
        c = elink::io::config_from_json(doc, c, f.config);
        // Paths inside a config file are relative to the file.
        const fs::path dir = fs::path(f.config).parent_path();
        if (doc.contains("dataset_a")) c.dataset_a = resolve(dir, c.dataset_a);
        if (doc.contains("dataset_b")) c.dataset_b = resolve(dir, c.dataset_b);
        if (doc.contains("output_dir")) c.output_dir = resolve(dir, c.output_dir);
    }
    c.validate();
    return c;
}

fs::path prepare_output(const elink::RunConfig& c) {
    const fs::path dir(c.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw elink::DataError("cannot create output directory '" + c.output_dir + "': " + ec.message());
    elink::io::write_document((dir / "run_config.json").string(), elink::io::to_json(c));
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw elink::DataError("cannot write '" + path.string() + "'");
    out << text;
}

std::string default_path(const std::string& given, const fs::path& dir, const char* name) {
    return given.empty() ? (dir / name).string() : given;
}

int cmd_ingest(const Flags& f) {
    const auto c = make_config(f);
    const auto dir = prepare_output(c);
    const auto data = elink::load_data(c);
    const json report{{"a", elink::io::to_json(data.a.report)},
                      {"b", elink::io::to_json(data.b.report)},
                      {"true_links", data.links.size()},
                      {"pairs", data.a.size() * data.b.size()}};
    elink::io::write_document((dir / "ingest_report.json").string(), report);
    std::cout << c.label_a << ": " << data.a.report.read << " read, " << data.a.report.retained << " retained\n"
              << c.label_b << ": " << data.b.report.read << " read, " << data.b.report.retained << " retained\n"
              << "true links: " << data.links.size() << '\n';
    return 0;
}

int cmd_train(const Flags& f) {
    const auto c = make_config(f);
    const auto dir = prepare_output(c);
    const auto data = elink::load_data(c);
    const auto pairs = elink::labeled_pairs(data, c.schema);
    const auto trained = elink::train_models(c, pairs);
    const auto& model = trained.electre.model;

    elink::io::write_document((dir / "electre_model.json").string(), elink::io::to_json(model));
    elink::io::write_document((dir / "fs_model.json").string(), elink::io::to_json(trained.fs));

    json thresholds = json::array();
    for (const auto& t : trained.electre.thresholds) thresholds.push_back({{"q", t.indifference}, {"p", t.preference}});
    const auto counts = trained.split.train.category_counts();
    const json report{{"train_pairs", trained.split.train.size()},
                      {"test_pairs", trained.split.test.size()},
                      {"train_category_counts", counts},
                      {"label_policy", std::string(elink::to_string(c.label_policy))},
                      {"lp", elink::io::to_json(trained.electre.lp, c.schema.field_names())},
                      {"thresholds", thresholds},
                      {"lambda", model.lambda()},
                      {"lambda_curve", elink::io::to_json(trained.electre.curve)}};
    elink::io::write_document((dir / "calibration_report.json").string(), report);
    for (const auto& w : trained.electre.lp.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "LP objective " << elink::format_real(trained.electre.lp.objective) << ", lambda "
              << elink::format_real(model.lambda()) << ", " << trained.split.train.size() << " training pairs\n";
    return 0;
}

int cmd_classify(const Flags& f, const std::string& model_path, bool test_only) {
    const auto c = make_config(f);
    const auto dir = prepare_output(c);
    const auto model = elink::io::electre_model_from_json(
        elink::io::read_document(default_path(model_path, dir, "electre_model.json")), model_path.empty() ? "electre_model.json" : model_path);
    const auto data = elink::load_data(c);
    auto pairs = elink::labeled_pairs(data, c.schema);
    if (test_only) pairs = elink::split(pairs, c.train_fraction, c.seed).test;
    const auto classified = elink::classify_pairs(pairs, model, c.calibration.procedure);
    std::ofstream out(dir / "classified.csv", std::ios::binary);
    if (!out) throw elink::DataError("cannot write classified.csv");
    elink::write_classified(out, c.schema.field_names(), classified, model.profile_count());
    std::cout << classified.size() << " pairs classified\n";
    return 0;
}

int cmd_evaluate(const Flags& f, const std::string& classified_path, const std::string& fs_path) {
    const auto c = make_config(f);
    const auto dir = prepare_output(c);
    const auto path = default_path(classified_path, dir, "classified.csv");
    const auto classified = elink::read_classified(elink::csv::read_file(path), path);
    for (const auto& cp : classified)
        if (!cp.pair.label)
            throw elink::UsageError(path + ": pair (" + cp.pair.id_a + ", " + cp.pair.id_b + ") has no truth label");

    auto report = elink::evaluate(classified);
    report.check_consistency();
    report.procedure = c.calibration.procedure;
    json doc{{"electre", elink::io::to_json(report)}};
    if (!fs_path.empty()) {
        const auto fsm = elink::io::fs_model_from_json(elink::io::read_document(fs_path), fs_path);
        std::vector<elink::Category> predicted, truth;
        for (const auto& cp : classified) {
            predicted.push_back(elink::fs_decide(fsm, cp.pair));
            truth.push_back(*cp.pair.label);
        }
        const auto baseline = elink::evaluate(predicted, truth);
        baseline.check_consistency();
        doc["fellegi_sunter"] = elink::io::to_json(baseline);
    }
    elink::io::write_document((dir / "eval_report.json").string(), doc);
    std::cout << "accuracy " << elink::format_real(report.accuracy()) << " over " << report.total << " pairs\n";
    return 0;
}

int cmd_sweep(const Flags& f, const std::string& model_path, bool all_pairs) {
    const auto c = make_config(f);
    const auto dir = prepare_output(c);
    const auto model = elink::io::electre_model_from_json(
        elink::io::read_document(default_path(model_path, dir, "electre_model.json")), "electre_model.json");
    const auto data = elink::load_data(c);
    auto pairs = elink::labeled_pairs(data, c.schema);
    if (!all_pairs) pairs = elink::split(pairs, c.train_fraction, c.seed).test;
    auto reports = elink::lambda_sweep(pairs, model, c.sweep_grid, elink::Procedure::pessimistic);
    for (auto& r : elink::lambda_sweep(pairs, model, c.sweep_grid, elink::Procedure::optimistic))
        reports.push_back(std::move(r));
    write_text(dir / "sweep.csv", elink::io::sweep_table(reports));
    json doc = json::array();
    for (const auto& r : reports) doc.push_back(elink::io::to_json(r));
    elink::io::write_document((dir / "sweep_report.json").string(), doc);
    for (const auto& r : reports)
        std::cout << elink::to_string(*r.procedure) << " lambda " << elink::format_real(*r.lambda) << ": accuracy "
                  << elink::format_real(r.accuracy()) << '\n';
    return 0;
}

int cmd_generate(const std::string& out_dir, const elink::synthetic::CensusOptions& options) {
    const auto files = elink::synthetic::generate_census(options);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw elink::DataError("cannot create '" + out_dir + "': " + ec.message());
    write_text(fs::path(out_dir) / "A.csv", files.csv_a());
    write_text(fs::path(out_dir) / "B.csv", files.csv_b());
    std::cout << files.rows_a.size() << " and " << files.rows_b.size() << " records, " << options.links
              << " true links\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Record linkage with Electre Tri and a Fellegi-Sunter baseline"};
    app.require_subcommand(1);

    Flags f;
    std::string model_path, classified_path, fs_path, gen_dir = "synthetic";
    bool test_only = false, all_pairs = false;
    elink::synthetic::CensusOptions gen;

    auto* ingest = app.add_subcommand("ingest", "load both files and write ingest_report.json");
    add_run_flags(*ingest, f);
    auto* train = app.add_subcommand("train", "calibrate the Electre Tri model and fit the baseline");
    add_run_flags(*train, f);
    auto* classify = app.add_subcommand("classify", "classify record pairs into classified.csv");
    add_run_flags(*classify, f);
    classify->add_option("-m,--model", model_path, "Electre Tri model (default: <output-dir>/electre_model.json)");
    classify->add_flag("--test-only", test_only, "classify only the held-out test pairs");
    auto* evaluate = app.add_subcommand("evaluate", "score classified.csv against truth");
    add_run_flags(*evaluate, f);
    evaluate->add_option("--classified", classified_path, "classified pairs (default: <output-dir>/classified.csv)");
    evaluate->add_option("--fs-model", fs_path, "also score the Fellegi-Sunter baseline on the same pairs");
    auto* sweep = app.add_subcommand("sweep", "accuracy across cutting levels");
    add_run_flags(*sweep, f);
    sweep->add_option("-m,--model", model_path, "Electre Tri model (default: <output-dir>/electre_model.json)");
    sweep->add_flag("--all-pairs", all_pairs, "sweep the full cross product instead of the test pairs");
    auto* generate = app.add_subcommand("generate", "write a synthetic census-style file pair");
    generate->add_option("-o,--output-dir", gen_dir, "directory for A.csv and B.csv");
    generate->add_option("--records-a", gen.records_a);
    generate->add_option("--records-b", gen.records_b);
    generate->add_option("--links", gen.links);
    generate->add_option("--typo-rate", gen.typo_rate);
    generate->add_option("--missing-rate", gen.missing_rate);
    generate->add_option("--seed", gen.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ingest) return cmd_ingest(f);
        if (*train) return cmd_train(f);
        if (*classify) return cmd_classify(f, model_path, test_only);
        if (*evaluate) return cmd_evaluate(f, classified_path, fs_path);
        if (*sweep) return cmd_sweep(f, model_path, all_pairs);
        if (*generate) return cmd_generate(gen_dir, gen);
    } catch (const elink::InvariantError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const elink::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
