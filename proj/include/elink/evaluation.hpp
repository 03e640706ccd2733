#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "elink/calibration.hpp"
#include "elink/comparison.hpp"
#include "elink/electre.hpp"
#include "elink/errors.hpp"
#include "elink/linkage.hpp"

namespace elink {

namespace detail {

// Unbiased draw from [0, n). std::uniform_int_distribution is
// implementation-defined, so splits would differ across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % n;
    }
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

}  // namespace detail

struct Split {
    std::vector<std::size_t> train_indices;  // ascending
    std::vector<std::size_t> test_indices;   // ascending
};

// Stratified by label: each label group contributes round(fraction * size)
// pairs to the training side.
inline Split split_indices(std::span<const ComparisonVector> pairs, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw UsageError("train fraction must lie strictly between 0 and 1");
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (!pairs[k].label)
            throw UsageError("cannot split: pair (" + pairs[k].id_a + ", " + pairs[k].id_b + ") has no label");
        groups[pairs[k].label->index].push_back(k);
    }

    std::mt19937_64 rng(seed);
    std::vector<char> in_train(pairs.size(), 0);
    std::size_t train_links = 0;
    for (auto& [label, members] : groups) {
        detail::shuffle(members, rng);
        const auto take = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
        for (std::size_t i = 0; i < take; ++i) in_train[members[i]] = 1;
        if (label == kMatch.index) train_links = take;
    }
    if (train_links == 0)
        throw UsageError("train fraction " + std::to_string(train_fraction) +
                         " leaves no true links in the training set; use a larger fraction");

    Split s;
    for (std::size_t k = 0; k < pairs.size(); ++k) (in_train[k] ? s.train_indices : s.test_indices).push_back(k);
    return s;
}

inline std::vector<ComparisonVector> select(std::span<const ComparisonVector> pairs,
                                            const std::vector<std::size_t>& indices) {
    std::vector<ComparisonVector> out;
    out.reserve(indices.size());
    for (auto k : indices) out.push_back(pairs[k]);
    return out;
}

inline TrainingSet to_training_set(std::span<const ComparisonVector> pairs, std::size_t category_count = 3) {
    TrainingSet t;
    t.category_count = category_count;
    t.criterion_count = pairs.empty() ? 0 : pairs.front().performances.size();
    for (const auto& p : pairs) {
        if (!p.label) throw UsageError("pair (" + p.id_a + ", " + p.id_b + ") has no label");
        t.examples.push_back({p.performances, *p.label});
    }
    return t;
}

struct SplitResult {
    TrainingSet train;
    std::vector<ComparisonVector> train_pairs;
    std::vector<ComparisonVector> test;
};

inline SplitResult split(std::span<const ComparisonVector> pairs, double train_fraction, std::uint64_t seed,
                         std::size_t category_count = 3) {
    const auto s = split_indices(pairs, train_fraction, seed);
    SplitResult r;
    r.train_pairs = select(pairs, s.train_indices);
    r.test = select(pairs, s.test_indices);
    r.train = to_training_set(r.train_pairs, category_count);
    return r;
}

struct EvalReport {
    std::size_t category_count = 3;
    std::size_t total = 0;
    std::size_t correct = 0;
    // contingency[predicted - 1][truth - 1]
    std::vector<std::vector<std::size_t>> contingency;
    bool two_class_truth = true;  // no truth label other than C_1 and C_p
    std::size_t missed_links = 0;            // truth C_p, predicted lower
    std::size_t misclassified_nonlinks = 0;  // truth C_1, predicted higher
    std::size_t false_links = 0;             // predicted C_p, truth lower
    std::size_t potential_assigned = 0;      // predicted strictly between C_1 and C_p
    std::optional<double> lambda;
    std::optional<Procedure> procedure;

    double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }

    std::size_t predicted(std::size_t c) const {
        std::size_t s = 0;
        for (auto v : contingency[c - 1]) s += v;
        return s;
    }

    std::size_t actual(std::size_t c) const {
        std::size_t s = 0;
        for (const auto& row : contingency) s += row[c - 1];
        return s;
    }

    // Of pairs predicted as the top category, the fraction truly in it.
    std::optional<double> match_precision() const {
        const auto pred = predicted(category_count);
        if (pred == 0) return std::nullopt;
        return static_cast<double>(contingency[category_count - 1][category_count - 1]) / static_cast<double>(pred);
    }

    std::optional<double> match_recall() const {
        const auto act = actual(category_count);
        if (act == 0) return std::nullopt;
        return static_cast<double>(contingency[category_count - 1][category_count - 1]) / static_cast<double>(act);
    }

    void check_consistency() const {
        std::size_t sum = 0, trace = 0;
        for (std::size_t i = 0; i < contingency.size(); ++i)
            for (std::size_t k = 0; k < contingency[i].size(); ++k) {
                sum += contingency[i][k];
                if (i == k) trace += contingency[i][k];
            }
        if (sum != total || trace != correct) throw InvariantError("evaluation report is internally inconsistent");
    }
};

inline EvalReport evaluate(std::span<const Category> predicted, std::span<const Category> truth,
                           std::size_t category_count = 3) {
    if (predicted.size() != truth.size())
        throw UsageError("evaluate: " + std::to_string(predicted.size()) + " predictions but " +
                         std::to_string(truth.size()) + " truth labels");
    EvalReport r;
    r.category_count = category_count;
    r.contingency.assign(category_count, std::vector<std::size_t>(category_count, 0));
    const int top = static_cast<int>(category_count);
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        const int p = predicted[k].index, t = truth[k].index;
        if (p < 1 || p > top || t < 1 || t > top)
            throw UsageError("evaluate: category index outside 1.." + std::to_string(category_count));
        r.contingency[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(t - 1)]++;
        ++r.total;
        if (p == t) ++r.correct;
        if (t != 1 && t != top) r.two_class_truth = false;
        if (t == top && p != top) ++r.missed_links;
        if (t == 1 && p != 1) ++r.misclassified_nonlinks;
        if (p == top && t != top) ++r.false_links;
        if (p != 1 && p != top) ++r.potential_assigned;
    }
    r.check_consistency();
    return r;
}

inline EvalReport evaluate(std::span<const ClassifiedPair> classified, std::size_t category_count = 3) {
    std::vector<Category> predicted, truth;
    predicted.reserve(classified.size());
    truth.reserve(classified.size());
    for (const auto& c : classified) {
        if (!c.pair.label)
            throw UsageError("evaluate: pair (" + c.pair.id_a + ", " + c.pair.id_b + ") has no truth label");
        predicted.push_back(c.category);
        truth.push_back(*c.pair.label);
    }
    return evaluate(predicted, truth, category_count);
}

// Checks that the truth stream lines up with the classified stream pair by
// pair before evaluating.
inline EvalReport evaluate(std::span<const ClassifiedPair> classified, std::span<const ComparisonVector> truth,
                           std::size_t category_count = 3) {
    if (classified.size() != truth.size())
        throw UsageError("evaluate: " + std::to_string(classified.size()) + " classified pairs but " +
                         std::to_string(truth.size()) + " truth pairs");
    std::vector<Category> predicted, labels;
    for (std::size_t k = 0; k < classified.size(); ++k) {
        const auto& c = classified[k].pair;
        if (c.id_a != truth[k].id_a || c.id_b != truth[k].id_b)
            throw UsageError("evaluate: pair " + std::to_string(k) + " is (" + c.id_a + ", " + c.id_b +
                             ") in the classified stream but (" + truth[k].id_a + ", " + truth[k].id_b +
                             ") in the truth stream");
        if (!truth[k].label) throw UsageError("evaluate: truth pair " + std::to_string(k) + " has no label");
        predicted.push_back(classified[k].category);
        labels.push_back(*truth[k].label);
    }
    return evaluate(predicted, labels, category_count);
}

inline std::vector<EvalReport> lambda_sweep(std::span<const ComparisonVector> pairs, const ElectreModel& model,
                                            const std::vector<double>& grid, Procedure procedure) {
    if (grid.empty()) throw UsageError("lambda sweep needs a nonempty grid");
    std::vector<Category> truth;
    truth.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (!p.label) throw UsageError("lambda sweep: pair (" + p.id_a + ", " + p.id_b + ") has no truth label");
        if (p.performances.size() != model.criterion_count())
            throw UsageError("lambda sweep: pair length does not match the model");
        truth.push_back(*p.label);
    }
    std::vector<EvalReport> out;
    for (double lambda : grid) {
        const auto m = model.with_lambda(lambda);
        std::vector<Category> predicted;
        predicted.reserve(pairs.size());
        for (const auto& p : pairs) predicted.push_back(assign(m, p.performances, procedure));
        auto r = evaluate(predicted, truth, model.category_count());
        r.lambda = lambda;
        r.procedure = procedure;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace elink
