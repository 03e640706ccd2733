#pragma once

// Fellegi-Sunter likelihood-ratio baseline. Similarities are binarized per
// field (agree when similarity >= threshold), m/u probabilities are estimated
// from labeled pairs with Laplace smoothing, and log2 R is thresholded by
// Lower/Upper into nonmatch / potential match / match.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "elink/comparison.hpp"
#include "elink/errors.hpp"

namespace elink {

struct FsField {
    std::string name;
    double m = 0.5;  // Pr(agree | match)
    double u = 0.5;  // Pr(agree | nonmatch)
    double agreement_threshold = 0.88;

    double agreement_weight() const { return std::log2(m / u); }
    double disagreement_weight() const { return std::log2((1.0 - m) / (1.0 - u)); }

    friend bool operator==(const FsField&, const FsField&) = default;
};

struct FsModel {
    std::vector<FsField> fields;
    double lower = 0.0;  // on log2 R
    double upper = 0.0;

    friend bool operator==(const FsModel&, const FsModel&) = default;

    void validate() const {
        if (fields.empty()) throw ModelError("Fellegi-Sunter model has no fields");
        for (const auto& f : fields) {
            if (!(f.m > 0.0 && f.m < 1.0) || !(f.u > 0.0 && f.u < 1.0))
                throw ModelError("field '" + f.name + "': m and u must lie in (0,1)");
            if (!(f.agreement_threshold >= 0.0 && f.agreement_threshold <= 1.0))
                throw ModelError("field '" + f.name + "': agreement threshold outside [0,1]");
        }
        if (!std::isfinite(lower) || !std::isfinite(upper) || lower > upper)
            throw ModelError("Fellegi-Sunter thresholds require finite Lower <= Upper");
    }
};

inline constexpr double kDefaultPotentialBandRate = 0.01;

// Sum of per-field weights under conditional independence.
inline double log2_ratio(const FsModel& model, std::span<const double> performances) {
    if (performances.size() != model.fields.size())
        throw UsageError("pair has " + std::to_string(performances.size()) +
                         " performances, Fellegi-Sunter model has " +
                         std::to_string(model.fields.size()) + " fields");
    double score = 0.0;
    for (std::size_t j = 0; j < model.fields.size(); ++j) {
        const auto& f = model.fields[j];
        score += performances[j] >= f.agreement_threshold ? f.agreement_weight() : f.disagreement_weight();
    }
    return score;
}

inline Category fs_decide(const FsModel& model, double log2r) {
    if (log2r > model.upper) return kMatch;
    if (log2r < model.lower) return kNonmatch;
    return kPotentialMatch;
}

inline Category fs_decide(const FsModel& model, const ComparisonVector& pair) {
    return fs_decide(model, log2_ratio(model, pair.performances));
}

// Picks Lower/Upper from training scores: first the single cut between
// adjacent distinct scores that minimizes training errors, then a band grown
// around it by whole tie groups (smaller group first) while it holds at most
// band_rate of the pairs. Lower <= s <= Upper is the potential-match band.
inline std::pair<double, double> choose_band(std::span<const double> scores, const std::vector<bool>& is_link,
                                             double band_rate = kDefaultPotentialBandRate) {
    if (scores.size() != is_link.size()) throw UsageError("choose_band: score/label length mismatch");
    if (!(band_rate >= 0.0 && band_rate <= 1.0)) throw UsageError("band rate must lie in [0,1]");
    if (scores.empty()) return {0.0, 0.0};

    struct Group {
        double value;
        std::size_t links = 0;
        std::size_t nonlinks = 0;
        std::size_t size() const { return links + nonlinks; }
    };
    std::map<double, Group> by_value;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        auto& g = by_value.try_emplace(scores[k], Group{scores[k]}).first->second;
        (is_link[k] ? g.links : g.nonlinks)++;
    }
    std::vector<Group> groups;
    for (auto& [v, g] : by_value) groups.push_back(g);
    const std::size_t d = groups.size();

    // errors(c): cut before group c, so groups >= c are called links.
    std::size_t errors = 0;
    for (const auto& g : groups) errors += g.nonlinks;
    std::size_t best = errors;
    std::vector<std::size_t> best_cuts{0};
    for (std::size_t c = 1; c <= d; ++c) {
        errors += groups[c - 1].links;
        errors -= groups[c - 1].nonlinks;
        if (errors < best) {
            best = errors;
            best_cuts.assign(1, c);
        } else if (errors == best) {
            best_cuts.push_back(c);
        }
    }
    const std::size_t cut = best_cuts[(best_cuts.size() - 1) / 2];

    double threshold;
    if (cut == 0) threshold = groups.front().value - 1.0;
    else if (cut == d) threshold = groups.back().value + 1.0;
    else threshold = 0.5 * (groups[cut - 1].value + groups[cut].value);

    double lower = threshold, upper = threshold;
    const auto budget = static_cast<std::size_t>(std::floor(band_rate * static_cast<double>(scores.size())));
    std::size_t used = 0;
    std::size_t left = cut;  // next group to take on the left is left - 1
    std::size_t right = cut; // next group to take on the right is right
    while (true) {
        const bool can_left = left > 0 && used + groups[left - 1].size() <= budget;
        const bool can_right = right < d && used + groups[right].size() <= budget;
        if (!can_left && !can_right) break;
        const bool take_left = can_left && (!can_right || groups[left - 1].size() <= groups[right].size());
        if (take_left) {
            --left;
            used += groups[left].size();
            lower = groups[left].value;
        } else {
            used += groups[right].size();
            upper = groups[right].value;
            ++right;
        }
    }
    return {lower, upper};
}

struct FsFitOptions {
    double band_rate = kDefaultPotentialBandRate;
};

// Supervised frequency estimation. Pairs labeled C_3 are matches; every
// other label counts as a nonmatch.
inline FsModel fit_fs(std::span<const ComparisonVector> pairs, const std::vector<std::string>& field_names,
                      const std::vector<double>& agreement_thresholds, const FsFitOptions& options = {}) {
    const std::size_t m = field_names.size();
    if (m == 0 || agreement_thresholds.size() != m)
        throw UsageError("fit_fs: need one agreement threshold per field");
    std::vector<std::size_t> agree_m(m, 0), agree_u(m, 0);
    std::size_t n_m = 0, n_u = 0;
    for (const auto& p : pairs) {
        if (!p.label) throw UsageError("fit_fs: pair (" + p.id_a + ", " + p.id_b + ") has no label");
        if (p.performances.size() != m) throw UsageError("fit_fs: performance length mismatch");
        const bool link = *p.label == kMatch;
        (link ? n_m : n_u)++;
        for (std::size_t j = 0; j < m; ++j)
            if (p.performances[j] >= agreement_thresholds[j]) (link ? agree_m : agree_u)[j]++;
    }
    if (n_m == 0) throw DataError("fit_fs: no matched (C3) pairs to estimate m-probabilities from");
    if (n_u == 0) throw DataError("fit_fs: no nonmatched pairs to estimate u-probabilities from");

    FsModel model;
    for (std::size_t j = 0; j < m; ++j) {
        model.fields.push_back({field_names[j],
                                (static_cast<double>(agree_m[j]) + 1.0) / (static_cast<double>(n_m) + 2.0),
                                (static_cast<double>(agree_u[j]) + 1.0) / (static_cast<double>(n_u) + 2.0),
                                agreement_thresholds[j]});
    }

    std::vector<double> scores;
    std::vector<bool> links;
    scores.reserve(pairs.size());
    links.reserve(pairs.size());
    for (const auto& p : pairs) {
        scores.push_back(log2_ratio(model, p.performances));
        links.push_back(*p.label == kMatch);
    }
    std::tie(model.lower, model.upper) = choose_band(scores, links, options.band_rate);
    model.validate();
    return model;
}

}  // namespace elink
