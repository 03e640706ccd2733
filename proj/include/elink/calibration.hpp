#pragma once

// Parameter estimation from a labeled training set.
//
// Profiles come from the classification-error LP
//
//   min  sum_j sum_k theta_j(a_k)
//   s.t. theta_j(a_k) >= g_j(a_k) - g_j(b_h)       a_k -> C_h, h != p
//        theta_j(a_k) >= g_j(b_{h-1}) - g_j(a_k)   a_k -> C_h, h != 1
//        g_j(b_h) >= g_j(b_{h-1}) + epsilon        h = 2..p-1
//        theta >= 0
//
// which separates by criterion. For one criterion, theta(a_k) is the sum of
// two hinges, so the objective is sum_h f_h(b_h) with f_h convex piecewise
// linear, subject to a chain of epsilon-separation constraints. After the
// shift c_h = b_h - (h-1) epsilon the chain becomes c_1 <= ... <= c_{p-1},
// and an optimum exists with every c_h on a shifted breakpoint, so a dynamic
// program over the sorted breakpoints solves it exactly.
//
// The optimum is often a flat face. Among optimal solutions there is a
// componentwise smallest and largest one; the profiles returned are their
// midpoint, which is itself optimal and feasible.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "elink/electre.hpp"
#include "elink/errors.hpp"

namespace elink {

struct TrainingExample {
    std::vector<double> performances;
    Category category;
};

struct TrainingSet {
    std::size_t category_count = 3;
    std::size_t criterion_count = 0;
    std::vector<TrainingExample> examples;

    std::size_t size() const { return examples.size(); }

    void validate() const {
        if (category_count < 2) throw UsageError("training set needs at least two categories");
        if (criterion_count < 1) throw UsageError("training set needs at least one criterion");
        for (std::size_t k = 0; k < examples.size(); ++k) {
            const auto& e = examples[k];
            if (e.performances.size() != criterion_count)
                throw UsageError("training example " + std::to_string(k) + " has " +
                                 std::to_string(e.performances.size()) + " performances, expected " +
                                 std::to_string(criterion_count));
            if (e.category.index < 1 || static_cast<std::size_t>(e.category.index) > category_count)
                throw UsageError("training example " + std::to_string(k) + " has category index " +
                                 std::to_string(e.category.index) + " outside 1.." +
                                 std::to_string(category_count));
            for (double g : e.performances)
                if (!std::isfinite(g)) throw UsageError("training example " + std::to_string(k) + " is not finite");
        }
    }

    std::vector<std::size_t> category_counts() const {
        std::vector<std::size_t> out(category_count, 0);
        for (const auto& e : examples) out[static_cast<std::size_t>(e.category.index - 1)]++;
        return out;
    }
};

struct LpSolution {
    ProfileSet profiles;
    double objective = 0.0;
    std::vector<std::vector<double>> errors;  // errors[k][j] = theta_j(a_k)
    std::vector<double> criterion_objectives;
    std::vector<std::string> warnings;
};

namespace detail {

// Sum over a sorted sample of max(0, g - b) or max(0, b - g), via prefix sums.
class HingeSum {
public:
    explicit HingeSum(std::vector<double> values) : sorted_(std::move(values)) {
        std::sort(sorted_.begin(), sorted_.end());
        prefix_.resize(sorted_.size() + 1, 0.0);
        for (std::size_t k = 0; k < sorted_.size(); ++k) prefix_[k + 1] = prefix_[k] + sorted_[k];
    }

    // sum max(0, g - b)
    double above(double b) const {
        const auto k = static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), b) - sorted_.begin());
        const double n = static_cast<double>(sorted_.size() - k);
        return std::max(0.0, (prefix_.back() - prefix_[k]) - n * b);
    }

    // sum max(0, b - g)
    double below(double b) const {
        const auto k = static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), b) - sorted_.begin());
        return std::max(0.0, static_cast<double>(k) * b - prefix_[k]);
    }

    double scale() const {
        double s = 0.0;
        for (double v : sorted_) s += std::fabs(v);
        return s;
    }

private:
    std::vector<double> sorted_;
    std::vector<double> prefix_;
};

// Profiles b_1..b_{p-1} (gain orientation) for one criterion.
// by_category[h] holds the performances of examples assigned to C_{h+1}.
inline std::vector<double> solve_criterion(const std::vector<std::vector<double>>& by_category, double epsilon) {
    const std::size_t profiles = by_category.size() - 1;

    std::vector<HingeSum> above, below;  // above[t]: C_{t+1} examples; below[t]: C_{t+2} examples
    double scale = 1.0;
    std::vector<double> candidates;
    for (std::size_t t = 0; t < profiles; ++t) {
        above.emplace_back(by_category[t]);
        below.emplace_back(by_category[t + 1]);
        const double shift = static_cast<double>(t) * epsilon;
        for (double g : by_category[t]) candidates.push_back(g - shift);
        for (double g : by_category[t + 1]) candidates.push_back(g - shift);
    }
    for (const auto& h : above) scale += h.scale();
    scale += below.back().scale();
    if (candidates.empty()) {
        // No examples touch any profile: spread them from 0 by epsilon.
        std::vector<double> out(profiles);
        for (std::size_t t = 0; t < profiles; ++t) out[t] = static_cast<double>(t) * epsilon;
        return out;
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    const std::size_t n = candidates.size();

    auto cost = [&](std::size_t t, double c) {
        const double b = c + static_cast<double>(t) * epsilon;
        return above[t].above(b) + below[t].below(b);
    };

    // value[t][i]: best cost of profiles 0..t with c_t = candidates[i].
    // prefix[t][i]: min over i' <= i of value[t][i'].
    std::vector<std::vector<double>> value(profiles, std::vector<double>(n));
    std::vector<std::vector<double>> prefix(profiles, std::vector<double>(n));
    for (std::size_t t = 0; t < profiles; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            value[t][i] = cost(t, candidates[i]) + (t == 0 ? 0.0 : prefix[t - 1][i]);
            prefix[t][i] = i == 0 ? value[t][i] : std::min(prefix[t][i - 1], value[t][i]);
        }
    }

    const double optimum = prefix[profiles - 1][n - 1];
    const double tol = 1e-12 * scale;
    auto is_best = [&](double v, double target) { return v <= target + tol; };

    // Componentwise smallest optimal solution.
    std::vector<double> lo(profiles), hi(profiles);
    {
        std::size_t limit = n - 1;
        double target = optimum;
        for (std::size_t t = profiles; t-- > 0;) {
            std::size_t pick = 0;
            while (pick < limit && !is_best(value[t][pick], target)) ++pick;
            lo[t] = candidates[pick];
            if (t > 0) {
                target = prefix[t - 1][pick];
                limit = pick;
            }
        }
    }
    // Componentwise largest optimal solution.
    {
        std::size_t limit = n - 1;
        double target = optimum;
        for (std::size_t t = profiles; t-- > 0;) {
            std::size_t pick = limit;
            while (pick > 0 && !is_best(value[t][pick], target)) --pick;
            hi[t] = candidates[pick];
            if (t > 0) {
                target = prefix[t - 1][pick];
                limit = pick;
            }
        }
    }

    std::vector<double> out(profiles);
    for (std::size_t t = 0; t < profiles; ++t) {
        out[t] = 0.5 * (lo[t] + hi[t]) + static_cast<double>(t) * epsilon;
        // Repair rounding so the separation holds exactly in floating point.
        if (t > 0 && out[t] < out[t - 1] + epsilon) out[t] = out[t - 1] + epsilon;
    }
    return out;
}

inline double example_error(double g, std::size_t category_index, std::span<const double> profiles) {
    // category_index is 1-based; profiles holds b_1..b_{p-1} for one criterion.
    const std::size_t p = profiles.size() + 1;
    double theta = 0.0;
    if (category_index != p) theta = std::max(theta, g - profiles[category_index - 1]);
    if (category_index != 1) theta = std::max(theta, profiles[category_index - 2] - g);
    return theta;
}

}  // namespace detail

// Observed max - min of each criterion over the training set.
inline std::vector<double> criterion_ranges(const TrainingSet& train) {
    std::vector<double> lo(train.criterion_count, std::numeric_limits<double>::infinity());
    std::vector<double> hi(train.criterion_count, -std::numeric_limits<double>::infinity());
    for (const auto& e : train.examples)
        for (std::size_t j = 0; j < train.criterion_count; ++j) {
            lo[j] = std::min(lo[j], e.performances[j]);
            hi[j] = std::max(hi[j], e.performances[j]);
        }
    std::vector<double> out(train.criterion_count, 0.0);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = train.examples.empty() ? 0.0 : hi[j] - lo[j];
    return out;
}

// directions defaults to all-gain. Profiles are returned in each criterion's
// native orientation.
inline LpSolution estimate_profiles(const TrainingSet& train, double epsilon = kDefaultEpsilon,
                                    const std::vector<Direction>& directions = {}) {
    train.validate();
    if (train.examples.empty()) throw UsageError("cannot estimate profiles from an empty training set");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw UsageError("epsilon must be positive and finite");
    if (!directions.empty() && directions.size() != train.criterion_count)
        throw UsageError("direction list length does not match criterion count");

    const std::size_t p = train.category_count;
    const std::size_t m = train.criterion_count;
    auto oriented = [&](std::size_t j, double x) {
        return !directions.empty() && directions[j] == Direction::cost ? -x : x;
    };

    LpSolution sol;
    if (p >= 3) {
        const auto ranges = criterion_ranges(train);
        for (std::size_t j = 0; j < m; ++j) {
            if (epsilon * static_cast<double>(p - 2) > ranges[j])
                throw InfeasibleError("epsilon=" + std::to_string(epsilon) + " is infeasible: " +
                                      std::to_string(p - 2) + " * epsilon exceeds the range " +
                                      std::to_string(ranges[j]) + " of criterion " + std::to_string(j + 1));
        }
    }
    const auto counts = train.category_counts();
    for (std::size_t h = 0; h < p; ++h)
        if (counts[h] == 0)
            sol.warnings.push_back("category C" + std::to_string(h + 1) +
                                   " has no training examples; its boundary profiles are placed by "
                                   "the midpoint rule between its neighbours");

    std::vector<std::vector<double>> rows(p - 1, std::vector<double>(m));
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<std::vector<double>> by_category(p);
        for (const auto& e : train.examples)
            by_category[static_cast<std::size_t>(e.category.index - 1)].push_back(oriented(j, e.performances[j]));
        const auto b = detail::solve_criterion(by_category, epsilon);
        for (std::size_t t = 0; t + 1 < p; ++t) rows[t][j] = oriented(j, b[t]);
    }
    sol.profiles = ProfileSet(rows);

    sol.errors.assign(train.size(), std::vector<double>(m, 0.0));
    sol.criterion_objectives.assign(m, 0.0);
    std::vector<double> column(p - 1);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t t = 0; t + 1 < p; ++t) column[t] = oriented(j, rows[t][j]);
        for (std::size_t k = 0; k < train.size(); ++k) {
            const auto& e = train.examples[k];
            const double theta = detail::example_error(oriented(j, e.performances[j]),
                                                       static_cast<std::size_t>(e.category.index), column);
            sol.errors[k][j] = theta;
            sol.criterion_objectives[j] += theta;
        }
    }
    for (double v : sol.criterion_objectives) sol.objective += v;
    return sol;
}

struct Thresholds {
    double indifference = 0.0;
    double preference = 0.0;
};

inline constexpr double kDefaultIndifferenceFraction = 0.05;
inline constexpr double kDefaultPreferenceFraction = 0.15;

// q_j and p_j as fixed fractions of each criterion's observed range.
inline std::vector<Thresholds> estimate_thresholds(const TrainingSet& train,
                                                   double q_fraction = kDefaultIndifferenceFraction,
                                                   double p_fraction = kDefaultPreferenceFraction) {
    train.validate();
    if (train.examples.empty()) throw UsageError("cannot estimate thresholds from an empty training set");
    if (!(q_fraction >= 0.0 && q_fraction <= p_fraction && p_fraction <= 1.0))
        throw UsageError("threshold fractions must satisfy 0 <= q_fraction <= p_fraction <= 1");
    std::vector<Thresholds> out;
    for (double r : criterion_ranges(train)) out.push_back({q_fraction * r, p_fraction * r});
    return out;
}

// {0.5, 0.5 + step, ...} up to and including 1.0. Points are snapped to the
// nearest double of their decimal value so 0.70 and 0.85 come out exact.
inline std::vector<double> lambda_grid(double step) {
    if (!(step > 0.0 && step <= 0.5)) throw UsageError("lambda grid step must lie in (0, 0.5]");
    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        double v = 0.5 + static_cast<double>(i) * step;
        v = std::round(v * 1e12) / 1e12;
        if (v > 1.0) break;
        grid.push_back(v);
    }
    if (grid.back() < 1.0) grid.push_back(1.0);
    return grid;
}

struct LambdaPoint {
    double lambda = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
    double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

inline std::vector<LambdaPoint> lambda_accuracy_curve(const TrainingSet& train, const ElectreModel& model,
                                                      double grid_step, Procedure procedure) {
    train.validate();
    if (train.criterion_count != model.criterion_count() || train.category_count != model.category_count())
        throw UsageError("training set shape does not match the model");
    std::vector<LambdaPoint> curve;
    for (double lambda : lambda_grid(grid_step)) {
        const auto m = model.with_lambda(lambda);
        LambdaPoint pt{lambda, 0, train.size()};
        for (const auto& e : train.examples)
            if (assign(m, e.performances, procedure) == e.category) ++pt.correct;
        curve.push_back(pt);
    }
    return curve;
}

// Ties go to the largest lambda.
inline double best_lambda(const std::vector<LambdaPoint>& curve) {
    if (curve.empty()) throw UsageError("empty lambda curve");
    const LambdaPoint* best = &curve.front();
    for (const auto& pt : curve)
        if (pt.correct >= best->correct) best = &pt;
    return best->lambda;
}

// Lambda on the grid with the best training accuracy.
inline double estimate_lambda(const TrainingSet& train, const ElectreModel& model, double grid_step,
                              Procedure procedure) {
    return best_lambda(lambda_accuracy_curve(train, model, grid_step, procedure));
}

struct CalibrationOptions {
    double epsilon = kDefaultEpsilon;
    double q_fraction = kDefaultIndifferenceFraction;
    double p_fraction = kDefaultPreferenceFraction;
    double grid_step = 0.05;
    Procedure procedure = Procedure::pessimistic;
    std::vector<double> weights;                 // empty: uniform
    std::vector<std::optional<double>> vetoes;   // empty: none
    std::optional<double> fixed_lambda;          // skip the grid search
};

struct CalibrationResult {
    ElectreModel model;
    LpSolution lp;
    std::vector<Thresholds> thresholds;
    std::vector<LambdaPoint> curve;
};

inline CalibrationResult calibrate(const TrainingSet& train, const std::vector<std::string>& criterion_names,
                                   const CalibrationOptions& options = {},
                                   std::vector<std::string> category_labels = {}) {
    train.validate();
    if (criterion_names.size() != train.criterion_count)
        throw UsageError("criterion name count does not match the training set");
    if (!options.weights.empty() && options.weights.size() != train.criterion_count)
        throw UsageError("weight vector length does not match criterion count");
    if (!options.vetoes.empty() && options.vetoes.size() != train.criterion_count)
        throw UsageError("veto vector length does not match criterion count");

    auto thresholds = estimate_thresholds(train, options.q_fraction, options.p_fraction);
    auto lp = estimate_profiles(train, options.epsilon);

    std::vector<Criterion> criteria;
    for (std::size_t j = 0; j < train.criterion_count; ++j) {
        Criterion c;
        c.name = criterion_names[j];
        c.weight = options.weights.empty() ? 1.0 : options.weights[j];
        c.indifference = thresholds[j].indifference;
        c.preference = thresholds[j].preference;
        if (!options.vetoes.empty()) c.veto = options.vetoes[j];
        criteria.push_back(std::move(c));
    }
    ElectreModel model(std::move(criteria), lp.profiles, 0.5, options.epsilon, std::move(category_labels));

    std::vector<LambdaPoint> curve;
    double lambda = 0.5;
    if (options.fixed_lambda) {
        lambda = *options.fixed_lambda;
    } else {
        curve = lambda_accuracy_curve(train, model, options.grid_step, options.procedure);
        lambda = best_lambda(curve);
    }
    return {model.with_lambda(lambda), std::move(lp), std::move(thresholds), std::move(curve)};
}

}  // namespace elink
