#pragma once

// Electre Tri sorting: concordance, discordance, credibility, the lambda-cut
// outranking relation and the two assignment procedures.
//
// Indexing: criteria j and profiles h are 0-based in this API, so profile
// h = 0 is b_1, the boundary between C_1 and C_2. Categories carry their
// 1-based rank (C_1 = worst, C_p = best).
//
// Every formula is evaluated in gain orientation. Cost criteria are negated
// on the way in, for both alternatives and profiles.

#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "elink/errors.hpp"

namespace elink {

enum class Direction { gain, cost };

enum class Procedure { pessimistic, optimistic };

inline std::string_view to_string(Direction d) { return d == Direction::gain ? "gain" : "cost"; }

inline std::string_view to_string(Procedure p) {
    return p == Procedure::pessimistic ? "pessimistic" : "optimistic";
}

inline Procedure parse_procedure(std::string_view s) {
    if (s == "pessimistic") return Procedure::pessimistic;
    if (s == "optimistic") return Procedure::optimistic;
    throw UsageError("unknown assignment procedure '" + std::string(s) +
                     "' (expected pessimistic|optimistic)");
}

struct Criterion {
    std::string name;
    Direction direction = Direction::gain;
    double weight = 1.0;
    double indifference = 0.0;  // q_j
    double preference = 0.0;    // p_j
    std::optional<double> veto; // v_j; absent means no veto effect
};

// Ordered category label. index is 1-based: C_1 < C_2 < ... < C_p.
struct Category {
    int index = 1;

    friend constexpr auto operator<=>(const Category&, const Category&) = default;
};

// The three categories of the linkage application.
inline constexpr Category kNonmatch{1};
inline constexpr Category kPotentialMatch{2};
inline constexpr Category kMatch{3};

inline std::string_view linkage_label(Category c) {
    switch (c.index) {
        case 1: return "nonmatch";
        case 2: return "potential match";
        case 3: return "match";
        default: return "?";
    }
}

// Profiles b_1..b_{p-1}, stored row-major (one row per profile) in the
// criteria's native orientation.
class ProfileSet {
public:
    ProfileSet() = default;

    ProfileSet(std::initializer_list<std::vector<double>> rows) : ProfileSet(std::vector<std::vector<double>>(rows)) {}

    explicit ProfileSet(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw ModelError("profile set needs at least one profile (p >= 2)");
        criteria_ = rows.front().size();
        if (criteria_ == 0) throw ModelError("profiles must have at least one criterion");
        values_.reserve(rows.size() * criteria_);
        for (std::size_t h = 0; h < rows.size(); ++h) {
            if (rows[h].size() != criteria_)
                throw ModelError("profile " + std::to_string(h + 1) + " has " +
                                 std::to_string(rows[h].size()) + " values, expected " +
                                 std::to_string(criteria_));
            for (double v : rows[h]) {
                if (!std::isfinite(v)) throw ModelError("profile values must be finite");
                values_.push_back(v);
            }
        }
    }

    std::size_t profile_count() const { return criteria_ == 0 ? 0 : values_.size() / criteria_; }
    std::size_t category_count() const { return profile_count() + 1; }
    std::size_t criterion_count() const { return criteria_; }

    double value(std::size_t h, std::size_t j) const { return values_[h * criteria_ + j]; }

    std::span<const double> profile(std::size_t h) const {
        return std::span<const double>(values_).subspan(h * criteria_, criteria_);
    }

    std::vector<std::vector<double>> rows() const {
        std::vector<std::vector<double>> out;
        for (std::size_t h = 0; h < profile_count(); ++h) {
            auto p = profile(h);
            out.emplace_back(p.begin(), p.end());
        }
        return out;
    }

    friend bool operator==(const ProfileSet&, const ProfileSet&) = default;

private:
    std::size_t criteria_ = 0;
    std::vector<double> values_;
};

struct Alternative {
    std::string id;
    std::vector<double> performances;
};

inline constexpr double kDefaultEpsilon = 0.01;

class ElectreModel {
public:
    ElectreModel(std::vector<Criterion> criteria, ProfileSet profiles, double lambda,
                 double epsilon = kDefaultEpsilon, std::vector<std::string> category_labels = {})
        : criteria_(std::move(criteria)),
          profiles_(std::move(profiles)),
          lambda_(lambda),
          epsilon_(epsilon),
          labels_(std::move(category_labels)) {
        validate();
    }

    const std::vector<Criterion>& criteria() const { return criteria_; }
    const ProfileSet& profiles() const { return profiles_; }
    double lambda() const { return lambda_; }
    double epsilon() const { return epsilon_; }
    std::size_t criterion_count() const { return criteria_.size(); }
    std::size_t profile_count() const { return profiles_.profile_count(); }
    std::size_t category_count() const { return profiles_.category_count(); }
    double weight_sum() const { return weight_sum_; }

    const std::vector<std::string>& category_labels() const { return labels_; }

    std::string label(Category c) const {
        if (c.index >= 1 && static_cast<std::size_t>(c.index) <= labels_.size())
            return labels_[static_cast<std::size_t>(c.index - 1)];
        return "C" + std::to_string(c.index);
    }

    ElectreModel with_lambda(double lambda) const {
        ElectreModel copy = *this;
        copy.lambda_ = lambda;
        copy.validate();
        return copy;
    }

    ElectreModel with_weights(const std::vector<double>& weights) const {
        if (weights.size() != criteria_.size())
            throw UsageError("weight vector length " + std::to_string(weights.size()) +
                             " does not match criterion count " +
                             std::to_string(criteria_.size()));
        ElectreModel copy = *this;
        for (std::size_t j = 0; j < weights.size(); ++j) copy.criteria_[j].weight = weights[j];
        copy.validate();
        return copy;
    }

    // Performance of value x on criterion j, flipped to gain orientation.
    double oriented(std::size_t j, double x) const {
        return criteria_[j].direction == Direction::gain ? x : -x;
    }

private:
    void validate() {
        if (criteria_.empty()) throw ModelError("model needs at least one criterion");
        if (profiles_.profile_count() < 1) throw ModelError("model needs at least two categories");
        if (profiles_.criterion_count() != criteria_.size())
            throw ModelError("profiles have " + std::to_string(profiles_.criterion_count()) +
                             " criteria, model has " + std::to_string(criteria_.size()));
        if (!(lambda_ >= 0.5 && lambda_ <= 1.0))
            throw ModelError("cutting level lambda=" + std::to_string(lambda_) +
                             " outside [0.5, 1.0]");
        if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_))
            throw ModelError("profile separation epsilon must be positive and finite");
        if (!labels_.empty() && labels_.size() != category_count())
            throw ModelError("category label count does not match category count");

        weight_sum_ = 0.0;
        for (const auto& c : criteria_) {
            const std::string who = "criterion '" + c.name + "': ";
            if (!std::isfinite(c.weight) || c.weight < 0.0)
                throw ModelError(who + "weight must be finite and nonnegative");
            if (!std::isfinite(c.indifference) || c.indifference < 0.0)
                throw ModelError(who + "indifference threshold must be finite and nonnegative");
            if (!std::isfinite(c.preference) || c.preference < c.indifference)
                throw ModelError(who + "requires q <= p");
            if (c.veto && (!std::isfinite(*c.veto) || *c.veto < c.preference))
                throw ModelError(who + "requires p <= v");
            weight_sum_ += c.weight;
        }
        if (!(weight_sum_ > 0.0)) throw ModelError("at least one criterion weight must be positive");

        for (std::size_t j = 0; j < criteria_.size(); ++j) {
            for (std::size_t h = 1; h < profiles_.profile_count(); ++h) {
                const double lower = oriented(j, profiles_.value(h - 1, j));
                const double upper = oriented(j, profiles_.value(h, j));
                if (!(upper >= lower + epsilon_))
                    throw ModelError("criterion '" + criteria_[j].name + "': profile b_" +
                                     std::to_string(h + 1) + " is not separated from b_" +
                                     std::to_string(h) + " by epsilon");
            }
        }
    }

    std::vector<Criterion> criteria_;
    ProfileSet profiles_;
    double lambda_;
    double epsilon_;
    std::vector<std::string> labels_;
    double weight_sum_ = 0.0;
};

namespace detail {

// shortfall = how far the challenged side falls below the reference, in
// gain orientation: g(reference) - g(challenger).
inline double concordance_from_shortfall(double shortfall, double q, double p) {
    if (shortfall <= q) return 1.0;
    if (shortfall >= p) return 0.0;
    return (p - shortfall) / (p - q);
}

inline double discordance_from_shortfall(double shortfall, double p, const std::optional<double>& v) {
    if (!v) return 0.0;
    if (shortfall <= p) return 0.0;
    if (shortfall >= *v) return 1.0;
    return (shortfall - p) / (*v - p);
}

inline void check_alternative(const ElectreModel& model, std::span<const double> a) {
    if (a.size() != model.criterion_count())
        throw UsageError("alternative has " + std::to_string(a.size()) +
                         " performances, model has " + std::to_string(model.criterion_count()) +
                         " criteria");
}

inline void check_profile(const ElectreModel& model, std::size_t h) {
    if (h >= model.profile_count())
        throw UsageError("profile index " + std::to_string(h) + " out of range (model has " +
                         std::to_string(model.profile_count()) + " profiles)");
}

inline void check_criterion(const ElectreModel& model, std::size_t j) {
    if (j >= model.criterion_count())
        throw UsageError("criterion index " + std::to_string(j) + " out of range (model has " +
                         std::to_string(model.criterion_count()) + " criteria)");
}

inline double shortfall(const ElectreModel& model, std::size_t j, double x, double y) {
    return model.oriented(j, y) - model.oriented(j, x);
}

// Credibility that x outranks y; both in native orientation, unchecked.
inline double credibility_unchecked(const ElectreModel& model, std::span<const double> x,
                                    std::span<const double> y) {
    const auto& crit = model.criteria();
    double concordant = 0.0;
    bool any_veto = false;
    for (std::size_t j = 0; j < crit.size(); ++j) {
        const double s = shortfall(model, j, x[j], y[j]);
        concordant += crit[j].weight * concordance_from_shortfall(s, crit[j].indifference, crit[j].preference);
        any_veto = any_veto || crit[j].veto.has_value();
    }
    const double c = concordant / model.weight_sum();
    if (!any_veto) return c;

    double sigma = c;
    for (std::size_t j = 0; j < crit.size(); ++j) {
        const double d = discordance_from_shortfall(shortfall(model, j, x[j], y[j]),
                                                    crit[j].preference, crit[j].veto);
        if (d > c) {
            if (d >= 1.0) return 0.0;
            sigma *= (1.0 - d) / (1.0 - c);
        }
    }
    return sigma;
}

}  // namespace detail

// c_j(a, b_h): degree to which a is at least as good as b_h on criterion j.
inline double partial_concordance(const ElectreModel& model, std::span<const double> a,
                                  std::size_t h, std::size_t j) {
    detail::check_alternative(model, a);
    detail::check_profile(model, h);
    detail::check_criterion(model, j);
    const auto& c = model.criteria()[j];
    return detail::concordance_from_shortfall(
        detail::shortfall(model, j, a[j], model.profiles().value(h, j)), c.indifference, c.preference);
}

// c_j(b_h, a), the reverse direction used by the optimistic procedure.
inline double reverse_partial_concordance(const ElectreModel& model, std::span<const double> a,
                                          std::size_t h, std::size_t j) {
    detail::check_alternative(model, a);
    detail::check_profile(model, h);
    detail::check_criterion(model, j);
    const auto& c = model.criteria()[j];
    return detail::concordance_from_shortfall(
        detail::shortfall(model, j, model.profiles().value(h, j), a[j]), c.indifference, c.preference);
}

// C(a, b_h) = sum_j w_j c_j(a, b_h) / sum_j w_j.
inline double global_concordance(const ElectreModel& model, std::span<const double> a, std::size_t h) {
    detail::check_alternative(model, a);
    detail::check_profile(model, h);
    const auto& crit = model.criteria();
    const auto b = model.profiles().profile(h);
    double acc = 0.0;
    for (std::size_t j = 0; j < crit.size(); ++j)
        acc += crit[j].weight * detail::concordance_from_shortfall(detail::shortfall(model, j, a[j], b[j]),
                                                                   crit[j].indifference, crit[j].preference);
    return acc / model.weight_sum();
}

// d_j(a, b_h); zero whenever criterion j has no veto threshold.
inline double partial_discordance(const ElectreModel& model, std::span<const double> a,
                                  std::size_t h, std::size_t j) {
    detail::check_alternative(model, a);
    detail::check_profile(model, h);
    detail::check_criterion(model, j);
    const auto& c = model.criteria()[j];
    return detail::discordance_from_shortfall(
        detail::shortfall(model, j, a[j], model.profiles().value(h, j)), c.preference, c.veto);
}

inline double reverse_partial_discordance(const ElectreModel& model, std::span<const double> a,
                                          std::size_t h, std::size_t j) {
    detail::check_alternative(model, a);
    detail::check_profile(model, h);
    detail::check_criterion(model, j);
    const auto& c = model.criteria()[j];
    return detail::discordance_from_shortfall(
        detail::shortfall(model, j, model.profiles().value(h, j), a[j]), c.preference, c.veto);
}

// Credibility sigma(x, y) that x outranks y, for any two performance vectors
// (alternatives or profiles) on the model's criteria.
inline double credibility_of(const ElectreModel& model, std::span<const double> x,
                             std::span<const double> y) {
    detail::check_alternative(model, x);
    detail::check_alternative(model, y);
    return detail::credibility_unchecked(model, x, y);
}

// sigma(a, b_h).
inline double credibility(const ElectreModel& model, std::span<const double> a, std::size_t h) {
    detail::check_alternative(model, a);
    detail::check_profile(model, h);
    return detail::credibility_unchecked(model, a, model.profiles().profile(h));
}

// sigma(b_h, a).
inline double reverse_credibility(const ElectreModel& model, std::span<const double> a, std::size_t h) {
    detail::check_alternative(model, a);
    detail::check_profile(model, h);
    return detail::credibility_unchecked(model, model.profiles().profile(h), a);
}

// Ties at the cut outrank: sigma == lambda counts.
inline bool outranks(const ElectreModel& model, double sigma) { return sigma >= model.lambda(); }

inline bool outranks(const ElectreModel& model, std::span<const double> x, std::span<const double> y) {
    return outranks(model, credibility_of(model, x, y));
}

inline Category assign_pessimistic(const ElectreModel& model, std::span<const double> a) {
    detail::check_alternative(model, a);
    for (std::size_t h = model.profile_count(); h-- > 0;) {
        if (outranks(model, detail::credibility_unchecked(model, a, model.profiles().profile(h))))
            return Category{static_cast<int>(h) + 2};
    }
    return Category{1};
}

inline Category assign_optimistic(const ElectreModel& model, std::span<const double> a) {
    detail::check_alternative(model, a);
    for (std::size_t h = 0; h < model.profile_count(); ++h) {
        const auto b = model.profiles().profile(h);
        const bool b_over_a = outranks(model, detail::credibility_unchecked(model, b, a));
        if (b_over_a && !outranks(model, detail::credibility_unchecked(model, a, b)))
            return Category{static_cast<int>(h) + 1};
    }
    return Category{static_cast<int>(model.category_count())};
}

inline Category assign(const ElectreModel& model, std::span<const double> a, Procedure procedure) {
    return procedure == Procedure::pessimistic ? assign_pessimistic(model, a)
                                               : assign_optimistic(model, a);
}

// sigma(a, b_h) for every profile, in profile order.
inline std::vector<double> credibilities(const ElectreModel& model, std::span<const double> a) {
    detail::check_alternative(model, a);
    std::vector<double> out(model.profile_count());
    for (std::size_t h = 0; h < out.size(); ++h)
        out[h] = detail::credibility_unchecked(model, a, model.profiles().profile(h));
    return out;
}

}  // namespace elink
