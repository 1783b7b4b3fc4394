#pragma once

// Synthetic rating data with known ground truth. Object qualities and user
// error magnitudes are drawn uniformly; ratings arrive one per time step on a
// user-object pair picked by preferential attachment (probability
// proportional to degree + 1 on each side, drawn independently; already-rated
// pairs are rejected and the whole pair redrawn). Honest users rate
// Q + N(0, sigma_i) truncated to the scale; spammers substitute their rating
// rule but attach exactly like honest users.
//
// All randomness flows from the seed in a pinned order (object qualities,
// user error magnitudes, spam labels and polarities, then per-step draws),
// so a config reproduces its output bit for bit.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reprank/errors.hpp"
#include "reprank/ground_truth.hpp"
#include "reprank/rating_table.hpp"
#include "reprank/rng.hpp"

namespace reprank {

enum class SpamKind {
    RandomRating, // uniform allowable ratings
    PushRating,   // constant maximum or minimum, polarity per spammer
};

inline std::string to_string(SpamKind kind) {
    return kind == SpamKind::RandomRating ? "random" : "push";
}

inline SpamKind parse_spam_kind(const std::string& text) {
    if (text == "random") return SpamKind::RandomRating;
    if (text == "push") return SpamKind::PushRating;
    throw ParseError("unknown spam kind '" + text + "' (expected random|push)");
}

struct SpamConfig {
    double ratio = 0.0; // fraction of users turned into spammers
    SpamKind kind = SpamKind::RandomRating;

    void validate() const {
        if (!(ratio >= 0.0 && ratio <= 1.0))
            throw RangeError("spam ratio must lie in [0, 1]");
    }
};

struct GeneratorConfig {
    std::size_t n_users = 6000;
    std::size_t n_objects = 4000;
    double sparsity = 0.02;
    double sigma_min = 0.1;
    double sigma_max = 0.5;
    RatingScale scale{0.0, 1.0, false};
    std::uint64_t seed = 1;

    void validate() const {
        if (n_users == 0 || n_objects == 0)
            throw DegenerateError("generator needs at least one user and one object");
        if (!(sparsity > 0.0))
            throw RangeError("sparsity must be > 0");
        if (sparsity > 1.0)
            throw InfeasibleError("sparsity " + std::to_string(sparsity) +
                                  " exceeds 1: more ratings than user-object pairs");
        if (!(sigma_min >= 0.0) || !(sigma_max >= sigma_min))
            throw RangeError("error magnitudes require 0 <= sigma_min <= sigma_max");
        scale.validate();
    }

    std::size_t target_ratings() const {
        const double pairs = static_cast<double>(n_users) * static_cast<double>(n_objects);
        return static_cast<std::size_t>(std::llround(sparsity * pairs));
    }
};

struct SyntheticData {
    RatingTable table;
    GroundTruth truth;
};

namespace detail {

inline double spammer_rating(SpammerLabel label, const RatingScale& scale, Rng& rng) {
    switch (label) {
    case SpammerLabel::RandomSpammer:
        if (scale.discrete) {
            const auto span = static_cast<std::uint64_t>(scale.max - scale.min);
            return scale.min + static_cast<double>(rng.below(span + 1));
        }
        return rng.uniform(scale.min, scale.max);
    case SpammerLabel::PushMax:
        return scale.max;
    case SpammerLabel::PushMin:
        return scale.min;
    case SpammerLabel::Honest:
        break;
    }
    throw Error("spammer_rating called for an honest user");
}

inline double honest_rating(double quality, double sigma, const RatingScale& scale, Rng& rng) {
    double r = quality + rng.normal(0.0, sigma);
    r = std::clamp(r, scale.min, scale.max); // out-of-range ratings are truncated
    if (scale.discrete)
        r = std::nearbyint(r);
    return r;
}

} // namespace detail

inline SyntheticData generate(const GeneratorConfig& config,
                              const std::optional<SpamConfig>& spam = std::nullopt) {
    config.validate();
    if (spam)
        spam->validate();
    const std::size_t target = config.target_ratings();
    const std::size_t capacity = config.n_users * config.n_objects;
    if (target > capacity)
        throw InfeasibleError("target of " + std::to_string(target) +
                              " ratings exceeds " + std::to_string(capacity) + " pairs");

    Rng rng(config.seed);
    GroundTruth truth;
    truth.true_quality.resize(config.n_objects);
    for (double& q : truth.true_quality)
        q = rng.uniform(config.scale.min, config.scale.max);
    truth.error_magnitude.resize(config.n_users);
    for (double& sigma : truth.error_magnitude)
        sigma = rng.uniform(config.sigma_min, config.sigma_max);

    truth.labels.assign(config.n_users, SpammerLabel::Honest);
    if (spam && spam->ratio > 0.0) {
        const auto n_spammers = static_cast<std::size_t>(
            spam->ratio * static_cast<double>(config.n_users) + 1e-9);
        std::vector<UserId> pool(config.n_users);
        for (std::size_t i = 0; i < pool.size(); ++i)
            pool[i] = static_cast<UserId>(i);
        for (std::size_t i = 0; i < n_spammers; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
            truth.labels[pool[i]] =
                spam->kind == SpamKind::RandomRating
                    ? SpammerLabel::RandomSpammer
                    : (rng.coin() ? SpammerLabel::PushMax : SpammerLabel::PushMin);
        }
    }

    RatingTable table(config.n_users, config.n_objects, config.scale);
    detail::FenwickTree user_weight(config.n_users);
    detail::FenwickTree object_weight(config.n_objects);
    for (std::size_t i = 0; i < config.n_users; ++i)
        user_weight.add(i, 1); // degree + 1, all degrees start at zero
    for (std::size_t i = 0; i < config.n_objects; ++i)
        object_weight.add(i, 1);

    for (std::size_t step = 0; step < target; ++step) {
        UserId user;
        ObjectId object;
        do {
            user = static_cast<UserId>(user_weight.sample(rng));
            object = static_cast<ObjectId>(object_weight.sample(rng));
        } while (table.has_rating(user, object));

        const SpammerLabel label = truth.labels[user];
        const double rating =
            label == SpammerLabel::Honest
                ? detail::honest_rating(truth.true_quality[object],
                                        truth.error_magnitude[user], config.scale, rng)
                : detail::spammer_rating(label, config.scale, rng);
        table.add_rating(user, object, rating);
        user_weight.add(user, 1);
        object_weight.add(object, 1);
    }
    return SyntheticData{std::move(table), std::move(truth)};
}

struct DegreeHistograms {
    std::map<std::size_t, std::size_t> user;   // ku -> how many users
    std::map<std::size_t, std::size_t> object; // ko -> how many objects
};

inline DegreeHistograms degree_distribution(const RatingTable& table) {
    if (table.n_ratings() == 0)
        throw DegenerateError("degree distribution of an empty table");
    DegreeHistograms hist;
    for (UserId u = 0; u < table.n_users(); ++u)
        ++hist.user[table.user_degree(u)];
    for (ObjectId o = 0; o < table.n_objects(); ++o)
        ++hist.object[table.object_degree(o)];
    return hist;
}

} // namespace reprank
