#pragma once

// The three ranking engines over a bipartite rating table.
//
//   Mean: object quality is the plain average of its ratings; every user
//   carries the same weight. One pass, no iteration.
//
//   IterativeRefinement: user reputation is a decreasing power of the mean
//   squared difference between the user's ratings and the current quality
//   estimates, Cu_i = (d_i + eps)^(-beta).
//
//   CorrelationBased: user reputation is the non-negative part of the Pearson
//   correlation between the user's rating vector and the quality estimates of
//   the objects the user rated.
//
// Both iterative engines start from degree-based reputations Cu_i = ku_i/|O|
// and alternate a reputation-weighted quality update with their reputation
// rule until the mean squared change of the quality vector drops below delta.
// All reductions run in ascending id order, so a run is bit-reproducible.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "reprank/errors.hpp"
#include "reprank/rating_table.hpp"

namespace reprank {

enum class Algorithm {
    Mean,
    IterativeRefinement,
    CorrelationBased,
};

inline std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::Mean: return "mean";
    case Algorithm::IterativeRefinement: return "ir";
    case Algorithm::CorrelationBased: return "corr";
    }
    throw Error("unknown algorithm");
}

inline Algorithm parse_algorithm(const std::string& text) {
    if (text == "mean") return Algorithm::Mean;
    if (text == "ir") return Algorithm::IterativeRefinement;
    if (text == "corr") return Algorithm::CorrelationBased;
    throw ParseError("unknown algorithm '" + text + "' (expected mean|ir|corr)");
}

enum class ReputationInit {
    DegreeBased, // Cu_i = ku_i / |O|
    Uniform,     // Cu_i = 1
};

struct EngineConfig {
    Algorithm algorithm = Algorithm::CorrelationBased;
    double delta = 1e-6;               // convergence threshold on the quality change
    std::size_t max_iterations = 1000;
    double ir_exponent = 1.0;          // beta in Cu = (d + eps)^(-beta)
    double ir_epsilon = 1e-8;          // divide-by-zero guard
    ReputationInit init = ReputationInit::DegreeBased;

    void validate() const {
        if (!(delta > 0.0))
            throw RangeError("delta must be > 0");
        if (max_iterations < 1)
            throw RangeError("max_iterations must be >= 1");
        if (!(ir_exponent > 0.0))
            throw RangeError("ir_exponent must be > 0");
        if (!(ir_epsilon > 0.0))
            throw RangeError("ir_epsilon must be > 0");
    }
};

struct RankResult {
    std::vector<double> quality;    // Qo per object
    std::vector<double> reputation; // Cu per user, consistent with `quality`
    std::size_t iterations = 0;     // quality updates performed
    bool converged = false;
    double final_change = std::numeric_limits<double>::infinity();
};

namespace detail {

inline void require_reputation(const RatingTable& table, std::span<const double> reputation) {
    if (reputation.size() != table.n_users())
        throw DimensionError("reputation length " + std::to_string(reputation.size()) +
                             " does not match n_users " + std::to_string(table.n_users()));
    for (double c : reputation)
        if (!(c >= 0.0) || !std::isfinite(c))
            throw NumericError("reputation entries must be finite and >= 0");
}

inline void require_quality(const RatingTable& table, std::span<const double> quality) {
    if (quality.size() != table.n_objects())
        throw DimensionError("quality length " + std::to_string(quality.size()) +
                             " does not match n_objects " + std::to_string(table.n_objects()));
}

} // namespace detail

/// Degree-based starting reputations, Cu_i = ku_i / |O|.
inline std::vector<double> initial_reputation(const RatingTable& table) {
    if (table.n_objects() == 0)
        throw DegenerateError("initial reputation undefined with zero objects");
    std::vector<double> cu(table.n_users());
    const double n_objects = static_cast<double>(table.n_objects());
    for (UserId u = 0; u < table.n_users(); ++u)
        cu[u] = static_cast<double>(table.user_degree(u)) / n_objects;
    return cu;
}

/// Reputation-weighted quality, Qo_a = sum(Cu_i r_ia) / sum(Cu_i) over U_a.
/// An object whose raters all have zero reputation falls back to the plain
/// mean of its ratings.
inline std::vector<double> quality_update(const RatingTable& table,
                                          std::span<const double> reputation) {
    detail::require_reputation(table, reputation);
    std::vector<double> quality(table.n_objects());
    for (ObjectId o = 0; o < table.n_objects(); ++o) {
        const auto ratings = table.ratings_of_object(o);
        if (ratings.empty())
            throw IsolatedError("object " + std::to_string(o) + " has no ratings");
        double num = 0.0;
        double den = 0.0;
        for (const auto& entry : ratings) {
            num += reputation[entry.user] * entry.value;
            den += reputation[entry.user];
        }
        if (den > 0.0) {
            quality[o] = num / den;
        } else {
            double sum = 0.0;
            for (const auto& entry : ratings)
                sum += entry.value;
            quality[o] = sum / static_cast<double>(ratings.size());
        }
        if (!std::isfinite(quality[o]))
            throw NumericError("non-finite quality for object " + std::to_string(o));
    }
    return quality;
}

/// Pearson correlation between a user's rating vector and the quality
/// estimates of the rated objects, population normalization. Degenerate
/// vectors (single rating, or either side constant) correlate to exactly 0.
inline double user_correlation(const RatingTable& table, std::span<const double> quality,
                               UserId user) {
    detail::require_quality(table, quality);
    const auto ratings = table.ratings_by_user(user);
    if (ratings.empty())
        throw IsolatedError("user " + std::to_string(user) + " has no ratings");
    const std::size_t k = ratings.size();
    if (k == 1)
        return 0.0;

    bool const_r = true;
    bool const_q = true;
    for (const auto& entry : ratings) {
        const_r = const_r && entry.value == ratings.front().value;
        const_q = const_q && quality[entry.object] == quality[ratings.front().object];
    }
    if (const_r || const_q)
        return 0.0;

    double mean_r = 0.0;
    double mean_q = 0.0;
    for (const auto& entry : ratings) {
        mean_r += entry.value;
        mean_q += quality[entry.object];
    }
    mean_r /= static_cast<double>(k);
    mean_q /= static_cast<double>(k);

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& entry : ratings) {
        const double dr = entry.value - mean_r;
        const double dq = quality[entry.object] - mean_q;
        sxx += dr * dr;
        syy += dq * dq;
        sxy += dr * dq;
    }
    if (sxx == 0.0 || syy == 0.0)
        return 0.0;
    const double corr = (sxy / std::sqrt(sxx)) / std::sqrt(syy);
    if (!std::isfinite(corr))
        throw NumericError("non-finite correlation for user " + std::to_string(user));
    return std::clamp(corr, -1.0, 1.0);
}

/// Reputation from correlation: the positive part.
inline double clamp_reputation(double corr) {
    return corr >= 0.0 ? corr : 0.0;
}

inline std::vector<double> correlation_reputation_update(const RatingTable& table,
                                                         std::span<const double> quality) {
    std::vector<double> cu(table.n_users());
    for (UserId u = 0; u < table.n_users(); ++u)
        cu[u] = clamp_reputation(user_correlation(table, quality, u));
    return cu;
}

/// IR reputation law, Cu_i = (d_i + epsilon)^(-exponent) with d_i the mean
/// squared difference between the user's ratings and the current qualities.
inline std::vector<double> ir_reputation_update(const RatingTable& table,
                                                std::span<const double> quality,
                                                double exponent, double epsilon) {
    detail::require_quality(table, quality);
    std::vector<double> cu(table.n_users());
    for (UserId u = 0; u < table.n_users(); ++u) {
        const auto ratings = table.ratings_by_user(u);
        if (ratings.empty())
            throw IsolatedError("user " + std::to_string(u) + " has no ratings");
        double d = 0.0;
        for (const auto& entry : ratings) {
            const double diff = entry.value - quality[entry.object];
            d += diff * diff;
        }
        d /= static_cast<double>(ratings.size());
        cu[u] = std::pow(d + epsilon, -exponent);
        if (!std::isfinite(cu[u]))
            throw NumericError("non-finite IR reputation for user " + std::to_string(u));
    }
    return cu;
}

/// Mean squared difference between consecutive quality vectors.
inline double convergence_change(std::span<const double> prev, std::span<const double> next) {
    if (prev.size() != next.size())
        throw DimensionError("quality vectors of different length: " +
                             std::to_string(prev.size()) + " vs " + std::to_string(next.size()));
    if (prev.empty())
        throw DegenerateError("convergence change undefined for empty vectors");
    double sum = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        const double diff = prev[i] - next[i];
        sum += diff * diff;
    }
    return sum / static_cast<double>(prev.size());
}

/// Runs the configured engine. Requires a table with no isolated users or
/// objects; prune those first (see filter_min_degree). Non-convergence within
/// max_iterations is reported through the result, not thrown.
inline RankResult run(const RatingTable& table, const EngineConfig& config) {
    config.validate();
    for (ObjectId o = 0; o < table.n_objects(); ++o)
        if (table.object_degree(o) == 0)
            throw IsolatedError("object " + std::to_string(o) + " has no ratings");
    for (UserId u = 0; u < table.n_users(); ++u)
        if (table.user_degree(u) == 0)
            throw IsolatedError("user " + std::to_string(u) + " has no ratings");

    RankResult result;
    if (config.algorithm == Algorithm::Mean) {
        std::vector<double> uniform(table.n_users(), 1.0);
        result.quality = quality_update(table, uniform);
        result.reputation = std::move(uniform);
        result.iterations = 1;
        result.converged = true;
        result.final_change = 0.0;
        return result;
    }

    std::vector<double> cu = config.init == ReputationInit::DegreeBased
                                 ? initial_reputation(table)
                                 : std::vector<double>(table.n_users(), 1.0);
    std::vector<double> quality;
    for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
        std::vector<double> next = quality_update(table, cu);
        double change = std::numeric_limits<double>::infinity();
        if (iter > 1)
            change = convergence_change(quality, next);
        quality = std::move(next);
        cu = config.algorithm == Algorithm::IterativeRefinement
                 ? ir_reputation_update(table, quality, config.ir_exponent, config.ir_epsilon)
                 : correlation_reputation_update(table, quality);
        result.iterations = iter;
        result.final_change = change;
        if (change < config.delta) {
            result.converged = true;
            break;
        }
    }
    result.quality = std::move(quality);
    result.reputation = std::move(cu);
    return result;
}

} // namespace reprank
