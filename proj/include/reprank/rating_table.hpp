#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reprank/errors.hpp"

namespace reprank {

using UserId = std::uint32_t;
using ObjectId = std::uint32_t;

/// Allowable rating values: a closed interval, optionally restricted to integers.
struct RatingScale {
    double min = 0.0;
    double max = 1.0;
    bool discrete = false;

    void validate() const {
        if (!(min < max))
            throw RangeError("rating scale requires min < max, got [" +
                             std::to_string(min) + ", " + std::to_string(max) + "]");
        if (discrete && (std::floor(min) != min || std::floor(max) != max))
            throw RangeError("discrete rating scale requires integer bounds");
    }

    bool contains(double value) const {
        if (!(value >= min && value <= max))
            return false;
        return !discrete || std::floor(value) == value;
    }

    friend bool operator==(const RatingScale&, const RatingScale&) = default;
};

struct ObjectRating {
    ObjectId object;
    double value;
    friend bool operator==(const ObjectRating&, const ObjectRating&) = default;
};

struct UserRating {
    UserId user;
    double value;
    friend bool operator==(const UserRating&, const UserRating&) = default;
};

/// Sparse bipartite rating store. Both adjacency sides are kept sorted by id,
/// so iteration order (and thus every reduction over ratings) is deterministic
/// and duplicate detection is a binary search. Construction is single-writer;
/// afterwards the table is immutable and safe to share across threads.
class RatingTable {
public:
    // Empty table on the unit scale; useful as a placeholder before loading.
    RatingTable() : RatingTable(0, 0, RatingScale{}) {}

    RatingTable(std::size_t n_users, std::size_t n_objects, RatingScale scale)
        : n_users_(n_users), n_objects_(n_objects), scale_(scale),
          by_user_(n_users), by_object_(n_objects) {
        scale_.validate();
    }

    std::size_t n_users() const { return n_users_; }
    std::size_t n_objects() const { return n_objects_; }
    std::size_t n_ratings() const { return n_ratings_; }
    const RatingScale& scale() const { return scale_; }

    void add_rating(UserId user, ObjectId object, double value) {
        if (user >= n_users_)
            throw IndexError("user id " + std::to_string(user) + " out of range (n_users=" +
                             std::to_string(n_users_) + ")");
        if (object >= n_objects_)
            throw IndexError("object id " + std::to_string(object) + " out of range (n_objects=" +
                             std::to_string(n_objects_) + ")");
        if (!scale_.contains(value))
            throw RangeError("rating " + std::to_string(value) + " for user " +
                             std::to_string(user) + ", object " + std::to_string(object) +
                             " outside scale [" + std::to_string(scale_.min) + ", " +
                             std::to_string(scale_.max) + "]" +
                             (scale_.discrete ? " (discrete)" : ""));

        auto& row = by_user_[user];
        auto it = std::lower_bound(row.begin(), row.end(), object,
                                   [](const ObjectRating& e, ObjectId o) { return e.object < o; });
        if (it != row.end() && it->object == object)
            throw DuplicateRatingError("duplicate rating for user " + std::to_string(user) +
                                       ", object " + std::to_string(object));
        row.insert(it, ObjectRating{object, value});

        auto& col = by_object_[object];
        auto jt = std::lower_bound(col.begin(), col.end(), user,
                                   [](const UserRating& e, UserId u) { return e.user < u; });
        col.insert(jt, UserRating{user, value});
        ++n_ratings_;
    }

    bool has_rating(UserId user, ObjectId object) const {
        if (user >= n_users_ || object >= n_objects_)
            return false;
        const auto& row = by_user_[user];
        auto it = std::lower_bound(row.begin(), row.end(), object,
                                   [](const ObjectRating& e, ObjectId o) { return e.object < o; });
        return it != row.end() && it->object == object;
    }

    std::optional<double> find_rating(UserId user, ObjectId object) const {
        if (user >= n_users_ || object >= n_objects_)
            return std::nullopt;
        const auto& row = by_user_[user];
        auto it = std::lower_bound(row.begin(), row.end(), object,
                                   [](const ObjectRating& e, ObjectId o) { return e.object < o; });
        if (it != row.end() && it->object == object)
            return it->value;
        return std::nullopt;
    }

    /// ku_i: number of ratings given by this user.
    std::size_t user_degree(UserId user) const {
        check_user(user);
        return by_user_[user].size();
    }

    /// ko_a: number of ratings received by this object.
    std::size_t object_degree(ObjectId object) const {
        check_object(object);
        return by_object_[object].size();
    }

    /// O_i with values, ascending object id.
    std::span<const ObjectRating> ratings_by_user(UserId user) const {
        check_user(user);
        return by_user_[user];
    }

    /// U_a with values, ascending user id.
    std::span<const UserRating> ratings_of_object(ObjectId object) const {
        check_object(object);
        return by_object_[object];
    }

    /// Fraction of possible (user, object) pairs that carry a rating.
    double sparsity() const {
        if (n_users_ == 0 || n_objects_ == 0)
            throw DegenerateError("sparsity undefined for a table with zero users or objects");
        return static_cast<double>(n_ratings_) /
               (static_cast<double>(n_users_) * static_cast<double>(n_objects_));
    }

    /// Visits every rating ascending by (user, object).
    template <class Fn>
    void for_each_rating(Fn&& fn) const {
        for (UserId u = 0; u < n_users_; ++u)
            for (const auto& e : by_user_[u])
                fn(u, e.object, e.value);
    }

    friend bool operator==(const RatingTable&, const RatingTable&) = default;

private:
    void check_user(UserId user) const {
        if (user >= n_users_)
            throw IndexError("user id " + std::to_string(user) + " out of range");
    }
    void check_object(ObjectId object) const {
        if (object >= n_objects_)
            throw IndexError("object id " + std::to_string(object) + " out of range");
    }

    std::size_t n_users_ = 0;
    std::size_t n_objects_ = 0;
    std::size_t n_ratings_ = 0;
    RatingScale scale_;
    std::vector<std::vector<ObjectRating>> by_user_;
    std::vector<std::vector<UserRating>> by_object_;
};

} // namespace reprank
