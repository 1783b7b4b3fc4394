#pragma once

// Dataset I/O: delimited rating triples and MovieLens-style files in, with
// external ids densified in first-occurrence order; the ground-truth sidecar
// written by the generator; benchmark object lists. Plus the degree filter
// used to subsample real data and to prune isolated nodes before ranking.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reprank/errors.hpp"
#include "reprank/format.hpp"
#include "reprank/ground_truth.hpp"
#include "reprank/rating_table.hpp"

namespace reprank {

enum class RatingsFormat {
    DelimitedTriples,      // user,object,rating[,ignored...]
    MovieLensDoubleColon,  // user::object::rating::timestamp
};

inline RatingsFormat parse_ratings_format(const std::string& text) {
    if (text == "triples") return RatingsFormat::DelimitedTriples;
    if (text == "movielens") return RatingsFormat::MovieLensDoubleColon;
    throw ParseError("unknown ratings format '" + text + "' (expected triples|movielens)");
}

struct DatasetManifest {
    std::size_t n_users = 0;
    std::size_t n_objects = 0;
    std::size_t n_ratings = 0;
    double mean_user_degree = 0.0;
    double mean_object_degree = 0.0;
    double sparsity = 0.0;
    RatingScale scale;
    std::vector<std::int64_t> user_ids;   // dense -> external
    std::vector<std::int64_t> object_ids; // dense -> external
    std::unordered_map<std::int64_t, UserId> user_index;     // external -> dense
    std::unordered_map<std::int64_t, ObjectId> object_index; // external -> dense

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct LoadedDataset {
    RatingTable table;
    DatasetManifest manifest;
};

namespace detail {

inline std::string location(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

inline std::int64_t parse_id(std::string_view field, const std::filesystem::path& path,
                             std::size_t line) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || value < 0)
        throw ParseError(location(path, line) + ": expected a non-negative integer id, got '" +
                         std::string(field) + "'");
    return value;
}

inline double parse_rating_value(std::string_view field, const std::filesystem::path& path,
                                 std::size_t line) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError(location(path, line) + ": expected a rating value, got '" +
                         std::string(field) + "'");
    return value;
}

inline std::vector<std::string_view> split(std::string_view text, std::string_view sep) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = text.find(sep, pos);
        if (next == std::string_view::npos) {
            fields.push_back(text.substr(pos));
            return fields;
        }
        fields.push_back(text.substr(pos, next - pos));
        pos = next + sep.size();
    }
}

inline bool skippable_line(std::string_view line) {
    return line.empty() || line.front() == '#';
}

inline void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
}

struct RatingRecord {
    std::int64_t user;
    std::int64_t object;
    double value;
    std::uint32_t line;
};

} // namespace detail

/// Loads a ratings file, densifying external ids in ascending order. Sorted
/// assignment makes densification idempotent, so a table serialized with
/// write_ratings reloads with identical indices. `#`-prefixed comment lines
/// and blank lines are skipped; fields past the rating are ignored. Duplicate
/// (user, object) records, malformed lines and out-of-scale ratings fail with
/// the offending line in the message.
inline LoadedDataset load_ratings(const std::filesystem::path& path, RatingsFormat format,
                                  RatingScale scale, char delimiter = ',') {
    scale.validate();
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open ratings file " + path.string());

    const std::string sep = format == RatingsFormat::MovieLensDoubleColon
                                ? std::string("::")
                                : std::string(1, delimiter);
    DatasetManifest manifest;
    manifest.scale = scale;
    std::vector<detail::RatingRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp(line);
        if (detail::skippable_line(line))
            continue;
        const auto fields = detail::split(line, sep);
        if (fields.size() < 3)
            throw ParseError(detail::location(path, line_no) + ": expected user" + sep +
                             "object" + sep + "rating, got '" + line + "'");
        detail::RatingRecord rec;
        rec.user = detail::parse_id(fields[0], path, line_no);
        rec.object = detail::parse_id(fields[1], path, line_no);
        rec.value = detail::parse_rating_value(fields[2], path, line_no);
        rec.line = static_cast<std::uint32_t>(line_no);
        if (!scale.contains(rec.value))
            throw RangeError(detail::location(path, line_no) + ": rating " +
                             detail::format_double(rec.value) + " outside scale [" +
                             detail::format_double(scale.min) + ", " +
                             detail::format_double(scale.max) + "]" +
                             (scale.discrete ? " (discrete)" : ""));
        records.push_back(rec);
    }
    if (in.bad())
        throw IoError("i/o failure while reading " + path.string());
    if (records.empty())
        throw DegenerateError(path.string() + ": empty dataset");

    for (const auto& rec : records) {
        manifest.user_ids.push_back(rec.user);
        manifest.object_ids.push_back(rec.object);
    }
    for (auto* ids : {&manifest.user_ids, &manifest.object_ids}) {
        std::sort(ids->begin(), ids->end());
        ids->erase(std::unique(ids->begin(), ids->end()), ids->end());
    }
    for (std::size_t i = 0; i < manifest.user_ids.size(); ++i)
        manifest.user_index.emplace(manifest.user_ids[i], static_cast<UserId>(i));
    for (std::size_t i = 0; i < manifest.object_ids.size(); ++i)
        manifest.object_index.emplace(manifest.object_ids[i], static_cast<ObjectId>(i));

    RatingTable table(manifest.user_ids.size(), manifest.object_ids.size(), scale);
    for (const auto& rec : records) {
        const UserId u = manifest.user_index.at(rec.user);
        const ObjectId o = manifest.object_index.at(rec.object);
        if (table.has_rating(u, o))
            throw DuplicateRatingError(detail::location(path, rec.line) +
                                       ": duplicate rating for user " + std::to_string(rec.user) +
                                       ", object " + std::to_string(rec.object));
        table.add_rating(u, o, rec.value);
    }

    manifest.n_users = table.n_users();
    manifest.n_objects = table.n_objects();
    manifest.n_ratings = table.n_ratings();
    manifest.mean_user_degree =
        static_cast<double>(table.n_ratings()) / static_cast<double>(table.n_users());
    manifest.mean_object_degree =
        static_cast<double>(table.n_ratings()) / static_cast<double>(table.n_objects());
    manifest.sparsity = table.sparsity();
    return LoadedDataset{std::move(table), std::move(manifest)};
}

struct FilterResult {
    RatingTable table;
    std::vector<UserId> kept_users;     // new dense -> old dense
    std::vector<ObjectId> kept_objects; // new dense -> old dense
};

/// Drops users below the degree threshold, then objects left with no ratings,
/// and re-indexes densely. Removing zero-degree objects cannot lower a kept
/// user's degree, so one pass suffices.
inline FilterResult filter_min_degree(const RatingTable& table, std::size_t min_user_degree) {
    std::vector<UserId> kept_users;
    for (UserId u = 0; u < table.n_users(); ++u)
        if (table.user_degree(u) >= min_user_degree)
            kept_users.push_back(u);
    if (kept_users.empty())
        throw DegenerateError("degree filter >= " + std::to_string(min_user_degree) +
                              " removes every user");

    std::vector<char> object_rated(table.n_objects(), 0);
    for (UserId u : kept_users)
        for (const auto& entry : table.ratings_by_user(u))
            object_rated[entry.object] = 1;
    std::vector<ObjectId> kept_objects;
    const ObjectId no_object = static_cast<ObjectId>(table.n_objects());
    std::vector<ObjectId> object_map(table.n_objects(), no_object);
    for (ObjectId o = 0; o < table.n_objects(); ++o) {
        if (object_rated[o]) {
            object_map[o] = static_cast<ObjectId>(kept_objects.size());
            kept_objects.push_back(o);
        }
    }
    if (kept_objects.empty())
        throw DegenerateError("degree filter leaves no rated objects");

    RatingTable filtered(kept_users.size(), kept_objects.size(), table.scale());
    for (std::size_t nu = 0; nu < kept_users.size(); ++nu)
        for (const auto& entry : table.ratings_by_user(kept_users[nu]))
            filtered.add_rating(static_cast<UserId>(nu), object_map[entry.object], entry.value);
    return FilterResult{std::move(filtered), std::move(kept_users), std::move(kept_objects)};
}

struct BenchmarkSet {
    std::vector<ObjectId> objects;        // dense ids, ascending, deduplicated
    std::vector<std::int64_t> unresolved; // external ids absent from the table
};

/// Reads one external object id per line (comments and blanks skipped) and
/// resolves them to dense ids. Unresolved ids are reported, not fatal;
/// resolving none is.
inline BenchmarkSet load_benchmark(const std::filesystem::path& path,
                                   const std::unordered_map<std::int64_t, ObjectId>& object_index) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open benchmark file " + path.string());
    BenchmarkSet out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp(line);
        if (detail::skippable_line(line))
            continue;
        const std::int64_t ext = detail::parse_id(line, path, line_no);
        const auto it = object_index.find(ext);
        if (it == object_index.end())
            out.unresolved.push_back(ext);
        else
            out.objects.push_back(it->second);
    }
    if (in.bad())
        throw IoError("i/o failure while reading " + path.string());
    std::sort(out.objects.begin(), out.objects.end());
    out.objects.erase(std::unique(out.objects.begin(), out.objects.end()), out.objects.end());
    std::sort(out.unresolved.begin(), out.unresolved.end());
    out.unresolved.erase(std::unique(out.unresolved.begin(), out.unresolved.end()),
                         out.unresolved.end());
    if (out.objects.empty())
        throw DegenerateError(path.string() + ": no benchmark id resolves to a rated object");
    return out;
}

/// Writes the table as rating triples, ascending by (user, object), dense ids.
inline void write_ratings(std::ostream& out, const RatingTable& table, char delimiter = ',') {
    out << "# user" << delimiter << "object" << delimiter << "rating\n";
    table.for_each_rating([&](UserId u, ObjectId o, double value) {
        out << u << delimiter << o << delimiter << detail::format_double(value) << "\n";
    });
}

/// Same, but restoring the external ids recorded in the manifest.
inline void write_ratings(std::ostream& out, const RatingTable& table,
                          const DatasetManifest& manifest, char delimiter = ',') {
    if (manifest.user_ids.size() != table.n_users() ||
        manifest.object_ids.size() != table.n_objects())
        throw DimensionError("manifest id maps do not match the table dimensions");
    out << "# user" << delimiter << "object" << delimiter << "rating\n";
    table.for_each_rating([&](UserId u, ObjectId o, double value) {
        out << manifest.user_ids[u] << delimiter << manifest.object_ids[o] << delimiter
            << detail::format_double(value) << "\n";
    });
}

inline void write_ratings_file(const std::filesystem::path& path, const RatingTable& table,
                               char delimiter = ',') {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write ratings file " + path.string());
    write_ratings(out, table, delimiter);
    out.flush();
    if (!out)
        throw IoError("i/o failure while writing " + path.string());
}

/// Ground-truth sidecar: an [objects] section (id,Q) and a [users] section
/// (id,sigma,label), dense ids matching the generated table.
inline void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
    out << "# ground truth\n[objects]\nid,Q\n";
    for (std::size_t o = 0; o < truth.true_quality.size(); ++o)
        out << o << "," << detail::format_double(truth.true_quality[o]) << "\n";
    out << "[users]\nid,sigma,label\n";
    for (std::size_t u = 0; u < truth.error_magnitude.size(); ++u)
        out << u << "," << detail::format_double(truth.error_magnitude[u]) << ","
            << to_string(truth.labels[u]) << "\n";
}

inline void write_ground_truth_file(const std::filesystem::path& path, const GroundTruth& truth) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write ground-truth file " + path.string());
    write_ground_truth(out, truth);
    out.flush();
    if (!out)
        throw IoError("i/o failure while writing " + path.string());
}

inline GroundTruth read_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open ground-truth file " + path.string());

    enum class Section { None, Objects, Users } section = Section::None;
    std::vector<std::pair<std::int64_t, double>> objects;
    std::vector<std::tuple<std::int64_t, double, SpammerLabel>> users;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp(line);
        if (detail::skippable_line(line))
            continue;
        if (line == "[objects]") {
            section = Section::Objects;
            continue;
        }
        if (line == "[users]") {
            section = Section::Users;
            continue;
        }
        if (line == "id,Q" || line == "id,sigma,label")
            continue;
        const auto fields = detail::split(line, ",");
        if (section == Section::Objects && fields.size() == 2) {
            objects.emplace_back(detail::parse_id(fields[0], path, line_no),
                                 detail::parse_rating_value(fields[1], path, line_no));
        } else if (section == Section::Users && fields.size() == 3) {
            users.emplace_back(detail::parse_id(fields[0], path, line_no),
                               detail::parse_rating_value(fields[1], path, line_no),
                               parse_spammer_label(std::string(fields[2])));
        } else {
            throw ParseError(detail::location(path, line_no) + ": unexpected line '" + line +
                             "'");
        }
    }
    if (in.bad())
        throw IoError("i/o failure while reading " + path.string());
    if (objects.empty() || users.empty())
        throw DegenerateError(path.string() + ": ground truth is missing a section");

    GroundTruth truth;
    truth.true_quality.assign(objects.size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& [id, q] : objects) {
        if (id < 0 || static_cast<std::size_t>(id) >= objects.size() ||
            !std::isnan(truth.true_quality[static_cast<std::size_t>(id)]))
            throw ParseError(path.string() + ": object ids must be dense 0.." +
                             std::to_string(objects.size() - 1) + " without repeats");
        truth.true_quality[static_cast<std::size_t>(id)] = q;
    }
    truth.error_magnitude.assign(users.size(), std::numeric_limits<double>::quiet_NaN());
    truth.labels.assign(users.size(), SpammerLabel::Honest);
    for (const auto& [id, sigma, label] : users) {
        if (id < 0 || static_cast<std::size_t>(id) >= users.size() ||
            !std::isnan(truth.error_magnitude[static_cast<std::size_t>(id)]))
            throw ParseError(path.string() + ": user ids must be dense 0.." +
                             std::to_string(users.size() - 1) + " without repeats");
        truth.error_magnitude[static_cast<std::size_t>(id)] = sigma;
        truth.labels[static_cast<std::size_t>(id)] = label;
    }
    return truth;
}

} // namespace reprank
