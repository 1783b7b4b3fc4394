#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reprank/errors.hpp"

namespace reprank {

enum class SpammerLabel : std::uint8_t {
    Honest,
    RandomSpammer, // uniform random allowable ratings
    PushMax,       // always the maximum allowable rating
    PushMin,       // always the minimum allowable rating
};

inline bool is_spammer(SpammerLabel label) { return label != SpammerLabel::Honest; }

inline std::string to_string(SpammerLabel label) {
    switch (label) {
    case SpammerLabel::Honest: return "honest";
    case SpammerLabel::RandomSpammer: return "random";
    case SpammerLabel::PushMax: return "push_max";
    case SpammerLabel::PushMin: return "push_min";
    }
    throw Error("unknown spammer label");
}

inline SpammerLabel parse_spammer_label(const std::string& text) {
    if (text == "honest") return SpammerLabel::Honest;
    if (text == "random") return SpammerLabel::RandomSpammer;
    if (text == "push_max") return SpammerLabel::PushMax;
    if (text == "push_min") return SpammerLabel::PushMin;
    throw ParseError("unknown spammer label '" + text + "'");
}

/// What the synthetic generator knows and real data never does: each object's
/// intrinsic quality, each user's error magnitude, and who the spammers are.
struct GroundTruth {
    std::vector<double> true_quality;    // Q per object
    std::vector<double> error_magnitude; // sigma per user (drawn for spammers too, unused)
    std::vector<SpammerLabel> labels;    // per user

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

} // namespace reprank
