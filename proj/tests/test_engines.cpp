#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "reprank/engines.hpp"
#include "reprank/ingestion.hpp"
#include "reprank/rating_table.hpp"
#include "reprank/rng.hpp"
#include "reprank/synthetic.hpp"

#include "oracles.hpp"

using namespace reprank;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Every object gets a base rater and every user a base rating, so no node is
// isolated; extras are random and skipped on collision.
RatingTable connected_table(std::uint64_t seed, std::size_t n_users, std::size_t n_objects,
                            std::size_t extras) {
    RatingTable table(n_users, n_objects, RatingScale{0.0, 1.0, false});
    Rng rng(seed);
    for (UserId u = 0; u < n_users; ++u)
        table.add_rating(u, static_cast<ObjectId>(u % n_objects), rng.uniform(0.0, 1.0));
    for (ObjectId o = 0; o < n_objects; ++o) {
        const auto u = static_cast<UserId>(o % n_users);
        if (!table.has_rating(u, o))
            table.add_rating(u, o, rng.uniform(0.0, 1.0));
    }
    for (std::size_t i = 0; i < extras; ++i) {
        const auto u = static_cast<UserId>(rng.below(n_users));
        const auto o = static_cast<ObjectId>(rng.below(n_objects));
        if (!table.has_rating(u, o))
            table.add_rating(u, o, rng.uniform(0.0, 1.0));
    }
    return table;
}

RatingTable one_object(std::vector<double> ratings, RatingScale scale = {0.0, 1.0, false}) {
    RatingTable table(ratings.size(), 1, scale);
    for (UserId u = 0; u < ratings.size(); ++u)
        table.add_rating(u, 0, ratings[u]);
    return table;
}

RatingTable one_user(std::vector<double> ratings, RatingScale scale = {0.0, 1.0, false}) {
    RatingTable table(1, ratings.size(), scale);
    for (ObjectId o = 0; o < ratings.size(); ++o)
        table.add_rating(0, o, ratings[o]);
    return table;
}

} // namespace

TEST_CASE("quality of a single-rater object equals the rating") {
    const RatingTable table = one_object({0.7});
    const std::vector<double> cu{0.3};
    const auto quality = quality_update(table, cu);
    REQUIRE_THAT(quality[0], WithinAbs(0.7, 1e-12));
}

TEST_CASE("quality is the reputation-weighted mean") {
    const RatingTable table = one_object({0.2, 0.8});
    SECTION("equal weights") {
        const auto quality = quality_update(table, std::vector<double>{1.0, 1.0});
        REQUIRE_THAT(quality[0], WithinAbs(0.5, 1e-12));
    }
    SECTION("unequal weights") {
        const auto quality = quality_update(table, std::vector<double>{3.0, 1.0});
        REQUIRE_THAT(quality[0], WithinAbs(0.35, 1e-12));
    }
    SECTION("all-zero weights fall back to the plain mean") {
        const auto quality = quality_update(table, std::vector<double>{0.0, 0.0});
        REQUIRE_THAT(quality[0], WithinAbs(0.5, 1e-12));
    }
}

TEST_CASE("quality update validates its inputs") {
    const RatingTable table = one_object({0.2, 0.8});
    REQUIRE_THROWS_AS(quality_update(table, std::vector<double>{1.0}), DimensionError);
    REQUIRE_THROWS_AS(quality_update(table, std::vector<double>{1.0, -0.5}), NumericError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(quality_update(table, std::vector<double>{1.0, nan}), NumericError);

    RatingTable with_hole(2, 2, RatingScale{0.0, 1.0, false});
    with_hole.add_rating(0, 0, 0.5);
    with_hole.add_rating(1, 0, 0.5);
    REQUIRE_THROWS_MATCHES(quality_update(with_hole, std::vector<double>{1.0, 1.0}),
                           IsolatedError, MessageMatches(ContainsSubstring("object 1")));
}

TEST_CASE("correlation of a perfectly linear pair is 1") {
    const RatingTable table = one_user({0.1, 0.5, 0.9});
    const std::vector<double> quality{0.2, 0.6, 1.0};
    REQUIRE_THAT(user_correlation(table, quality, 0), WithinAbs(1.0, 1e-12));
}

TEST_CASE("constant vectors correlate to exactly zero") {
    SECTION("constant ratings") {
        const RatingTable table = one_user({0.5, 0.5, 0.5});
        const std::vector<double> quality{0.1, 0.6, 0.9};
        REQUIRE(user_correlation(table, quality, 0) == 0.0);
    }
    SECTION("constant qualities") {
        const RatingTable table = one_user({0.1, 0.6, 0.9});
        const std::vector<double> quality{0.4, 0.4, 0.4};
        REQUIRE(user_correlation(table, quality, 0) == 0.0);
    }
    SECTION("single rating") {
        const RatingTable table = one_user({0.8});
        const std::vector<double> quality{0.2};
        REQUIRE(user_correlation(table, quality, 0) == 0.0);
    }
}

TEST_CASE("anti-aligned ratings correlate to -1") {
    const RatingTable table = one_user({0.0, 1.0});
    const std::vector<double> quality{1.0, 0.0};
    REQUIRE_THAT(user_correlation(table, quality, 0), WithinAbs(-1.0, 1e-12));
}

TEST_CASE("correlation validates its inputs") {
    RatingTable table(2, 2, RatingScale{0.0, 1.0, false});
    table.add_rating(0, 0, 0.1);
    table.add_rating(0, 1, 0.9);
    const std::vector<double> quality{0.3, 0.7};
    REQUIRE_THROWS_MATCHES(user_correlation(table, quality, 1), IsolatedError,
                           MessageMatches(ContainsSubstring("user 1")));
    REQUIRE_THROWS_AS(user_correlation(table, std::vector<double>{0.3}, 0), DimensionError);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(user_correlation(table, std::vector<double>{nan, 0.7}, 0), NumericError);
}

TEST_CASE("reputation keeps only the positive part of the correlation") {
    REQUIRE(clamp_reputation(0.73) == 0.73);
    REQUIRE(clamp_reputation(-0.4) == 0.0);
    REQUIRE(clamp_reputation(0.0) == 0.0);
    REQUIRE(clamp_reputation(-1.0) == 0.0);
    REQUIRE(clamp_reputation(1.0) == 1.0);
}

TEST_CASE("initial reputation is the rated fraction of the catalogue") {
    SECTION("40 of 4000 objects") {
        RatingTable table(2, 4000, RatingScale{0.0, 1.0, false});
        for (ObjectId o = 0; o < 40; ++o)
            table.add_rating(0, o, 0.5);
        const auto cu = initial_reputation(table);
        REQUIRE(cu[0] == 0.01);
        REQUIRE(cu[1] == 0.0);
    }
    SECTION("everyone rates everything") {
        RatingTable table(3, 4, RatingScale{0.0, 1.0, false});
        for (UserId u = 0; u < 3; ++u)
            for (ObjectId o = 0; o < 4; ++o)
                table.add_rating(u, o, 0.5);
        for (double c : initial_reputation(table))
            REQUIRE(c == 1.0);
    }
    SECTION("no objects") {
        REQUIRE_THROWS_AS(initial_reputation(RatingTable(3, 0, RatingScale{})),
                          DegenerateError);
    }
}

TEST_CASE("convergence change is the mean squared difference") {
    const std::vector<double> a{0.0, 0.0};
    REQUIRE(convergence_change(a, a) == 0.0);
    REQUIRE_THAT(convergence_change(a, std::vector<double>{0.1, 0.3}),
                 WithinAbs(0.05, 1e-15));
    REQUIRE_THROWS_AS(convergence_change(a, std::vector<double>{0.1}), DimensionError);
    REQUIRE_THROWS_AS(convergence_change(std::vector<double>{}, std::vector<double>{}),
                      DegenerateError);

    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(8), y(8);
        for (std::size_t i = 0; i < 8; ++i) {
            x[i] = rng.uniform(-1.0, 1.0);
            y[i] = rng.uniform(-1.0, 1.0);
        }
        REQUIRE(convergence_change(x, y) >= 0.0);
        REQUIRE(convergence_change(x, y) == convergence_change(y, x));
    }
}

TEST_CASE("refinement weights decay with the squared error") {
    RatingTable table(2, 2, RatingScale{0.0, 1.0, false});
    table.add_rating(0, 0, 0.5);
    table.add_rating(0, 1, 0.5);
    table.add_rating(1, 0, 0.7);
    table.add_rating(1, 1, 0.3);
    const std::vector<double> quality{0.5, 0.5};
    const auto cu = ir_reputation_update(table, quality, 1.0, 1e-8);
    REQUIRE_THAT(cu[0], WithinRel(1e8, 1e-9));   // exact match hits the epsilon guard
    REQUIRE_THAT(cu[1], WithinRel(25.0, 1e-6));  // d = 0.04

    SECTION("doubling the squared error halves the weight") {
        RatingTable pair(2, 1, RatingScale{0.0, 1.0, false});
        pair.add_rating(0, 0, 0.3);
        pair.add_rating(1, 0, 0.3 * std::numbers::sqrt2);
        const auto w = ir_reputation_update(pair, std::vector<double>{0.0}, 1.0, 1e-8);
        REQUIRE_THAT(w[0] / w[1], WithinRel(2.0, 1e-6));
    }
    SECTION("exponent two squares the decay") {
        const auto w = ir_reputation_update(table, quality, 2.0, 1e-8);
        REQUIRE_THAT(w[1], WithinRel(625.0, 1e-5));
    }
}

TEST_CASE("engine configuration is validated") {
    EngineConfig config;
    REQUIRE_NOTHROW(config.validate());
    SECTION("delta") {
        config.delta = 0.0;
        REQUIRE_THROWS_AS(config.validate(), RangeError);
    }
    SECTION("max iterations") {
        config.max_iterations = 0;
        REQUIRE_THROWS_AS(config.validate(), RangeError);
    }
    SECTION("exponent") {
        config.ir_exponent = 0.0;
        REQUIRE_THROWS_AS(config.validate(), RangeError);
    }
    SECTION("epsilon") {
        config.ir_epsilon = 0.0;
        REQUIRE_THROWS_AS(config.validate(), RangeError);
    }
}

TEST_CASE("algorithm names round-trip") {
    for (auto a : {Algorithm::Mean, Algorithm::IterativeRefinement, Algorithm::CorrelationBased})
        REQUIRE(parse_algorithm(to_string(a)) == a);
    REQUIRE_THROWS_AS(parse_algorithm("median"), ParseError);
}

TEST_CASE("mean ranking finishes in one pass") {
    const RatingTable table = connected_table(5, 10, 6, 20);
    EngineConfig config;
    config.algorithm = Algorithm::Mean;
    const auto result = run(table, config);
    REQUIRE(result.iterations == 1);
    REQUIRE(result.converged);
    REQUIRE(result.final_change == 0.0);
    for (double c : result.reputation)
        REQUIRE(c == 1.0);
    REQUIRE(result.quality == quality_update(table, result.reputation));
}

TEST_CASE("agreeing raters are a fixed point") {
    RatingTable table(2, 2, RatingScale{0.0, 1.0, false});
    table.add_rating(0, 0, 0.3);
    table.add_rating(1, 0, 0.3);
    table.add_rating(0, 1, 0.8);
    table.add_rating(1, 1, 0.8);

    EngineConfig config;
    for (auto a : {Algorithm::IterativeRefinement, Algorithm::CorrelationBased}) {
        config.algorithm = a;
        const auto result = run(table, config);
        REQUIRE(result.converged);
        REQUIRE(result.iterations <= 2);
        REQUIRE_THAT(result.quality[0], WithinAbs(0.3, 1e-12));
        REQUIRE_THAT(result.quality[1], WithinAbs(0.8, 1e-12));
    }
}

TEST_CASE("a constant-rating pusher ends with exactly zero reputation") {
    // three honest users with distinct opinions plus one user rating
    // everything at the top of the scale
    RatingTable table(4, 3, RatingScale{0.0, 1.0, false});
    const double honest[3][3] = {{0.2, 0.5, 0.9}, {0.3, 0.4, 0.8}, {0.1, 0.6, 1.0}};
    for (UserId u = 0; u < 3; ++u)
        for (ObjectId o = 0; o < 3; ++o)
            table.add_rating(u, o, honest[u][o]);
    for (ObjectId o = 0; o < 3; ++o)
        table.add_rating(3, o, 1.0);

    EngineConfig config;
    config.algorithm = Algorithm::CorrelationBased;
    const auto result = run(table, config);
    REQUIRE(result.converged);
    REQUIRE(result.reputation[3] == 0.0);
    for (UserId u = 0; u < 3; ++u)
        REQUIRE(result.reputation[u] > 0.0);
}

TEST_CASE("run rejects isolated nodes up front") {
    EngineConfig config;
    RatingTable lonely_object(2, 2, RatingScale{0.0, 1.0, false});
    lonely_object.add_rating(0, 0, 0.5);
    lonely_object.add_rating(1, 0, 0.7);
    REQUIRE_THROWS_MATCHES(run(lonely_object, config), IsolatedError,
                           MessageMatches(ContainsSubstring("object 1")));

    RatingTable lonely_user(2, 1, RatingScale{0.0, 1.0, false});
    lonely_user.add_rating(0, 0, 0.5);
    REQUIRE_THROWS_MATCHES(run(lonely_user, config), IsolatedError,
                           MessageMatches(ContainsSubstring("user 1")));
}

TEST_CASE("hitting the iteration cap reports non-convergence") {
    const RatingTable table = connected_table(9, 12, 8, 30);
    EngineConfig config;
    config.algorithm = Algorithm::CorrelationBased;
    config.max_iterations = 1;
    const auto result = run(table, config);
    REQUIRE_FALSE(result.converged);
    REQUIRE(result.iterations == 1);
    REQUIRE(std::isinf(result.final_change));
}

TEST_CASE("converged runs report a change below delta") {
    // structured data: on pure noise the correlation engine can cycle
    // indefinitely, which is reported, not hidden
    GeneratorConfig generator;
    generator.n_users = 150;
    generator.n_objects = 80;
    generator.sparsity = 0.08;
    generator.seed = 21;
    const auto table = filter_min_degree(generate(generator).table, 1).table;

    EngineConfig config;
    for (auto a : {Algorithm::IterativeRefinement, Algorithm::CorrelationBased}) {
        config.algorithm = a;
        const auto result = run(table, config);
        REQUIRE(result.converged);
        REQUIRE(result.final_change < config.delta);

        const auto next = quality_update(table, result.reputation);
        REQUIRE(convergence_change(result.quality, next) < config.delta);
    }
}

TEST_CASE("correlation reputations stay inside the unit interval") {
    EngineConfig config;
    config.algorithm = Algorithm::CorrelationBased;
    const auto result = run(connected_table(33, 25, 10, 120), config);
    for (double c : result.reputation) {
        REQUIRE(c >= 0.0);
        REQUIRE(c <= 1.0);
    }
}

TEST_CASE("quality stays inside the hull of each object's ratings") {
    const RatingTable table = connected_table(41, 20, 12, 80);
    Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> cu(table.n_users());
        for (double& c : cu)
            c = trial == 0 ? 0.0 : rng.uniform(0.0, 2.0);
        const auto quality = quality_update(table, cu);
        for (ObjectId o = 0; o < table.n_objects(); ++o) {
            double lo = 1.0, hi = 0.0;
            for (const auto& entry : table.ratings_of_object(o)) {
                lo = std::min(lo, entry.value);
                hi = std::max(hi, entry.value);
            }
            REQUIRE(quality[o] >= lo);
            REQUIRE(quality[o] <= hi);
        }
    }
}

TEST_CASE("quality is equivariant under affine rescaling of the ratings") {
    const RatingTable table = connected_table(55, 15, 9, 60);
    std::vector<double> cu(table.n_users());
    Rng rng(56);
    for (double& c : cu)
        c = rng.uniform(0.0, 1.0);
    const auto quality = quality_update(table, cu);

    SECTION("doubling is bit-exact") {
        RatingTable doubled(table.n_users(), table.n_objects(), RatingScale{0.0, 2.0, false});
        table.for_each_rating([&](UserId u, ObjectId o, double v) {
            doubled.add_rating(u, o, 2.0 * v);
        });
        const auto scaled = quality_update(doubled, cu);
        for (ObjectId o = 0; o < table.n_objects(); ++o)
            REQUIRE(scaled[o] == 2.0 * quality[o]);
    }
    SECTION("general affine maps agree to rounding") {
        const double a = 1.7, b = 0.3;
        RatingTable mapped(table.n_users(), table.n_objects(), RatingScale{0.3, 2.0, false});
        table.for_each_rating([&](UserId u, ObjectId o, double v) {
            mapped.add_rating(u, o, a * v + b);
        });
        const auto scaled = quality_update(mapped, cu);
        for (ObjectId o = 0; o < table.n_objects(); ++o)
            REQUIRE_THAT(scaled[o], WithinAbs(a * quality[o] + b, 1e-12));
    }
}

TEST_CASE("correlation is invariant under affine maps of either side") {
    const RatingTable table = connected_table(61, 12, 8, 50);
    std::vector<double> quality(table.n_objects());
    Rng rng(62);
    for (double& q : quality)
        q = rng.uniform(0.0, 1.0);

    RatingTable mapped(table.n_users(), table.n_objects(), RatingScale{0.25, 1.85, false});
    table.for_each_rating([&](UserId u, ObjectId o, double v) {
        mapped.add_rating(u, o, 1.6 * v + 0.25);
    });
    std::vector<double> shifted(quality);
    for (double& q : shifted)
        q = 0.9 * q + 0.05;

    for (UserId u = 0; u < table.n_users(); ++u) {
        const double base = user_correlation(table, quality, u);
        REQUIRE_THAT(user_correlation(mapped, quality, u), WithinAbs(base, 1e-12));
        REQUIRE_THAT(user_correlation(table, shifted, u), WithinAbs(base, 1e-12));
    }
}

TEST_CASE("a uniform start reproduces the mean ranking for one step") {
    const RatingTable table = connected_table(71, 14, 9, 70);
    EngineConfig mean_config;
    mean_config.algorithm = Algorithm::Mean;
    const auto mean_result = run(table, mean_config);
    const auto first_step = quality_update(table, std::vector<double>(table.n_users(), 1.0));
    REQUIRE(first_step == mean_result.quality);
}

TEST_CASE("updates match the straightforward oracles") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n_users = 2 + rng.below(4);
        const std::size_t n_objects = 2 + rng.below(4);
        const RatingTable table =
            connected_table(200 + trial, n_users, n_objects, rng.below(12));

        std::vector<double> cu(n_users);
        for (double& c : cu)
            c = rng.below(4) == 0 ? 0.0 : rng.uniform(0.0, 1.0);
        const auto quality = quality_update(table, cu);
        const auto expected_quality = oracles::naive_quality(table, cu);
        for (ObjectId o = 0; o < n_objects; ++o)
            REQUIRE_THAT(quality[o], WithinAbs(expected_quality[o], 1e-12));

        std::vector<double> q(n_objects);
        for (double& x : q)
            x = rng.uniform(0.0, 1.0);
        for (UserId u = 0; u < n_users; ++u)
            REQUIRE_THAT(user_correlation(table, q, u),
                         WithinAbs(oracles::naive_correlation(table, q, u), 1e-12));
    }
}
