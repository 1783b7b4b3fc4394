#pragma once

// Ranking quality metrics (Kendall tau, AUC against a benchmark set) and
// reputation diagnostics (error-bin means, per-population histograms).
// Tau and AUC use O(n log n) rank computations whose results match exhaustive
// pair enumeration exactly, ties included; the unit tests hold them to that.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "reprank/errors.hpp"
#include "reprank/format.hpp"
#include "reprank/ground_truth.hpp"
#include "reprank/rating_table.hpp"

namespace reprank {

namespace detail {

/// Counts pairs i<j with values[i] > values[j] (strict inversions), merge sort.
inline std::int64_t count_inversions(std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<double> buffer(n);
    std::int64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (values[i] <= values[j]) {
                    buffer[k++] = values[i++];
                } else {
                    inversions += static_cast<std::int64_t>(mid - i);
                    buffer[k++] = values[j++];
                }
            }
            while (i < mid)
                buffer[k++] = values[i++];
            while (j < hi)
                buffer[k++] = values[j++];
            std::copy(buffer.begin() + lo, buffer.begin() + hi, values.begin() + lo);
        }
    }
    return inversions;
}

/// Sum of t*(t-1)/2 over runs of equal adjacent elements.
template <class It, class Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
    std::int64_t ties = 0;
    auto run_begin = first;
    for (auto it = first; it != last; ++it) {
        if (it == run_begin || eq(*run_begin, *it))
            continue;
        const std::int64_t t = it - run_begin;
        ties += t * (t - 1) / 2;
        run_begin = it;
    }
    const std::int64_t t = last - run_begin;
    ties += t * (t - 1) / 2;
    return ties;
}

} // namespace detail

/// Kendall's tau with sign(0)=0 tie handling: (2/(n(n-1))) * sum of
/// sign((truth_a - truth_b)(estimate_a - estimate_b)) over pairs a<b.
/// Computed via Knight's O(n log n) scheme.
inline double kendall_tau(std::span<const double> truth, std::span<const double> estimate) {
    if (truth.size() != estimate.size())
        throw DimensionError("tau inputs of different length: " + std::to_string(truth.size()) +
                             " vs " + std::to_string(estimate.size()));
    const std::size_t n = truth.size();
    if (n < 2)
        throw DegenerateError("tau needs at least two items");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (truth[a] != truth[b])
            return truth[a] < truth[b];
        return estimate[a] < estimate[b];
    });

    std::vector<double> x_sorted(n), y_in_x_order(n);
    for (std::size_t i = 0; i < n; ++i) {
        x_sorted[i] = truth[order[i]];
        y_in_x_order[i] = estimate[order[i]];
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::int64_t ties_x = detail::tied_pairs(
        idx.begin(), idx.end(),
        [&](std::size_t a, std::size_t b) { return x_sorted[a] == x_sorted[b]; });
    const std::int64_t ties_xy = detail::tied_pairs(
        idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return x_sorted[a] == x_sorted[b] && y_in_x_order[a] == y_in_x_order[b];
        });

    const std::int64_t discordant = detail::count_inversions(y_in_x_order);
    // y_in_x_order is now sorted
    const std::int64_t ties_y =
        detail::tied_pairs(y_in_x_order.begin(), y_in_x_order.end(),
                           [](double a, double b) { return a == b; });

    const std::int64_t total = static_cast<std::int64_t>(n) * (static_cast<std::int64_t>(n) - 1) / 2;
    const std::int64_t s = total - ties_x - ties_y + ties_xy - 2 * discordant;
    return 2.0 * static_cast<double>(s) /
           (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
}

/// Probability that a benchmark object outscores a non-benchmark object,
/// ties counted one half; rank-sum (Mann-Whitney) evaluation on doubled
/// midranks so tie contributions stay exact.
inline double auc(std::span<const double> scores, std::span<const ObjectId> benchmark) {
    const std::size_t n = scores.size();
    if (benchmark.empty())
        throw DegenerateError("benchmark set is empty");
    if (benchmark.size() >= n)
        throw DegenerateError("benchmark set must be a proper subset of all objects");
    std::vector<char> in_benchmark(n, 0);
    for (ObjectId id : benchmark) {
        if (id >= n)
            throw IndexError("benchmark object id " + std::to_string(id) + " out of range");
        if (in_benchmark[id])
            throw DegenerateError("duplicate benchmark object id " + std::to_string(id));
        in_benchmark[id] = 1;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // rank2[i] = twice the 1-based midrank of scores[i]
    std::vector<std::int64_t> rank2(n);
    std::size_t lo = 0;
    while (lo < n) {
        std::size_t hi = lo;
        while (hi + 1 < n && scores[order[hi + 1]] == scores[order[lo]])
            ++hi;
        for (std::size_t p = lo; p <= hi; ++p)
            rank2[order[p]] = static_cast<std::int64_t>(lo + hi) + 2;
        lo = hi + 1;
    }

    const std::int64_t nb = static_cast<std::int64_t>(benchmark.size());
    const std::int64_t nn = static_cast<std::int64_t>(n) - nb;
    std::int64_t rank_sum2 = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (in_benchmark[i])
            rank_sum2 += rank2[i];
    const std::int64_t u2 = rank_sum2 - nb * (nb + 1);
    return static_cast<double>(u2) / (2.0 * static_cast<double>(nb) * static_cast<double>(nn));
}

/// The floor(fraction*n) objects with the highest true quality; cutoff ties
/// resolved by ascending object id. Returned ascending.
inline std::vector<ObjectId> top_fraction_benchmark(std::span<const double> true_quality,
                                                    double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw DegenerateError("benchmark fraction must be inside (0, 1)");
    const std::size_t n = true_quality.size();
    const std::size_t k = static_cast<std::size_t>(fraction * static_cast<double>(n) + 1e-9);
    if (k == 0)
        throw DegenerateError("benchmark fraction selects no objects");

    std::vector<ObjectId> order(n);
    std::iota(order.begin(), order.end(), ObjectId{0});
    std::sort(order.begin(), order.end(), [&](ObjectId a, ObjectId b) {
        if (true_quality[a] != true_quality[b])
            return true_quality[a] > true_quality[b];
        return a < b;
    });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

struct ErrorBin {
    double center;
    double mean_reputation;
    std::size_t count;
    friend bool operator==(const ErrorBin&, const ErrorBin&) = default;
};

/// Users grouped by error magnitude into [k*w, (k+1)*w) bins; per-bin mean
/// reputation. Empty bins are omitted. honest_only drops labeled spammers.
inline std::vector<ErrorBin> reputation_vs_error(std::span<const double> reputation,
                                                 const GroundTruth& truth, double bin_width,
                                                 bool honest_only) {
    if (!(bin_width > 0.0))
        throw DegenerateError("bin width must be > 0");
    if (reputation.size() != truth.error_magnitude.size())
        throw DimensionError("reputation length does not match ground-truth user count");
    std::map<std::int64_t, std::pair<double, std::size_t>> bins;
    for (std::size_t u = 0; u < reputation.size(); ++u) {
        if (honest_only && !truth.labels.empty() && is_spammer(truth.labels[u]))
            continue;
        const auto bin = static_cast<std::int64_t>(
            std::floor(truth.error_magnitude[u] / bin_width));
        auto& [sum, count] = bins[bin];
        sum += reputation[u];
        ++count;
    }
    std::vector<ErrorBin> out;
    out.reserve(bins.size());
    for (const auto& [bin, acc] : bins)
        out.push_back(ErrorBin{(static_cast<double>(bin) + 0.5) * bin_width,
                               acc.first / static_cast<double>(acc.second), acc.second});
    return out;
}

struct HistogramBucket {
    double lower; // bucket covers [lower, lower + width)
    std::size_t count;
    friend bool operator==(const HistogramBucket&, const HistogramBucket&) = default;
};

struct ReputationHistogram {
    double bucket_width = 0.1;
    std::vector<HistogramBucket> honest;
    std::vector<HistogramBucket> spammer;
};

/// Separate reputation histograms for honest users and spammers. Buckets are
/// sparse: only populated ones appear, ascending.
inline ReputationHistogram reputation_histogram(std::span<const double> reputation,
                                                std::span<const SpammerLabel> labels,
                                                double bucket_width) {
    if (!(bucket_width > 0.0))
        throw DegenerateError("bucket width must be > 0");
    if (!labels.empty() && labels.size() != reputation.size())
        throw DimensionError("label length does not match reputation length");
    std::map<std::int64_t, std::size_t> honest, spammer;
    for (std::size_t u = 0; u < reputation.size(); ++u) {
        const bool spam = !labels.empty() && is_spammer(labels[u]);
        const auto bucket =
            static_cast<std::int64_t>(std::floor(reputation[u] / bucket_width));
        ++(spam ? spammer : honest)[bucket];
    }
    ReputationHistogram out;
    out.bucket_width = bucket_width;
    for (const auto& [bucket, count] : honest)
        out.honest.push_back({static_cast<double>(bucket) * bucket_width, count});
    for (const auto& [bucket, count] : spammer)
        out.spammer.push_back({static_cast<double>(bucket) * bucket_width, count});
    return out;
}

/// One algorithm's evaluation on one dataset.
struct EvalReport {
    std::string algorithm;
    std::optional<double> tau;  // absent without ground truth
    std::optional<double> auc;  // absent without a benchmark set
    std::size_t iterations = 0;
    bool converged = false;
    double final_change = 0.0;
    ReputationHistogram histogram;
    std::vector<ErrorBin> error_bins; // empty without ground truth
};

/// Key-value metrics followed by delimited series blocks.
inline void write_eval_report(std::ostream& out, const EvalReport& report) {
    using detail::format_double;
    out << "# evaluation report\n";
    out << "algorithm " << report.algorithm << "\n";
    if (report.tau)
        out << "tau " << format_double(*report.tau) << "\n";
    if (report.auc)
        out << "auc " << format_double(*report.auc) << "\n";
    out << "iterations " << report.iterations << "\n";
    out << "converged " << (report.converged ? 1 : 0) << "\n";
    out << "final_change " << format_double(report.final_change) << "\n";
    if (!report.histogram.honest.empty() || !report.histogram.spammer.empty()) {
        out << "\n[reputation_histogram honest]\nbucket_lo,count\n";
        for (const auto& b : report.histogram.honest)
            out << format_double(b.lower) << "," << b.count << "\n";
        out << "\n[reputation_histogram spammer]\nbucket_lo,count\n";
        for (const auto& b : report.histogram.spammer)
            out << format_double(b.lower) << "," << b.count << "\n";
    }
    if (!report.error_bins.empty()) {
        out << "\n[reputation_vs_error]\nbin_center,mean_reputation,count\n";
        for (const auto& bin : report.error_bins)
            out << format_double(bin.center) << "," << format_double(bin.mean_reputation) << ","
                << bin.count << "\n";
    }
}

} // namespace reprank
