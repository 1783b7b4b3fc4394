// Command-line driver: synthetic dataset generation, ranking, evaluation
// against ground truth or a benchmark list, spam-ratio sweeps, and binned
// reputation reports. Emits CSV series; plotting stays out of scope.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reprank/reprank.hpp"

namespace fs = std::filesystem;
using namespace reprank;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;

struct ScaleOpts {
    double min = 0.0;
    double max = 1.0;
    bool discrete = false;

    RatingScale scale() const { return RatingScale{min, max, discrete}; }
};

struct GeneratorOpts {
    std::size_t users = 6000;
    std::size_t objects = 4000;
    double sparsity = 0.02;
    double sigma_min = 0.1;
    double sigma_max = 0.5;

    GeneratorConfig config(std::uint64_t seed, const ScaleOpts& scale) const {
        GeneratorConfig cfg;
        cfg.n_users = users;
        cfg.n_objects = objects;
        cfg.sparsity = sparsity;
        cfg.sigma_min = sigma_min;
        cfg.sigma_max = sigma_max;
        cfg.scale = scale.scale();
        cfg.seed = seed;
        return cfg;
    }
};

struct EngineOpts {
    std::vector<std::string> algorithms;
    double delta = 1e-6;
    std::size_t max_iters = 1000;
    double ir_beta = 1.0;
    double ir_epsilon = 1e-8;
    std::string init = "degree";

    std::vector<Algorithm> selected() const {
        std::vector<Algorithm> out;
        for (const auto& name : algorithms) {
            const Algorithm a = parse_algorithm(name);
            if (std::find(out.begin(), out.end(), a) == out.end())
                out.push_back(a);
        }
        if (out.empty())
            out = {Algorithm::Mean, Algorithm::IterativeRefinement,
                   Algorithm::CorrelationBased};
        return out;
    }

    EngineConfig config(Algorithm a) const {
        EngineConfig cfg;
        cfg.algorithm = a;
        cfg.delta = delta;
        cfg.max_iterations = max_iters;
        cfg.ir_exponent = ir_beta;
        cfg.ir_epsilon = ir_epsilon;
        if (init == "degree")
            cfg.init = ReputationInit::DegreeBased;
        else if (init == "uniform")
            cfg.init = ReputationInit::Uniform;
        else
            throw RangeError("unknown reputation init '" + init + "'");
        cfg.validate();
        return cfg;
    }
};

struct DataOpts {
    std::string ratings;
    std::string format = "triples";
    std::string delimiter = ",";
    std::size_t min_user_degree = 1;
    std::string truth_file;
    std::string benchmark_file;

    char delim() const {
        if (delimiter.size() != 1)
            throw ParseError("--delimiter expects a single character");
        return delimiter[0];
    }
};

void add_generator_flags(CLI::App* cmd, GeneratorOpts& g) {
    cmd->add_option("--users", g.users, "number of users")->capture_default_str();
    cmd->add_option("--objects", g.objects, "number of objects")->capture_default_str();
    cmd->add_option("--sparsity", g.sparsity, "fraction of rated (user, object) pairs")
        ->capture_default_str();
    cmd->add_option("--sigma-min", g.sigma_min, "smallest honest rating noise")
        ->capture_default_str();
    cmd->add_option("--sigma-max", g.sigma_max, "largest honest rating noise")
        ->capture_default_str();
}

void add_scale_flags(CLI::App* cmd, ScaleOpts& s) {
    cmd->add_option("--scale-min", s.min, "lowest allowed rating")->capture_default_str();
    cmd->add_option("--scale-max", s.max, "highest allowed rating")->capture_default_str();
    cmd->add_flag("--discrete", s.discrete, "integer ratings only");
}

void add_engine_flags(CLI::App* cmd, EngineOpts& e) {
    cmd->add_option("--algorithm", e.algorithms,
                    "ranking algorithm, repeatable (default: all three)")
        ->check(CLI::IsMember({"mean", "ir", "corr"}));
    cmd->add_option("--delta", e.delta, "convergence threshold")->capture_default_str();
    cmd->add_option("--max-iters", e.max_iters, "iteration cap")->capture_default_str();
    cmd->add_option("--ir-beta", e.ir_beta, "iterative-refinement exponent")
        ->capture_default_str();
    cmd->add_option("--ir-epsilon", e.ir_epsilon, "iterative-refinement zero guard")
        ->capture_default_str();
    cmd->add_option("--init", e.init, "initial reputation: degree|uniform")
        ->check(CLI::IsMember({"degree", "uniform"}))
        ->capture_default_str();
}

void add_data_flags(CLI::App* cmd, DataOpts& d) {
    cmd->add_option("--ratings", d.ratings, "ratings file to load instead of generating");
    cmd->add_option("--format", d.format, "ratings file format")
        ->check(CLI::IsMember({"triples", "movielens"}))
        ->capture_default_str();
    cmd->add_option("--delimiter", d.delimiter, "field delimiter for triples files")
        ->capture_default_str();
    cmd->add_option("--min-user-degree", d.min_user_degree,
                    "drop users with fewer ratings before ranking")
        ->capture_default_str();
    cmd->add_option("--truth", d.truth_file, "ground-truth sidecar for evaluation");
    cmd->add_option("--benchmark-file", d.benchmark_file,
                    "file of benchmark object ids, one per line");
}

fs::path ensure_out_dir(const std::string& out_dir) {
    if (out_dir.empty())
        throw IoError("--out-dir is required");
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    return out;
}

// A table ready for run(): pruned of sub-threshold users and unrated objects,
// with external ids and any truth/benchmark carried through the re-indexing.
struct Prepared {
    RatingTable table;
    std::vector<std::int64_t> user_ids;   // dense -> external
    std::vector<std::int64_t> object_ids; // dense -> external
    std::optional<GroundTruth> truth;
    std::optional<std::vector<ObjectId>> benchmark;
};

GroundTruth restrict_truth(const GroundTruth& truth, const std::vector<UserId>& kept_users,
                           const std::vector<ObjectId>& kept_objects) {
    GroundTruth out;
    out.true_quality.reserve(kept_objects.size());
    for (ObjectId o : kept_objects)
        out.true_quality.push_back(truth.true_quality.at(o));
    out.error_magnitude.reserve(kept_users.size());
    out.labels.reserve(kept_users.size());
    for (UserId u : kept_users) {
        out.error_magnitude.push_back(truth.error_magnitude.at(u));
        out.labels.push_back(truth.labels.at(u));
    }
    return out;
}

Prepared prepare_synthetic(const GeneratorConfig& config, const std::optional<SpamConfig>& spam,
                           std::size_t min_user_degree) {
    SyntheticData data = generate(config, spam);
    FilterResult filtered = filter_min_degree(data.table, std::max<std::size_t>(1, min_user_degree));
    Prepared prep;
    prep.truth = restrict_truth(data.truth, filtered.kept_users, filtered.kept_objects);
    prep.user_ids.assign(filtered.kept_users.begin(), filtered.kept_users.end());
    prep.object_ids.assign(filtered.kept_objects.begin(), filtered.kept_objects.end());
    prep.table = std::move(filtered.table);
    return prep;
}

// Maps external-id ground truth onto the loaded table's dense ids.
GroundTruth align_truth(const GroundTruth& sidecar, const DatasetManifest& manifest) {
    GroundTruth out;
    out.true_quality.reserve(manifest.object_ids.size());
    for (std::int64_t ext : manifest.object_ids) {
        if (ext < 0 || static_cast<std::size_t>(ext) >= sidecar.true_quality.size())
            throw DimensionError("ground truth has no object " + std::to_string(ext));
        out.true_quality.push_back(sidecar.true_quality[static_cast<std::size_t>(ext)]);
    }
    out.error_magnitude.reserve(manifest.user_ids.size());
    out.labels.reserve(manifest.user_ids.size());
    for (std::int64_t ext : manifest.user_ids) {
        if (ext < 0 || static_cast<std::size_t>(ext) >= sidecar.error_magnitude.size())
            throw DimensionError("ground truth has no user " + std::to_string(ext));
        out.error_magnitude.push_back(sidecar.error_magnitude[static_cast<std::size_t>(ext)]);
        out.labels.push_back(sidecar.labels[static_cast<std::size_t>(ext)]);
    }
    return out;
}

Prepared prepare_file(const DataOpts& data, const ScaleOpts& scale) {
    LoadedDataset loaded = load_ratings(data.ratings, parse_ratings_format(data.format),
                                        scale.scale(), data.delim());
    Prepared prep;
    if (!data.truth_file.empty())
        prep.truth = align_truth(read_ground_truth(data.truth_file), loaded.manifest);
    if (!data.benchmark_file.empty())
        prep.benchmark = load_benchmark(data.benchmark_file, loaded.manifest.object_index).objects;

    if (data.min_user_degree > 1) {
        FilterResult filtered = filter_min_degree(loaded.table, data.min_user_degree);
        if (prep.truth)
            prep.truth = restrict_truth(*prep.truth, filtered.kept_users, filtered.kept_objects);
        if (prep.benchmark) {
            const ObjectId none = static_cast<ObjectId>(loaded.table.n_objects());
            std::vector<ObjectId> object_map(loaded.table.n_objects(), none);
            for (std::size_t no = 0; no < filtered.kept_objects.size(); ++no)
                object_map[filtered.kept_objects[no]] = static_cast<ObjectId>(no);
            std::vector<ObjectId> remapped;
            for (ObjectId o : *prep.benchmark)
                if (object_map[o] != none)
                    remapped.push_back(object_map[o]);
            if (remapped.empty())
                throw DegenerateError("degree filter removed every benchmark object");
            prep.benchmark = std::move(remapped);
        }
        for (UserId u : filtered.kept_users)
            prep.user_ids.push_back(loaded.manifest.user_ids[u]);
        for (ObjectId o : filtered.kept_objects)
            prep.object_ids.push_back(loaded.manifest.object_ids[o]);
        prep.table = std::move(filtered.table);
    } else {
        prep.user_ids = loaded.manifest.user_ids;
        prep.object_ids = loaded.manifest.object_ids;
        prep.table = std::move(loaded.table);
    }
    return prep;
}

void write_quality_csv(const fs::path& path, const Prepared& prep,
                       std::span<const double> quality) {
    std::vector<std::size_t> order(quality.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (quality[a] != quality[b])
            return quality[a] > quality[b];
        return prep.object_ids[a] < prep.object_ids[b];
    });
    std::vector<std::size_t> rank(quality.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        rank[order[pos]] = pos + 1;

    auto out = open_out(path);
    out << "object,quality,rank\n";
    for (std::size_t o = 0; o < quality.size(); ++o)
        out << prep.object_ids[o] << "," << detail::format_double(quality[o]) << "," << rank[o]
            << "\n";
}

void write_reputation_csv(const fs::path& path, const Prepared& prep,
                          std::span<const double> reputation) {
    auto out = open_out(path);
    out << "user,reputation\n";
    for (std::size_t u = 0; u < reputation.size(); ++u)
        out << prep.user_ids[u] << "," << detail::format_double(reputation[u]) << "\n";
}

EvalReport evaluate_result(const Prepared& prep, Algorithm algorithm, const RankResult& result,
                           double benchmark_top_fraction, double hist_bucket_width,
                           double error_bin_width) {
    EvalReport report;
    report.algorithm = to_string(algorithm);
    report.iterations = result.iterations;
    report.converged = result.converged;
    report.final_change = result.final_change;
    if (prep.truth) {
        report.tau = kendall_tau(prep.truth->true_quality, result.quality);
        report.error_bins = reputation_vs_error(result.reputation, *prep.truth, error_bin_width,
                                                /*honest_only=*/true);
        report.histogram =
            reputation_histogram(result.reputation, prep.truth->labels, hist_bucket_width);
    } else {
        report.histogram =
            reputation_histogram(result.reputation, {}, hist_bucket_width);
    }
    if (prep.benchmark)
        report.auc = auc(result.quality, *prep.benchmark);
    else if (prep.truth)
        report.auc = auc(result.quality,
                         top_fraction_benchmark(prep.truth->true_quality, benchmark_top_fraction));
    return report;
}

std::string csv_field(const std::optional<double>& value) {
    return value ? detail::format_double(*value) : std::string();
}

// ----- generate ------------------------------------------------------------

struct GenerateCmd {
    GeneratorOpts gen;
    ScaleOpts scale;
    std::uint64_t seed = 1;
    std::string spam_kind = "random";
    double spam_ratio = 0.0;
    std::string out_dir;
    std::string delimiter = ",";

    int run_cmd() const {
        const fs::path dir = ensure_out_dir(out_dir);
        if (delimiter.size() != 1)
            throw ParseError("--delimiter expects a single character");
        std::optional<SpamConfig> spam;
        if (spam_ratio > 0.0)
            spam = SpamConfig{spam_ratio, parse_spam_kind(spam_kind)};
        const SyntheticData data = generate(gen.config(seed, scale), spam);

        const fs::path ratings_path = dir / "ratings.csv";
        const fs::path truth_path = dir / "truth.csv";
        write_ratings_file(ratings_path, data.table, delimiter[0]);
        write_ground_truth_file(truth_path, data.truth);

        std::cout << "users " << data.table.n_users() << "\n"
                  << "objects " << data.table.n_objects() << "\n"
                  << "ratings " << data.table.n_ratings() << "\n"
                  << "sparsity " << detail::format_double(data.table.sparsity()) << "\n"
                  << "ratings_file " << ratings_path.string() << "\n"
                  << "truth_file " << truth_path.string() << "\n";
        return kExitOk;
    }
};

// ----- rank ----------------------------------------------------------------

struct RankCmd {
    DataOpts data;
    ScaleOpts scale;
    EngineOpts engines;
    std::string out_dir;

    int run_cmd() const {
        if (data.ratings.empty())
            throw IoError("rank needs --ratings");
        const fs::path dir = ensure_out_dir(out_dir);
        const Prepared prep = prepare_file(data, scale);
        bool all_converged = true;
        for (Algorithm a : engines.selected()) {
            const RankResult result = run(prep.table, engines.config(a));
            all_converged = all_converged && result.converged;
            write_quality_csv(dir / ("quality_" + to_string(a) + ".csv"), prep, result.quality);
            write_reputation_csv(dir / ("reputation_" + to_string(a) + ".csv"), prep,
                                 result.reputation);
            std::cout << to_string(a) << " iterations " << result.iterations << " converged "
                      << (result.converged ? 1 : 0) << " final_change "
                      << detail::format_double(result.final_change) << "\n";
        }
        return all_converged ? kExitOk : kExitNotConverged;
    }
};

// ----- evaluate ------------------------------------------------------------

struct EvaluateCmd {
    GeneratorOpts gen;
    DataOpts data;
    ScaleOpts scale;
    EngineOpts engines;
    std::vector<std::uint64_t> seeds;
    double benchmark_top_fraction = 0.05;
    double hist_bucket_width = 0.1;
    double error_bin_width = 0.01;
    std::string quality_file;
    std::string out_dir;

    int run_cmd() const {
        if (!quality_file.empty())
            return evaluate_quality_file();
        const fs::path dir = ensure_out_dir(out_dir);
        auto summary = open_out(dir / "summary.csv");
        summary << "algorithm,seed,tau,auc,iterations,converged\n";

        // algorithm -> (tau sum, auc sum, rows)
        std::map<std::string, std::tuple<double, double, std::size_t>> totals;
        std::vector<Algorithm> algorithms = engines.selected();
        bool all_converged = true;
        bool any_metric = false;

        auto emit = [&](const Prepared& prep, std::uint64_t seed, const std::string& suffix) {
            for (Algorithm a : algorithms) {
                const RankResult result = run(prep.table, engines.config(a));
                all_converged = all_converged && result.converged;
                const EvalReport report = evaluate_result(prep, a, result,
                                                          benchmark_top_fraction,
                                                          hist_bucket_width, error_bin_width);
                if (!report.tau && !report.auc)
                    throw DegenerateError(
                        "nothing to evaluate: no ground truth and no benchmark list");
                any_metric = true;
                auto report_out = open_out(dir / ("report_" + to_string(a) + suffix + ".txt"));
                write_eval_report(report_out, report);
                summary << to_string(a) << "," << seed << "," << csv_field(report.tau) << ","
                        << csv_field(report.auc) << "," << report.iterations << ","
                        << (report.converged ? 1 : 0) << "\n";
                if (report.tau && report.auc) {
                    auto& [tau_sum, auc_sum, rows] = totals[to_string(a)];
                    tau_sum += *report.tau;
                    auc_sum += *report.auc;
                    ++rows;
                }
                std::cout << to_string(a) << suffix << " tau " << csv_field(report.tau)
                          << " auc " << csv_field(report.auc) << " iterations "
                          << report.iterations << " converged " << (report.converged ? 1 : 0)
                          << "\n";
            }
        };

        if (!data.ratings.empty()) {
            emit(prepare_file(data, scale), 0, "");
        } else {
            std::vector<std::uint64_t> run_seeds = seeds.empty() ? std::vector<std::uint64_t>{1}
                                                                 : seeds;
            for (std::uint64_t seed : run_seeds)
                emit(prepare_synthetic(gen.config(seed, scale), std::nullopt,
                                       data.min_user_degree),
                     seed, "_seed" + std::to_string(seed));
        }

        auto mean_out = open_out(dir / "summary_mean.csv");
        mean_out << "algorithm,mean_tau,mean_auc,runs\n";
        for (Algorithm a : algorithms) {
            const auto it = totals.find(to_string(a));
            if (it == totals.end())
                continue;
            const auto& [tau_sum, auc_sum, rows] = it->second;
            const auto n = static_cast<double>(rows);
            mean_out << to_string(a) << "," << detail::format_double(tau_sum / n) << ","
                     << detail::format_double(auc_sum / n) << "," << rows << "\n";
            std::cout << to_string(a) << " mean tau " << detail::format_double(tau_sum / n)
                      << " auc " << detail::format_double(auc_sum / n) << " over " << rows
                      << " runs\n";
        }
        if (!any_metric)
            throw DegenerateError("nothing to evaluate: no ground truth and no benchmark list");
        return all_converged ? kExitOk : kExitNotConverged;
    }

    // Scores an existing quality CSV against a ground-truth sidecar, skipping
    // the ranking step entirely.
    int evaluate_quality_file() const {
        if (data.truth_file.empty())
            throw DegenerateError("nothing to evaluate: --quality-file needs --truth");
        const GroundTruth sidecar = read_ground_truth(data.truth_file);
        std::ifstream in(quality_file);
        if (!in)
            throw IoError("cannot open quality file " + quality_file);
        std::vector<double> truth_quality;
        std::vector<double> estimate;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            detail::chomp(line);
            if (detail::skippable_line(line) || line == "object,quality,rank")
                continue;
            const auto fields = detail::split(line, ",");
            if (fields.size() < 2)
                throw ParseError(quality_file + ":" + std::to_string(line_no) +
                                 ": expected object,quality");
            const std::int64_t ext = detail::parse_id(fields[0], quality_file, line_no);
            if (static_cast<std::size_t>(ext) >= sidecar.true_quality.size())
                throw DimensionError("ground truth has no object " + std::to_string(ext));
            truth_quality.push_back(sidecar.true_quality[static_cast<std::size_t>(ext)]);
            estimate.push_back(detail::parse_rating_value(fields[1], quality_file, line_no));
        }
        const double tau = kendall_tau(truth_quality, estimate);
        const double auc_value =
            auc(estimate, top_fraction_benchmark(truth_quality, benchmark_top_fraction));
        std::cout << "tau " << detail::format_double(tau) << "\n"
                  << "auc " << detail::format_double(auc_value) << "\n";
        return kExitOk;
    }
};

// ----- spam-sweep ----------------------------------------------------------

struct SweepCmd {
    GeneratorOpts gen;
    ScaleOpts scale;
    EngineOpts engines;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> spam_kinds;
    std::vector<double> ratios;
    double benchmark_top_fraction = 0.05;
    double hist_bucket_width = 0.1;
    double error_bin_width = 0.01;
    std::size_t min_user_degree = 1;
    std::string out_dir;

    int run_cmd() const {
        const fs::path dir = ensure_out_dir(out_dir);
        std::vector<double> run_ratios = ratios;
        if (run_ratios.empty())
            run_ratios = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
        for (std::size_t i = 0; i < run_ratios.size(); ++i) {
            if (run_ratios[i] < 0.0 || run_ratios[i] > 1.0)
                throw RangeError("sweep ratios must lie in [0, 1]");
            if (i > 0 && run_ratios[i] <= run_ratios[i - 1])
                throw RangeError("sweep ratios must be ascending");
        }
        std::vector<SpamKind> kinds;
        for (const auto& name : spam_kinds) {
            const SpamKind k = parse_spam_kind(name);
            if (std::find(kinds.begin(), kinds.end(), k) == kinds.end())
                kinds.push_back(k);
        }
        if (kinds.empty())
            kinds = {SpamKind::RandomRating};
        std::vector<std::uint64_t> run_seeds = seeds;
        if (run_seeds.empty())
            for (std::uint64_t s = 1; s <= 10; ++s)
                run_seeds.push_back(s);
        const std::vector<Algorithm> algorithms = engines.selected();

        auto sweep = open_out(dir / "sweep.csv");
        sweep << "ratio,kind,algorithm,seed,tau,auc,iterations,converged\n";
        auto sweep_mean = open_out(dir / "sweep_mean.csv");
        sweep_mean << "ratio,kind,algorithm,mean_tau,mean_auc\n";
        auto hist_out = open_out(dir / "rep_hist.csv");
        hist_out << "ratio,kind,algorithm,population,bucket_lo,count\n";
        auto bins_out = open_out(dir / "rep_vs_error.csv");
        bins_out << "ratio,kind,algorithm,bin_center,mean_reputation,count\n";

        bool all_converged = true;
        for (SpamKind kind : kinds) {
            for (double ratio : run_ratios) {
                // per-algorithm accumulators over seeds
                std::map<std::string, std::pair<double, double>> metric_sums;
                std::map<std::string, std::map<std::int64_t, std::size_t>> honest_hist,
                    spammer_hist;
                std::map<std::string, std::map<std::int64_t, std::pair<double, std::size_t>>>
                    error_bins;
                for (std::uint64_t seed : run_seeds) {
                    const Prepared prep =
                        prepare_synthetic(gen.config(seed, scale), SpamConfig{ratio, kind},
                                          min_user_degree);
                    for (Algorithm a : algorithms) {
                        const RankResult result = run(prep.table, engines.config(a));
                        all_converged = all_converged && result.converged;
                        const double tau = kendall_tau(prep.truth->true_quality, result.quality);
                        const double auc_value =
                            auc(result.quality, top_fraction_benchmark(prep.truth->true_quality,
                                                                       benchmark_top_fraction));
                        sweep << detail::format_double(ratio) << "," << to_string(kind) << ","
                              << to_string(a) << "," << seed << ","
                              << detail::format_double(tau) << ","
                              << detail::format_double(auc_value) << "," << result.iterations
                              << "," << (result.converged ? 1 : 0) << "\n";
                        auto& [tau_sum, auc_sum] = metric_sums[to_string(a)];
                        tau_sum += tau;
                        auc_sum += auc_value;
                        for (std::size_t u = 0; u < result.reputation.size(); ++u) {
                            const auto bucket = static_cast<std::int64_t>(std::floor(
                                result.reputation[u] / hist_bucket_width));
                            if (is_spammer(prep.truth->labels[u]))
                                ++spammer_hist[to_string(a)][bucket];
                            else
                                ++honest_hist[to_string(a)][bucket];
                        }
                        for (const auto& bin :
                             reputation_vs_error(result.reputation, *prep.truth, error_bin_width,
                                                 /*honest_only=*/true)) {
                            auto& [sum, count] = error_bins[to_string(a)][static_cast<std::int64_t>(
                                std::floor(bin.center / error_bin_width))];
                            sum += bin.mean_reputation * static_cast<double>(bin.count);
                            count += bin.count;
                        }
                    }
                }
                const auto n_seeds = static_cast<double>(run_seeds.size());
                for (Algorithm a : algorithms) {
                    const auto& [tau_sum, auc_sum] = metric_sums[to_string(a)];
                    sweep_mean << detail::format_double(ratio) << "," << to_string(kind) << ","
                               << to_string(a) << "," << detail::format_double(tau_sum / n_seeds)
                               << "," << detail::format_double(auc_sum / n_seeds) << "\n";
                    for (const auto& [bucket, count] : honest_hist[to_string(a)])
                        hist_out << detail::format_double(ratio) << "," << to_string(kind) << ","
                                 << to_string(a) << ",honest,"
                                 << detail::format_double(static_cast<double>(bucket) *
                                                          hist_bucket_width)
                                 << "," << count << "\n";
                    for (const auto& [bucket, count] : spammer_hist[to_string(a)])
                        hist_out << detail::format_double(ratio) << "," << to_string(kind) << ","
                                 << to_string(a) << ",spammer,"
                                 << detail::format_double(static_cast<double>(bucket) *
                                                          hist_bucket_width)
                                 << "," << count << "\n";
                    for (const auto& [bin, acc] : error_bins[to_string(a)])
                        bins_out << detail::format_double(ratio) << "," << to_string(kind) << ","
                                 << to_string(a) << ","
                                 << detail::format_double(
                                        (static_cast<double>(bin) + 0.5) * error_bin_width)
                                 << ","
                                 << detail::format_double(acc.first /
                                                          static_cast<double>(acc.second))
                                 << "," << acc.second << "\n";
                }
                std::cout << "kind " << to_string(kind) << " ratio "
                          << detail::format_double(ratio) << " done\n";
            }
        }
        return all_converged ? kExitOk : kExitNotConverged;
    }
};

// ----- bin-report ----------------------------------------------------------

struct BinReportCmd {
    GeneratorOpts gen;
    DataOpts data;
    ScaleOpts scale;
    EngineOpts engines;
    std::uint64_t seed = 1;
    std::string spam_kind = "random";
    double spam_ratio = 0.0;
    double hist_bucket_width = 0.1;
    double error_bin_width = 0.01;
    std::string out_dir;

    int run_cmd() const {
        const fs::path dir = ensure_out_dir(out_dir);
        Prepared prep;
        if (!data.ratings.empty()) {
            prep = prepare_file(data, scale);
            if (!prep.truth)
                throw DegenerateError("bin-report needs ground truth; pass --truth");
        } else {
            std::optional<SpamConfig> spam;
            if (spam_ratio > 0.0)
                spam = SpamConfig{spam_ratio, parse_spam_kind(spam_kind)};
            prep = prepare_synthetic(gen.config(seed, scale), spam, data.min_user_degree);
        }

        auto hist_out = open_out(dir / "rep_hist.csv");
        hist_out << "algorithm,population,bucket_lo,count\n";
        auto bins_out = open_out(dir / "rep_vs_error.csv");
        bins_out << "algorithm,bin_center,mean_reputation,count\n";
        bool all_converged = true;
        for (Algorithm a : engines.selected()) {
            const RankResult result = run(prep.table, engines.config(a));
            all_converged = all_converged && result.converged;
            const ReputationHistogram hist =
                reputation_histogram(result.reputation, prep.truth->labels, hist_bucket_width);
            for (const auto& b : hist.honest)
                hist_out << to_string(a) << ",honest," << detail::format_double(b.lower) << ","
                         << b.count << "\n";
            for (const auto& b : hist.spammer)
                hist_out << to_string(a) << ",spammer," << detail::format_double(b.lower) << ","
                         << b.count << "\n";
            for (const auto& bin : reputation_vs_error(result.reputation, *prep.truth,
                                                       error_bin_width, /*honest_only=*/true))
                bins_out << to_string(a) << "," << detail::format_double(bin.center) << ","
                         << detail::format_double(bin.mean_reputation) << "," << bin.count
                         << "\n";
            std::cout << to_string(a) << " iterations " << result.iterations << " converged "
                      << (result.converged ? 1 : 0) << "\n";
        }
        return all_converged ? kExitOk : kExitNotConverged;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reputation-weighted ranking for bipartite rating systems"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI/TOML file");

    GenerateCmd generate_cmd;
    auto* gen = app.add_subcommand("generate", "synthesize a rating dataset with ground truth");
    add_generator_flags(gen, generate_cmd.gen);
    add_scale_flags(gen, generate_cmd.scale);
    gen->add_option("--seed", generate_cmd.seed, "generator seed")->capture_default_str();
    gen->add_option("--spam-kind", generate_cmd.spam_kind, "spammer behavior: random|push")
        ->check(CLI::IsMember({"random", "push"}))
        ->capture_default_str();
    gen->add_option("--spam-ratio", generate_cmd.spam_ratio, "fraction of users made spammers")
        ->capture_default_str();
    gen->add_option("--delimiter", generate_cmd.delimiter, "output field delimiter")
        ->capture_default_str();
    gen->add_option("--out-dir", generate_cmd.out_dir, "output directory")->required();

    RankCmd rank_cmd;
    auto* rank = app.add_subcommand("rank", "rank objects in a ratings file");
    add_data_flags(rank, rank_cmd.data);
    add_scale_flags(rank, rank_cmd.scale);
    add_engine_flags(rank, rank_cmd.engines);
    rank->add_option("--out-dir", rank_cmd.out_dir, "output directory")->required();

    EvaluateCmd eval_cmd;
    auto* eval = app.add_subcommand(
        "evaluate", "rank and score against ground truth or a benchmark list");
    add_generator_flags(eval, eval_cmd.gen);
    add_data_flags(eval, eval_cmd.data);
    add_scale_flags(eval, eval_cmd.scale);
    add_engine_flags(eval, eval_cmd.engines);
    eval->add_option("--seeds", eval_cmd.seeds, "generator seeds for synthetic runs")
        ->delimiter(',');
    eval->add_option("--benchmark-top-fraction", eval_cmd.benchmark_top_fraction,
                     "true-quality fraction used as benchmark")
        ->capture_default_str();
    eval->add_option("--hist-bucket-width", eval_cmd.hist_bucket_width,
                     "reputation histogram bucket width")
        ->capture_default_str();
    eval->add_option("--bin-width", eval_cmd.error_bin_width, "error-magnitude bin width")
        ->capture_default_str();
    eval->add_option("--quality-file", eval_cmd.quality_file,
                     "score an existing quality CSV instead of ranking");
    eval->add_option("--out-dir", eval_cmd.out_dir, "output directory");

    SweepCmd sweep_cmd;
    auto* sweep = app.add_subcommand("spam-sweep",
                                     "evaluate across spam ratios, kinds, and seeds");
    add_generator_flags(sweep, sweep_cmd.gen);
    add_scale_flags(sweep, sweep_cmd.scale);
    add_engine_flags(sweep, sweep_cmd.engines);
    sweep->add_option("--seeds", sweep_cmd.seeds, "generator seeds (default 1..10)")
        ->delimiter(',');
    sweep->add_option("--spam-kind", sweep_cmd.spam_kinds,
                      "spammer behavior, repeatable: random|push")
        ->check(CLI::IsMember({"random", "push"}));
    sweep->add_option("--spam-ratios", sweep_cmd.ratios,
                      "ascending spam ratios (default 0,0.1,...,1)")
        ->delimiter(',');
    sweep->add_option("--benchmark-top-fraction", sweep_cmd.benchmark_top_fraction,
                      "true-quality fraction used as benchmark")
        ->capture_default_str();
    sweep->add_option("--hist-bucket-width", sweep_cmd.hist_bucket_width,
                      "reputation histogram bucket width")
        ->capture_default_str();
    sweep->add_option("--bin-width", sweep_cmd.error_bin_width, "error-magnitude bin width")
        ->capture_default_str();
    sweep->add_option("--min-user-degree", sweep_cmd.min_user_degree,
                      "drop users with fewer ratings before ranking")
        ->capture_default_str();
    sweep->add_option("--out-dir", sweep_cmd.out_dir, "output directory")->required();

    BinReportCmd bin_cmd;
    auto* bin = app.add_subcommand("bin-report",
                                   "reputation histograms and error-bin series for one run");
    add_generator_flags(bin, bin_cmd.gen);
    add_data_flags(bin, bin_cmd.data);
    add_scale_flags(bin, bin_cmd.scale);
    add_engine_flags(bin, bin_cmd.engines);
    bin->add_option("--seed", bin_cmd.seed, "generator seed")->capture_default_str();
    bin->add_option("--spam-kind", bin_cmd.spam_kind, "spammer behavior: random|push")
        ->check(CLI::IsMember({"random", "push"}))
        ->capture_default_str();
    bin->add_option("--spam-ratio", bin_cmd.spam_ratio, "fraction of users made spammers")
        ->capture_default_str();
    bin->add_option("--hist-bucket-width", bin_cmd.hist_bucket_width,
                    "reputation histogram bucket width")
        ->capture_default_str();
    bin->add_option("--bin-width", bin_cmd.error_bin_width, "error-magnitude bin width")
        ->capture_default_str();
    bin->add_option("--out-dir", bin_cmd.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (app.got_subcommand(gen))
            return generate_cmd.run_cmd();
        if (app.got_subcommand(rank))
            return rank_cmd.run_cmd();
        if (app.got_subcommand(eval))
            return eval_cmd.run_cmd();
        if (app.got_subcommand(sweep))
            return sweep_cmd.run_cmd();
        if (app.got_subcommand(bin))
            return bin_cmd.run_cmd();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
