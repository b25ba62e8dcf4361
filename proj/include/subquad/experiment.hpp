#pragma once

// Experiment harness: planted instances, algorithm drivers and report rows.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace subquad {

enum class Algorithm : std::uint8_t { quantum7, bootstrap, mr, threshold, fast_threshold };

std::optional<Algorithm> parse_algorithm(std::string_view id) noexcept;
std::string_view to_string(Algorithm a) noexcept;

struct SpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentSpec {
    Algorithm algorithm = Algorithm::quantum7;
    std::size_t n = 256;
    std::uint64_t seed = 1;
    double epsilon = 0.5;
    std::size_t planted_ops = 8;
    double x = 8.0 / 9.0;
    std::size_t repetitions = 1;
    /// Threshold algorithms: t is this quantile of the off-diagonal distances.
    double quantile = 0.05;

    /// Throws SpecError on the first invalid field.
    void validate() const;

    /// Keys: n, seed, epsilon, x, algorithm, planted_ops, repetitions, quantile.
    /// Missing keys keep their defaults; unknown keys are rejected.
    static ExperimentSpec from_json(std::string_view text);
};

struct ReportRow {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string algorithm;
    double epsilon = 0.0;
    std::optional<std::int64_t> exact;
    std::int64_t estimate = 0;
    std::optional<double> ratio;
    std::uint64_t charged_queries = 0;
    std::uint64_t time_units = 0;
    std::size_t rounds = 0;
    std::uint64_t max_machine_mem = 0;
    /// Not serialized: the declared factor and whether this row respects it.
    double factor_bound = 1.0;
    bool bound_held = true;

    friend bool operator==(const ReportRow &, const ReportRow &) = default;
};

/// s1 uniform over {a,b,c,d}; s2 = s1 after planted_ops random single-char
/// edits. Throws SpecError if planted_ops > n.
std::pair<std::string, std::string> gen_pair(std::size_t n, std::size_t planted_ops, std::uint64_t seed);

/// SUBQUAD_EXACT_CAP if set and numeric, else 4096.
std::size_t exact_cap_from_env();

/// One row per repetition (seed, seed+1, ...), sorted by (n, seed).
std::vector<ReportRow> run_experiment(const ExperimentSpec &spec, std::size_t exact_cap = 4096);

inline constexpr std::string_view kCsvHeader =
    "n,algorithm,epsilon,exact,estimate,ratio,charged_queries,time_units,rounds,max_machine_mem";

std::string to_csv(const std::vector<ReportRow> &rows);
std::string to_json(const std::vector<ReportRow> &rows);

/// Inverses of the encoders over the serialized fields (seed, factor_bound
/// and bound_held are left at their defaults).
std::vector<ReportRow> parse_csv(std::string_view text);
std::vector<ReportRow> parse_json(std::string_view text);

[[nodiscard]] bool all_within_bounds(const std::vector<ReportRow> &rows) noexcept;

/// Least-squares slope of log(mean charged_queries) against log(n).
double growth_slope(const std::vector<ReportRow> &rows);

}  // namespace subquad
