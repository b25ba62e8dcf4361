#include "subquad/experiment.hpp"

#include "subquad/approx_edit.hpp"
#include "subquad/metric_estimation.hpp"
#include "subquad/mr_edit.hpp"
#include "subquad/random_metric.hpp"
#include "subquad/rng.hpp"
#include "subquad/strings.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace subquad {

namespace {

using nlohmann::json;

constexpr std::pair<Algorithm, std::string_view> kAlgorithms[] = {
    {Algorithm::quantum7, "quantum7"},
    {Algorithm::bootstrap, "bootstrap"},
    {Algorithm::mr, "mr"},
    {Algorithm::threshold, "threshold"},
    {Algorithm::fast_threshold, "fast-threshold"},
};

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
T parse_number(std::string_view field) {
    T v{};
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw std::invalid_argument("bad numeric field '" + std::string(field) + "'");
    }
    return v;
}

// Off-diagonal quantile, lower index.
Distance distance_quantile(const DistanceTable &table, double q) {
    std::vector<Distance> values;
    values.reserve(table.n * (table.n - 1) / 2);
    for (std::size_t i = 0; i < table.n; ++i) {
        for (std::size_t j = i + 1; j < table.n; ++j) values.push_back(table(i, j));
    }
    if (values.empty()) return 0;
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
    return values[k];
}

void set_ratio(ReportRow &row) {
    if (!row.exact) return;
    if (*row.exact == 0) {
        if (row.estimate == 0) row.ratio = 1.0;
        row.bound_held = row.estimate == 0;
        return;
    }
    row.ratio = static_cast<double>(row.estimate) / static_cast<double>(*row.exact);
    row.bound_held = *row.ratio <= row.factor_bound && row.estimate >= *row.exact;
}

ReportRow run_edit(const ExperimentSpec &spec, std::uint64_t seed, std::size_t exact_cap) {
    const auto [s1, s2] = gen_pair(spec.n, spec.planted_ops, seed);
    ReportRow row;
    row.n = spec.n;
    row.seed = seed;
    row.algorithm = std::string(to_string(spec.algorithm));
    row.epsilon = spec.epsilon;

    switch (spec.algorithm) {
        case Algorithm::quantum7: {
            ApproxParams params;
            params.seed = seed;
            const ApproxResult r = edit_approx(s1, s2, spec.epsilon, params);
            row.estimate = r.estimate;
            row.charged_queries = r.meter.charged;
            row.time_units = r.meter.time_units;
            row.factor_bound = r.factor_bound;
            row.bound_held = r.script.has_value() && validate_script(s1, s2, *r.script);
            break;
        }
        case Algorithm::bootstrap: {
            BootstrapConfig cfg;
            cfg.eps = spec.epsilon;
            cfg.params.seed = seed;
            const ApproxResult r = edit_approx_boot(s1, s2, cfg);
            row.estimate = r.estimate;
            row.charged_queries = r.meter.charged;
            row.time_units = r.meter.time_units;
            row.factor_bound = r.factor_bound;
            row.bound_held = r.depth <= bootstrap_depth_limit(spec.epsilon) &&
                             (!r.script || validate_script(s1, s2, *r.script));
            break;
        }
        case Algorithm::mr: {
            const ClusterConfig cfg = ClusterConfig::for_problem(std::max(s1.size(), s2.size()), spec.x, spec.epsilon);
            const MrEditResult r = mr_edit(s1, s2, spec.epsilon, cfg);
            row.estimate = r.approx.estimate;
            row.charged_queries = r.approx.meter.charged;
            row.time_units = r.approx.meter.time_units;
            row.rounds = r.rounds;
            row.max_machine_mem = r.max_machine_mem();
            row.factor_bound = r.approx.factor_bound;
            row.bound_held = row.max_machine_mem <= cfg.mem_per_machine;
            break;
        }
        default:
            throw SpecError("not an edit-distance algorithm");
    }
    if (std::max(s1.size(), s2.size()) <= exact_cap) {
        const bool held = row.bound_held;
        row.exact = edit_distance(s1, s2);
        set_ratio(row);
        row.bound_held = row.bound_held && held;
    }
    return row;
}

// Threshold rows: estimate = marked pairs (i < j); the bound check is
// completeness plus soundness within the declared radius.
ReportRow run_threshold(const ExperimentSpec &spec, std::uint64_t seed) {
    const DistanceTable table = random_graph_metric(spec.n, seed);
    MeteredMetric metric = make_metric(table);
    const Distance t = std::max<Distance>(1, distance_quantile(table, spec.quantile));
    ThresholdMatrix marked;
    ReportRow row;
    if (spec.algorithm == Algorithm::threshold) {
        marked = estimate_with_threshold(metric, t);
        row.factor_bound = 3.0;
    } else {
        const auto degree = static_cast<std::uint64_t>(
            std::ceil(std::pow(static_cast<double>(spec.n), 2.0 * spec.epsilon) - 1e-9));
        marked = fast_estimate_with_threshold(metric, t, spec.epsilon, std::max<std::uint64_t>(1, degree), seed);
        row.factor_bound = fast_factor(spec.epsilon);
    }
    row.n = spec.n;
    row.seed = seed;
    row.algorithm = std::string(to_string(spec.algorithm));
    row.epsilon = spec.epsilon;
    row.charged_queries = metric.meter().charged();
    row.time_units = metric.meter().time_units();
    const double radius = row.factor_bound * static_cast<double>(t);
    for (std::size_t i = 0; i < table.n; ++i) {
        for (std::size_t j = i + 1; j < table.n; ++j) {
            const bool near = table(i, j) <= t;
            if (marked(i, j)) {
                ++row.estimate;
                if (static_cast<double>(table(i, j)) > radius) row.bound_held = false;
            } else if (near) {
                row.bound_held = false;
            }
        }
    }
    return row;
}

ReportRow from_json_row(const json &j) {
    ReportRow row;
    row.n = j.at("n").get<std::size_t>();
    row.algorithm = j.at("algorithm").get<std::string>();
    row.epsilon = j.at("epsilon").get<double>();
    if (!j.at("exact").is_null()) row.exact = j.at("exact").get<std::int64_t>();
    row.estimate = j.at("estimate").get<std::int64_t>();
    if (!j.at("ratio").is_null()) row.ratio = j.at("ratio").get<double>();
    row.charged_queries = j.at("charged_queries").get<std::uint64_t>();
    row.time_units = j.at("time_units").get<std::uint64_t>();
    row.rounds = j.at("rounds").get<std::size_t>();
    row.max_machine_mem = j.at("max_machine_mem").get<std::uint64_t>();
    return row;
}

}  // namespace

std::optional<Algorithm> parse_algorithm(std::string_view id) noexcept {
    for (const auto &[a, name] : kAlgorithms) {
        if (name == id) return a;
    }
    return std::nullopt;
}

std::string_view to_string(Algorithm a) noexcept {
    for (const auto &[alg, name] : kAlgorithms) {
        if (alg == a) return name;
    }
    return "?";
}

void ExperimentSpec::validate() const {
    if (n == 0) throw SpecError("n must be positive");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw SpecError("epsilon must be positive");
    if (!(x > 0.0) || x > 1.0) throw SpecError("x must lie in (0, 1]");
    if (repetitions == 0) throw SpecError("repetitions must be positive");
    if (planted_ops > n) throw SpecError("planted_ops must not exceed n");
    if (!(quantile >= 0.0) || quantile > 1.0) throw SpecError("quantile must lie in [0, 1]");
    if ((algorithm == Algorithm::threshold || algorithm == Algorithm::fast_threshold) && n < 2) {
        throw SpecError("threshold experiments need at least 2 points");
    }
}

ExperimentSpec ExperimentSpec::from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw SpecError(std::string("spec is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SpecError("spec must be a JSON object");
    ExperimentSpec spec;
    try {
        for (const auto &[key, value] : doc.items()) {
            if (key == "n") {
                spec.n = value.get<std::size_t>();
            } else if (key == "seed") {
                spec.seed = value.get<std::uint64_t>();
            } else if (key == "epsilon") {
                spec.epsilon = value.get<double>();
            } else if (key == "x") {
                spec.x = value.get<double>();
            } else if (key == "planted_ops") {
                spec.planted_ops = value.get<std::size_t>();
            } else if (key == "repetitions") {
                spec.repetitions = value.get<std::size_t>();
            } else if (key == "quantile") {
                spec.quantile = value.get<double>();
            } else if (key == "algorithm") {
                const auto a = parse_algorithm(value.get<std::string>());
                if (!a) throw SpecError("unknown algorithm '" + value.get<std::string>() + "'");
                spec.algorithm = *a;
            } else {
                throw SpecError("unknown spec key '" + key + "'");
            }
        }
    } catch (const json::exception &e) {
        throw SpecError(std::string("bad spec field: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::pair<std::string, std::string> gen_pair(std::size_t n, std::size_t planted_ops, std::uint64_t seed) {
    if (planted_ops > n) throw SpecError("planted_ops must not exceed n");
    Rng rng(mix_seed(seed, 0x9e11ULL));
    std::string s1(n, 'a');
    for (char &c : s1) c = static_cast<char>('a' + uniform_below(rng, 4));
    std::string s2 = s1;
    for (std::size_t k = 0; k < planted_ops; ++k) {
        const auto kind = uniform_below(rng, 3);
        const char c = static_cast<char>('a' + uniform_below(rng, 4));
        if (kind == 0 || s2.empty()) {
            s2.insert(s2.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, s2.size() + 1)), c);
        } else if (kind == 1) {
            s2.erase(s2.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, s2.size())));
        } else {
            s2[uniform_below(rng, s2.size())] = c;
        }
    }
    return {std::move(s1), std::move(s2)};
}

std::size_t exact_cap_from_env() {
    if (const char *v = std::getenv("SUBQUAD_EXACT_CAP")) {
        try {
            return parse_number<std::size_t>(v);
        } catch (const std::invalid_argument &) {
        }
    }
    return 4096;
}

std::vector<ReportRow> run_experiment(const ExperimentSpec &spec, std::size_t exact_cap) {
    spec.validate();
    const bool metric = spec.algorithm == Algorithm::threshold || spec.algorithm == Algorithm::fast_threshold;
    std::vector<ReportRow> rows(spec.repetitions);
    std::vector<std::exception_ptr> errors(spec.repetitions);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < spec.repetitions; ++r) {
        try {
            const std::uint64_t seed = spec.seed + r;
            rows[r] = metric ? run_threshold(spec, seed) : run_edit(spec, seed, exact_cap);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    for (const auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ReportRow &a, const ReportRow &b) { return std::tie(a.n, a.seed) < std::tie(b.n, b.seed); });
    return rows;
}

std::string to_csv(const std::vector<ReportRow> &rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto &r : rows) {
        out += std::to_string(r.n) + ',' + r.algorithm + ',' + format_double(r.epsilon) + ',' +
               (r.exact ? std::to_string(*r.exact) : std::string()) + ',' + std::to_string(r.estimate) + ',' +
               (r.ratio ? format_double(*r.ratio) : std::string()) + ',' + std::to_string(r.charged_queries) + ',' +
               std::to_string(r.time_units) + ',' + std::to_string(r.rounds) + ',' + std::to_string(r.max_machine_mem) +
               '\n';
    }
    return out;
}

std::string to_json(const std::vector<ReportRow> &rows) {
    json arr = json::array();
    for (const auto &r : rows) {
        arr.push_back({{"n", r.n},
                       {"algorithm", r.algorithm},
                       {"epsilon", r.epsilon},
                       {"exact", r.exact ? json(*r.exact) : json(nullptr)},
                       {"estimate", r.estimate},
                       {"ratio", r.ratio ? json(*r.ratio) : json(nullptr)},
                       {"charged_queries", r.charged_queries},
                       {"time_units", r.time_units},
                       {"rounds", r.rounds},
                       {"max_machine_mem", r.max_machine_mem}});
    }
    return json{{"rows", arr}}.dump(2) + "\n";
}

std::vector<ReportRow> parse_csv(std::string_view text) {
    std::vector<ReportRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::invalid_argument("missing CSV header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view rest = line;
        for (;;) {
            const auto comma = rest.find(',');
            f.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (f.size() != 10) throw std::invalid_argument("CSV row needs 10 fields");
        ReportRow r;
        r.n = parse_number<std::size_t>(f[0]);
        r.algorithm = std::string(f[1]);
        r.epsilon = parse_number<double>(f[2]);
        if (!f[3].empty()) r.exact = parse_number<std::int64_t>(f[3]);
        r.estimate = parse_number<std::int64_t>(f[4]);
        if (!f[5].empty()) r.ratio = parse_number<double>(f[5]);
        r.charged_queries = parse_number<std::uint64_t>(f[6]);
        r.time_units = parse_number<std::uint64_t>(f[7]);
        r.rounds = parse_number<std::size_t>(f[8]);
        r.max_machine_mem = parse_number<std::uint64_t>(f[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ReportRow> parse_json(std::string_view text) {
    const json doc = json::parse(text);
    std::vector<ReportRow> rows;
    for (const auto &j : doc.at("rows")) rows.push_back(from_json_row(j));
    return rows;
}

bool all_within_bounds(const std::vector<ReportRow> &rows) noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow &r) { return r.bound_held; });
}

double growth_slope(const std::vector<ReportRow> &rows) {
    std::map<std::size_t, std::pair<double, std::size_t>> by_n;
    for (const auto &r : rows) {
        auto &[sum, count] = by_n[r.n];
        sum += static_cast<double>(r.charged_queries);
        ++count;
    }
    if (by_n.size() < 2) throw std::invalid_argument("slope needs at least two sizes");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto &[n, acc] : by_n) {
        const double lx = std::log(static_cast<double>(n));
        const double ly = std::log(std::max(1.0, acc.first / static_cast<double>(acc.second)));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const auto k = static_cast<double>(by_n.size());
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace subquad
