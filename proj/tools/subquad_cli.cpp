// subquad: planted-instance experiments for the edit-distance approximations.
//
//   subquad gen    --n 64 --ops 5 --seed 1
//   subquad run    --algo quantum7 --n 256 --epsilon 0.5 --reps 20
//   subquad run    --spec experiment.json --format json
//   subquad sweep  --algo threshold --ns 64,128,256,512 --reps 10
//   subquad mrsim  --n 256 --ops 16 --x 0.888889
//
// Exit status: 0 when every row respects its factor bound, 1 when one does
// not, 2 on invalid input.

#include "subquad/experiment.hpp"
#include "subquad/mr_edit.hpp"
#include "subquad/strings.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace subquad;

struct Common {
    std::string algo = "quantum7";
    std::size_t n = 256;
    std::uint64_t seed = 1;
    double epsilon = 0.5;
    double x = 8.0 / 9.0;
    std::size_t ops = 8;
    std::size_t reps = 1;
    double quantile = 0.05;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App *cmd, Common &c, bool with_n) {
    cmd->add_option("--algo", c.algo, "quantum7 | bootstrap | mr | threshold | fast-threshold");
    if (with_n) cmd->add_option("--n", c.n, "string length or number of points");
    cmd->add_option("--seed", c.seed, "base seed; repetition r uses seed + r");
    cmd->add_option("--epsilon", c.epsilon);
    cmd->add_option("--x", c.x, "machine exponent for mr");
    cmd->add_option("--ops", c.ops, "planted random edits");
    cmd->add_option("--reps", c.reps);
    cmd->add_option("--quantile", c.quantile, "threshold quantile for the metric algorithms");
    cmd->add_option("--out", c.out, "write here instead of stdout");
    cmd->add_option("--format", c.format)->check(CLI::IsMember({"csv", "json"}));
}

ExperimentSpec to_spec(const Common &c, std::size_t n) {
    const auto algo = parse_algorithm(c.algo);
    if (!algo) throw SpecError("unknown algorithm '" + c.algo + "'");
    ExperimentSpec spec;
    spec.algorithm = *algo;
    spec.n = n;
    spec.seed = c.seed;
    spec.epsilon = c.epsilon;
    spec.x = c.x;
    spec.planted_ops = c.ops;
    spec.repetitions = c.reps;
    spec.quantile = c.quantile;
    spec.validate();
    return spec;
}

void emit(const std::string &text, const std::string &path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

std::string read_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SpecError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int report(const std::vector<ReportRow> &rows, const Common &c, std::optional<double> slope = std::nullopt) {
    if (c.format == "json") {
        auto doc = nlohmann::json::parse(to_json(rows));
        if (slope) doc["slope"] = *slope;
        emit(doc.dump(2) + "\n", c.out);
    } else {
        emit(to_csv(rows), c.out);
    }
    if (slope) std::cerr << "log-log slope of charged_queries: " << *slope << "\n";
    for (const auto &r : rows) {
        if (!r.bound_held) {
            std::cerr << "factor bound violated: n=" << r.n << " seed=" << r.seed << " algorithm=" << r.algorithm
                      << "\n";
        }
    }
    return all_within_bounds(rows) ? 0 : 1;
}

std::vector<std::size_t> parse_sizes(const std::string &list) {
    std::vector<std::size_t> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoul(item));
        } catch (const std::exception &) {
            throw SpecError("bad size '" + item + "' in --ns");
        }
    }
    if (out.empty()) throw SpecError("--ns is empty");
    return out;
}

nlohmann::json trace_json(const RoundTrace &t) {
    return {{"round", t.round},
            {"machine_mem", t.machine_mem},
            {"machine_work", t.machine_work},
            {"shuffle_volume", t.shuffle_volume},
            {"shuffle_bytes", t.shuffle_bytes}};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Subquadratic edit-distance approximation experiments"};
    app.require_subcommand(1);

    Common gen_opts;
    auto *gen = app.add_subcommand("gen", "print a planted pair, one string per line");
    gen->add_option("--n", gen_opts.n);
    gen->add_option("--ops", gen_opts.ops);
    gen->add_option("--seed", gen_opts.seed);
    gen->add_option("--out", gen_opts.out);

    Common run_opts;
    std::string spec_path;
    auto *run = app.add_subcommand("run", "run one experiment and print its rows");
    add_common(run, run_opts, true);
    run->add_option("--spec", spec_path, "JSON experiment spec (overrides the flags)");

    Common sweep_opts;
    sweep_opts.algo = "threshold";
    sweep_opts.reps = 10;
    std::string sizes = "64,128,256,512";
    auto *sweep = app.add_subcommand("sweep", "run one algorithm across sizes and fit the query growth");
    add_common(sweep, sweep_opts, false);
    sweep->add_option("--ns", sizes, "comma-separated sizes");

    Common mr_opts;
    mr_opts.algo = "mr";
    auto *mrsim = app.add_subcommand("mrsim", "run the MapReduce driver once and dump per-round traces as JSON");
    mrsim->add_option("--n", mr_opts.n);
    mrsim->add_option("--ops", mr_opts.ops);
    mrsim->add_option("--seed", mr_opts.seed);
    mrsim->add_option("--epsilon", mr_opts.epsilon);
    mrsim->add_option("--x", mr_opts.x);
    mrsim->add_option("--out", mr_opts.out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto [s1, s2] = gen_pair(gen_opts.n, gen_opts.ops, gen_opts.seed);
            emit(s1 + "\n" + s2 + "\n", gen_opts.out);
            return 0;
        }
        const std::size_t cap = exact_cap_from_env();
        if (run->parsed()) {
            const ExperimentSpec spec =
                spec_path.empty() ? to_spec(run_opts, run_opts.n) : ExperimentSpec::from_json(read_file(spec_path));
            return report(run_experiment(spec, cap), run_opts);
        }
        if (sweep->parsed()) {
            std::vector<ReportRow> rows;
            for (const std::size_t n : parse_sizes(sizes)) {
                const auto part = run_experiment(to_spec(sweep_opts, n), cap);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            return report(rows, sweep_opts, growth_slope(rows));
        }
        if (mrsim->parsed()) {
            ExperimentSpec spec = to_spec(mr_opts, mr_opts.n);
            const auto [s1, s2] = gen_pair(spec.n, spec.planted_ops, spec.seed);
            const ClusterConfig cfg = ClusterConfig::for_problem(std::max(s1.size(), s2.size()), spec.x, spec.epsilon);
            const MrEditResult r = mr_edit(s1, s2, spec.epsilon, cfg);
            const std::int64_t exact = edit_distance(s1, s2);
            nlohmann::json doc{{"n", spec.n},
                               {"epsilon", spec.epsilon},
                               {"x", spec.x},
                               {"machines", cfg.machines},
                               {"mem_per_machine", cfg.mem_per_machine},
                               {"exact", exact},
                               {"estimate", r.approx.estimate},
                               {"rounds", r.rounds},
                               {"subproblems", r.subproblems},
                               {"chosen_delta", r.chosen_delta},
                               {"max_machine_mem", r.max_machine_mem()},
                               {"traces", nlohmann::json::array()}};
            for (const auto &t : r.traces) doc["traces"].push_back(trace_json(t));
            emit(doc.dump(2) + "\n", mr_opts.out);
            const bool ok = r.approx.estimate >= exact &&
                            static_cast<double>(r.approx.estimate) <= r.approx.factor_bound * static_cast<double>(exact);
            return ok ? 0 : 1;
        }
    } catch (const SpecError &e) {
        std::cerr << "invalid experiment: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
