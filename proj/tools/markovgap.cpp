// markovgap: reproduction tables, crossover and decay checks, Delta-type
// optimizations and property suites from the command line.
//
// Exit codes: 0 success, 1 property failure, 2 configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "markovgap/markov_opt.hpp"
#include "markovgap/measures.hpp"
#include "markovgap/repro.hpp"
#include "markovgap/serialize.hpp"

using namespace markovgap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitConfigError = 2;

struct ConfigError : Error {
    using Error::Error;
};

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + cfg.output_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    if (!out) throw ConfigError("failed writing output file: " + cfg.output_path);
}

std::vector<std::size_t> parse_d_list(const std::string& spec) {
    // Comma-separated values and inclusive ranges, e.g. "4,5,26-28".
    std::vector<std::size_t> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            const auto dash = item.find('-');
            if (dash == std::string::npos) {
                out.push_back(std::stoul(item));
            } else {
                const std::size_t lo = std::stoul(item.substr(0, dash)), hi = std::stoul(item.substr(dash + 1));
                if (lo > hi) throw ConfigError("empty range: " + item);
                for (std::size_t d = lo; d <= hi; ++d) out.push_back(d);
            }
        } catch (const std::logic_error&) {
            throw ConfigError("malformed d list entry: " + item);
        }
    }
    if (out.empty()) throw ConfigError("d list is empty");
    for (auto d : out)
        if (d < 3) throw ConfigError("table rows need d >= 3");
    return out;
}

std::string csv_line(std::initializer_list<std::string> fields) {
    std::string line;
    for (const auto& f : fields) {
        if (!line.empty()) line += ',';
        line += f;
    }
    return line + '\n';
}

std::string report_csv(const OptimizationReport& r, const RunConfig& cfg) {
    return csv_line({"quantity", "value", "bound_kind", "iterations", "restarts", "seed"}) +
           csv_line({r.quantity, format_number(cfg.display(r.value)), to_string(r.bound_kind),
                     std::to_string(r.iterations), std::to_string(r.restarts), std::to_string(r.seed)});
}

json report_json(const OptimizationReport& r, const RunConfig& cfg) {
    json j = report_to_json(r);
    j["value"] = cfg.display(r.value);
    j["log_base"] = cfg.log_base == LogBase::bits ? "bits" : "nats";
    return j;
}

struct OptArgs {
    std::string state = "antisym";
    std::size_t d = 4;
    std::size_t k = 3;
    std::string quantity = "upper";
    std::string objective = "d0";
    double alpha = 0.5;
    double epsilon = 0.1;
    std::size_t copies = 2;
    std::size_t restarts = 8;
    std::size_t iterations = 2000;
    std::size_t blocks = 3;
    std::size_t threads = 1;
    std::size_t rank = 2;
};

DensityOperator named_state(const OptArgs& a, const RunConfig& cfg) {
    if (a.state == "antisym") {
        if (a.k < 3 || a.k > a.d) throw ConfigError("antisymmetric state needs 3 <= k <= d for a nontrivial C");
        return uniform_antisym_state(a.d, a.k, cfg.dim_cap);
    }
    if (a.state == "ghz") return ghz_state(3);
    if (a.state == "random") {
        if (a.rank < 1 || a.rank > 8) throw ConfigError("random three-qubit state needs 1 <= rank <= 8");
        return random_density(Layout({2, 2, 2}), a.rank, cfg.seed);
    }
    throw ConfigError("unknown state: " + a.state);
}

Objective named_objective(const OptArgs& a) {
    if (a.objective == "d0") return Objective::renyi_order(0.0);
    if (a.objective == "relent") return Objective::renyi_order(1.0);
    if (a.objective == "dmin") return Objective::fidelity_based();
    if (a.objective == "renyi") {
        if (!(a.alpha > 0.0)) throw ConfigError("Renyi objective needs alpha > 0");
        return Objective::renyi_order(a.alpha);
    }
    throw ConfigError("unknown objective: " + a.objective);
}

int run_opt(const OptArgs& a, const RunConfig& cfg) {
    SearchConfig search;
    search.max_blocks = a.blocks;
    search.restarts = a.restarts;
    search.iterations = a.iterations;
    search.seed = cfg.seed;
    search.dim_cap = cfg.dim_cap;
    search.threads = a.threads;

    std::vector<OptimizationReport> reports;
    if (a.quantity == "upper") {
        reports.push_back(delta_upper(named_state(a, cfg), named_objective(a), search));
    } else if (a.quantity == "lower") {
        if (a.state != "antisym") throw ConfigError("closed-form lower bound is available for the antisymmetric state");
        reports.push_back(delta0_antisym_lower(a.d, a.k));
    } else if (a.quantity == "werner") {
        reports.push_back(werner_d0_minimize(a.d));
    } else if (a.quantity == "smooth") {
        SmoothingConfig sc;
        sc.seed = cfg.seed;
        reports.push_back(smooth_delta0_lower(named_state(a, cfg), a.epsilon, sc));
    } else if (a.quantity == "tensor-power") {
        if (a.state != "antisym") throw ConfigError("tensor-power bounds are defined for the antisymmetric state");
        auto [lower, upper] = tensor_power_delta0_bounds(a.d, a.k, a.copies, search);
        reports.push_back(std::move(lower));
        reports.push_back(std::move(upper));
    } else {
        throw ConfigError("unknown quantity: " + a.quantity);
    }

    if (cfg.format == OutputFormat::csv) {
        std::string text = csv_line({"quantity", "value", "bound_kind", "iterations", "restarts", "seed"});
        for (const auto& r : reports) {
            const std::string rows = report_csv(r, cfg);
            text += rows.substr(rows.find('\n') + 1);
        }
        emit(cfg, text);
    } else if (reports.size() == 1) {
        emit(cfg, dump_json(report_json(reports[0], cfg)));
    } else {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(report_json(r, cfg));
        emit(cfg, dump_json(arr));
    }
    return kExitOk;
}

int run_verify(const std::string& suite, const RunConfig& cfg) {
    std::vector<std::string> names;
    if (suite == "all") {
        names = property_suite_names();
    } else {
        const auto& known = property_suite_names();
        if (std::find(known.begin(), known.end(), suite) == known.end())
            throw ConfigError("unknown property suite: " + suite);
        names = {suite};
    }
    bool ok = true;
    std::vector<SuiteReport> reports;
    for (const auto& n : names) {
        reports.push_back(run_property_suite(cfg, n));
        ok = ok && reports.back().passed();
    }
    if (cfg.format == OutputFormat::csv) {
        std::string text = csv_line({"suite", "name", "samples", "worst_margin", "pass"});
        for (const auto& r : reports)
            for (const auto& p : r.properties)
                text += csv_line({r.suite, p.name, std::to_string(p.samples), format_number(p.worst_margin),
                                  p.pass ? "true" : "false"});
        emit(cfg, text);
    } else if (reports.size() == 1) {
        emit(cfg, dump_json(suite_report_to_json(reports[0])));
    } else {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(suite_report_to_json(r));
        emit(cfg, dump_json(arr));
    }
    for (const auto& r : reports)
        for (const auto& p : r.properties)
            if (!p.pass) std::cerr << "FAIL " << r.suite << '/' << p.name << " worst_margin=" << format_number(p.worst_margin) << '\n';
    return ok ? kExitOk : kExitPropertyFailure;
}

int run_witness(std::uint64_t samples, const std::string& replay, const RunConfig& cfg) {
    if (!replay.empty()) {
        std::ifstream in(replay);
        if (!in) throw ConfigError("cannot open witness file: " + replay);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("witness file is not JSON: ") + e.what());
        }
        const NaiveRenyiWitness stored = witness_from_json(j);
        const NaiveRenyiWitness again = replay_naive_renyi_witness(stored.seed, stored.sample, stored.alpha);
        const bool same = dump_json(witness_to_json(stored)) == dump_json(witness_to_json(again));
        emit(cfg, dump_json({{"replayed", witness_to_json(again)}, {"identical", same}, {"negative", again.value < 0.0}}));
        return same && again.value < 0.0 ? kExitOk : kExitPropertyFailure;
    }
    const auto w = find_naive_renyi_witness(cfg.seed, samples);
    if (!w) {
        emit(cfg, dump_json({{"found", false}, {"seed", cfg.seed}, {"samples", samples}}));
        return kExitPropertyFailure;
    }
    emit(cfg, dump_json(witness_to_json(*w)));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Markov-gap numerics: antisymmetric-state CMI, Delta bounds and property suites"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string log_base = "nats", format = "csv";
    app.add_option("--seed", cfg.seed, "Base seed for every random stream")->capture_default_str();
    app.add_option("--tol", cfg.tol, "Property tolerance; slacks scale with tol / 1e-9")->capture_default_str();
    app.add_option("--dim-cap", cfg.dim_cap, "Largest dense operator dimension")
        ->envname("MARKOVGAP_DIM_CAP")
        ->capture_default_str();
    app.add_option("--log-base", log_base, "Display unit")->check(CLI::IsMember({"nats", "bits"}))->capture_default_str();
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--out", cfg.output_path, "Write output to PATH instead of stdout");

    auto* table = app.add_subcommand("table", "Closed-form and dense CMI against the Delta_0 lower bounds");
    std::string d_list = "3-30";
    table->add_option("--d", d_list, "Dimensions, e.g. 4,5,26-28")->capture_default_str();

    auto* crossover = app.add_subcommand("crossover", "Smallest d from which ln sqrt(4/3) exceeds the CMI");
    std::size_t d_min = 3, d_max = 100;
    crossover->add_option("--d-min", d_min)->capture_default_str();
    crossover->add_option("--d-max", d_max)->capture_default_str();

    auto* decay = app.add_subcommand("decay", "Check CMI <= 4/(d-1) for 3 <= d <= d-max");
    std::size_t decay_max = 10000;
    decay->add_option("--d-max", decay_max)->capture_default_str();

    auto* opt = app.add_subcommand("opt", "Delta-type bounds for a named state");
    OptArgs oa;
    opt->add_option("--state", oa.state, "antisym | ghz | random")->capture_default_str();
    opt->add_option("-d,--d", oa.d, "Local dimension of the antisymmetric state")->capture_default_str();
    opt->add_option("-k,--k", oa.k, "Number of factors of the antisymmetric state")->capture_default_str();
    opt->add_option("--rank", oa.rank, "Rank of the random three-qubit state")->capture_default_str();
    opt->add_option("--quantity", oa.quantity, "upper | lower | werner | smooth | tensor-power")->capture_default_str();
    opt->add_option("--objective", oa.objective, "d0 | relent | renyi | dmin")->capture_default_str();
    opt->add_option("--alpha", oa.alpha, "Renyi order for --objective renyi")->capture_default_str();
    opt->add_option("--epsilon", oa.epsilon, "Smoothing radius")->capture_default_str();
    opt->add_option("--copies", oa.copies, "Number of copies for tensor-power bounds")->capture_default_str();
    opt->add_option("--restarts", oa.restarts)->capture_default_str();
    opt->add_option("--iterations", oa.iterations, "Coordinate probes per restart")->capture_default_str();
    opt->add_option("--blocks", oa.blocks, "Maximal number of Markov blocks")->capture_default_str();
    opt->add_option("--threads", oa.threads, "Worker threads for restarts")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Run property suites");
    std::string suite = "all";
    verify->add_option("--suite", suite, "algebra | measures | markov | optimization | duality | all")
        ->capture_default_str();

    auto* witness = app.add_subcommand("witness", "Search or replay a negative naive Renyi CMI witness");
    std::uint64_t samples = 100000;
    std::string replay;
    witness->add_option("--samples", samples, "Maximal number of seeded samples")->capture_default_str();
    witness->add_option("--replay", replay, "Witness JSON file to regenerate and compare");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        cfg.log_base = log_base == "bits" ? LogBase::bits : LogBase::nats;
        cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
        try {
            cfg.validate();
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }

        if (table->parsed()) {
            const auto rows = compute_table(cfg, parse_d_list(d_list));
            emit(cfg, cfg.format == OutputFormat::csv ? render_table_csv(rows, cfg)
                                                      : dump_json(render_table_json(rows, cfg)));
            return kExitOk;
        }
        if (crossover->parsed()) {
            if (d_min < 3 || d_min >= d_max) throw ConfigError("crossover needs 3 <= d-min < d-max");
            const auto c = crossover_scan(d_min, d_max);
            if (cfg.format == OutputFormat::csv)
                emit(cfg, csv_line({"d_min", "d_max", "crossover"}) +
                              csv_line({std::to_string(d_min), std::to_string(d_max), c ? std::to_string(*c) : "none"}));
            else
                emit(cfg, dump_json({{"d_min", d_min}, {"d_max", d_max}, {"crossover", c ? json(*c) : json(nullptr)}}));
            return kExitOk;
        }
        if (decay->parsed()) {
            if (decay_max < 3) throw ConfigError("decay needs d-max >= 3");
            const bool ok = decay_bound_check(decay_max);
            if (cfg.format == OutputFormat::csv)
                emit(cfg, csv_line({"d_max", "holds"}) + csv_line({std::to_string(decay_max), ok ? "true" : "false"}));
            else
                emit(cfg, dump_json({{"d_max", decay_max}, {"holds", ok}}));
            return ok ? kExitOk : kExitPropertyFailure;
        }
        if (opt->parsed()) return run_opt(oa, cfg);
        if (verify->parsed()) return run_verify(suite, cfg);
        if (witness->parsed()) return run_witness(samples, replay, cfg);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitConfigError;
}
