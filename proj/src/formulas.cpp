#include <cmath>
#include <limits>
#include <sstream>

#include "markovgap/markov_opt.hpp"
#include "markovgap/measures.hpp"
#include "markovgap/repro.hpp"
#include "markovgap/rng.hpp"
#include "markovgap/serialize.hpp"

namespace markovgap {

double cmi_antisym_formula(std::size_t d) {
    if (d < 3) throw Error("closed-form CMI needs d >= 3");
    const double x = static_cast<double>(d);
    if (d % 2 == 0) return 2.0 * std::log((x + 2.0) / x);
    return std::log((x + 3.0) / (x - 1.0));
}

std::size_t antisym_block_size(std::size_t d) { return d / 2 + 1; }

double log_binomial(std::size_t n, std::size_t k) {
    if (k > n) throw Error("binomial needs k <= n");
    const double x = static_cast<double>(n), y = static_cast<double>(k);
    return std::lgamma(x + 1.0) - std::lgamma(y + 1.0) - std::lgamma(x - y + 1.0);
}

double cmi_antisym_binomial(std::size_t d, std::size_t k) {
    if (k < 2 || k > d) throw Error("binomial CMI needs 2 <= k <= d");
    // 2 ln C(d,k-1) - ln C(d,k-2) - ln C(d,k) as two logs of consecutive binomial
    // ratios; each ratio is a single correctly rounded division.
    const double dd = static_cast<double>(d), kk = static_cast<double>(k);
    const double lower = (dd - kk + 2.0) / (kk - 1.0);  // C(d,k-1) / C(d,k-2)
    const double upper = kk / (dd - kk + 1.0);          // C(d,k-1) / C(d,k)
    return std::log(lower) + std::log(upper);
}

std::optional<std::size_t> crossover_scan(std::size_t d_min, std::size_t d_max) {
    if (d_min < 3 || d_min >= d_max) throw Error("crossover scan needs 3 <= d_min < d_max");
    const double constant = separable_constant();
    std::optional<std::size_t> found;
    for (std::size_t d = d_max + 1; d-- > d_min;) {
        if (!(constant > cmi_antisym_formula(d))) break;
        found = d;
    }
    return found;
}

bool decay_bound_check(std::size_t d_max) {
    if (d_max < 3) throw Error("decay check needs d_max >= 3");
    for (std::size_t d = 3; d <= d_max; ++d)
        if (cmi_antisym_formula(d) > 4.0 / static_cast<double>(d - 1) + 1e-12) return false;
    return true;
}

void RunConfig::validate() const {
    if (!(std::isfinite(tol) && tol > 0.0)) throw Error("tolerance must be positive and finite");
    if (dim_cap < 4) throw Error("dimension cap must be at least 4");
}

double RunConfig::display(double nats) const { return log_base == LogBase::bits ? nats / std::log(2.0) : nats; }

std::vector<TableRow> compute_table(const RunConfig& cfg, const std::vector<std::size_t>& d_list) {
    cfg.validate();
    std::vector<TableRow> rows;
    for (std::size_t d : d_list) {
        TableRow row;
        row.d = d;
        row.k = antisym_block_size(d);
        row.cmi_formula = cmi_antisym_formula(d);
        if (std::pow(static_cast<double>(d), static_cast<double>(row.k)) <= static_cast<double>(cfg.dim_cap))
            row.cmi_dense = cmi(uniform_antisym_state(d, row.k, cfg.dim_cap));
        row.delta0_constant = separable_constant();
        row.delta0_twirl = werner_d0_minimize(d).value;
        row.separated = row.delta0_constant > row.cmi_formula;
        rows.push_back(row);
    }
    return rows;
}

std::string render_table_csv(const std::vector<TableRow>& rows, const RunConfig& cfg) {
    std::ostringstream os;
    os << kTableHeader << '\n';
    for (const auto& r : rows) {
        os << r.d << ',' << r.k << ',' << format_number(cfg.display(r.cmi_formula)) << ',';
        if (r.cmi_dense) os << format_number(cfg.display(*r.cmi_dense));
        os << ',' << format_number(cfg.display(r.delta0_constant)) << ',' << format_number(cfg.display(r.delta0_twirl))
           << ',' << (r.separated ? "true" : "false") << '\n';
    }
    return os.str();
}

nlohmann::json render_table_json(const std::vector<TableRow>& rows, const RunConfig& cfg) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"d", r.d},
                       {"k", r.k},
                       {"cmi_formula", cfg.display(r.cmi_formula)},
                       {"cmi_dense", r.cmi_dense ? json(cfg.display(*r.cmi_dense)) : json(nullptr)},
                       {"delta0_paper", cfg.display(r.delta0_constant)},
                       {"delta0_twirl", cfg.display(r.delta0_twirl)},
                       {"separated", r.separated}});
    }
    return {{"log_base", cfg.log_base == LogBase::bits ? "bits" : "nats"}, {"rows", std::move(out)}};
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw Error("trailing characters in number: " + s);
    return v;
}

}  // namespace

std::vector<TableRow> parse_table_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kTableHeader) throw Error("unexpected table header");
    std::vector<TableRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 7) throw Error("table row must have 7 fields");
        try {
            TableRow r;
            r.d = std::stoul(f[0]);
            r.k = std::stoul(f[1]);
            r.cmi_formula = parse_double(f[2]);
            if (!f[3].empty()) r.cmi_dense = parse_double(f[3]);
            r.delta0_constant = parse_double(f[4]);
            r.delta0_twirl = parse_double(f[5]);
            if (f[6] != "true" && f[6] != "false") throw Error("separated must be true or false");
            r.separated = f[6] == "true";
            rows.push_back(r);
        } catch (const std::logic_error&) {
            throw Error("malformed table row: " + line);
        }
    }
    return rows;
}

DensityOperator naive_witness_sample(std::uint64_t seed, std::uint64_t sample, std::size_t* rank) {
    SplitMix64 rng(derive_seed(seed, 0x7717, sample));
    const std::size_t r = 1 + static_cast<std::size_t>(rng.below(2));
    if (rank) *rank = r;
    return random_density(Layout({2, 2, 2}), r, rng.next());
}

std::optional<NaiveRenyiWitness> find_naive_renyi_witness(std::uint64_t seed, std::uint64_t max_samples,
                                                          double threshold) {
    for (std::uint64_t s = 0; s < max_samples; ++s) {
        std::size_t rank = 0;
        const DensityOperator rho = naive_witness_sample(seed, s, &rank);
        for (double alpha : {0.5, 2.0}) {
            const double v = naive_renyi_cmi(rho, alpha);
            if (v < threshold) return NaiveRenyiWitness{seed, s, rank, alpha, v, rho.op()};
        }
    }
    return std::nullopt;
}

NaiveRenyiWitness replay_naive_renyi_witness(std::uint64_t seed, std::uint64_t sample, double alpha) {
    std::size_t rank = 0;
    const DensityOperator rho = naive_witness_sample(seed, sample, &rank);
    return NaiveRenyiWitness{seed, sample, rank, alpha, naive_renyi_cmi(rho, alpha), rho.op()};
}

}  // namespace markovgap
