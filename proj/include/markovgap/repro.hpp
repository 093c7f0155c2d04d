#pragma once

// Closed-form antisymmetric-state formulas, reproduction tables, the naive
// Renyi CMI witness search and the property-suite runner.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "markovgap/states.hpp"

namespace markovgap {

// CMI of P_k / C(d, k) at k = ceil((d + 1) / 2), d >= 3:
// 2 ln((d + 2) / d) for even d, ln((d + 3) / (d - 1)) for odd d.
double cmi_antisym_formula(std::size_t d);
std::size_t antisym_block_size(std::size_t d);  // ceil((d + 1) / 2)

double log_binomial(std::size_t n, std::size_t k);
// 2 ln C(d, k-1) - ln C(d, k-2) - ln C(d, k), for 2 <= k <= d.
double cmi_antisym_binomial(std::size_t d, std::size_t k);

// Smallest d in [d_min, d_max] from which ln sqrt(4/3) > cmi_antisym_formula
// holds for every larger d in the range.
std::optional<std::size_t> crossover_scan(std::size_t d_min, std::size_t d_max);
bool decay_bound_check(std::size_t d_max);

enum class LogBase { nats, bits };
enum class OutputFormat { csv, json };

struct RunConfig {
    LogBase log_base = LogBase::nats;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    std::size_t dim_cap = kDefaultDimCap;
    OutputFormat format = OutputFormat::csv;
    std::string output_path;

    void validate() const;
    double display(double nats) const;
};

struct TableRow {
    std::size_t d = 0;
    std::size_t k = 0;
    double cmi_formula = 0.0;
    std::optional<double> cmi_dense;
    double delta0_constant = 0.0;
    double delta0_twirl = 0.0;
    bool separated = false;
};

inline constexpr const char* kTableHeader = "d,k,cmi_formula,cmi_dense,delta0_paper,delta0_twirl,separated";

// Rows hold nats; rendering applies the configured log base.
std::vector<TableRow> compute_table(const RunConfig& cfg, const std::vector<std::size_t>& d_list);
std::string render_table_csv(const std::vector<TableRow>& rows, const RunConfig& cfg);
nlohmann::json render_table_json(const std::vector<TableRow>& rows, const RunConfig& cfg);
std::vector<TableRow> parse_table_csv(const std::string& text);

struct NaiveRenyiWitness {
    std::uint64_t seed = 0;
    std::uint64_t sample = 0;
    std::size_t rank = 1;
    double alpha = 0.0;
    double value = 0.0;
    Operator state;
};

// Seeded search over three-qubit states for I'_alpha < threshold, alpha in {1/2, 2}.
std::optional<NaiveRenyiWitness> find_naive_renyi_witness(std::uint64_t seed, std::uint64_t max_samples,
                                                          double threshold = -0.01);
// Regenerates the sample from (seed, sample) and recomputes I'_alpha.
NaiveRenyiWitness replay_naive_renyi_witness(std::uint64_t seed, std::uint64_t sample, double alpha);
DensityOperator naive_witness_sample(std::uint64_t seed, std::uint64_t sample, std::size_t* rank = nullptr);

struct PropertyResult {
    std::string name;
    std::size_t samples = 0;
    double worst_margin = 0.0;  // min over samples of (slack - violation)
    bool pass = true;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<PropertyResult> properties;

    bool passed() const;
};

const std::vector<std::string>& property_suite_names();
// Slacks scale with cfg.tol relative to the default 1e-9.
SuiteReport run_property_suite(const RunConfig& cfg, const std::string& suite);

}  // namespace markovgap
