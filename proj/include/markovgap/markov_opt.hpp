#pragma once

// Delta-type quantities: infima of divergences from a tripartite state to the
// set of Markov states. Lower bounds come from closed-form certificate chains;
// upper bounds come from heuristic search and always carry a feasible candidate.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>

#include "markovgap/measures.hpp"
#include "markovgap/states.hpp"

namespace markovgap {

enum class BoundKind { exact, lower, upper };

std::string to_string(BoundKind kind);

struct Objective {
    enum class Kind { renyi, d0, relative_entropy, d_min };
    Kind kind = Kind::relative_entropy;
    double alpha = 1.0;

    // alpha == 0 selects D_0 and alpha == 1 the relative entropy.
    static Objective renyi_order(double alpha);
    static Objective fidelity_based() { return {Kind::d_min, 0.5}; }
    std::string name() const;
};

// Divergence of rho from sigma under the objective, via the public measures.
DivergenceValue evaluate_objective(const DensityOperator& rho, const DensityOperator& sigma, const Objective& obj);

struct SearchConfig {
    std::size_t max_blocks = 3;
    std::size_t restarts = 8;
    std::size_t iterations = 2000;  // coordinate probes per restart and block structure
    std::uint64_t seed = 0;
    bool rotate_c = true;           // include a unitary on C in the parameterization
    std::size_t dim_cap = kDefaultDimCap;
    // Worker threads for independent restarts; the result does not depend on it.
    std::size_t threads = 1;
    // Called for every evaluated candidate with the candidate state and its objective value.
    // Calls are serialized when threads > 1.
    std::function<void(const DensityOperator&, double)> observer;
};

using Candidate = std::variant<std::monostate, MarkovSpec, WernerParameter>;

struct OptimizationReport {
    std::string quantity;
    double value = 0.0;
    BoundKind bound_kind = BoundKind::upper;
    std::size_t iterations = 0;
    std::size_t restarts = 0;
    std::uint64_t seed = 0;
    std::string certificate;
    Candidate candidate;
};

struct BlockShape {
    std::size_t dim_cl = 1;
    std::size_t dim_cr = 1;

    bool operator==(const BlockShape&) const = default;
};

// Every multiset of at most max_blocks shapes whose sizes dim_cl * dim_cr sum to dim_c.
std::vector<std::vector<BlockShape>> block_structures(std::size_t dim_c, std::size_t max_blocks);

// ln(sqrt(4/3)), the single-copy constant for the antisymmetric family.
double separable_constant();

OptimizationReport werner_d0_minimize(std::size_t d);
OptimizationReport delta0_antisym_lower(std::size_t d, std::size_t k);

// Certified lower bound on Delta_0(rho): data processing to the AB marginal,
// then -ln of an upper bound on max over product states of Tr(P_{rho_AB} ab).
double delta0_certified_lower(const DensityOperator& rho, const Partition& part);
double delta0_certified_lower(const DensityOperator& rho);

OptimizationReport delta_upper(const DensityOperator& rho, const Objective& obj, const SearchConfig& cfg,
                               const Partition& part);
OptimizationReport delta_upper(const DensityOperator& rho, const Objective& obj, const SearchConfig& cfg);
OptimizationReport delta_alpha_upper(const DensityOperator& rho, double alpha, const SearchConfig& cfg);
OptimizationReport delta_min_upper(const DensityOperator& rho, const SearchConfig& cfg);
OptimizationReport delta_relent_upper(const DensityOperator& rho, const SearchConfig& cfg);

// Markov candidate of a report re-expressed on rho's grouped A, B, C layout.
DensityOperator candidate_state(const OptimizationReport& report);

struct SmoothingConfig {
    std::size_t directions = 16;
    std::size_t grid_points = 11;  // mixing weights 1, 1/2, ..., 2^-(grid_points-1)
    std::uint64_t seed = 0;
};

OptimizationReport smooth_delta0_lower(const DensityOperator& rho, double epsilon, const SmoothingConfig& cfg = {});

// Dense n-copy evaluation of product candidates stays below this dimension;
// above it, D_0 additivity on product pairs is used.
inline constexpr std::size_t kDenseTensorPowerLimit = 1024;

std::pair<OptimizationReport, OptimizationReport> tensor_power_delta0_bounds(std::size_t d, std::size_t k,
                                                                             std::size_t n, const SearchConfig& cfg);

struct GapRecord {
    std::size_t d = 0;
    std::size_t k = 0;
    double delta_lower = 0.0;
    double cmi_value = 0.0;
    bool separated = false;
};

GapRecord cmi_vs_delta_gap(std::size_t d);

struct UhlmannConfig {
    std::size_t restarts = 4;
    std::size_t max_sweeps = 200;
    std::uint64_t seed = 0;
};

struct UhlmannResult {
    double overlap = 0.0;
    Operator unitary;  // on the reference, applied to psi_sigma
    std::size_t sweeps = 0;
};

inline constexpr std::size_t kUhlmannMaxDim = 16;

// max_U |<psi_rho|(I (x) U)|psi_sigma>| over unitaries on the reference factor,
// by Jacobi-style sweeps of one-parameter rotations from seeded random starts.
UhlmannResult uhlmann_search(const Vector& psi_rho, const Vector& psi_sigma, std::size_t sys_dim,
                             std::size_t ref_dim, const UhlmannConfig& cfg = {});
double uhlmann_fidelity(const DensityOperator& rho, const DensityOperator& sigma, const UhlmannConfig& cfg = {});

struct DualityRecord {
    double fidelity_abc = 0.0;     // closed form F(rho_ABC, sigma_ABC)
    double uhlmann_abc = 0.0;      // search over unitaries on the purifying system DE
    double purified_overlap = 0.0; // |<rho_ABCDE|sigma_ABCDE>| for the matched purification
    double fidelity_abd = 0.0;     // F(rho_ABD, sigma'_ABD), sigma' = Tr_CE of the purification
    double uhlmann_abd = 0.0;      // search over unitaries on CE
    double dmin_before = 0.0;      // -ln F^2(rho_ABC, sigma_ABC)
    double dmin_after = 0.0;       // same after a channel on B
    bool common_value = false;
    bool abd_consistent = false;
    bool dpi_holds = false;
};

struct DualityConfig {
    UhlmannConfig uhlmann;
    std::uint64_t channel_seed = 0;
    std::size_t channel_kraus = 2;
    double common_tol = 1e-6;
    double dpi_slack = 1e-9;
};

// psi on A, B, C, D (each of dimension <= 3); spec describes a Markov state on A, B, C.
DualityRecord duality_candidate_check(const PureStateVector& psi, const MarkovSpec& spec, const DualityConfig& cfg = {});

}  // namespace markovgap
