// Python bindings. Operators cross the boundary as complex numpy arrays with an
// explicit list of subsystem dimensions; reports cross as JSON text.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "markovgap/markov_opt.hpp"
#include "markovgap/measures.hpp"
#include "markovgap/repro.hpp"
#include "markovgap/serialize.hpp"

namespace py = pybind11;
using namespace markovgap;

namespace {

Layout layout_for(const Operator& op, const std::vector<std::size_t>& dims) {
    if (dims.empty()) return Layout({static_cast<std::size_t>(op.rows())});
    return Layout(dims);
}

DensityOperator state(const Operator& op, const std::vector<std::size_t>& dims) {
    return DensityOperator(op, layout_for(op, dims));
}

Partition partition_for(const Layout& layout, const std::optional<IndexSet>& a, const std::optional<IndexSet>& b,
                        const std::optional<IndexSet>& c) {
    if (!a && !b && !c) return Partition::standard(layout);
    if (!a || !b || !c) throw Error("give all of a, b and c or none of them");
    return Partition{*a, *b, *c};
}

std::string dump(const OptimizationReport& r) { return dump_json(report_to_json(r)); }

Objective objective_named(const std::string& name, double alpha) {
    if (name == "relent") return Objective::renyi_order(1.0);
    if (name == "d0") return Objective::renyi_order(0.0);
    if (name == "renyi") return Objective::renyi_order(alpha);
    if (name == "dmin") return Objective::fidelity_based();
    throw Error("unknown objective '" + name + "' (use relent, d0, renyi or dmin)");
}

SearchConfig search_config(std::uint64_t seed, std::size_t restarts, std::size_t iterations, std::size_t max_blocks,
                           std::size_t threads) {
    SearchConfig cfg;
    cfg.seed = seed;
    cfg.restarts = restarts;
    cfg.iterations = iterations;
    cfg.max_blocks = max_blocks;
    cfg.threads = threads;
    return cfg;
}

// Infinite divergences come back as float('inf').
double value_of(const DivergenceValue& v) { return v.value; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dense quantum information toolkit for Markov-chain divergence studies";
    py::register_exception<Error>(m, "MarkovGapError", PyExc_ValueError);

    // Tensor algebra.
    m.def("tensor", [](const Operator& a, const Operator& b) { return tensor(a, b); }, py::arg("a"), py::arg("b"));
    m.def("partial_trace",
          [](const Operator& op, const std::vector<std::size_t>& dims, const IndexSet& keep) {
              return partial_trace(op, Layout(dims), keep);
          },
          py::arg("op"), py::arg("dims"), py::arg("keep"));
    m.def("permute_subsystems",
          [](const Operator& op, const std::vector<std::size_t>& dims, const Permutation& perm) {
              return permute_subsystems(op, Layout(dims), perm);
          },
          py::arg("op"), py::arg("dims"), py::arg("perm"));
    m.def("permutation_operator",
          [](const std::vector<std::size_t>& dims, const Permutation& perm) {
              return permutation_operator(Layout(dims), perm);
          },
          py::arg("dims"), py::arg("perm"));
    m.def("trace_norm", [](const Operator& op) { return trace_norm(op); }, py::arg("op"));

    // Entropies and divergences.
    m.def("von_neumann_entropy", [](const Operator& rho) { return von_neumann_entropy(DensityOperator(rho)); },
          py::arg("rho"));
    m.def("renyi_entropy", [](const Operator& rho, double alpha) { return renyi_entropy(DensityOperator(rho), alpha); },
          py::arg("rho"), py::arg("alpha"));
    m.def("cmi",
          [](const Operator& rho, const std::vector<std::size_t>& dims, std::optional<IndexSet> a,
             std::optional<IndexSet> b, std::optional<IndexSet> c) {
              const DensityOperator s = state(rho, dims);
              return cmi(s, partition_for(s.layout(), a, b, c));
          },
          py::arg("rho"), py::arg("dims"), py::arg("a") = py::none(), py::arg("b") = py::none(),
          py::arg("c") = py::none());
    m.def("naive_renyi_cmi",
          [](const Operator& rho, const std::vector<std::size_t>& dims, double alpha) {
              return naive_renyi_cmi(state(rho, dims), alpha);
          },
          py::arg("rho"), py::arg("dims"), py::arg("alpha"));
    m.def("relative_entropy",
          [](const Operator& r, const Operator& s) { return value_of(relative_entropy(DensityOperator(r), DensityOperator(s))); },
          py::arg("rho"), py::arg("sigma"));
    m.def("renyi_divergence",
          [](const Operator& r, const Operator& s, double alpha) {
              return value_of(renyi_divergence(DensityOperator(r), DensityOperator(s), alpha));
          },
          py::arg("rho"), py::arg("sigma"), py::arg("alpha"));
    m.def("d0", [](const Operator& r, const Operator& s) { return value_of(d0(DensityOperator(r), DensityOperator(s))); },
          py::arg("rho"), py::arg("sigma"));
    m.def("d_min",
          [](const Operator& r, const Operator& s) { return value_of(d_min(DensityOperator(r), DensityOperator(s))); },
          py::arg("rho"), py::arg("sigma"));
    m.def("fidelity", [](const Operator& r, const Operator& s) { return fidelity(DensityOperator(r), DensityOperator(s)); },
          py::arg("rho"), py::arg("sigma"));
    m.def("purified_distance",
          [](const Operator& r, const Operator& s) { return purified_distance(DensityOperator(r), DensityOperator(s)); },
          py::arg("rho"), py::arg("sigma"));

    // States.
    m.def("antisym_state", [](std::size_t d) { return antisym_state(d).op(); }, py::arg("d"));
    m.def("uniform_antisym_state", [](std::size_t d, std::size_t k) { return uniform_antisym_state(d, k).op(); },
          py::arg("d"), py::arg("k"));
    m.def("werner_state", [](std::size_t d, double f) { return werner_state(WernerParameter{d, f}).op(); },
          py::arg("d"), py::arg("f"));
    m.def("ghz_state", [](std::size_t parties) { return ghz_state(parties).op(); }, py::arg("parties") = 3);
    m.def("random_density",
          [](const std::vector<std::size_t>& dims, std::size_t rank, std::uint64_t seed) {
              return random_density(Layout(dims), rank, seed).op();
          },
          py::arg("dims"), py::arg("rank"), py::arg("seed"));
    m.def("markov_state", [](const std::string& spec) { return build_markov_state(markov_spec_from_json(json::parse(spec))).op(); },
          py::arg("spec_json"));
    m.def("markov_membership",
          [](const Operator& rho, const std::vector<std::size_t>& dims, double tol) {
              return markov_membership(state(rho, dims), tol);
          },
          py::arg("rho"), py::arg("dims"), py::arg("tol") = 1e-9);

    // Closed forms and reproduction.
    m.def("cmi_antisym_formula", &cmi_antisym_formula, py::arg("d"));
    m.def("cmi_antisym_binomial", &cmi_antisym_binomial, py::arg("d"), py::arg("k"));
    m.def("crossover_scan", &crossover_scan, py::arg("d_min") = 3, py::arg("d_max") = 100);
    m.def("decay_bound_check", &decay_bound_check, py::arg("d_max") = 10000);
    m.def("separable_constant", &separable_constant);
    m.def("table_csv",
          [](const std::vector<std::size_t>& d_list, const std::string& log_base, std::size_t dim_cap) {
              RunConfig cfg;
              if (log_base == "bits") cfg.log_base = LogBase::bits;
              else if (log_base != "nats") throw Error("log_base must be 'nats' or 'bits'");
              cfg.dim_cap = dim_cap;
              cfg.validate();
              return render_table_csv(compute_table(cfg, d_list), cfg);
          },
          py::arg("d_list"), py::arg("log_base") = "nats", py::arg("dim_cap") = kDefaultDimCap);
    m.def("verify",
          [](const std::string& suite, std::uint64_t seed, double tol) {
              RunConfig cfg;
              cfg.seed = seed;
              cfg.tol = tol;
              cfg.validate();
              return dump_json(suite_report_to_json(run_property_suite(cfg, suite)));
          },
          py::arg("suite"), py::arg("seed") = 0, py::arg("tol") = 1e-9);
    m.def("property_suite_names", &property_suite_names);
    m.def("find_naive_renyi_witness",
          [](std::uint64_t seed, std::uint64_t samples) -> std::optional<std::string> {
              const auto w = find_naive_renyi_witness(seed, samples);
              if (!w) return std::nullopt;
              return dump_json(witness_to_json(*w));
          },
          py::arg("seed") = 0, py::arg("samples") = 100000);

    // Optimization.
    m.def("delta_upper",
          [](const Operator& rho, const std::vector<std::size_t>& dims, const std::string& objective, double alpha,
             std::uint64_t seed, std::size_t restarts, std::size_t iterations, std::size_t max_blocks,
             std::size_t threads) {
              const DensityOperator s = state(rho, dims);
              const SearchConfig cfg = search_config(seed, restarts, iterations, max_blocks, threads);
              py::gil_scoped_release release;
              return dump(delta_upper(s, objective_named(objective, alpha), cfg));
          },
          py::arg("rho"), py::arg("dims"), py::arg("objective") = "relent", py::arg("alpha") = 1.0, py::arg("seed") = 0,
          py::arg("restarts") = 8, py::arg("iterations") = 2000, py::arg("max_blocks") = 3, py::arg("threads") = 1);
    m.def("delta0_antisym_lower", [](std::size_t d, std::size_t k) { return dump(delta0_antisym_lower(d, k)); },
          py::arg("d"), py::arg("k"));
    m.def("werner_d0_minimize", [](std::size_t d) { return dump(werner_d0_minimize(d)); }, py::arg("d"));
    m.def("smooth_delta0_lower",
          [](const Operator& rho, const std::vector<std::size_t>& dims, double epsilon, std::uint64_t seed) {
              SmoothingConfig cfg;
              cfg.seed = seed;
              return dump(smooth_delta0_lower(state(rho, dims), epsilon, cfg));
          },
          py::arg("rho"), py::arg("dims"), py::arg("epsilon"), py::arg("seed") = 0);
    m.def("tensor_power_delta0_bounds",
          [](std::size_t d, std::size_t k, std::size_t n, std::uint64_t seed, std::size_t restarts,
             std::size_t iterations) {
              const auto [lo, up] = tensor_power_delta0_bounds(d, k, n, search_config(seed, restarts, iterations, 3, 1));
              return std::make_pair(dump(lo), dump(up));
          },
          py::arg("d"), py::arg("k"), py::arg("n"), py::arg("seed") = 0, py::arg("restarts") = 8,
          py::arg("iterations") = 2000);
    m.def("uhlmann_fidelity",
          [](const Operator& r, const Operator& s, std::uint64_t seed) {
              UhlmannConfig cfg;
              cfg.seed = seed;
              return uhlmann_fidelity(DensityOperator(r), DensityOperator(s), cfg);
          },
          py::arg("rho"), py::arg("sigma"), py::arg("seed") = 0);
}
