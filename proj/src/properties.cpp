#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "markovgap/markov_opt.hpp"
#include "markovgap/measures.hpp"
#include "markovgap/repro.hpp"
#include "markovgap/rng.hpp"
#include "markovgap/serialize.hpp"

namespace markovgap {

bool SuiteReport::passed() const {
    return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.pass; });
}

const std::vector<std::string>& property_suite_names() {
    static const std::vector<std::string> names = {"algebra", "measures", "markov", "optimization", "duality"};
    return names;
}

namespace {

constexpr double kNominalTol = 1e-9;

// Collects violations of one property; margin = slack - violation.
class Property {
  public:
    Property(std::string name, double slack) : name_(std::move(name)), slack_(slack) {}

    void check(double violation) {
        ++samples_;
        const double margin = std::isnan(violation) ? -std::numeric_limits<double>::infinity() : slack_ - violation;
        worst_ = std::min(worst_, margin);
    }

    PropertyResult result() const {
        const double worst = samples_ ? worst_ : 0.0;
        return {name_, samples_, worst, samples_ > 0 && worst >= 0.0};
    }

  private:
    std::string name_;
    double slack_;
    std::size_t samples_ = 0;
    double worst_ = std::numeric_limits<double>::infinity();
};

class Suite {
  public:
    Suite(const RunConfig& cfg, std::string name) : scale_(cfg.tol / kNominalTol), seed_(cfg.seed) {
        report_.suite = std::move(name);
        report_.seed = cfg.seed;
    }

    // Runs body with a fresh Property whose slack is nominal * tol / 1e-9.
    void run(const std::string& name, double nominal, const std::function<void(Property&)>& body) {
        Property p(name, nominal * scale_);
        body(p);
        report_.properties.push_back(p.result());
    }

    std::uint64_t stream(std::uint64_t a, std::uint64_t b = 0) const { return derive_seed(seed_, a, b); }
    SuiteReport take() { return std::move(report_); }

  private:
    double scale_;
    std::uint64_t seed_;
    SuiteReport report_;
};

Operator gaussian_operator(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Operator g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            const double re = rng.gaussian();
            g(i, j) = Complex(re, rng.gaussian());
        }
    return g;
}

Operator random_hermitian(std::size_t n, std::uint64_t seed) {
    const Operator g = gaussian_operator(n, n, seed);
    return 0.5 * (g + g.adjoint());
}

double max_diff(const Operator& a, const Operator& b) { return max_abs(a - b); }

Permutation random_permutation(std::size_t n, SplitMix64& rng) {
    Permutation p(n);
    std::iota(p.begin(), p.end(), 0);
    for (std::size_t i = n; i-- > 1;) std::swap(p[i], p[rng.below(i + 1)]);
    return p;
}

DensityOperator full_rank_state(std::size_t dim, std::uint64_t seed) {
    return random_density(Layout({dim}), dim, seed);
}

std::vector<double> alpha_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 9; ++i) grid.push_back(0.1 * i);
    // Ten evenly spaced orders from 1.1 to 3.0.
    for (int i = 0; i < 10; ++i) grid.push_back(1.1 + (3.0 - 1.1) * i / 9.0);
    return grid;
}

double finite_gap(const DivergenceValue& after, const DivergenceValue& before) {
    if (!before.finite) return 0.0;
    if (!after.finite) return std::numeric_limits<double>::infinity();
    return after.value - before.value;
}

MarkovSpec random_markov_spec(std::size_t da, std::size_t db, std::size_t dc, std::uint64_t seed) {
    const auto structures = block_structures(dc, 3);
    SplitMix64 rng(seed);
    const auto& shapes = structures[rng.below(structures.size())];
    MarkovSpec spec{da, db, {}, std::nullopt};
    std::vector<double> w;
    for (std::size_t i = 0; i < shapes.size(); ++i) w.push_back(0.2 + rng.uniform());
    const double z = std::accumulate(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const auto [cl, cr] = shapes[i];
        const std::size_t lrank = 1 + rng.below(da * cl), rrank = 1 + rng.below(cr * db);
        spec.blocks.push_back(MarkovBlock{w[i] / z, cl, cr, random_density(Layout({da, cl}), lrank, rng.next()),
                                          random_density(Layout({cr, db}), rrank, rng.next())});
    }
    if (rng.below(2) == 1) spec.basis_c = random_unitary(dc, rng.next());
    return spec;
}

// Minimizes D_1(rho_AB || X_A (x) sigma_B) over qubit sigma_B by grid search
// over the Bloch ball followed by step-halving coordinate refinement.
std::pair<double, Operator> minimize_over_qubit_b(const DensityOperator& rho, const Operator& x_a) {
    const Spectrum rs = spectral_decompose(rho.op());
    const auto state_of = [](const std::array<double, 3>& r) {
        Operator s(2, 2);
        s << Complex(1 + r[2], 0), Complex(r[0], -r[1]), Complex(r[0], r[1]), Complex(1 - r[2], 0);
        return Operator(0.5 * s);
    };
    const auto value = [&](const std::array<double, 3>& r) {
        const double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
        if (norm >= 1.0) return std::numeric_limits<double>::infinity();
        const auto v = spectral::relative_entropy(rs, spectral_decompose(tensor(x_a, state_of(r))));
        return v.finite ? v.value : std::numeric_limits<double>::infinity();
    };
    std::array<double, 3> best{0, 0, 0};
    double fbest = value(best);
    const double grid[] = {-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9};
    for (double x : grid)
        for (double y : grid)
            for (double z : grid) {
                const std::array<double, 3> r{x, y, z};
                const double f = value(r);
                if (f < fbest) {
                    fbest = f;
                    best = r;
                }
            }
    for (double step = 0.1; step > 1e-12; step *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t c = 0; c < 3; ++c)
                for (double sign : {1.0, -1.0}) {
                    auto r = best;
                    r[c] += sign * step;
                    const double f = value(r);
                    if (f < fbest) {
                        fbest = f;
                        best = r;
                        improved = true;
                    }
                }
        }
    }
    return {fbest, state_of(best)};
}

SuiteReport algebra_suite(const RunConfig& cfg) {
    Suite s(cfg, "algebra");
    s.run("partial_trace_full_equals_trace", 1e-10, [&](Property& p) {
        const Layout layout({2, 3, 2});
        for (std::uint64_t i = 0; i < 20; ++i) {
            const Operator m = gaussian_operator(12, 12, s.stream(1, i));
            const Operator t = partial_trace(m, layout, {});
            p.check(std::abs(t(0, 0) - m.trace()));
        }
    });
    s.run("partial_trace_composes", 1e-10, [&](Property& p) {
        const Layout layout({2, 2, 3});
        for (std::uint64_t i = 0; i < 20; ++i) {
            const Operator m = gaussian_operator(12, 12, s.stream(2, i));
            const Operator once = partial_trace(m, layout, {0});
            const Operator twice = partial_trace(partial_trace(m, layout, {0, 2}), Layout({2, 3}), {0});
            p.check(max_diff(once, twice));
        }
    });
    s.run("permutation_operator_representation", 1e-12, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            SplitMix64 rng(s.stream(3, i));
            const std::size_t k = 2 + rng.below(4);
            const Layout layout(std::vector<std::size_t>(k, 2));
            const Permutation pi = random_permutation(k, rng), tau = random_permutation(k, rng);
            p.check(max_diff(permutation_operator(layout, pi) * permutation_operator(layout, tau),
                             permutation_operator(layout, compose(pi, tau))));
        }
    });
    s.run("spectral_identity_reconstruction", 1e-10, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const Operator h = random_hermitian(6, s.stream(4, i));
            const Operator back = apply_spectral_function(h, [](double x) { return x; }, ZeroPolicy::apply);
            p.check(max_diff(back, h) / std::max(1.0, max_abs(h)));
        }
    });
    s.run("trace_norm_unitary_invariance", 1e-9, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const Operator m = gaussian_operator(5, 5, s.stream(5, i));
            const Operator u = random_unitary(5, s.stream(5, i + 100)), v = random_unitary(5, s.stream(5, i + 200));
            const double t = trace_norm(m);
            p.check(std::abs(trace_norm(u * m * v) - t) / std::max(1.0, t));
        }
    });
    s.run("antisym_projector_is_projector", 1e-9, [&](Property& p) {
        const std::pair<std::size_t, std::size_t> cases[] = {{2, 2}, {3, 2}, {3, 3}, {4, 2}, {4, 3}, {5, 3}, {4, 4}, {6, 4}};
        for (const auto& [d, k] : cases) {
            if (std::pow(static_cast<double>(d), static_cast<double>(k)) > static_cast<double>(cfg.dim_cap)) continue;
            const Operator pk = antisym_projector(d, k, cfg.dim_cap).projector;
            const double binom = std::round(std::exp(log_binomial(d, k)));
            p.check(std::max({max_diff(pk * pk, pk), max_diff(pk, pk.adjoint()), std::abs(pk.trace().real() - binom)}));
        }
    });
    s.run("uniform_antisym_marginal_is_gamma", 1e-10, [&](Property& p) {
        const std::pair<std::size_t, std::size_t> cases[] = {{3, 2}, {4, 3}, {5, 3}, {6, 4}};
        for (const auto& [d, k] : cases) {
            if (std::pow(static_cast<double>(d), static_cast<double>(k)) > static_cast<double>(cfg.dim_cap)) continue;
            const DensityOperator rho = uniform_antisym_state(d, k, cfg.dim_cap);
            p.check(max_diff(rho.marginal({0, 1}).op(), antisym_state(d).op()));
        }
    });
    s.run("twirl_preserves_antisym_weight", 1e-10, [&](Property& p) {
        const std::size_t d = 3;
        const Operator anti = 0.5 * (identity(d * d) - swap_operator(d));
        for (std::uint64_t i = 0; i < 20; ++i) {
            const DensityOperator sigma = random_density(Layout({d, d}), 1 + i % 9, s.stream(6, i));
            const TwirlResult t = uu_twirl(sigma);
            p.check(std::abs((anti * sigma.op()).trace().real() - (anti * t.state.op()).trace().real()));
        }
    });
    s.run("twirl_of_product_has_nonnegative_flip", 1e-12, [&](Property& p) {
        const std::size_t d = 3;
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto a = random_pure_state(Layout({d}), s.stream(7, i)).density();
            const auto b = random_pure_state(Layout({d}), s.stream(7, i + 100)).density();
            const DensityOperator prod = DensityOperator::trusted(tensor(a.op(), b.op()), Layout({d, d}));
            p.check(-uu_twirl(prod).parameter.f);
        }
    });
    s.run("purify_round_trip", 1e-10, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const DensityOperator rho = random_density(Layout({2, 2}), 1 + i % 4, s.stream(8, i));
            const PureStateVector psi = purify(rho);
            const Operator back = partial_trace(projector(psi.amplitudes), psi.layout, {0, 1});
            p.check(max_diff(back, rho.op()));
        }
    });
    return s.take();
}

SuiteReport measures_suite(const RunConfig& cfg) {
    Suite s(cfg, "measures");
    const auto grid = alpha_grid();
    s.run("renyi_monotone_in_alpha", 1e-9, [&](Property& p) {
        for (std::uint64_t i = 0; i < 50; ++i) {
            const auto rho = full_rank_state(4, s.stream(1, i)), sigma = full_rank_state(4, s.stream(1, i + 1000));
            double prev = -std::numeric_limits<double>::infinity();
            for (double a : grid) {
                const double v = renyi_divergence(rho, sigma, a).value;
                p.check(prev - v);
                prev = v;
            }
        }
    });
    s.run("renyi_continuity_at_one", 1e-4, [&](Property& p) {
        for (std::uint64_t i = 0; i < 50; ++i) {
            const auto rho = full_rank_state(4, s.stream(2, i)), sigma = full_rank_state(4, s.stream(2, i + 1000));
            const double d1 = relative_entropy(rho, sigma).value;
            for (double a : {1.0 - 1e-5, 1.0 + 1e-5}) p.check(std::abs(renyi_divergence(rho, sigma, a).value - d1));
        }
    });

    // Data processing under seeded random channels C^4 -> C^3.
    struct ChannelCase {
        DensityOperator rho, sigma, rho_out, sigma_out;
    };
    std::vector<ChannelCase> cases;
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto rho = full_rank_state(4, s.stream(3, i)), sigma = full_rank_state(4, s.stream(3, i + 1000));
        const Channel ch = random_cptp(4, 3, 2 + i % 3, s.stream(3, i + 2000));
        cases.push_back({rho, sigma, DensityOperator::trusted(ch.apply(rho.op()), Layout({3})),
                         DensityOperator::trusted(ch.apply(sigma.op()), Layout({3}))});
    }
    s.run("dpi_renyi", 1e-9, [&](Property& p) {
        for (const auto& c : cases)
            for (double a : {0.25, 0.5, 0.75, 1.25, 1.5, 2.0})
                p.check(finite_gap(renyi_divergence(c.rho_out, c.sigma_out, a), renyi_divergence(c.rho, c.sigma, a)));
    });
    s.run("dpi_relative_entropy", 1e-9, [&](Property& p) {
        for (const auto& c : cases)
            p.check(finite_gap(relative_entropy(c.rho_out, c.sigma_out), relative_entropy(c.rho, c.sigma)));
    });
    s.run("dpi_d0", 1e-9, [&](Property& p) {
        for (std::uint64_t i = 0; i < 50; ++i) {
            // Rank-deficient rho so that D_0 is not trivially zero.
            const auto rho = random_density(Layout({4}), 1 + i % 3, s.stream(4, i));
            const auto sigma = full_rank_state(4, s.stream(4, i + 1000));
            const Channel ch = random_cptp(4, 3, 2 + i % 3, s.stream(4, i + 2000));
            const DensityOperator ro = DensityOperator::trusted(ch.apply(rho.op()), Layout({3}));
            const DensityOperator so = DensityOperator::trusted(ch.apply(sigma.op()), Layout({3}));
            p.check(finite_gap(d0(ro, so), d0(rho, sigma)));
        }
    });
    s.run("dpi_dmin", 1e-9, [&](Property& p) {
        for (const auto& c : cases) p.check(finite_gap(d_min(c.rho_out, c.sigma_out), d_min(c.rho, c.sigma)));
    });
    s.run("dpi_partial_trace", 1e-9, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto rho = random_density(Layout({2, 2}), 4, s.stream(5, i));
            const auto sigma = random_density(Layout({2, 2}), 4, s.stream(5, i + 1000));
            const auto ra = rho.marginal({0}), sa = sigma.marginal({0});
            p.check(finite_gap(relative_entropy(ra, sa), relative_entropy(rho, sigma)));
            p.check(finite_gap(d0(ra, sa), d0(rho, sigma)));
            p.check(finite_gap(d_min(ra, sa), d_min(rho, sigma)));
            for (double a : {0.5, 2.0}) p.check(finite_gap(renyi_divergence(ra, sa, a), renyi_divergence(rho, sigma, a)));
        }
    });
    std::vector<double> minimizers;
    s.run("variational_conditional_entropy", 1e-6, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto rho = random_density(Layout({2, 2}), 1 + i % 4, s.stream(6, i));
            const auto [v, arg] = minimize_over_qubit_b(rho, identity(2));
            p.check(std::abs(v + conditional_entropy(rho, {0}, {1})));
            minimizers.push_back(max_diff(arg, rho.marginal({1}).op()));
        }
    });
    s.run("variational_mutual_information", 1e-6, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto rho = random_density(Layout({2, 2}), 1 + i % 4, s.stream(7, i));
            const auto [v, arg] = minimize_over_qubit_b(rho, rho.marginal({0}).op());
            p.check(std::abs(v - mutual_information(rho, {0}, {1})));
            minimizers.push_back(max_diff(arg, rho.marginal({1}).op()));
        }
    });
    // The minimizing sigma_B is rho_B in both variational formulas.
    s.run("variational_minimizer_is_marginal", 1e-4, [&](Property& p) {
        for (double m : minimizers) p.check(m);
    });
    s.run("strong_subadditivity", 1e-9, [&](Property& p) {
        for (std::uint64_t i = 0; i < 200; ++i)
            p.check(-cmi(random_density(Layout({2, 2, 2}), 1 + i % 8, s.stream(8, i))));
    });
    s.run("dmin_dominates_d0", 1e-9, [&](Property& p) {
        for (std::uint64_t i = 0; i < 200; ++i) {
            const auto rho = random_density(Layout({3}), 1 + i % 3, s.stream(9, i));
            const auto sigma = random_density(Layout({3}), 1 + (i / 3) % 3, s.stream(9, i + 1000));
            const auto a = d_min(rho, sigma), b = d0(rho, sigma);
            if (!a.finite) continue;
            p.check(b.finite ? b.value - a.value : std::numeric_limits<double>::infinity());
        }
    });
    s.run("sandwiched_half_equals_dmin", 1e-8, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto rho = full_rank_state(4, s.stream(10, i)), sigma = full_rank_state(4, s.stream(10, i + 1000));
            p.check(std::abs(sandwiched_divergence(rho, sigma, 0.5).value - d_min(rho, sigma).value));
        }
    });
    return s.take();
}

SuiteReport markov_suite(const RunConfig& cfg) {
    Suite s(cfg, "markov");
    s.run("markov_state_membership", 1e-8, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const std::size_t dc = 2 + i % 3;
            p.check(cmi(build_markov_state(random_markov_spec(2, 2, dc, s.stream(1, i)))));
        }
    });
    s.run("ghz_cmi_is_ln2", 1e-10, [&](Property& p) { p.check(std::abs(cmi(ghz_state(3)) - std::log(2.0))); });
    s.run("binomial_matches_formula", 1e-12, [&](Property& p) {
        for (std::size_t d = 3; d <= 10000; ++d)
            p.check(std::abs(cmi_antisym_binomial(d, antisym_block_size(d)) - cmi_antisym_formula(d)));
    });
    s.run("binomial_matches_dense", 1e-9, [&](Property& p) {
        const std::pair<std::size_t, std::size_t> cases[] = {{3, 2}, {4, 3}, {5, 3}, {6, 4}};
        for (const auto& [d, k] : cases) {
            if (std::pow(static_cast<double>(d), static_cast<double>(k)) > static_cast<double>(cfg.dim_cap)) continue;
            p.check(std::abs(cmi(uniform_antisym_state(d, k, cfg.dim_cap)) - cmi_antisym_binomial(d, k)));
        }
    });
    s.run("decay_bound", 1e-12, [&](Property& p) {
        for (std::size_t d = 3; d <= 10000; ++d) p.check(cmi_antisym_formula(d) - 4.0 / static_cast<double>(d - 1));
    });
    s.run("crossover_at_27", 0.5, [&](Property& p) {
        const auto c = crossover_scan(3, 100);
        p.check(c ? std::abs(static_cast<double>(*c) - 27.0) : std::numeric_limits<double>::infinity());
    });
    return s.take();
}

SuiteReport optimization_suite(const RunConfig& cfg) {
    Suite s(cfg, "optimization");
    SearchConfig search;
    search.seed = s.stream(1);
    search.restarts = 2;
    search.iterations = 300;
    search.dim_cap = cfg.dim_cap;

    const DensityOperator antisym = uniform_antisym_state(4, 3, cfg.dim_cap);
    const OptimizationReport d0_report = delta_upper(antisym, Objective::renyi_order(0.0), search);
    std::vector<std::pair<DensityOperator, OptimizationReport>> reports;
    reports.emplace_back(antisym, d0_report);
    for (std::uint64_t i = 0; i < 2; ++i) {
        const auto rho = random_density(Layout({2, 2, 2}), 2 + i, s.stream(2, i));
        reports.emplace_back(rho, delta_relent_upper(rho, search));
    }
    reports.emplace_back(ghz_state(3), delta_min_upper(ghz_state(3), search));

    s.run("upper_candidate_reevaluates", 1e-8, [&](Property& p) {
        const Objective objs[] = {Objective::renyi_order(0.0), Objective::renyi_order(1.0), Objective::renyi_order(1.0),
                                  Objective::fidelity_based()};
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const auto& [rho, r] = reports[i];
            const DensityOperator sigma = candidate_state(r).with_layout(rho.layout());
            p.check(std::abs(evaluate_objective(rho, sigma, objs[i]).value - r.value));
        }
    });
    s.run("upper_candidate_is_markov", 1e-8, [&](Property& p) {
        for (const auto& [rho, r] : reports) p.check(cmi(candidate_state(r)));
    });
    s.run("sandwich_upper_ge_lower", 1e-8, [&](Property& p) {
        p.check(delta0_antisym_lower(4, 3).value - d0_report.value);
        p.check(delta0_certified_lower(antisym) - d0_report.value);
        for (std::size_t i = 1; i < 3; ++i) p.check(cmi(reports[i].first) - reports[i].second.value);
        p.check(delta0_certified_lower(ghz_state(3)) - reports[3].second.value);
    });
    s.run("candidates_respect_cmi_bound", 1e-8, [&](Property& p) {
        for (std::uint64_t i = 0; i < 2; ++i) {
            const auto rho = random_density(Layout({2, 2, 2}), 3, s.stream(3, i));
            const double c = cmi(rho);
            SearchConfig cfg_obs = search;
            cfg_obs.iterations = 100;
            cfg_obs.observer = [&](const DensityOperator& sigma, double) {
                p.check(c - relative_entropy(rho, sigma.with_layout(rho.layout())).value);
            };
            delta_relent_upper(rho, cfg_obs);
        }
    });
    s.run("alpha_monotone_on_fixed_candidate", 1e-9, [&](Property& p) {
        for (std::size_t i = 1; i < 3; ++i) {
            const auto& [rho, r] = reports[i];
            const DensityOperator sigma = candidate_state(r).with_layout(rho.layout());
            double prev = -std::numeric_limits<double>::infinity();
            for (double a : alpha_grid()) {
                const double v = renyi_divergence(rho, sigma, a).value;
                p.check(prev - v);
                prev = v;
            }
        }
    });
    s.run("smoothing_monotone_in_epsilon", 1e-12, [&](Property& p) {
        SmoothingConfig sc;
        sc.seed = s.stream(4);
        sc.directions = 4;
        const auto rho = random_density(Layout({2, 2, 2}), 2, s.stream(4, 1));
        double prev = -std::numeric_limits<double>::infinity();
        for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4}) {
            const double v = smooth_delta0_lower(rho, eps, sc).value;
            p.check(prev - v);
            prev = v;
        }
    });
    s.run("restart_order_independence", 0.5, [&](Property& p) {
        const auto rho = random_density(Layout({2, 2, 2}), 2, s.stream(5));
        SearchConfig a = search;
        a.iterations = 150;
        a.restarts = 3;
        SearchConfig b = a;
        b.threads = 3;
        const bool same = dump_json(report_to_json(delta_relent_upper(rho, a))) ==
                          dump_json(report_to_json(delta_relent_upper(rho, b)));
        p.check(same ? 0.0 : 1.0);
    });
    s.run("werner_reduction_value", 1e-12, [&](Property& p) {
        double grid_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 1000; ++i) grid_min = std::min(grid_min, -std::log((1.0 - i / 1000.0) / 2.0));
        for (std::size_t d : {2, 3, 10}) {
            const double v = werner_d0_minimize(d).value;
            p.check(std::abs(v - grid_min));
            p.check(separable_constant() - v);
        }
    });
    s.run("tensor_power_sandwich", 1e-8, [&](Property& p) {
        SearchConfig tc = search;
        tc.restarts = 1;
        tc.iterations = 100;
        for (std::size_t n : {1, 2}) {
            const auto [lower, upper] = tensor_power_delta0_bounds(4, 3, n, tc);
            p.check(std::abs(lower.value - n * separable_constant()));
            p.check(lower.value - upper.value);
        }
    });
    return s.take();
}

SuiteReport duality_suite(const RunConfig& cfg) {
    Suite s(cfg, "duality");
    UhlmannConfig uc;
    uc.seed = s.stream(1);
    s.run("uhlmann_matches_fidelity", 1e-6, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto rho = random_density(Layout({2}), 1 + i % 2, s.stream(2, i));
            const auto sigma = random_density(Layout({2}), 1 + (i / 2) % 2, s.stream(2, i + 1000));
            p.check(std::abs(uhlmann_fidelity(rho, sigma, uc) - fidelity(rho, sigma)));
        }
    });
    std::vector<DualityRecord> records;
    for (std::uint64_t i = 0; i < 10; ++i) {
        const PureStateVector psi = random_pure_state(Layout({2, 2, 2, 2}), s.stream(3, i));
        DualityConfig dc;
        dc.uhlmann = uc;
        dc.channel_seed = s.stream(4, i);
        records.push_back(duality_candidate_check(psi, random_markov_spec(2, 2, 2, s.stream(5, i)), dc));
    }
    s.run("duality_common_value", 1e-6, [&](Property& p) {
        for (const auto& r : records) {
            p.check(std::abs(r.purified_overlap - r.fidelity_abc));
            p.check(std::abs(r.uhlmann_abc - r.fidelity_abc));
            p.check(std::abs(r.uhlmann_abd - r.fidelity_abd));
        }
    });
    s.run("duality_abd_dominates", 1e-9, [&](Property& p) {
        for (const auto& r : records) p.check(r.purified_overlap - r.fidelity_abd);
    });
    s.run("dmin_monotone_under_channel_on_b", 1e-9, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto rho = random_density(Layout({2, 2, 2}), 1 + i % 8, s.stream(6, i));
            const auto sigma = build_markov_state(random_markov_spec(2, 2, 2, s.stream(7, i)));
            const Channel ch = random_cptp(2, 2, 1 + i % 3, s.stream(8, i));
            p.check(finite_gap(d_min(ch.apply_on(rho, 1), ch.apply_on(sigma, 1)), d_min(rho, sigma)));
        }
    });
    s.run("trace_norm_monotone_under_partial_trace", 1e-9, [&](Property& p) {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto rho = random_density(Layout({2, 2, 2}), 1 + i % 8, s.stream(9, i));
            const auto sigma = random_density(Layout({2, 2, 2}), 1 + (i + 3) % 8, s.stream(9, i + 1000));
            const auto sq = [](const Operator& m) { return matrix_sqrt(spectral_decompose(m)); };
            const auto ra = rho.marginal({0, 1}), sa = sigma.marginal({0, 1});
            p.check(trace_norm(sq(rho.op()) * sq(sigma.op())) - trace_norm(sq(ra.op()) * sq(sa.op())));
        }
    });
    return s.take();
}

}  // namespace

SuiteReport run_property_suite(const RunConfig& cfg, const std::string& suite) {
    cfg.validate();
    if (suite == "algebra") return algebra_suite(cfg);
    if (suite == "measures") return measures_suite(cfg);
    if (suite == "markov") return markov_suite(cfg);
    if (suite == "optimization") return optimization_suite(cfg);
    if (suite == "duality") return duality_suite(cfg);
    throw Error("unknown property suite: " + suite);
}

}  // namespace markovgap
