#include "doctest.h"

#include <cmath>

#include "markovgap/markov_opt.hpp"
#include "markovgap/serialize.hpp"
#include "oracles.hpp"

using namespace markovgap;

namespace {

const double kLn2 = std::log(2.0);

SearchConfig small_budget(std::uint64_t seed = 1) {
    SearchConfig cfg;
    cfg.seed = seed;
    cfg.restarts = 2;
    cfg.iterations = 300;
    return cfg;
}

MarkovSpec two_block_spec(std::uint64_t seed) {
    MarkovSpec spec{2, 2, {}, std::nullopt};
    spec.blocks.push_back(MarkovBlock{0.4, 1, 1, random_density(Layout({2, 1}), 2, seed),
                                      random_density(Layout({1, 2}), 2, seed + 1)});
    spec.blocks.push_back(MarkovBlock{0.6, 1, 1, random_density(Layout({2, 1}), 2, seed + 2),
                                      random_density(Layout({1, 2}), 2, seed + 3)});
    return spec;
}

}  // namespace

TEST_CASE("block structures enumerate tilings of C") {
    CHECK(block_structures(1, 3).size() == 1);
    CHECK(block_structures(2, 3).size() == 3);  // (1x2), (2x1), (1x1)+(1x1)
    const auto s4 = block_structures(4, 3);
    CHECK(s4.size() == 10);
    for (const auto& st : s4) {
        std::size_t total = 0;
        for (const auto& b : st) total += b.dim_cl * b.dim_cr;
        CHECK(total == 4);
        CHECK(st.size() <= 3);
    }
    CHECK(block_structures(4, 1).size() == 3);  // 1x4, 2x2, 4x1
}

TEST_CASE("Werner reduction") {
    for (std::size_t d : {3, 10}) {
        const auto r = werner_d0_minimize(d);
        CHECK(r.value == doctest::Approx(kLn2).epsilon(1e-12));
        CHECK(r.bound_kind == BoundKind::exact);
        const auto& w = std::get<WernerParameter>(r.candidate);
        CHECK(w.f == 0.0);
        // 1-D grid oracle over the twirled separable range f in [0, 1].
        double best = 1e300;
        for (int i = 0; i <= 10000; ++i) best = std::min(best, -std::log((1.0 - i / 10000.0) / 2.0));
        CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
        CHECK(r.value >= 0.1438410);
    }
    CHECK_THROWS_AS(werner_d0_minimize(1), Error);
}

TEST_CASE("antisymmetric Delta_0 lower bound") {
    const auto r = delta0_antisym_lower(4, 3);
    CHECK(r.value == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(r.bound_kind == BoundKind::lower);
    CHECK(r.certificate.find("Tr_C") != std::string::npos);
    CHECK(r.certificate.find("separable") != std::string::npos);
    CHECK(delta0_antisym_lower(27, 14).value >= separable_constant());
    CHECK(separable_constant() == doctest::Approx(0.1438410362).epsilon(1e-10));
    CHECK_THROWS_AS(delta0_antisym_lower(3, 4), Error);
}

TEST_CASE("certified Delta_0 lower bound") {
    CHECK(delta0_certified_lower(uniform_antisym_state(4, 3)) == doctest::Approx(kLn2).epsilon(1e-12));
    // A product state has a product support vector: no separation certified.
    const DensityOperator prod(tensor_all({random_pure_state(Layout({2}), 1).density().op(),
                                           random_pure_state(Layout({2}), 2).density().op(), 0.5 * identity(2)}),
                               Layout({2, 2, 2}));
    CHECK(std::abs(delta0_certified_lower(prod)) < 1e-12);
}

TEST_CASE("Markov input gives a vanishing upper bound") {
    const DensityOperator sigma = build_markov_state(two_block_spec(10));
    auto cfg = small_budget();
    cfg.iterations = 1500;
    for (const auto& obj : {Objective::renyi_order(1.0), Objective::renyi_order(0.5), Objective::fidelity_based()}) {
        const auto r = delta_upper(sigma, obj, cfg);
        CHECK(r.bound_kind == BoundKind::upper);
        CHECK(r.value <= 1e-6);
    }
}

TEST_CASE("upper bounds for the antisymmetric state") {
    const DensityOperator rho = uniform_antisym_state(4, 3);
    // The sandwich holds for any valid candidate, so a tiny budget suffices.
    auto cfg = small_budget(3);
    cfg.restarts = 1;
    cfg.iterations = 40;
    cfg.max_blocks = 2;
    const auto relent = delta_relent_upper(rho, cfg);
    CHECK(relent.value >= cmi(rho) - 1e-9);
    const auto zero = delta_alpha_upper(rho, 0.0, cfg);
    CHECK(zero.value >= delta0_antisym_lower(4, 3).value - 1e-9);
    const auto dmin = delta_min_upper(rho, cfg);
    CHECK(dmin.value >= delta0_certified_lower(rho) - 1e-9);

    for (const auto* r : {&relent, &zero, &dmin}) {
        const DensityOperator sigma = candidate_state(*r);
        CHECK(cmi(sigma) <= 1e-8);
        CHECK(std::holds_alternative<MarkovSpec>(r->candidate));
    }
    CHECK(std::abs(relative_entropy(rho, candidate_state(relent)).value - relent.value) <= 1e-8);
    CHECK(std::abs(d0(rho, candidate_state(zero)).value - zero.value) <= 1e-8);
    CHECK(std::abs(d_min(rho, candidate_state(dmin)).value - dmin.value) <= 1e-8);
}

TEST_CASE("GHZ upper bounds") {
    const DensityOperator ghz = ghz_state(3);
    const auto cfg = small_budget(4);
    const auto dmin = delta_min_upper(ghz, cfg);
    CHECK(dmin.value > 0.0);
    CHECK(std::isfinite(dmin.value));
    CHECK(delta_relent_upper(ghz, cfg).value >= kLn2 - 1e-6);
}

TEST_CASE("every relative-entropy candidate respects the CMI bound") {
    const DensityOperator rho = random_density(Layout({2, 2, 4}), 3, 5);
    const double c = cmi(rho);
    auto cfg = small_budget(6);
    std::size_t seen = 0;
    double worst = 1e300;
    cfg.observer = [&](const DensityOperator& sigma, double v) {
        ++seen;
        worst = std::min(worst, v - c);
        CHECK(std::abs(v - relative_entropy(rho, sigma).value) <= 1e-9 * std::max(1.0, std::abs(v)));
    };
    delta_relent_upper(rho, cfg);
    CHECK(seen > 100);
    CHECK(worst >= -1e-8);
}

TEST_CASE("searches over a general partition") {
    // rho on (C, A, B) ordering; the partition names the roles explicitly.
    const DensityOperator markov = build_markov_state(two_block_spec(20));
    const DensityOperator moved(permute_subsystems(markov.op(), markov.layout(), {2, 0, 1}), Layout({2, 2, 2}));
    auto cfg = small_budget();
    cfg.iterations = 1500;
    const auto r = delta_upper(moved, Objective::renyi_order(1.0), cfg, Partition{{1}, {2}, {0}});
    CHECK(r.value <= 1e-6);
}

TEST_CASE("restart order does not change the report") {
    const DensityOperator rho = random_density(Layout({2, 2, 2}), 2, 7);
    auto a = small_budget(8);
    a.restarts = 4;
    auto b = a;
    b.threads = 4;
    CHECK(dump_json(report_to_json(delta_relent_upper(rho, a))) == dump_json(report_to_json(delta_relent_upper(rho, b))));
    auto c = a;
    c.seed = 9;
    const json jc = report_to_json(delta_relent_upper(rho, c));
    CHECK(jc["seed"] == 9);
    CHECK(jc["value"].get<double>() <= delta_relent_upper(rho, a).value + 1e-3);
}

TEST_CASE("fixed candidate divergences are monotone in alpha") {
    const DensityOperator rho = random_density(Layout({2, 2, 2}), 4, 11);
    const DensityOperator sigma = candidate_state(delta_relent_upper(rho, small_budget(12)));
    double prev = -1e300;
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 1.5, 2.0, 3.0}) {
        const double v = evaluate_objective(rho, sigma, Objective::renyi_order(a)).value;
        CHECK(v >= prev - 1e-9);
        prev = v;
    }
}

TEST_CASE("smoothing") {
    const DensityOperator rho = uniform_antisym_state(4, 3);
    SmoothingConfig cfg;
    cfg.directions = 6;
    const double base = smooth_delta0_lower(rho, 0.0, cfg).value;
    CHECK(base == doctest::Approx(delta0_certified_lower(rho)));
    double prev = base;
    for (double eps : {0.05, 0.1, 0.2, 0.5}) {
        const auto r = smooth_delta0_lower(rho, eps, cfg);
        CHECK(r.bound_kind == BoundKind::lower);
        CHECK(r.value >= prev);
        prev = r.value;
    }
    CHECK(smooth_delta0_lower(rho, 0.1, cfg).value >= separable_constant());
    CHECK_THROWS_AS(smooth_delta0_lower(rho, 1.0, cfg), Error);
    CHECK_THROWS_AS(smooth_delta0_lower(rho, -0.1, cfg), Error);
}

TEST_CASE("smoothing can raise the bound") {
    // Tr_C of a noisy singlet mixture has full support; a truncated neighbour is antisymmetric on AB.
    const DensityOperator noisy(0.9 * tensor(antisym_state(2).op(), 0.5 * identity(2)) + 0.1 * identity(8) / 8.0,
                                Layout({2, 2, 2}));
    SmoothingConfig cfg;
    const double base = smooth_delta0_lower(noisy, 0.0, cfg).value;
    const double smoothed = smooth_delta0_lower(noisy, 0.5, cfg).value;
    CHECK(base == doctest::Approx(0.0));
    CHECK(smoothed == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(smooth_delta0_lower(noisy, 0.1, cfg).value == doctest::Approx(0.0));
}

TEST_CASE("tensor-power bounds") {
    auto cfg = small_budget(13);
    cfg.restarts = 1;
    cfg.iterations = 200;
    for (std::size_t n : {1, 2, 3}) {
        const auto [lower, upper] = tensor_power_delta0_bounds(4, 3, n, cfg);
        CHECK(lower.value == doctest::Approx(n * 0.1438410362).epsilon(1e-9));
        CHECK(lower.bound_kind == BoundKind::lower);
        CHECK(upper.bound_kind == BoundKind::upper);
        CHECK(upper.value >= lower.value);
    }
    const auto three = tensor_power_delta0_bounds(4, 3, 3, cfg).first;
    CHECK(three.value == doctest::Approx(0.4315231).epsilon(1e-7));
    CHECK_THROWS_AS(tensor_power_delta0_bounds(4, 3, 0, cfg), Error);
}

TEST_CASE("dense and additive tensor-power evaluations agree") {
    // (2^2)^2 = 16 stays dense; D_0 is additive on product pairs.
    auto cfg = small_budget(14);
    cfg.restarts = 1;
    const auto one = tensor_power_delta0_bounds(2, 2, 1, cfg).second;
    const auto two = tensor_power_delta0_bounds(2, 2, 2, cfg).second;
    CHECK(two.value == doctest::Approx(2 * one.value).epsilon(1e-10));
}

TEST_CASE("CMI versus Delta gap") {
    const auto g27 = cmi_vs_delta_gap(27);
    CHECK(g27.separated);
    CHECK(g27.k == 14);
    CHECK(g27.cmi_value == doctest::Approx(std::log(15.0 / 13.0)));
    CHECK(g27.cmi_value == doctest::Approx(0.1431008).epsilon(1e-7));
    const auto g26 = cmi_vs_delta_gap(26);
    CHECK_FALSE(g26.separated);
    CHECK(g26.cmi_value == doctest::Approx(0.1482159).epsilon(1e-7));
    const auto g4 = cmi_vs_delta_gap(4);
    CHECK_FALSE(g4.separated);
    CHECK(g4.cmi_value == doctest::Approx(0.8109302).epsilon(1e-7));
    CHECK(g4.delta_lower == doctest::Approx(0.1438410).epsilon(1e-7));
}

TEST_CASE("Uhlmann fidelity") {
    UhlmannConfig cfg;
    const DensityOperator r = random_density(Layout({2}), 2, 15);
    CHECK(uhlmann_fidelity(r, r, cfg) == doctest::Approx(1.0).epsilon(1e-9));
    Operator a = Operator::Zero(2, 2), b = 0.5 * identity(2);
    a(0, 0) = 0.75;
    a(1, 1) = 0.25;
    // Commuting case: sum of sqrt(p_i q_i).
    CHECK(uhlmann_fidelity(DensityOperator(a, Layout({2})), DensityOperator(b, Layout({2})), cfg) ==
          doctest::Approx(std::sqrt(3.0 / 8.0) + std::sqrt(1.0 / 8.0)).epsilon(1e-9));
    for (std::uint64_t i = 0; i < 10; ++i) {
        const auto x = random_density(Layout({2}), 1 + i % 2, 100 + i), y = random_density(Layout({2}), 2, 200 + i);
        CHECK(std::abs(uhlmann_fidelity(x, y, cfg) - fidelity(x, y)) <= 1e-6);
    }
    const auto x4 = random_density(Layout({4}), 3, 16), y4 = random_density(Layout({4}), 4, 17);
    CHECK(std::abs(uhlmann_fidelity(x4, y4, cfg) - fidelity(x4, y4)) <= 1e-6);
    CHECK_THROWS_AS(uhlmann_fidelity(random_density(Layout({17}), 1, 1), random_density(Layout({17}), 1, 2), cfg), Error);
}

TEST_CASE("Uhlmann search returns a unitary achieving the overlap") {
    const auto psi = purify(random_density(Layout({3}), 3, 18)), phi = purify(random_density(Layout({3}), 3, 19));
    const auto res = uhlmann_search(psi.amplitudes, phi.amplitudes, 3, 3);
    CHECK(oracle::max_abs(res.unitary * res.unitary.adjoint() - identity(3)) < 1e-12);
    const Vector moved = tensor(identity(3), res.unitary) * phi.amplitudes;
    CHECK(std::abs(psi.amplitudes.dot(moved)) == doctest::Approx(res.overlap).epsilon(1e-12));
    // After the global phase fix the overlap is real and positive.
    CHECK(psi.amplitudes.dot(moved).real() == doctest::Approx(res.overlap).epsilon(1e-12));
}

TEST_CASE("duality candidate check") {
    // Product pure state with the matching product Markov state.
    const auto a = random_pure_state(Layout({2}), 1), b = random_pure_state(Layout({2}), 2),
               c = random_pure_state(Layout({2}), 3), d = random_pure_state(Layout({2}), 4);
    const PureStateVector prod(tensor(tensor(a.amplitudes, b.amplitudes), tensor(c.amplitudes, d.amplitudes)),
                               Layout({2, 2, 2, 2}));
    MarkovSpec match{2, 2, {MarkovBlock{1.0, 2, 1, DensityOperator(tensor(a.density().op(), c.density().op()), Layout({2, 2})),
                                        b.density().with_layout(Layout({1, 2}))}}, std::nullopt};
    const auto rec = duality_candidate_check(prod, match);
    CHECK(rec.fidelity_abc == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rec.fidelity_abd == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rec.common_value);

    for (std::uint64_t i = 0; i < 3; ++i) {
        DualityConfig cfg;
        cfg.channel_seed = 50 + i;
        const auto r = duality_candidate_check(random_pure_state(Layout({2, 2, 2, 2}), 30 + i), two_block_spec(40 + 4 * i), cfg);
        CHECK(r.common_value);
        CHECK(r.abd_consistent);
        CHECK(r.dpi_holds);
        CHECK(std::abs(r.purified_overlap - r.fidelity_abc) <= 1e-6);
        CHECK(r.dmin_after <= r.dmin_before + 1e-9);
    }
    CHECK_THROWS_AS(duality_candidate_check(random_pure_state(Layout({2, 2, 4}), 1), two_block_spec(1)), Error);
    CHECK_THROWS_AS(duality_candidate_check(random_pure_state(Layout({2, 2, 2, 4}), 1), two_block_spec(1)), Error);
}

TEST_CASE("report serialization") {
    const auto r = delta0_antisym_lower(4, 3);
    const json j = report_to_json(r);
    for (const char* key : {"value", "bound_kind", "iterations", "restarts", "seed", "certificate", "candidate"})
        CHECK(j.contains(key));
    CHECK(j["bound_kind"] == "lower");
    CHECK(j["candidate"]["type"] == "werner");

    const auto up = delta_relent_upper(random_density(Layout({2, 2, 2}), 2, 21), small_budget(22));
    const json ju = report_to_json(up);
    const MarkovSpec back = markov_spec_from_json(ju["candidate"]["spec"]);
    const auto& spec = std::get<MarkovSpec>(up.candidate);
    CHECK(oracle::max_abs(build_markov_state(back).op() - build_markov_state(spec).op()) == 0.0);
    for (const char* key : {"p", "dimCL", "dimCR", "left", "right"}) CHECK(ju["candidate"]["spec"]["blocks"][0].contains(key));
}
