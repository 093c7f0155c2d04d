#include "doctest.h"

#include <cmath>

#include "markovgap/measures.hpp"
#include "markovgap/repro.hpp"
#include "markovgap/serialize.hpp"
#include "oracles.hpp"

using namespace markovgap;

TEST_CASE("closed-form antisymmetric CMI") {
    CHECK(cmi_antisym_formula(4) == doctest::Approx(0.8109302).epsilon(1e-7));
    CHECK(cmi_antisym_formula(5) == doctest::Approx(0.6931472).epsilon(1e-7));
    CHECK(cmi_antisym_formula(27) == doctest::Approx(0.1431008).epsilon(1e-7));
    CHECK(antisym_block_size(4) == 3);
    CHECK(antisym_block_size(27) == 14);
    CHECK_THROWS_AS(cmi_antisym_formula(2), Error);
}

TEST_CASE("binomial CMI expression") {
    // ln C(d, k) oracle by exact summation of logs.
    for (std::size_t d : {4, 7, 12, 40}) {
        for (std::size_t k = 2; k <= d; ++k) {
            const double want = 2 * oracle::log_binomial_exact(d, k - 1) - oracle::log_binomial_exact(d, k - 2) -
                                oracle::log_binomial_exact(d, k);
            CHECK(cmi_antisym_binomial(d, k) == doctest::Approx(want).epsilon(1e-12));
        }
    }
    CHECK(log_binomial(10, 3) == doctest::Approx(std::log(120.0)).epsilon(1e-14));
    for (std::size_t d = 3; d <= 10000; d += (d < 200 ? 1 : 97)) {
        const double diff = std::abs(cmi_antisym_binomial(d, antisym_block_size(d)) - cmi_antisym_formula(d));
        CHECK(diff <= 1e-12);
    }
    CHECK_THROWS_AS(cmi_antisym_binomial(5, 1), Error);
    CHECK_THROWS_AS(cmi_antisym_binomial(5, 6), Error);
}

TEST_CASE("crossover scan") {
    CHECK(crossover_scan(3, 100) == std::optional<std::size_t>(27));
    CHECK_FALSE(crossover_scan(3, 26).has_value());
    CHECK(crossover_scan(28, 100) == std::optional<std::size_t>(28));
    // Oracle: direct comparison at the boundary.
    const double c = 0.5 * std::log(4.0 / 3.0);
    CHECK(c > cmi_antisym_formula(27));
    CHECK(c <= cmi_antisym_formula(26));
    CHECK_THROWS_AS(crossover_scan(10, 5), Error);
}

TEST_CASE("decay bound") {
    CHECK(decay_bound_check(5));
    CHECK(decay_bound_check(100));
    CHECK(decay_bound_check(10000));
    for (std::size_t d : {5, 100, 9999}) CHECK(cmi_antisym_formula(d) <= 4.0 / (d - 1) + 1e-15);
}

TEST_CASE("table rows") {
    RunConfig cfg;
    const auto rows = compute_table(cfg, {4, 5, 26, 27});
    REQUIRE(rows.size() == 4);
    REQUIRE(rows[0].cmi_dense.has_value());
    CHECK(std::abs(*rows[0].cmi_dense - rows[0].cmi_formula) <= 1e-9);
    REQUIRE(rows[1].cmi_dense.has_value());
    CHECK(std::abs(*rows[1].cmi_dense - std::log(2.0)) <= 1e-9);
    CHECK_FALSE(rows[2].cmi_dense.has_value());  // 26^13 is far above the cap
    CHECK_FALSE(rows[2].separated);
    CHECK(rows[3].separated);
    CHECK(rows[3].k == 14);
    for (const auto& r : rows) CHECK(r.delta0_constant == doctest::Approx(0.1438410362).epsilon(1e-10));
    CHECK(rows[0].delta0_twirl == doctest::Approx(std::log(2.0)));

    RunConfig bits = cfg;
    bits.log_base = LogBase::bits;
    CHECK(bits.display(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
    const std::string csv = render_table_csv(compute_table(bits, {5}), bits);
    CHECK(csv.rfind(std::string(kTableHeader) + "\n", 0) == 0);
    const auto back = parse_table_csv(csv);
    CHECK(back[0].cmi_formula == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("CSV round trip is bit-exact") {
    RunConfig cfg;
    const auto rows = compute_table(cfg, {3, 4, 5, 6, 27, 30});
    const auto back = parse_table_csv(render_table_csv(rows, cfg));
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].d == rows[i].d);
        CHECK(back[i].k == rows[i].k);
        CHECK(back[i].cmi_formula == rows[i].cmi_formula);
        CHECK(back[i].cmi_dense == rows[i].cmi_dense);
        CHECK(back[i].delta0_constant == rows[i].delta0_constant);
        CHECK(back[i].delta0_twirl == rows[i].delta0_twirl);
        CHECK(back[i].separated == rows[i].separated);
    }
    CHECK_THROWS_AS(parse_table_csv("bad,header\n"), Error);
}

TEST_CASE("table JSON") {
    RunConfig cfg;
    const json j = render_table_json(compute_table(cfg, {4}), cfg);
    CHECK(j["log_base"] == "nats");
    CHECK(j["rows"][0]["d"] == 4);
    CHECK(j["rows"][0]["separated"] == false);
}

TEST_CASE("naive Renyi witness") {
    const auto w = find_naive_renyi_witness(0, 20000);
    REQUIRE(w.has_value());
    CHECK(w->value < -0.01);
    CHECK((w->alpha == 0.5 || w->alpha == 2.0));
    CHECK(w->state.rows() == 8);
    // Recompute the naive combination directly from entropies.
    const DensityOperator rho(w->state, Layout({2, 2, 2}));
    const double a = w->alpha;
    const double direct = renyi_entropy(rho.marginal({0, 2}), a) + renyi_entropy(rho.marginal({1, 2}), a) -
                          renyi_entropy(rho.marginal({2}), a) - renyi_entropy(rho, a);
    CHECK(direct == doctest::Approx(w->value).epsilon(1e-12));

    const std::string text = dump_json(witness_to_json(*w));
    const NaiveRenyiWitness back = witness_from_json(json::parse(text));
    CHECK(back.sample == w->sample);
    CHECK(back.value == w->value);
    CHECK(oracle::max_abs(back.state - w->state) == 0.0);
    const NaiveRenyiWitness replay = replay_naive_renyi_witness(back.seed, back.sample, back.alpha);
    CHECK(replay.value == w->value);
    CHECK(replay.rank == w->rank);
    CHECK(oracle::max_abs(replay.state - w->state) == 0.0);
}

TEST_CASE("run configuration") {
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.tol = std::nan("");
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.tol = 1e-9;
    cfg.dim_cap = 2;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("property suites") {
    const auto& names = property_suite_names();
    CHECK(names.size() == 5);
    RunConfig cfg;
    CHECK_THROWS_AS(run_property_suite(cfg, "nope"), Error);
    const SuiteReport a = run_property_suite(cfg, "measures");
    CHECK(a.passed());
    for (const auto& p : a.properties) {
        CHECK(p.samples > 0);
        CHECK(p.worst_margin >= 0.0);
    }
    const SuiteReport b = run_property_suite(cfg, "measures");
    CHECK(dump_json(suite_report_to_json(a)) == dump_json(suite_report_to_json(b)));

    cfg.tol = 1e-30;
    CHECK_FALSE(run_property_suite(cfg, "measures").passed());
}

TEST_CASE("number formatting is stable") {
    CHECK(format_number(0.5) == "5.0000000000000000e-01");
    CHECK(std::stod(format_number(0.1)) == 0.1);
    CHECK(dump_json(json{{"x", std::nan("")}}).find("null") != std::string::npos);
}
