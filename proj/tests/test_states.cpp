#include "doctest.h"

#include <cmath>

#include "markovgap/measures.hpp"
#include "markovgap/states.hpp"
#include "oracles.hpp"

using namespace markovgap;

namespace {

Operator singlet() {
    Vector v = Vector::Zero(4);
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -1.0 / std::sqrt(2.0);
    return projector(v);
}

}  // namespace

TEST_CASE("density operator validation") {
    CHECK_NOTHROW(DensityOperator(0.5 * identity(2), Layout({2})));
    CHECK_NOTHROW(DensityOperator(0.25 * identity(2), Layout({2})));  // subnormalized
    CHECK_THROWS_AS(DensityOperator(identity(2), Layout({2})), Error);
    Operator neg = Operator::Zero(2, 2);
    neg(0, 0) = 1.2;
    neg(1, 1) = -0.2;
    CHECK_THROWS_AS(DensityOperator(neg, Layout({2})), Error);
    Operator nonherm = 0.5 * identity(2);
    nonherm(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityOperator(nonherm, Layout({2})), Error);
    CHECK_THROWS_AS(DensityOperator(0.5 * identity(2), Layout({3})), Error);
    CHECK_THROWS_AS(DensityOperator(Operator::Zero(2, 2), Layout({2})), Error);
}

TEST_CASE("antisymmetric projectors") {
    const auto p22 = antisym_projector(2, 2);
    CHECK(oracle::max_abs(p22.projector - singlet()) < 1e-15);
    CHECK(antisym_projector(4, 3).projector.trace().real() == doctest::Approx(4.0));
    CHECK(antisym_projector(5, 3).projector.trace().real() == doctest::Approx(10.0));
    for (auto [d, k] : {std::pair<std::size_t, std::size_t>{3, 3}, {4, 2}, {6, 4}}) {
        const Operator p = antisym_projector(d, k).projector;
        CHECK(oracle::max_abs(p * p - p) < 1e-9);
        CHECK(oracle::max_abs(p - p.adjoint()) == 0.0);
        CHECK(p.trace().real() == doctest::Approx(std::exp(oracle::log_binomial_exact(d, k))));
    }
    const auto empty = antisym_projector(2, 3);
    CHECK(empty.empty_subspace);
    CHECK(oracle::max_abs(empty.projector) == 0.0);
    CHECK_THROWS_AS(antisym_projector(8, 5), Error);  // 32768 > default cap
    CHECK_THROWS_AS(antisym_projector(3, 1), Error);
}

TEST_CASE("antisymmetric states") {
    CHECK(oracle::max_abs(antisym_state(2).op() - singlet()) < 1e-15);
    const DensityOperator g3 = antisym_state(3);
    CHECK(g3.trace() == doctest::Approx(1.0));
    const RealVector ev = eigenvalues(g3.op());
    CHECK(ev(0) == doctest::Approx(1.0 / 3));
    CHECK(ev(2) == doctest::Approx(1.0 / 3));
    CHECK(std::abs(ev(3)) < 1e-12);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Operator g = random_unitary(4, seed);
        const Operator gg = tensor(g, g);
        const Operator rho = antisym_state(4).op();
        CHECK(oracle::max_abs(gg * rho * gg.adjoint() - rho) <= 1e-9);
    }
}

TEST_CASE("uniform antisymmetric state marginals") {
    CHECK(oracle::max_abs(uniform_antisym_state(2, 2).op() - singlet()) < 1e-15);
    for (auto [d, k] : {std::pair<std::size_t, std::size_t>{3, 2}, {4, 3}, {5, 3}, {6, 4}}) {
        const DensityOperator rho = uniform_antisym_state(d, k);
        CHECK(rho.trace() == doctest::Approx(1.0));
        CHECK(oracle::max_abs(rho.marginal({0, 1}).op() - antisym_state(d).op()) <= 1e-10);
    }
    const DensityOperator rho = uniform_antisym_state(4, 3);
    CHECK(oracle::max_abs(rho.marginal({1, 2}).op() - antisym_state(4).op()) <= 1e-10);
}

TEST_CASE("Markov state construction") {
    const DensityOperator ra = random_density(Layout({2}), 2, 1), sb = random_density(Layout({3}), 2, 2);
    MarkovSpec product{2, 3, {MarkovBlock{1.0, 1, 1, ra.with_layout(Layout({2, 1})), sb.with_layout(Layout({1, 3}))}}, {}};
    const DensityOperator prod = build_markov_state(product);
    CHECK(oracle::max_abs(prod.op() - tensor(ra.op(), sb.op())) < 1e-15);
    CHECK(std::abs(cmi(prod)) < 1e-10);

    MarkovSpec two{2, 2, {}, {}};
    for (std::uint64_t i = 0; i < 2; ++i)
        two.blocks.push_back(MarkovBlock{0.5, 1, 1, random_density(Layout({2, 1}), 2, 10 + i),
                                         random_density(Layout({1, 2}), 2, 20 + i)});
    const DensityOperator sigma = build_markov_state(two);
    CHECK(sigma.layout() == Layout({2, 2, 2}));
    CHECK(std::abs(cmi(sigma)) < 1e-10);
    CHECK(markov_membership(sigma, 1e-8));

    // Maximally entangled A C^L with an independent B.
    Vector phi = Vector::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    MarkovSpec ent{2, 2, {MarkovBlock{1.0, 2, 1, DensityOperator(projector(phi), Layout({2, 2})),
                                      DensityOperator(0.5 * identity(2), Layout({1, 2}))}}, {}};
    const DensityOperator e = build_markov_state(ent);
    CHECK(std::abs(cmi(e)) < 1e-10);
    CHECK(std::abs(mutual_information(e, {0}, {1})) < 1e-10);
    CHECK(mutual_information(e, {0}, {2}) == doctest::Approx(2 * std::log(2.0)));
}

TEST_CASE("Markov spec validation") {
    const auto f = [](std::uint64_t s) { return random_density(Layout({2, 1}), 2, s); };
    const auto g = [](std::uint64_t s) { return random_density(Layout({1, 2}), 2, s); };
    MarkovSpec bad{2, 2, {MarkovBlock{0.6, 1, 1, f(1), g(2)}, MarkovBlock{0.6, 1, 1, f(3), g(4)}}, {}};
    CHECK_THROWS_AS(build_markov_state(bad), Error);
    MarkovSpec wrong_dims{2, 2, {MarkovBlock{1.0, 2, 1, f(1), g(2)}}, {}};
    CHECK_THROWS_AS(build_markov_state(wrong_dims), Error);
    MarkovSpec zero_p{2, 2, {MarkovBlock{1.0, 1, 1, f(1), g(2)}, MarkovBlock{0.0, 1, 1, f(3), g(4)}}, {}};
    CHECK_THROWS_AS(build_markov_state(zero_p), Error);
    MarkovSpec nonunitary{2, 2, {MarkovBlock{0.5, 1, 1, f(1), g(2)}, MarkovBlock{0.5, 1, 1, f(3), g(4)}}, Operator(2 * identity(2))};
    CHECK_THROWS_AS(build_markov_state(nonunitary), Error);
}

TEST_CASE("rotated Markov blocks stay Markov") {
    MarkovSpec spec{2, 2, {}, random_unitary(4, 5)};
    spec.blocks.push_back(MarkovBlock{0.3, 1, 2, random_density(Layout({2, 1}), 2, 6), random_density(Layout({2, 2}), 3, 7)});
    spec.blocks.push_back(MarkovBlock{0.7, 1, 2, random_density(Layout({2, 1}), 1, 8), random_density(Layout({2, 2}), 4, 9)});
    const DensityOperator sigma = build_markov_state(spec);
    CHECK(sigma.trace() == doctest::Approx(1.0));
    CHECK(std::abs(cmi(sigma)) < 1e-10);
    // Block-wise conjugation agrees with the full (I (x) U) conjugation.
    MarkovSpec plain = spec;
    plain.basis_c.reset();
    const Operator u = tensor(identity(4), *spec.basis_c);
    CHECK(oracle::max_abs(u * build_markov_state(plain).op() * u.adjoint() - sigma.op()) < 1e-14);
}

TEST_CASE("GHZ and antisymmetric states are not Markov") {
    CHECK_FALSE(markov_membership(ghz_state(3), 1e-8));
    CHECK(cmi(ghz_state(3)) == doctest::Approx(std::log(2.0)));
    CHECK_FALSE(markov_membership(uniform_antisym_state(4, 3), 1e-8));
}

TEST_CASE("Werner states") {
    const std::size_t d = 3;
    CHECK(oracle::max_abs(werner_state({d, -1.0}).op() - antisym_state(d).op()) < 1e-14);
    const Operator sym = 0.5 * (identity(9) + swap_operator(3));
    CHECK(oracle::max_abs(werner_state({d, 1.0}).op() - sym / 6.0) < 1e-14);
    CHECK(oracle::max_abs(werner_state({d, 1.0 / 3}).op() - identity(9) / 9.0) < 1e-14);
    for (double f : {-0.7, 0.0, 0.4}) CHECK((swap_operator(d) * werner_state({d, f}).op()).trace().real() == doctest::Approx(f));
    CHECK_THROWS_AS(werner_state({d, 1.5}), Error);
    CHECK_THROWS_AS(werner_state({1, 0.0}), Error);
}

TEST_CASE("U (x) U twirl") {
    const std::size_t d = 3;
    const auto g = uu_twirl(antisym_state(d));
    CHECK(oracle::max_abs(g.state.op() - antisym_state(d).op()) < 1e-14);
    const auto m = uu_twirl(DensityOperator(identity(9) / 9.0, Layout({3, 3})));
    CHECK(oracle::max_abs(m.state.op() - identity(9) / 9.0) < 1e-14);
    Vector ab = Vector::Zero(9);
    ab(0 * 3 + 1) = 1.0;  // |0>|1>
    const auto t = uu_twirl(DensityOperator(projector(ab), Layout({3, 3})));
    CHECK(std::abs(t.parameter.f) < 1e-15);
    CHECK(t.antisymmetric_weight == doctest::Approx(0.5));

    // The closed form agrees with a seeded average over random unitaries.
    const DensityOperator sigma = random_density(Layout({3, 3}), 3, 31);
    Operator avg = Operator::Zero(9, 9);
    const int samples = 4000;
    for (int i = 0; i < samples; ++i) {
        const Operator u = random_unitary(3, 1000 + static_cast<std::uint64_t>(i));
        const Operator uu = tensor(u, u);
        avg += uu * sigma.op() * uu.adjoint();
    }
    avg /= samples;
    CHECK(oracle::max_abs(avg - uu_twirl(sigma).state.op()) < 0.02);
}

TEST_CASE("random states") {
    const DensityOperator pure = random_density(Layout({2, 2}), 1, 3);
    CHECK((pure.op() * pure.op()).trace().real() == doctest::Approx(1.0));
    CHECK(oracle::max_abs(random_density(Layout({3}), 2, 9).op() - random_density(Layout({3}), 2, 9).op()) == 0.0);
    const DensityOperator full = random_density(Layout({2, 2}), 4, 4);
    CHECK(eigenvalues(full.op()).minCoeff() > 0.0);
    CHECK(spectral_decompose(random_density(Layout({4}), 3, 5).op()).rank() == 3);
    CHECK_THROWS_AS(random_density(Layout({2}), 3, 1), Error);
    CHECK_THROWS_AS(random_density(Layout({2}), 0, 1), Error);
}

TEST_CASE("purification round trip") {
    const PureStateVector mm = purify(DensityOperator(0.5 * identity(2), Layout({2})));
    CHECK(mm.layout == Layout({2, 2}));
    CHECK(oracle::max_abs(partial_trace(projector(mm.amplitudes), mm.layout, {0}) - 0.5 * identity(2)) < 1e-15);

    const PureStateVector p = random_pure_state(Layout({3}), 8);
    const PureStateVector pp = purify(p.density());
    CHECK(pp.layout.dim(1) == 1);
    CHECK(std::abs(pp.amplitudes.dot(p.amplitudes)) == doctest::Approx(1.0));

    const DensityOperator r3 = random_density(Layout({4}), 3, 10);
    const PureStateVector psi = purify(r3);
    CHECK(psi.layout.dim(1) == 3);
    CHECK(oracle::max_abs(partial_trace(projector(psi.amplitudes), psi.layout, {0}) - r3.op()) <= 1e-10);
    CHECK_THROWS_AS(purify(DensityOperator(0.25 * identity(2), Layout({2}))), Error);
}

TEST_CASE("random channels") {
    const Channel u = random_cptp(3, 3, 1, 4);
    const DensityOperator rho = random_density(Layout({3}), 3, 5);
    const RealVector before = eigenvalues(rho.op()), after = eigenvalues(u.apply(rho.op()));
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);

    const Channel ch = random_cptp(2, 3, 3, 6);
    CHECK(oracle::max_abs(ch.completeness() - identity(2)) <= 1e-10);
    CHECK_NOTHROW(DensityOperator(ch.apply(random_density(Layout({2}), 2, 7).op()), Layout({3})));

    const Channel a = random_cptp(2, 2, 2, 8), b = random_cptp(2, 2, 2, 8);
    for (std::size_t i = 0; i < 2; ++i) CHECK(oracle::max_abs(a.kraus[i] - b.kraus[i]) == 0.0);

    const Channel sub = random_cptp(2, 2, 2, 9, 0.5);
    CHECK(oracle::max_abs(sub.completeness() - 0.5 * identity(2)) <= 1e-10);

    const DensityOperator abc = random_density(Layout({2, 2, 2}), 3, 11);
    const DensityOperator out = random_cptp(2, 3, 2, 12).apply_on(abc, 1);
    CHECK(out.layout() == Layout({2, 3, 2}));
    CHECK(out.trace() == doctest::Approx(1.0));
}
