#pragma once

// Entropies, divergences and fidelities. All logarithms are natural (nats).

#include <limits>

#include "markovgap/states.hpp"

namespace markovgap {

// A divergence value; support violations are reported as +infinity rather
// than thrown, so optimizers can rank them.
struct DivergenceValue {
    double value = 0.0;
    bool finite = true;

    static DivergenceValue infinity() { return {std::numeric_limits<double>::infinity(), false}; }
    static DivergenceValue of(double v) { return {v, std::isfinite(v)}; }
};

double von_neumann_entropy(const DensityOperator& rho);
double conditional_entropy(const DensityOperator& rho, const IndexSet& a, const IndexSet& b);
double mutual_information(const DensityOperator& rho, const IndexSet& a, const IndexSet& b);
double cmi(const DensityOperator& rho, const Partition& part);
double cmi(const DensityOperator& rho);

// H_alpha = ln(Tr rho^alpha) / (1 - alpha).
double renyi_entropy(const DensityOperator& rho, double alpha);
double naive_renyi_cmi(const DensityOperator& rho, double alpha, const Partition& part);
double naive_renyi_cmi(const DensityOperator& rho, double alpha);

DivergenceValue relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);
// Petz form; alpha == 1 dispatches to relative_entropy.
DivergenceValue renyi_divergence(const DensityOperator& rho, const DensityOperator& sigma, double alpha);
DivergenceValue d0(const DensityOperator& rho, const DensityOperator& sigma);
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);
double purified_distance(const DensityOperator& rho, const DensityOperator& sigma);
DivergenceValue d_min(const DensityOperator& rho, const DensityOperator& sigma);
DivergenceValue sandwiched_divergence(const DensityOperator& rho, const DensityOperator& sigma, double alpha);

// Spectrum-level entry points, used when one argument is evaluated many times.
namespace spectral {

double entropy(const RealVector& eigenvalues);
DivergenceValue relative_entropy(const Spectrum& rho, const Spectrum& sigma);
DivergenceValue renyi_divergence(const Spectrum& rho, const Spectrum& sigma, double alpha);
DivergenceValue d0(const Operator& rho_support, const Operator& sigma);
// ||sqrt(rho) sqrt(sigma)||_1 plus the subnormalization correction, clamped to [0, 1].
double fidelity(const Operator& sqrt_rho, double trace_rho, const Spectrum& sigma);

}  // namespace spectral

Operator matrix_sqrt(const Spectrum& s);

}  // namespace markovgap
