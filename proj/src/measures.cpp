#include "markovgap/measures.hpp"

#include <algorithm>
#include <cmath>

namespace markovgap {

namespace {

void require_normalized(const DensityOperator& rho) {
    if (!rho.is_normalized()) throw Error("entropy needs a normalized state");
}

void require_alpha(double alpha) {
    if (!std::isfinite(alpha) || alpha <= 0.0) throw Error("Renyi order must be positive and finite");
}

void require_same_space(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim()) throw Error("states act on different spaces");
}

double marginal_entropy(const DensityOperator& rho, IndexSet keep) {
    std::sort(keep.begin(), keep.end());
    return spectral::entropy(eigenvalues(partial_trace(rho.op(), rho.layout(), keep)));
}

double marginal_renyi(const DensityOperator& rho, IndexSet keep, double alpha) {
    std::sort(keep.begin(), keep.end());
    const RealVector ev = eigenvalues(partial_trace(rho.op(), rho.layout(), keep));
    const double thr = kSupportTol * std::max(ev.maxCoeff(), 0.0);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > thr) sum += std::pow(ev(i), alpha);
    return std::log(sum) / (1.0 - alpha);
}

IndexSet join(const IndexSet& x, const IndexSet& y) {
    IndexSet out = x;
    out.insert(out.end(), y.begin(), y.end());
    return out;
}

void check_disjoint(const DensityOperator& rho, const IndexSet& a, const IndexSet& b) {
    Partition{a, b, {}}.validate(rho.layout());
}

// |<u_i|v_j>|^2 for eigenbases of two operators.
Eigen::MatrixXd overlaps(const Spectrum& rho, const Spectrum& sigma) {
    return (rho.eigenvectors.adjoint() * sigma.eigenvectors).cwiseAbs2();
}

// Weight of rho outside the support of sigma.
double support_leak(const Spectrum& rho, const Spectrum& sigma, const Eigen::MatrixXd& w) {
    const double thr_r = rho.support_threshold();
    const double thr_s = sigma.support_threshold();
    double leak = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        if (rho.eigenvalues(i) <= thr_r) continue;
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            if (sigma.eigenvalues(j) <= thr_s) leak += rho.eigenvalues(i) * w(i, j);
    }
    return leak;
}

double spectrum_trace(const Spectrum& s) { return s.eigenvalues.sum(); }

}  // namespace

namespace spectral {

double entropy(const RealVector& ev) {
    if (ev.size() == 0) return 0.0;
    const double thr = kSupportTol * std::max(ev.maxCoeff(), 0.0);
    double h = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > thr) h -= ev(i) * std::log(ev(i));
    return h;
}

DivergenceValue relative_entropy(const Spectrum& rho, const Spectrum& sigma) {
    const auto w = overlaps(rho, sigma);
    const double tr = spectrum_trace(rho);
    if (support_leak(rho, sigma, w) > kSupportTol * tr) return DivergenceValue::infinity();
    const double thr_r = rho.support_threshold();
    const double thr_s = sigma.support_threshold();
    double value = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        const double l = rho.eigenvalues(i);
        if (l <= thr_r) continue;
        double cross = 0.0;
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            if (sigma.eigenvalues(j) > thr_s) cross += w(i, j) * std::log(sigma.eigenvalues(j));
        value += l * (std::log(l) - cross);
    }
    return DivergenceValue::of(value / tr);
}

DivergenceValue renyi_divergence(const Spectrum& rho, const Spectrum& sigma, double alpha) {
    require_alpha(alpha);
    if (alpha == 1.0) return relative_entropy(rho, sigma);
    const auto w = overlaps(rho, sigma);
    const double tr = spectrum_trace(rho);
    if (alpha > 1.0 && support_leak(rho, sigma, w) > kSupportTol * tr) return DivergenceValue::infinity();
    const double thr_r = rho.support_threshold();
    const double thr_s = sigma.support_threshold();
    double q = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        if (rho.eigenvalues(i) <= thr_r) continue;
        const double ra = std::pow(rho.eigenvalues(i), alpha);
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            if (sigma.eigenvalues(j) > thr_s) q += ra * std::pow(sigma.eigenvalues(j), 1.0 - alpha) * w(i, j);
    }
    if (!(q > 0.0)) return DivergenceValue::infinity();
    return DivergenceValue::of(std::log(q / tr) / (alpha - 1.0));
}

DivergenceValue d0(const Operator& rho_support, const Operator& sigma) {
    // Tr(P sigma) without forming the product.
    const double q = (rho_support.cwiseProduct(sigma.transpose())).sum().real();
    if (!(q > 0.0)) return DivergenceValue::infinity();
    return DivergenceValue::of(-std::log(q));
}

double fidelity(const Operator& sqrt_rho, double trace_rho, const Spectrum& sigma) {
    const double trace_sigma = spectrum_trace(sigma);
    const double overlap = trace_norm(sqrt_rho * matrix_sqrt(sigma));
    const double correction = std::sqrt(std::max(0.0, 1.0 - trace_rho) * std::max(0.0, 1.0 - trace_sigma));
    return std::clamp(overlap + correction, 0.0, 1.0);
}

}  // namespace spectral

Operator matrix_sqrt(const Spectrum& s) {
    return apply_spectral_function(s, [](double x) { return std::sqrt(x); }, ZeroPolicy::map_to_zero);
}

double von_neumann_entropy(const DensityOperator& rho) {
    require_normalized(rho);
    return spectral::entropy(eigenvalues(rho.op()));
}

double conditional_entropy(const DensityOperator& rho, const IndexSet& a, const IndexSet& b) {
    require_normalized(rho);
    check_disjoint(rho, a, b);
    return marginal_entropy(rho, join(a, b)) - marginal_entropy(rho, b);
}

double mutual_information(const DensityOperator& rho, const IndexSet& a, const IndexSet& b) {
    require_normalized(rho);
    check_disjoint(rho, a, b);
    return marginal_entropy(rho, a) + marginal_entropy(rho, b) - marginal_entropy(rho, join(a, b));
}

double cmi(const DensityOperator& rho, const Partition& part) {
    require_normalized(rho);
    part.validate(rho.layout());
    const IndexSet ac = join(part.a, part.c);
    const IndexSet bc = join(part.b, part.c);
    return marginal_entropy(rho, ac) + marginal_entropy(rho, bc) - marginal_entropy(rho, part.c) -
           marginal_entropy(rho, join(ac, part.b));
}

double cmi(const DensityOperator& rho) { return cmi(rho, Partition::standard(rho.layout())); }

double renyi_entropy(const DensityOperator& rho, double alpha) {
    require_normalized(rho);
    require_alpha(alpha);
    if (alpha == 1.0) throw Error("Renyi entropy order must differ from 1");
    IndexSet all(rho.layout().size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return marginal_renyi(rho, all, alpha);
}

double naive_renyi_cmi(const DensityOperator& rho, double alpha, const Partition& part) {
    require_normalized(rho);
    require_alpha(alpha);
    part.validate(rho.layout());
    if (alpha == 1.0) return cmi(rho, part);
    const IndexSet ac = join(part.a, part.c);
    const IndexSet bc = join(part.b, part.c);
    return marginal_renyi(rho, ac, alpha) + marginal_renyi(rho, bc, alpha) - marginal_renyi(rho, part.c, alpha) -
           marginal_renyi(rho, join(ac, part.b), alpha);
}

double naive_renyi_cmi(const DensityOperator& rho, double alpha) {
    return naive_renyi_cmi(rho, alpha, Partition::standard(rho.layout()));
}

DivergenceValue relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_space(rho, sigma);
    return spectral::relative_entropy(spectral_decompose(rho.op()), spectral_decompose(sigma.op()));
}

DivergenceValue renyi_divergence(const DensityOperator& rho, const DensityOperator& sigma, double alpha) {
    require_same_space(rho, sigma);
    require_alpha(alpha);
    return spectral::renyi_divergence(spectral_decompose(rho.op()), spectral_decompose(sigma.op()), alpha);
}

DivergenceValue d0(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_space(rho, sigma);
    return spectral::d0(support_projector(rho.op()), sigma.op());
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_space(rho, sigma);
    return spectral::fidelity(matrix_sqrt(spectral_decompose(rho.op())), rho.trace(), spectral_decompose(sigma.op()));
}

double purified_distance(const DensityOperator& rho, const DensityOperator& sigma) {
    const double f = fidelity(rho, sigma);
    return std::sqrt(std::max(0.0, 1.0 - f * f));
}

DivergenceValue d_min(const DensityOperator& rho, const DensityOperator& sigma) {
    const double f = fidelity(rho, sigma);
    if (!(f > 0.0)) return DivergenceValue::infinity();
    return DivergenceValue::of(-2.0 * std::log(f));
}

DivergenceValue sandwiched_divergence(const DensityOperator& rho, const DensityOperator& sigma, double alpha) {
    require_same_space(rho, sigma);
    require_alpha(alpha);
    if (alpha == 1.0) return relative_entropy(rho, sigma);
    const Spectrum rs = spectral_decompose(rho.op());
    const Spectrum ss = spectral_decompose(sigma.op());
    if (alpha > 1.0 && support_leak(rs, ss, overlaps(rs, ss)) > kSupportTol * rho.trace())
        return DivergenceValue::infinity();
    const double gamma = (1.0 - alpha) / (2.0 * alpha);
    const Operator sg =
        apply_spectral_function(ss, [gamma](double x) { return std::pow(x, gamma); }, ZeroPolicy::map_to_zero);
    const Operator m = sg * rho.op() * sg;
    const RealVector ev = eigenvalues(0.5 * (m + m.adjoint()));
    const double thr = kSupportTol * std::max(ev.maxCoeff(), 0.0);
    double q = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > thr) q += std::pow(ev(i), alpha);
    if (!(q > 0.0)) return DivergenceValue::infinity();
    return DivergenceValue::of(std::log(q / rho.trace()) / (alpha - 1.0));
}

}  // namespace markovgap
