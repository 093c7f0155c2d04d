#include "markovgap/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "markovgap/measures.hpp"
#include "markovgap/rng.hpp"

namespace markovgap {

DensityOperator::DensityOperator(Operator op, Layout layout, bool validate)
    : op_(std::move(op)), layout_(std::move(layout)) {
    if (op_.rows() != op_.cols()) throw Error("density operator must be square");
    if (static_cast<std::size_t>(op_.rows()) != layout_.total())
        throw Error("layout does not match density operator dimension");
    if (!validate) return;
    if (!op_.allFinite()) throw Error("density operator has non-finite entries");
    if (!is_hermitian(op_)) throw Error("density operator is not Hermitian");
    const double tr = trace();
    if (!(tr > 0.0) || tr > 1.0 + 1e-10) throw Error("density operator trace must lie in (0, 1]");
    if (eigenvalues(op_).minCoeff() < -1e-10) throw Error("density operator is not positive semidefinite");
}

DensityOperator::DensityOperator(Operator op, Layout layout)
    : DensityOperator(std::move(op), std::move(layout), true) {}

DensityOperator::DensityOperator(Operator op)
    : DensityOperator(op, Layout({static_cast<std::size_t>(op.rows())}), true) {}

DensityOperator DensityOperator::trusted(Operator op, Layout layout) {
    return DensityOperator(std::move(op), std::move(layout), false);
}

bool DensityOperator::is_normalized(double tol) const { return std::abs(trace() - 1.0) <= tol; }

DensityOperator DensityOperator::marginal(const IndexSet& keep) const {
    IndexSet sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    return trusted(partial_trace(op_, layout_, sorted), layout_.subset(sorted));
}

DensityOperator DensityOperator::with_layout(Layout layout) const {
    if (layout.total() != layout_.total()) throw Error("relabelled layout has the wrong total dimension");
    return trusted(op_, std::move(layout));
}

Partition Partition::standard(const Layout& layout) {
    if (layout.size() < 2) throw Error("need at least two subsystems for an A|B|C split");
    Partition p{{0}, {1}, {}};
    for (std::size_t i = 2; i < layout.size(); ++i) p.c.push_back(i);
    return p;
}

void Partition::validate(const Layout& layout) const {
    std::vector<int> seen(layout.size(), 0);
    for (const auto* set : {&a, &b, &c})
        for (auto i : *set) {
            if (i >= layout.size()) throw Error("partition index out of range");
            if (seen[i]++) throw Error("partition sets overlap");
        }
}

PureStateVector::PureStateVector(Vector amps, Layout lay) : amplitudes(std::move(amps)), layout(std::move(lay)) {
    if (static_cast<std::size_t>(amplitudes.size()) != layout.total())
        throw Error("layout does not match state vector dimension");
    if (std::abs(amplitudes.norm() - 1.0) > 1e-10) throw Error("pure state vector must have unit norm");
}

DensityOperator PureStateVector::density() const {
    return DensityOperator::trusted(projector(amplitudes), layout);
}

void WernerParameter::validate() const {
    if (d < 2) throw Error("Werner states need d >= 2");
    if (!(f >= -1.0 && f <= 1.0)) throw Error("Werner parameter f must lie in [-1, 1]");
}

std::size_t MarkovSpec::dim_c() const {
    std::size_t total = 0;
    for (const auto& b : blocks) total += b.dim_cl * b.dim_cr;
    return total;
}

void MarkovSpec::validate() const {
    if (blocks.empty()) throw Error("Markov spec needs at least one block");
    if (dim_a < 1 || dim_b < 1) throw Error("Markov spec dimensions must be positive");
    double total = 0.0;
    for (const auto& b : blocks) {
        if (!(b.p > 0.0)) throw Error("block probabilities must be positive");
        total += b.p;
        if (b.dim_cl < 1 || b.dim_cr < 1) throw Error("block dimensions must be positive");
        if (b.left.dim() != dim_a * b.dim_cl) throw Error("left factor must act on A (x) C^L");
        if (b.right.dim() != b.dim_cr * dim_b) throw Error("right factor must act on C^R (x) B");
        if (!b.left.is_normalized() || !b.right.is_normalized())
            throw Error("block factors must be normalized");
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error("block probabilities must sum to 1");
    if (basis_c) {
        const auto n = static_cast<Eigen::Index>(dim_c());
        if (basis_c->rows() != n || basis_c->cols() != n) throw Error("C basis unitary has wrong size");
        if (max_abs(basis_c->adjoint() * *basis_c - Operator::Identity(n, n)) > 1e-10)
            throw Error("C basis change is not unitary");
    }
}

Operator Channel::apply(const Operator& op) const {
    Operator out = Operator::Zero(static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(dout));
    for (const auto& k : kraus) out += k * op * k.adjoint();
    return out;
}

DensityOperator Channel::apply_on(const DensityOperator& rho, std::size_t index) const {
    const auto& layout = rho.layout();
    if (index >= layout.size() || layout.dim(index) != din) throw Error("channel input dimension mismatch");
    auto dims = layout.dims();
    dims[index] = dout;
    Operator out = Operator::Zero(static_cast<Eigen::Index>(layout.total() / din * dout),
                                  static_cast<Eigen::Index>(layout.total() / din * dout));
    for (const auto& k : kraus) {
        const Operator big = lift(k, layout, index);
        out += big * rho.op() * big.adjoint();
    }
    return DensityOperator::trusted(std::move(out), Layout(dims));
}

Operator Channel::completeness() const {
    Operator out = Operator::Zero(static_cast<Eigen::Index>(din), static_cast<Eigen::Index>(din));
    for (const auto& k : kraus) out += k.adjoint() * k;
    return out;
}

namespace {

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

int permutation_sign(const Permutation& p) {
    int inversions = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inversions;
    return inversions % 2 ? -1 : 1;
}

Operator gaussian_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng) {
    Operator g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            const double re = rng.gaussian();
            const double im = rng.gaussian();
            g(i, j) = Complex(re, im);
        }
    return g;
}

// Columns orthonormalized by Householder QR with the R-diagonal phases removed.
Operator random_isometry(std::size_t rows, std::size_t cols, SplitMix64& rng) {
    if (rows < cols) throw Error("isometry needs rows >= cols");
    const Operator g = gaussian_matrix(rows, cols, rng);
    Eigen::HouseholderQR<Operator> qr(g);
    Operator q = qr.householderQ() * Operator::Identity(g.rows(), g.cols());
    const Operator& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

}  // namespace

AntisymProjector antisym_projector(std::size_t d, std::size_t k, std::size_t dim_cap) {
    if (d < 1 || k < 2) throw Error("antisymmetric projector needs d >= 1 and k >= 2");
    const Layout layout(std::vector<std::size_t>(k, d));
    check_dim_cap(layout.total(), dim_cap);
    const auto n = static_cast<Eigen::Index>(layout.total());
    AntisymProjector out{Operator::Zero(n, n), k > d};
    if (out.empty_subspace) return out;

    const auto strides = layout.strides();
    Permutation pi(k);
    std::iota(pi.begin(), pi.end(), 0);
    double factorial = 1.0;
    for (std::size_t i = 2; i <= k; ++i) factorial *= static_cast<double>(i);

    std::vector<std::size_t> digits(k);
    do {
        const double weight = permutation_sign(pi) / factorial;
        for (std::size_t x = 0; x < layout.total(); ++x) {
            std::size_t rem = x;
            for (std::size_t j = 0; j < k; ++j) {
                digits[j] = rem / strides[j];
                rem %= strides[j];
            }
            // R(pi) moves the content of factor j to position pi[j].
            std::size_t y = 0;
            for (std::size_t j = 0; j < k; ++j) y += digits[j] * strides[pi[j]];
            out.projector(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) += weight;
        }
    } while (std::next_permutation(pi.begin(), pi.end()));
    return out;
}

Operator swap_operator(std::size_t d) { return permutation_operator(Layout({d, d}), {1, 0}); }

Operator symmetric_projector(std::size_t d) {
    return 0.5 * (identity(d * d) + swap_operator(d));
}

DensityOperator antisym_state(std::size_t d, std::size_t dim_cap) {
    if (d < 2) throw Error("antisymmetric state needs d >= 2");
    return uniform_antisym_state(d, 2, dim_cap);
}

DensityOperator uniform_antisym_state(std::size_t d, std::size_t k, std::size_t dim_cap) {
    if (k < 2 || k > d) throw Error("uniform antisymmetric state needs 2 <= k <= d");
    auto p = antisym_projector(d, k, dim_cap);
    return DensityOperator::trusted(p.projector / binomial(d, k), Layout(std::vector<std::size_t>(k, d)));
}

DensityOperator build_markov_state(const MarkovSpec& spec) {
    spec.validate();
    const std::size_t da = spec.dim_a, db = spec.dim_b, dc = spec.dim_c();
    const std::size_t n = da * db * dc;
    Operator sigma = Operator::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    std::size_t offset = 0;
    for (const auto& block : spec.blocks) {
        const std::size_t m = block.dim_cl * block.dim_cr;
        const Layout natural({da, block.dim_cl, block.dim_cr, db});
        const Operator local = permute_subsystems(Operator(block.p * tensor(block.left.op(), block.right.op())),
                                                  natural, {0, 3, 1, 2});
        // local is ordered A, B, C^L, C^R; scatter it into the C range [offset, offset + m).
        for (std::size_t r = 0; r < da * db * m; ++r) {
            const std::size_t gr = (r / m) * dc + offset + r % m;
            for (std::size_t c = 0; c < da * db * m; ++c) {
                const std::size_t gc = (c / m) * dc + offset + c % m;
                sigma(static_cast<Eigen::Index>(gr), static_cast<Eigen::Index>(gc)) =
                    local(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            }
        }
        offset += m;
    }
    if (spec.basis_c) {
        // (I (x) U) sigma (I (x) U)^dagger, one C-block at a time.
        const Operator& u = *spec.basis_c;
        const auto c = static_cast<Eigen::Index>(dc);
        for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(da * db); ++r)
            for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(da * db); ++s) {
                auto blk = sigma.block(r * c, s * c, c, c);
                if (blk.isZero(0.0)) continue;
                blk = (u * blk * u.adjoint()).eval();
            }
    }
    return DensityOperator::trusted(std::move(sigma), Layout({da, db, dc}));
}

bool markov_membership(const DensityOperator& rho, double tol) {
    return markov_membership(rho, Partition::standard(rho.layout()), tol);
}

bool markov_membership(const DensityOperator& rho, const Partition& part, double tol) {
    return cmi(rho, part) <= tol;
}

DensityOperator werner_state(const WernerParameter& p) {
    p.validate();
    const double d = static_cast<double>(p.d);
    const double sym_weight = (1.0 + p.f) / 2.0;
    const double anti_weight = (1.0 - p.f) / 2.0;
    const Operator f = swap_operator(p.d);
    const Operator id = identity(p.d * p.d);
    const Operator w = sym_weight * 0.5 * (id + f) / (d * (d + 1) / 2) +
                       anti_weight * 0.5 * (id - f) / (d * (d - 1) / 2);
    return DensityOperator::trusted(w, Layout({p.d, p.d}));
}

TwirlResult uu_twirl(const DensityOperator& sigma) {
    const auto& layout = sigma.layout();
    if (layout.size() != 2 || layout.dim(0) != layout.dim(1))
        throw Error("twirl needs a bipartite state with equal local dimensions");
    const std::size_t d = layout.dim(0);
    const double dd = static_cast<double>(d);
    const Operator f = swap_operator(d);
    const Operator id = identity(d * d);
    const double tr = sigma.trace();
    const double flip = (f * sigma.op()).trace().real();
    const double anti = 0.5 * (tr - flip);
    const double sym = tr - anti;
    const Operator t = sym * 0.5 * (id + f) / (dd * (dd + 1) / 2) + anti * 0.5 * (id - f) / (dd * (dd - 1) / 2);
    const double fval = std::clamp(flip / tr, -1.0, 1.0);
    return TwirlResult{WernerParameter{d, fval}, DensityOperator::trusted(t, layout), anti};
}

DensityOperator random_density(const Layout& layout, std::size_t rank, std::uint64_t seed) {
    if (rank < 1 || rank > layout.total()) throw Error("rank must lie in [1, total dimension]");
    SplitMix64 rng(seed);
    const Operator g = gaussian_matrix(layout.total(), rank, rng);
    Operator rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityOperator::trusted(0.5 * (rho + rho.adjoint()), layout);
}

Operator random_unitary(std::size_t d, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return random_isometry(d, d, rng);
}

PureStateVector random_pure_state(const Layout& layout, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Vector v = gaussian_matrix(layout.total(), 1, rng).col(0);
    v.normalize();
    return PureStateVector(v, layout);
}

PureStateVector purify(const DensityOperator& rho) {
    if (!rho.is_normalized()) throw Error("purification needs a normalized state");
    const Spectrum s = spectral_decompose(rho.op());
    const std::size_t r = std::max<std::size_t>(s.rank(), 1);
    const std::size_t n = rho.dim();
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(n * r));
    for (std::size_t i = 0; i < r; ++i) {
        const double w = std::sqrt(std::max(s.eigenvalues(static_cast<Eigen::Index>(i)), 0.0));
        for (std::size_t x = 0; x < n; ++x)
            psi(static_cast<Eigen::Index>(x * r + i)) = w * s.eigenvectors(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(i));
    }
    psi.normalize();
    auto dims = rho.layout().dims();
    dims.push_back(r);
    return PureStateVector(psi, Layout(dims));
}

Channel random_cptp(std::size_t din, std::size_t dout, std::size_t kraus_count, std::uint64_t seed, double scale) {
    if (kraus_count < 1) throw Error("channel needs at least one Kraus operator");
    if (din < 1 || dout < 1) throw Error("channel dimensions must be positive");
    if (!(scale > 0.0 && scale <= 1.0)) throw Error("trace scaling must lie in (0, 1]");
    if (dout * kraus_count < din) throw Error("dout * kraus_count must be >= din for an isometric dilation");
    SplitMix64 rng(seed);
    const Operator v = random_isometry(dout * kraus_count, din, rng);
    Channel ch{din, dout, {}};
    for (std::size_t j = 0; j < kraus_count; ++j)
        ch.kraus.push_back(std::sqrt(scale) * v.middleRows(static_cast<Eigen::Index>(j * dout), static_cast<Eigen::Index>(dout)));
    return ch;
}

DensityOperator ghz_state(std::size_t parties) {
    const Layout layout(std::vector<std::size_t>(parties, 2));
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total()));
    v(0) = v(v.size() - 1) = 1.0 / std::sqrt(2.0);
    return DensityOperator::trusted(projector(v), layout);
}

DensityOperator bell_state() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return DensityOperator::trusted(projector(v), Layout({2, 2}));
}

}  // namespace markovgap
