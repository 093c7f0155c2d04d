#include "markovgap/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace markovgap {

Layout::Layout(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw Error("layout must have at least one factor");
    total_ = 1;
    for (auto d : dims_) {
        if (d < 1) throw Error("layout dimensions must be >= 1");
        total_ *= d;
    }
}

Layout Layout::subset(const IndexSet& keep) const {
    std::vector<std::size_t> out;
    for (auto i : keep) out.push_back(dims_.at(i));
    if (out.empty()) out.push_back(1);
    return Layout(out);
}

Layout Layout::permuted(const Permutation& perm) const {
    if (!is_permutation(perm, dims_.size())) throw Error("invalid permutation");
    std::vector<std::size_t> out(dims_.size());
    for (std::size_t j = 0; j < perm.size(); ++j) out[j] = dims_[perm[j]];
    return Layout(out);
}

std::vector<std::size_t> Layout::strides() const {
    std::vector<std::size_t> s(dims_.size(), 1);
    for (std::size_t i = dims_.size(); i-- > 1;) s[i - 1] = s[i] * dims_[i];
    return s;
}

Operator tensor(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Vector tensor(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Operator tensor_all(const std::vector<Operator>& factors) {
    if (factors.empty()) return Operator::Identity(1, 1);
    Operator out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
    return out;
}

namespace {

void check_layout(const Operator& op, const Layout& layout) {
    if (op.rows() != op.cols()) throw Error("operator must be square");
    if (static_cast<std::size_t>(op.rows()) != layout.total())
        throw Error("layout does not match operator dimension");
}

// old_index[n] for every flattened index n of the permuted layout.
std::vector<std::size_t> permuted_index_map(const Layout& layout, const Permutation& perm) {
    if (!is_permutation(perm, layout.size())) throw Error("invalid permutation");
    const auto old_strides = layout.strides();
    const Layout target = layout.permuted(perm);
    const auto& new_dims = target.dims();
    const std::size_t k = new_dims.size();
    std::vector<std::size_t> map(layout.total());
    std::vector<std::size_t> digits(k, 0);
    std::size_t old_index = 0;
    for (std::size_t n = 0; n < map.size(); ++n) {
        map[n] = old_index;
        // odometer increment over the new layout's digits
        for (std::size_t j = k; j-- > 0;) {
            if (++digits[j] < new_dims[j]) {
                old_index += old_strides[perm[j]];
                break;
            }
            old_index -= (new_dims[j] - 1) * old_strides[perm[j]];
            digits[j] = 0;
        }
    }
    return map;
}

}  // namespace

Operator partial_trace(const Operator& op, const Layout& layout, IndexSet keep) {
    check_layout(op, layout);
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
        throw Error("duplicate subsystem index in partial trace");
    for (auto i : keep)
        if (i >= layout.size()) throw Error("subsystem index out of range");

    Permutation perm = keep;
    for (std::size_t i = 0; i < layout.size(); ++i)
        if (!std::binary_search(keep.begin(), keep.end(), i)) perm.push_back(i);

    std::size_t kept_dim = 1;
    for (auto i : keep) kept_dim *= layout.dim(i);
    const std::size_t traced_dim = layout.total() / kept_dim;

    const auto map = permuted_index_map(layout, perm);
    Operator out = Operator::Zero(kept_dim, kept_dim);
    for (std::size_t i = 0; i < kept_dim; ++i)
        for (std::size_t j = 0; j < kept_dim; ++j) {
            Complex acc = 0;
            for (std::size_t t = 0; t < traced_dim; ++t)
                acc += op(map[i * traced_dim + t], map[j * traced_dim + t]);
            out(i, j) = acc;
        }
    return out;
}

Operator permute_subsystems(const Operator& op, const Layout& layout, const Permutation& perm) {
    check_layout(op, layout);
    const auto map = permuted_index_map(layout, perm);
    const std::size_t n = map.size();
    Operator out(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) out(i, j) = op(map[i], map[j]);
    return out;
}

Vector permute_subsystems(const Vector& v, const Layout& layout, const Permutation& perm) {
    if (static_cast<std::size_t>(v.size()) != layout.total())
        throw Error("layout does not match vector dimension");
    const auto map = permuted_index_map(layout, perm);
    Vector out(v.size());
    for (std::size_t i = 0; i < map.size(); ++i) out(i) = v(map[i]);
    return out;
}

Operator permutation_operator(const Layout& layout, const Permutation& perm) {
    for (auto d : layout.dims())
        if (d != layout.dim(0)) throw Error("permutation operator needs equal local dimensions");
    // Position j of the output holds the old factor inverse(perm)[j].
    const auto map = permuted_index_map(layout, inverse(perm));
    const std::size_t n = map.size();
    Operator out = Operator::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, map[i]) = 1.0;
    return out;
}

Operator lift(const Operator& local, const Layout& layout, std::size_t index) {
    if (index >= layout.size()) throw Error("subsystem index out of range");
    if (static_cast<std::size_t>(local.cols()) != layout.dim(index))
        throw Error("local operator does not match subsystem dimension");
    std::size_t left = 1, right = 1;
    for (std::size_t i = 0; i < index; ++i) left *= layout.dim(i);
    for (std::size_t i = index + 1; i < layout.size(); ++i) right *= layout.dim(i);
    return tensor(identity(left), tensor(local, identity(right)));
}

std::size_t Spectrum::rank(double tol) const {
    const double thr = support_threshold(tol);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        if (eigenvalues(i) > thr) ++r;
    return r;
}

double Spectrum::support_threshold(double tol) const {
    return tol * std::max(max_eigenvalue(), 0.0);
}

double max_abs(const Operator& m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

double hermiticity_defect(const Operator& m) {
    if (m.rows() != m.cols()) throw Error("operator must be square");
    return max_abs(m - m.adjoint());
}

bool is_hermitian(const Operator& m, double tol) {
    return hermiticity_defect(m) <= tol * std::max(1.0, max_abs(m));
}

namespace {

void require_hermitian(const Operator& h) {
    if (h.rows() != h.cols()) throw Error("operator must be square");
    if (!h.allFinite()) throw Error("operator has non-finite entries");
    if (!is_hermitian(h)) throw Error("operator is not Hermitian");
}

bool is_real(const Operator& h) {
    return h.size() == 0 || h.imag().cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

Spectrum spectral_decompose(const Operator& h) {
    require_hermitian(h);
    const Eigen::Index n = h.rows();
    Spectrum s;
    s.eigenvalues.resize(n);
    s.eigenvectors.resize(n, n);
    const Operator sym = 0.5 * (h + h.adjoint());
    if (is_real(sym)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym.real());
        for (Eigen::Index i = 0; i < n; ++i) {
            s.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
            s.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i).cast<Complex>();
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
        for (Eigen::Index i = 0; i < n; ++i) {
            s.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
            s.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
        }
    }
    return s;
}

RealVector eigenvalues(const Operator& h) {
    require_hermitian(h);
    const Operator sym = 0.5 * (h + h.adjoint());
    RealVector ev;
    if (is_real(sym)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym.real(), Eigen::EigenvaluesOnly);
        ev = solver.eigenvalues();
    } else {
        Eigen::SelfAdjointEigenSolver<Operator> solver(sym, Eigen::EigenvaluesOnly);
        ev = solver.eigenvalues();
    }
    return ev.reverse();
}

Operator apply_spectral_function(const Spectrum& s, const std::function<double(double)>& f,
                                 ZeroPolicy policy, double tol) {
    const double thr = s.support_threshold(tol);
    const Eigen::Index n = static_cast<Eigen::Index>(s.dim());
    RealVector fv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lambda = s.eigenvalues(i);
        if (policy != ZeroPolicy::apply && lambda <= thr) {
            if (policy == ZeroPolicy::error)
                throw Error("spectral function requires full support");
            fv(i) = 0.0;
            continue;
        }
        fv(i) = f(lambda);
        if (!std::isfinite(fv(i))) throw Error("spectral function undefined on spectrum");
    }
    return s.eigenvectors * fv.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
}

Operator apply_spectral_function(const Operator& h, const std::function<double(double)>& f,
                                 ZeroPolicy policy, double tol) {
    return apply_spectral_function(spectral_decompose(h), f, policy, tol);
}

Operator support_projector(const Spectrum& s, double tol) {
    const std::size_t r = s.rank(tol);
    const auto v = s.eigenvectors.leftCols(static_cast<Eigen::Index>(r));
    return v * v.adjoint();
}

Operator support_projector(const Operator& h, double tol) {
    return support_projector(spectral_decompose(h), tol);
}

double trace_norm(const Operator& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<Operator> svd(m);
    return svd.singularValues().sum();
}

Operator identity(std::size_t dim) {
    return Operator::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Operator projector(const Vector& v) { return v * v.adjoint(); }

bool is_permutation(const Permutation& perm, std::size_t n) {
    if (perm.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (auto p : perm) {
        if (p >= n || seen[p]) return false;
        seen[p] = true;
    }
    return true;
}

Permutation compose(const Permutation& pi, const Permutation& tau) {
    if (pi.size() != tau.size()) throw Error("permutation sizes differ");
    Permutation out(pi.size());
    for (std::size_t j = 0; j < tau.size(); ++j) out[j] = pi.at(tau[j]);
    return out;
}

Permutation inverse(const Permutation& perm) {
    if (!is_permutation(perm, perm.size())) throw Error("invalid permutation");
    Permutation out(perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) out[perm[j]] = j;
    return out;
}

void check_dim_cap(std::size_t dim, std::size_t cap) {
    if (dim > cap)
        throw Error("dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
}

}  // namespace markovgap
