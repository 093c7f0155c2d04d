#pragma once

// Dense complex-matrix kernel: tensor products, partial traces, subsystem
// permutations and Hermitian spectral calculus.

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace markovgap {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using IndexSet = std::vector<std::size_t>;
using Permutation = std::vector<std::size_t>;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Default tolerances. Hermiticity is measured on the largest entry, the
// support threshold relative to the largest eigenvalue.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kSupportTol = 1e-10;
inline constexpr std::size_t kDefaultDimCap = 4096;

// Ordered local dimensions of a tensor-product space. Factor 0 is the
// leftmost tensor factor (slowest-varying index in row-major order).
class Layout {
  public:
    Layout() = default;
    explicit Layout(std::vector<std::size_t> dims);
    Layout(std::initializer_list<std::size_t> dims) : Layout(std::vector<std::size_t>(dims)) {}

    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t size() const { return dims_.size(); }
    std::size_t dim(std::size_t i) const { return dims_.at(i); }
    std::size_t total() const { return total_; }

    Layout subset(const IndexSet& keep) const;
    Layout permuted(const Permutation& perm) const;
    // Strides of each factor in the flattened index.
    std::vector<std::size_t> strides() const;

    bool operator==(const Layout& o) const { return dims_ == o.dims_; }
    bool operator!=(const Layout& o) const { return !(*this == o); }

  private:
    std::vector<std::size_t> dims_;
    std::size_t total_ = 0;
};

Operator tensor(const Operator& a, const Operator& b);
Vector tensor(const Vector& a, const Vector& b);
Operator tensor_all(const std::vector<Operator>& factors);

// Partial trace keeping the listed factors. The kept factors appear in
// ascending index order in the result, whatever order `keep` lists them in.
Operator partial_trace(const Operator& op, const Layout& layout, IndexSet keep);

// New factor j is old factor perm[j].
Operator permute_subsystems(const Operator& op, const Layout& layout, const Permutation& perm);
Vector permute_subsystems(const Vector& v, const Layout& layout, const Permutation& perm);

// R(pi) moves the content of factor j to position pi[j]; R(pi) R(tau) = R(pi o tau).
Operator permutation_operator(const Layout& layout, const Permutation& perm);

// Embeds `local` acting on factor `index` into the full space. `local` may be
// rectangular; the output space has dims[index] replaced by local.rows().
Operator lift(const Operator& local, const Layout& layout, std::size_t index);

// Eigenvalues sorted descending, eigenvectors as matching columns.
struct Spectrum {
    RealVector eigenvalues;
    Operator eigenvectors;

    std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
    double max_eigenvalue() const { return eigenvalues.size() ? eigenvalues(0) : 0.0; }
    double min_eigenvalue() const { return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : 0.0; }
    // Number of eigenvalues above tol * max(largest eigenvalue, 0).
    std::size_t rank(double tol = kSupportTol) const;
    double support_threshold(double tol = kSupportTol) const;
};

double max_abs(const Operator& m);
double hermiticity_defect(const Operator& m);
bool is_hermitian(const Operator& m, double tol = kHermitianTol);

Spectrum spectral_decompose(const Operator& h);
// Eigenvalues only (descending); much cheaper for entropies of large operators.
RealVector eigenvalues(const Operator& h);

enum class ZeroPolicy {
    apply,        // evaluate f on every eigenvalue
    map_to_zero,  // f := 0 on eigenvalues at or below the support threshold
    error,        // throw if any eigenvalue is at or below the support threshold
};

Operator apply_spectral_function(const Spectrum& s, const std::function<double(double)>& f,
                                 ZeroPolicy policy, double tol = kSupportTol);
Operator apply_spectral_function(const Operator& h, const std::function<double(double)>& f,
                                 ZeroPolicy policy, double tol = kSupportTol);

Operator support_projector(const Spectrum& s, double tol = kSupportTol);
Operator support_projector(const Operator& h, double tol = kSupportTol);

double trace_norm(const Operator& m);

Operator identity(std::size_t dim);
Operator projector(const Vector& v);
bool is_permutation(const Permutation& perm, std::size_t n);
Permutation compose(const Permutation& pi, const Permutation& tau);
Permutation inverse(const Permutation& perm);

void check_dim_cap(std::size_t dim, std::size_t cap);

}  // namespace markovgap
