#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "markovgap/tensor.hpp"

namespace markovgap {

// Positive operator with 0 < Tr <= 1 on a tensor-product layout.
class DensityOperator {
  public:
    // Validates Hermiticity, positivity (min eigenvalue >= -1e-10) and trace.
    DensityOperator(Operator op, Layout layout);
    explicit DensityOperator(Operator op);

    // Skips the spectral checks; only for operators positive by construction.
    static DensityOperator trusted(Operator op, Layout layout);

    const Operator& op() const { return op_; }
    const Layout& layout() const { return layout_; }
    std::size_t dim() const { return static_cast<std::size_t>(op_.rows()); }
    double trace() const { return op_.trace().real(); }
    bool is_normalized(double tol = 1e-10) const;

    DensityOperator marginal(const IndexSet& keep) const;
    DensityOperator with_layout(Layout layout) const;

  private:
    DensityOperator(Operator op, Layout layout, bool validate);

    Operator op_;
    Layout layout_;
};

// A | B | C split of a layout's factors.
struct Partition {
    IndexSet a, b, c;

    // A = {0}, B = {1}, C = {2, ..., n-1}.
    static Partition standard(const Layout& layout);
    void validate(const Layout& layout) const;
};

struct PureStateVector {
    Vector amplitudes;
    Layout layout;

    PureStateVector(Vector amplitudes, Layout layout);
    DensityOperator density() const;
};

// Werner family on C^d (x) C^d, indexed by the flip expectation f = Tr(F W).
struct WernerParameter {
    std::size_t d = 2;
    double f = 0.0;

    void validate() const;
};

// One summand p * sigma_{A C^L} (x) sigma_{C^R B} of a Markov decomposition.
struct MarkovBlock {
    double p = 1.0;
    std::size_t dim_cl = 1;
    std::size_t dim_cr = 1;
    DensityOperator left;   // on A (x) C^L
    DensityOperator right;  // on C^R (x) B
};

struct MarkovSpec {
    std::size_t dim_a = 1;
    std::size_t dim_b = 1;
    std::vector<MarkovBlock> blocks;
    // Optional unitary on C applied after the block embedding; identity if absent.
    std::optional<Operator> basis_c;

    std::size_t dim_c() const;
    void validate() const;
};

struct AntisymProjector {
    Operator projector;
    bool empty_subspace = false;  // k > d: the antisymmetric subspace is {0}
};

struct TwirlResult {
    WernerParameter parameter;
    DensityOperator state;
    double antisymmetric_weight = 0.0;  // Tr(P_anti sigma)
};

// Kraus representation of a completely positive map C^din -> C^dout.
struct Channel {
    std::size_t din = 0;
    std::size_t dout = 0;
    std::vector<Operator> kraus;

    Operator apply(const Operator& op) const;
    // Acts on factor `index` of the layout; the output layout has that factor
    // resized to dout.
    DensityOperator apply_on(const DensityOperator& rho, std::size_t index) const;
    Operator completeness() const;  // sum_j K_j^dagger K_j
};

AntisymProjector antisym_projector(std::size_t d, std::size_t k, std::size_t dim_cap = kDefaultDimCap);
Operator swap_operator(std::size_t d);
Operator symmetric_projector(std::size_t d);

DensityOperator antisym_state(std::size_t d, std::size_t dim_cap = kDefaultDimCap);
// P_k / C(d, k) on k factors of dimension d.
DensityOperator uniform_antisym_state(std::size_t d, std::size_t k, std::size_t dim_cap = kDefaultDimCap);

// Output ordering A, B, C with C-block offsets in list order.
DensityOperator build_markov_state(const MarkovSpec& spec);
bool markov_membership(const DensityOperator& rho, double tol);
bool markov_membership(const DensityOperator& rho, const Partition& part, double tol);

DensityOperator werner_state(const WernerParameter& p);
TwirlResult uu_twirl(const DensityOperator& sigma);

// G G^dagger / Tr with G a seeded dim x rank complex Gaussian matrix, filled
// row by row, real part before imaginary part.
DensityOperator random_density(const Layout& layout, std::size_t rank, std::uint64_t seed);
Operator random_unitary(std::size_t d, std::uint64_t seed);
PureStateVector random_pure_state(const Layout& layout, std::uint64_t seed);

// Reference factor (dimension rank rho) appended as the last factor.
PureStateVector purify(const DensityOperator& rho);

// Kraus operators are row blocks of a seeded Haar-like isometry. With
// scale < 1 every Kraus operator is multiplied by sqrt(scale), so that
// sum K^dagger K = scale * I (trace non-increasing).
Channel random_cptp(std::size_t din, std::size_t dout, std::size_t kraus_count, std::uint64_t seed,
                    double scale = 1.0);

DensityOperator ghz_state(std::size_t parties = 3);
DensityOperator bell_state();

}  // namespace markovgap
