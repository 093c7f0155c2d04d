#include "markovgap/markov_opt.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <cmath>
#include <numeric>
#include <sstream>

#include "markovgap/repro.hpp"
#include "markovgap/rng.hpp"

namespace markovgap {

std::string to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::exact: return "exact";
        case BoundKind::lower: return "lower";
        case BoundKind::upper: return "upper";
    }
    return "unknown";
}

Objective Objective::renyi_order(double alpha) {
    if (!std::isfinite(alpha) || alpha < 0.0) throw Error("Renyi order must be >= 0");
    if (alpha == 0.0) return {Kind::d0, 0.0};
    if (alpha == 1.0) return {Kind::relative_entropy, 1.0};
    return {Kind::renyi, alpha};
}

std::string Objective::name() const {
    switch (kind) {
        case Kind::d0: return "D_0";
        case Kind::relative_entropy: return "D_1";
        case Kind::d_min: return "D_min";
        case Kind::renyi: {
            std::ostringstream os;
            os << "D_alpha(alpha=" << alpha << ")";
            return os.str();
        }
    }
    return "unknown";
}

DivergenceValue evaluate_objective(const DensityOperator& rho, const DensityOperator& sigma, const Objective& obj) {
    switch (obj.kind) {
        case Objective::Kind::d0: return d0(rho, sigma);
        case Objective::Kind::relative_entropy: return relative_entropy(rho, sigma);
        case Objective::Kind::d_min: return d_min(rho, sigma);
        case Objective::Kind::renyi: return renyi_divergence(rho, sigma, obj.alpha);
    }
    throw Error("unknown objective");
}

double separable_constant() { return 0.5 * std::log(4.0 / 3.0); }

std::vector<std::vector<BlockShape>> block_structures(std::size_t dim_c, std::size_t max_blocks) {
    if (dim_c < 1) throw Error("C dimension must be positive");
    std::vector<BlockShape> shapes;
    for (std::size_t a = 1; a <= dim_c; ++a)
        for (std::size_t b = 1; a * b <= dim_c; ++b) shapes.push_back({a, b});

    std::vector<std::vector<BlockShape>> out;
    std::vector<BlockShape> current;
    // Shapes are taken in nondecreasing list order so each multiset appears once.
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t first, std::size_t remaining) {
        if (remaining == 0) {
            out.push_back(current);
            return;
        }
        if (current.size() == max_blocks) return;
        for (std::size_t s = first; s < shapes.size(); ++s) {
            const std::size_t size = shapes[s].dim_cl * shapes[s].dim_cr;
            if (size > remaining) continue;
            current.push_back(shapes[s]);
            rec(s, remaining - size);
            current.pop_back();
        }
    };
    rec(0, dim_c);
    return out;
}

OptimizationReport werner_d0_minimize(std::size_t d) {
    if (d < 2) throw Error("Werner reduction needs d >= 2");
    // Over the twirled separable set f in [0, 1] the objective -ln((1 - f) / 2)
    // is increasing in f, so the minimum sits at f = 0.
    OptimizationReport r;
    r.quantity = "werner_d0_min";
    r.value = -std::log((1.0 - 0.0) / 2.0);
    r.bound_kind = BoundKind::exact;
    r.certificate =
        "twirl-reduced problem: min_{f in [0,1]} -ln Tr(P_anti W(f)) = -ln((1-f)/2); "
        "increasing in f, attained at f=0; separable sigma has Tr(F sigma) >= 0 so the value "
        "lower-bounds the separable problem";
    r.candidate = WernerParameter{d, 0.0};
    return r;
}

OptimizationReport delta0_antisym_lower(std::size_t d, std::size_t k) {
    if (k < 2 || k > d) throw Error("antisymmetric lower bound needs 2 <= k <= d");
    const OptimizationReport twirl = werner_d0_minimize(d);
    OptimizationReport r;
    r.quantity = "delta0_lower";
    r.value = std::max(separable_constant(), twirl.value);
    r.bound_kind = BoundKind::lower;
    std::ostringstream os;
    os.precision(17);
    os << "rho = P_k/C(d,k) with d=" << d << ", k=" << k
       << "; D_0 is monotone under Tr_C so Delta_0(rho) >= inf_sigma D_0(gamma_d || sigma_AB); "
          "Markov sigma_ABC has separable AB marginal sum_i p_i sigma_A^i (x) sigma_B^i; "
          "gamma_d is U(x)U invariant so the twirl maps separable sigma_AB to W(f) with f >= 0 "
          "and Tr(P_anti sigma_AB) = (1-f)/2 <= 1/2; twirl value "
       << twirl.value << " (single-copy separable relaxation); reference constant ln sqrt(4/3) = "
       << separable_constant() << "; reported max of the two";
    r.certificate = os.str();
    r.candidate = WernerParameter{d, 0.0};
    return r;
}

namespace {

struct Grouped {
    DensityOperator rho;
    std::size_t da, db, dc;
};

std::size_t product_of(const Layout& layout, const IndexSet& set) {
    std::size_t p = 1;
    for (auto i : set) p *= layout.dim(i);
    return p;
}

// rho restricted to A u B u C and regrouped as (A, B, C).
Grouped group_abc(const DensityOperator& rho, const Partition& part) {
    const auto& layout = rho.layout();
    part.validate(layout);
    if (part.a.empty() || part.b.empty()) throw Error("A and B must be nonempty");
    IndexSet keep = part.a;
    keep.insert(keep.end(), part.b.begin(), part.b.end());
    keep.insert(keep.end(), part.c.begin(), part.c.end());
    IndexSet sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    const Operator marg = sorted.size() == layout.size() ? rho.op() : partial_trace(rho.op(), layout, sorted);
    const Layout sub = layout.subset(sorted);
    Permutation perm;
    for (auto i : keep)
        perm.push_back(static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), i) - sorted.begin()));
    const Operator g = permute_subsystems(marg, sub, perm);
    const std::size_t da = product_of(layout, part.a), db = product_of(layout, part.b), dc = product_of(layout, part.c);
    return {DensityOperator::trusted(g, Layout({da, db, dc})), da, db, dc};
}

// rho with the objective-independent spectral data computed once.
struct Target {
    DensityOperator rho;
    Objective obj;
    Spectrum spectrum;
    Operator support;
    Operator sqrt_rho;

    Target(DensityOperator r, Objective o)
        : rho(std::move(r)), obj(o), spectrum(spectral_decompose(rho.op())) {
        support = support_projector(spectrum);
        sqrt_rho = matrix_sqrt(spectrum);
    }

    double eval(const DensityOperator& sigma) const {
        switch (obj.kind) {
            case Objective::Kind::d0: return spectral::d0(support, sigma.op()).value;
            case Objective::Kind::relative_entropy:
                return spectral::relative_entropy(spectrum, spectral_decompose(sigma.op())).value;
            case Objective::Kind::renyi:
                return spectral::renyi_divergence(spectrum, spectral_decompose(sigma.op()), obj.alpha).value;
            case Objective::Kind::d_min: {
                const double f = spectral::fidelity(sqrt_rho, rho.trace(), spectral_decompose(sigma.op()));
                return f > 0.0 ? -2.0 * std::log(f) : std::numeric_limits<double>::infinity();
            }
        }
        return std::numeric_limits<double>::infinity();
    }
};

Operator factor_from_params(const double* x, std::size_t n) {
    Operator g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j, x += 2) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(x[0], x[1]);
    Operator s = g * g.adjoint();
    const double tr = s.trace().real();
    if (!(tr > 1e-300)) return identity(n) / static_cast<double>(n);
    s /= tr;
    return 0.5 * (s + s.adjoint());
}

void params_from_factor(const Operator& state, double* x) {
    // G = sqrt(state) reproduces state exactly under G G^dagger / Tr.
    const Operator g = matrix_sqrt(spectral_decompose(state));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j, x += 2) {
            x[0] = g(i, j).real();
            x[1] = g(i, j).imag();
        }
}

// Parameter vector layout: block logits, then per block the left and right
// Gaussian factors (row-major re/im pairs), then optionally a Hermitian
// generator of the C basis change (diagonal, then upper-triangle re/im).
struct Parameterization {
    std::vector<BlockShape> shapes;
    std::size_t da, db, dc;
    bool rotate;

    std::size_t left_dim(std::size_t i) const { return da * shapes[i].dim_cl; }
    std::size_t right_dim(std::size_t i) const { return shapes[i].dim_cr * db; }

    std::size_t size() const {
        std::size_t n = shapes.size();
        for (std::size_t i = 0; i < shapes.size(); ++i)
            n += 2 * left_dim(i) * left_dim(i) + 2 * right_dim(i) * right_dim(i);
        if (rotate) n += dc * dc;
        return n;
    }

    MarkovSpec decode(const std::vector<double>& x) const {
        MarkovSpec spec{da, db, {}, std::nullopt};
        const std::size_t nb = shapes.size();
        const double mx = *std::max_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nb));
        std::vector<double> p(nb);
        for (std::size_t i = 0; i < nb; ++i) p[i] = std::exp(x[i] - mx);
        const double z = std::accumulate(p.begin(), p.end(), 0.0);
        std::size_t pos = nb;
        for (std::size_t i = 0; i < nb; ++i) {
            const std::size_t m = left_dim(i), n = right_dim(i);
            Operator left = factor_from_params(&x[pos], m);
            pos += 2 * m * m;
            Operator right = factor_from_params(&x[pos], n);
            pos += 2 * n * n;
            spec.blocks.push_back(MarkovBlock{p[i] / z, shapes[i].dim_cl, shapes[i].dim_cr,
                                              DensityOperator::trusted(std::move(left), Layout({da, shapes[i].dim_cl})),
                                              DensityOperator::trusted(std::move(right), Layout({shapes[i].dim_cr, db}))});
        }
        if (rotate) {
            Operator h = Operator::Zero(static_cast<Eigen::Index>(dc), static_cast<Eigen::Index>(dc));
            for (std::size_t k = 0; k < dc; ++k) h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = x[pos++];
            for (std::size_t k = 0; k < dc; ++k)
                for (std::size_t l = k + 1; l < dc; ++l) {
                    const Complex v(x[pos], x[pos + 1]);
                    pos += 2;
                    h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = v;
                    h(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = std::conj(v);
                }
            const Spectrum s = spectral_decompose(h);
            Operator u = s.eigenvectors *
                         s.eigenvalues.unaryExpr([](double t) { return std::exp(Complex(0.0, t)); }).asDiagonal() *
                         s.eigenvectors.adjoint();
            spec.basis_c = std::move(u);
        }
        return spec;
    }

    // Block-pinched product of rho's marginals: block i takes rho restricted
    // to its C range, split into Tr_{C^R B} and Tr_{A C^L}.
    std::vector<double> warm_start(const DensityOperator& rho) const {
        std::vector<double> x(size(), 0.0);
        std::size_t pos = shapes.size();
        std::size_t offset = 0;
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            const std::size_t dcl = shapes[i].dim_cl, dcr = shapes[i].dim_cr, m = dcl * dcr;
            const std::size_t n = da * db * m;
            Operator block(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c)
                    block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        rho.op()(static_cast<Eigen::Index>((r / m) * dc + offset + r % m),
                                 static_cast<Eigen::Index>((c / m) * dc + offset + c % m));
            offset += m;
            const double p = block.trace().real();
            x[i] = std::log(std::max(p, 1e-12));
            const std::size_t ld = left_dim(i), rd = right_dim(i);
            if (p > 1e-14) {
                const Layout lay({da, db, dcl, dcr});
                const Operator ordered = permute_subsystems(Operator(block / p), lay, {0, 2, 3, 1});
                const Layout natural({da, dcl, dcr, db});
                params_from_factor(partial_trace(ordered, natural, {0, 1}), &x[pos]);
                params_from_factor(partial_trace(ordered, natural, {2, 3}), &x[pos + 2 * ld * ld]);
            } else {
                params_from_factor(identity(ld) / static_cast<double>(ld), &x[pos]);
                params_from_factor(identity(rd) / static_cast<double>(rd), &x[pos + 2 * ld * ld]);
            }
            pos += 2 * ld * ld + 2 * rd * rd;
        }
        return x;
    }

    std::vector<double> random_start(SplitMix64& rng) const {
        std::vector<double> x(size());
        const std::size_t nb = shapes.size();
        const std::size_t rot_begin = rotate ? x.size() - dc * dc : x.size();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double scale = i < nb ? 0.5 : (i >= rot_begin ? 0.5 : 1.0);
            x[i] = scale * rng.gaussian();
        }
        return x;
    }
};

struct LocalResult {
    std::vector<double> x;
    double value;
    std::size_t probes;
};

// Randomized cyclic coordinate descent with per-coordinate step adaptation.
LocalResult coordinate_descent(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                               double initial_step, std::size_t iterations, SplitMix64& rng) {
    const std::size_t n = x.size();
    std::vector<double> step(n, initial_step);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    double fx = f(x);
    std::size_t probes = 0, pos = n;
    while (probes < iterations) {
        if (pos == n) {
            if (*std::max_element(step.begin(), step.end()) < 1e-10) break;
            for (std::size_t i = n; i-- > 1;) std::swap(order[i], order[rng.below(i + 1)]);
            pos = 0;
        }
        const std::size_t j = order[pos++];
        ++probes;
        const double old = x[j];
        bool improved = false;
        for (double sign : {1.0, -1.0}) {
            x[j] = old + sign * step[j];
            const double v = f(x);
            if (v < fx) {
                fx = v;
                improved = true;
                break;
            }
        }
        if (improved) {
            step[j] = std::min(step[j] * 2.0, 4.0);
        } else {
            x[j] = old;
            step[j] *= 0.5;
        }
    }
    return {std::move(x), fx, probes};
}

std::string quantity_name(const Objective& obj) {
    switch (obj.kind) {
        case Objective::Kind::d0: return "delta0_upper";
        case Objective::Kind::relative_entropy: return "delta_upper";
        case Objective::Kind::d_min: return "delta_min_upper";
        case Objective::Kind::renyi: return "delta_alpha_upper";
    }
    return "unknown";
}

}  // namespace

OptimizationReport delta_upper(const DensityOperator& rho, const Objective& obj, const SearchConfig& cfg,
                               const Partition& part) {
    if (!rho.is_normalized()) throw Error("Delta search needs a normalized state");
    if (cfg.restarts < 1) throw Error("search needs at least one restart");
    check_dim_cap(rho.dim(), cfg.dim_cap);
    Grouped g = group_abc(rho, part);
    const Target target(g.rho, obj);

    const auto structures = block_structures(g.dc, std::max<std::size_t>(cfg.max_blocks, 1));
    const auto parameterization = [&](std::size_t s) {
        const auto& shapes = structures[s];
        const bool trivially_rotated = shapes.size() == 1 && (shapes[0].dim_cl == 1 || shapes[0].dim_cr == 1);
        return Parameterization{shapes, g.da, g.db, g.dc, cfg.rotate_c && !trivially_rotated};
    };

    // Every (structure, restart) pair is an independent task with its own stream.
    const std::size_t tasks = structures.size() * cfg.restarts;
    std::vector<LocalResult> results(tasks);
    std::mutex observer_mutex;
    const auto run_task = [&](std::size_t t) {
        const std::size_t s = t / cfg.restarts, r = t % cfg.restarts;
        const Parameterization param = parameterization(s);
        const auto objective = [&](const std::vector<double>& x) {
            const DensityOperator sigma = build_markov_state(param.decode(x));
            const double v = target.eval(sigma);
            if (cfg.observer) {
                std::lock_guard<std::mutex> lock(observer_mutex);
                cfg.observer(sigma, v);
            }
            return v;
        };
        SplitMix64 rng(derive_seed(cfg.seed, s, r));
        auto x0 = r == 0 ? param.warm_start(g.rho) : param.random_start(rng);
        results[t] = coordinate_descent(objective, std::move(x0), 0.25, cfg.iterations, rng);
    };
    const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, tasks);
    if (workers == 1) {
        for (std::size_t t = 0; t < tasks; ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t t; (t = next.fetch_add(1)) < tasks;) run_task(t);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    // Strict comparison in (structure, restart) order: ties keep the lowest index.
    std::size_t best = 0, total_probes = 0;
    for (std::size_t t = 0; t < tasks; ++t) {
        total_probes += results[t].probes;
        if (results[t].value < results[best].value) best = t;
    }
    const std::size_t best_structure = best / cfg.restarts;
    const std::vector<double>& best_x = results[best].x;

    MarkovSpec spec = parameterization(best_structure).decode(best_x);
    const DensityOperator sigma = build_markov_state(spec);

    OptimizationReport r;
    r.quantity = quantity_name(obj);
    r.value = evaluate_objective(g.rho, sigma, obj).value;
    r.bound_kind = BoundKind::upper;
    r.iterations = total_probes;
    r.restarts = cfg.restarts;
    r.seed = cfg.seed;
    std::ostringstream os;
    os << "heuristic coordinate search over " << structures.size() << " block structures x " << cfg.restarts
       << " restarts; objective " << obj.name() << " evaluated at the returned Markov candidate";
    r.certificate = os.str();
    r.candidate = std::move(spec);
    return r;
}

OptimizationReport delta_upper(const DensityOperator& rho, const Objective& obj, const SearchConfig& cfg) {
    return delta_upper(rho, obj, cfg, Partition::standard(rho.layout()));
}

OptimizationReport delta_alpha_upper(const DensityOperator& rho, double alpha, const SearchConfig& cfg) {
    return delta_upper(rho, Objective::renyi_order(alpha), cfg);
}

OptimizationReport delta_min_upper(const DensityOperator& rho, const SearchConfig& cfg) {
    return delta_upper(rho, Objective::fidelity_based(), cfg);
}

OptimizationReport delta_relent_upper(const DensityOperator& rho, const SearchConfig& cfg) {
    return delta_upper(rho, Objective::renyi_order(1.0), cfg);
}

DensityOperator candidate_state(const OptimizationReport& report) {
    const auto* spec = std::get_if<MarkovSpec>(&report.candidate);
    if (!spec) throw Error("report carries no Markov candidate");
    return build_markov_state(*spec);
}

double delta0_certified_lower(const DensityOperator& rho, const Partition& part) {
    const Grouped g = group_abc(rho, part);
    const Operator ab = partial_trace(g.rho.op(), g.rho.layout(), {0, 1});
    const Spectrum s = spectral_decompose(ab);
    const std::size_t rank = s.rank();

    // Upper bounds on max over product vectors |ab> of <ab|Q|ab>, Q = support projector.
    double bound = 1.0;
    if (g.da == g.db) {
        const Operator q = support_projector(s);
        const double sym_weight = (q * symmetric_projector(g.da)).trace().real();
        // Q inside the antisymmetric subspace: Tr(P_anti sigma) <= 1/2 for separable sigma.
        if (sym_weight <= 1e-9) bound = std::min(bound, 0.5);
    }
    double schmidt_sum = 0.0;
    for (std::size_t i = 0; i < rank; ++i) {
        const auto v = s.eigenvectors.col(static_cast<Eigen::Index>(i));
        Operator m(static_cast<Eigen::Index>(g.da), static_cast<Eigen::Index>(g.db));
        for (std::size_t a = 0; a < g.da; ++a)
            for (std::size_t b = 0; b < g.db; ++b)
                m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v(static_cast<Eigen::Index>(a * g.db + b));
        Eigen::JacobiSVD<Operator> svd(m);
        const double smax = svd.singularValues()(0);
        schmidt_sum += smax * smax;
    }
    bound = std::min(bound, schmidt_sum);
    return -std::log(bound);
}

double delta0_certified_lower(const DensityOperator& rho) {
    return delta0_certified_lower(rho, Partition::standard(rho.layout()));
}

OptimizationReport smooth_delta0_lower(const DensityOperator& rho, double epsilon, const SmoothingConfig& cfg) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error("smoothing radius must lie in [0, 1)");
    if (!rho.is_normalized()) throw Error("smoothing needs a normalized state");
    const double base = delta0_certified_lower(rho);
    const Spectrum s = spectral_decompose(rho.op());
    const Operator support = support_projector(s);
    const std::size_t rank = std::max<std::size_t>(s.rank(), 1);

    double best = base;
    std::size_t accepted = 0, best_dir = 0;
    double best_weight = 0.0, best_distance = 0.0;
    // The proposal list does not depend on epsilon, so the accepted set grows with it.
    // Spectral truncations come first: they are the only proposals that shrink the support.
    for (std::size_t r = 1; r < s.rank(); ++r) {
        const Operator v = s.eigenvectors.leftCols(static_cast<Eigen::Index>(r));
        Operator trunc = v * s.eigenvalues.head(static_cast<Eigen::Index>(r)).cast<Complex>().asDiagonal() * v.adjoint();
        trunc /= trunc.trace().real();
        const DensityOperator cut = DensityOperator::trusted(0.5 * (trunc + trunc.adjoint()), rho.layout());
        const double dist = purified_distance(rho, cut);
        if (dist > epsilon) continue;
        ++accepted;
        const double v0 = delta0_certified_lower(cut);
        if (v0 > best) {
            best = v0;
            best_dir = cfg.directions + r;
            best_weight = 1.0;
            best_distance = dist;
        }
    }
    for (std::size_t j = 0; j < cfg.directions; ++j) {
        SplitMix64 rng(derive_seed(cfg.seed, 0x5300 + j));
        const std::size_t r = 1 + j % std::min<std::size_t>(rank, 3);
        Operator gm(static_cast<Eigen::Index>(rho.dim()), static_cast<Eigen::Index>(r));
        for (Eigen::Index a = 0; a < gm.rows(); ++a)
            for (Eigen::Index b = 0; b < gm.cols(); ++b) {
                const double re = rng.gaussian();
                gm(a, b) = Complex(re, rng.gaussian());
            }
        Operator tau = support * gm * gm.adjoint() * support;
        tau /= tau.trace().real();
        tau = 0.5 * (tau + tau.adjoint());
        double t = 1.0;
        for (std::size_t m = 0; m < cfg.grid_points; ++m, t *= 0.5) {
            const DensityOperator mixed = DensityOperator::trusted((1.0 - t) * rho.op() + t * tau, rho.layout());
            const double dist = purified_distance(rho, mixed);
            if (dist > epsilon) continue;
            ++accepted;
            const double v = delta0_certified_lower(mixed);
            if (v > best) {
                best = v;
                best_dir = j;
                best_weight = t;
                best_distance = dist;
            }
        }
    }

    OptimizationReport out;
    out.quantity = "smooth_delta0_lower";
    out.value = best;
    out.bound_kind = BoundKind::lower;
    out.iterations = cfg.directions * cfg.grid_points;
    out.restarts = cfg.directions;
    out.seed = cfg.seed;
    std::ostringstream os;
    os.precision(17);
    os << "max over states in the purified-distance ball (epsilon=" << epsilon << ") of certified Delta_0 lower "
       << "bounds; base at rho " << base << "; " << accepted << " accepted proposals (random mixtures indexed first, "
       << "spectral truncations after)";
    if (best > base)
        os << "; best from proposal " << best_dir << " with weight " << best_weight << " at distance " << best_distance;
    out.certificate = os.str();
    return out;
}

std::pair<OptimizationReport, OptimizationReport> tensor_power_delta0_bounds(std::size_t d, std::size_t k,
                                                                             std::size_t n, const SearchConfig& cfg) {
    if (n < 1) throw Error("need at least one copy");
    const DensityOperator rho = uniform_antisym_state(d, k, cfg.dim_cap);

    OptimizationReport lower;
    lower.quantity = "delta0_tensor_power_lower";
    lower.value = static_cast<double>(n) * separable_constant();
    lower.bound_kind = BoundKind::lower;
    lower.seed = cfg.seed;
    lower.certificate = "n * ln sqrt(4/3): n-copy separable bound for the antisymmetric projector, trusted constant";

    OptimizationReport single = delta_upper(rho, Objective::renyi_order(0.0), cfg);
    const DensityOperator sigma = candidate_state(single);

    double total_dim = 1.0;
    for (std::size_t i = 0; i < n; ++i) total_dim *= static_cast<double>(rho.dim());
    OptimizationReport upper = single;
    upper.quantity = "delta0_tensor_power_upper";
    std::ostringstream os;
    os.precision(17);
    os << "product candidate sigma^(x)" << n << " is Markov for A^n B^n | C^n; single-copy value " << single.value;
    if (total_dim <= static_cast<double>(std::min(cfg.dim_cap, kDenseTensorPowerLimit))) {
        Operator pn = support_projector(rho.op());
        Operator sn = sigma.op();
        const Operator p1 = pn, s1 = sn;
        for (std::size_t i = 1; i < n; ++i) {
            pn = tensor(pn, p1);
            sn = tensor(sn, s1);
        }
        upper.value = spectral::d0(pn, sn).value;
        os << "; n-copy value evaluated densely";
    } else {
        upper.value = static_cast<double>(n) * single.value;
        os << "; n-copy value from D_0 additivity on product pairs";
    }
    upper.certificate = os.str();
    return {lower, upper};
}

GapRecord cmi_vs_delta_gap(std::size_t d) {
    if (d < 2) throw Error("gap record needs d >= 2");
    GapRecord g;
    g.d = d;
    g.k = antisym_block_size(d);
    g.delta_lower = separable_constant();
    g.cmi_value = d >= 3 ? cmi_antisym_formula(d) : cmi_antisym_binomial(d, g.k);
    g.separated = g.delta_lower > g.cmi_value;
    return g;
}

namespace {

// Maximizes |a + b cos t + c sin t| style objectives over t in [-pi, pi].
template <typename F>
std::pair<double, double> maximize_periodic(F&& value) {
    constexpr int grid = 32;
    constexpr double pi = 3.14159265358979323846;
    double best_t = 0.0, best_v = value(0.0);
    for (int i = 1; i < grid; ++i) {
        const double t = -pi + 2.0 * pi * i / grid;
        const double v = value(t);
        if (v > best_v) {
            best_v = v;
            best_t = t;
        }
    }
    double lo = best_t - 2.0 * pi / grid, hi = best_t + 2.0 * pi / grid;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = value(x1);
        }
    }
    const double t = 0.5 * (lo + hi);
    const double v = value(t);
    if (v > best_v) return {t, v};
    return {best_t, best_v};
}

// Sys x ref coefficient matrix of a bipartite vector.
Operator coefficient_matrix(const Vector& psi, std::size_t sys, std::size_t ref) {
    Operator m(static_cast<Eigen::Index>(sys), static_cast<Eigen::Index>(ref));
    for (std::size_t x = 0; x < sys; ++x)
        for (std::size_t i = 0; i < ref; ++i) m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(i)) = psi(static_cast<Eigen::Index>(x * ref + i));
    return m;
}

Vector canonical_purification(const DensityOperator& rho) {
    const Spectrum s = spectral_decompose(rho.op());
    const std::size_t n = rho.dim();
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(n * n));
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::sqrt(std::max(s.eigenvalues(static_cast<Eigen::Index>(i)), 0.0));
        for (std::size_t x = 0; x < n; ++x)
            psi(static_cast<Eigen::Index>(x * n + i)) = w * s.eigenvectors(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(i));
    }
    return psi;
}

}  // namespace

UhlmannResult uhlmann_search(const Vector& psi_rho, const Vector& psi_sigma, std::size_t sys_dim, std::size_t ref_dim,
                             const UhlmannConfig& cfg) {
    if (ref_dim > kUhlmannMaxDim) throw Error("reference dimension exceeds the unitary-search cap");
    if (static_cast<std::size_t>(psi_rho.size()) != sys_dim * ref_dim ||
        static_cast<std::size_t>(psi_sigma.size()) != sys_dim * ref_dim)
        throw Error("purification dimensions do not match");
    const auto r = static_cast<Eigen::Index>(ref_dim);
    // <psi_rho|(I (x) U)|psi_sigma> = Tr(U M) with M = Psi_sigma^T conj(Psi_rho).
    const Operator m = coefficient_matrix(psi_sigma, sys_dim, ref_dim).transpose() *
                       coefficient_matrix(psi_rho, sys_dim, ref_dim).conjugate();

    UhlmannResult best;
    best.overlap = -1.0;
    for (std::size_t restart = 0; restart < std::max<std::size_t>(cfg.restarts, 1); ++restart) {
        Operator u = random_unitary(ref_dim, derive_seed(cfg.seed, 0x0411, restart));
        Operator n = m * u;
        double current = std::abs(n.trace());
        std::size_t sweeps = 0;
        for (; sweeps < cfg.max_sweeps; ++sweeps) {
            const double start = current;
            const Complex tr = n.trace();
            auto apply = [&](Eigen::Index p, Eigen::Index q, const Eigen::Matrix2cd& e) {
                const Vector up = u.col(p), uq = u.col(q);
                u.col(p) = up * e(0, 0) + uq * e(1, 0);
                u.col(q) = up * e(0, 1) + uq * e(1, 1);
                const Vector np = n.col(p), nq = n.col(q);
                n.col(p) = np * e(0, 0) + nq * e(1, 0);
                n.col(q) = np * e(0, 1) + nq * e(1, 1);
            };
            (void)tr;
            for (Eigen::Index p = 0; p < r; ++p) {
                // Phase rotation exp(i t |p><p|).
                {
                    const Complex base = n.trace() - n(p, p);
                    const Complex npp = n(p, p);
                    auto value = [&](double t) { return std::abs(base + std::exp(Complex(0, t)) * npp); };
                    const auto [t, v] = maximize_periodic(value);
                    if (v > current + 1e-15) {
                        const Complex ph = std::exp(Complex(0, t));
                        u.col(p) *= ph;
                        n.col(p) *= ph;
                        current = v;
                    }
                }
                for (Eigen::Index q = p + 1; q < r; ++q) {
                    for (int kind = 0; kind < 2; ++kind) {
                        const Complex base = n.trace() - n(p, p) - n(q, q);
                        const Complex npp = n(p, p), nqq = n(q, q), npq = n(p, q), nqp = n(q, p);
                        auto block = [kind](double t) {
                            Eigen::Matrix2cd e;
                            const double c = std::cos(t), s = std::sin(t);
                            if (kind == 0) e << c, Complex(0, s), Complex(0, s), c;  // exp(i t sigma_x)
                            else e << c, s, -s, c;                                    // exp(i t sigma_y)
                            return e;
                        };
                        auto value = [&](double t) {
                            const auto e = block(t);
                            // Tr(E N) restricted to the (p, q) block.
                            return std::abs(base + e(0, 0) * npp + e(0, 1) * nqp + e(1, 0) * npq + e(1, 1) * nqq);
                        };
                        const auto [t, v] = maximize_periodic(value);
                        if (v > current + 1e-15) {
                            apply(p, q, block(t));
                            current = v;
                        }
                    }
                }
            }
            current = std::abs(n.trace());
            if (current - start < 1e-14) {
                ++sweeps;
                break;
            }
        }
        if (current > best.overlap) {
            best.overlap = current;
            best.unitary = u;
            best.sweeps = sweeps;
        }
    }
    // Fix the global phase so that the optimal overlap is real and positive.
    const Complex tr = (best.unitary * m).trace();
    if (std::abs(tr) > 0) best.unitary *= std::conj(tr) / std::abs(tr);
    best.overlap = std::abs((best.unitary * m).trace());
    return best;
}

double uhlmann_fidelity(const DensityOperator& rho, const DensityOperator& sigma, const UhlmannConfig& cfg) {
    if (rho.dim() != sigma.dim()) throw Error("states act on different spaces");
    if (!rho.is_normalized() || !sigma.is_normalized()) throw Error("Uhlmann fidelity needs normalized states");
    if (rho.dim() > kUhlmannMaxDim) throw Error("dimension exceeds the unitary-search cap");
    const std::size_t n = rho.dim();
    return uhlmann_search(canonical_purification(rho), canonical_purification(sigma), n, n, cfg).overlap;
}

DualityRecord duality_candidate_check(const PureStateVector& psi, const MarkovSpec& spec, const DualityConfig& cfg) {
    const Layout& layout = psi.layout;
    if (layout.size() != 4) throw Error("duality check needs a pure state on A, B, C, D");
    for (auto d : layout.dims())
        if (d > 3) throw Error("duality check supports local dimensions up to 3");
    const std::size_t da = layout.dim(0), db = layout.dim(1), dc = layout.dim(2), dd = layout.dim(3);
    if (spec.dim_a != da || spec.dim_b != db || spec.dim_c() != dc) throw Error("Markov spec does not match A, B, C");

    const DensityOperator rho_abcd = psi.density();
    const DensityOperator rho_abc = rho_abcd.marginal({0, 1, 2});
    const DensityOperator sigma_abc = build_markov_state(spec);

    DualityRecord rec;
    rec.fidelity_abc = fidelity(rho_abc, sigma_abc);

    // Purifying system DE for sigma_ABC; rho_ABCDE = psi_ABCD (x) |0>_E.
    const std::size_t nabc = da * db * dc;
    const std::size_t de = (nabc + dd - 1) / dd;
    const std::size_t ref = dd * de;
    Vector psi_rho = Vector::Zero(static_cast<Eigen::Index>(nabc * ref));
    for (std::size_t x = 0; x < nabc; ++x)
        for (std::size_t k = 0; k < dd; ++k)
            psi_rho(static_cast<Eigen::Index>(x * ref + k * de)) = psi.amplitudes(static_cast<Eigen::Index>(x * dd + k));
    const Spectrum s = spectral_decompose(sigma_abc.op());
    Vector psi_sigma = Vector::Zero(static_cast<Eigen::Index>(nabc * ref));
    for (std::size_t j = 0; j < nabc; ++j) {
        const double w = std::sqrt(std::max(s.eigenvalues(static_cast<Eigen::Index>(j)), 0.0));
        for (std::size_t x = 0; x < nabc; ++x)
            psi_sigma(static_cast<Eigen::Index>(x * ref + j)) = w * s.eigenvectors(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(j));
    }
    psi_sigma /= psi_sigma.norm();

    const UhlmannResult abc = uhlmann_search(psi_rho, psi_sigma, nabc, ref, cfg.uhlmann);
    rec.uhlmann_abc = abc.overlap;
    // Matched purification (I (x) U)|psi_sigma> on A, B, C, D, E.
    const Operator phi = coefficient_matrix(psi_sigma, nabc, ref) * abc.unitary.transpose();
    Vector sigma_full(static_cast<Eigen::Index>(nabc * ref));
    for (std::size_t x = 0; x < nabc; ++x)
        for (std::size_t i = 0; i < ref; ++i) sigma_full(static_cast<Eigen::Index>(x * ref + i)) = phi(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(i));
    rec.purified_overlap = std::abs(psi_rho.dot(sigma_full));

    // Regroup both global vectors as (A, B, D) (x) (C, E).
    const Layout five({da, db, dc, dd, de});
    const Permutation to_abd = {0, 1, 3, 2, 4};
    const Vector rho_abd_ce = permute_subsystems(psi_rho, five, to_abd);
    const Vector sigma_abd_ce = permute_subsystems(sigma_full, five, to_abd);
    const DensityOperator rho_abd = rho_abcd.marginal({0, 1, 3});
    const DensityOperator sigma_abd =
        DensityOperator::trusted(partial_trace(projector(sigma_full), five, {0, 1, 3}), Layout({da, db, dd}));
    rec.fidelity_abd = fidelity(rho_abd, sigma_abd);
    rec.uhlmann_abd = uhlmann_search(rho_abd_ce, sigma_abd_ce, da * db * dd, dc * de, cfg.uhlmann).overlap;

    rec.common_value = std::abs(rec.purified_overlap - rec.fidelity_abc) <= cfg.common_tol &&
                       std::abs(rec.uhlmann_abc - rec.fidelity_abc) <= cfg.common_tol;
    rec.abd_consistent = std::abs(rec.uhlmann_abd - rec.fidelity_abd) <= cfg.common_tol &&
                         rec.fidelity_abd >= rec.purified_overlap - cfg.dpi_slack;

    const Channel ch = random_cptp(db, db, cfg.channel_kraus, cfg.channel_seed);
    const double f_before = rec.fidelity_abc;
    const double f_after = fidelity(ch.apply_on(rho_abc, 1), ch.apply_on(sigma_abc, 1));
    rec.dmin_before = f_before > 0 ? -2.0 * std::log(f_before) : std::numeric_limits<double>::infinity();
    rec.dmin_after = f_after > 0 ? -2.0 * std::log(f_after) : std::numeric_limits<double>::infinity();
    rec.dpi_holds = rec.dmin_after <= rec.dmin_before + cfg.dpi_slack;
    return rec;
}

}  // namespace markovgap
