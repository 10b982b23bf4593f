#include "mre/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mre {

GammaCovariance GammaCovariance::build(const SparseMat& op, double sigma_n_lateral,
                                       double sigma_n_axial, double sigma_w) {
    const int n = static_cast<int>(op.rows());
    if (op.cols() != n) throw std::invalid_argument("gamma: operator not square");
    if (sigma_n_lateral < 0.0 || sigma_n_axial < 0.0 || sigma_w < 0.0)
        throw std::invalid_argument("gamma: negative noise std");

    GammaCovariance g;
    SparseMat id(n, n);
    id.setIdentity();

    if (sigma_n_lateral == 0.0 && sigma_n_axial == 0.0) {
        g.matrix_ = (sigma_w * sigma_w) * id;
    } else {
        Eigen::VectorXd var(n);
        for (int i = 0; i < n; ++i) {
            const double s = (i % 2 == 0) ? sigma_n_lateral : sigma_n_axial;
            var[i] = s * s;
        }
        const SparseMat scaled = op * var.asDiagonal();
        g.matrix_ = (sigma_w * sigma_w) * id + SparseMat(scaled * op.transpose());
    }

    g.factorization_ = std::make_shared<Eigen::SimplicialLDLT<SparseMat>>();
    g.factorization_->compute(g.matrix_);
    bool ok = g.factorization_->info() == Eigen::Success;
    double min_pivot = std::numeric_limits<double>::infinity();
    if (ok) {
        const auto& dvec = g.factorization_->vectorD();
        min_pivot = dvec.minCoeff();
        ok = min_pivot > 0.0;
    }
    if (!ok) {
        std::ostringstream os;
        os << "gamma: covariance not positive definite (smallest pivot " << min_pivot
           << "); Sigma_w must be PD";
        throw std::runtime_error(os.str());
    }
    g.log_det_ = g.factorization_->vectorD().array().log().sum();
    return g;
}

GammaCovariance GammaCovariance::identity(int n) {
    GammaCovariance g;
    g.matrix_.resize(n, n);
    g.matrix_.setIdentity();
    g.identity_ = true;
    g.log_det_ = 0.0;
    return g;
}

Eigen::VectorXd GammaCovariance::solve(const Eigen::VectorXd& r) const {
    if (r.size() != matrix_.rows())
        throw std::invalid_argument("gamma: solve dimension mismatch");
    if (identity_) return r;
    return factorization_->solve(r);
}

GammaCovariance build_gamma(const TriMesh& mesh, const ElasticityField& field,
                            const MaterialParams& params, SignConvention sign,
                            bool use_full_operator, double sigma_w,
                            double sigma_n_lateral, double sigma_n_axial) {
    if ((field.array() <= 0.0).any())
        throw std::invalid_argument("build_gamma: E must be strictly positive");
    const GlobalSystem sys = assemble_system(mesh, field, params);
    const SparseMat op = use_full_operator ? sys.full_operator(sign) : sys.stiffness;
    return GammaCovariance::build(op, sigma_n_lateral, sigma_n_axial, sigma_w);
}

void SolverConfig::validate() const {
    if (!(lambda_reg >= 0.0)) throw std::invalid_argument("solver: lambda_reg < 0");
    if (!(inner_tol > 0.0 && outer_tol > 0.0))
        throw std::invalid_argument("solver: tolerances must be > 0");
    if (max_inner < 1 || max_outer < 1)
        throw std::invalid_argument("solver: iteration caps must be >= 1");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
        throw std::invalid_argument("solver: backtrack factor must be in (0,1)");
    if (!(e_floor > 0.0)) throw std::invalid_argument("solver: e_floor must be > 0");
    if (!(e_init > 0.0)) throw std::invalid_argument("solver: e_init must be > 0");
    if (tv_inner_iters < 1) throw std::invalid_argument("solver: tv_inner_iters < 1");
    if (power_iters < 1) throw std::invalid_argument("solver: power_iters < 1");
}

double tv_seminorm(const AdjacencyGraph& graph, const ElasticityField& field) {
    double tv = 0.0;
    for (const auto& e : graph.edges) tv += e.weight * std::abs(field[e.a] - field[e.b]);
    return tv;
}

TvProx::TvProx(const AdjacencyGraph& graph) : n_(graph.element_count) {
    ei_.reserve(graph.edges.size());
    ej_.reserve(graph.edges.size());
    w_.reserve(graph.edges.size());
    std::vector<double> wsq(static_cast<std::size_t>(n_), 0.0);
    for (const auto& e : graph.edges) {
        ei_.push_back(e.a);
        ej_.push_back(e.b);
        w_.push_back(e.weight);
        wsq[static_cast<std::size_t>(e.a)] += e.weight * e.weight;
        wsq[static_cast<std::size_t>(e.b)] += e.weight * e.weight;
    }
    const double lip = wsq.empty() ? 1.0
                                   : 2.0 * *std::max_element(wsq.begin(), wsq.end());
    dual_step_ = lip > 0.0 ? 1.0 / lip : 1.0;
}

Eigen::VectorXd TvProx::apply(const Eigen::VectorXd& x, double tau, int max_iters,
                              double gap_tol) const {
    if (x.size() != n_) throw std::invalid_argument("tv_prox: size mismatch");
    if (tau < 0.0) throw std::invalid_argument("tv_prox: tau must be >= 0");
    if (tau == 0.0 || ei_.empty()) return x;

    const std::size_t m = ei_.size();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    Eigen::VectorXd z = x;

    auto rebuild_primal = [&]() {
        z = x;
        for (std::size_t e = 0; e < m; ++e) {
            const double we = w_[e] * p[static_cast<Eigen::Index>(e)];
            z[ei_[e]] -= we;
            z[ej_[e]] += we;
        }
    };

    for (int it = 0; it < max_iters; ++it) {
        rebuild_primal();
        for (std::size_t e = 0; e < m; ++e) {
            const double g = w_[e] * (z[ei_[e]] - z[ej_[e]]);
            p[static_cast<Eigen::Index>(e)] =
                std::clamp(p[static_cast<Eigen::Index>(e)] + dual_step_ * g, -tau, tau);
        }
        if ((it + 1) % 5 == 0 || it + 1 == max_iters) {
            rebuild_primal();
            double primal = 0.5 * (z - x).squaredNorm();
            double dual = -0.5 * (z - x).squaredNorm();
            for (std::size_t e = 0; e < m; ++e) {
                const double diff = z[ei_[e]] - z[ej_[e]];
                primal += tau * w_[e] * std::abs(diff);
                dual += p[static_cast<Eigen::Index>(e)] * w_[e] *
                        (x[ei_[e]] - x[ej_[e]]);
            }
            // dual(p) = p^T G x - 0.5||G^T p||^2, with G^T p = x - z
            const double gap = primal - dual;
            if (gap <= gap_tol * (1.0 + std::abs(primal))) break;
        }
    }
    rebuild_primal();
    return z;
}

Eigen::VectorXd tv_prox(const Eigen::VectorXd& x, double tau,
                        const AdjacencyGraph& graph, int iters, double gap_tol) {
    return TvProx(graph).apply(x, tau, iters, gap_tol);
}

Eigen::VectorXd nonneg_prox(const Eigen::VectorXd& x, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("nonneg_prox: eps must be > 0");
    return x.cwiseMax(eps);
}

double fidelity_g(const ElasticityField& field, const GammaCovariance& gamma,
                  const Eigen::VectorXd& b, const SparseMat& d) {
    const Eigen::VectorXd r = b - d * field;
    return 0.5 * r.dot(gamma.solve(r));
}

Eigen::VectorXd grad_g(const ElasticityField& field, const GammaCovariance& gamma,
                       const Eigen::VectorXd& b, const SparseMat& d) {
    const Eigen::VectorXd r = b - d * field;
    return -(d.transpose() * gamma.solve(r));
}

double objective(const ElasticityField& field, const GammaCovariance& gamma,
                 const Eigen::VectorXd& b, const SparseMat& d, double lambda_reg,
                 const AdjacencyGraph& graph, int n_nodes) {
    const double value = fidelity_g(field, gamma, b, d) +
                         0.5 * n_nodes * gamma.log_det() +
                         lambda_reg * tv_seminorm(graph, field);
    if (!std::isfinite(value))
        throw std::runtime_error("objective: non-finite value");
    return value;
}

namespace {

struct SmoothEval {
    double value;
    Eigen::VectorXd grad;
};

// Differentiable part: fidelity plus the optional quadratic regularizer.
SmoothEval eval_smooth(const ElasticityField& field, const GammaCovariance& gamma,
                       const Eigen::VectorXd& b, const SparseMat& d,
                       const SmoothRegularizer* reg) {
    SmoothEval out;
    const Eigen::VectorXd r = b - d * field;
    const Eigen::VectorXd s = gamma.solve(r);
    out.value = 0.5 * r.dot(s);
    out.grad = -(d.transpose() * s);
    if (reg != nullptr && reg->weight > 0.0) {
        const Eigen::VectorXd le = reg->laplacian * field;
        out.value += reg->weight * le.squaredNorm();
        out.grad += 2.0 * reg->weight * (reg->laplacian.transpose() * le);
    }
    return out;
}

double eval_smooth_value(const ElasticityField& field, const GammaCovariance& gamma,
                         const Eigen::VectorXd& b, const SparseMat& d,
                         const SmoothRegularizer* reg) {
    const Eigen::VectorXd r = b - d * field;
    double v = 0.5 * r.dot(gamma.solve(r));
    if (reg != nullptr && reg->weight > 0.0)
        v += reg->weight * (reg->laplacian * field).squaredNorm();
    return v;
}

double estimate_lipschitz(const GammaCovariance& gamma, const SparseMat& d,
                          const SmoothRegularizer* reg, int iters) {
    const Eigen::Index p = d.cols();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(p) / std::sqrt(static_cast<double>(p));
    double lam = 1.0;
    for (int i = 0; i < iters; ++i) {
        Eigen::VectorXd w = d.transpose() * gamma.solve(d * v);
        if (reg != nullptr && reg->weight > 0.0)
            w += 2.0 * reg->weight * (reg->laplacian.transpose() * (reg->laplacian * v));
        const double n = w.norm();
        if (n == 0.0) return 1.0;
        lam = v.dot(w);
        v = w / n;
    }
    return std::max(lam, std::numeric_limits<double>::min());
}

}  // namespace

InnerResult pg_inner_solve(const ElasticityField& e0, const GammaCovariance& gamma,
                           const Eigen::VectorXd& b, const SparseMat& d,
                           const AdjacencyGraph& graph, const SolverConfig& config,
                           const SmoothRegularizer* smooth_reg) {
    config.validate();
    const TvProx prox(graph);
    const double lambda = config.lambda_reg;

    const double gamma0 = config.gamma0 > 0.0
                              ? config.gamma0
                              : 1.0 / estimate_lipschitz(gamma, d, smooth_reg,
                                                         config.power_iters);

    InnerResult res;
    res.e = nonneg_prox(e0, config.e_floor);
    if (config.record_iterates) res.iterates.push_back(res.e);

    ElasticityField e_prev;
    Eigen::VectorXd grad_prev;
    double step = gamma0;

    for (int it = 0; it < config.max_inner; ++it) {
        const SmoothEval sm = eval_smooth(res.e, gamma, b, d, smooth_reg);
        const double f_cur = sm.value + lambda * tv_seminorm(graph, res.e);
        res.surrogate_trace.push_back(f_cur);

        // already optimal: exact interpolation with no regularizer
        if (lambda == 0.0 && smooth_reg == nullptr && sm.grad.norm() == 0.0) {
            res.iters = it + 1;
            res.converged = true;
            break;
        }

        if (config.bb_steps && e_prev.size() == res.e.size()) {
            const Eigen::VectorXd s = res.e - e_prev;
            const Eigen::VectorXd y = sm.grad - grad_prev;
            const double sy = s.dot(y);
            step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-4 * gamma0,
                                         1e8 * gamma0)
                            : gamma0;
        }

        ElasticityField cand;
        double sm_cand = 0.0;
        while (true) {
            cand = nonneg_prox(prox.apply(res.e - step * sm.grad, step * lambda,
                                          config.tv_inner_iters, config.tv_gap_tol),
                               config.e_floor);
            sm_cand = eval_smooth_value(cand, gamma, b, d, smooth_reg);
            const Eigen::VectorXd diff = cand - res.e;
            const double quad = sm.value + sm.grad.dot(diff) +
                                diff.squaredNorm() / (2.0 * step);
            const double f_cand = sm_cand + lambda * tv_seminorm(graph, cand);
            const bool sufficient =
                sm_cand <= quad + 1e-12 * (1.0 + std::abs(sm.value));
            const bool monotone = f_cand <= f_cur + 1e-9 * (1.0 + std::abs(f_cur));
            if (sufficient && monotone) break;
            step *= config.backtrack_factor;
            if (step < 1e-14) {
                std::ostringstream os;
                os << "pg_inner_solve: step size underflow (" << step
                   << ") at inner iteration " << it;
                throw std::runtime_error(os.str());
            }
        }

        const double rel = (cand - res.e).norm() /
                           std::max(res.e.norm(), std::numeric_limits<double>::min());
        e_prev = res.e;
        grad_prev = sm.grad;
        res.e = cand;
        res.iters = it + 1;
        if (config.record_iterates) res.iterates.push_back(res.e);
        if (rel < config.inner_tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

Eigen::VectorXd effective_force(const Eigen::VectorXd& f, const SparseMat& mass,
                                const DisplacementField& u_m, SignConvention sign) {
    return f - sign_value(sign) * (mass * u_m);
}

ReconstructionResult run_fixed_point(
    const TriMesh& mesh, const DisplacementField& u_m, const Eigen::VectorXd& f,
    const MaterialParams& params, const SolverConfig& config,
    const std::function<GammaCovariance(const ElasticityField&)>& gamma_builder,
    const SmoothRegularizer* smooth_reg, double tv_weight) {
    config.validate();
    if (u_m.size() != mesh.dof_count())
        throw std::invalid_argument("solver: measurement length != 2N");
    if (f.size() != mesh.dof_count())
        throw std::invalid_argument("solver: force length != 2N");

    const AdjacencyGraph graph = element_adjacency(mesh);
    const SparseMat d = assemble_D(mesh, u_m, params.nu);
    const ElasticityField ones = ElasticityField::Ones(mesh.element_count());
    const SparseMat mass = assemble_system(mesh, ones, params).mass;
    const Eigen::VectorXd b = effective_force(f, mass, u_m, config.sign);

    SolverConfig inner_cfg = config;
    inner_cfg.lambda_reg = tv_weight;

    ReconstructionResult result;
    result.e_hat = ElasticityField::Constant(mesh.element_count(), config.e_init);

    for (int outer = 0; outer < config.max_outer; ++outer) {
        const GammaCovariance gamma = gamma_builder(result.e_hat);
        InnerResult inner =
            pg_inner_solve(result.e_hat, gamma, b, d, graph, inner_cfg, smooth_reg);

        const double rel =
            (inner.e - result.e_hat).norm() /
            std::max(result.e_hat.norm(), std::numeric_limits<double>::min());

        result.e_hat = inner.e;
        result.outer_iters = outer + 1;
        result.total_inner_iters += inner.iters;
        double obj = objective(result.e_hat, gamma, b, d, tv_weight, graph,
                               mesh.node_count());
        if (smooth_reg != nullptr && smooth_reg->weight > 0.0)
            obj += smooth_reg->weight * (smooth_reg->laplacian * result.e_hat).squaredNorm();
        result.objective_trace.push_back(obj);
        result.inner_surrogate_traces.push_back(std::move(inner.surrogate_trace));
        if (config.record_iterates)
            for (auto& e : inner.iterates) result.iterates.push_back(std::move(e));

        if (rel < config.outer_tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

ReconstructionResult fixed_point_solve(const TriMesh& mesh, const DisplacementField& u_m,
                                       const Eigen::VectorXd& f,
                                       const MaterialParams& params,
                                       double sigma_n_lateral, double sigma_n_axial,
                                       double sigma_w, const SolverConfig& config) {
    auto builder = [&](const ElasticityField& e) {
        return build_gamma(mesh, e, params, config.sign, config.gamma_full_operator,
                           sigma_w, sigma_n_lateral, sigma_n_axial);
    };
    ReconstructionResult res = run_fixed_point(mesh, u_m, f, params, config, builder,
                                               nullptr, config.lambda_reg);
    res.sigma_n_lateral = sigma_n_lateral;
    res.sigma_n_axial = sigma_n_axial;
    res.sigma_w = sigma_w;
    return res;
}

}  // namespace mre
