#pragma once

#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>
#include <vector>

#include "mre/fem.hpp"
#include "mre/forward.hpp"

namespace mre {

/// Signal-dependent noise covariance G = Sigma_w + A(E) Sigma_n A(E)^T with a
/// cached symmetric factorization for solves and the log-determinant.
class GammaCovariance {
public:
    /// G = sigma_w^2 I + A diag(sigma_n per dof)^2 A^T. Throws on a
    /// non-positive-definite result, reporting the smallest pivot.
    static GammaCovariance build(const SparseMat& op, double sigma_n_lateral,
                                 double sigma_n_axial, double sigma_w);

    /// Exact identity covariance (solve is a copy, log|G| = 0).
    static GammaCovariance identity(int n);

    Eigen::VectorXd solve(const Eigen::VectorXd& r) const;
    double log_det() const { return log_det_; }
    const SparseMat& matrix() const { return matrix_; }
    bool is_identity() const { return identity_; }
    int size() const { return static_cast<int>(matrix_.rows()); }

private:
    SparseMat matrix_;
    std::shared_ptr<Eigen::SimplicialLDLT<SparseMat>> factorization_;
    double log_det_ = 0.0;
    bool identity_ = false;
};

/// Assemble G from the current modulus iterate. use_full_operator selects
/// K + sign*Mw (default) versus the stiffness alone.
GammaCovariance build_gamma(const TriMesh& mesh, const ElasticityField& field,
                            const MaterialParams& params, SignConvention sign,
                            bool use_full_operator, double sigma_w,
                            double sigma_n_lateral, double sigma_n_axial);

struct SolverConfig {
    double lambda_reg = 1e3;     // TV weight in the MAP objective
    double gamma0 = 0.0;         // initial step; 0 -> 1/L from power iteration
    double backtrack_factor = 0.5;
    bool bb_steps = true;        // Barzilai-Borwein initialization of gamma_n
    double inner_tol = 1e-8;     // relative-change stop, inner loop
    double outer_tol = 1e-6;     // relative-change stop, outer loop
    int max_inner = 1500;
    int max_outer = 30;
    int tv_inner_iters = 50;     // dual projections per TV prox
    double tv_gap_tol = 1e-8;
    double e_init = 0.2;
    double e_floor = 1e-4;       // projection onto E >= e_floor
    SignConvention sign = SignConvention::Standard;
    bool gamma_full_operator = true;
    int power_iters = 20;
    bool record_iterates = false;

    void validate() const;
};

struct ReconstructionResult {
    ElasticityField e_hat;
    std::vector<double> objective_trace;  // full MAP objective per outer iteration
    std::vector<std::vector<double>> inner_surrogate_traces;  // fidelity + TV
    int outer_iters = 0;
    long total_inner_iters = 0;
    bool converged = false;
    double sigma_n_lateral = 0.0;
    double sigma_n_axial = 0.0;
    double sigma_w = 0.0;
    std::vector<ElasticityField> iterates;  // populated when record_iterates
};

/// Anisotropic graph total variation: sum over adjacent element pairs of
/// weight * |E_i - E_j|.
double tv_seminorm(const AdjacencyGraph& graph, const ElasticityField& field);

/// Reusable dual-projection solver for prox_{tau TV}.
class TvProx {
public:
    explicit TvProx(const AdjacencyGraph& graph);

    /// Approximate argmin_z 0.5||z - x||^2 + tau * TV(z) by projected
    /// gradient on the dual, stopping at max_iters or the duality-gap
    /// tolerance.
    Eigen::VectorXd apply(const Eigen::VectorXd& x, double tau, int max_iters,
                          double gap_tol) const;

private:
    std::vector<int> ei_, ej_;
    std::vector<double> w_;
    int n_ = 0;
    double dual_step_ = 0.0;
};

/// One-shot convenience wrapper around TvProx.
Eigen::VectorXd tv_prox(const Eigen::VectorXd& x, double tau,
                        const AdjacencyGraph& graph, int iters,
                        double gap_tol = 1e-8);

/// Euclidean projection onto { z : z >= eps }.
Eigen::VectorXd nonneg_prox(const Eigen::VectorXd& x, double eps);

/// Fidelity term with the covariance frozen:
/// g(E) = 0.5 (b - D E)^T G^{-1} (b - D E).
double fidelity_g(const ElasticityField& field, const GammaCovariance& gamma,
                  const Eigen::VectorXd& b, const SparseMat& d);

/// Gradient of the frozen-covariance fidelity: -D^T G^{-1} (b - D E).
Eigen::VectorXd grad_g(const ElasticityField& field, const GammaCovariance& gamma,
                       const Eigen::VectorXd& b, const SparseMat& d);

/// Full MAP objective: g(E) + (N/2) log|G| + lambda * TV(E). n_nodes is the
/// mesh node count N.
double objective(const ElasticityField& field, const GammaCovariance& gamma,
                 const Eigen::VectorXd& b, const SparseMat& d, double lambda_reg,
                 const AdjacencyGraph& graph, int n_nodes);

/// Optional smooth quadratic regularizer weight*||L E||^2 folded into the
/// inner loop's differentiable part (used by the weighted-smoothness
/// baseline; null for the TV paths).
struct SmoothRegularizer {
    SparseMat laplacian;
    double weight = 0.0;
};

struct InnerResult {
    ElasticityField e;
    int iters = 0;
    bool converged = false;
    std::vector<double> surrogate_trace;  // g + lambda*TV at each iterate
    std::vector<ElasticityField> iterates;
};

/// Proximal-gradient inner loop with the covariance frozen:
/// E_{n+1} = prox_{>= eps}( prox_{gamma_n lambda TV}( E_n - gamma_n grad g ) ).
/// Step sizes backtrack by halving from a Barzilai-Borwein (or constant)
/// initialization until the sufficient-decrease condition holds.
InnerResult pg_inner_solve(const ElasticityField& e0, const GammaCovariance& gamma,
                           const Eigen::VectorXd& b, const SparseMat& d,
                           const AdjacencyGraph& graph, const SolverConfig& config,
                           const SmoothRegularizer* smooth_reg = nullptr);

/// Move the (E-independent) mass contribution to the data side:
/// b = f - sign * Mw u_m, so the model reads b = D(u_m) E + noise.
Eigen::VectorXd effective_force(const Eigen::VectorXd& f, const SparseMat& mass,
                                const DisplacementField& u_m, SignConvention sign);

/// Shared fixed-point driver: alternates gamma_builder(E) with the inner
/// proximal-gradient update until the outer relative change falls below
/// outer_tol. tv_weight is the TV coefficient handed to the prox chain
/// (zero for the smooth-regularizer path).
ReconstructionResult run_fixed_point(
    const TriMesh& mesh, const DisplacementField& u_m, const Eigen::VectorXd& f,
    const MaterialParams& params, const SolverConfig& config,
    const std::function<GammaCovariance(const ElasticityField&)>& gamma_builder,
    const SmoothRegularizer* smooth_reg, double tv_weight);

/// Fixed-point MAP solver: alternate G <- build_gamma(E) and the inner
/// proximal-gradient update of E until the outer relative change falls
/// below outer_tol. sigma_* describe the (known) measurement noise.
ReconstructionResult fixed_point_solve(const TriMesh& mesh, const DisplacementField& u_m,
                                       const Eigen::VectorXd& f,
                                       const MaterialParams& params,
                                       double sigma_n_lateral, double sigma_n_axial,
                                       double sigma_w, const SolverConfig& config);

}  // namespace mre
