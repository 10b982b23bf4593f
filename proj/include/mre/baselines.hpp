#pragma once

#include "mre/inverse.hpp"

namespace mre {

/// Per-node local inversion output. Lame estimates are in SI pascals
/// (the nodal model never touches the modulus unit system).
struct NodalField {
    Eigen::VectorXd lambda_plus_mu;
    Eigen::VectorXd mu;
    std::vector<std::uint8_t> valid;
};

/// Local algebraic inversion of the nodal harmonic model: second
/// displacement derivatives are estimated by a weighted quadratic fit over
/// the 2-ring node neighborhood, then the 2x2 system
///   [q_y,yx  q_x,yy; q_x,xy  q_y,xx] [lambda+mu; mu] = -rho w^2 [q_x; q_y]
/// is solved per node by truncated-SVD least squares. Nodes with A ~ 0,
/// fewer than 6 stencil samples, boundary position, or a nonpositive mu
/// estimate are flagged invalid.
NodalField nodal_direct_inversion(const TriMesh& mesh, const DisplacementField& u_m,
                                  const MaterialParams& params,
                                  double cond_threshold = 1e8);

enum class BaselineRegularizer { Tv, WeightedSmoothness };

const char* to_string(BaselineRegularizer reg);

/// Graph Laplacian of the adjacency weights (for the ws regularizer).
SparseMat adjacency_laplacian(const AdjacencyGraph& graph);

/// Deterministic regularized least squares:
///   min 0.5||b - D(u_m) E||^2 + lambda * R(E)  s.t. E >= eps,
/// i.e. the MAP solver with the covariance pinned to identity and no
/// log-det. R is graph TV or ||L E||^2. Shares the proximal-gradient
/// machinery with the proposed solver so the two are directly comparable.
ReconstructionResult deterministic_reconstruct(const TriMesh& mesh,
                                               const DisplacementField& u_m,
                                               const Eigen::VectorXd& f,
                                               const MaterialParams& params,
                                               BaselineRegularizer reg,
                                               double lambda_reg,
                                               const SolverConfig& config);

}  // namespace mre
