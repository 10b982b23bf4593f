#include "mre/baselines.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <set>

namespace mre {

namespace {

std::vector<std::set<int>> node_neighbors(const TriMesh& mesh) {
    std::vector<std::set<int>> nbr(static_cast<std::size_t>(mesh.node_count()));
    for (const auto& t : mesh.elements) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[static_cast<std::size_t>(k)];
            const int b = t[static_cast<std::size_t>((k + 1) % 3)];
            nbr[static_cast<std::size_t>(a)].insert(b);
            nbr[static_cast<std::size_t>(b)].insert(a);
        }
    }
    return nbr;
}

// Weighted quadratic fit around node c; returns the 6 polynomial
// coefficients (1, dx, dy, dx^2, dx dy, dy^2) for one scalar field sampled
// at `stencil`, or false if the fit is underdetermined.
bool fit_quadratic(const TriMesh& mesh, int c, const std::vector<int>& stencil,
                   const Eigen::VectorXd& samples, Eigen::Matrix<double, 6, 1>& coeffs) {
    const int m = static_cast<int>(stencil.size());
    if (m < 6) return false;
    const Eigen::Vector2d pc = mesh.nodes[static_cast<std::size_t>(c)];

    double h = 0.0;
    for (int i : stencil) {
        const Eigen::Vector2d d = mesh.nodes[static_cast<std::size_t>(i)] - pc;
        h = std::max({h, std::abs(d.x()), std::abs(d.y())});
    }
    if (h <= 0.0) return false;

    Eigen::MatrixXd a(m, 6);
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) {
        const Eigen::Vector2d d =
            mesh.nodes[static_cast<std::size_t>(stencil[static_cast<std::size_t>(r)])] - pc;
        const double w = std::exp(-d.squaredNorm() / (h * h));
        a.row(r) << w, w * d.x(), w * d.y(), w * d.x() * d.x(), w * d.x() * d.y(),
            w * d.y() * d.y();
        rhs[r] = w * samples[stencil[static_cast<std::size_t>(r)]];
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 6) return false;
    coeffs = qr.solve(rhs);
    return true;
}

}  // namespace

NodalField nodal_direct_inversion(const TriMesh& mesh, const DisplacementField& u_m,
                                  const MaterialParams& params, double cond_threshold) {
    if (u_m.size() != mesh.dof_count())
        throw std::invalid_argument("nodal inversion: measurement length != 2N");
    params.validate();

    const int n = mesh.node_count();
    NodalField out;
    out.lambda_plus_mu = Eigen::VectorXd::Zero(n);
    out.mu = Eigen::VectorXd::Zero(n);
    out.valid.assign(static_cast<std::size_t>(n), 0);

    Eigen::VectorXd ux(n), uy(n);
    for (int i = 0; i < n; ++i) {
        ux[i] = u_m[2 * i];
        uy[i] = u_m[2 * i + 1];
    }

    const auto nbr = node_neighbors(mesh);
    const double rho_w2 = params.rho * params.omega * params.omega;  // SI

    for (int c = 0; c < n; ++c) {
        if (mesh.boundary_tags[static_cast<std::size_t>(c)] != BoundaryTag::Interior)
            continue;

        // 2-ring stencil
        std::set<int> ring(nbr[static_cast<std::size_t>(c)]);
        for (int i : nbr[static_cast<std::size_t>(c)])
            ring.insert(nbr[static_cast<std::size_t>(i)].begin(),
                        nbr[static_cast<std::size_t>(i)].end());
        ring.insert(c);
        const std::vector<int> stencil(ring.begin(), ring.end());

        Eigen::Matrix<double, 6, 1> cx, cy;
        if (!fit_quadratic(mesh, c, stencil, ux, cx)) continue;
        if (!fit_quadratic(mesh, c, stencil, uy, cy)) continue;

        const double qx_xy = cx[4];
        const double qx_yy = 2.0 * cx[5];
        const double qy_xx = 2.0 * cy[3];
        const double qy_xy = cy[4];

        Eigen::Matrix2d a;
        a << qy_xy, qx_yy,
             qx_xy, qy_xx;
        const Eigen::Vector2d rhs(-rho_w2 * ux[c], -rho_w2 * uy[c]);

        const Eigen::JacobiSVD<Eigen::Matrix2d> svd(
            a, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::Vector2d sv = svd.singularValues();
        if (!(sv[0] > 0.0)) continue;  // zero operator: unreliable node

        // truncated pseudo-inverse: drop directions beyond the condition cap
        Eigen::Vector2d inv_sv = Eigen::Vector2d::Zero();
        inv_sv[0] = 1.0 / sv[0];
        if (sv[1] * cond_threshold > sv[0]) inv_sv[1] = 1.0 / sv[1];
        const Eigen::Vector2d theta =
            svd.matrixV() * (inv_sv.asDiagonal() * (svd.matrixU().transpose() * rhs));

        if (!std::isfinite(theta[0]) || !std::isfinite(theta[1])) continue;
        if (!(theta[1] > 0.0)) continue;

        out.lambda_plus_mu[c] = theta[0];
        out.mu[c] = theta[1];
        out.valid[static_cast<std::size_t>(c)] = 1;
    }
    return out;
}

const char* to_string(BaselineRegularizer reg) {
    return reg == BaselineRegularizer::Tv ? "tv" : "ws";
}

SparseMat adjacency_laplacian(const AdjacencyGraph& graph) {
    const int p = graph.element_count;
    std::vector<Eigen::Triplet<double>> tri;
    tri.reserve(4 * graph.edges.size());
    for (const auto& e : graph.edges) {
        tri.emplace_back(e.a, e.a, e.weight);
        tri.emplace_back(e.b, e.b, e.weight);
        tri.emplace_back(e.a, e.b, -e.weight);
        tri.emplace_back(e.b, e.a, -e.weight);
    }
    SparseMat l(p, p);
    l.setFromTriplets(tri.begin(), tri.end());
    return l;
}

ReconstructionResult deterministic_reconstruct(const TriMesh& mesh,
                                               const DisplacementField& u_m,
                                               const Eigen::VectorXd& f,
                                               const MaterialParams& params,
                                               BaselineRegularizer reg,
                                               double lambda_reg,
                                               const SolverConfig& config) {
    const int ndof = mesh.dof_count();
    auto identity_builder = [ndof](const ElasticityField&) {
        return GammaCovariance::identity(ndof);
    };

    if (reg == BaselineRegularizer::Tv)
        return run_fixed_point(mesh, u_m, f, params, config, identity_builder, nullptr,
                               lambda_reg);

    SmoothRegularizer smooth;
    smooth.laplacian = adjacency_laplacian(element_adjacency(mesh));
    smooth.weight = lambda_reg;
    return run_fixed_point(mesh, u_m, f, params, config, identity_builder, &smooth,
                           0.0);
}

}  // namespace mre
