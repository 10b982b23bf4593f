#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mre/mesh.hpp"

namespace mre {

using SparseMat = Eigen::SparseMatrix<double>;

/// 2N-vector of Fourier displacement amplitudes, interleaved
/// (lateral, axial) per node.
using DisplacementField = Eigen::VectorXd;

enum class SignConvention {
    Standard,  // A(E) = K(E) - Mw  (Galerkin weak form)
    Paper      // A(E) = K(E) + Mw  (literal local stiffness equation)
};

inline double sign_value(SignConvention s) {
    return s == SignConvention::Standard ? -1.0 : 1.0;
}

const char* to_string(SignConvention s);
SignConvention sign_convention_from_string(const std::string& s);

/// Plane-strain material constants. Moduli throughout the library are
/// expressed in units of modulus_unit_pa (default 1e5 Pa = 100 kPa); the
/// mass coefficient is scaled into the same unit system so stiffness and
/// inertia are directly comparable.
struct MaterialParams {
    double nu = 0.495;
    double rho = 1000.0;            // kg/m^3
    double frequency_hz = 90.0;
    double omega = 2.0 * M_PI * 90.0;  // rad/s, kept alongside the Hz value
    double modulus_unit_pa = 1e5;

    static MaterialParams from_frequency_hz(double nu, double rho, double f_hz,
                                            double unit_pa = 1e5);

    /// rho*omega^2 expressed in modulus units: the scalar multiplying the
    /// unit consistent-mass block.
    double mass_coefficient() const { return rho * omega * omega / modulus_unit_pa; }

    void validate() const;
};

/// Plane-strain Lame parameters (same unit as E).
template <typename Scalar>
std::pair<Scalar, Scalar> lame_from_modulus(Scalar e_modulus, Scalar nu) {
    if (!(e_modulus > Scalar(0))) throw std::invalid_argument("lame: E must be > 0");
    if (!(nu >= Scalar(0) && nu < Scalar(0.5)))
        throw std::invalid_argument("lame: nu must be in [0, 0.5)");
    const Scalar lambda = nu * e_modulus / ((Scalar(1) + nu) * (Scalar(1) - Scalar(2) * nu));
    const Scalar mu = e_modulus / (Scalar(2) * (Scalar(1) + nu));
    return {lambda, mu};
}

/// Unit stress-strain matrix: C = E * material_matrix(nu).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> material_matrix(Scalar nu) {
    const auto [lambda, mu] = lame_from_modulus(Scalar(1), nu);
    Eigen::Matrix<Scalar, 3, 3> c;
    c << lambda + 2 * mu, lambda, 0,
         lambda, lambda + 2 * mu, 0,
         0, 0, mu;
    return c;
}

/// Strain-displacement matrix of a P1 triangle: rows (exx, eyy, gxy), dofs
/// interleaved (x0, y0, x1, y1, x2, y2). Constant over the element.
Eigen::Matrix<double, 3, 6> strain_displacement(const TriMesh& mesh, int elem);

/// Stiffness per unit modulus: psi_e = area * B^T C~ B, so k_e(E) = E * psi_e.
Eigen::Matrix<double, 6, 6> element_stiffness_basis(const TriMesh& mesh, int elem,
                                                    double nu);

/// Consistent mass block scaled by the mass coefficient (lateral/axial
/// uncoupled): coeff * (area/12) * [2 1 1; 1 2 1; 1 1 2] per component.
Eigen::Matrix<double, 6, 6> element_mass(const TriMesh& mesh, int elem,
                                         const MaterialParams& params);

/// Assembled global operators. K is linear in E; the harmonic operator is
/// K + sign*M with sign from the convention flag.
struct GlobalSystem {
    SparseMat stiffness;  // K(E), 2N x 2N
    SparseMat mass;       // Mw, 2N x 2N
    int n_nodes = 0;

    SparseMat full_operator(SignConvention sign) const {
        return stiffness + sign_value(sign) * mass;
    }
};

GlobalSystem assemble_system(const TriMesh& mesh, const ElasticityField& field,
                             const MaterialParams& params);

/// The reparameterization operator: column e scatters psi_e * u_e, so that
/// assemble_D(mesh, u, nu) * E == assemble_system(mesh, E, ...).stiffness * u
/// identically. 2N x P, at most 6 nonzeros per column.
SparseMat assemble_D(const TriMesh& mesh, const DisplacementField& u, double nu);

/// Prescribed-displacement constraints (dof indices into the interleaved
/// global vector).
struct DirichletBC {
    std::vector<int> dofs;
    Eigen::VectorXd values;  // same length as dofs
};

/// Symmetric reduction of A u = f under Dirichlet constraints.
struct ReducedSystem {
    SparseMat matrix;            // free x free, still symmetric
    Eigen::VectorXd rhs;         // f_free - A_fc * u_c
    std::vector<int> free_dofs;  // free index -> original dof
    Eigen::VectorXd prescribed;  // full-size; constraint values, 0 at free dofs

    /// Re-express a free-dof solution in the original ordering.
    Eigen::VectorXd expand(const Eigen::VectorXd& u_free) const;
};

ReducedSystem apply_dirichlet(const SparseMat& matrix, const Eigen::VectorXd& rhs,
                              const DirichletBC& bc);

void write_matrix_market(const SparseMat& m, const std::string& path);

}  // namespace mre
