#include "mre/fem.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace mre {

const char* to_string(SignConvention s) {
    return s == SignConvention::Standard ? "standard" : "paper";
}

SignConvention sign_convention_from_string(const std::string& s) {
    if (s == "standard") return SignConvention::Standard;
    if (s == "paper") return SignConvention::Paper;
    throw std::invalid_argument("unknown sign convention: " + s);
}

MaterialParams MaterialParams::from_frequency_hz(double nu, double rho, double f_hz,
                                                 double unit_pa) {
    MaterialParams p;
    p.nu = nu;
    p.rho = rho;
    p.frequency_hz = f_hz;
    p.omega = 2.0 * M_PI * f_hz;
    p.modulus_unit_pa = unit_pa;
    p.validate();
    return p;
}

void MaterialParams::validate() const {
    if (!(nu >= 0.0 && nu < 0.5))
        throw std::invalid_argument("material: nu must be in [0, 0.5)");
    if (!(rho > 0.0)) throw std::invalid_argument("material: rho must be > 0");
    if (!(omega > 0.0)) throw std::invalid_argument("material: omega must be > 0");
    if (!(modulus_unit_pa > 0.0))
        throw std::invalid_argument("material: modulus unit must be > 0");
}

namespace {

struct ElementGeometry {
    double area;
    // P1 gradient coefficients: dphi_m/dx = b[m], dphi_m/dy = c[m]
    std::array<double, 3> b;
    std::array<double, 3> c;
};

ElementGeometry element_geometry(const TriMesh& mesh, int elem) {
    const auto& t = mesh.elements.at(static_cast<std::size_t>(elem));
    const Eigen::Vector2d& p0 = mesh.nodes[static_cast<std::size_t>(t[0])];
    const Eigen::Vector2d& p1 = mesh.nodes[static_cast<std::size_t>(t[1])];
    const Eigen::Vector2d& p2 = mesh.nodes[static_cast<std::size_t>(t[2])];
    const double two_area = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                            (p2.x() - p0.x()) * (p1.y() - p0.y());
    if (!(two_area > 0.0)) {
        std::ostringstream os;
        os << "fem: degenerate element " << elem << " (signed area " << 0.5 * two_area
           << ")";
        throw std::invalid_argument(os.str());
    }
    ElementGeometry g;
    g.area = 0.5 * two_area;
    g.b = {(p1.y() - p2.y()) / two_area, (p2.y() - p0.y()) / two_area,
           (p0.y() - p1.y()) / two_area};
    g.c = {(p2.x() - p1.x()) / two_area, (p0.x() - p2.x()) / two_area,
           (p1.x() - p0.x()) / two_area};
    return g;
}

}  // namespace

Eigen::Matrix<double, 3, 6> strain_displacement(const TriMesh& mesh, int elem) {
    const ElementGeometry g = element_geometry(mesh, elem);
    Eigen::Matrix<double, 3, 6> bmat = Eigen::Matrix<double, 3, 6>::Zero();
    for (int m = 0; m < 3; ++m) {
        bmat(0, 2 * m) = g.b[static_cast<std::size_t>(m)];
        bmat(1, 2 * m + 1) = g.c[static_cast<std::size_t>(m)];
        bmat(2, 2 * m) = g.c[static_cast<std::size_t>(m)];
        bmat(2, 2 * m + 1) = g.b[static_cast<std::size_t>(m)];
    }
    return bmat;
}

Eigen::Matrix<double, 6, 6> element_stiffness_basis(const TriMesh& mesh, int elem,
                                                    double nu) {
    const ElementGeometry g = element_geometry(mesh, elem);
    const Eigen::Matrix<double, 3, 6> bmat = strain_displacement(mesh, elem);
    const Eigen::Matrix3d c = material_matrix(nu);
    return g.area * bmat.transpose() * c * bmat;
}

Eigen::Matrix<double, 6, 6> element_mass(const TriMesh& mesh, int elem,
                                         const MaterialParams& params) {
    params.validate();
    const ElementGeometry g = element_geometry(mesh, elem);
    const double s = params.mass_coefficient() * g.area / 12.0;
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const double v = s * (a == b ? 2.0 : 1.0);
            m(2 * a, 2 * b) = v;
            m(2 * a + 1, 2 * b + 1) = v;
        }
    }
    return m;
}

GlobalSystem assemble_system(const TriMesh& mesh, const ElasticityField& field,
                             const MaterialParams& params) {
    if (field.size() != mesh.element_count())
        throw std::invalid_argument("assemble: field length != element count");
    params.validate();

    const int ndof = mesh.dof_count();
    std::vector<Eigen::Triplet<double>> kt;
    std::vector<Eigen::Triplet<double>> mt;
    kt.reserve(static_cast<std::size_t>(36 * mesh.element_count()));
    mt.reserve(static_cast<std::size_t>(36 * mesh.element_count()));

    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto psi = element_stiffness_basis(mesh, e, params.nu);
        const auto mass = element_mass(mesh, e, params);
        const auto& t = mesh.elements[static_cast<std::size_t>(e)];
        std::array<int, 6> dofs{2 * t[0], 2 * t[0] + 1, 2 * t[1],
                                2 * t[1] + 1, 2 * t[2], 2 * t[2] + 1};
        for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
                kt.emplace_back(dofs[static_cast<std::size_t>(a)],
                                dofs[static_cast<std::size_t>(b)],
                                field[e] * psi(a, b));
                mt.emplace_back(dofs[static_cast<std::size_t>(a)],
                                dofs[static_cast<std::size_t>(b)], mass(a, b));
            }
        }
    }

    GlobalSystem sys;
    sys.n_nodes = mesh.node_count();
    sys.stiffness.resize(ndof, ndof);
    sys.stiffness.setFromTriplets(kt.begin(), kt.end());
    sys.mass.resize(ndof, ndof);
    sys.mass.setFromTriplets(mt.begin(), mt.end());
    return sys;
}

SparseMat assemble_D(const TriMesh& mesh, const DisplacementField& u, double nu) {
    if (u.size() != mesh.dof_count())
        throw std::invalid_argument("assemble_D: displacement length != 2N");

    std::vector<Eigen::Triplet<double>> dt;
    dt.reserve(static_cast<std::size_t>(6 * mesh.element_count()));
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto psi = element_stiffness_basis(mesh, e, nu);
        const auto& t = mesh.elements[static_cast<std::size_t>(e)];
        std::array<int, 6> dofs{2 * t[0], 2 * t[0] + 1, 2 * t[1],
                                2 * t[1] + 1, 2 * t[2], 2 * t[2] + 1};
        Eigen::Matrix<double, 6, 1> ue;
        for (int a = 0; a < 6; ++a) ue[a] = u[dofs[static_cast<std::size_t>(a)]];
        const Eigen::Matrix<double, 6, 1> col = psi * ue;
        for (int a = 0; a < 6; ++a)
            dt.emplace_back(dofs[static_cast<std::size_t>(a)], e, col[a]);
    }

    SparseMat d(mesh.dof_count(), mesh.element_count());
    d.setFromTriplets(dt.begin(), dt.end());
    return d;
}

Eigen::VectorXd ReducedSystem::expand(const Eigen::VectorXd& u_free) const {
    if (u_free.size() != static_cast<Eigen::Index>(free_dofs.size()))
        throw std::invalid_argument("expand: wrong reduced-vector length");
    Eigen::VectorXd full = prescribed;
    for (std::size_t i = 0; i < free_dofs.size(); ++i)
        full[free_dofs[i]] = u_free[static_cast<Eigen::Index>(i)];
    return full;
}

ReducedSystem apply_dirichlet(const SparseMat& matrix, const Eigen::VectorXd& rhs,
                              const DirichletBC& bc) {
    const int n = static_cast<int>(matrix.rows());
    if (matrix.cols() != n) throw std::invalid_argument("apply_dirichlet: matrix not square");
    if (rhs.size() != n) throw std::invalid_argument("apply_dirichlet: rhs length mismatch");
    if (bc.values.size() != static_cast<Eigen::Index>(bc.dofs.size()))
        throw std::invalid_argument("apply_dirichlet: dof/value length mismatch");

    std::vector<char> constrained(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd prescribed = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < bc.dofs.size(); ++i) {
        const int d = bc.dofs[i];
        if (d < 0 || d >= n) {
            std::ostringstream os;
            os << "apply_dirichlet: unknown dof index " << d;
            throw std::invalid_argument(os.str());
        }
        constrained[static_cast<std::size_t>(d)] = 1;
        prescribed[d] = bc.values[static_cast<Eigen::Index>(i)];
    }

    ReducedSystem red;
    red.prescribed = prescribed;
    std::vector<int> full_to_free(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (!constrained[static_cast<std::size_t>(i)]) {
            full_to_free[static_cast<std::size_t>(i)] =
                static_cast<int>(red.free_dofs.size());
            red.free_dofs.push_back(i);
        }
    }
    if (red.free_dofs.empty())
        throw std::invalid_argument("apply_dirichlet: all dofs constrained");

    const int nf = static_cast<int>(red.free_dofs.size());
    red.rhs.resize(nf);
    for (int i = 0; i < nf; ++i) red.rhs[i] = rhs[red.free_dofs[static_cast<std::size_t>(i)]];

    std::vector<Eigen::Triplet<double>> tri;
    tri.reserve(static_cast<std::size_t>(matrix.nonZeros()));
    for (int col = 0; col < n; ++col) {
        for (SparseMat::InnerIterator it(matrix, col); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int fr = full_to_free[static_cast<std::size_t>(r)];
            const int fc = full_to_free[static_cast<std::size_t>(col)];
            if (fr >= 0 && fc >= 0) {
                tri.emplace_back(fr, fc, it.value());
            } else if (fr >= 0 && fc < 0) {
                red.rhs[fr] -= it.value() * prescribed[col];
            }
        }
    }
    red.matrix.resize(nf, nf);
    red.matrix.setFromTriplets(tri.begin(), tri.end());
    return red;
}

void write_matrix_market(const SparseMat& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
    out.precision(17);
    for (int col = 0; col < m.outerSize(); ++col)
        for (SparseMat::InnerIterator it(m, col); it; ++it)
            out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

}  // namespace mre
