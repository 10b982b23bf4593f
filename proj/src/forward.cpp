#include "mre/forward.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>

namespace mre {

double Rng::uniform() {
    // 53-bit mantissa in [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

void NoiseModel::validate() const {
    if (delta < 0.0 || delta > 1.0)
        throw std::invalid_argument("noise: delta must be in [0, 1]");
}

Eigen::VectorXd standard_excitation(const TriMesh& mesh) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.dof_count());
    for (int i : mesh.nodes_with_tag(BoundaryTag::Top)) f[2 * i + 1] = 1.0;
    return f;
}

DirichletBC standard_anchors(const TriMesh& mesh) {
    DirichletBC bc;
    for (int i : mesh.nodes_with_tag(BoundaryTag::Bottom)) {
        bc.dofs.push_back(2 * i);
        bc.dofs.push_back(2 * i + 1);
    }
    bc.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bc.dofs.size()));
    return bc;
}

namespace {

// Rough 2-norm condition estimate via power iteration on A and on A^{-1}
// through an existing factorization.
double estimate_condition(const SparseMat& a,
                          const Eigen::SparseLU<SparseMat>& lu) {
    const int n = static_cast<int>(a.rows());
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
    double norm_a = 0.0;
    for (int i = 0; i < 20; ++i) {
        v = (a * v).eval();
        norm_a = v.norm();
        if (norm_a == 0.0) return std::numeric_limits<double>::infinity();
        v /= norm_a;
    }
    Eigen::VectorXd w = Eigen::VectorXd::Ones(n).normalized();
    double norm_inv = 0.0;
    for (int i = 0; i < 20; ++i) {
        w = lu.solve(w).eval();
        norm_inv = w.norm();
        if (!std::isfinite(norm_inv) || norm_inv == 0.0)
            return std::numeric_limits<double>::infinity();
        w /= norm_inv;
    }
    return norm_a * norm_inv;
}

}  // namespace

DisplacementField solve_forward(const GlobalSystem& sys, const Eigen::VectorXd& force,
                                const DirichletBC& bc, SignConvention sign) {
    if (bc.dofs.empty())
        throw std::invalid_argument("solve_forward: constrained dof set is empty");
    const SparseMat a = sys.full_operator(sign);
    ReducedSystem red = apply_dirichlet(a, force, bc);

    Eigen::SparseLU<SparseMat> lu;
    lu.compute(red.matrix);
    if (lu.info() != Eigen::Success)
        throw ForwardSolveError("solve_forward: factorization failed (singular reduced system)");

    const Eigen::VectorXd u_free = lu.solve(red.rhs);
    const DisplacementField u = red.expand(u_free);

    // residual check at free dofs
    const Eigen::VectorXd full_res = a * u - force;
    double res = 0.0;
    for (int d : red.free_dofs) res += full_res[d] * full_res[d];
    res = std::sqrt(res);
    const double scale = std::max(red.rhs.norm(), 1e-300);
    if (!(res / scale < 1e-10) && !(res < 1e-300)) {
        const double cond = estimate_condition(red.matrix, lu);
        std::ostringstream os;
        os << "solve_forward: residual " << res / scale
           << " exceeds 1e-10 (condition estimate " << cond << ")";
        throw ForwardSolveError(os.str(), cond);
    }
    return u;
}

DisplacementField solve_forward(const TriMesh& mesh, const ElasticityField& field,
                                const MaterialParams& params,
                                const Eigen::VectorXd& force, const DirichletBC& bc,
                                SignConvention sign) {
    return solve_forward(assemble_system(mesh, field, params), force, bc, sign);
}

CorruptedField corrupt_displacements(const DisplacementField& u, const NoiseModel& noise) {
    noise.validate();
    const Eigen::Index n2 = u.size();
    CorruptedField out;
    if (noise.sigma_lateral >= 0.0 || noise.sigma_axial >= 0.0) {
        out.sigma_lateral = std::max(noise.sigma_lateral, 0.0);
        out.sigma_axial = std::max(noise.sigma_axial, 0.0);
    } else {
        const double s = noise.delta * u.norm() / std::sqrt(static_cast<double>(n2));
        out.sigma_lateral = s;
        out.sigma_axial = s;
    }

    out.values = u;
    Rng rng(noise.seed);
    for (Eigen::Index i = 0; i < n2; ++i) {
        const double sigma = (i % 2 == 0) ? out.sigma_lateral : out.sigma_axial;
        if (sigma > 0.0) out.values[i] += sigma * rng.normal();
    }
    const double denom = out.values.norm();
    out.realized_delta = denom > 0.0 ? (out.values - u).norm() / denom : 0.0;
    return out;
}

CorruptedForce corrupt_forces(const Eigen::VectorXd& f, const NoiseModel& noise) {
    noise.validate();
    CorruptedForce out;
    out.sigma_w = noise.sigma_w >= 0.0
                      ? noise.sigma_w
                      : 1e-3 * f.cwiseAbs().maxCoeff();
    out.values = f;
    // distinct stream from displacement noise under the same seed
    Rng rng(noise.seed ^ 0x9e3779b97f4a7c15ULL);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        if (noise.force_noise_loaded_only && f[i] == 0.0) continue;
        if (out.sigma_w > 0.0) out.values[i] += out.sigma_w * rng.normal();
    }
    return out;
}

double delta_to_snr(double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("delta_to_snr: delta must be in (0, 1]");
    return -20.0 * std::log10(delta);
}

double snr_to_delta(double snr_db) { return std::pow(10.0, -snr_db / 20.0); }

}  // namespace mre
