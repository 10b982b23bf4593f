#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "mre/fem.hpp"

namespace mre {

/// Deterministic normal sampler (Marsaglia polar on mt19937_64) so noise
/// realizations are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform();  // [0, 1)
    double normal();   // standard normal

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Gaussian measurement-noise description. If delta >= 0 the displacement
/// stds are calibrated as delta*||u||/sqrt(2N) per axis; explicit
/// sigma_lateral/axial (>= 0) take precedence. sigma_w < 0 selects the
/// default 1e-3*||f||_inf at corruption time.
struct NoiseModel {
    double delta = 0.0;
    double sigma_lateral = -1.0;
    double sigma_axial = -1.0;
    double sigma_w = -1.0;
    bool force_noise_loaded_only = false;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ForwardSolveError : std::runtime_error {
    explicit ForwardSolveError(const std::string& msg, double cond = -1.0)
        : std::runtime_error(msg), condition_estimate(cond) {}
    double condition_estimate;
};

/// Unit-amplitude axial loads on every top-boundary node.
Eigen::VectorXd standard_excitation(const TriMesh& mesh);

/// Both displacement components fixed to zero on every bottom-boundary node.
DirichletBC standard_anchors(const TriMesh& mesh);

/// Solve A(E) u = f with A = K + sign*Mw after Dirichlet reduction.
/// Verifies the free-dof residual to 1e-10 relative and reports a
/// condition estimate on failure.
DisplacementField solve_forward(const TriMesh& mesh, const ElasticityField& field,
                                const MaterialParams& params,
                                const Eigen::VectorXd& force, const DirichletBC& bc,
                                SignConvention sign = SignConvention::Standard);

/// Same solve given a preassembled system.
DisplacementField solve_forward(const GlobalSystem& sys, const Eigen::VectorXd& force,
                                const DirichletBC& bc, SignConvention sign);

struct CorruptedField {
    Eigen::VectorXd values;
    double sigma_lateral = 0.0;
    double sigma_axial = 0.0;
    double realized_delta = 0.0;  // ||u_m - u|| / ||u_m||
};

/// u_m = u + n with per-axis i.i.d. Gaussian noise; deterministic per seed.
CorruptedField corrupt_displacements(const DisplacementField& u, const NoiseModel& noise);

struct CorruptedForce {
    Eigen::VectorXd values;
    double sigma_w = 0.0;
};

/// f_m = f + w; optionally restricted to the loaded (nonzero) entries.
CorruptedForce corrupt_forces(const Eigen::VectorXd& f, const NoiseModel& noise);

/// SNR_dB = -20 log10(delta) and its inverse.
double delta_to_snr(double delta);
double snr_to_delta(double snr_db);

}  // namespace mre
