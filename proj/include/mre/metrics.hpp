#pragma once

#include "mre/mesh.hpp"

namespace mre {

/// Element index sets for the two phantom regions, derived from the same
/// centroid-in-disk rule as assign_phantom.
struct RegionMasks {
    std::vector<int> inclusion;
    std::vector<int> background;
};

RegionMasks region_masks(const TriMesh& mesh, const PhantomSpec& spec);

/// Relative L2 error: ||e_hat - e_true|| / ||e_true||.
double rms_error(const ElasticityField& e_hat, const ElasticityField& e_true);

/// Pooled-variance contrast-to-noise ratio:
/// |mean_incl - mean_bg| / sqrt((var_incl + var_bg)/2). Returns +infinity
/// when the pooled variance is zero.
double cnr(const ElasticityField& e_hat, const RegionMasks& masks);

}  // namespace mre
