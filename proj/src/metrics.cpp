#include "mre/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mre {

RegionMasks region_masks(const TriMesh& mesh, const PhantomSpec& spec) {
    spec.validate();
    RegionMasks masks;
    const double r2 = spec.inclusion_radius * spec.inclusion_radius;
    for (int e = 0; e < mesh.element_count(); ++e) {
        const double d2 = (mesh.element_centroid(e) - spec.inclusion_center).squaredNorm();
        if (spec.inclusion_radius > 0.0 && d2 < r2)
            masks.inclusion.push_back(e);
        else
            masks.background.push_back(e);
    }
    if (masks.inclusion.empty() || masks.background.empty())
        throw std::invalid_argument("region_masks: a region mask is empty");
    return masks;
}

double rms_error(const ElasticityField& e_hat, const ElasticityField& e_true) {
    if (e_hat.size() != e_true.size())
        throw std::invalid_argument("rms_error: length mismatch");
    const double denom = e_true.norm();
    if (denom == 0.0) throw std::invalid_argument("rms_error: zero reference field");
    return (e_hat - e_true).norm() / denom;
}

namespace {

std::pair<double, double> mean_var(const ElasticityField& field,
                                   const std::vector<int>& idx) {
    double mean = 0.0;
    for (int i : idx) mean += field[i];
    mean /= static_cast<double>(idx.size());
    double var = 0.0;
    for (int i : idx) var += (field[i] - mean) * (field[i] - mean);
    var /= static_cast<double>(idx.size());
    return {mean, var};
}

}  // namespace

double cnr(const ElasticityField& e_hat, const RegionMasks& masks) {
    if (masks.inclusion.empty() || masks.background.empty())
        throw std::invalid_argument("cnr: empty region mask");
    const auto [mi, vi] = mean_var(e_hat, masks.inclusion);
    const auto [mb, vb] = mean_var(e_hat, masks.background);
    const double pooled = std::sqrt((vi + vb) / 2.0);
    if (pooled == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(mi - mb) / pooled;
}

}  // namespace mre
