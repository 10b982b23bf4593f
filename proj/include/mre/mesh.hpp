#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mre {

/// Per-element modulus vector, in units of MaterialParams::modulus_unit_pa
/// (default 100 kPa).
using ElasticityField = Eigen::VectorXd;

enum class BoundaryTag : std::uint8_t { Interior, Bottom, Top, Left, Right };

const char* to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(const std::string& s);

/// 2D triangulated medium. Elements are counter-clockwise node triples;
/// every boundary node carries exactly one of the four side tags.
struct TriMesh {
    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 3>> elements;
    std::vector<BoundaryTag> boundary_tags;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int element_count() const { return static_cast<int>(elements.size()); }
    int dof_count() const { return 2 * node_count(); }

    /// Signed area of element e; positive for a valid (CCW) element.
    double element_area(int e) const;
    Eigen::Vector2d element_centroid(int e) const;
    double total_area() const;

    std::vector<int> nodes_with_tag(BoundaryTag tag) const;

    /// Throws std::invalid_argument if any type invariant is violated.
    void validate() const;
};

/// Rectangular phantom with one circular inclusion. Moduli are in the same
/// unit as ElasticityField.
struct PhantomSpec {
    double width = 0.1;
    double height = 0.1;
    int nx = 16;
    int ny = 16;
    Eigen::Vector2d inclusion_center{0.05, 0.05};
    double inclusion_radius = 0.02;
    double e_background = 0.145;
    double e_inclusion = 0.46;
    double jitter = 0.0;       // interior-node jitter, fraction of cell size
    std::uint64_t jitter_seed = 0;

    void validate() const;
};

/// Face-adjacency of elements; weight = shared-edge length / centroid
/// distance (finite-volume gradient surrogate for graph TV).
struct AdjacencyGraph {
    struct Edge {
        int a;
        int b;
        double weight;
    };
    std::vector<Edge> edges;
    int element_count = 0;

    int max_degree() const;
};

/// Structured right-triangle tiling with (nx+1)(ny+1) nodes and 2*nx*ny
/// CCW elements. jitter > 0 perturbs interior nodes reproducibly.
TriMesh build_mesh(const PhantomSpec& spec);

/// Piecewise-constant modulus: e_inclusion where the element centroid lies
/// inside the inclusion disk, e_background elsewhere.
ElasticityField assign_phantom(const TriMesh& mesh, const PhantomSpec& spec);

AdjacencyGraph element_adjacency(const TriMesh& mesh);

}  // namespace mre
