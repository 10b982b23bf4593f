#include "mre/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mre {

const char* to_string(BoundaryTag tag) {
    switch (tag) {
        case BoundaryTag::Interior: return "interior";
        case BoundaryTag::Bottom: return "bottom";
        case BoundaryTag::Top: return "top";
        case BoundaryTag::Left: return "left";
        case BoundaryTag::Right: return "right";
    }
    return "interior";
}

BoundaryTag boundary_tag_from_string(const std::string& s) {
    if (s == "interior") return BoundaryTag::Interior;
    if (s == "bottom") return BoundaryTag::Bottom;
    if (s == "top") return BoundaryTag::Top;
    if (s == "left") return BoundaryTag::Left;
    if (s == "right") return BoundaryTag::Right;
    throw std::invalid_argument("unknown boundary tag: " + s);
}

double TriMesh::element_area(int e) const {
    const auto& t = elements.at(static_cast<std::size_t>(e));
    const Eigen::Vector2d& p0 = nodes[static_cast<std::size_t>(t[0])];
    const Eigen::Vector2d& p1 = nodes[static_cast<std::size_t>(t[1])];
    const Eigen::Vector2d& p2 = nodes[static_cast<std::size_t>(t[2])];
    return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                  (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

Eigen::Vector2d TriMesh::element_centroid(int e) const {
    const auto& t = elements.at(static_cast<std::size_t>(e));
    return (nodes[static_cast<std::size_t>(t[0])] +
            nodes[static_cast<std::size_t>(t[1])] +
            nodes[static_cast<std::size_t>(t[2])]) /
           3.0;
}

double TriMesh::total_area() const {
    double a = 0.0;
    for (int e = 0; e < element_count(); ++e) a += element_area(e);
    return a;
}

std::vector<int> TriMesh::nodes_with_tag(BoundaryTag tag) const {
    std::vector<int> out;
    for (int i = 0; i < node_count(); ++i)
        if (boundary_tags[static_cast<std::size_t>(i)] == tag) out.push_back(i);
    return out;
}

void TriMesh::validate() const {
    if (nodes.empty() || elements.empty())
        throw std::invalid_argument("mesh: empty node or element list");
    if (boundary_tags.size() != nodes.size())
        throw std::invalid_argument("mesh: boundary_tags size mismatch");
    const int n = node_count();
    for (int e = 0; e < element_count(); ++e) {
        for (int k : elements[static_cast<std::size_t>(e)]) {
            if (k < 0 || k >= n) {
                std::ostringstream os;
                os << "mesh: element " << e << " references node " << k;
                throw std::invalid_argument(os.str());
            }
        }
        if (element_area(e) <= 0.0) {
            std::ostringstream os;
            os << "mesh: element " << e << " has non-positive area";
            throw std::invalid_argument(os.str());
        }
    }
}

void PhantomSpec::validate() const {
    if (width <= 0.0 || height <= 0.0)
        throw std::invalid_argument("phantom: non-positive dimensions");
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("phantom: resolution must be >= 1");
    if (e_background <= 0.0 || e_inclusion <= 0.0)
        throw std::invalid_argument("phantom: moduli must be strictly positive");
    if (inclusion_radius < 0.0)
        throw std::invalid_argument("phantom: negative inclusion radius");
    if (inclusion_radius > 0.0) {
        const double x = inclusion_center.x();
        const double y = inclusion_center.y();
        if (x - inclusion_radius < 0.0 || x + inclusion_radius > width ||
            y - inclusion_radius < 0.0 || y + inclusion_radius > height)
            throw std::invalid_argument("phantom: inclusion disk leaves the rectangle");
    }
    if (jitter < 0.0 || jitter >= 0.5)
        throw std::invalid_argument("phantom: jitter must be in [0, 0.5)");
}

int AdjacencyGraph::max_degree() const {
    std::vector<int> deg(static_cast<std::size_t>(element_count), 0);
    for (const auto& e : edges) {
        ++deg[static_cast<std::size_t>(e.a)];
        ++deg[static_cast<std::size_t>(e.b)];
    }
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

TriMesh build_mesh(const PhantomSpec& spec) {
    spec.validate();
    const int nx = spec.nx;
    const int ny = spec.ny;
    const int npx = nx + 1;
    const int npy = ny + 1;

    TriMesh mesh;
    mesh.nodes.reserve(static_cast<std::size_t>(npx * npy));
    mesh.boundary_tags.reserve(static_cast<std::size_t>(npx * npy));

    std::mt19937_64 gen(spec.jitter_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double dx = spec.width / nx;
    const double dy = spec.height / ny;

    for (int j = 0; j < npy; ++j) {
        for (int i = 0; i < npx; ++i) {
            double x = i * dx;
            double y = j * dy;
            const bool interior = i > 0 && i < nx && j > 0 && j < ny;
            if (interior && spec.jitter > 0.0) {
                x += spec.jitter * dx * unit(gen);
                y += spec.jitter * dy * unit(gen);
            }
            mesh.nodes.emplace_back(x, y);
            // corner priority: bottom > top > left > right
            BoundaryTag tag = BoundaryTag::Interior;
            if (j == 0)
                tag = BoundaryTag::Bottom;
            else if (j == ny)
                tag = BoundaryTag::Top;
            else if (i == 0)
                tag = BoundaryTag::Left;
            else if (i == nx)
                tag = BoundaryTag::Right;
            mesh.boundary_tags.push_back(tag);
        }
    }

    auto vid = [npx](int i, int j) { return j * npx + i; };
    mesh.elements.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j);
            const int v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1);
            const int v11 = vid(i + 1, j + 1);
            mesh.elements.push_back({v00, v10, v11});
            mesh.elements.push_back({v00, v11, v01});
        }
    }

    mesh.validate();
    return mesh;
}

ElasticityField assign_phantom(const TriMesh& mesh, const PhantomSpec& spec) {
    spec.validate();
    ElasticityField field(mesh.element_count());
    const double r2 = spec.inclusion_radius * spec.inclusion_radius;
    for (int e = 0; e < mesh.element_count(); ++e) {
        const Eigen::Vector2d c = mesh.element_centroid(e);
        const double d2 = (c - spec.inclusion_center).squaredNorm();
        field[e] = (spec.inclusion_radius > 0.0 && d2 < r2) ? spec.e_inclusion
                                                            : spec.e_background;
    }
    return field;
}

AdjacencyGraph element_adjacency(const TriMesh& mesh) {
    mesh.validate();
    // undirected node-pair -> incident elements
    std::map<std::pair<int, int>, std::vector<int>> edge_elems;
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& t = mesh.elements[static_cast<std::size_t>(e)];
        for (int k = 0; k < 3; ++k) {
            int a = t[static_cast<std::size_t>(k)];
            int b = t[static_cast<std::size_t>((k + 1) % 3)];
            if (a > b) std::swap(a, b);
            edge_elems[{a, b}].push_back(e);
        }
    }

    AdjacencyGraph graph;
    graph.element_count = mesh.element_count();
    for (const auto& [nodes_ab, elems] : edge_elems) {
        if (elems.size() != 2) continue;
        int ea = elems[0];
        int eb = elems[1];
        if (ea > eb) std::swap(ea, eb);
        const double shared_len =
            (mesh.nodes[static_cast<std::size_t>(nodes_ab.first)] -
             mesh.nodes[static_cast<std::size_t>(nodes_ab.second)])
                .norm();
        const double centroid_dist =
            (mesh.element_centroid(ea) - mesh.element_centroid(eb)).norm();
        graph.edges.push_back({ea, eb, shared_len / centroid_dist});
    }
    std::sort(graph.edges.begin(), graph.edges.end(),
              [](const AdjacencyGraph::Edge& l, const AdjacencyGraph::Edge& r) {
                  return std::tie(l.a, l.b) < std::tie(r.a, r.b);
              });
    return graph;
}

}  // namespace mre
