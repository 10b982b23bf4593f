#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>

#include "mre/mesh.hpp"

namespace mre {

/// Shortest round-trip decimal rendering (locale-independent,
/// deterministic; used for every CSV number).
std::string format_double(double v);

/// Element-field CSV: a `value` header then one modulus per element row.
void write_field_csv(const std::string& path, const ElasticityField& field,
                     const std::string& comment = "");
ElasticityField read_field_csv(const std::string& path);

/// Displacement/force CSV: one dof per row as node_id,axis,value with axis
/// in {lateral, axial}; rows interleaved per node.
void write_dof_csv(const std::string& path, const Eigen::VectorXd& values,
                   const std::string& comment = "");
Eigen::VectorXd read_dof_csv(const std::string& path);

nlohmann::json mesh_to_json(const TriMesh& mesh);
TriMesh mesh_from_json(const nlohmann::json& j);
void save_mesh_json(const std::string& path, const TriMesh& mesh);
TriMesh load_mesh_json(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// FNV-1a hash of a canonical string (config hashes in output metadata).
std::uint64_t fnv1a_hash(const std::string& s);

}  // namespace mre
