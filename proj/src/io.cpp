#include "mre/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace mre {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> read_data_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

double parse_double(const std::string& s, const std::string& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("bad numeric value '" + s + "' in " + path);
    }
}

}  // namespace

void write_field_csv(const std::string& path, const ElasticityField& field,
                     const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "value\n";
    for (Eigen::Index i = 0; i < field.size(); ++i) out << format_double(field[i]) << "\n";
}

ElasticityField read_field_csv(const std::string& path) {
    const auto lines = read_data_lines(path);
    if (lines.empty() || lines.front() != "value")
        throw std::runtime_error("field csv missing 'value' header: " + path);
    ElasticityField field(static_cast<Eigen::Index>(lines.size()) - 1);
    for (std::size_t i = 1; i < lines.size(); ++i)
        field[static_cast<Eigen::Index>(i - 1)] = parse_double(lines[i], path);
    return field;
}

void write_dof_csv(const std::string& path, const Eigen::VectorXd& values,
                   const std::string& comment) {
    if (values.size() % 2 != 0)
        throw std::invalid_argument("dof csv: vector length must be even");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "node_id,axis,value\n";
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        out << i / 2 << "," << (i % 2 == 0 ? "lateral" : "axial") << ","
            << format_double(values[i]) << "\n";
    }
}

Eigen::VectorXd read_dof_csv(const std::string& path) {
    const auto lines = read_data_lines(path);
    if (lines.empty() || lines.front() != "node_id,axis,value")
        throw std::runtime_error("dof csv missing header: " + path);
    Eigen::VectorXd values(static_cast<Eigen::Index>(lines.size()) - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream ss(lines[i]);
        std::string node, axis, value;
        if (!std::getline(ss, node, ',') || !std::getline(ss, axis, ',') ||
            !std::getline(ss, value))
            throw std::runtime_error("malformed dof csv row in " + path);
        const long node_id = std::stol(node);
        const Eigen::Index dof = 2 * node_id + (axis == "axial" ? 1 : 0);
        if (axis != "lateral" && axis != "axial")
            throw std::runtime_error("bad axis '" + axis + "' in " + path);
        if (dof != static_cast<Eigen::Index>(i) - 1)
            throw std::runtime_error("dof csv rows out of order in " + path);
        values[dof] = parse_double(value, path);
    }
    return values;
}

nlohmann::json mesh_to_json(const TriMesh& mesh) {
    nlohmann::json j;
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (const auto& p : mesh.nodes) nodes.push_back({p.x(), p.y()});
    auto& elements = j["elements"] = nlohmann::json::array();
    for (const auto& t : mesh.elements) elements.push_back({t[0], t[1], t[2]});
    auto& tags = j["boundary_tags"] = nlohmann::json::array();
    for (BoundaryTag t : mesh.boundary_tags) tags.push_back(to_string(t));
    return j;
}

TriMesh mesh_from_json(const nlohmann::json& j) {
    TriMesh mesh;
    for (const auto& p : j.at("nodes"))
        mesh.nodes.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    for (const auto& t : j.at("elements"))
        mesh.elements.push_back(
            {t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    for (const auto& t : j.at("boundary_tags"))
        mesh.boundary_tags.push_back(boundary_tag_from_string(t.get<std::string>()));
    mesh.validate();
    return mesh;
}

void save_mesh_json(const std::string& path, const TriMesh& mesh) {
    write_text_file(path, mesh_to_json(mesh).dump(2) + "\n");
}

TriMesh load_mesh_json(const std::string& path) {
    return mesh_from_json(nlohmann::json::parse(read_text_file(path)));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a_hash(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace mre
