#include "temo/geo/obj_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "temo/util/error.hpp"

namespace temo::geo {
namespace {

// "7", "7/2", "7//3", "7/2/3" -> vertex index 7
int parse_face_index(const std::string& token, std::size_t vertex_count,
                     int line_no) {
    std::size_t slash = token.find('/');
    std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    int idx = 0;
    try {
        idx = std::stoi(head);
    } catch (const std::exception&) {
        raise(ErrorKind::Parse, "obj line " + std::to_string(line_no) +
                                    ": bad face index '" + token + "'");
    }
    if (idx < 1 || static_cast<std::size_t>(idx) > vertex_count)
        raise(ErrorKind::Parse, "obj line " + std::to_string(line_no) +
                                    ": face index " + std::to_string(idx) +
                                    " out of range (have " +
                                    std::to_string(vertex_count) + " vertices)");
    return idx - 1;
}

}  // namespace

Mesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::Io, "cannot open mesh file: " + path);
    Mesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ss >> v.x >> v.y >> v.z))
                raise(ErrorKind::Parse, "obj line " + std::to_string(line_no) +
                                            ": malformed vertex");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok)
                idx.push_back(
                    parse_face_index(tok, mesh.vertices.size(), line_no));
            if (idx.size() < 3)
                raise(ErrorKind::Parse, "obj line " + std::to_string(line_no) +
                                            ": face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k)
                mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
        }
        // vn, vt, usemtl, o, g, s ... are ignored
    }
    if (mesh.vertices.empty() || mesh.faces.empty())
        raise(ErrorKind::Parse, "obj file has no geometry: " + path);
    compute_face_normals(mesh);
    return mesh;
}

void save_obj(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::Io, "cannot write mesh file: " + path);
    out.precision(9);
    for (const Vec3& v : mesh.vertices)
        out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out) raise(ErrorKind::Io, "write failed: " + path);
}

}  // namespace temo::geo
