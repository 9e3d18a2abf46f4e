#include "autolabel/io/obj.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "autolabel/error.hpp"
#include "autolabel/io/ply.hpp"

namespace autolabel {

TriangleMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> Error {
    return Error(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  std::vector<std::uint32_t> face;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw fail("malformed vertex");
      mesh.vertices.emplace_back(x, y, z);
    } else if (key == "f") {
      face.clear();
      std::string corner;
      while (ss >> corner) {
        const auto slash = corner.find('/');
        const std::string head = corner.substr(0, slash);
        long long idx = 0;
        auto r = std::from_chars(head.data(), head.data() + head.size(), idx);
        if (r.ec != std::errc() || r.ptr != head.data() + head.size() || idx == 0) {
          throw fail("bad face index '" + corner + "'");
        }
        const auto nv = static_cast<long long>(mesh.vertices.size());
        const long long resolved = idx > 0 ? idx - 1 : nv + idx;
        if (resolved < 0 || resolved >= nv) throw fail("face index " + std::to_string(idx) + " out of range");
        face.push_back(static_cast<std::uint32_t>(resolved));
      }
      if (face.size() < 3) throw fail("face with fewer than 3 vertices");
      for (std::size_t k = 1; k + 1 < face.size(); ++k) mesh.triangles.push_back({face[0], face[k], face[k + 1]});
    }
  }
  return mesh;
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::string out;
  char buf[32];
  for (const auto& v : mesh.vertices) {
    out += 'v';
    for (int k = 0; k < 3; ++k) {
      auto r = std::to_chars(buf, buf + sizeof(buf), v[k]);
      out += ' ';
      out.append(buf, r.ptr);
    }
    out += '\n';
  }
  for (const auto& t : mesh.triangles) {
    out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' + std::to_string(t[2] + 1) + '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path.string());
  file << out;
  if (!file) throw Error("failed writing " + path.string());
}

TriangleMesh read_mesh(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == ".obj") return read_obj(path);
  if (ext == ".ply") return read_mesh_ply(path);
  throw Error(path.string() + ": unsupported mesh format (expected .obj or .ply)");
}

}  // namespace autolabel
