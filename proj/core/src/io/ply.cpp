#include "autolabel/io/ply.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "autolabel/error.hpp"

namespace autolabel {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

namespace {

struct TypeInfo {
  PlyType type;
  const char* names[2];
  std::size_t bytes;
};

constexpr std::array<TypeInfo, 8> kTypes{{
    {PlyType::kInt8, {"char", "int8"}, 1},
    {PlyType::kUInt8, {"uchar", "uint8"}, 1},
    {PlyType::kInt16, {"short", "int16"}, 2},
    {PlyType::kUInt16, {"ushort", "uint16"}, 2},
    {PlyType::kInt32, {"int", "int32"}, 4},
    {PlyType::kUInt32, {"uint", "uint32"}, 4},
    {PlyType::kFloat32, {"float", "float32"}, 4},
    {PlyType::kFloat64, {"double", "float64"}, 8},
}};

std::size_t type_bytes(PlyType t) { return kTypes[static_cast<std::size_t>(t)].bytes; }

std::optional<PlyType> parse_type(const std::string& s) {
  for (const auto& info : kTypes) {
    if (s == info.names[0] || s == info.names[1]) return info.type;
  }
  return std::nullopt;
}

bool is_integer_type(PlyType t) { return t != PlyType::kFloat32 && t != PlyType::kFloat64; }

double type_min(PlyType t) {
  switch (t) {
    case PlyType::kInt8: return std::numeric_limits<std::int8_t>::min();
    case PlyType::kInt16: return std::numeric_limits<std::int16_t>::min();
    case PlyType::kInt32: return std::numeric_limits<std::int32_t>::min();
    case PlyType::kFloat32: return -std::numeric_limits<float>::max();
    case PlyType::kFloat64: return -std::numeric_limits<double>::max();
    default: return 0.0;
  }
}

double type_max(PlyType t) {
  switch (t) {
    case PlyType::kInt8: return std::numeric_limits<std::int8_t>::max();
    case PlyType::kUInt8: return std::numeric_limits<std::uint8_t>::max();
    case PlyType::kInt16: return std::numeric_limits<std::int16_t>::max();
    case PlyType::kUInt16: return std::numeric_limits<std::uint16_t>::max();
    case PlyType::kInt32: return std::numeric_limits<std::int32_t>::max();
    case PlyType::kUInt32: return std::numeric_limits<std::uint32_t>::max();
    case PlyType::kFloat32: return std::numeric_limits<float>::max();
    case PlyType::kFloat64: return std::numeric_limits<double>::max();
  }
  return 0.0;
}

struct Property {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUInt8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> props;
};

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double decode(PlyType t, const char* p) {
  switch (t) {
    case PlyType::kInt8: return load_le<std::int8_t>(p);
    case PlyType::kUInt8: return load_le<std::uint8_t>(p);
    case PlyType::kInt16: return load_le<std::int16_t>(p);
    case PlyType::kUInt16: return load_le<std::uint16_t>(p);
    case PlyType::kInt32: return load_le<std::int32_t>(p);
    case PlyType::kUInt32: return load_le<std::uint32_t>(p);
    case PlyType::kFloat32: return load_le<float>(p);
    case PlyType::kFloat64: return load_le<double>(p);
  }
  return 0.0;
}

template <typename T>
void store(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void encode(std::string& out, PlyType t, double v) {
  switch (t) {
    case PlyType::kInt8: store(out, static_cast<std::int8_t>(v)); break;
    case PlyType::kUInt8: store(out, static_cast<std::uint8_t>(v)); break;
    case PlyType::kInt16: store(out, static_cast<std::int16_t>(v)); break;
    case PlyType::kUInt16: store(out, static_cast<std::uint16_t>(v)); break;
    case PlyType::kInt32: store(out, static_cast<std::int32_t>(v)); break;
    case PlyType::kUInt32: store(out, static_cast<std::uint32_t>(v)); break;
    case PlyType::kFloat32: store(out, static_cast<float>(v)); break;
    case PlyType::kFloat64: store(out, v); break;
  }
}

void format_value(std::string& out, PlyType t, double v) {
  char buf[64];
  std::to_chars_result r;
  if (t == PlyType::kFloat32) {
    r = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(v));
  } else if (t == PlyType::kFloat64) {
    r = std::to_chars(buf, buf + sizeof(buf), v);
  } else {
    r = std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(v));
  }
  out.append(buf, r.ptr);
}

// Reads either ascii tokens or little-endian binary values from the body.
class BodyReader {
 public:
  BodyReader(std::istream& in, bool binary, std::string file, std::size_t header_lines)
      : in_(in), binary_(binary), file_(std::move(file)), line_(header_lines) {}

  void begin_record() {
    if (binary_) return;
    tokens_.clear();
    pos_ = 0;
    std::string line;
    do {
      if (!std::getline(in_, line)) fail("unexpected end of file");
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
    } while (line.find_first_not_of(" \t") == std::string::npos);
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens_.push_back(tok);
  }

  void end_record() {
    if (!binary_ && pos_ != tokens_.size()) fail("record has " + std::to_string(tokens_.size()) + " values, expected " + std::to_string(pos_));
  }

  double next(PlyType t) {
    double v = 0.0;
    if (binary_) {
      char buf[8];
      const auto n = type_bytes(t);
      if (!in_.read(buf, static_cast<std::streamsize>(n))) fail("unexpected end of binary data");
      offset_ += n;
      v = decode(t, buf);
    } else {
      if (pos_ >= tokens_.size()) fail("record is missing values");
      const std::string& tok = tokens_[pos_++];
      const char* end = tok.data() + tok.size();
      std::from_chars_result r;
      if (is_integer_type(t)) {
        long long iv = 0;
        r = std::from_chars(tok.data(), end, iv);
        v = static_cast<double>(iv);
      } else {
        r = std::from_chars(tok.data(), end, v);
      }
      if (r.ec != std::errc() || r.ptr != end) fail("cannot parse '" + tok + "' as " + ply_type_name(t));
      if (v < type_min(t) || v > type_max(t)) fail("value '" + tok + "' out of range for " + ply_type_name(t));
    }
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    if (binary_) throw Error(file_ + ": byte offset " + std::to_string(offset_) + " of body: " + what);
    throw Error(file_ + ":" + std::to_string(line_) + ": " + what);
  }

 private:
  std::istream& in_;
  bool binary_;
  std::string file_;
  std::size_t line_;
  std::size_t offset_ = 0;
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

const char* ply_type_name(PlyType t) { return kTypes[static_cast<std::size_t>(t)].names[0]; }

const PlyColumn* PlyTable::find(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const PlyColumn& PlyTable::require(const std::string& name) const {
  const auto* c = find(name);
  if (!c) throw Error("PLY vertex element has no property '" + name + "'");
  return *c;
}

PlyTable read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::string file = path.string();

  std::vector<Element> elements;
  bool binary = false;
  bool have_format = false;
  std::size_t line_no = 0;
  std::string line;
  auto header_error = [&](const std::string& what) -> Error {
    return Error(file + ":" + std::to_string(line_no) + ": " + what);
  };
  for (;;) {
    if (!std::getline(in, line)) throw header_error("missing end_header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "ply") throw header_error("not a PLY file (missing 'ply' magic)");
      continue;
    }
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key.empty() || key == "comment" || key == "obj_info") continue;
    if (key == "end_header") break;
    if (key == "format") {
      std::string fmt, version;
      ss >> fmt >> version;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw header_error("unsupported PLY format '" + fmt + "'");
      }
      have_format = true;
    } else if (key == "element") {
      Element e;
      long long count = -1;
      ss >> e.name >> count;
      if (e.name.empty() || count < 0) throw header_error("malformed element line");
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (key == "property") {
      if (elements.empty()) throw header_error("property before any element");
      Property p;
      std::string type;
      ss >> type;
      if (type == "list") {
        std::string ct, vt;
        ss >> ct >> vt >> p.name;
        auto c = parse_type(ct);
        auto v = parse_type(vt);
        if (!c || !v || !is_integer_type(*c) || p.name.empty()) throw header_error("malformed list property");
        p.is_list = true;
        p.count_type = *c;
        p.type = *v;
      } else {
        auto t = parse_type(type);
        ss >> p.name;
        if (!t || p.name.empty()) throw header_error("unknown property type '" + type + "'");
        p.type = *t;
      }
      elements.back().props.push_back(std::move(p));
    } else {
      throw header_error("unexpected header keyword '" + key + "'");
    }
  }
  if (!have_format) throw header_error("missing format line");

  PlyTable table;
  BodyReader reader(in, binary, file, line_no);
  for (const auto& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    std::vector<PlyColumn*> targets(e.props.size(), nullptr);
    if (is_vertex) {
      table.vertex_count = e.count;
      for (std::size_t k = 0; k < e.props.size(); ++k) {
        if (e.props[k].is_list) continue;
        table.columns.push_back({e.props[k].name, e.props[k].type, {}});
        table.columns.back().values.reserve(e.count);
      }
      std::size_t col = 0;
      for (std::size_t k = 0; k < e.props.size(); ++k) {
        if (!e.props[k].is_list) targets[k] = &table.columns[col++];
      }
    }
    for (std::size_t r = 0; r < e.count; ++r) {
      reader.begin_record();
      for (std::size_t k = 0; k < e.props.size(); ++k) {
        const Property& p = e.props[k];
        if (!p.is_list) {
          const double v = reader.next(p.type);
          if (targets[k]) targets[k]->values.push_back(v);
          continue;
        }
        const double count = reader.next(p.count_type);
        if (count < 0) reader.fail("negative list length");
        const bool indices = is_face && (p.name == "vertex_indices" || p.name == "vertex_index");
        std::vector<std::uint32_t> face;
        for (std::size_t j = 0; j < static_cast<std::size_t>(count); ++j) {
          const double v = reader.next(p.type);
          if (indices) {
            if (v < 0 || v != std::floor(v)) reader.fail("invalid vertex index");
            face.push_back(static_cast<std::uint32_t>(v));
          }
        }
        if (indices) table.faces.push_back(std::move(face));
      }
      reader.end_record();
    }
  }
  return table;
}

void write_ply(const std::filesystem::path& path, const PlyTable& table, PlyFormat format) {
  for (const auto& c : table.columns) {
    if (c.values.size() != table.vertex_count) {
      throw Error("PLY column '" + c.name + "' has " + std::to_string(c.values.size()) + " values, expected " +
                  std::to_string(table.vertex_count));
    }
  }
  const bool binary = format == PlyFormat::kBinaryLittleEndian;
  std::string out;
  out += "ply\n";
  out += binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n";
  out += "element vertex " + std::to_string(table.vertex_count) + "\n";
  for (const auto& c : table.columns) out += std::string("property ") + ply_type_name(c.type) + " " + c.name + "\n";
  if (!table.faces.empty()) {
    out += "element face " + std::to_string(table.faces.size()) + "\n";
    out += "property list uchar int vertex_indices\n";
  }
  out += "end_header\n";
  for (std::size_t i = 0; i < table.vertex_count; ++i) {
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
      const auto& c = table.columns[k];
      if (binary) {
        encode(out, c.type, c.values[i]);
      } else {
        if (k) out += ' ';
        format_value(out, c.type, c.values[i]);
      }
    }
    if (!binary) out += '\n';
  }
  for (const auto& f : table.faces) {
    if (f.size() > 255) throw Error("PLY faces are limited to 255 vertices");
    if (binary) {
      store(out, static_cast<std::uint8_t>(f.size()));
      for (auto v : f) store(out, static_cast<std::int32_t>(v));
    } else {
      out += std::to_string(f.size());
      for (auto v : f) out += ' ' + std::to_string(v);
      out += '\n';
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error("failed writing " + path.string());
}

PointCloud read_point_cloud(const std::filesystem::path& path) {
  const PlyTable t = read_ply(path);
  PointCloud cloud;
  const auto* x = t.find("x");
  const auto* y = t.find("y");
  const auto* z = t.find("z");
  if (!x || !y || !z) throw Error(path.string() + ": point cloud needs x, y and z vertex properties");
  cloud.points.resize(t.vertex_count);
  for (std::size_t i = 0; i < t.vertex_count; ++i) cloud.points[i] = Point3(x->values[i], y->values[i], z->values[i]);
  const auto* nx = t.find("nx");
  const auto* ny = t.find("ny");
  const auto* nz = t.find("nz");
  if (nx && ny && nz) {
    cloud.normals.resize(t.vertex_count);
    for (std::size_t i = 0; i < t.vertex_count; ++i) {
      cloud.normals[i] = Vector3(nx->values[i], ny->values[i], nz->values[i]);
    }
  } else if (nx || ny || nz) {
    throw Error(path.string() + ": normals need all of nx, ny and nz");
  }
  if (const auto* label = t.find("label")) {
    if (!is_integer_type(label->type)) throw Error(path.string() + ": 'label' must be an integer property");
    cloud.labels.resize(t.vertex_count);
    for (std::size_t i = 0; i < t.vertex_count; ++i) {
      const double v = label->values[i];
      if (v < 0 || v > kUnlabeled) throw Error(path.string() + ": label out of range at vertex " + std::to_string(i));
      cloud.labels[i] = static_cast<ClassId>(v);
    }
  }
  try {
    cloud.validate();
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return cloud;
}

void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud, PlyFormat format,
                       std::vector<PlyColumn> extra) {
  PlyTable t;
  t.vertex_count = cloud.size();
  auto column = [&](const char* name, PlyType type, auto&& get) {
    PlyColumn c{name, type, {}};
    c.values.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) c.values.push_back(get(i));
    t.columns.push_back(std::move(c));
  };
  column("x", PlyType::kFloat64, [&](std::size_t i) { return cloud.points[i].x(); });
  column("y", PlyType::kFloat64, [&](std::size_t i) { return cloud.points[i].y(); });
  column("z", PlyType::kFloat64, [&](std::size_t i) { return cloud.points[i].z(); });
  if (cloud.has_normals()) {
    column("nx", PlyType::kFloat32, [&](std::size_t i) { return cloud.normals[i].x(); });
    column("ny", PlyType::kFloat32, [&](std::size_t i) { return cloud.normals[i].y(); });
    column("nz", PlyType::kFloat32, [&](std::size_t i) { return cloud.normals[i].z(); });
  }
  if (cloud.has_labels()) {
    column("label", PlyType::kUInt16, [&](std::size_t i) { return static_cast<double>(cloud.labels[i]); });
  }
  for (auto& c : extra) t.columns.push_back(std::move(c));
  write_ply(path, t, format);
}

TriangleMesh read_mesh_ply(const std::filesystem::path& path) {
  const PlyTable t = read_ply(path);
  const auto* x = t.find("x");
  const auto* y = t.find("y");
  const auto* z = t.find("z");
  if (!x || !y || !z) throw Error(path.string() + ": mesh needs x, y and z vertex properties");
  TriangleMesh mesh;
  mesh.vertices.resize(t.vertex_count);
  for (std::size_t i = 0; i < t.vertex_count; ++i) mesh.vertices[i] = Point3(x->values[i], y->values[i], z->values[i]);
  for (std::size_t f = 0; f < t.faces.size(); ++f) {
    const auto& face = t.faces[f];
    if (face.size() < 3) throw Error(path.string() + ": face " + std::to_string(f) + " has fewer than 3 vertices");
    for (auto v : face) {
      if (v >= mesh.vertices.size()) throw Error(path.string() + ": face " + std::to_string(f) + " index out of range");
    }
    for (std::size_t k = 1; k + 1 < face.size(); ++k) mesh.triangles.push_back({face[0], face[k], face[k + 1]});
  }
  return mesh;
}

}  // namespace autolabel
