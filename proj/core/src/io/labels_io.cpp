#include "autolabel/io/labels_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>

#include "autolabel/error.hpp"

namespace autolabel {

namespace {

constexpr char kSoftMagic[4] = {'S', 'L', 'B', 'L'};
constexpr std::uint32_t kSoftVersion = 1;

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& file, const char* what) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error(file + ": truncated " + what);
  return v;
}

void check_soft(const LabelSet& soft, const ClassRegistry& registry) {
  if (soft.scheme != LabelScheme::kSoft) throw Error("soft-label export needs a soft label set");
  if (soft.class_count != registry.size()) throw Error("soft labels and class registry disagree on class count");
}

}  // namespace

void write_label_ply(const std::filesystem::path& path, const PointCloud& cloud, std::span<const ClassId> labels,
                     std::span<const double> score, PlyFormat format) {
  if (labels.size() != cloud.size()) throw Error("label count does not match the cloud");
  if (!score.empty() && score.size() != cloud.size()) throw Error("score count does not match the cloud");
  PointCloud out;
  out.points = cloud.points;
  out.labels.assign(labels.begin(), labels.end());
  std::vector<PlyColumn> extra;
  if (!score.empty()) extra.push_back({"score", PlyType::kFloat64, {score.begin(), score.end()}});
  write_point_cloud(path, out, format, std::move(extra));
}

LabelFile read_label_ply(const std::filesystem::path& path) {
  const PlyTable t = read_ply(path);
  const auto* label = t.find("label");
  if (!label) throw Error(path.string() + ": no 'label' vertex property");
  LabelFile out;
  out.labels.reserve(t.vertex_count);
  for (std::size_t i = 0; i < t.vertex_count; ++i) {
    const double v = label->values[i];
    if (v < 0 || v > kUnlabeled || v != static_cast<double>(static_cast<ClassId>(v))) {
      throw Error(path.string() + ": invalid label at vertex " + std::to_string(i));
    }
    out.labels.push_back(static_cast<ClassId>(v));
  }
  if (const auto* s = t.find("score")) out.score = s->values;
  return out;
}

void write_class_list(const std::filesystem::path& path, const ClassRegistry& registry) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& n : registry.names()) out << n << "\n";
}

ClassRegistry read_class_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    names.push_back(line);
  }
  try {
    return ClassRegistry::from_names(names);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_soft_labels(const std::filesystem::path& path, const LabelSet& soft, const ClassRegistry& registry) {
  check_soft(soft, registry);
  std::string out(kSoftMagic, 4);
  put<std::uint32_t>(out, kSoftVersion);
  put<std::uint64_t>(out, soft.size());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(soft.class_count));
  for (const auto& n : registry.names()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(n.size()));
    out += n;
  }
  out.reserve(out.size() + soft.probabilities.size() * sizeof(float));
  for (double p : soft.probabilities) put<float>(out, static_cast<float>(p));
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error("failed writing " + path.string());
}

SoftLabelTable read_soft_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::string file = path.string();
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kSoftMagic, 4) != 0) throw Error(file + ": missing SLBL magic");
  if (get<std::uint32_t>(in, file, "version") != kSoftVersion) throw Error(file + ": unsupported soft-label version");
  SoftLabelTable t;
  t.points = get<std::uint64_t>(in, file, "point count");
  const auto classes = get<std::uint32_t>(in, file, "class count");
  for (std::uint32_t c = 0; c < classes; ++c) {
    const auto len = get<std::uint32_t>(in, file, "class name length");
    if (len > 4096) throw Error(file + ": implausible class name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw Error(file + ": truncated class name");
    t.classes.push_back(std::move(name));
  }
  t.probabilities.resize(t.points * classes);
  if (!in.read(reinterpret_cast<char*>(t.probabilities.data()),
               static_cast<std::streamsize>(t.probabilities.size() * sizeof(float)))) {
    throw Error(file + ": truncated probability table");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error(file + ": trailing bytes after probability table");
  return t;
}

void write_soft_labels_csv(const std::filesystem::path& path, const LabelSet& soft, const ClassRegistry& registry) {
  check_soft(soft, registry);
  std::string out;
  for (std::size_t c = 0; c < registry.size(); ++c) {
    if (c) out += ',';
    out += registry.name(static_cast<ClassId>(c));
  }
  out += '\n';
  char buf[32];
  for (std::size_t i = 0; i < soft.size(); ++i) {
    const auto row = soft.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      auto r = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(row[c]));
      out.append(buf, r.ptr);
    }
    out += '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path.string());
  file << out;
}

}  // namespace autolabel
