#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "autolabel/geom/types.hpp"

namespace autolabel {

enum class PlyType : std::uint8_t { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

const char* ply_type_name(PlyType t);

/// One scalar vertex property. Values are widened to double, which is exact
/// for every supported type.
struct PlyColumn {
  std::string name;
  PlyType type = PlyType::kFloat32;
  std::vector<double> values;
};

/// The vertex element (scalar properties only) plus an optional face list.
/// Other elements are parsed and skipped.
struct PlyTable {
  std::size_t vertex_count = 0;
  std::vector<PlyColumn> columns;
  std::vector<std::vector<std::uint32_t>> faces;

  const PlyColumn* find(const std::string& name) const;
  const PlyColumn& require(const std::string& name) const;
};

/// Accepts format ascii and binary_little_endian. Errors carry the file name
/// and the header line or data record that failed.
PlyTable read_ply(const std::filesystem::path& path);

enum class PlyFormat : std::uint8_t { kAscii, kBinaryLittleEndian };

/// Faces are written as "list uchar int vertex_indices". Float64 values are
/// printed round-trip exact in ascii mode.
void write_ply(const std::filesystem::path& path, const PlyTable& table, PlyFormat format = PlyFormat::kBinaryLittleEndian);

/// x, y, z plus optional nx, ny, nz and uint16 "label".
PointCloud read_point_cloud(const std::filesystem::path& path);
void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud,
                       PlyFormat format = PlyFormat::kBinaryLittleEndian,
                       std::vector<PlyColumn> extra = {});

/// Vertex positions plus a face list; polygons are fan-triangulated.
TriangleMesh read_mesh_ply(const std::filesystem::path& path);

}  // namespace autolabel
