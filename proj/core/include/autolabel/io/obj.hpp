#pragma once

#include <filesystem>

#include "autolabel/geom/types.hpp"

namespace autolabel {

/// ASCII Wavefront OBJ: "v" and "f" records. Face corners may use the
/// v/vt/vn forms and negative (relative) indices; polygons are
/// fan-triangulated. Other records are ignored.
TriangleMesh read_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

/// Reads .obj or .ply by extension.
TriangleMesh read_mesh(const std::filesystem::path& path);

}  // namespace autolabel
