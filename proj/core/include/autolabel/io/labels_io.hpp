#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autolabel/labeling.hpp"
#include "autolabel/io/ply.hpp"

namespace autolabel {

/// Hard/weak labels as PLY: x, y, z (float64), uint16 "label" (65535 marks
/// unlabeled) and, when given, float64 "score" holding the object score.
void write_label_ply(const std::filesystem::path& path, const PointCloud& cloud, std::span<const ClassId> labels,
                     std::span<const double> score = {}, PlyFormat format = PlyFormat::kBinaryLittleEndian);

struct LabelFile {
  std::vector<ClassId> labels;
  std::optional<std::vector<double>> score;
};

/// Reads "label" (and "score" if present) from any PLY.
LabelFile read_label_ply(const std::filesystem::path& path);

/// One class name per line, in id order.
void write_class_list(const std::filesystem::path& path, const ClassRegistry& registry);
ClassRegistry read_class_list(const std::filesystem::path& path);

/// Binary soft-label table, little-endian:
///   "SLBL", u32 version (1), u64 points, u32 classes,
///   per class: u32 byte length + UTF-8 name,
///   then points x classes float32, row-major.
void write_soft_labels(const std::filesystem::path& path, const LabelSet& soft, const ClassRegistry& registry);

struct SoftLabelTable {
  std::vector<std::string> classes;
  std::size_t points = 0;
  std::vector<float> probabilities;
};

SoftLabelTable read_soft_labels(const std::filesystem::path& path);

/// CSV with a header row of class names and one row per point.
void write_soft_labels_csv(const std::filesystem::path& path, const LabelSet& soft, const ClassRegistry& registry);

}  // namespace autolabel
