#pragma once

// Binary tensor (PLCT) and model (PLCM) files, plus plain-text labels.
//
// PLCT: "PLCT" | u32 version=1 | u32 order | order x u64 dims | f64 payload
// PLCM: "PLCM" | u32 version=1 | u64 rank | u32 count |
//       count x (u32 name_len | name | u64 rows | u64 cols | f64 payload)
//
// All integers and doubles are little-endian; payloads are row-major with
// the last index fastest.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "plc/pseudo_graph.hpp"
#include "plc/tensor.hpp"

namespace plc {

inline constexpr std::uint32_t kFormatVersion = 1;

void write_tensor(std::ostream& os, const DenseTensor& t);
DenseTensor read_tensor(std::istream& is);  // throws FormatError
void write_tensor_file(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor read_tensor_file(const std::filesystem::path& path);

struct ModelFile {
  std::uint64_t rank = 0;
  std::vector<std::pair<std::string, Matrix>> matrices;

  // Throws FormatError when `name` is absent.
  const Matrix& get(const std::string& name) const;

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

// Canonical layout: "W", "Wt", then one factor per non-sample mode named
// "A", "B", "C", ...
ModelFile make_model_file(const KruskalModel& model, const Matrix& w_tilde);
// Inverse of make_model_file; throws FormatError on missing or inconsistent matrices.
std::pair<KruskalModel, Matrix> split_model_file(const ModelFile& f);

void write_model(std::ostream& os, const ModelFile& m);
ModelFile read_model(std::istream& is);
void write_model_file(const std::filesystem::path& path, const ModelFile& m);
ModelFile read_model_file(const std::filesystem::path& path);

// One integer per line, LF-terminated.
void write_labels_file(const std::filesystem::path& path, const Labels& labels);
Labels read_labels_file(const std::filesystem::path& path);

}  // namespace plc
