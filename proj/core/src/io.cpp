#include "plc/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <limits>

#include "plc/error.hpp"

namespace plc {
namespace {

constexpr std::array<char, 4> kTensorMagic{'P', 'L', 'C', 'T'};
constexpr std::array<char, 4> kModelMagic{'P', 'L', 'C', 'M'};
// Guards allocations driven by header fields of a corrupt file.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

template <typename U>
void put_le(std::ostream& os, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = char((v >> (8 * i)) & 0xFF);
  os.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& is, const char* what) {
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw FormatError(std::string("truncated file while reading ") + what);
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= U(bytes[i]) << (8 * i);
  return v;
}

void put_doubles(std::ostream& os, std::span<const double> values) {
  for (double v : values) put_le(os, std::bit_cast<std::uint64_t>(v));
}

std::vector<double> get_doubles(std::istream& is, std::uint64_t count) {
  std::vector<double> out(count);
  for (auto& v : out) v = std::bit_cast<double>(get_le<std::uint64_t>(is, "payload"));
  return out;
}

void expect_magic(std::istream& is, const std::array<char, 4>& magic, const char* kind) {
  std::array<char, 4> got{};
  if (!is.read(got.data(), got.size())) throw FormatError(std::string(kind) + ": file too short for magic");
  if (got != magic) {
    throw FormatError(std::string(kind) + ": bad magic (expected \"" + std::string(magic.data(), 4) + "\")");
  }
  const auto version = get_le<std::uint32_t>(is, "version");
  if (version != kFormatVersion) {
    throw FormatError(std::string(kind) + ": unsupported version " + std::to_string(version));
  }
}

void expect_end(std::istream& is, const char* kind) {
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError(std::string(kind) + ": trailing bytes after payload");
}

std::uint64_t checked_product(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > kMaxElements / b) throw FormatError("element count too large");
  return a * b;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  return is;
}

std::string factor_name(std::size_t k) {
  if (k < 26) return std::string(1, char('A' + k));
  return "U" + std::to_string(k);
}

}  // namespace

void write_tensor(std::ostream& os, const DenseTensor& t) {
  os.write(kTensorMagic.data(), kTensorMagic.size());
  put_le<std::uint32_t>(os, kFormatVersion);
  put_le<std::uint32_t>(os, std::uint32_t(t.order()));
  for (auto d : t.dims()) put_le<std::uint64_t>(os, d);
  put_doubles(os, t.data());
}

DenseTensor read_tensor(std::istream& is) {
  expect_magic(is, kTensorMagic, "PLCT");
  const auto order = get_le<std::uint32_t>(is, "order");
  if (order == 0 || order > 64) throw FormatError("PLCT: invalid order " + std::to_string(order));
  std::vector<std::size_t> dims(order);
  std::uint64_t count = 1;
  for (auto& d : dims) {
    const auto v = get_le<std::uint64_t>(is, "dims");
    if (v == 0) throw FormatError("PLCT: zero extent");
    count = checked_product(count, v);
    d = std::size_t(v);
  }
  auto data = get_doubles(is, count);
  expect_end(is, "PLCT");
  try {
    return DenseTensor(std::move(dims), std::move(data));
  } catch (const NumericalError& e) {
    throw FormatError(std::string("PLCT: ") + e.what());
  }
}

void write_tensor_file(const std::filesystem::path& path, const DenseTensor& t) {
  auto os = open_out(path);
  write_tensor(os, t);
  if (!os) throw Error("failed writing " + path.string());
}

DenseTensor read_tensor_file(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_tensor(is);
}

const Matrix& ModelFile::get(const std::string& name) const {
  for (const auto& [n, m] : matrices)
    if (n == name) return m;
  throw FormatError("PLCM: missing matrix \"" + name + "\"");
}

ModelFile make_model_file(const KruskalModel& model, const Matrix& w_tilde) {
  model.validate();
  ModelFile f;
  f.rank = model.rank();
  f.matrices.emplace_back("W", model.weights);
  f.matrices.emplace_back("Wt", w_tilde);
  for (std::size_t k = 0; k < model.factors.size(); ++k) f.matrices.emplace_back(factor_name(k), model.factors[k]);
  return f;
}

std::pair<KruskalModel, Matrix> split_model_file(const ModelFile& f) {
  KruskalModel m;
  m.weights = f.get("W");
  Matrix wt = f.get("Wt");
  for (std::size_t k = 0;; ++k) {
    const auto name = factor_name(k);
    bool found = false;
    for (const auto& [n, mat] : f.matrices) {
      if (n == name) {
        m.factors.push_back(mat);
        found = true;
      }
    }
    if (!found) break;
  }
  try {
    m.validate();
  } catch (const DimensionError& e) {
    throw FormatError(std::string("PLCM: ") + e.what());
  }
  if (m.rank() != f.rank || wt.rows() != m.weights.rows() || wt.cols() != m.weights.cols()) {
    throw FormatError("PLCM: matrix shapes inconsistent with rank");
  }
  return {std::move(m), std::move(wt)};
}

void write_model(std::ostream& os, const ModelFile& m) {
  os.write(kModelMagic.data(), kModelMagic.size());
  put_le<std::uint32_t>(os, kFormatVersion);
  put_le<std::uint64_t>(os, m.rank);
  put_le<std::uint32_t>(os, std::uint32_t(m.matrices.size()));
  for (const auto& [name, mat] : m.matrices) {
    put_le<std::uint32_t>(os, std::uint32_t(name.size()));
    os.write(name.data(), std::streamsize(name.size()));
    put_le<std::uint64_t>(os, mat.rows());
    put_le<std::uint64_t>(os, mat.cols());
    put_doubles(os, mat.data());
  }
}

ModelFile read_model(std::istream& is) {
  expect_magic(is, kModelMagic, "PLCM");
  ModelFile m;
  m.rank = get_le<std::uint64_t>(is, "rank");
  const auto count = get_le<std::uint32_t>(is, "matrix count");
  if (count > 1024) throw FormatError("PLCM: implausible matrix count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get_le<std::uint32_t>(is, "name length");
    if (len > 4096) throw FormatError("PLCM: implausible name length");
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw FormatError("truncated file while reading name");
    const auto rows = get_le<std::uint64_t>(is, "rows");
    const auto cols = get_le<std::uint64_t>(is, "cols");
    auto data = get_doubles(is, checked_product(rows, cols));
    m.matrices.emplace_back(std::move(name), Matrix(std::size_t(rows), std::size_t(cols), std::move(data)));
  }
  expect_end(is, "PLCM");
  return m;
}

void write_model_file(const std::filesystem::path& path, const ModelFile& m) {
  auto os = open_out(path);
  write_model(os, m);
  if (!os) throw Error("failed writing " + path.string());
}

ModelFile read_model_file(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_model(is);
}

void write_labels_file(const std::filesystem::path& path, const Labels& labels) {
  auto os = open_out(path);
  for (int l : labels) os << l << '\n';
  if (!os) throw Error("failed writing " + path.string());
}

Labels read_labels_file(const std::filesystem::path& path) {
  auto is = open_in(path);
  Labels out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw FormatError("labels: line " + std::to_string(lineno) + " is not an integer");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace plc
