#include "comic/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <Eigen/Dense>
#include <json.hpp>

#include "comic/error.hpp"

namespace comic {

namespace {

void check_finite(std::span<const float> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw ContractError("non-finite raster value at index " + std::to_string(i));
    }
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string payload_extension(const std::string& dtype) {
  if (dtype == "f32le") return ".f32";
  if (dtype == "u32le") return ".u32";
  if (dtype == "u8") return ".u8";
  throw ContractError("unknown dtype '" + dtype + "'");
}

std::size_t dtype_size(const std::string& dtype) {
  if (dtype == "f32le" || dtype == "u32le") return 4;
  if (dtype == "u8") return 1;
  throw ContractError("unknown dtype '" + dtype + "'");
}

void put_u32le(std::uint8_t* out, std::uint32_t v) {
  out[0] = static_cast<std::uint8_t>(v & 0xFFu);
  out[1] = static_cast<std::uint8_t>((v >> 8) & 0xFFu);
  out[2] = static_cast<std::uint8_t>((v >> 16) & 0xFFu);
  out[3] = static_cast<std::uint8_t>((v >> 24) & 0xFFu);
}

std::uint32_t get_u32le(const std::uint8_t* in) {
  return static_cast<std::uint32_t>(in[0]) | (static_cast<std::uint32_t>(in[1]) << 8) |
         (static_cast<std::uint32_t>(in[2]) << 16) | (static_cast<std::uint32_t>(in[3]) << 24);
}

}  // namespace

Raster::Raster(std::size_t height, std::size_t width, std::size_t channels)
    : Raster(height, width, channels, std::vector<float>(height * width * channels, 0.0f)) {}

Raster::Raster(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  require(height >= 1 && width >= 1 && channels >= 1, "raster dimensions must be >= 1");
  require(data_.size() == height * width * channels, "raster payload length does not match M*N*C");
  check_finite(data_);
}

std::vector<float> Raster::channel(std::size_t c) const {
  require(c < channels_, "channel index out of range");
  std::vector<float> out(pixels());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = data_[p * channels_ + c];
  return out;
}

std::size_t BinaryMap::count_ones() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::uint8_t{1}));
}

// ---------------------------------------------------------------------------

std::filesystem::path container_base(const std::filesystem::path& path) {
  std::string s = path.string();
  for (const char* suffix : {".hdr.json", ".f32", ".u32", ".u8"}) {
    if (ends_with(s, suffix)) return s.substr(0, s.size() - std::strlen(suffix));
  }
  return path;
}

std::filesystem::path header_path(const std::filesystem::path& base) {
  return container_base(base).string() + ".hdr.json";
}

std::filesystem::path payload_path(const std::filesystem::path& base, const std::string& dtype) {
  return container_base(base).string() + payload_extension(dtype);
}

void write_container(const std::filesystem::path& path, const ContainerHeader& header,
                     std::span<const std::uint8_t> payload) {
  require(payload.size() == header.m * header.n * header.c * dtype_size(header.dtype),
          "payload size does not match header");
  nlohmann::ordered_json j;
  j["m"] = header.m;
  j["n"] = header.n;
  j["c"] = header.c;
  j["dtype"] = header.dtype;
  j["layout"] = header.layout;

  const auto hdr = header_path(path);
  std::ofstream h(hdr);
  if (!h) throw IoError("cannot write " + hdr.string());
  h << j.dump() << '\n';
  if (!h) throw IoError("write failed: " + hdr.string());

  const auto bin = payload_path(path, header.dtype);
  std::ofstream b(bin, std::ios::binary);
  if (!b) throw IoError("cannot write " + bin.string());
  b.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!b) throw IoError("write failed: " + bin.string());
}

std::vector<std::uint8_t> read_container(const std::filesystem::path& path, ContainerHeader& header) {
  const auto hdr = header_path(path);
  std::ifstream h(hdr);
  if (!h) throw IoError("cannot open " + hdr.string());
  nlohmann::json j;
  try {
    h >> j;
    header.m = j.at("m").get<std::size_t>();
    header.n = j.at("n").get<std::size_t>();
    header.c = j.at("c").get<std::size_t>();
    header.dtype = j.at("dtype").get<std::string>();
    header.layout = j.value("layout", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ContractError("malformed header " + hdr.string() + ": " + e.what());
  }

  const auto bin = payload_path(path, header.dtype);
  std::ifstream b(bin, std::ios::binary);
  if (!b) throw IoError("cannot open " + bin.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  const std::size_t expected = header.m * header.n * header.c * dtype_size(header.dtype);
  if (bytes.size() != expected) {
    throw ContractError("payload " + bin.string() + " has " + std::to_string(bytes.size()) +
                        " bytes, header implies " + std::to_string(expected));
  }
  return bytes;
}

Raster load_raster(const std::filesystem::path& path) {
  ContainerHeader header;
  auto bytes = read_container(path, header);
  require(header.dtype == "f32le", "raster dtype must be f32le, got " + header.dtype);
  std::vector<float> data(header.m * header.n * header.c);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_u32le(bytes.data() + 4 * i));
  }
  return Raster(header.m, header.n, header.c, std::move(data));
}

void save_raster(const Raster& raster, const std::filesystem::path& path) {
  auto values = raster.data();
  std::vector<std::uint8_t> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    put_u32le(bytes.data() + 4 * i, std::bit_cast<std::uint32_t>(values[i]));
  }
  write_container(path, {raster.height(), raster.width(), raster.channels(), "f32le", "row-major-bip"}, bytes);
}

BinaryMap load_binary_map(const std::filesystem::path& path) {
  ContainerHeader header;
  auto bytes = read_container(path, header);
  require(header.dtype == "u8" && header.c == 1, "binary map must be a single-channel u8 container");
  BinaryMap map(header.m, header.n);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    require(bytes[i] <= 1, "binary map value outside {0,1}");
    map.values[i] = bytes[i];
  }
  return map;
}

void save_binary_map(const BinaryMap& map, const std::filesystem::path& path) {
  write_container(path, {map.height, map.width, 1, "u8", "row-major"}, map.values);
}

// ---------------------------------------------------------------------------

PcaBasis fit_pca(const Raster& raster, std::size_t k) {
  const std::size_t channels = raster.channels();
  const std::size_t count = raster.pixels();
  require(k >= 1 && k <= channels, "PCA component count must be in [1, C]");
  require(count >= 2, "PCA needs at least two pixels");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(channels));
  for (std::size_t p = 0; p < count; ++p) {
    auto px = raster.pixel(p);
    for (std::size_t c = 0; c < channels; ++c) mean[static_cast<Eigen::Index>(c)] += px[c];
  }
  mean /= static_cast<double>(count);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(channels));
  Eigen::VectorXd centred(static_cast<Eigen::Index>(channels));
  for (std::size_t p = 0; p < count; ++p) {
    auto px = raster.pixel(p);
    for (std::size_t c = 0; c < channels; ++c) {
      centred[static_cast<Eigen::Index>(c)] = px[c] - mean[static_cast<Eigen::Index>(c)];
    }
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centred);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(count - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericalError("PCA eigendecomposition failed");

  PcaBasis basis;
  basis.input_channels = channels;
  basis.components = k;
  basis.mean.assign(mean.data(), mean.data() + channels);
  basis.total_variance = cov.trace();
  basis.loadings.assign(channels * k, 0.0);
  // Eigen returns ascending eigenvalues.
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = static_cast<Eigen::Index>(channels - 1 - j);
    Eigen::VectorXd v = solver.eigenvectors().col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    for (std::size_t c = 0; c < channels; ++c) basis.loadings[c * k + j] = v[static_cast<Eigen::Index>(c)];
    basis.explained_variance.push_back(std::max(0.0, solver.eigenvalues()[col]));
  }
  return basis;
}

Raster apply_pca(const Raster& raster, const PcaBasis& basis) {
  require(raster.channels() == basis.input_channels, "PCA basis channel count does not match raster");
  const std::size_t k = basis.components;
  std::vector<float> out(raster.pixels() * k);
  for (std::size_t p = 0; p < raster.pixels(); ++p) {
    auto px = raster.pixel(p);
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < basis.input_channels; ++c) s += (px[c] - basis.mean[c]) * basis.loading(c, j);
      out[p * k + j] = static_cast<float>(s);
    }
  }
  return Raster(raster.height(), raster.width(), k, std::move(out));
}

Raster pca_reduce(const Raster& raster, std::size_t k) { return apply_pca(raster, fit_pca(raster, k)); }

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> scale_to_gray(std::span<const double> values) {
  std::vector<std::uint8_t> out(values.size(), 0);
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::clamp(std::round(255.0 * (values[i] - lo) / range), 0.0, 255.0));
  }
  return out;
}

void export_graymap(std::span<const double> values, std::size_t height, std::size_t width,
                    const std::filesystem::path& path) {
  require(values.size() == height * width, "gray map size does not match dimensions");
  const auto gray = scale_to_gray(values);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace comic
