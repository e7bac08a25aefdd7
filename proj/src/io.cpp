#include "hfscat/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "hfscat/errors.hpp"

namespace hfscat::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const fs::path& p) { return sha256_hex(read_text(p)); }

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw InvalidInput("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace {

fs::path with_ext(const fs::path& base, const char* ext) { return fs::path(base.string() + ext); }

json grid_json(const Grid& g) { return {{"n", g.dim}, {"M", g.points_per_axis}, {"L", g.half_extent}}; }

Grid grid_from(const json& j) { return make_grid(j.at("n").get<int>(), j.at("M").get<int>(), j.at("L").get<double>()); }

template <typename T>
std::string bytes_of(const T* data, std::size_t count) {
  return std::string(reinterpret_cast<const char*>(data), count * sizeof(T));
}

json parse_json(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::exception& e) {
    throw InvalidInput(p.string() + ": " + e.what());
  }
}

}  // namespace

void write_field(const fs::path& base, const Field& f, const std::string& config_hash) {
  const std::string blob = bytes_of(reinterpret_cast<const double*>(f.values.data()), 2 * f.values.size());
  write_text(with_ext(base, ".bin"), blob);
  json h = {{"format", "field"},
            {"grid", grid_json(f.grid)},
            {"representation", f.representation == Representation::position ? "position" : "frequency"},
            {"label", f.label},
            {"count", f.values.size()},
            {"layout", "little-endian float64, interleaved re/im, last axis fastest"},
            {"sha256", sha256_hex(blob)},
            {"config_hash", config_hash}};
  write_text(with_ext(base, ".json"), h.dump(2) + "\n");
}

Field read_field(const fs::path& base) {
  const json h = parse_json(with_ext(base, ".json"));
  const std::string blob = read_text(with_ext(base, ".bin"));
  if (sha256_hex(blob) != h.at("sha256").get<std::string>()) throw InvalidInput(base.string() + ": hash mismatch");
  Field f;
  f.grid = grid_from(h.at("grid"));
  f.representation = h.at("representation") == "position" ? Representation::position : Representation::frequency;
  f.label = h.value("label", "");
  const Eigen::Index n = h.at("count").get<Eigen::Index>();
  if (n != f.grid.size() || blob.size() != static_cast<std::size_t>(n) * 16)
    throw InvalidInput(base.string() + ": size does not match the grid");
  f.values.resize(n);
  std::memcpy(f.values.data(), blob.data(), blob.size());
  return f;
}

void write_kernel(const fs::path& base, const KernelMatrix& k, const Grid& g, const json& provenance,
                  const std::string& config_hash) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = k.entries;
  const std::string blob = bytes_of(rm.data(), rm.size());
  write_text(with_ext(base, ".bin"), blob);
  json members = json::array();
  for (const auto& m : k.xi.members) members.push_back(m);
  json h = {{"format", "kernel"},
            {"kind", kernel_kind_name(k.kind)},
            {"orbital", k.orbital},
            {"convention", k.convention},
            {"grid", grid_json(g)},
            {"rows", k.entries.rows()},
            {"cols", k.entries.cols()},
            {"layout", "little-endian float64, row-major, rows = lambda nodes"},
            {"lambda", std::vector<double>(k.lambda.nodes.data(), k.lambda.nodes.data() + k.lambda.nodes.size())},
            {"lambda_weights",
             std::vector<double>(k.lambda.weights.data(), k.lambda.weights.data() + k.lambda.weights.size())},
            {"xi", k.xi.radii},
            {"xi_weights", k.xi.weights},
            {"xi_members", members},
            {"dropped_radii", k.dropped_radii},
            {"row_source", k.row_source},
            {"row_step", k.row_step},
            {"row_window", k.row_window},
            {"max_imag_residue", k.max_imag_residue},
            {"lipschitz", k.lipschitz},
            {"provenance", provenance},
            {"sha256", sha256_hex(blob)},
            {"config_hash", config_hash}};
  write_text(with_ext(base, ".json"), h.dump(2) + "\n");
}

KernelMatrix read_kernel(const fs::path& base, Grid* grid) {
  const json h = parse_json(with_ext(base, ".json"));
  const std::string blob = read_text(with_ext(base, ".bin"));
  if (sha256_hex(blob) != h.at("sha256").get<std::string>()) throw InvalidInput(base.string() + ": hash mismatch");
  KernelMatrix k;
  const std::string kind = h.at("kind");
  k.kind = kind == "G" ? KernelKind::G : kind == "H" ? KernelKind::H : KernelKind::HF;
  k.orbital = h.at("orbital");
  k.convention = h.at("convention");
  const auto lam = h.at("lambda").get<std::vector<double>>();
  const auto lw = h.at("lambda_weights").get<std::vector<double>>();
  k.lambda.nodes = Eigen::Map<const Eigen::VectorXd>(lam.data(), static_cast<Eigen::Index>(lam.size()));
  k.lambda.weights = Eigen::Map<const Eigen::VectorXd>(lw.data(), static_cast<Eigen::Index>(lw.size()));
  k.xi.radii = h.at("xi").get<std::vector<double>>();
  k.xi.weights = h.at("xi_weights").get<std::vector<double>>();
  k.xi.members = h.at("xi_members").get<std::vector<std::vector<Eigen::Index>>>();
  k.dropped_radii = h.at("dropped_radii").get<std::vector<double>>();
  k.row_source = h.at("row_source").get<std::vector<std::string>>();
  k.row_step = h.at("row_step").get<std::vector<double>>();
  k.row_window = h.at("row_window").get<std::vector<double>>();
  k.max_imag_residue = h.at("max_imag_residue");
  k.lipschitz = h.at("lipschitz");
  const Eigen::Index rows = h.at("rows"), cols = h.at("cols");
  if (blob.size() != static_cast<std::size_t>(rows * cols) * 8 || rows != k.lambda.nodes.size() ||
      cols != static_cast<Eigen::Index>(k.xi.size()))
    throw InvalidInput(base.string() + ": shape mismatch");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  std::memcpy(rm.data(), blob.data(), blob.size());
  k.entries = rm;
  if (grid) *grid = grid_from(h.at("grid"));
  return k;
}

void write_checkpoint(const fs::path& dir, const OrbitalSet& s, Model m, const json& potential, double dt,
                      const std::string& config_hash) {
  json files = json::array();
  for (std::size_t k = 0; k < s.orbitals.size(); ++k) {
    const std::string name = "orbital_" + std::to_string(k);
    write_field(dir / name, s.orbitals[k], config_hash);
    files.push_back(name);
  }
  json h = {{"format", "checkpoint"}, {"model", model_name(m)}, {"potential", potential}, {"time", s.time},
            {"dt", dt},               {"orbitals", files},      {"config_hash", config_hash}};
  write_text(dir / "checkpoint.json", h.dump(2) + "\n");
}

OrbitalSet read_checkpoint(const fs::path& dir) {
  const json h = parse_json(dir / "checkpoint.json");
  OrbitalSet s;
  s.time = h.at("time");
  for (const auto& name : h.at("orbitals")) s.orbitals.push_back(read_field(dir / name.get<std::string>()));
  return s;
}

void write_manifest(const fs::path& root, const std::string& config_hash, const std::string& command) {
  std::vector<std::string> paths;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      paths.push_back(fs::relative(e.path(), root).generic_string());
  std::sort(paths.begin(), paths.end());
  json files = json::array();
  for (const auto& p : paths) files.push_back({{"path", p}, {"sha256", sha256_file(root / p)}});
  json m = {{"config_hash", config_hash}, {"last_command", command}, {"files", files}};
  write_text(root / "manifest.json", m.dump(2) + "\n");
}

Csv::Csv(const std::vector<std::string>& header, const std::string& config_hash) {
  out_ = "# config_hash=" + config_hash + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out_ += (i ? "," : "") + header[i];
  out_ += "\n";
}

void Csv::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out_ += (i ? "," : "") + fmt(values[i]);
  out_ += "\n";
}

void Csv::row(const std::vector<std::string>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out_ += (i ? "," : "") + values[i];
  out_ += "\n";
}

}  // namespace hfscat::io
