#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfscat/dynamics.hpp"
#include "hfscat/kernels.hpp"

namespace hfscat::io {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& p);

// 17 significant digits.
std::string fmt(double x);

void write_text(const fs::path& p, const std::string& s);
std::string read_text(const fs::path& p);

// base.bin: little-endian interleaved (re, im) doubles; base.json: grid, representation, label, hash.
void write_field(const fs::path& base, const Field& f, const std::string& config_hash);
Field read_field(const fs::path& base);

// base.bin: row-major real64 entries; base.json: grids, weights, shells, quadrature record.
void write_kernel(const fs::path& base, const KernelMatrix& k, const Grid& g, const nlohmann::json& provenance,
                  const std::string& config_hash);
KernelMatrix read_kernel(const fs::path& base, Grid* grid = nullptr);

// dir/orbital_<k>.{bin,json} plus dir/checkpoint.json with model, potential, time, dt.
void write_checkpoint(const fs::path& dir, const OrbitalSet& s, Model m, const nlohmann::json& potential, double dt,
                      const std::string& config_hash);
OrbitalSet read_checkpoint(const fs::path& dir);

// Every regular file under root except manifest.json, with sha256, sorted by path.
void write_manifest(const fs::path& root, const std::string& config_hash, const std::string& command);

class Csv {
 public:
  Csv(const std::vector<std::string>& header, const std::string& config_hash);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& values);
  std::string str() const { return out_; }

 private:
  std::string out_;
};

}  // namespace hfscat::io
