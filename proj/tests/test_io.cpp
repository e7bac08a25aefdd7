#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "hfscat/config.hpp"
#include "hfscat/errors.hpp"
#include "hfscat/io.hpp"

using namespace hfscat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hfscat_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("sha256 known digests") {
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("number formatting") {
  CHECK(io::fmt(0.1) == "0.10000000000000001");
  CHECK(io::fmt(1.0) == "1");
  CHECK(std::stod(io::fmt(M_PI)) == M_PI);
}

TEST_CASE("templates parse and round trip") {
  for (const char* name : {"rh", "hartree", "hf"}) {
    const RunConfig c = parse_config(config_template(name));
    const RunConfig d = parse_config(to_json(c));
    CHECK(to_json(c) == to_json(d));
    CHECK(config_hash(c) == config_hash(d));
    CHECK(config_hash(c).size() == 64);
  }
  const RunConfig h = parse_config(config_template("hf"));
  CHECK(h.model == Model::hartree_fock);
  CHECK(h.kernel.kind == KernelKind::HF);
  CHECK(h.probes.size() == 2);
  CHECK_THROWS_AS(config_template("dft"), InvalidInput);
}

TEST_CASE("config hash") {
  RunConfig c = parse_config(config_template("rh"));
  const std::string h = config_hash(c);
  c.threads = 4;
  CHECK(config_hash(c) == h);
  c.seed += 1;
  CHECK(config_hash(c) != h);
}

TEST_CASE("schema errors carry the field path") {
  json j = config_template("rh");
  j["grid"].erase("M");
  CHECK(error_of(j) == "grid.M: missing required field");

  j = config_template("rh");
  j["grid"]["M"] = 101;
  CHECK(error_of(j) == "grid.M: must be a power of two >= 16");

  j = config_template("rh");
  j["kernel"]["xi"]["mx"] = 3.0;
  CHECK(error_of(j) == "kernel.xi.mx: unknown field");

  j = config_template("rh");
  j["probes"][0]["band_radius"] = "2";
  CHECK(error_of(j) == "probes[0].band_radius: expected a number");

  j = config_template("rh");
  j["probes"][0]["center"] = {0.0, 1.0};
  CHECK(error_of(j) == "probes[0].center: length must equal grid.n");

  j = config_template("rh");
  j["model"] = "dft";
  CHECK(error_of(j) == "model: expected one of rh, hartree, hf");

  j = config_template("rh");
  j["inversion"]["regularization"] = "lasso";
  CHECK(error_of(j).rfind("inversion.regularization:", 0) == 0);

  j = config_template("rh");
  j["seed"] = -1;
  CHECK(error_of(j) == "seed: expected a non-negative integer");

  CHECK(error_of(json::array()) == "config: expected an object");
}

TEST_CASE("field round trip is bit exact") {
  const fs::path dir = scratch("field");
  const Grid g = make_grid(2, 16, 3.0);
  Field f = zero_field(g, Representation::frequency, "probe");
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = cplx(std::sin(1.0 + i), 1.0 / (3.0 + i));
  io::write_field(dir / "f", f, "abc");
  const Field r = io::read_field(dir / "f");
  CHECK(r.grid.dim == 2);
  CHECK(r.grid.points_per_axis == 16);
  CHECK(r.representation == Representation::frequency);
  CHECK(r.label == "probe");
  CHECK((r.values == f.values).all());

  std::string blob = io::read_text(dir / "f.bin");
  blob[5] ^= 1;
  io::write_text(dir / "f.bin", blob);
  CHECK_THROWS_AS(io::read_field(dir / "f"), InvalidInput);
  fs::remove_all(dir);
}

TEST_CASE("kernel round trip") {
  const fs::path dir = scratch("kernel");
  const Grid g = make_grid(1, 64, 16.0);
  KernelMatrix k;
  k.kind = KernelKind::H;
  k.orbital = 1;
  k.convention = "test";
  k.lambda = make_lambda_grid(0.0, 1.0, 3);
  k.xi = radial_shells(g, 0.5, 2.0);
  k.entries = Eigen::MatrixXd::Random(3, static_cast<Eigen::Index>(k.xi.size()));
  k.row_source = {"recomputed", "recomputed", "scaled"};
  k.row_step = {0.1, 0.1, 0.2};
  k.row_window = {8, 8, 16};
  k.lipschitz = 0.25;
  io::write_kernel(dir / "k", k, g, json{{"note", "x"}}, "abc");
  Grid gr;
  const KernelMatrix r = io::read_kernel(dir / "k", &gr);
  CHECK(r.kind == KernelKind::H);
  CHECK(r.orbital == 1);
  CHECK(r.entries == k.entries);
  CHECK(r.xi.radii == k.xi.radii);
  CHECK(r.xi.members == k.xi.members);
  CHECK(r.lambda.nodes == k.lambda.nodes);
  CHECK(r.row_source == k.row_source);
  CHECK(r.lipschitz == 0.25);
  CHECK(gr.half_extent == 16.0);
  fs::remove_all(dir);
}

TEST_CASE("manifest lists every file with its hash") {
  const fs::path dir = scratch("manifest");
  io::write_text(dir / "b.txt", "abc");
  io::write_text(dir / "a" / "c.txt", "");
  io::write_manifest(dir, "h", "test");
  const json m = json::parse(io::read_text(dir / "manifest.json"));
  REQUIRE(m["files"].size() == 2);
  CHECK(m["files"][0]["path"] == "a/c.txt");
  CHECK(m["files"][0]["sha256"] == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(m["files"][1]["path"] == "b.txt");
  CHECK(m["config_hash"] == "h");
  io::write_manifest(dir, "h", "test");
  CHECK(json::parse(io::read_text(dir / "manifest.json"))["files"].size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("csv") {
  io::Csv c({"x", "y"}, "h");
  c.row(std::vector<double>{0.5, 1e-20});
  c.row(std::vector<std::string>{"a", "b"});
  CHECK(c.str() == "# config_hash=h\nx,y\n0.5,9.9999999999999995e-21\na,b\n");
}
