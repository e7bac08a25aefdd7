#include <CLI11.hpp>
#include <iostream>

#include "hfscat/config.hpp"
#include "hfscat/errors.hpp"
#include "hfscat/io.hpp"
#include "hfscat/pipeline.hpp"
#include "hfscat/validation.hpp"

using namespace hfscat;
namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config, out = "out", suite = "all", reg, templ = "rh";
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

RunConfig load(const Flags& f) {
  if (f.config.empty()) throw InvalidInput("--config is required");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_text(f.config));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(f.config + ": " + e.what());
  }
  RunConfig c = parse_config(j);
  if (f.threads > 0) c.threads = c.kernel.time.threads = f.threads;
  if (f.seed_set) c.seed = f.seed;
  return c;
}

void save_config(const RunConfig& c, const fs::path& out) {
  nlohmann::json j = to_json(c);
  j.erase("threads");
  io::write_text(out / "config.json", j.dump(2) + "\n");
}

int validate(const Flags& f) {
  bool ok = true;
  nlohmann::json all = nlohmann::json::array();
  for (int id : suite_criteria(f.suite)) {
    const CriterionReport r = run_criterion(id, fs::path(f.out) / "work");
    std::cout << summary_line(r) << std::endl;
    ok = ok && r.pass();
    all.push_back(to_json(r));
  }
  const nlohmann::json rep = {{"format", "validation"}, {"suite", f.suite}, {"pass", ok}, {"criteria", all}};
  io::write_text(fs::path(f.out) / ("validate_" + f.suite + ".json"), rep.dump(2) + "\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hartree / Hartree-Fock scattering data, kernels and potential reconstruction"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* s) {
    s->add_option("--config", f.config, "JSON run configuration")->required();
    s->add_option("--out", f.out, "output directory");
    s->add_option("--threads", f.threads, "worker threads");
    s->add_option("--seed", f.seed, "noise seed")->each([&](const std::string&) { f.seed_set = true; });
  };
  auto* gen = app.add_subcommand("gen-config", "print a template configuration");
  gen->add_option("--template", f.templ, "rh | hartree | hf");
  gen->add_option("--out", f.out, "write <out>/config.json instead of printing");
  auto* fwd = app.add_subcommand("forward", "scattering pairings over the lambda grid");
  auto* sweep = app.add_subcommand("pairing-sweep", "high-velocity and small-amplitude sweeps");
  auto* ker = app.add_subcommand("kernel", "assemble the kernel matrix");
  auto* inv = app.add_subcommand("invert", "reconstruct V_hat from kernel and data in --out");
  inv->add_option("--reg", f.reg, "tsvd[:k] | discrepancy[:tau] | tikhonov:alpha");
  auto* uni = app.add_subcommand("uniqueness", "disjoint-band localization and distinguish");
  auto* rep = app.add_subcommand("report", "SVG figures from the tables in --out");
  for (auto* s : {fwd, sweep, ker, inv, uni, rep}) common(s);
  auto* val = app.add_subcommand("validate", "run the validation suites");
  val->add_option("--suite", f.suite, "propagator|dynamics|scattering|kernels|inversion|uniqueness|all");
  val->add_option("--out", f.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      const std::string text = config_template(f.templ).dump(2) + "\n";
      if (gen->count("--out"))
        io::write_text(fs::path(f.out) / "config.json", text);
      else
        std::cout << text;
      return 0;
    }
    if (val->parsed()) return validate(f);
    const RunConfig c = load(f);
    const fs::path out = f.out;
    fs::create_directories(out);
    save_config(c, out);
    if (fwd->parsed()) run_forward(c, out);
    if (sweep->parsed()) run_pairing_sweep(c, out);
    if (ker->parsed()) run_kernel(c, out);
    if (inv->parsed()) run_invert(c, out, f.reg);
    if (uni->parsed()) run_uniqueness(c, out);
    if (rep->parsed()) run_report(c, out);
    return 0;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const GeometryInfeasible& e) {
    std::cerr << "infeasible geometry: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
