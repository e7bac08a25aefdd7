#include "hfscat/config.hpp"

#include <exception>
#include <set>

#include "hfscat/errors.hpp"
#include "hfscat/inversion.hpp"
#include "hfscat/io.hpp"

namespace hfscat {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw InvalidInput(path + ": " + what); }

const json* find(const json& j, const std::string& key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Object reader that rejects unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) { expect_object(j, path_.empty() ? "config" : path_); }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(sub(k), "unknown field");
  }
  std::string sub(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  const json* get(const std::string& k) {
    seen_.insert(k);
    return find(j_, k);
  }
  const json& need(const std::string& k) {
    const json* v = get(k);
    if (!v) fail(sub(k), "missing required field");
    return *v;
  }
  void opt(const std::string& k, double& out) {
    if (const json* v = get(k)) out = number(*v, sub(k));
  }
  void opt(const std::string& k, int& out) {
    if (const json* v = get(k)) out = integer(*v, sub(k));
  }
  void opt(const std::string& k, bool& out) {
    if (const json* v = get(k)) out = boolean(*v, sub(k));
  }
  void opt(const std::string& k, std::string& out) {
    if (const json* v = get(k)) out = string(*v, sub(k));
  }
  void opt(const std::string& k, std::vector<double>& out) {
    if (const json* v = get(k)) out = numbers(*v, sub(k));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void positive(double x, const std::string& path) {
  if (!(x > 0)) fail(path, "must be positive");
}

Eigen::VectorXd vector_of(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> std_of(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

KernelKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "G") return KernelKind::G;
  if (s == "H") return KernelKind::H;
  if (s == "HF") return KernelKind::HF;
  fail(path, "expected one of G, H, HF");
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  Reader top(j, "");
  if (const json* v = top.get("schema_version"))
    if (integer(*v, "schema_version") != schema_version) fail("schema_version", "unsupported version");
  const std::string model = string(top.need("model"), "model");
  try {
    c.model = parse_model(model);
  } catch (const InvalidInput&) {
    fail("model", "expected one of rh, hartree, hf");
  }

  {
    Reader g(top.need("grid"), "grid");
    c.dim = integer(g.need("n"), "grid.n");
    c.points = integer(g.need("M"), "grid.M");
    c.half_extent = number(g.need("L"), "grid.L");
    if (c.dim < 1 || c.dim > 3) fail("grid.n", "must be 1, 2 or 3");
    if (c.points < 16 || (c.points & (c.points - 1))) fail("grid.M", "must be a power of two >= 16");
    positive(c.half_extent, "grid.L");
  }

  {
    Reader p(top.need("potential"), "potential");
    std::string family = "gaussian";
    p.opt("family", family);
    if (family == "gaussian")
      c.potential.family = PotentialFamily::gaussian;
    else if (family == "regularized_power")
      c.potential.family = PotentialFamily::regularized_power;
    else if (family == "table")
      c.potential.family = PotentialFamily::table;
    else
      fail("potential.family", "expected gaussian, regularized_power or table");
    c.potential.amplitude = number(p.need("amplitude"), "potential.amplitude");
    if (c.potential.amplitude < 0) fail("potential.amplitude", "must be >= 0");
    p.opt("width", c.potential.width);
    p.opt("exponent", c.potential.exponent);
    p.opt("cutoff_radius", c.potential.cutoff_radius);
    p.opt("taper_width", c.potential.taper_width);
    p.opt("table_radii", c.potential.table_radii);
    p.opt("table_values", c.potential.table_values);
    if (const json* f = p.get("spectral_floor")) {
      const auto v = numbers(*f, "potential.spectral_floor");
      if (v.size() != 2 || v[0] < 0 || v[1] < v[0]) fail("potential.spectral_floor", "expected [low, high] with 0 <= low <= high");
      c.potential.spectral_floor_low = v[0];
      c.potential.spectral_floor_high = v[1];
    }
    if (const json* m = p.get("metadata")) {
      expect_object(*m, "potential.metadata");
      for (const auto& [k, v] : m->items()) c.potential.metadata[k] = number(v, "potential.metadata." + k);
    }
  }

  {
    const json& ps = top.need("probes");
    if (!ps.is_array() || ps.empty()) fail("probes", "expected a non-empty array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string path = "probes[" + std::to_string(i) + "]";
      Reader r(ps[i], path);
      ProbeSpec q;
      const auto center = numbers(r.need("center"), path + ".center");
      if (static_cast<int>(center.size()) != c.dim) fail(path + ".center", "length must equal grid.n");
      q.center = vector_of(center);
      q.band_radius = number(r.need("band_radius"), path + ".band_radius");
      positive(q.band_radius, path + ".band_radius");
      r.opt("smoothness_order", q.smoothness_order);
      r.opt("amplitude", q.amplitude);
      c.probes.push_back(q);
    }
  }

  if (const json* s = top.get("scattering")) {
    Reader r(*s, "scattering");
    r.opt("horizon", c.scattering.horizon);
    r.opt("dt", c.scattering.dt);
    r.opt("orbital", c.scattering.orbital);
    r.opt("velocities", c.scattering.velocities);
    r.opt("amplitudes", c.scattering.amplitudes);
    r.opt("norm_tol", c.scattering.norm_tol);
    r.opt("wrap_tol", c.scattering.wrap_tol);
    positive(c.scattering.horizon, "scattering.horizon");
    positive(c.scattering.dt, "scattering.dt");
    if (c.scattering.orbital < 0 || c.scattering.orbital >= static_cast<int>(c.probes.size()))
      fail("scattering.orbital", "out of range");
  }

  if (const json* k = top.get("kernel")) {
    Reader r(*k, "kernel");
    if (const json* v = r.get("kind")) c.kernel.kind = parse_kind(string(*v, "kernel.kind"), "kernel.kind");
    r.opt("orbital", c.kernel.orbital);
    if (c.kernel.orbital < 0 || c.kernel.orbital >= static_cast<int>(c.probes.size()))
      fail("kernel.orbital", "out of range");
    if (const json* l = r.get("lambda")) {
      Reader lr(*l, "kernel.lambda");
      lr.opt("min", c.kernel.lambda_min);
      lr.opt("max", c.kernel.lambda_max);
      lr.opt("count", c.kernel.lambda_count);
      if (c.kernel.lambda_count < 2) fail("kernel.lambda.count", "must be >= 2");
      if (!(c.kernel.lambda_max > c.kernel.lambda_min) || c.kernel.lambda_min < 0)
        fail("kernel.lambda", "need 0 <= min < max");
    }
    if (const json* x = r.get("xi")) {
      Reader xr(*x, "kernel.xi");
      xr.opt("min", c.kernel.xi_min);
      xr.opt("max", c.kernel.xi_max);
      if (!(c.kernel.xi_max > c.kernel.xi_min) || c.kernel.xi_min < 0) fail("kernel.xi", "need 0 <= min < max");
    }
    if (const json* t = r.get("time")) {
      Reader tr(*t, "kernel.time");
      auto& q = c.kernel.time;
      tr.opt("step", q.step);
      tr.opt("step_factor", q.step_factor);
      tr.opt("initial_window", q.initial_window);
      tr.opt("tail_tol", q.tail_tol);
      tr.opt("max_doublings", q.max_doublings);
      tr.opt("revival_fraction", q.revival_fraction);
      tr.opt("allow_scaling", q.allow_scaling);
      positive(q.step_factor, "kernel.time.step_factor");
      positive(q.initial_window, "kernel.time.initial_window");
      positive(q.tail_tol, "kernel.time.tail_tol");
    }
  }

  if (const json* i = top.get("inversion")) {
    Reader r(*i, "inversion");
    r.opt("rank_tol", c.inversion.rank_tol);
    r.opt("regularization", c.inversion.regularization);
    r.opt("noise_level", c.inversion.noise_level);
    positive(c.inversion.rank_tol, "inversion.rank_tol");
    if (c.inversion.noise_level < 0) fail("inversion.noise_level", "must be >= 0");
    try {
      parse_regularization(c.inversion.regularization);
    } catch (const InvalidInput& e) {
      fail("inversion.regularization", e.what());
    }
  }

  if (const json* u = top.get("uniqueness")) {
    Reader r(*u, "uniqueness");
    auto& w = c.uniqueness.window;
    r.opt("orbitals", w.orbitals);
    r.opt("reference", w.reference);
    r.opt("eps", w.eps);
    r.opt("delta", w.delta);
    r.opt("smoothness_order", w.smoothness_order);
    r.opt("t_samples", w.t_samples);
    r.opt("sweep_step", c.uniqueness.sweep_step);
    r.opt("sweep_reach", c.uniqueness.sweep_reach);
    r.opt("tol", c.uniqueness.tol);
    if (const json* p = r.get("perturbation")) {
      Reader pr(*p, "uniqueness.perturbation");
      auto& q = c.uniqueness.perturbation;
      pr.opt("center", q.center);
      pr.opt("width", q.width);
      pr.opt("amplitude", q.amplitude);
      pr.opt("scale", q.scale);
      positive(q.width, "uniqueness.perturbation.width");
    }
    positive(w.eps, "uniqueness.eps");
    positive(c.uniqueness.sweep_step, "uniqueness.sweep_step");
  }

  if (const json* s = top.get("seed")) {
    if (!s->is_number_integer() || s->get<long long>() < 0) fail("seed", "expected a non-negative integer");
    c.seed = s->get<std::uint64_t>();
  }
  top.opt("threads", c.threads);
  if (c.threads < 1) fail("threads", "must be >= 1");
  c.kernel.time.threads = c.threads;
  return c;
}

json to_json(const RunConfig& c) {
  json probes = json::array();
  for (const auto& q : c.probes)
    probes.push_back({{"center", std_of(q.center)},
                      {"band_radius", q.band_radius},
                      {"smoothness_order", q.smoothness_order},
                      {"amplitude", q.amplitude}});
  const auto& p = c.potential;
  json pot = {{"family", p.family == PotentialFamily::gaussian            ? "gaussian"
                         : p.family == PotentialFamily::regularized_power ? "regularized_power"
                                                                          : "table"},
              {"amplitude", p.amplitude},
              {"width", p.width},
              {"exponent", p.exponent},
              {"cutoff_radius", p.cutoff_radius},
              {"taper_width", p.taper_width},
              {"table_radii", p.table_radii},
              {"table_values", p.table_values},
              {"spectral_floor", {p.spectral_floor_low, p.spectral_floor_high}},
              {"metadata", p.metadata}};
  const auto& q = c.kernel.time;
  const auto& w = c.uniqueness.window;
  const auto& pt = c.uniqueness.perturbation;
  return {
      {"schema_version", schema_version},
      {"model", model_name(c.model)},
      {"grid", {{"n", c.dim}, {"M", c.points}, {"L", c.half_extent}}},
      {"potential", pot},
      {"probes", probes},
      {"scattering",
       {{"horizon", c.scattering.horizon},
        {"dt", c.scattering.dt},
        {"orbital", c.scattering.orbital},
        {"velocities", c.scattering.velocities},
        {"amplitudes", c.scattering.amplitudes},
        {"norm_tol", c.scattering.norm_tol},
        {"wrap_tol", c.scattering.wrap_tol}}},
      {"kernel",
       {{"kind", kernel_kind_name(c.kernel.kind)},
        {"orbital", c.kernel.orbital},
        {"lambda", {{"min", c.kernel.lambda_min}, {"max", c.kernel.lambda_max}, {"count", c.kernel.lambda_count}}},
        {"xi", {{"min", c.kernel.xi_min}, {"max", c.kernel.xi_max}}},
        {"time",
         {{"step", q.step},
          {"step_factor", q.step_factor},
          {"initial_window", q.initial_window},
          {"tail_tol", q.tail_tol},
          {"max_doublings", q.max_doublings},
          {"revival_fraction", q.revival_fraction},
          {"allow_scaling", q.allow_scaling}}}}},
      {"inversion",
       {{"rank_tol", c.inversion.rank_tol},
        {"regularization", c.inversion.regularization},
        {"noise_level", c.inversion.noise_level}}},
      {"uniqueness",
       {{"orbitals", w.orbitals},
        {"reference", w.reference},
        {"eps", w.eps},
        {"delta", w.delta},
        {"smoothness_order", w.smoothness_order},
        {"t_samples", w.t_samples},
        {"sweep_step", c.uniqueness.sweep_step},
        {"sweep_reach", c.uniqueness.sweep_reach},
        {"tol", c.uniqueness.tol},
        {"perturbation",
         {{"center", pt.center}, {"width", pt.width}, {"amplitude", pt.amplitude}, {"scale", pt.scale}}}}},
      {"seed", c.seed},
      {"threads", c.threads}};
}

std::string config_hash(const RunConfig& c) {
  json j = to_json(c);
  j.erase("threads");
  return io::sha256_hex(j.dump());
}

json config_template(const std::string& name) {
  json probe = {{"center", {0.0}}, {"band_radius", 2.0}, {"smoothness_order", 16}, {"amplitude", 1.0}};
  json j = {{"schema_version", schema_version},
            {"model", name},
            {"grid", {{"n", 1}, {"M", 1024}, {"L", 128.0}}},
            {"potential",
             {{"family", "gaussian"},
              {"amplitude", 0.005},
              {"width", 1.0},
              {"cutoff_radius", 8.0},
              {"taper_width", 4.0},
              {"spectral_floor", {0.4, 0.7}}}},
            {"probes", {probe}},
            {"scattering",
             {{"horizon", 24.0}, {"dt", 0.01}, {"orbital", 0}, {"velocities", json::array()}, {"amplitudes", json::array()}}},
            {"kernel",
             {{"kind", "G"},
              {"orbital", 0},
              {"lambda", {{"min", 0.0}, {"max", 1.0}, {"count", 33}}},
              {"xi", {{"min", 0.4}, {"max", 5.0}}}}},
            {"inversion", {{"rank_tol", 1e-10}, {"regularization", "discrepancy:1.1"}, {"noise_level", 0.0}}},
            {"uniqueness",
             {{"orbitals", 3},
              {"reference", 0},
              {"eps", 0.25},
              {"delta", 1.2},
              {"sweep_step", 0.5},
              {"sweep_reach", 5.0},
              {"tol", 1e-9},
              {"perturbation", {{"center", 3.0}, {"width", 0.2}, {"amplitude", 1e-3}, {"scale", 1.0}}}}},
            {"seed", 1},
            {"threads", 1}};
  if (name == "rh") return j;
  if (name == "hartree" || name == "hf") {
    j["probes"] = {probe, {{"center", {6.0}}, {"band_radius", 2.0}, {"smoothness_order", 16}, {"amplitude", 1.0}}};
    j["kernel"]["kind"] = name == "hf" ? "HF" : "H";
    return j;
  }
  throw InvalidInput("template: expected rh, hartree or hf");
}

}  // namespace hfscat
