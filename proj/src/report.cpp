#include <cmath>
#include <cstdio>
#include <sstream>

#include "hfscat/errors.hpp"
#include "hfscat/io.hpp"
#include "hfscat/pipeline.hpp"

namespace hfscat {

namespace fs = std::filesystem;

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) {
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
      }
    throw InvalidInput("missing column " + name);
  }
};

Table read_csv(const fs::path& p) {
  std::istringstream in(io::read_text(p));
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    std::vector<double> row;
    for (const auto& s : cells) row.push_back(std::strtod(s.c_str(), nullptr));
    t.rows.push_back(row);
  }
  return t;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Series {
  std::string label;
  std::vector<double> x, y;
};

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::vector<Series>& series, bool logx,
                     bool logy) {
  const double w = 640, h = 420, l = 70, r = 150, t = 40, b = 50;
  auto tx = [&](double v) { return logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return logy ? std::log10(v) : v; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((logx && !(s.x[i] > 0)) || (logy && !(s.y[i] > 0))) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double v) { return l + (tx(v) - x0) / (x1 - x0) * (w - l - r); };
  auto py = [&](double v) { return h - b - (ty(v) - y0) / (y1 - y0) * (h - t - b); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";
  s += "<rect x=\"" + num(l) + "\" y=\"" + num(t) + "\" width=\"" + num(w - l - r) + "\" height=\"" + num(h - t - b) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4, fy = y0 + (y1 - y0) * k / 4;
    const double sx = l + (w - l - r) * k / 4, sy = h - b - (h - t - b) * k / 4;
    s += "<text x=\"" + num(sx) + "\" y=\"" + num(h - b + 16) + "\" text-anchor=\"middle\" font-size=\"11\">" +
         num(logx ? std::pow(10, fx) : fx) + "</text>\n";
    s += "<text x=\"" + num(l - 6) + "\" y=\"" + num(sy + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
         num(logy ? std::pow(10, fy) : fy) + "</text>\n";
  }
  s += "<text x=\"" + num(l + (w - l - r) / 2) + "\" y=\"" + num(h - 10) + "\" text-anchor=\"middle\" font-size=\"12\">" +
       xlabel + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* col = colors[k % 4];
    std::string pts;
    for (std::size_t i = 0; i < series[k].x.size(); ++i) {
      if ((logx && !(series[k].x[i] > 0)) || (logy && !(series[k].y[i] > 0))) continue;
      pts += num(px(series[k].x[i])) + "," + num(py(series[k].y[i])) + " ";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    s += "<text x=\"" + num(w - r + 10) + "\" y=\"" + num(t + 16 + 18 * k) + "\" font-size=\"12\" fill=\"" + col + "\">" +
         series[k].label + "</text>\n";
  }
  return s + "</svg>\n";
}

std::vector<double> abs_of(std::vector<double> v) {
  for (auto& x : v) x = std::abs(x);
  return v;
}

}  // namespace

void run_report(const RunConfig& c, const fs::path& out) {
  std::vector<std::string> made;
  if (fs::exists(out / "velocity_sweep.csv")) {
    const Table t = read_csv(out / "velocity_sweep.csv");
    const auto v = t.column("speed");
    io::write_text(out / "pairing_vs_v.svg",
                   svg_plot("pairing vs |v|", "|v|", {{"Re pairing", v, t.column("pairing_re")}}, false, false));
    io::write_text(out / "remainder_vs_v.svg",
                   svg_plot("|pairing - reference| vs |v|", "|v|", {{"remainder", v, t.column("remainder")}}, true, true));
    made.insert(made.end(), {"pairing_vs_v.svg", "remainder_vs_v.svg"});
  }
  if (fs::exists(out / "picard.csv")) {
    const Table t = read_csv(out / "picard.csv");
    const auto n = t.column("n");
    io::write_text(out / "picard.svg",
                   svg_plot("Picard plot", "n",
                            {{"mu_n", n, t.column("mu")},
                             {"|<P,g_n>|", n, abs_of(t.column("coefficient"))},
                             {"|ratio|", n, abs_of(t.column("ratio"))}},
                            false, true));
    made.push_back("picard.svg");
  }
  if (fs::exists(out / "reconstruction.csv")) {
    const Table t = read_csv(out / "reconstruction.csv");
    const auto x = t.column("xi");
    io::write_text(out / "v_hat.svg",
                   svg_plot("V_hat true vs estimate", "|xi|",
                            {{"true", x, t.column("v_hat_true")}, {"estimate", x, t.column("v_hat_est")}}, false, false));
    made.push_back("v_hat.svg");
  }
  if (made.empty()) throw InvalidInput("report: no sweep, Picard or reconstruction tables in " + out.string());
  const nlohmann::json j = {{"format", "report"}, {"figures", made}, {"config_hash", config_hash(c)}};
  io::write_text(out / "report.json", j.dump(2) + "\n");
  io::write_manifest(out, config_hash(c), "report");
}

}  // namespace hfscat
