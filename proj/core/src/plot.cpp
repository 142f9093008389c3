#include "proxis/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace proxis {

namespace fs = std::filesystem;

std::string to_string(PlotKind k) {
  switch (k) {
    case PlotKind::signal: return "signal";
    case PlotKind::median: return "median";
    case PlotKind::ci_width: return "ci-width";
    case PlotKind::sparsity_hist: return "sparsity-hist";
    case PlotKind::hyper_trace: return "hyper-trace";
  }
  return "unknown";
}

PlotKind parse_plot_kind(const std::string& name) {
  for (PlotKind k : {PlotKind::signal, PlotKind::median, PlotKind::ci_width, PlotKind::sparsity_hist,
                     PlotKind::hyper_trace}) {
    if (to_string(k) == name) return k;
  }
  throw PlotError("unknown plot '" + name +
                  "' (expected signal, median, ci-width, sparsity-hist or hyper-trace)");
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw PlotError("CSV has no column '" + name + "'");
  const auto j = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(j));
  return out;
}

CsvTable read_csv(const fs::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw PlotError("missing artifact " + path.string());
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (has_header && t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto r = std::from_chars(c.data(), c.data() + c.size(), v);
      if (r.ec != std::errc() || r.ptr != c.data() + c.size()) {
        // from_chars rejects "inf"/"nan" spellings written by some tools.
        if (c == "inf") {
          v = std::numeric_limits<double>::infinity();
        } else if (c == "nan") {
          v = std::numeric_limits<double>::quiet_NaN();
        } else {
          throw PlotError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
        }
      }
      row.push_back(v);
    }
    const std::size_t width = has_header ? t.header.size() : (t.rows.empty() ? row.size() : t.rows.front().size());
    if (row.size() != width) {
      throw PlotError(path.string() + ":" + std::to_string(lineno) + ": ragged row");
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw PlotError("empty artifact " + path.string());
  return t;
}

namespace {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color;
};

struct Band {
  std::vector<double> x, lo, hi;
};

constexpr double kW = 720, kH = 360, kLeft = 70, kRight = 20, kTop = 30, kBottom = 45;

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, r.ptr);
}

std::string svg_open(double w, double h, const std::string& title) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << title
     << "</text>\n";
  return os.str();
}

// Axis frame for a panel whose top-left corner is (ox, oy).
class Panel {
 public:
  Panel(double ox, double oy, double w, double h, double x0, double x1, double y0, double y1, bool logy)
      : ox_(ox), oy_(oy), w_(w), h_(h), x0_(x0), x1_(x1), logy_(logy) {
    y0_ = logy ? std::log10(y0) : y0;
    y1_ = logy ? std::log10(y1) : y1;
    if (x1_ <= x0_) x1_ = x0_ + 1.0;
    if (y1_ <= y0_) {
      y0_ -= 0.5;
      y1_ += 0.5;
    }
  }

  double px(double x) const { return ox_ + (x - x0_) / (x1_ - x0_) * w_; }
  double py(double y) const {
    const double v = logy_ ? std::log10(y) : y;
    return oy_ + h_ - (v - y0_) / (y1_ - y0_) * h_;
  }

  std::string axes(const std::string& xlabel, const std::string& ylabel) const {
    std::ostringstream os;
    os << "<rect x=\"" << ox_ << "\" y=\"" << oy_ << "\" width=\"" << w_ << "\" height=\"" << h_
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double xv = x0_ + (x1_ - x0_) * k / 4.0;
      const double X = px(xv);
      os << "<line x1=\"" << X << "\" y1=\"" << oy_ + h_ << "\" x2=\"" << X << "\" y2=\"" << oy_ + h_ + 4
         << "\" stroke=\"black\"/><text x=\"" << X << "\" y=\"" << oy_ + h_ + 16
         << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
      const double yv = y0_ + (y1_ - y0_) * k / 4.0;
      const double Y = oy_ + h_ - h_ * k / 4.0;
      os << "<line x1=\"" << ox_ - 4 << "\" y1=\"" << Y << "\" x2=\"" << ox_ << "\" y2=\"" << Y
         << "\" stroke=\"black\"/><text x=\"" << ox_ - 6 << "\" y=\"" << Y + 4
         << "\" text-anchor=\"end\">" << num(logy_ ? std::pow(10.0, yv) : yv) << "</text>\n";
    }
    os << "<text x=\"" << ox_ + w_ / 2 << "\" y=\"" << oy_ + h_ + 32 << "\" text-anchor=\"middle\">"
       << xlabel << "</text>\n"
       << "<text transform=\"translate(" << ox_ - 52 << ',' << oy_ + h_ / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n";
    return os.str();
  }

  std::string polyline(const Series& s) const {
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.3\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (logy_ && s.y[i] <= 0.0)) continue;
      os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    os << "\"><title>" << s.label << "</title></polyline>\n";
    return os.str();
  }

  std::string band(const Band& b, const std::string& color) const {
    std::ostringstream os;
    os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.3\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < b.x.size(); ++i) os << px(b.x[i]) << ',' << py(b.hi[i]) << ' ';
    for (std::size_t i = b.x.size(); i-- > 0;) os << px(b.x[i]) << ',' << py(b.lo[i]) << ' ';
    os << "\"/>\n";
    return os.str();
  }

 private:
  double ox_, oy_, w_, h_, x0_, x1_, y0_ = 0, y1_ = 1;
  bool logy_;
};

std::string legend(const std::vector<Series>& series, double x, double y) {
  std::ostringstream os;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double Y = y + 14.0 * static_cast<double>(i);
    os << "<line x1=\"" << x << "\" y1=\"" << Y << "\" x2=\"" << x + 18 << "\" y2=\"" << Y
       << "\" stroke=\"" << series[i].color << "\" stroke-width=\"2\"/><text x=\"" << x + 22
       << "\" y=\"" << Y + 4 << "\">" << series[i].label << "</text>\n";
  }
  return os.str();
}

std::pair<double, double> range_of(const std::vector<const std::vector<double>*>& cols, bool positive_only) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* c : cols) {
    for (double v : *c) {
      if (!std::isfinite(v) || (positive_only && v <= 0.0)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) return {positive_only ? 1.0 : 0.0, positive_only ? 10.0 : 1.0};
  if (!positive_only) {
    const double pad = 0.05 * std::max(hi - lo, 1e-12);
    return {lo - pad, hi + pad};
  }
  return {lo, hi};
}

std::string line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series, const Band* band) {
  std::vector<const std::vector<double>*> ys, xs;
  for (const auto& s : series) {
    ys.push_back(&s.y);
    xs.push_back(&s.x);
  }
  if (band) {
    ys.push_back(&band->lo);
    ys.push_back(&band->hi);
  }
  const auto [x0, x1] = range_of(xs, false);
  const auto [y0, y1] = range_of(ys, false);
  const Panel p(kLeft, kTop, kW - kLeft - kRight, kH - kTop - kBottom, x0, x1, y0, y1, false);
  std::string out = svg_open(kW, kH, title) + p.axes(xlabel, ylabel);
  if (band) out += p.band(*band, "#4477aa");
  for (const auto& s : series) out += p.polyline(s);
  out += legend(series, kLeft + 10, kTop + 14);
  return out + "</svg>\n";
}

// Grayscale heatmap; row 0 of the grid is drawn at the top.
std::string heatmap(const std::string& title, const CsvTable& grid) {
  const auto rows = grid.rows.size();
  const auto cols = grid.rows.front().size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : grid.rows)
    for (double v : r)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!(hi > lo)) hi = lo + 1.0;
  const double cell = std::max(1.0, std::floor(480.0 / static_cast<double>(std::max(rows, cols))));
  const double w = cell * static_cast<double>(cols), h = cell * static_cast<double>(rows);
  std::ostringstream os;
  os << svg_open(w + 140, h + 60, title);
  os << "<g transform=\"translate(20,30)\" shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = grid.rows[i][j];
      const int g = std::isfinite(v) ? static_cast<int>(std::lround(255.0 * (v - lo) / (hi - lo))) : 0;
      os << "<rect x=\"" << cell * static_cast<double>(j) << "\" y=\"" << cell * static_cast<double>(i)
         << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << g << ',' << g << ','
         << g << ")\"/>";
    }
    os << '\n';
  }
  os << "</g>\n";
  // Colour bar.
  const double bx = w + 40;
  for (int k = 0; k < 64; ++k) {
    const int g = static_cast<int>(std::lround(255.0 * (63 - k) / 63.0));
    os << "<rect x=\"" << bx << "\" y=\"" << 30 + h * k / 64.0 << "\" width=\"16\" height=\""
       << h / 64.0 + 0.5 << "\" fill=\"rgb(" << g << ',' << g << ',' << g << ")\"/>";
  }
  os << "\n<text x=\"" << bx + 20 << "\" y=\"38\">" << num(hi) << "</text><text x=\"" << bx + 20
     << "\" y=\"" << 30 + h << "\">" << num(lo) << "</text>\n";
  return os.str() + "</svg>\n";
}

std::string bar_chart(const std::string& title, const std::vector<double>& bins,
                      const std::vector<double>& counts) {
  const auto [b0, b1] = std::minmax_element(bins.begin(), bins.end());
  const double top = *std::max_element(counts.begin(), counts.end());
  const Panel p(kLeft, kTop, kW - kLeft - kRight, kH - kTop - kBottom, *b0 - 0.5, *b1 + 0.5, 0.0,
                top * 1.05, false);
  std::ostringstream os;
  os << svg_open(kW, kH, title) << p.axes("face dimension", "draws");
  const double bw = std::max(1.0, p.px(1.0) - p.px(0.0)) * 0.8;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const double y = p.py(counts[i]);
    os << "<rect class=\"bin\" data-bin=\"" << num(bins[i]) << "\" data-count=\"" << num(counts[i])
       << "\" x=\"" << p.px(bins[i]) - bw / 2 << "\" y=\"" << y << "\" width=\"" << bw << "\" height=\""
       << p.py(0.0) - y << "\" fill=\"#4477aa\"/>\n";
  }
  return os.str() + "</svg>\n";
}

std::string hyper_trace(const CsvTable& t) {
  const auto iter = t.column("iter");
  const auto lam = t.column("lambda");
  const auto reg = t.column("delta_or_gamma");
  std::ostringstream os;
  const double ph = (kH - kTop - kBottom) * 0.9;
  os << svg_open(kW, 2 * ph + kTop + 2 * kBottom + 10, "hyperparameter chains (log scale)");
  double oy = kTop;
  for (const auto& [label, col, color] :
       {std::tuple{std::string("lambda"), &lam, std::string("#aa3377")},
        std::tuple{std::string("delta_or_gamma"), &reg, std::string("#228833")}}) {
    const auto [y0, y1] = range_of({col}, true);
    const auto [x0, x1] = range_of({&iter}, false);
    const Panel p(kLeft, oy, kW - kLeft - kRight, ph, x0, x1, y0 / 1.2, y1 * 1.2, true);
    os << p.axes("iteration", label) << p.polyline(Series{label, iter, *col, color});
    oy += ph + kBottom + 5;
  }
  return os.str() + "</svg>\n";
}

bool is_image_run(const fs::path& dir) { return fs::exists(dir / "median_image.csv"); }

std::string render(const fs::path& dir, PlotKind kind) {
  switch (kind) {
    case PlotKind::signal: {
      if (is_image_run(dir)) return heatmap("ground truth", read_csv(dir / "truth_image.csv", false));
      const CsvTable sig = read_csv(dir / "signal.csv");
      std::vector<Series> series{{"truth", sig.column("t"), sig.column("x_true"), "black"},
                                 {"data", sig.column("t"), sig.column("b"), "#bbbbbb"}};
      if (fs::exists(dir / "summary.csv")) {
        const CsvTable s = read_csv(dir / "summary.csv");
        series.push_back({"median", sig.column("t"), s.column("median"), "#4477aa"});
        const Band band{sig.column("t"), s.column("ci_lo"), s.column("ci_hi")};
        return line_plot("signal", "t", "x", series, &band);
      }
      return line_plot("signal", "t", "x", series, nullptr);
    }
    case PlotKind::median: {
      if (is_image_run(dir)) return heatmap("posterior median", read_csv(dir / "median_image.csv", false));
      const CsvTable s = read_csv(dir / "summary.csv");
      const auto idx = s.column("component_index");
      const Band band{idx, s.column("ci_lo"), s.column("ci_hi")};
      return line_plot("posterior median with credible band", "component", "x",
                       {{"median", idx, s.column("median"), "#4477aa"}}, &band);
    }
    case PlotKind::ci_width: {
      if (is_image_run(dir)) {
        return heatmap("credible interval width", read_csv(dir / "ci_width_image.csv", false));
      }
      const CsvTable s = read_csv(dir / "summary.csv");
      return line_plot("credible interval width", "component", "width",
                       {{"ci width", s.column("component_index"), s.column("ci_width"), "#ee6677"}},
                       nullptr);
    }
    case PlotKind::sparsity_hist: {
      const CsvTable s = read_csv(dir / "sparsity.csv");
      return bar_chart("face dimension histogram", s.column("dim_face"), s.column("count"));
    }
    case PlotKind::hyper_trace:
      return hyper_trace(read_csv(dir / "hyper_chain.csv"));
  }
  throw PlotError("unknown plot kind");
}

}  // namespace

fs::path plot(const fs::path& run_dir, PlotKind kind) {
  if (!fs::is_directory(run_dir)) throw PlotError("no run directory " + run_dir.string());
  const std::string svg = render(run_dir, kind);
  fs::create_directories(run_dir / "plots");
  const fs::path out = run_dir / "plots" / (to_string(kind) + ".svg");
  std::ofstream f(out);
  if (!(f << svg)) throw PlotError("cannot write " + out.string());
  return out;
}

std::vector<fs::path> plot_available(const fs::path& run_dir, std::vector<std::string>* errors) {
  std::vector<fs::path> written;
  const std::vector<std::pair<PlotKind, fs::path>> wanted{
      {PlotKind::signal, is_image_run(run_dir) ? "truth_image.csv" : "signal.csv"},
      {PlotKind::median, "summary.csv"},
      {PlotKind::ci_width, "summary.csv"},
      {PlotKind::sparsity_hist, "sparsity.csv"},
      {PlotKind::hyper_trace, "hyper_chain.csv"},
  };
  for (const auto& [kind, needs] : wanted) {
    if (!fs::exists(run_dir / needs)) continue;
    try {
      written.push_back(plot(run_dir, kind));
    } catch (const std::exception& e) {
      if (errors) errors->push_back(to_string(kind) + ": " + e.what());
    }
  }
  return written;
}

}  // namespace proxis
