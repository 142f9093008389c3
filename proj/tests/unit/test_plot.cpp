#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "proxis/plot.hpp"

using namespace proxis;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("plot kind names") {
  for (PlotKind k : {PlotKind::signal, PlotKind::median, PlotKind::ci_width, PlotKind::sparsity_hist,
                     PlotKind::hyper_trace}) {
    CHECK(parse_plot_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_plot_kind("histogram"), PlotError);
}

TEST_CASE("csv reader") {
  const fs::path d = fresh_dir("proxis_plot_csv");
  write(d / "a.csv", "x,y\n1,2\n3,4.5\n");
  const CsvTable t = read_csv(d / "a.csv");
  CHECK(t.header == std::vector<std::string>{"x", "y"});
  CHECK(t.column("y") == std::vector<double>{2.0, 4.5});
  CHECK_THROWS_AS(t.column("z"), PlotError);
  write(d / "ragged.csv", "x,y\n1\n");
  CHECK_THROWS_AS(read_csv(d / "ragged.csv"), PlotError);
  write(d / "text.csv", "x\nabc\n");
  CHECK_THROWS_AS(read_csv(d / "text.csv"), PlotError);
  CHECK_THROWS_AS(read_csv(d / "missing.csv"), PlotError);
  write(d / "grid.csv", "1,2\n3,4\n");
  CHECK(read_csv(d / "grid.csv", false).rows.size() == 2);
  fs::remove_all(d);
}

TEST_CASE("1D run plots") {
  const fs::path d = fresh_dir("proxis_plot_1d");
  write(d / "signal.csv", "index,t,x_true,b\n0,0,0,0.1\n1,0.5,1,0.9\n2,1,0,0.05\n");
  write(d / "summary.csv",
        "component_index,median,ci_lo,ci_hi,ci_width\n0,0,0,0.1,0.1\n1,1,0.8,1.2,0.4\n2,0,0,0.2,0.2\n");
  write(d / "sparsity.csv", "dim_face,count\n2,5\n3,7\n");
  std::vector<std::string> errors;
  const auto written = plot_available(d, &errors);
  CHECK(errors.empty());
  CHECK(written.size() == 4);
  const std::string hist = slurp(d / "plots" / "sparsity-hist.svg");
  CHECK(hist.rfind("<svg", 0) == 0);
  CHECK(hist.find("data-bin=\"3\"") != std::string::npos);
  CHECK(hist.find("data-count=\"7\"") != std::string::npos);
  CHECK_THROWS_AS(plot(d, PlotKind::hyper_trace), PlotError);
  fs::remove_all(d);
}

TEST_CASE("hyperparameter trace and image runs") {
  const fs::path d = fresh_dir("proxis_plot_2d");
  write(d / "hyper_chain.csv", "iter,lambda,delta_or_gamma,dimF,residual\n1,900,2,10,0.1\n2,1100,3,11,0.1\n");
  write(d / "truth_image.csv", "0,1\n1,0\n");
  write(d / "median_image.csv", "0,0.9\n0.8,0\n");
  write(d / "ci_width_image.csv", "0.1,0.2\n0.2,0.1\n");
  const fs::path trace = plot(d, PlotKind::hyper_trace);
  CHECK(trace.filename() == "hyper-trace.svg");
  CHECK(fs::file_size(trace) > 0);
  CHECK(slurp(plot(d, PlotKind::median)).find("<rect") != std::string::npos);
  CHECK_NOTHROW(plot(d, PlotKind::signal));
  CHECK_NOTHROW(plot(d, PlotKind::ci_width));
  CHECK_THROWS_AS(plot(d / "nope", PlotKind::signal), PlotError);
  fs::remove_all(d);
}

TEST_CASE("malformed artifacts are reported, not thrown, by plot_available") {
  const fs::path d = fresh_dir("proxis_plot_bad");
  write(d / "sparsity.csv", "dim_face,count\n");
  std::vector<std::string> errors;
  CHECK(plot_available(d, &errors).empty());
  CHECK(errors.size() == 1);
  fs::remove_all(d);
}
