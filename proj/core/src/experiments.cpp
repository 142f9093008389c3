#include "proxis/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "proxis/baseline.hpp"
#include "proxis/gibbs.hpp"
#include "proxis/plot.hpp"
#include "proxis/problems.hpp"
#include "proxis/sample_io.hpp"
#include "proxis/sampler.hpp"
#include "proxis/self_check.hpp"
#include "proxis/stats.hpp"

#ifndef PROXIS_VERSION
#define PROXIS_VERSION "0.0.0"
#endif

namespace proxis {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... T>
  void row(const T&... cells) {
    std::size_t k = 0;
    ((out_ << (k++ ? "," : "") << cell(cells)), ...);
    out_ << '\n';
  }
  void flush() { out_.flush(); }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(Index v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ofstream out_;
};

void write_grid(const fs::path& path, const Vector& img, Index nx, Index ny) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) out << (i ? "," : "") << num(img[j * nx + i]);
    out << '\n';
  }
}

void write_summary(const fs::path& dir, const EnsembleSummary& s) {
  CsvWriter csv(dir / "summary.csv", "component_index,median,ci_lo,ci_hi,ci_width");
  for (Index i = 0; i < s.median.size(); ++i) csv.row(i, s.median[i], s.ci_lo[i], s.ci_hi[i], s.ci_width[i]);
}

void write_sparsity(const fs::path& dir, const std::map<Index, Index>& hist) {
  CsvWriter csv(dir / "sparsity.csv", "dim_face,count");
  for (const auto& [dim, count] : hist) csv.row(dim, count);
}

void write_signal(const fs::path& dir, const InverseProblemInstance& inst) {
  CsvWriter csv(dir / "signal.csv", "index,t,x_true,b");
  for (Index i = 0; i < inst.x_true.size(); ++i) {
    csv.row(i, static_cast<double>(i) * inst.spacing, inst.x_true[i], inst.b[i]);
  }
}

double relative_error(const Vector& x, const Vector& truth) {
  return (x - truth).norm() / std::max(truth.norm(), std::numeric_limits<double>::min());
}

SamplerOptions sampler_options(const RunConfig& c) {
  SamplerOptions o;
  o.snap_tol = c.snap_tol;
  o.batch_size = c.batch_size;
  o.method = parse_xupdate_method(c.xupdate);
  return o;
}

void ensemble_metrics(const SampleEnsemble& ens, std::map<std::string, double>& m) {
  double iters = 0.0, conv = 0.0;
  for (const auto& d : ens.diagnostics) {
    iters += d.iters;
    conv += d.converged ? 1.0 : 0.0;
  }
  const auto n = static_cast<double>(std::max<std::size_t>(1, ens.diagnostics.size()));
  m["admm_mean_iterations"] = iters / n;
  m["admm_converged_fraction"] = conv / n;
}

struct Context {
  const RunConfig& config;
  fs::path dir;
  int workers;
  std::map<std::string, double>& metrics;
};

void run_deblur(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const InverseProblemInstance inst = build_deblur1d(c.n, c.sigma, c.lambda, c.seed);
  write_signal(ctx.dir, inst);

  RandomizedProblem p;
  p.A = inst.forward;
  p.b = inst.b;
  p.lambda = c.lambda;
  p.f = build_regularizer(c.regularizer, c.n);
  const SampleEnsemble ens =
      draw_ensemble(p, c.admm, c.n_samples, c.seed, ctx.workers, sampler_options(c));
  write_samples(ctx.dir / "samples.bin", ens.samples);
  write_samples(ctx.dir / "samples_snapped.bin", ens.snapped);

  const EnsembleSummary s = summarize(ens.snapped, c.level, &p.f, c.snap_tol);
  write_summary(ctx.dir, s);
  write_sparsity(ctx.dir, s.sparsity_hist);
  ensemble_metrics(ens, ctx.metrics);
  ctx.metrics["median_relative_error"] = relative_error(s.median, inst.x_true);
  ctx.metrics["fraction_with_flat_pair"] = fraction_with_flat_pair(ens.snapped, 1e-12);
}

void run_ct(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const InverseProblemInstance inst = build_ct(c.n, c.n_angles, c.n_rays, c.lambda, c.seed);
  write_grid(ctx.dir / "truth_image.csv", inst.x_true, inst.nx, inst.ny);

  RandomizedProblem p;
  p.A = inst.forward;
  p.b = inst.b;
  p.lambda = c.lambda;
  p.f = build_regularizer(c.regularizer, inst.nx, inst.ny);
  const SampleEnsemble ens =
      draw_ensemble(p, c.admm, c.n_samples, c.seed, ctx.workers, sampler_options(c));
  write_samples(ctx.dir / "samples.bin", ens.samples);
  write_samples(ctx.dir / "samples_snapped.bin", ens.snapped);

  // Face dimensions of the isotropic form are not exact, so no histogram.
  const EnsembleSummary s = summarize(ens.snapped, c.level);
  write_summary(ctx.dir, s);
  write_grid(ctx.dir / "median_image.csv", s.median, inst.nx, inst.ny);
  write_grid(ctx.dir / "ci_width_image.csv", s.ci_width, inst.nx, inst.ny);
  ensemble_metrics(ens, ctx.metrics);
  ctx.metrics["median_relative_error"] = relative_error(s.median, inst.x_true);
  ctx.metrics["median_min_pixel"] = s.median.minCoeff();
}

void run_gibbs_deblur(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const InverseProblemInstance inst = build_deblur1d(c.n, c.sigma, c.lambda, c.seed);
  write_signal(ctx.dir, inst);

  GibbsSetup setup;
  setup.model = c.gibbs_model == "scaled" ? GibbsModel::scaled : GibbsModel::alternative;
  setup.A = inst.forward;
  setup.b = inst.b;
  setup.f = build_regularizer(c.regularizer, c.n);
  if (setup.model == GibbsModel::scaled) setup.L = make_finite_difference(c.n);
  setup.priors = c.priors;
  setup.admm = c.admm;
  setup.snap_tol = c.snap_tol;

  CsvWriter chain_csv(ctx.dir / "hyper_chain.csv", "iter,lambda,delta_or_gamma,dimF,residual");
  auto observer = [&](int k, const GibbsState& s) {
    chain_csv.row(k, s.lambda, s.reg, s.dim_face, s.residual_sq);
    chain_csv.flush();
  };
  const GibbsChain chain = setup.model == GibbsModel::scaled
                               ? run_pcehgs(setup, {}, c.gibbs_iterations, c.seed, observer)
                               : run_alt_gibbs(setup, {}, c.gibbs_iterations, c.seed, observer);

  const auto kept = static_cast<Index>(chain.states.size()) - c.gibbs_burn_in;
  Matrix xs(kept, c.n);
  for (Index i = 0; i < kept; ++i) {
    xs.row(i) = chain.states[static_cast<std::size_t>(c.gibbs_burn_in + i)].x.transpose();
  }
  write_samples(ctx.dir / "samples.bin", xs);
  const EnsembleSummary s = summarize(xs, c.level, &setup.f, c.snap_tol);
  write_summary(ctx.dir, s);
  write_sparsity(ctx.dir, s.sparsity_hist);

  const auto n = static_cast<Index>(chain.states.size());
  auto mean_over = [&](Index from, Index to, auto get) {
    double acc = 0.0;
    for (Index k = from; k < to; ++k) acc += get(chain.states[static_cast<std::size_t>(k)]);
    return acc / static_cast<double>(std::max<Index>(1, to - from));
  };
  auto lam = [](const GibbsState& s) { return s.lambda; };
  auto reg = [](const GibbsState& s) { return s.reg; };
  auto dim = [](const GibbsState& s) { return static_cast<double>(s.dim_face); };
  ctx.metrics["lambda_mean"] = mean_over(0, n, lam);
  ctx.metrics["lambda_mean_after_burn_in"] = mean_over(c.gibbs_burn_in, n, lam);
  ctx.metrics["reg_mean_after_burn_in"] = mean_over(c.gibbs_burn_in, n, reg);
  ctx.metrics["dimF_third_quartile_mean"] = mean_over(n / 2, 3 * n / 4, dim);
  ctx.metrics["dimF_last_quartile_mean"] = mean_over(3 * n / 4, n, dim);
  ctx.metrics["median_relative_error"] = relative_error(s.median, inst.x_true);
}

void run_checks(const Context& ctx, bool adjoint) {
  const auto results = adjoint ? adjoint_suite(ctx.config.seed) : prox_suite(ctx.config.seed);
  CsvWriter csv(ctx.dir / "checks.csv", "check,value,tolerance,pass");
  for (const auto& r : results) csv.row(r.name, r.value, r.tolerance, r.pass ? 1 : 0);
  ctx.metrics["checks_failed"] =
      static_cast<double>(std::count_if(results.begin(), results.end(), [](auto& r) { return !r.pass; }));
  if (!all_pass(results)) throw Error("self-check failed; see checks.csv");
}

void run_compare(const Context& ctx) {
  const RunConfig& c = ctx.config;
  if (c.regularizer.kind != "tv" || c.regularizer.nonnegative) {
    throw ConfigError({"compare-baseline needs regularizer.kind = tv without nonnegativity"});
  }
  const InverseProblemInstance inst = build_deblur1d(c.n, c.sigma, c.lambda, c.seed);
  write_signal(ctx.dir, inst);

  RandomizedProblem p;
  p.A = inst.forward;
  p.b = inst.b;
  p.lambda = c.lambda;
  p.f = build_regularizer(c.regularizer, c.n);
  const SampleEnsemble ens =
      draw_ensemble(p, c.admm, c.n_samples, c.seed, ctx.workers, sampler_options(c));
  write_samples(ctx.dir / "samples.bin", ens.samples);
  write_samples(ctx.dir / "samples_snapped.bin", ens.snapped);
  const EnsembleSummary s = summarize(ens.snapped, c.level, &p.f, c.snap_tol);
  write_summary(ctx.dir, s);
  write_sparsity(ctx.dir, s.sparsity_hist);

  // Random-walk chain on the same posterior, started at the MAP estimate.
  const AdmmResult map = AdmmSolver(p.model(), c.admm).solve(p.b);
  LaplaceDifferencePosterior target{inst.forward, inst.b, c.lambda, c.regularizer.gamma,
                                    make_finite_difference(c.n)};
  RwmOptions opts;
  opts.step = c.rwm_step;
  opts.n_steps = c.rwm_steps;
  opts.burn_in = c.rwm_burn_in;
  opts.thin = c.rwm_thin;
  opts.tune = true;
  const RwmResult rwm = rwm_chain(target, map.x, opts, derive_seed(c.seed, seed_labels::rwm_chain));
  write_samples(ctx.dir / "baseline_samples.bin", rwm.chain);
  const EnsembleSummary bs = summarize(rwm.chain, c.level);
  {
    CsvWriter csv(ctx.dir / "baseline_summary.csv", "component_index,median,ci_lo,ci_hi,ci_width");
    for (Index i = 0; i < bs.median.size(); ++i) {
      csv.row(i, bs.median[i], bs.ci_lo[i], bs.ci_hi[i], bs.ci_width[i]);
    }
  }

  const double flat_implicit = fraction_with_flat_pair(ens.snapped, 1e-12);
  const double flat_rwm = fraction_with_flat_pair(rwm.chain, 1e-12);
  {
    CsvWriter csv(ctx.dir / "comparison.csv", "method,draws,fraction_with_flat_pair,median_relative_error");
    csv.row("implicit", ens.size(), flat_implicit, relative_error(s.median, inst.x_true));
    csv.row("rwm", rwm.chain.rows(), flat_rwm, relative_error(bs.median, inst.x_true));
  }
  ensemble_metrics(ens, ctx.metrics);
  ctx.metrics["implicit_fraction_with_flat_pair"] = flat_implicit;
  ctx.metrics["rwm_fraction_with_flat_pair"] = flat_rwm;
  ctx.metrics["rwm_acceptance_rate"] = rwm.acceptance_rate;
  ctx.metrics["rwm_step"] = rwm.step;
}

void write_run_json(const fs::path& dir, const RunConfig& c, int workers, const RunOutcome& o) {
  Json j;
  j["experiment"] = to_string(c.experiment);
  j["status"] = o.ok ? "ok" : "failed";
  if (!o.ok) j["error"] = o.error;
  j["seed"] = c.seed;
  j["workers"] = workers;
  j["version"] = std::string(version());
  j["wall_seconds"] = o.wall_seconds;
  j["config"] = "config.ini";
  j["snap_tol"] = c.snap_tol;
  j["quantile_convention"] = "linear interpolation, h = (N - 1) q";
  Json m = Json::object();
  for (const auto& [k, v] : o.metrics) m[k] = v;
  j["metrics"] = m;
  std::ofstream out(dir / "run.json");
  out << j.dump(2) << '\n';
}

}  // namespace

std::string_view version() noexcept { return PROXIS_VERSION; }

int resolve_workers(int requested, const RunConfig& config) {
  if (requested > 0) return requested;
  if (config.workers > 0) return config.workers;
  if (const char* env = std::getenv("PROXIS_WORKERS")) {
    int v = 0;
    const std::string s(env);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec == std::errc() && r.ptr == s.data() + s.size() && v > 0) return v;
  }
  return 1;
}

double fraction_with_flat_pair(const Matrix& rows, double tol) {
  if (rows.rows() == 0) return 0.0;
  Index hits = 0;
  for (Index i = 0; i < rows.rows(); ++i) {
    for (Index j = 0; j + 1 < rows.cols(); ++j) {
      if (std::abs(rows(i, j + 1) - rows(i, j)) <= tol) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(rows.rows());
}

RunOutcome run_experiment(const RunConfig& config, const fs::path& out_dir, int workers) {
  config.validate();
  RunOutcome outcome;
  outcome.dir = out_dir.empty() ? fs::path(config.output_dir) : out_dir;
  const int w = resolve_workers(workers, config);
  fs::create_directories(outcome.dir);
  fs::remove(outcome.dir / "FAILED");
  write_config(config, outcome.dir / "config.ini");

  const auto t0 = std::chrono::steady_clock::now();
  const Context ctx{config, outcome.dir, w, outcome.metrics};
  try {
    switch (config.experiment) {
      case Experiment::deblur1d: run_deblur(ctx); break;
      case Experiment::ct: run_ct(ctx); break;
      case Experiment::gibbs_deblur: run_gibbs_deblur(ctx); break;
      case Experiment::prox_check: run_checks(ctx, false); break;
      case Experiment::adjoint_check: run_checks(ctx, true); break;
      case Experiment::compare_baseline: run_compare(ctx); break;
    }
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
    std::ofstream(outcome.dir / "FAILED") << e.what() << '\n';
  }
  outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_run_json(outcome.dir, config, w, outcome);
  if (outcome.ok) {
    std::vector<std::string> plot_errors;
    plot_available(outcome.dir, &plot_errors);
    if (!plot_errors.empty()) {
      std::ofstream out(outcome.dir / "plot_errors.txt");
      for (const auto& e : plot_errors) out << e << '\n';
    }
  }
  return outcome;
}

}  // namespace proxis
