#include "proxis/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace proxis {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "\n") + s;
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string fmt_int(T v) {
  return std::to_string(v);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  return v;
}

template <class T>
T parse_int(const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected true/false, got '" + s + "'");
}

Experiment parse_experiment(const std::string& raw) {
  const std::string s = trim(raw);
  for (Experiment e : {Experiment::deblur1d, Experiment::ct, Experiment::gibbs_deblur,
                       Experiment::prox_check, Experiment::adjoint_check,
                       Experiment::compare_baseline}) {
    if (to_string(e) == s) return e;
  }
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define PROXIS_DOUBLE(sec, key, member)                                     \
  Field {                                                                   \
    sec, key, [](const RunConfig& c) { return fmt(c.member); },             \
        [](RunConfig& c, const std::string& s) { c.member = parse_double(s); } \
  }
#define PROXIS_INT(sec, key, member, T)                                        \
  Field {                                                                      \
    sec, key, [](const RunConfig& c) { return fmt_int(c.member); },            \
        [](RunConfig& c, const std::string& s) { c.member = parse_int<T>(s); } \
  }
#define PROXIS_BOOL(sec, key, member)                                          \
  Field {                                                                      \
    sec, key, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, \
        [](RunConfig& c, const std::string& s) { c.member = parse_bool(s); }   \
  }
#define PROXIS_STRING(sec, key, member)                                  \
  Field {                                                                \
    sec, key, [](const RunConfig& c) { return c.member; },               \
        [](RunConfig& c, const std::string& s) { c.member = trim(s); }   \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      Field{"experiment", "name", [](const RunConfig& c) { return to_string(c.experiment); },
            [](RunConfig& c, const std::string& s) { c.experiment = parse_experiment(s); }},
      PROXIS_INT("experiment", "seed", seed, std::uint64_t),
      PROXIS_INT("experiment", "workers", workers, int),
      PROXIS_INT("problem", "n", n, int),
      PROXIS_DOUBLE("problem", "sigma", sigma),
      PROXIS_DOUBLE("problem", "lambda", lambda),
      PROXIS_INT("problem", "n_angles", n_angles, int),
      PROXIS_INT("problem", "n_rays", n_rays, int),
      PROXIS_DOUBLE("solver", "rho", admm.rho),
      PROXIS_INT("solver", "max_iters", admm.max_iters, int),
      PROXIS_DOUBLE("solver", "eps_abs", admm.eps_abs),
      PROXIS_DOUBLE("solver", "eps_rel", admm.eps_rel),
      PROXIS_BOOL("solver", "fixed_iterations", admm.fixed_iterations),
      PROXIS_BOOL("solver", "warm_start", admm.warm_start),
      PROXIS_STRING("solver", "xupdate", xupdate),
      PROXIS_INT("sampler", "n_samples", n_samples, int),
      PROXIS_INT("sampler", "batch_size", batch_size, int),
      PROXIS_DOUBLE("sampler", "snap_tol", snap_tol),
      PROXIS_DOUBLE("sampler", "level", level),
      PROXIS_STRING("regularizer", "kind", regularizer.kind),
      PROXIS_BOOL("regularizer", "nonnegative", regularizer.nonnegative),
      PROXIS_DOUBLE("regularizer", "gamma", regularizer.gamma),
      PROXIS_DOUBLE("hyperpriors", "alpha_lambda", priors.alpha_lambda),
      PROXIS_DOUBLE("hyperpriors", "beta_lambda", priors.beta_lambda),
      PROXIS_DOUBLE("hyperpriors", "alpha_reg", priors.alpha_reg),
      PROXIS_DOUBLE("hyperpriors", "beta_reg", priors.beta_reg),
      PROXIS_STRING("gibbs", "model", gibbs_model),
      PROXIS_INT("gibbs", "iterations", gibbs_iterations, int),
      PROXIS_INT("gibbs", "burn_in", gibbs_burn_in, int),
      PROXIS_INT("baseline", "steps", rwm_steps, int),
      PROXIS_INT("baseline", "burn_in", rwm_burn_in, int),
      PROXIS_INT("baseline", "thin", rwm_thin, int),
      PROXIS_DOUBLE("baseline", "step", rwm_step),
      PROXIS_STRING("output", "dir", output_dir),
  };
  return kFields;
}

#undef PROXIS_DOUBLE
#undef PROXIS_INT
#undef PROXIS_BOOL
#undef PROXIS_STRING

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error("invalid configuration:\n" + join(problems)), problems_(std::move(problems)) {}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::deblur1d: return "deblur1d";
    case Experiment::ct: return "ct";
    case Experiment::gibbs_deblur: return "gibbs-deblur";
    case Experiment::prox_check: return "prox-check";
    case Experiment::adjoint_check: return "adjoint-check";
    case Experiment::compare_baseline: return "compare-baseline";
  }
  return "unknown";
}

bool RunConfig::operator==(const RunConfig& o) const {
  for (const Field& f : fields()) {
    if (f.get(*this) != f.get(o)) return false;
  }
  return true;
}

void RunConfig::validate() const {
  std::vector<std::string> errs;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };
  need(workers >= 0, "experiment.workers must be >= 0");
  need(sigma > 0.0, "problem.sigma must be > 0");
  need(lambda > 0.0, "problem.lambda must be > 0");
  if (experiment == Experiment::ct) {
    need(n >= 16, "problem.n must be >= 16 for ct");
  } else {
    need(n >= 8, "problem.n must be >= 8");
  }
  need(n_angles >= 1, "problem.n_angles must be >= 1");
  need(n_rays >= 1, "problem.n_rays must be >= 1");
  need(admm.rho > 0.0, "solver.rho must be > 0");
  need(admm.max_iters >= 1, "solver.max_iters must be >= 1");
  need(admm.eps_abs > 0.0, "solver.eps_abs must be > 0");
  need(admm.eps_rel > 0.0, "solver.eps_rel must be > 0");
  need(xupdate == "auto" || xupdate == "dense" || xupdate == "cg",
       "solver.xupdate must be auto, dense or cg");
  need(n_samples >= 1, "sampler.n_samples must be >= 1");
  need(batch_size >= 1, "sampler.batch_size must be >= 1");
  need(snap_tol > 0.0, "sampler.snap_tol must be > 0");
  need(level > 0.0 && level < 1.0, "sampler.level must be in (0, 1)");
  const std::set<std::string> kinds{"tv", "isotropic-tv", "l1", "none"};
  need(kinds.count(regularizer.kind) == 1, "regularizer.kind must be tv, isotropic-tv, l1 or none");
  need(regularizer.gamma >= 0.0, "regularizer.gamma must be >= 0");
  need(priors.alpha_lambda > 0.0, "hyperpriors.alpha_lambda must be > 0");
  need(priors.beta_lambda > 0.0, "hyperpriors.beta_lambda must be > 0");
  need(priors.alpha_reg > 0.0, "hyperpriors.alpha_reg must be > 0");
  need(priors.beta_reg > 0.0, "hyperpriors.beta_reg must be > 0");
  need(gibbs_model == "alternative" || gibbs_model == "scaled",
       "gibbs.model must be alternative or scaled");
  need(gibbs_iterations >= 1, "gibbs.iterations must be >= 1");
  need(gibbs_burn_in >= 0 && gibbs_burn_in < gibbs_iterations,
       "gibbs.burn_in must be in [0, iterations)");
  if (experiment == Experiment::gibbs_deblur) {
    need(regularizer.kind != "isotropic-tv", "gibbs-deblur needs a polyhedral regularizer");
  }
  need(rwm_steps >= 1, "baseline.steps must be >= 1");
  need(rwm_burn_in >= 0, "baseline.burn_in must be >= 0");
  need(rwm_thin >= 1, "baseline.thin must be >= 1");
  need(rwm_step > 0.0, "baseline.step must be > 0");
  need(!output_dir.empty(), "output.dir must not be empty");
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

RunConfig default_config(Experiment e) {
  RunConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::deblur1d:
    case Experiment::compare_baseline:
      c.admm.max_iters = 5000;
      c.n_samples = e == Experiment::deblur1d ? 500 : 200;
      break;
    case Experiment::ct:
      c.n = 64;
      c.n_angles = 20;
      c.n_rays = 90;
      c.lambda = 10.0;
      c.regularizer = {"isotropic-tv", true, 10.0};
      c.admm.max_iters = 200;
      c.admm.fixed_iterations = true;
      c.n_samples = 100;
      break;
    case Experiment::gibbs_deblur:
      c.regularizer = {"tv", true, 1.0};
      c.admm.max_iters = 100;
      c.admm.fixed_iterations = true;
      break;
    case Experiment::prox_check:
    case Experiment::adjoint_check:
      break;
  }
  c.output_dir = "runs/" + to_string(e);
  return c;
}

RunConfig full_scale_config(Experiment e) {
  RunConfig c = default_config(e);
  if (e == Experiment::ct) {
    c.n = 100;
    c.n_rays = 120;
    c.n_samples = 500;
  }
  return c;
}

std::string save_config(const RunConfig& c) {
  std::ostringstream os;
  std::string section;
  for (const Field& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << f.get(c) << '\n';
  }
  return os.str();
}

RunConfig load_config_string(const std::string& text) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream is(text);
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError({std::string("malformed INI: ") + e.message() + " (line " +
                       std::to_string(e.line()) + ")"});
  }

  // Experiment first, so that omitted keys take that experiment's defaults.
  std::vector<std::string> errs;
  RunConfig c;
  if (auto name = tree.get_optional<std::string>("experiment.name")) {
    try {
      c = default_config(parse_experiment(*name));
    } catch (const std::exception& e) {
      errs.push_back(std::string("experiment.name: ") + e.what());
    }
  }

  std::set<std::string> known;
  for (const Field& f : fields()) {
    const std::string path = std::string(f.section) + "." + f.key;
    known.insert(path);
    const auto value = tree.get_optional<std::string>(path);
    if (!value) continue;
    try {
      f.set(c, *value);
    } catch (const std::exception& e) {
      errs.push_back(path + ": " + e.what());
    }
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      errs.push_back("unexpected top-level key '" + section + "'");
      continue;
    }
    for (const auto& [key, value] : body) {
      (void)value;
      if (!known.count(section + "." + key)) errs.push_back("unknown key " + section + "." + key);
    }
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_string(ss.str());
}

void write_config(const RunConfig& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << save_config(c);
}

Regularizer build_regularizer(const RegularizerSpec& spec, Index nx, Index ny) {
  const double g = spec.gamma;
  const bool nn = spec.nonnegative;
  if (spec.kind == "none") return nn ? Regularizer::nonnegative() : Regularizer::zero();
  if (spec.kind == "l1") {
    Regularizer r = nn ? Regularizer::nonnegative() : Regularizer::zero();
    return r.add(Term{g, nullptr, atom::L1{}});
  }
  // A 1D signal has no distinction between the two TV flavours.
  if (ny == 1) return Regularizer::tv1d(nx, g, nn);
  if (spec.kind == "isotropic-tv") return Regularizer::isotropic_tv2d(nx, ny, g, nn);
  return Regularizer::anisotropic_tv2d(nx, ny, g, nn);
}

XUpdateSolver::Method parse_xupdate_method(const std::string& s) {
  if (s == "dense") return XUpdateSolver::Method::dense_cholesky;
  if (s == "cg") return XUpdateSolver::Method::conjugate_gradient;
  return XUpdateSolver::Method::automatic;
}

}  // namespace proxis
