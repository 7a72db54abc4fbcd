#include "etbc/scenario.hpp"

#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "etbc/errors.hpp"

namespace etbc {

namespace pt = boost::property_tree;

const char* to_string(KernelScheme s) { return s == KernelScheme::paper ? "paper" : "refined"; }
const char* to_string(RegressorForm f) { return f == RegressorForm::grid ? "grid" : "continuum"; }
const char* to_string(InitialShape s) {
  switch (s) {
    case InitialShape::zero: return "zero";
    case InitialShape::x2_sine: return "x2_sine";
    case InitialShape::sine: return "sine";
  }
  return "?";
}
const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::warn: return "warn";
    case CheckStatus::fail: return "fail";
    case CheckStatus::note: return "note";
  }
  return "?";
}

namespace {

// Known keys per section; anything else is rejected so typos do not pass silently.
const std::map<std::string, std::set<std::string>> kSchema = {
    {"plant", {"a", "b", "eps", "lambda", "q"}},
    {"bounds", {"lambda_lo", "lambda_hi", "a_lo", "a_hi"}},
    {"etm",
     {"xi", "T_max", "eta", "lambda_d", "kappa", "kappa1", "kappa2", "kappa3", "kappa4", "m0",
      "open_loop"}},
    {"identifier", {"n_tilde", "n_modes", "rank_tol", "regressor_form"}},
    {"grid", {"nx", "dt", "kernel_nx", "kernel_scheme", "horizon"}},
    {"initial", {"shape", "n_bar", "zeta0", "lambda_hat", "a_hat", "seed"}},
};

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <typename T>
  T required(const std::string& path) const {
    const auto node = tree_.get_optional<std::string>(path);
    if (!node) throw ScenarioParseError("missing required key " + path, path);
    return convert<T>(path, *node);
  }

  template <typename T>
  T optional(const std::string& path, T fallback) const {
    const auto node = tree_.get_optional<std::string>(path);
    return node ? convert<T>(path, *node) : fallback;
  }

  bool has(const std::string& path) const { return tree_.get_optional<std::string>(path).has_value(); }

 private:
  template <typename T>
  static T convert(const std::string& path, std::string text) {
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
      text = text.substr(1, text.size() - 2);
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true") return true;
      if (text == "false") return false;
      throw ScenarioParseError(path + ": expected true or false, got '" + text + "'", path);
    } else {
      std::istringstream in(text);
      T value{};
      in >> value;
      if (in.fail() || !(in >> std::ws).eof())
        throw ScenarioParseError(path + ": cannot parse '" + text + "' as a number", path);
      return value;
    }
  }

  const pt::ptree& tree_;
};

KernelScheme parse_scheme(const std::string& s) {
  if (s == "paper") return KernelScheme::paper;
  if (s == "refined") return KernelScheme::refined;
  throw ScenarioParseError("grid.kernel_scheme: expected paper or refined, got '" + s + "'",
                           "grid.kernel_scheme");
}

RegressorForm parse_form(const std::string& s) {
  if (s == "grid") return RegressorForm::grid;
  if (s == "continuum") return RegressorForm::continuum;
  throw ScenarioParseError("identifier.regressor_form: expected grid or continuum, got '" + s + "'",
                           "identifier.regressor_form");
}

InitialShape parse_shape(const std::string& s) {
  if (s == "zero") return InitialShape::zero;
  if (s == "x2_sine") return InitialShape::x2_sine;
  if (s == "sine") return InitialShape::sine;
  throw ScenarioParseError("initial.shape: expected zero, x2_sine or sine, got '" + s + "'",
                           "initial.shape");
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ScenarioParseError(source + ":" + std::to_string(e.line()) + ": " + e.message(), "",
                             e.line());
  }

  for (const auto& [section, body] : tree) {
    const auto known = kSchema.find(section);
    if (known == kSchema.end())
      throw ScenarioParseError(source + ": unknown section [" + section + "]", section);
    if (!body.data().empty())
      throw ScenarioParseError(source + ": key '" + section + "' outside any section", section);
    for (const auto& [key, value] : body)
      if (!known->second.count(key))
        throw ScenarioParseError(source + ": unknown key " + section + "." + key,
                                 section + "." + key);
  }

  const Reader r(tree);
  ScenarioConfig cfg;
  cfg.plant.a = r.required<double>("plant.a");
  cfg.plant.b = r.required<double>("plant.b");
  cfg.plant.eps = r.required<double>("plant.eps");
  cfg.plant.lambda = r.required<double>("plant.lambda");
  cfg.plant.q = r.required<double>("plant.q");

  cfg.box.lambda_lo = r.required<double>("bounds.lambda_lo");
  cfg.box.lambda_hi = r.required<double>("bounds.lambda_hi");
  cfg.box.a_lo = r.required<double>("bounds.a_lo");
  cfg.box.a_hi = r.required<double>("bounds.a_hi");

  cfg.etm.xi = r.required<double>("etm.xi");
  cfg.etm.T_max = r.required<double>("etm.T_max");
  cfg.etm.eta = r.required<double>("etm.eta");
  cfg.etm.lambda_d = r.required<double>("etm.lambda_d");
  cfg.kappa = r.required<double>("etm.kappa");
  for (int j = 0; j < 4; ++j)
    cfg.etm.kappas[static_cast<std::size_t>(j)] =
        r.required<double>("etm.kappa" + std::to_string(j + 1));
  cfg.etm.m0 = r.required<double>("etm.m0");
  cfg.open_loop = r.optional<bool>("etm.open_loop", false);

  cfg.n_tilde = r.required<int>("identifier.n_tilde");
  cfg.n_modes = r.required<int>("identifier.n_modes");
  cfg.rank_tol = r.optional<double>("identifier.rank_tol", 1e-8);
  cfg.regressor_form = parse_form(r.optional<std::string>("identifier.regressor_form", "grid"));

  cfg.grid.nx = r.required<Eigen::Index>("grid.nx");
  cfg.grid.dt = r.required<double>("grid.dt");
  cfg.kernel_nx = r.optional<Eigen::Index>("grid.kernel_nx", 21);
  cfg.scheme = parse_scheme(r.optional<std::string>("grid.kernel_scheme", "paper"));
  cfg.horizon = r.optional<double>("grid.horizon", 4.0);

  cfg.ic.shape = parse_shape(r.required<std::string>("initial.shape"));
  cfg.ic.n_bar = cfg.ic.shape == InitialShape::zero ? r.optional<int>("initial.n_bar", 0)
                                                    : r.required<int>("initial.n_bar");
  cfg.ic.zeta0 = r.required<double>("initial.zeta0");
  const Estimate mid = cfg.box.midpoint();
  cfg.initial_estimate.lambda_hat = r.optional<double>("initial.lambda_hat", mid.lambda_hat);
  cfg.initial_estimate.a_hat = r.optional<double>("initial.a_hat", mid.a_hat);
  cfg.seed = r.optional<std::uint64_t>("initial.seed", 0);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open scenario file " + path.string(), "");
  return parse_scenario(in, path.string());
}

void write_scenario(std::ostream& out, const ScenarioConfig& cfg) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "[plant]\n"
      << "a = " << cfg.plant.a << "\n"
      << "b = " << cfg.plant.b << "\n"
      << "eps = " << cfg.plant.eps << "\n"
      << "lambda = " << cfg.plant.lambda << "\n"
      << "q = " << cfg.plant.q << "\n\n";
  out << "[bounds]\n"
      << "lambda_lo = " << cfg.box.lambda_lo << "\n"
      << "lambda_hi = " << cfg.box.lambda_hi << "\n"
      << "a_lo = " << cfg.box.a_lo << "\n"
      << "a_hi = " << cfg.box.a_hi << "\n\n";
  out << "[etm]\n"
      << "xi = " << cfg.etm.xi << "\n"
      << "T_max = " << cfg.etm.T_max << "\n"
      << "eta = " << cfg.etm.eta << "\n"
      << "lambda_d = " << cfg.etm.lambda_d << "\n"
      << "kappa = " << cfg.kappa << "\n";
  for (int j = 0; j < 4; ++j)
    out << "kappa" << j + 1 << " = " << cfg.etm.kappas[static_cast<std::size_t>(j)] << "\n";
  out << "m0 = " << cfg.etm.m0 << "\n"
      << "open_loop = " << (cfg.open_loop ? "true" : "false") << "\n\n";
  out << "[identifier]\n"
      << "n_tilde = " << cfg.n_tilde << "\n"
      << "n_modes = " << cfg.n_modes << "\n"
      << "rank_tol = " << cfg.rank_tol << "\n"
      << "regressor_form = \"" << to_string(cfg.regressor_form) << "\"\n\n";
  out << "[grid]\n"
      << "nx = " << cfg.grid.nx << "\n"
      << "dt = " << cfg.grid.dt << "\n"
      << "kernel_nx = " << cfg.kernel_nx << "\n"
      << "kernel_scheme = \"" << to_string(cfg.scheme) << "\"\n"
      << "horizon = " << cfg.horizon << "\n\n";
  out << "[initial]\n"
      << "shape = \"" << to_string(cfg.ic.shape) << "\"\n"
      << "n_bar = " << cfg.ic.n_bar << "\n"
      << "zeta0 = " << cfg.ic.zeta0 << "\n"
      << "lambda_hat = " << cfg.initial_estimate.lambda_hat << "\n"
      << "a_hat = " << cfg.initial_estimate.a_hat << "\n"
      << "seed = " << cfg.seed << "\n";
  out.precision(old_precision);
}

void save_scenario(const std::filesystem::path& path, const ScenarioConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file " + path.string());
  write_scenario(out, cfg);
}

bool ValidationReport::ok() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::fail) return false;
  return true;
}

ValidationReport validate(const ScenarioConfig& cfg, int search_resolution) {
  ValidationReport report;
  const auto add = [&report](std::string name, CheckStatus status, std::string detail) {
    report.checks.push_back({std::move(name), status, std::move(detail)});
  };
  const auto fmt = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };

  try {
    check_config(cfg);
  } catch (const ConfigurationError& e) {
    add("structure", CheckStatus::fail, e.what());
  }

  const ThetaBox& box = cfg.box;
  const bool box_ok = box.valid() && box.contains({cfg.plant.lambda, cfg.plant.a});
  add("parameter bounds", box_ok ? CheckStatus::pass : CheckStatus::fail,
      "lambda=" + fmt(cfg.plant.lambda) + " in [" + fmt(box.lambda_lo) + ", " +
          fmt(box.lambda_hi) + "], a=" + fmt(cfg.plant.a) + " in [" + fmt(box.a_lo) + ", " +
          fmt(box.a_hi) + "]");
  if (!box.contains(cfg.initial_estimate))
    add("initial estimate", CheckStatus::fail,
        "(" + fmt(cfg.initial_estimate.lambda_hat) + ", " + fmt(cfg.initial_estimate.a_hat) +
            ") outside the parameter box");

  const double q_min = 0.25 + box.lambda_hi / (2.0 * cfg.plant.eps);
  add("robin coefficient", cfg.plant.q > q_min ? CheckStatus::pass : CheckStatus::fail,
      "q=" + fmt(cfg.plant.q) + (cfg.plant.q > q_min ? " > " : " <= ") +
          "1/4 + lambda_hi/(2 eps) = " + fmt(q_min));

  const double kappa_min = box.a_hi / cfg.plant.b;
  const bool kappa_ok = cfg.kappa > kappa_min;
  add("kappa", kappa_ok ? CheckStatus::pass : CheckStatus::fail,
      "kappa=" + fmt(cfg.kappa) + (kappa_ok ? " > " : " <= ") + "a_hi/b = " + fmt(kappa_min));

  if (kappa_ok && box.valid() && cfg.plant.eps > 0.0 && cfg.kernel_nx >= 4) {
    const DesignContext ctx{box, cfg.plant.q, cfg.plant.eps, cfg.plant.b, cfg.kappa,
                            cfg.kernel_nx, cfg.scheme};
    const auto bound = lemma1_constants(ctx, search_resolution);
    const auto suggested = suggest_kappas(bound.eps, cfg.etm.xi);
    for (int j = 0; j < 4; ++j) {
      const double have = cfg.etm.kappas[static_cast<std::size_t>(j)];
      const double want = suggested[static_cast<std::size_t>(j)];
      const bool meets = have >= want;
      add("kappa" + std::to_string(j + 1), meets ? CheckStatus::pass : CheckStatus::warn,
          "kappa" + std::to_string(j + 1) + "=" + fmt(have) + (meets ? " >= " : " < ") +
              "2 eps" + std::to_string(j + 2) + "/xi = " + fmt(want));
    }
  } else {
    add("kappa1..4", CheckStatus::warn, "not evaluated: kernel design is invalid");
  }

  add("lambda_d", CheckStatus::note,
      "lambda_d=" + fmt(cfg.etm.lambda_d) +
          "; its lower bound depends on Lyapunov constants that are not computed here");
  return report;
}

}  // namespace etbc
