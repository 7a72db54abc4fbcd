// etbc: simulate, validate and plot adaptive event-triggered boundary control runs.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "etbc/artifacts.hpp"
#include "etbc/errors.hpp"
#include "etbc/scenario.hpp"
#include "etbc/simulator.hpp"
#include "etbc/svg.hpp"

namespace fs = std::filesystem;
using namespace etbc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
  std::string scenario = "paper_vi.toml";
  std::string out;
  std::string scheme;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
};

fs::path resolve_scenario(const std::string& name) {
  const fs::path p(name);
  if (fs::exists(p)) return p;
  const fs::path bundled = fs::path(ETBC_SCENARIO_DIR) / p.filename();
  if (fs::exists(bundled)) return bundled;
  throw std::runtime_error("scenario file not found: " + name);
}

ScenarioConfig load(const CommonOptions& o) {
  ScenarioConfig cfg = load_scenario(resolve_scenario(o.scenario));
  if (o.scheme == "paper") cfg.scheme = KernelScheme::paper;
  if (o.scheme == "refined") cfg.scheme = KernelScheme::refined;
  if (o.seed) cfg.seed = *o.seed;
  if (o.horizon) cfg.horizon = *o.horizon;
  return cfg;
}

void print_report(const ValidationReport& r, std::ostream& os) {
  for (const auto& c : r.checks)
    os << "[" << to_string(c.status) << "] " << c.name << ": " << c.detail << "\n";
}

// Hard validation failures stop simulate and batch before any stepping.
bool preflight(const ScenarioConfig& cfg) {
  const ValidationReport r = validate(cfg);
  if (r.ok()) return true;
  print_report(r, std::cerr);
  return false;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_out) {
  cmd->add_option("--scenario", o.scenario, "scenario file (bundled names are resolved too)");
  auto* out = cmd->add_option("--out", o.out, "output directory");
  if (needs_out) out->required();
  cmd->add_option("--kernel-scheme", o.scheme, "h-kernel closure")
      ->check(CLI::IsMember({"paper", "refined"}));
  cmd->add_option("--seed", o.seed, "random seed (recorded; the loop is deterministic)");
  cmd->add_option("--horizon", o.horizon, "simulated time in seconds")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive event-triggered boundary control of a reaction-diffusion PDE-ODE cascade"};
  app.require_subcommand(1);

  CommonOptions sim_opt;
  bool open_loop = false;
  auto* sim = app.add_subcommand("simulate", "run one scenario, write trajectory.csv, events.json, summary.json");
  add_common(sim, sim_opt, true);
  sim->add_flag("--open-loop", open_loop, "apply zero input");

  CommonOptions batch_opt;
  int members = 100, bins = 50;
  double zeta0 = 0.2;
  std::optional<double> eta;
  unsigned threads = 0;
  auto* batch = app.add_subcommand("batch", "inter-event time histogram over u0 = x^2 sin(n pi x)");
  add_common(batch, batch_opt, true);
  batch->add_option("--members", members, "family size")->check(CLI::PositiveNumber);
  batch->add_option("--zeta0", zeta0, "initial ODE state of every member");
  batch->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);
  batch->add_option("--eta", eta, "override the decay rate of m")->check(CLI::PositiveNumber);
  batch->add_option("--threads", threads, "worker threads (0 = hardware)");

  CommonOptions ker_opt;
  std::optional<double> lambda_hat, a_hat;
  std::optional<long> kernel_nx;
  auto* ker = app.add_subcommand("kernels", "dump K1(1,y) and K2 for an estimate");
  add_common(ker, ker_opt, false);
  ker->add_option("--lambda-hat", lambda_hat, "reaction estimate (default: scenario initial)");
  ker->add_option("--a-hat", a_hat, "ODE pole estimate (default: scenario initial)");
  ker->add_option("--nx", kernel_nx, "kernel grid nodes")->check(CLI::Range(3L, 100000L));

  CommonOptions sk_opt;
  int resolution = 11;
  auto* sk = app.add_subcommand("suggest-kappas", "derivative-bound constants, dwell bound and kappa suggestions");
  add_common(sk, sk_opt, false);
  sk->add_option("--resolution", resolution, "samples per box axis")->check(CLI::Range(2, 1000));

  CommonOptions val_opt;
  auto* val = app.add_subcommand("validate", "check design conditions in selection order");
  add_common(val, val_opt, false);

  std::string plot_in, plot_events, plot_out, fig_name = "states";
  auto* plot = app.add_subcommand("plot", "render an SVG chart from simulate artifacts");
  plot->add_option("--in", plot_in, "trajectory.csv")->required();
  plot->add_option("--events", plot_events, "events.json (default: next to --in)");
  plot->add_option("--fig", fig_name, "figure")
      ->check(CLI::IsMember({"states", "etm", "estimates", "input", "dwell"}));
  plot->add_option("--out", plot_out, "output SVG (default: <fig>.svg next to --in)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitRuntime;
  }

  try {
    if (*sim) {
      ScenarioConfig cfg = load(sim_opt);
      if (open_loop) cfg.open_loop = true;
      if (!preflight(cfg)) return kExitValidation;
      const TrajectoryLog log = run(cfg);
      const Summary s = summarize(log, cfg);
      write_simulation_artifacts(sim_opt.out, log, s);
      std::cout << "events " << s.event_count << ", min dwell " << s.min_dwell << " s, final |u| "
                << s.final_u_norm << ", |zeta| " << s.final_zeta_abs << "\n";
    } else if (*batch) {
      ScenarioConfig cfg = load(batch_opt);
      if (eta) cfg.etm.eta = *eta;
      if (!preflight(cfg)) return kExitValidation;
      const BatchResult r = run_batch(cfg, members, zeta0, bins, threads);
      for (const auto& f : r.failures)
        std::cerr << "warning: member n_bar=" << f.n_bar << " excluded: " << f.what << "\n";
      std::ostringstream csv;
      write_histogram_csv(csv, r.hist);
      write_file(fs::path(batch_opt.out) / "histogram.csv", csv.str());
      nlohmann::json failures = nlohmann::json::array();
      for (const auto& f : r.failures) failures.push_back({{"n_bar", f.n_bar}, {"error", f.what}});
      const nlohmann::json j = {{"schema", kSchemaVersion}, {"members", r.members},
                                {"eta", cfg.etm.eta},       {"dwell_count", r.dwells.size()},
                                {"mode", r.hist.mode()},    {"failures", failures}};
      write_file(fs::path(batch_opt.out) / "batch.json", j.dump(2) + "\n");
      std::cout << "pooled " << r.dwells.size() << " dwells, mode " << r.hist.mode() << " s\n";
    } else if (*ker) {
      const ScenarioConfig cfg = load(ker_opt);
      const KernelParams kp{lambda_hat.value_or(cfg.initial_estimate.lambda_hat),
                            a_hat.value_or(cfg.initial_estimate.a_hat),
                            cfg.plant.eps,
                            cfg.plant.b,
                            cfg.plant.q,
                            cfg.kappa};
      const GainSet g = compute_gains(kp, kernel_nx.value_or(cfg.kernel_nx), cfg.scheme);
      std::ostringstream csv;
      write_kernel_csv(csv, g);
      const std::string header = kernel_header_json(g).dump(2) + "\n";
      if (ker_opt.out.empty()) {
        std::cout << header << csv.str();
      } else {
        write_file(fs::path(ker_opt.out) / "gains.json", header);
        write_file(fs::path(ker_opt.out) / "gains.csv", csv.str());
      }
    } else if (*sk) {
      const ScenarioConfig cfg = load(sk_opt);
      const DesignContext ctx{cfg.box,   cfg.plant.q,   cfg.plant.eps, cfg.plant.b,
                              cfg.kappa, cfg.kernel_nx, cfg.scheme};
      const DerivativeBound b = lemma1_constants(ctx, resolution);
      const DwellReport r = dwell_bound(b, cfg.etm);
      const std::string text = dwell_report_json(r, b, suggest_kappas(b.eps, cfg.etm.xi)).dump(2) + "\n";
      if (sk_opt.out.empty())
        std::cout << text;
      else
        write_file(fs::path(sk_opt.out) / "dwell.json", text);
    } else if (*val) {
      const ScenarioConfig cfg = load(val_opt);
      const ValidationReport r = validate(cfg);
      print_report(r, std::cout);
      if (!val_opt.out.empty())
        write_file(fs::path(val_opt.out) / "validation.json", validation_json(r).dump(2) + "\n");
      return r.ok() ? kExitOk : kExitValidation;
    } else if (*plot) {
      const fs::path in(plot_in);
      const fs::path ev = plot_events.empty() ? in.parent_path() / "events.json" : fs::path(plot_events);
      std::ifstream csv(in);
      if (!csv) throw std::runtime_error("cannot open " + in.string());
      const auto rows = read_trajectory_csv(csv);
      TrajectoryLog events;
      if (std::ifstream js(ev); js) {
        events = events_from_json(nlohmann::json::parse(js));
      } else if (!plot_events.empty()) {
        throw std::runtime_error("cannot open " + ev.string());
      }
      const Chart chart = make_chart(parse_figure(fig_name), rows, events);
      const fs::path out = plot_out.empty() ? in.parent_path() / (fig_name + ".svg") : fs::path(plot_out);
      write_file(out, render_svg(chart));
      std::cout << out.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
