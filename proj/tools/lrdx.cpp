#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "lrdx/experiment.hpp"
#include "lrdx/heavy_tails.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kToleranceFailure = 2;

void print_record(const lrdx::ResultRecord& rec) {
  std::printf("experiment %s (%s) seed=%llu  %.2fs\n", rec.experiment.c_str(), rec.kind.c_str(),
              static_cast<unsigned long long>(rec.seed), rec.wall_clock_seconds);
  for (const auto& s : rec.stats) {
    std::printf("  n=%-9lld %-36s %-14.6g se=%-12.4g reps=%lld\n", static_cast<long long>(s.n), s.name.c_str(),
                s.estimate, s.std_error, static_cast<long long>(s.replicas));
  }
  for (const auto& c : rec.checks) {
    if (c.relation == "in") {
      std::printf("  %s %s = %.6g in [%g, %g]\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value, c.threshold,
                  c.upper);
    } else {
      std::printf("  %s %s = %.6g %s %g\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value, c.relation.c_str(),
                  c.threshold);
    }
  }
}

int finish(const lrdx::ExperimentConfig& cfg, const std::string& out, const std::string& format) {
  const lrdx::ResultRecord rec = lrdx::run_experiment(cfg);
  print_record(rec);
  if (!out.empty()) lrdx::export_record(rec, format, out);
  return rec.all_passed() ? kOk : kToleranceFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lrdx: Monte-Carlo checks for long-range dependent extremes"};
  app.require_subcommand(1);

  std::string out;
  std::string format = "json";
  int workers = 1;
  long long seed = -1;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Write the result record here");
    sub->add_option("--format", format, "Output format for --out")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Master seed (LRDX_SEED still wins)");
  };

  // tails check
  auto* tails = app.add_subcommand("tails", "Tail-model diagnostics");
  tails->require_subcommand(1);
  auto* tcheck = tails->add_subcommand("check", "Inverse pair, rapid/Gamma/Pi-variation");
  lrdx::TailConfig tail_cfg;
  tcheck->add_option("--gamma", tail_cfg.gamma, "Tail exponent")->required();
  tcheck->add_option("--family", tail_cfg.family)->check(CLI::IsMember({"log-normal", "super-log-normal"}));
  tcheck->add_option("--depth", tail_cfg.depth, "Iteration depth (super-log-normal)");
  tcheck->add_option("--scale", tail_cfg.scale, "Levy-tail constant c");

  // renewal qlaw
  auto* renewal = app.add_subcommand("renewal", "Renewal dynamics");
  renewal->require_subcommand(1);
  auto* qlaw = renewal->add_subcommand("qlaw", "ECDF of min(intersection)/n vs q^(1-beta_m)");
  double q_beta = 0.6;
  long long q_n = 5000;
  long long q_reps = 5000;
  int q_m = 1;
  double q_tol = 0.03;
  qlaw->add_option("--beta", q_beta)->required();
  qlaw->add_option("--n", q_n)->required();
  qlaw->add_option("--reps", q_reps)->required();
  qlaw->add_option("--m", q_m, "Number of intersected return sets");
  qlaw->add_option("--tolerance", q_tol, "KS tolerance");
  add_common(qlaw);

  // limits selfaffine
  auto* limits = app.add_subcommand("limits", "Limit random sup-measure");
  limits->require_subcommand(1);
  auto* selfaff = limits->add_subcommand("selfaffine", "M(aB) vs M(B) + (1-beta) log a");
  int s_m = 2;
  double s_beta = 0.6;
  double s_a = 0.5;
  long long s_reps = 100000;
  int s_k = 64;
  long long s_res = 4096;
  int s_perms = 999;
  selfaff->add_option("--m", s_m, "Order of the sup-measure")->required();
  selfaff->add_option("--beta", s_beta)->required();
  selfaff->add_option("--a", s_a, "Scale factor in (0,1]")->required();
  selfaff->add_option("--reps", s_reps);
  selfaff->add_option("--truncation", s_k);
  selfaff->add_option("--resolution", s_res);
  selfaff->add_option("--permutations", s_perms);
  add_common(selfaff);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate the process described by a config");
  std::string sim_config;
  simulate->add_option("--config", sim_config)->required()->check(CLI::ExistingFile);
  add_common(simulate);

  // experiment run / list
  auto* experiment = app.add_subcommand("experiment", "Configured experiments");
  experiment->require_subcommand(1);
  auto* run = experiment->add_subcommand("run", "Run a TOML/JSON experiment config");
  std::string run_config;
  run->add_option("config", run_config)->required()->check(CLI::ExistingFile);
  add_common(run);
  auto* list = experiment->add_subcommand("list", "List built-in experiment kinds");

  // report
  auto* report = app.add_subcommand("report", "Convert a JSON result record");
  std::string report_in;
  std::string report_format = "csv";
  std::string report_out;
  report->add_option("--in", report_in)->required()->check(CLI::ExistingFile);
  report->add_option("--format", report_format)->check(CLI::IsMember({"json", "csv"}));
  report->add_option("--out", report_out, "Destination (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const auto prepare = [&](lrdx::ExperimentConfig& cfg) {
    cfg.workers = workers;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    lrdx::apply_env_overrides(cfg);
  };

  try {
    if (*tcheck) {
      const lrdx::TailModel model = tail_cfg.build();
      bool ok = true;
      for (const auto& c : lrdx::tail_diagnostics(model)) {
        std::printf("%-40s %-14.6g %s\n", c.name.c_str(), c.value, c.asserted ? (c.passed ? "PASS" : "FAIL") : "");
        ok = ok && c.passed;
      }
      return ok ? kOk : kToleranceFailure;
    }
    if (*qlaw) {
      lrdx::ExperimentConfig cfg;
      cfg.id = "renewal-qlaw";
      cfg.kind = "qlaw";
      cfg.m = q_m;
      cfg.beta = q_beta;
      cfg.n_grid = {q_n};
      cfg.replicas = q_reps;
      cfg.parameters["tolerance"] = {q_tol};
      prepare(cfg);
      return finish(cfg, out, format);
    }
    if (*selfaff) {
      lrdx::ExperimentConfig cfg;
      cfg.id = "limits-selfaffine";
      cfg.kind = "selfaffine";
      cfg.m = s_m;
      cfg.beta = s_beta;
      cfg.replicas = s_reps;
      cfg.truncation = s_k;
      cfg.resolution = s_res;
      cfg.parameters["a"] = {s_a};
      cfg.parameters["order"] = {static_cast<double>(s_m)};
      cfg.parameters["permutations"] = {static_cast<double>(s_perms)};
      prepare(cfg);
      return finish(cfg, out, format);
    }
    if (*simulate) {
      lrdx::ExperimentConfig cfg = lrdx::load_config(sim_config);
      cfg.kind = "simulate";
      prepare(cfg);
      return finish(cfg, out, format);
    }
    if (*run) {
      lrdx::ExperimentConfig cfg = lrdx::load_config(run_config);
      prepare(cfg);
      return finish(cfg, out, format);
    }
    if (*list) {
      for (const auto& k : lrdx::builtin_experiments()) std::cout << k << '\n';
      return kOk;
    }
    if (*report) {
      const lrdx::ResultRecord rec = lrdx::record_from_json(lrdx::read_text_file(report_in));
      if (report_out.empty()) {
        std::cout << (report_format == "csv" ? lrdx::record_to_csv(rec) : lrdx::record_to_json(rec));
      } else {
        lrdx::export_record(rec, report_format, report_out);
      }
      return kOk;
    }
  } catch (const lrdx::ConfigError& e) {
    std::cerr << "invalid config:\n";
    for (const auto& p : e.problems()) std::cerr << "  - " << p << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
