#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "manifest.hpp"
#include "pathgauge/parallel.hpp"

using namespace pathgauge::cli;

int main(int argc, char** argv) {
  CLI::App app{"pathgauge: packet-pair available bandwidth estimation toolkit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 0;
  app.add_option("-j,--jobs", jobs, "Worker threads for parallel kernels (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  FetchOptions fetch;
  auto* f = app.add_subcommand("fetch", "Collect delay records from files or TCP collectors");
  f->add_option("-s,--source", fetch.sources, "LABEL=URI, e.g. tt01->tt146=tcp://tt01.ripe.net")
      ->required();
  f->add_option("-o,--out", fetch.out_dir, "Output directory")->required();
  f->add_option("--port", fetch.port, "Port for tcp sources without one (default 9142)");
  f->add_option("--request", fetch.request, "Request line sent after connecting");
  f->add_option("--idle-timeout", fetch.idle_timeout, "Seconds without data before stopping")
      ->capture_default_str();
  f->add_option("--timeout", fetch.total_timeout, "Total seconds per TCP source");
  f->add_option("--max-lines", fetch.max_lines, "Stop a TCP source after this many lines");

  EstimateOptions est;
  auto* e = app.add_subcommand("estimate", "Packet-pair bandwidth estimates and SD-vs-n tables");
  e->add_option("-r,--records", est.records, "[LABEL=]PATH of a record file (one per direction)")
      ->required();
  e->add_option("-w,--window", est.windows, "Averaging window sizes for estimate curves")
      ->delimiter(',')
      ->capture_default_str();
  e->add_option("--stride", est.stride, "Window stride (default: window size)");
  e->add_option("--n-grid", est.n_grid, "n values for the SD table")->delimiter(',');
  e->add_option("--pairing", est.pairing, "adjacent | nearest")->capture_default_str();
  e->add_option("--max-gap", est.max_gap, "Max send-time gap for nearest pairing, s")
      ->capture_default_str();
  e->add_option("--small-size", est.small_size, "Small probe size, bytes");
  e->add_option("--large-size", est.large_size, "Large probe size, bytes");
  e->add_option("--threshold", est.threshold, "Asymmetry flag threshold (ratio)")
      ->capture_default_str();
  e->add_option("--clock-precision", est.clock_precision, "Timestamp quantum for the resolution bound, s");
  e->add_option("--target-eta", est.target_eta, "Relative error for the resolution bound")
      ->capture_default_str();
  e->add_option("-o,--out", est.out_dir, "Output directory (default: JSON on stdout)");

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Monte Carlo error tables under exponential delay noise");
  s->add_option("--preset", sim.preset, "ipv4-table3 | ipv6-table4");
  s->add_option("--config", sim.config_file, "key = value config file");
  s->add_option("--lambda", sim.lambdas, "Exponential rate(s), 1/s; several values sweep")
      ->delimiter(',');
  s->add_option("--delta-d", sim.delta_ds, "True D2-D1, s; several values sweep")->delimiter(',');
  s->add_option("--d-min", sim.d_min, "Fixed delay floor, s");
  s->add_option("--delta-w", sim.delta_w, "Packet size difference, bits");
  s->add_option("--trials", sim.trials, "Trials per n");
  s->add_option("--n-values", sim.n_values, "Window sizes")->delimiter(',');
  s->add_option("--seed", sim.seed, "RNG seed (overrides PATHGAUGE_SEED; default 42)");
  s->add_option("--clock-quantum", sim.clock_quantum, "Timestamp quantum, s (0 = exact)");
  s->add_option("--metric", sim.metric, "rms_reciprocal | rms_direct | mean_abs_direct")
      ->capture_default_str();
  s->add_option("--k-lambda", sim.k_lambda, "Correction factor k(lambda)");
  s->add_option("--k-delta-d", sim.k_delta_d, "Correction factor k(D2-D1)");
  s->add_option("--correction", sim.correction, "Combined correction factor");
  s->add_option("-o,--out", sim.out_dir, "Output directory (default: CSV on stdout)");
  s->add_option("--records-out", sim.records_out, "Also write a synthetic record file");
  s->add_option("--pairs", sim.pairs, "Pairs in the synthetic record file")->capture_default_str();
  s->add_option("--label", sim.label, "Path label of the synthetic record file")
      ->capture_default_str();

  CalibrateOptions cal;
  auto* c = app.add_subcommand("calibrate", "Correct a tabulated error table and solve for n");
  c->add_option("-t,--table", cal.table, "CSV table (n,eta_percent)")->required();
  c->add_option("--target", cal.target, "Target error, percent")->required();
  c->add_option("--k-lambda", cal.k_lambda, "Correction factor k(lambda)");
  c->add_option("--k-delta-d", cal.k_delta_d, "Correction factor k(D2-D1)");
  c->add_option("--correction", cal.correction, "Combined correction factor");
  c->add_option("--lambda-exp", cal.lambda_exp, "Measured lambda, 1/s");
  c->add_option("--lambda-t", cal.lambda_t, "Tabulated lambda, 1/s");
  c->add_option("--delta-d-exp", cal.delta_d_exp, "Measured D2-D1, s");
  c->add_option("--delta-d-t", cal.delta_d_t, "Tabulated D2-D1, s");
  c->add_flag("--interpolate", cal.interpolate, "Also interpolate n on log n / log eta");

  ReportOptions rep;
  auto* r = app.add_subcommand("report", "Summarize a run directory and verify its manifest");
  r->add_option("path", rep.path, "Run directory or report JSON")->required();
  r->add_flag("--check", rep.check, "Verify output and input digests");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  pathgauge::set_max_threads(jobs);
  if (*f) return cmd_fetch(fetch);
  if (*e) return cmd_estimate(est);
  if (*s) return cmd_simulate(sim);
  if (*c) return cmd_calibrate(cal);
  if (*r) return cmd_report(rep);
  return kExitUsage;
}
