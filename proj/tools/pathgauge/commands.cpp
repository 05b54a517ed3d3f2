#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "manifest.hpp"
#include "pathgauge/error.hpp"
#include "pathgauge/estimator.hpp"
#include "pathgauge/ingest.hpp"
#include "pathgauge/report.hpp"
#include "pathgauge/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pathgauge::cli {

namespace {

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    default:
      return kExitData;
  }
}

int fail(int code, const std::string& msg) {
  std::cerr << "pathgauge: " << msg << "\n";
  return code;
}

std::string file_stem_for(const std::string& label) {
  std::string out;
  bool sep = false;
  for (unsigned char c : label) {
    if (std::isalnum(c) || c == '.') {
      if (sep && !out.empty()) out.push_back('_');
      out.push_back(static_cast<char>(c));
      sep = false;
    } else {
      sep = true;
    }
  }
  return out.empty() ? "records" : out;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

std::string records_text(const Direction& dir, const std::string& source,
                         const std::vector<DelayRecord>& records) {
  std::string text = "# direction: " + dir.label() + "\n";
  if (!source.empty()) text += "# source: " + source + "\n";
  text += "# seq_id packet_size_bytes send_time_s delay_s\n";
  for (const auto& r : records) text += ingest::format_record_line(r) + "\n";
  return text;
}

std::string describe_report(const ingest::IngestReport& r) {
  std::ostringstream s;
  s << r.accepted << " accepted, " << r.rejected_total() << " rejected, "
    << r.parse_errors << " parse errors, " << r.skipped << " skipped";
  if (r.duplicate_seq) s << ", " << r.duplicate_seq << " duplicate seq";
  if (r.out_of_order) s << ", " << r.out_of_order << " out of order";
  return s.str();
}

std::string table_line(const ErrorTable& t) {
  std::string s;
  for (const auto& r : t.rows())
    s += "  n=" + std::to_string(r.n) + ": " + report::format_sig(r.value) + "\n";
  return s;
}

std::string csv_of(const ErrorTable& t, std::span<const std::uint64_t> skipped = {}) {
  std::ostringstream s;
  report::write_table_csv(s, t, skipped);
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// fetch

int cmd_fetch(const FetchOptions& opt) {
  if (opt.sources.empty() || opt.sources.size() > 2)
    return fail(kExitUsage, "fetch takes one or two --source LABEL=URI arguments");
  if (opt.port && (*opt.port < 1 || *opt.port > 65535))
    return fail(kExitUsage, "--port must be in 1..65535");

  std::vector<ingest::RecordSource> sources;
  try {
    for (std::size_t i = 0; i < opt.sources.size(); ++i) {
      const auto& spec = opt.sources[i];
      auto eq = spec.find('=');
      if (eq == std::string::npos)
        return fail(kExitUsage, "source '" + spec + "' must be LABEL=URI");
      std::string label = spec.substr(0, eq);
      if (!Direction::parse(label).well_formed())
        return fail(kExitUsage, "source label '" + label + "' must look like a->b");
      auto src = ingest::parse_source_uri(
          spec.substr(eq + 1), label,
          i == 0 ? Orientation::kForward : Orientation::kReverse,
          opt.port ? static_cast<std::uint16_t>(*opt.port) : ingest::kDefaultPort);
      if (auto* tcp = std::get_if<ingest::TcpSource>(&src.kind)) {
        tcp->request_line = opt.request;
        tcp->idle_timeout = std::chrono::milliseconds(static_cast<long>(opt.idle_timeout * 1000));
        if (opt.total_timeout)
          tcp->total_timeout = std::chrono::milliseconds(static_cast<long>(*opt.total_timeout * 1000));
        tcp->max_lines = opt.max_lines;
      }
      sources.push_back(std::move(src));
    }
  } catch (const Error& e) {
    return fail(kExitUsage, e.what());
  }

  std::vector<ingest::RecordStream> streams;
  if (sources.size() == 2) {
    auto both = ingest::collect_bidirectional(sources[0], sources[1]);
    streams.push_back(std::move(both.a));
    streams.push_back(std::move(both.b));
  } else {
    streams.push_back(ingest::collect(sources[0]));
  }

  const fs::path out_dir = opt.out_dir;
  json config{{"sources", opt.sources},
              {"port", opt.port ? *opt.port : ingest::kDefaultPort},
              {"idle_timeout_s", opt.idle_timeout}};
  if (opt.request) config["request"] = *opt.request;
  RunManifest manifest("fetch", config);

  json per_source = json::array();
  std::uint64_t accepted = 0;
  bool any_error = false;
  try {
    ensure_dir(out_dir);
    std::vector<std::pair<std::string, std::string>> files;
    for (std::size_t i = 0; i < streams.size(); ++i) {
      const auto& s = streams[i];
      const std::string where = sources[i].describe();
      if (std::holds_alternative<ingest::FileSource>(sources[i].kind) && !s.error)
        manifest.add_input(std::get<ingest::FileSource>(sources[i].kind).path);
      const std::string name = file_stem_for(s.direction.label()) + ".records";
      const std::string text = records_text(s.direction, where, s.records);
      if (!std::holds_alternative<ingest::FileSource>(sources[i].kind))
        manifest.add_input_text(where, text);
      files.emplace_back(name, text);

      std::cerr << s.direction.label() << " <- " << where << ": " << describe_report(s.report) << "\n";
      json entry{{"direction", s.direction.label()},
                 {"source", where},
                 {"file", name},
                 {"ingest", report::to_json(s.report)}};
      if (s.error) {
        any_error = true;
        std::cerr << "pathgauge: error: " << s.error->source << ": "
                  << ingest::to_string(s.error->kind) << " (" << s.error->cause << ")\n";
        entry["error"] = {{"kind", std::string(ingest::to_string(s.error->kind))},
                          {"cause", s.error->cause}};
      }
      accepted += s.report.accepted;
      per_source.push_back(std::move(entry));
    }
    for (const auto& [name, text] : files) manifest.write_output(out_dir, name, text);
    json doc{{"manifest", manifest.reference()}, {"sources", per_source}};
    manifest.write_output(out_dir, "fetch.json", doc.dump(2) + "\n");
    manifest.finish_and_write(out_dir);
  } catch (const Error& e) {
    return fail(exit_for(e), e.what());
  }
  if (any_error) return kExitData;
  if (accepted == 0) return fail(kExitData, "no records accepted from any source");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// estimate

namespace {

struct DirectionRun {
  Direction direction;
  std::string path;
  ingest::IngestReport ingest;
  estimator::PairingResult pairing;
  std::vector<estimator::WindowedEstimates> windows;
  std::optional<ErrorTable> sd;
  std::optional<int> required_n;
  double overall_mean_delta_d = 0.0;
};

}  // namespace

int cmd_estimate(const EstimateOptions& opt) {
  if (opt.records.empty() || opt.records.size() > 2)
    return fail(kExitUsage, "estimate takes one or two --records [LABEL=]PATH arguments");
  for (int w : opt.windows)
    if (w < 1) return fail(kExitUsage, "--window values must be >= 1");
  if (opt.stride && *opt.stride < 1) return fail(kExitUsage, "--stride must be >= 1");
  if (opt.pairing != "adjacent" && opt.pairing != "nearest")
    return fail(kExitUsage, "--pairing must be 'adjacent' or 'nearest'");
  std::vector<int> grid = opt.n_grid.empty() ? estimator::kDefaultNGrid : opt.n_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.front() < 1) return fail(kExitUsage, "--n-grid values must be >= 1");

  const auto policy = opt.pairing == "nearest"
                          ? estimator::PairingPolicy::nearest_send_time(opt.max_gap)
                          : estimator::PairingPolicy::adjacent();

  json config{{"records", opt.records},  {"windows", opt.windows},
              {"n_grid", grid},          {"pairing", opt.pairing},
              {"threshold", opt.threshold}};
  if (opt.pairing == "nearest") config["max_gap_s"] = opt.max_gap;
  if (opt.stride) config["stride"] = *opt.stride;
  if (opt.small_size) config["small_size"] = *opt.small_size;
  if (opt.large_size) config["large_size"] = *opt.large_size;
  RunManifest manifest("estimate", config);

  std::vector<DirectionRun> runs;
  try {
    for (std::size_t i = 0; i < opt.records.size(); ++i) {
      std::string label, path = opt.records[i];
      if (auto eq = path.find('='); eq != std::string::npos &&
                                    Direction::parse(path.substr(0, eq)).well_formed()) {
        label = path.substr(0, eq);
        path = path.substr(eq + 1);
      }
      ingest::RecordSource src{ingest::FileSource{path}, label,
                               i == 0 ? Orientation::kForward : Orientation::kReverse};
      auto stream = ingest::collect(src);
      if (stream.error)
        return fail(kExitData, stream.error->source + ": " +
                                   std::string(ingest::to_string(stream.error->kind)) +
                                   " (" + stream.error->cause + ")");
      manifest.add_input(path);
      if (stream.records.empty())
        return fail(kExitData, path + ": no accepted records (" + describe_report(stream.report) +
                                   "; a path label is required, via LABEL= or a '# direction:' line)");

      auto by_size = ingest::split_by_size(stream.records);
      std::uint32_t small = 0, large = 0;
      if (opt.small_size || opt.large_size) {
        if (!opt.small_size || !opt.large_size)
          return fail(kExitUsage, "--small-size and --large-size go together");
        small = *opt.small_size;
        large = *opt.large_size;
      } else if (by_size.size() == 2) {
        small = by_size.begin()->first;
        large = std::prev(by_size.end())->first;
      } else {
        return fail(kExitData, path + ": found " + std::to_string(by_size.size()) +
                                   " packet sizes; pick two with --small-size/--large-size");
      }
      if (small >= large) return fail(kExitUsage, "small size must be below large size");

      DirectionRun run;
      run.direction = stream.direction;
      run.path = path;
      run.ingest = stream.report;
      run.pairing = estimator::pair_samples(by_size[small], by_size[large], policy);
      runs.push_back(std::move(run));
    }

    for (auto& run : runs) {
      const auto& pairs = run.pairing.pairs;
      if (pairs.empty())
        return fail(kExitData, run.path + ": no packet pairs formed");
      if (static_cast<std::size_t>(grid.back()) > pairs.size()) {
        std::string feasible;
        for (int n : grid)
          if (static_cast<std::size_t>(n) <= pairs.size())
            feasible += (feasible.empty() ? "" : ",") + std::to_string(n);
        return fail(kExitData, "insufficient data: " + run.direction.label() + " has " +
                                   std::to_string(pairs.size()) + " pairs but n=" +
                                   std::to_string(grid.back()) + " was requested; feasible grid: " +
                                   (feasible.empty() ? "(none)" : feasible));
      }
      for (int w : opt.windows) {
        estimator::WindowSpec spec{static_cast<std::size_t>(w),
                                   opt.stride ? static_cast<std::size_t>(*opt.stride)
                                              : static_cast<std::size_t>(w)};
        run.windows.push_back(estimator::estimate_bandwidth(pairs, spec));
      }
      run.sd = estimator::sd_vs_n(pairs, grid);
      run.required_n = estimator::required_n_2sigma(*run.sd, *run.sd->mean_bandwidth());
      double sum = 0.0;
      for (const auto& p : pairs) sum += p.delta_d();
      run.overall_mean_delta_d = sum / static_cast<double>(pairs.size());
    }

    json doc{{"manifest", manifest.reference()}};
    json dirs = json::array();
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& run : runs) {
      const auto delta_w = run.pairing.pairs.front().delta_w();
      const std::string stem = file_stem_for(run.direction.label());
      json d{{"direction", run.direction.label()},
             {"ingest", report::to_json(run.ingest)},
             {"pairs", run.pairing.pairs.size()},
             {"unpaired_small", run.pairing.unpaired_small},
             {"unpaired_large", run.pairing.unpaired_large},
             {"delta_w_bits", delta_w},
             {"mean_delta_d_s", run.overall_mean_delta_d},
             {"sd_table", report::to_json(*run.sd)},
             {"required_n_2sigma", run.required_n ? json(*run.required_n) : json(nullptr)}};
      if (run.overall_mean_delta_d > 0.0)
        d["overall_bps"] = static_cast<double>(delta_w) / run.overall_mean_delta_d;
      json windows = json::array();
      std::vector<BandwidthEstimate> all;
      for (std::size_t i = 0; i < run.windows.size(); ++i) {
        const auto& w = run.windows[i];
        windows.push_back({{"n", opt.windows[i]},
                           {"estimates", w.estimates.size()},
                           {"skipped", w.skipped_windows.size()}});
        all.insert(all.end(), w.estimates.begin(), w.estimates.end());
      }
      d["windows"] = windows;
      dirs.push_back(d);

      std::ostringstream est;
      report::write_estimates_csv(est, all);
      files.emplace_back("estimates_" + stem + ".csv", est.str());
      files.emplace_back("sd_" + stem + ".csv", csv_of(*run.sd));

      std::cerr << run.direction.label() << ": " << run.pairing.pairs.size() << " pairs";
      if (d.contains("overall_bps"))
        std::cerr << ", B_av = " << report::format_sig(d["overall_bps"].get<double>() / 1e6) << " Mbps";
      std::cerr << " (mean dD " << report::format_sig(run.overall_mean_delta_d) << " s)\n"
                << "  sigma_n(B), Mbps:\n" << table_line(*run.sd);
      if (run.required_n)
        std::cerr << "  2-sigma rule met from n = " << *run.required_n << "\n";
      else
        std::cerr << "  2-sigma rule not met on this grid\n";
    }
    doc["directions"] = dirs;

    if (runs.size() == 2) {
      auto asym = estimator::compare_directions(*runs[0].sd, *runs[1].sd, opt.threshold);
      doc["asymmetry"] = report::to_json(asym);
      std::cerr << "asymmetry: " << asym.summary << "\n";
    }
    if (opt.clock_precision) {
      const double dw = static_cast<double>(runs.front().pairing.pairs.front().delta_w());
      const double bound =
          estimator::max_measurable_bandwidth(*opt.clock_precision, opt.target_eta, dw);
      doc["resolution_bound"] = {{"clock_precision_s", *opt.clock_precision},
                                 {"target_relative_error", opt.target_eta},
                                 {"max_bps", bound}};
      std::cerr << "resolution bound: " << report::format_sig(bound / 1e6) << " Mbps at eta="
                << report::format_sig(opt.target_eta) << "\n";
    }

    if (opt.out_dir) {
      const fs::path dir = *opt.out_dir;
      ensure_dir(dir);
      for (const auto& [name, text] : files) manifest.write_output(dir, name, text);
      manifest.write_output(dir, "estimate.json", doc.dump(2) + "\n");
      manifest.finish_and_write(dir);
    } else {
      std::cout << doc.dump(2) << "\n";
    }
  } catch (const Error& e) {
    return fail(exit_for(e), e.what());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const SimulateOptions& opt) {
  std::vector<std::string> errors;
  SimConfig cfg;
  simulator::CorrectionFactors correction;

  if (opt.preset) {
    auto preset = simulator::find_preset(*opt.preset);
    if (!preset) {
      std::string names;
      for (const auto& n : simulator::preset_names()) names += " " + n;
      errors.push_back("unknown preset '" + *opt.preset + "' (available:" + names + ")");
    } else {
      cfg = preset->config;
      correction = preset->correction;
    }
  }
  cfg.rng_seed = kDefaultSeed;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (errno || *end || *env == '-') errors.push_back(std::string(kSeedEnv) + " is not an unsigned integer");
    else cfg.rng_seed = v;
  }
  if (opt.config_file) {
    std::ifstream in(*opt.config_file);
    if (!in) errors.push_back("cannot open config file " + *opt.config_file);
    else cfg = report::parse_sim_config(in, cfg, errors);
  }
  if (opt.lambdas.size() == 1) cfg.lambda_rate = opt.lambdas[0];
  if (opt.delta_ds.size() == 1) cfg.true_delta_d = opt.delta_ds[0];
  if (opt.d_min) cfg.d_min = *opt.d_min;
  if (opt.delta_w) cfg.delta_w = *opt.delta_w;
  if (opt.trials) {
    if (*opt.trials < 1) errors.push_back("trials must be >= 1");
    else cfg.trials = static_cast<std::uint64_t>(*opt.trials);
  }
  if (!opt.n_values.empty()) cfg.n_values = opt.n_values;
  if (opt.seed) cfg.rng_seed = *opt.seed;
  if (opt.clock_quantum) cfg.clock_quantum = *opt.clock_quantum;
  if (opt.correction) correction = {1.0, *opt.correction};
  if (opt.k_lambda) correction.k_lambda = *opt.k_lambda;
  if (opt.k_delta_d) correction.k_delta_d = *opt.k_delta_d;

  auto metric = simulator::parse_metric(opt.metric);
  if (!metric) errors.push_back("unknown metric '" + opt.metric + "'");
  for (auto& e : cfg.validation_errors()) errors.push_back(std::move(e));
  for (double l : opt.lambdas)
    if (!(l > 0.0)) errors.push_back("lambda values must be positive");
  for (double d : opt.delta_ds)
    if (!(d > 0.0)) errors.push_back("delta_d values must be positive");
  if (!(correction.k_lambda > 0.0) || !(correction.k_delta_d > 0.0))
    errors.push_back("correction factors must be positive");
  const bool is_sweep = opt.lambdas.size() > 1 || opt.delta_ds.size() > 1;
  if (is_sweep && opt.records_out) errors.push_back("--records-out cannot be combined with a sweep");
  if (opt.records_out && (cfg.delta_w % 8 != 0 || opt.pairs == 0))
    errors.push_back("--records-out needs delta_w in whole bytes and --pairs >= 1");
  if (opt.records_out && !Direction::parse(opt.label).well_formed())
    errors.push_back("--label must look like a->b");
  if (!errors.empty()) {
    std::cerr << "pathgauge: invalid simulation config:\n";
    for (const auto& e : errors) std::cerr << "  - " << e << "\n";
    return kExitUsage;
  }

  json config = report::to_json(cfg);
  config["metric"] = opt.metric;
  config["k_lambda"] = correction.k_lambda;
  config["k_delta_d"] = correction.k_delta_d;
  if (opt.preset) config["preset"] = *opt.preset;
  if (is_sweep) {
    config["lambda_grid"] = opt.lambdas.empty() ? std::vector<double>{cfg.lambda_rate} : opt.lambdas;
    config["delta_d_grid"] = opt.delta_ds.empty() ? std::vector<double>{cfg.true_delta_d} : opt.delta_ds;
  }
  if (opt.records_out) {
    config["records_out"] = {{"pairs", opt.pairs}, {"label", opt.label}};
  }
  RunManifest manifest(is_sweep ? "simulate-sweep" : "simulate", config);

  try {
    if (opt.config_file) manifest.add_input(*opt.config_file);

    if (opt.records_out) {
      simulator::DatasetSpec spec;
      spec.model = cfg;
      spec.pairs = opt.pairs;
      spec.direction = Direction::parse(opt.label);
      auto records = simulator::generate_records(spec);
      std::ofstream out(*opt.records_out, std::ios::binary);
      out << records_text(spec.direction, "simulator seed=" + std::to_string(cfg.rng_seed), records);
      if (!out) return fail(kExitData, "cannot write " + *opt.records_out);
      std::cerr << "wrote " << records.size() << " records to " << *opt.records_out
                << " (true B = " << report::format_sig(cfg.true_bandwidth() / 1e6) << " Mbps)\n";
    }

    if (is_sweep) {
      simulator::SweepGrid grid{
          opt.lambdas.empty() ? std::vector<double>{cfg.lambda_rate} : opt.lambdas,
          opt.delta_ds.empty() ? std::vector<double>{cfg.true_delta_d} : opt.delta_ds};
      auto points = simulator::sweep(cfg, grid, *metric);
      std::ostringstream csv;
      csv << "point,lambda,true_delta_d,seed,n,eta_percent,skipped\n";
      json pts = json::array();
      bool any_failed = false;
      for (const auto& p : points) {
        json entry{{"point", p.index}, {"config", report::to_json(p.config)}};
        if (!p.result) {
          any_failed = true;
          entry["error"] = p.error;
          std::cerr << "pathgauge: sweep point " << p.index << ": " << p.error << "\n";
        } else {
          const auto& rows = p.result->eta_table.rows();
          for (std::size_t i = 0; i < rows.size(); ++i)
            csv << p.index << ',' << report::format_number(p.config.lambda_rate) << ','
                << report::format_number(p.config.true_delta_d) << ',' << p.config.rng_seed << ','
                << rows[i].n << ',' << report::format_number(rows[i].value) << ','
                << p.result->skipped_per_n[i] << '\n';
          entry["result"] = report::to_json(*p.result);
        }
        pts.push_back(std::move(entry));
      }
      if (opt.out_dir) {
        ensure_dir(*opt.out_dir);
        manifest.write_output(*opt.out_dir, "sweep.csv", csv.str());
        json doc{{"manifest", manifest.reference()}, {"points", pts}};
        manifest.write_output(*opt.out_dir, "simulate.json", doc.dump(2) + "\n");
        manifest.finish_and_write(*opt.out_dir);
      } else {
        std::cout << csv.str();
      }
      return any_failed ? kExitData : kExitOk;
    }

    auto result = simulator::simulate_eta_table(cfg, *metric);
    const bool corrected = correction.k_lambda != 1.0 || correction.k_delta_d != 1.0;
    std::optional<ErrorTable> corrected_table;
    if (corrected) corrected_table = simulator::apply_correction(result.eta_table, correction);

    std::cerr << "eta_n (" << opt.metric << ", " << cfg.trials << " trials, seed " << cfg.rng_seed
              << "), %:\n" << table_line(result.eta_table);
    if (corrected)
      std::cerr << "corrected by k = " << report::format_sig(correction.combined()) << ", %:\n"
                << table_line(*corrected_table);
    if (result.skipped_windows)
      std::cerr << result.skipped_windows << " trials skipped (non-positive delay difference)\n";

    const std::string eta_csv = csv_of(result.eta_table, result.skipped_per_n);
    const std::string final_csv =
        corrected ? csv_of(*corrected_table, result.skipped_per_n) : eta_csv;
    if (opt.out_dir) {
      ensure_dir(*opt.out_dir);
      manifest.write_output(*opt.out_dir, "eta.csv", eta_csv);
      json doc{{"manifest", manifest.reference()}, {"result", report::to_json(result)}};
      if (corrected) {
        manifest.write_output(*opt.out_dir, "eta_corrected.csv", final_csv);
        doc["correction"] = {{"k_lambda", correction.k_lambda},
                             {"k_delta_d", correction.k_delta_d},
                             {"combined", correction.combined()}};
        doc["corrected_table"] = report::to_json(*corrected_table);
      }
      manifest.write_output(*opt.out_dir, "simulate.json", doc.dump(2) + "\n");
      manifest.finish_and_write(*opt.out_dir);
    } else {
      std::cout << final_csv;
    }
  } catch (const Error& e) {
    return fail(exit_for(e), e.what());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate

int cmd_calibrate(const CalibrateOptions& opt) {
  if (!(opt.target > 0.0)) return fail(kExitUsage, "--target must be a positive percentage");
  simulator::CorrectionFactors k;
  const bool measured = opt.lambda_exp || opt.lambda_t || opt.delta_d_exp || opt.delta_d_t;
  try {
    if (measured) {
      if (bool(opt.lambda_exp) != bool(opt.lambda_t))
        return fail(kExitUsage, "--lambda-exp and --lambda-t go together");
      if (bool(opt.delta_d_exp) != bool(opt.delta_d_t))
        return fail(kExitUsage, "--delta-d-exp and --delta-d-t go together");
      k = simulator::CorrectionFactors::from_measurements(
          opt.lambda_exp.value_or(1.0), opt.lambda_t.value_or(1.0),
          opt.delta_d_exp.value_or(1.0), opt.delta_d_t.value_or(1.0));
    } else if (opt.correction) {
      k = {1.0, *opt.correction};
    }
    if (opt.k_lambda) k.k_lambda = *opt.k_lambda;
    if (opt.k_delta_d) k.k_delta_d = *opt.k_delta_d;
    k.validate();
  } catch (const Error& e) {
    return fail(kExitUsage, e.what());
  }

  try {
    auto table = report::read_table_csv_file(opt.table);
    auto corrected = simulator::apply_correction(table, k);
    std::cout << csv_of(corrected);
    std::cerr << "corrected eta_n (k = " << report::format_sig(k.combined()) << "), %:\n"
              << table_line(corrected);
    auto need = simulator::required_n_for_error(table, k, opt.target, opt.interpolate);
    if (!need) {
      const auto& last = corrected.rows().back();
      std::cerr << "target " << report::format_sig(opt.target) << "% not reached; best is "
                << report::format_sig(last.value) << "% at n=" << last.n << "\n";
      return kExitNotReached;
    }
    std::cerr << "required n = " << need->n;
    if (need->interpolated_n) std::cerr << " (interpolated " << *need->interpolated_n << ")";
    std::cerr << "\n";
  } catch (const Error& e) {
    return fail(exit_for(e), e.what());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const ReportOptions& opt) {
  try {
    fs::path dir = opt.path;
    fs::path single;
    if (!fs::is_directory(dir)) {
      single = dir;
      dir = dir.parent_path();
      if (dir.empty()) dir = ".";
    }
    const fs::path manifest_path = dir / kManifestFile;
    if (!fs::exists(manifest_path))
      return fail(kExitData, "no " + std::string(kManifestFile) + " in " + dir.string());
    const json manifest = json::parse(read_text(manifest_path));
    std::cout << "run " << manifest.value("run_id", "?") << ": " << manifest.value("command", "?")
              << " (pathgauge " << manifest.value("tool_version", "?") << ", "
              << manifest.value("started", "?") << ")\n";

    int status = kExitOk;
    for (const auto& [name, digest] : manifest.at("outputs").items()) {
      const fs::path file = dir / name;
      if (!single.empty() && file.filename() != single.filename()) continue;
      if (opt.check) {
        const bool ok = fs::exists(file) && report::sha256_file(file) == digest.get<std::string>();
        std::cout << (ok ? "  ok       " : "  MISMATCH ") << name << "\n";
        if (!ok) status = kExitData;
      }
      if (file.extension() != ".json" || !fs::exists(file)) continue;
      const json doc = json::parse(read_text(file));
      if (doc.contains("manifest") &&
          doc["manifest"].value("run_id", "") != manifest.value("run_id", "")) {
        std::cout << "  " << name << " references a different run\n";
        status = kExitData;
      }
      if (doc.contains("result")) {
        std::cout << "  eta_n, %:";
        for (const auto& r : doc["result"]["eta_table"]["rows"])
          std::cout << "  " << r["n"].get<int>() << ": " << report::format_sig(r["value"].get<double>());
        std::cout << "\n";
      }
      if (doc.contains("corrected_table")) {
        std::cout << "  corrected eta_n, %:";
        for (const auto& r : doc["corrected_table"]["rows"])
          std::cout << "  " << r["n"].get<int>() << ": " << report::format_sig(r["value"].get<double>());
        std::cout << "\n";
      }
      if (doc.contains("directions")) {
        for (const auto& d : doc["directions"]) {
          std::cout << "  " << d["direction"].get<std::string>() << ": " << d["pairs"].get<int>() << " pairs";
          if (d.contains("overall_bps"))
            std::cout << ", B_av " << report::format_sig(d["overall_bps"].get<double>() / 1e6) << " Mbps";
          if (!d["required_n_2sigma"].is_null())
            std::cout << ", 2-sigma n = " << d["required_n_2sigma"].get<int>();
          std::cout << "\n    sigma_n(B), Mbps:";
          for (const auto& r : d["sd_table"]["rows"])
            std::cout << "  " << r["n"].get<int>() << ": " << report::format_sig(r["value"].get<double>());
          std::cout << "\n";
        }
        if (doc.contains("asymmetry"))
          std::cout << "  " << doc["asymmetry"]["summary"].get<std::string>() << "\n";
      }
      if (doc.contains("sources")) {
        for (const auto& s : doc["sources"]) {
          std::cout << "  " << s["direction"].get<std::string>() << " <- " << s["source"].get<std::string>()
                    << ": " << s["ingest"]["accepted"].get<std::uint64_t>() << " accepted";
          if (s.contains("error")) std::cout << ", error " << s["error"]["kind"].get<std::string>();
          std::cout << "\n";
        }
      }
    }
    if (opt.check) {
      for (const auto& [name, digest] : manifest.at("input_digests").items()) {
        if (!fs::exists(name)) {
          std::cout << "  (input not on disk) " << name << "\n";
          continue;
        }
        const bool ok = report::sha256_file(name) == digest.get<std::string>();
        std::cout << (ok ? "  ok       " : "  CHANGED  ") << name << "\n";
        if (!ok) status = kExitData;
      }
    }
    return status;
  } catch (const json::exception& e) {
    return fail(kExitData, std::string("malformed report: ") + e.what());
  } catch (const Error& e) {
    return fail(exit_for(e), e.what());
  }
}

}  // namespace pathgauge::cli
