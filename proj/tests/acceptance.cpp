// Acceptance checks. Prints one PASS/FAIL line per criterion, with detail
// lines indented below it. `--criterion N` runs a single one; the exit status
// is nonzero if any selected criterion fails.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pathgauge/estimator.hpp"
#include "pathgauge/ingest.hpp"
#include "pathgauge/report.hpp"
#include "pathgauge/simulator.hpp"

using namespace pathgauge;
namespace oracle = pathgauge::testutil;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> detail;
};

std::string run_cli(const std::string& args, int& code) {
  const std::string cmd = PATHGAUGE_CLI " " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    code = -1;
    return out;
  }
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = ::pclose(pipe);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

ErrorTable published(TableKind kind, const std::vector<int>& grid, const std::vector<double>& v) {
  std::vector<ErrorRow> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({grid[i], v[i]});
  return ErrorTable(kind, rows);
}

std::string fmt(double v) { return report::format_sig(v, 3); }

// Compares each row to a published value at +/-20% relative.
void compare_within_20pct(const ErrorTable& got, const std::vector<double>& want, Outcome& o) {
  for (std::size_t i = 0; i < oracle::kEtaGrid.size(); ++i) {
    const int n = oracle::kEtaGrid[i];
    const auto v = got.value_at(n);
    const double lo = 0.8 * want[i], hi = 1.2 * want[i];
    const bool ok = v && *v >= lo && *v <= hi;
    o.pass = o.pass && ok;
    o.detail.push_back((ok ? "ok   n=" : "MISS n=") + std::to_string(n) + ": " +
                       (v ? fmt(*v) : std::string("missing")) + " vs " + fmt(want[i]) + " [" +
                       fmt(lo) + ", " + fmt(hi) + "]");
  }
}

std::vector<PacketPairSample> deltas_to_pairs(const std::vector<double>& deltas) {
  const Direction dir{"tt01", "tt146", Orientation::kForward};
  std::vector<PacketPairSample> out;
  for (std::size_t i = 0; i < deltas.size(); ++i)
    out.emplace_back(DelayRecord{2 * i, dir, 100, 60.0 * i, 0.01},
                     DelayRecord{2 * i + 1, dir, 1100, 60.0 * i + 30, 0.01 + deltas[i]});
  return out;
}

// --- criteria -----------------------------------------------------------

Outcome golden_values() {
  Outcome o;
  for (auto [dd, want] : {std::pair{0.000292, "27.4"}, std::pair{0.000288, "27.8"}}) {
    auto est = estimator::estimate_bandwidth(deltas_to_pairs({dd}), estimator::WindowSpec::disjoint(1));
    const std::string got = est.estimates.empty() ? "none" : fmt(est.estimates[0].mbps());
    o.pass = o.pass && got == want;
    o.detail.push_back("mean dD " + report::format_number(dd) + " s -> " + got + " Mbps (want " + want + ")");
  }
  o.summary = "bandwidth from packet-size and delay differences";
  return o;
}

// Shared by criteria 2 and 3: the CLI's IPv4 preset run.
const std::optional<ErrorTable>& simulated_table3() {
  static const std::optional<ErrorTable> table = [] () -> std::optional<ErrorTable> {
    int code = 0;
    const std::string csv = run_cli("simulate --preset ipv4-table3 --trials 100000", code);
    if (code != 0) return std::nullopt;
    std::istringstream in(csv);
    return report::read_table_csv(in);
  }();
  return table;
}

Outcome table3() {
  Outcome o;
  o.summary = "simulate --preset ipv4-table3 within +/-20% of the IPv4 error table";
  const auto& t = simulated_table3();
  if (!t) return {false, o.summary, {"simulate failed"}};
  compare_within_20pct(*t, oracle::kTable3Eta, o);
  return o;
}

Outcome table4() {
  Outcome o;
  o.summary = "simulated table corrected by 1.53 within +/-20% of the IPv6 error table";
  const auto& t = simulated_table3();
  if (!t) return {false, o.summary, {"simulate failed"}};
  compare_within_20pct(simulator::apply_correction(*t, {1.0, 1.53}), oracle::kTable4Eta, o);
  return o;
}

Outcome two_sigma() {
  auto t = published(TableKind::kSdMbps, oracle::kSdGrid, oracle::kTable1Sd);
  auto n = estimator::required_n_2sigma(t, oracle::kTable1MeanMbps * 1e6);
  Outcome o;
  o.pass = n == 70;
  o.summary = "2-sigma rule on the tt01->tt146 SD table at 27.4 Mbps gives n = 70";
  o.detail.push_back("got " + (n ? std::to_string(*n) : std::string("not reached")));
  return o;
}

Outcome calibration() {
  auto t = published(TableKind::kRelativeErrorPercent, oracle::kEtaGrid, oracle::kTable3Eta);
  auto n = simulator::required_n_for_error(t, {1.0, 1.53}, 10.0);
  Outcome o;
  o.pass = n && n->n == 100;
  o.summary = "IPv4 table, factor 1.53, target 10% gives n = 100";
  o.detail.push_back("got " + (n ? std::to_string(n->n) : std::string("not reached")));
  return o;
}

// Dataset with B* = 27.4 Mbps and noise small enough that the estimate is well
// behaved at n = 5.
std::vector<PacketPairSample> substitute_dataset() {
  simulator::DatasetSpec spec;
  spec.model.lambda_rate = 20000.0;
  spec.model.d_min = 0.005;
  spec.model.true_delta_d = 8000.0 / 27.4e6;
  spec.model.rng_seed = 42;
  spec.pairs = 300000;
  auto groups = ingest::split_by_size(simulator::generate_records(spec));
  return estimator::pair_samples(groups.at(100), groups.at(1100)).pairs;
}

Outcome property_suite() {
  Outcome o;
  o.summary = "substitute property suite for the unpublished SD datasets";
  auto record = [&](const std::string& name, bool ok, const std::string& info) {
    o.pass = o.pass && ok;
    o.detail.push_back((ok ? "ok   " : "FAIL ") + name + ": " + info);
  };

  const auto pairs = substitute_dataset();
  const auto sd = estimator::sd_vs_n(pairs, estimator::kDefaultNGrid);
  {
    bool non_increasing = true;
    std::vector<double> v;
    for (std::size_t i = 0; i < sd.rows().size(); ++i) {
      v.push_back(sd.rows()[i].value);
      if (i > 0 && sd.rows()[i].value > sd.rows()[i - 1].value) non_increasing = false;
    }
    const double slope = oracle::log_log_slope(sd.n_grid(), v);
    record("(a) sigma_n non-increasing, slope in [-0.60, -0.40]",
           non_increasing && slope >= -0.60 && slope <= -0.40,
           "slope " + fmt(slope) + (non_increasing ? "" : ", not monotone"));
  }
  {
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<int> len(1, 150), nn(1, 40);
    std::normal_distribution<double> noise(3e-4, 4e-4);
    std::size_t mismatches = 0;
    for (int round = 0; round < 1000; ++round) {
      std::vector<double> deltas(static_cast<std::size_t>(len(gen)));
      for (auto& d : deltas) d = noise(gen);
      const auto n = static_cast<std::size_t>(nn(gen));
      auto p = deltas_to_pairs(deltas);
      std::vector<double> actual;
      for (const auto& x : p) actual.push_back(x.delta_d());
      auto want = oracle::naive_window_estimates(actual, 8000.0, n, 1);
      auto got = estimator::estimate_bandwidth(p, {n, 1});
      std::size_t k = 0;
      bool ok = true;
      for (std::size_t w = 0; w < want.size(); ++w) {
        if (!want[w]) continue;
        if (k >= got.estimates.size() || got.estimates[k].window_start != w ||
            std::abs(got.estimates[k].value - *want[w]) > 1e-9 * std::abs(*want[w]))
          ok = false;
        ++k;
      }
      if (!ok || k != got.estimates.size()) ++mismatches;
    }
    record("(b) windowed estimates vs naive recomputation", mismatches == 0,
           "1000 random inputs, " + std::to_string(mismatches) + " mismatches");
  }
  {
    std::mt19937_64 gen(2);
    std::uniform_int_distribution<std::uint64_t> seq;
    std::uniform_int_distribution<std::uint32_t> size(1, 65535);
    std::uniform_real_distribution<double> send(0.0, 2e9), logd(-7.0, 1.0);
    const Direction dir{"tt01", "tt146", Orientation::kForward};
    std::size_t bad = 0;
    for (int i = 0; i < 10000; ++i) {
      DelayRecord r{seq(gen), dir, size(gen), std::round(send(gen) * 1e6) / 1e6, std::pow(10.0, logd(gen))};
      auto out = ingest::parse_record_line(ingest::format_record_line(r));
      auto* c = std::get_if<RecordCandidate>(&out);
      if (!c || c->seq_id != r.seq_id || c->packet_size != r.packet_size || c->delay != r.delay ||
          std::abs(c->send_time - r.send_time) > 0.5e-6)
        ++bad;
    }
    record("(c) record line round-trip", bad == 0, "10000 records, " + std::to_string(bad) + " differ");
  }
  {
    int c1 = 0, c2 = 0;
    const std::string args = "simulate --trials 20000 --seed 7";
    const auto a = run_cli(args, c1), b = run_cli(args, c2);
    record("(d) identical seeds give byte-identical CSV", c1 == 0 && c2 == 0 && !a.empty() && a == b,
           std::to_string(a.size()) + " bytes");
  }
  {
    const double truth = 27.4;
    const double sigma200 = *sd.value_at(200);
    const double mean = *sd.mean_bandwidth() / 1e6;
    record("(e) known B* recovered within 2 sigma_200", std::abs(mean - truth) <= 2 * sigma200,
           "mean " + fmt(mean) + " Mbps vs 27.4, 2 sigma_200 = " + fmt(2 * sigma200));
  }
  return o;
}

Outcome asymmetry() {
  auto t1 = published(TableKind::kSdMbps, oracle::kSdGrid, oracle::kTable1Sd);
  auto t2 = published(TableKind::kSdMbps, oracle::kSdGrid, oracle::kTable2Sd);
  auto r = estimator::compare_directions(t1, t2);
  Outcome o;
  o.summary = "tt01->tt146 vs tt146->tt01 SD ratio and asymmetry flag";
  double lo = 1e9, hi = 0;
  for (const auto& x : r.ratio_per_n) {
    lo = std::min(lo, x.ratio);
    hi = std::max(hi, x.ratio);
  }
  auto near = [&](int n, double want) {
    for (const auto& x : r.ratio_per_n)
      if (x.n == n) return std::abs(x.ratio - want) <= 0.01;
    return false;
  };
  // n = 40 of the published tables gives 18.3 / 2.7 = 6.78, so the band is
  // widened to 6.8 to cover the published data itself.
  o.pass = r.asymmetric && lo >= 5.5 && hi <= 6.8 && near(5, 6.57) && near(100, 5.53) && near(200, 5.54);
  o.detail.push_back("ratio range [" + fmt(lo) + ", " + fmt(hi) + "], geometric mean " +
                     fmt(r.geometric_mean) + ", flag " + (r.asymmetric ? "set" : "not set"));
  o.detail.push_back(r.summary);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1", golden_values}, {"2", table3},         {"3", table4},    {"4", two_sigma},
      {"5", calibration},   {"6", property_suite}, {"7", asymmetry},
  };
  std::string only;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = argv[++i];

  int failed = 0, ran = 0;
  for (const auto& [id, check] : criteria) {
    if (!only.empty() && id != only) continue;
    ++ran;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, "threw", {e.what()}};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << o.summary << "\n";
    for (const auto& d : o.detail) std::cout << "        " << d << "\n";
    if (!o.pass) ++failed;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  std::cout << (ran - failed) << "/" << ran << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
