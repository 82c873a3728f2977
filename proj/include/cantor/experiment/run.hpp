#pragma once

// Runs one experiment config into `<cache root>/<name>-<hash>/`: digit cache, report CSV, JSON
// sidecar and manifest, each written atomically. Same config, same bytes.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cantor/basic_sequence.hpp"
#include "cantor/constructions.hpp"
#include "cantor/digit_stream.hpp"
#include "cantor/discrepancy.hpp"
#include "cantor/experiment/checks.hpp"
#include "cantor/experiment/config.hpp"
#include "cantor/normality.hpp"
#include "cantor/orbit.hpp"
#include "cantor/rational.hpp"
#include "cantor/rng.hpp"
#include "cantor/streaming.hpp"

#ifndef CANTOR_GIT_DESCRIBE
#define CANTOR_GIT_DESCRIBE "unknown"
#endif

namespace cantor::experiment {

using nlohmann::json;

struct SeriesPoint {
  std::uint64_t n = 0;
  BigInt num;
  BigInt den = 1;
};

struct ReportRecord {
  std::string config_hash;
  std::string statistic;
  std::vector<SeriesPoint> series;
  std::vector<Measurement> verdicts;
  std::vector<std::string> interpretation_flags;
};

struct RunOptions {
  std::filesystem::path cache_root;
  std::uint64_t stream_threshold = 10'000'000;  // generated prefixes longer than this are streamed
  std::uint64_t discrepancy_cap = 1'000'000;    // points per discrepancy evaluation
};

struct RunResult {
  std::string run_id;
  std::filesystem::path dir;
  std::vector<ReportRecord> records;
  json manifest;
};

inline std::filesystem::path default_cache_root() {
  if (const char* env = std::getenv("CANTORLAB_CACHE_DIR"); env && *env) return env;
  return "cantorlab-cache";
}

// ---------------------------------------------------------------------------------------------
// Serialization

inline std::string format_report_csv(const std::vector<ReportRecord>& records) {
  std::string out = "n,statistic,value_num,value_den\n";
  for (const auto& r : records) {
    for (const auto& p : r.series) {
      out += std::to_string(p.n) + "," + r.statistic + "," + p.num.get_str() + "," + p.den.get_str() + "\n";
    }
  }
  return out;
}

inline json record_to_json(const ReportRecord& r) {
  json series = json::array();
  for (const auto& p : r.series) series.push_back({p.n, p.num.get_str(), p.den.get_str()});
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"label", v.label}, {"observed", v.observed}, {"threshold", v.threshold}, {"pass", v.pass}});
  }
  return {{"config_hash", r.config_hash},
          {"statistic", r.statistic},
          {"series", series},
          {"verdicts", verdicts},
          {"interpretation_flags", r.interpretation_flags}};
}

inline ReportRecord record_from_json(const json& j) {
  ReportRecord r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.statistic = j.at("statistic").get<std::string>();
  for (const auto& p : j.at("series")) {
    r.series.push_back({p.at(0).get<std::uint64_t>(), parse_bigint(p.at(1).get<std::string>()),
                        parse_bigint(p.at(2).get<std::string>())});
  }
  for (const auto& v : j.at("verdicts")) {
    r.verdicts.push_back({v.at("label").get<std::string>(), v.at("observed").get<std::string>(),
                          v.at("threshold").get<std::string>(), v.at("pass").get<bool>()});
  }
  r.interpretation_flags = j.at("interpretation_flags").get<std::vector<std::string>>();
  return r;
}

inline json sidecar_json(const ExperimentConfig& cfg, const std::vector<ReportRecord>& records) {
  json recs = json::array();
  for (const auto& r : records) recs.push_back(record_to_json(r));
  return {{"seed", cfg.seed},
          {"config", cfg.values},
          {"config_hash", config_hash(cfg)},
          {"git_describe", CANTOR_GIT_DESCRIBE},
          {"records", recs}};
}

// ---------------------------------------------------------------------------------------------

namespace detail {

inline SeriesPoint point(std::uint64_t n, const Rational& v) { return {n, v.get_num(), v.get_den()}; }

inline SeriesPoint point(std::uint64_t n, std::uint64_t v) { return {n, big(v), 1}; }

class Recorder {
 public:
  explicit Recorder(std::string hash) : hash_(std::move(hash)) {}

  ReportRecord& add(std::string statistic, std::vector<SeriesPoint> series = {}) {
    records_.push_back({hash_, std::move(statistic), std::move(series), {}, flags_});
    return records_.back();
  }

  void set_flags(std::vector<std::string> flags) {
    flags_ = std::move(flags);
    for (auto& r : records_) r.interpretation_flags = flags_;
  }

  std::vector<ReportRecord> take() { return std::move(records_); }

 private:
  std::string hash_;
  std::vector<std::string> flags_;
  std::vector<ReportRecord> records_;
};

inline DigitStream prefix_of(const DigitStream& s, std::size_t n) {
  n = std::min(n, s.size());
  return {s.radix, s.integer_part, {s.digits.begin(), s.digits.begin() + static_cast<std::ptrdiff_t>(n)},
          n == s.size() ? s.tail : Tail::Unknown};
}

/// D_N of T_0, ..., T_{N-1} for the first min(N, cap) digits.
inline Rational orbit_discrepancy(const DigitStream& s, std::uint64_t cap, std::size_t& used) {
  const auto p = prefix_of(s, cap);
  used = p.size();
  const StreamOrbit orbit(p);
  return discrepancy_exact(orbit);
}

inline std::vector<std::uint64_t> sample_points(std::uint64_t length, std::uint64_t stride) {
  if (stride == 0) stride = length;
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = stride; n < length; n += stride) out.push_back(n);
  out.push_back(length);
  return out;
}

struct Source {
  std::optional<DigitStream> stream;  // in memory
  std::optional<BasicSequence> streamed_q;  // generated chunk by chunk instead
  std::uint64_t seed = 0;
};

/// `input = @cache` or a seeded random stream w.r.t. Q.
inline Source load_source(const ExperimentConfig& cfg, const RunOptions& opt) {
  Source src;
  src.seed = cfg.seed;
  if (auto in = cfg.input()) {
    auto c = read_digit_cache(*in);
    if (c.stream.size() < cfg.length) {
      throw Error(ErrorCode::InvalidArgument, "input cache has " + std::to_string(c.stream.size()) +
                                                  " digits, config asks for N = " + std::to_string(cfg.length));
    }
    src.stream = prefix_of(c.stream, cfg.length);
    return src;
  }
  const auto q = cfg.sequence("Q");
  if (cfg.length > opt.stream_threshold) {
    src.streamed_q = q;
  } else {
    src.stream = random_stream(q, cfg.length, cfg.seed);
  }
  return src;
}

/// Feeds the seeded random digits of `random_stream` in chunks, same order, same values.
template <typename Visit>
void for_each_random_chunk(const BasicSequence& q, std::uint64_t length, std::uint64_t seed, Visit visit,
                           std::uint64_t chunk = 1 << 20) {
  Rng rng(seed, 0);
  std::vector<BigInt> qs, ds;
  for (std::uint64_t start = 1; start <= length; start += chunk) {
    const std::uint64_t end = std::min(length, start + chunk - 1);
    qs.clear();
    ds.clear();
    for (std::uint64_t n = start; n <= end; ++n) {
      qs.push_back(q.at(n));
      ds.push_back(rng.below(qs.back()));
    }
    visit(start, qs, ds);
  }
}

/// Block counts and Q_n^{(k)} over a streamed random prefix.
inline std::vector<CurvePoint> streamed_curve(const BasicSequence& q, std::uint64_t length, std::uint64_t seed,
                                              const Block& block, std::uint64_t stride) {
  const std::size_t k = block.size();
  const auto samples = sample_points(length, stride);
  std::size_t next_sample = 0;
  std::deque<BigInt> recent_d;  // last k - 1 digits
  std::vector<CurvePoint> points;
  std::uint64_t count = 0;
  // Q_n^{(k)} needs q_{n+1}, ..., q_{n+k-1}: read ahead with at().
  Rational qsum = 0;
  std::vector<BigInt> dens;
  std::deque<BigInt> window;  // q_n, ..., q_{n+k-1}
  std::uint64_t filled = 0;   // window holds q up to index `filled`
  auto flush = [&] {
    qsum += sum_reciprocals(dens);
    dens.clear();
  };
  for_each_random_chunk(q, length, seed, [&](std::uint64_t start, const std::vector<BigInt>&,
                                            const std::vector<BigInt>& ds) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const std::uint64_t n = start + i;
      recent_d.push_back(ds[i]);
      if (recent_d.size() > k) recent_d.pop_front();
      if (recent_d.size() == k) {
        bool match = true;
        for (std::size_t j = 0; j < k && match; ++j) match = recent_d[j] == block.entries[j];
        count += match;
      }
      while (filled < n + k - 1) window.push_back(q.at(++filled));
      while (window.size() > k) window.pop_front();
      BigInt den = 1;
      for (const auto& v : window) den *= v;
      dens.push_back(std::move(den));
      if (next_sample < samples.size() && samples[next_sample] == n) {
        flush();
        points.push_back({n, count, qsum, Rational(big(count)) / qsum});
        ++next_sample;
      } else if (dens.size() >= 4096) {
        flush();
      }
    }
  });
  return points;
}

inline void add_curve(Recorder& rec, const Block& block, const std::vector<CurvePoint>& points) {
  std::vector<SeriesPoint> counts, qsums, ratios;
  for (const auto& p : points) {
    counts.push_back(point(p.n, p.count));
    qsums.push_back(point(p.n, p.qnk));
    ratios.push_back(point(p.n, p.ratio));
  }
  rec.add("block_count:" + block.to_string(), std::move(counts));
  rec.add("qnk:" + block.to_string(), std::move(qsums));
  rec.add("normality_ratio:" + block.to_string(), std::move(ratios));
}

}  // namespace detail

/// Executes the config; writes digits.csv (when a stream is produced), report.csv, report.json and
/// manifest.json under the run directory.
inline RunResult run(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  RunResult res;
  const auto hash = config_hash(cfg);
  res.run_id = cfg.name + "-" + hash;
  res.dir = (opt.cache_root.empty() ? default_cache_root() : opt.cache_root) / res.run_id;
  detail::Recorder rec(hash);
  std::optional<DigitStream> out_stream;
  json manifest = {{"name", cfg.name}, {"operation", cfg.operation}, {"seed", cfg.seed},
                   {"N", cfg.length},  {"run_id", res.run_id},       {"interpretation_flags", json::array()}};
  const std::uint64_t n = cfg.length;
  const auto cap = opt.discrepancy_cap;

  if (cfg.operation == "example") {
    auto x = example_sequences(n);
    std::size_t used = 0;
    const Rational dx = detail::orbit_discrepancy(x, cap, used);
    rec.add("orbit_discrepancy", {detail::point(used, dx)});
    const auto half = scale_stream(1, 2, detail::prefix_of(x, cap));
    const StreamOrbit oy(half.stream);
    const auto below = interval_count(oy, Interval(0, Rational(1, 2)), oy.size());
    rec.add("half_orbit_fraction_below_half", {detail::point(oy.size(), make_rational(big(below), big(oy.size())))});
    rec.add("half_orbit_discrepancy", {detail::point(oy.size(), discrepancy_exact(oy))});
    out_stream = std::move(x);
  } else if (cfg.operation == "phi") {
    const auto q = BasicSequence::parse(cfg.get_or("Q", "affine:1,10"), cfg.base_dir);
    const BigInt b = cfg.integer_or("b", 2);
    const auto driver_name = cfg.get_or("driver", "vdc");
    Driver driver;
    if (driver_name == "vdc") {
      driver = [](std::uint64_t i) { return vdc_driver(i); };
    } else if (driver_name == "prng") {
      auto rng = std::make_shared<Rng>(cfg.seed, 0x0d51);
      driver = [rng](std::uint64_t) { return make_rational(big(rng->next() >> 11), BigInt(1) << 53); };
    } else {
      throw Error(ErrorCode::ParseError, "driver must be 'vdc' or 'prng'");
    }
    const auto chooser_name = cfg.get_or("chooser", "center");
    PhiChooser chooser;
    if (chooser_name == "center") {
      chooser = center_chooser();
    } else if (chooser_name == "uniform") {
      chooser = uniform_chooser(cfg.seed);
    } else {
      throw Error(ErrorCode::ParseError, "chooser must be 'center' or 'uniform'");
    }
    auto ph = phi_sample(q, b, driver, n, chooser);
    rec.add("clamps", {detail::point(n, std::uint64_t{ph.clamps})});
    std::size_t used = 0;
    const Rational dx = detail::orbit_discrepancy(ph.stream, cap, used);
    rec.add("orbit_discrepancy", {detail::point(used, dx)});
    if (cfg.has("a")) {
      const BigInt a = cfg.integer("a");
      const BigInt c = cfg.has("c") ? cfg.integer("c") : mod_floor(a, b);
      const Rational limit = rational_multiple_limit(a, b, c);  // also validates c
      const auto m = scale_stream(a, b, detail::prefix_of(ph.stream, cap));
      const StreamOrbit om(m.stream);
      const auto hits = interval_count(om, Interval(0, make_rational(c, b)), om.size());
      rec.add("multiple_frequency", {detail::point(om.size(), make_rational(big(hits), big(om.size())))});
      rec.add("multiple_limit_formula", {detail::point(0, limit)});
      if (sgn(a) > 0) rec.add("multiple_frequency_integrated", {detail::point(0, rational_multiple_frequency(a, b))});
    }
    rec.set_flags(phi_flags());
    manifest["interpretation_flags"] = phi_flags();
    out_stream = std::move(ph.stream);
  } else if (cfg.operation == "main") {
    const auto p = BasicSequence::parse(cfg.get_or("P", "affine:1,1"), cfg.base_dir);
    const BigInt mm = cfg.integer_or("max_multiplier", 4);
    if (mm < 1 || mm > 64) throw Error(ErrorCode::ParseError, "max_multiplier must be in [1, 64]");
    const auto y = random_stream(p, n + 64, cfg.seed);
    const auto st = main_construction(p, y, n, static_cast<std::uint32_t>(mm.get_ui()));
    const auto len = st.length();
    const auto density = make_rational(big(st.changed.size()), big(len));
    std::vector<SeriesPoint> ell;
    for (std::size_t i = 0; i < st.ell.size(); ++i) ell.push_back(detail::point(i + 1, std::uint64_t{st.ell[i]}));
    rec.add("ell", std::move(ell));
    rec.add("density_A", {detail::point(len, density)});
    rec.add("qn1_ratio", {detail::point(len, qnk(st.q, len, 1) / qnk(p, len, 1))});
    const auto samples = detail::sample_points(len, cfg.has("stride") ? to_u64(cfg.integer("stride")) : len / 10);
    for (std::uint32_t m = 2; m <= st.m.back() && m <= mm; ++m) {
      const auto c = check_multiple(st, m);
      std::vector<SeriesPoint> series;
      std::size_t idx = 0;
      for (auto s : samples) {
        s = std::min<std::uint64_t>(s, c.certified);  // the curve ends where m*x stops being certified
        while (idx < c.ones_anywhere.size() && c.ones_anywhere[idx] <= s) ++idx;
        series.push_back(detail::point(s, std::uint64_t{idx}));
        if (s == c.certified) break;
      }
      rec.add("ones_in_multiple:" + std::to_string(m), std::move(series));
      rec.add("ones_in_range:" + std::to_string(m), {detail::point(c.certified, std::uint64_t{c.ones_in_range.size()})});
    }
    const auto qs = st.q.prefix(std::min<std::uint64_t>(len, cap));
    std::vector<Rational> ratios(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) ratios[i] = make_rational(st.x.digits[i], qs[i]);
    rec.add("digit_ratio_discrepancy", {detail::point(qs.size(), discrepancy_exact(ratios))});
    rec.set_flags(st.interpretation_flags);
    manifest["interpretation_flags"] = st.interpretation_flags;
    manifest["max_multiplier"] = mm.get_ui();
    manifest["density_of_A"] = density.get_str();
    manifest["constructed_length"] = len;
    manifest["diagnostics"] = st.diagnostics;
    out_stream = st.x;
  } else if (cfg.operation == "transform") {
    auto src = detail::load_source(cfg, opt);
    if (src.streamed_q) {
      std::uint64_t zeros = 0, ones = 0, changed = 0;
      detail::for_each_random_chunk(*src.streamed_q, n, cfg.seed, [&](std::uint64_t, const auto&, const auto& ds) {
        for (const auto& d : ds) {
          changed += d == 0;
          ones += d == 0 || d == 1;  // zeros become ones
        }
      });
      rec.add("block_count:0", {detail::point(n, zeros)});
      rec.add("block_count:1", {detail::point(n, ones)});
      rec.add("qnk:1", {detail::point(n, qnk(*src.streamed_q, n, 1))});
      rec.add("changed_digits", {detail::point(n, changed)});
      manifest["streamed"] = true;
    } else {
      auto t = zero_to_one_transform(*src.stream);
      const auto changed = count_block(*src.stream, Block{0}, n);
      rec.add("block_count:0", {detail::point(n, count_block(t, Block{0}, n))});
      rec.add("block_count:1", {detail::point(n, count_block(t, Block{1}, n))});
      rec.add("qnk:1", {detail::point(n, qnk(t.radix, n, 1))});
      rec.add("changed_digits", {detail::point(n, changed)});
      out_stream = std::move(t);
    }
  } else if (cfg.operation == "multiply") {
    const auto in = cfg.input();
    if (!in) throw Error(ErrorCode::ParseError, "multiply needs 'input = @cache'");
    auto c = read_digit_cache(*in);
    const auto x = detail::prefix_of(c.stream, n);
    const BigInt a = cfg.integer("a");
    const BigInt b = cfg.integer_or("b", 1);
    auto r = scale_stream(a, b, x);
    rec.add("certified_digits", {detail::point(x.size(), std::uint64_t{r.stream.size()})});
    rec.add("withheld_digits", {detail::point(x.size(), std::uint64_t{r.withheld})});
    out_stream = std::move(r.stream);
  } else if (cfg.operation == "stats") {
    auto src = detail::load_source(cfg, opt);
    const auto block = Block::parse(cfg.get_or("block", "0"));
    const std::uint64_t stride = cfg.has("stride") ? to_u64(cfg.integer("stride")) : n;
    if (src.streamed_q) {
      detail::add_curve(rec, block, detail::streamed_curve(*src.streamed_q, n, cfg.seed, block, stride));
      manifest["streamed"] = true;
    } else {
      if (block.size() > 1 && n + block.size() - 1 > src.stream->radix.defined_length()) {
        throw Error(ErrorCode::InvalidArgument, "Q is not defined far enough for blocks of this length");
      }
      detail::add_curve(rec, block, normality_curve(*src.stream, block, n, stride).points);
    }
  }

  std::filesystem::create_directories(res.dir);
  json files = json::array();
  if (out_stream) {
    write_digit_cache(res.dir / "digits.csv", *out_stream, cfg.seed);
    files.push_back("digits.csv");
  }
  res.records = rec.take();
  write_text_atomic(res.dir / "report.csv", format_report_csv(res.records));
  write_text_atomic(res.dir / "report.json", sidecar_json(cfg, res.records).dump(2) + "\n");
  files.push_back("report.csv");
  files.push_back("report.json");
  files.push_back("manifest.json");
  manifest["files"] = files;
  manifest["config_hash"] = hash;
  write_text_atomic(res.dir / "manifest.json", manifest.dump(2) + "\n");
  res.manifest = std::move(manifest);
  return res;
}

/// Rewrites a finished run's records as `export.csv` or `export.json`; returns the written path.
inline std::filesystem::path export_run(const std::string& run_id, const std::string& format,
                                        const std::filesystem::path& cache_root = default_cache_root()) {
  const auto dir = cache_root / run_id;
  std::ifstream in(dir / "report.json");
  if (!in) throw Error(ErrorCode::Io, "no run '" + run_id + "' under " + cache_root.string());
  const json sidecar = json::parse(in);
  std::vector<ReportRecord> records;
  for (const auto& r : sidecar.at("records")) records.push_back(record_from_json(r));
  if (format == "csv") {
    write_text_atomic(dir / "export.csv", format_report_csv(records));
    return dir / "export.csv";
  }
  if (format == "json") {
    json out = sidecar;
    write_text_atomic(dir / "export.json", out.dump(2) + "\n");
    return dir / "export.json";
  }
  throw Error(ErrorCode::ParseError, "export format must be csv or json");
}

}  // namespace cantor::experiment
