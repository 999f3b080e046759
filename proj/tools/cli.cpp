#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "evpq/bench.hpp"
#include "evpq/codefile.hpp"
#include "evpq/error.hpp"
#include "evpq/metrics.hpp"
#include "evpq/quantize.hpp"
#include "evpq/random.hpp"
#include "evpq/search.hpp"
#include "evpq/vecstore.hpp"

namespace evpq::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

// Where the vectors come from: a file, or a generated uniform-sphere set.
struct DataSource {
  std::string path;
  std::string format;
  std::size_t n = 10'000;
  std::size_t d = 0;
  std::uint64_t seed = 1;
  bool normalize = false;
  std::optional<std::uint64_t> rotate_seed;

  void add_options(CLI::App& app, bool dim_required = true) {
    app.add_option("--data", path, "Input vectors (default: generate a uniform-sphere set)");
    app.add_option("--format", format, "fvecs | raw-f32 | csv (default: from the extension)");
    auto* dim = app.add_option("--d", d, "Dimension")->check(CLI::PositiveNumber);
    if (dim_required) dim->required();
    app.add_option("--n", n, "Rows to generate when --data is absent")->capture_default_str();
    app.add_option("--seed", seed, "Generator seed when --data is absent")->capture_default_str();
    app.add_flag("--normalize", normalize, "l2-normalise every row after loading");
    app.add_option("--rotate-seed", rotate_seed, "Apply a seeded random rotation");
  }

  DataFormat resolved_format() const {
    if (!format.empty()) return parse_data_format(format);
    const auto ext = fs::path(path).extension().string();
    if (ext == ".fvecs") return DataFormat::Fvecs;
    if (ext == ".csv") return DataFormat::Csv;
    return DataFormat::RawF32;
  }

  Dataset load() const {
    Dataset data;
    if (path.empty()) {
      if (n == 0) throw ValidationError("--n must be >= 1");
      data = generate_uniform_sphere(seed, n, d);
    } else {
      data = load_dataset(path, resolved_format(), d);
      data.set_name(fs::path(path).stem().string());
    }
    if (normalize) data = normalize_rows(data);
    if (rotate_seed) data = random_rotation(*rotate_seed, data.dim()).apply(data);
    return data;
  }

  json describe() const {
    json j;
    if (path.empty()) {
      j = {{"generator", "uniform-sphere"}, {"n", n}, {"seed", seed}, {"rng", Rng::kAlgorithm}};
    } else {
      j = {{"path", path}, {"format", to_string(resolved_format())}};
    }
    j["d"] = d;
    j["normalize"] = normalize;
    j["rotate_seed"] = rotate_seed ? json(*rotate_seed) : json(nullptr);
    return j;
  }
};

struct QuantizerOptions {
  std::optional<std::size_t> x;
  double epsilon = 1e-6;

  void add_options(CLI::App& app) {
    app.add_option("--x", x, "EVP nonzero count (default: round(2d/3))");
    app.add_option("--epsilon", epsilon, "b1.58 scale epsilon")->capture_default_str();
  }

  QuantizerConfig config(QuantizerKind kind) const { return {kind, x, epsilon}; }
};

std::vector<QuantizerKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<QuantizerKind> out;
  for (const auto& name : names) {
    const auto kind = parse_quantizer_kind(name);
    if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
  }
  if (out.empty()) throw ValidationError("no quantizer selected");
  return out;
}

json quantizer_json(const QuantizerConfig& cfg, std::size_t dim) {
  json j{{"kind", to_string(cfg.kind)}};
  if (cfg.kind == QuantizerKind::Evp) j["x"] = cfg.evp_for(dim).nonzeros;
  if (cfg.kind == QuantizerKind::B158) j["epsilon"] = cfg.epsilon;
  return j;
}

fs::path default_out_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f.flush()) throw IoError("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

json report_json(const BenchReport& r) {
  return {{"kernel", r.kernel},         {"d", r.dim},
          {"count", r.count},           {"trials", r.repetitions},
          {"fastest_ms", r.fastest_ms}, {"slowest_ms", r.slowest_ms},
          {"median_ms", r.median_ms},   {"mean_ms", r.mean_ms},
          {"per_op_ns", r.per_op_ns},   {"checksum", r.checksum},
          {"hardware", r.hardware}};
}

void print_bench(std::ostream& out, const BenchReport& r) {
  out << std::left << std::setw(22) << r.kernel << std::right << " fastest "
      << fixed(r.fastest_ms, 3) << " ms  slowest " << fixed(r.slowest_ms, 3) << " ms  median "
      << fixed(r.median_ms, 3) << " ms  mean " << fixed(r.mean_ms, 3) << " ms  ("
      << fixed(r.per_op_ns, 2) << " ns/op)\n";
}

std::vector<std::size_t> sample_rows(std::size_t rows, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ValidationError("query count must be >= 1");
  if (count > rows) {
    throw ValidationError("cannot sample " + std::to_string(count) + " queries from " +
                          std::to_string(rows) + " rows");
  }
  std::vector<std::size_t> idx(rows);
  for (std::size_t i = 0; i < rows; ++i) idx[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.below(rows - i))]);
  }
  idx.resize(count);
  return idx;
}

// Shared state for one invocation.
struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  fs::path out_dir;
  bool pretty = false;
  std::size_t threads = 0;

  fs::path output(const std::string& name) const { return out_dir / name; }

  void manifest(const std::string& command, json config, const std::vector<fs::path>& outputs) {
    json files = json::array();
    for (const auto& p : outputs) files.push_back(p.string());
    json m{{"tool", "evpq"},
           {"version", kToolVersion},
           {"command", command},
           {"argv", args},
           {"config", std::move(config)},
           {"outputs", files}};
    const auto path = output(command + "-manifest.json");
    write_json(path, m);
    out << "manifest: " << path.string() << "\n";
  }
};

// --- gen -------------------------------------------------------------------

struct GenCommand {
  std::size_t n = 1000;
  std::size_t d = 0;
  std::uint64_t seed = 1;
  std::string format = "raw-f32";
  std::string file;

  void attach(CLI::App& app) {
    app.add_option("--n", n, "Rows")->capture_default_str();
    app.add_option("--d", d, "Dimension")->required();
    app.add_option("--seed", seed, "Generator seed")->capture_default_str();
    app.add_option("--format", format, "fvecs | raw-f32 | csv")->capture_default_str();
    app.add_option("--out", file, "Output file name (inside the output directory)");
  }

  void run(Context& ctx) {
    if (n == 0) throw ValidationError("--n must be >= 1");
    if (d == 0) throw ValidationError("--d must be >= 1");
    const auto fmt = parse_data_format(format);
    const auto data = generate_uniform_sphere(seed, n, d);
    if (file.empty()) {
      const std::string ext = fmt == DataFormat::Fvecs ? ".fvecs" : fmt == DataFormat::Csv ? ".csv" : ".f32";
      file = "uniform-n" + std::to_string(n) + "-d" + std::to_string(d) + "-s" + std::to_string(seed) + ext;
    }
    const auto path = ctx.output(file);
    write_dataset(path, data, fmt);
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << data.content_hash();
    ctx.out << "wrote " << path.string() << " (" << n << " x " << d << ", content hash " << hash.str()
            << ")\n";
    ctx.manifest("gen",
                 {{"n", n}, {"d", d}, {"seed", seed}, {"format", to_string(fmt)},
                  {"rng", Rng::kAlgorithm}, {"content_hash", hash.str()}},
                 {path});
  }
};

// --- quantize --------------------------------------------------------------

struct QuantizeCommand {
  DataSource source;
  QuantizerOptions qopts;
  std::string quantizer = "evp";
  std::string file;

  void attach(CLI::App& app) {
    source.add_options(app);
    qopts.add_options(app);
    app.add_option("--quantizer", quantizer, "evp | one-bit | b158")->capture_default_str();
    app.add_option("--out", file, "Output code file name (inside the output directory)");
  }

  void run(Context& ctx) {
    const auto cfg = qopts.config(parse_quantizer_kind(quantizer));
    // Validate x against d before touching any data.
    if (cfg.kind == QuantizerKind::Evp) {
      const auto evp = cfg.evp_for(source.d);
      ctx.out << "quantizer=evp d=" << evp.dim << " x=" << evp.nonzeros
              << " log10_vertices=" << fixed(log10_vertex_count(evp), 2) << "\n";
    } else {
      ctx.out << "quantizer=" << to_string(cfg.kind) << " d=" << source.d << "\n";
    }
    const auto data = source.load();
    const auto codes = encode_dataset(data, cfg, ctx.threads);
    if (file.empty()) file = "codes-" + std::string(to_string(cfg.kind)) + ".evpq";
    const auto path = ctx.output(file);
    write_codes(path, codes);
    ctx.out << "wrote " << path.string() << " (" << codes.size() << " rows, "
            << (codes.binary() ? "single-plane" : "two-plane") << ")\n";
    ctx.manifest("quantize",
                 {{"data", source.describe()}, {"quantizer", quantizer_json(cfg, data.dim())},
                  {"threads", ctx.threads}},
                 {path});
  }
};

// --- correlate -------------------------------------------------------------

struct CorrelateCommand {
  DataSource source;
  QuantizerOptions qopts;
  std::vector<std::string> quantizers{"evp", "one-bit", "b158"};
  std::size_t pairs = 10'000;
  std::uint64_t pair_seed = 7;

  void attach(CLI::App& app) {
    source.add_options(app);
    qopts.add_options(app);
    app.add_option("--quantizer", quantizers, "Quantizers to compare (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--pairs", pairs, "Random row pairs to sample")->capture_default_str();
    app.add_option("--pair-seed", pair_seed, "Pair sampling seed")->capture_default_str();
  }

  void run(Context& ctx) {
    const auto kinds = parse_kinds(quantizers);
    for (auto k : kinds) (void)qopts.config(k).evp_for(source.d);
    const auto data = source.load();
    const auto sampled = sample_pairs(data, pairs, pair_seed);

    std::vector<fs::path> outputs;
    json results = json::array();
    json qjson = json::array();
    for (auto kind : kinds) {
      const auto cfg = qopts.config(kind);
      qjson.push_back(quantizer_json(cfg, data.dim()));
      const auto codes = encode_dataset(data, cfg, ctx.threads);
      const auto sample = measure_pairs(data, codes, sampled, pair_seed, ctx.threads);
      const double rho = spearman_rho(sample);
      const std::string label(to_string(kind));

      std::string csv = "proxy_value,true_distance\n";
      for (const auto& p : sample.pairs) {
        csv += std::to_string(static_cast<long long>(p.proxy_value)) + "," + fixed(p.true_distance, 9) + "\n";
      }
      const auto shepard = ctx.output("shepard-" + label + ".csv");
      write_text(shepard, csv);

      const auto fit = isotonic_fit(sample);
      std::string iso = "proxy_value,fitted_distance\n";
      for (std::size_t i = 0; i < fit.breakpoints.size(); ++i) {
        iso += std::to_string(static_cast<long long>(fit.breakpoints[i])) + "," + fixed(fit.levels[i], 9) + "\n";
      }
      const auto isotonic = ctx.output("isotonic-" + label + ".csv");
      write_text(isotonic, iso);

      outputs.push_back(shepard);
      outputs.push_back(isotonic);
      results.push_back({{"dataset", data.name()},
                         {"quantizer", label},
                         {"rho", rho},
                         {"n_pairs", sample.pairs.size()},
                         {"seed", pair_seed}});
    }
    const auto summary = ctx.output("spearman.json");
    write_json(summary, {{"dataset", data.name()}, {"d", data.dim()}, {"n", data.size()},
                         {"results", results}});
    outputs.push_back(summary);

    if (ctx.pretty) {
      ctx.out << std::left << std::setw(20) << "dataset" << std::setw(6) << "d";
      for (const auto& r : results) ctx.out << std::setw(10) << r["quantizer"].get<std::string>();
      ctx.out << "\n" << std::setw(20) << data.name() << std::setw(6) << data.dim();
      for (const auto& r : results) ctx.out << std::setw(10) << fixed(r["rho"].get<double>(), 3);
      ctx.out << std::right << "\n";
    } else {
      for (const auto& r : results) {
        ctx.out << r["quantizer"].get<std::string>() << " rho=" << fixed(r["rho"].get<double>(), 4) << "\n";
      }
    }
    ctx.out << "wrote " << summary.string() << "\n";
    ctx.manifest("correlate",
                 {{"data", source.describe()}, {"quantizers", qjson}, {"pairs", pairs},
                  {"pair_seed", pair_seed}, {"threads", ctx.threads}},
                 outputs);
  }
};

// --- recall ----------------------------------------------------------------

struct RecallCommand {
  DataSource source;
  QuantizerOptions qopts;
  std::vector<std::string> quantizers{"evp", "one-bit", "b158"};
  std::string queries_path;
  std::size_t sample_queries = 1000;
  std::uint64_t query_seed = 11;
  std::size_t k = 30;
  std::vector<std::size_t> ns{30, 50, 100, 200, 500};
  std::string gt_cache;

  void attach(CLI::App& app) {
    source.add_options(app);
    qopts.add_options(app);
    app.add_option("--quantizer", quantizers, "Quantizers to compare (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    auto* q = app.add_option("--queries", queries_path, "Query vectors (same format and d as --data)");
    app.add_option("--sample-queries", sample_queries, "Draw this many queries from the data rows")
        ->capture_default_str()
        ->excludes(q);
    app.add_option("--query-seed", query_seed, "Query sampling seed")->capture_default_str();
    app.add_option("--k", k, "True neighbours per query")->capture_default_str();
    app.add_option("--ns", ns, "Proxy depths n (comma separated)")->delimiter(',')->capture_default_str();
    app.add_option("--gt-cache", gt_cache, "Directory for cached ground truth");
  }

  void run(Context& ctx) {
    const auto kinds = parse_kinds(quantizers);
    for (auto kind : kinds) (void)qopts.config(kind).evp_for(source.d);
    if (k == 0) throw ValidationError("--k must be >= 1");
    if (ns.empty()) throw ValidationError("--ns must list at least one depth");
    for (auto n : ns) {
      if (n < k) throw ValidationError("every n must be >= k");
    }
    const auto data = source.load();

    Dataset queries;
    json query_json;
    if (!queries_path.empty()) {
      DataSource qs = source;
      qs.path = queries_path;
      queries = qs.load();
      query_json = {{"path", queries_path}};
    } else {
      const auto rows = sample_rows(data.size(), sample_queries, query_seed);
      queries = data.select(rows);
      query_json = {{"sampled_from_data", sample_queries}, {"seed", query_seed}};
    }

    RecallOptions options;
    options.k = k;
    options.ns = ns;
    options.threads = ctx.threads;
    const auto truth = gt_cache.empty()
                           ? compute_ground_truth(data, queries, k, ctx.threads)
                           : load_or_compute_ground_truth(data, queries, k, gt_cache, ctx.threads);

    json results = json::array();
    json qjson = json::array();
    std::vector<RecallReport> all;
    for (auto kind : kinds) {
      const auto cfg = qopts.config(kind);
      qjson.push_back(quantizer_json(cfg, data.dim()));
      for (auto& report : run_recall_experiment(data, queries, truth, cfg, options)) {
        const auto hist = report.histogram();
        json counts = json::array();
        for (auto c : hist) counts.push_back(c);
        results.push_back({{"quantizer", report.quantizer},
                           {"k", report.k},
                           {"n", report.n},
                           {"mean", report.mean},
                           {"per_query", report.per_query},
                           {"histogram", {{"bins", kRecallHistogramBins}, {"range", {0.0, 1.0}},
                                          {"counts", counts}}}});
        all.push_back(std::move(report));
      }
    }
    const auto path = ctx.output("recall.json");
    write_json(path, {{"dataset", data.name()}, {"queries", queries.size()}, {"k", k},
                      {"results", results}});

    if (ctx.pretty) {
      ctx.out << std::left << std::setw(10) << "quantizer";
      for (auto n : ns) ctx.out << std::setw(10) << (std::to_string(k) + "@" + std::to_string(n));
      ctx.out << "\n";
      for (std::size_t i = 0; i < all.size(); i += ns.size()) {
        ctx.out << std::setw(10) << all[i].quantizer;
        for (std::size_t j = 0; j < ns.size(); ++j) ctx.out << std::setw(10) << fixed(all[i + j].mean, 3);
        ctx.out << "\n";
      }
      ctx.out << std::right;
    } else {
      for (const auto& r : all) {
        ctx.out << r.quantizer << " " << r.k << "@" << r.n << " mean=" << fixed(r.mean, 4) << "\n";
      }
    }
    ctx.out << "wrote " << path.string() << "\n";
    ctx.manifest("recall",
                 {{"data", source.describe()}, {"queries", query_json}, {"quantizers", qjson},
                  {"k", k}, {"ns", ns}, {"gt_cache", gt_cache.empty() ? json(nullptr) : json(gt_cache)},
                  {"threads", ctx.threads}},
                 {path});
  }
};

// --- bench -----------------------------------------------------------------

struct BenchCommand {
  std::string kernel = "b2sp";
  std::size_t d = 384;
  std::size_t count = 1'000'000;
  std::size_t trials = 10;
  std::uint64_t seed = 42;
  std::size_t pool = 1024;
  bool full_scan = false;
  std::size_t scan_queries = 10;
  std::string quantizer = "evp";
  DataSource source;
  QuantizerOptions qopts;

  void attach(CLI::App& app) {
    app.add_option("--kernel", kernel, "Kernel to time")
        ->check(CLI::IsMember({"b2sp", "euclidean-f32", "hamming", "masked-add"}))
        ->capture_default_str();
    app.add_option("--d", d, "Dimension")->capture_default_str();
    app.add_option("--count", count, "Comparisons per trial")->capture_default_str();
    app.add_option("--trials", trials, "Timed trials")->capture_default_str();
    app.add_option("--seed", seed, "Operand / query seed")->capture_default_str();
    app.add_option("--pool", pool, "Distinct operand vectors")->capture_default_str();
    app.add_flag("--full-scan", full_scan, "Time exhaustive 1-NN scans instead of one kernel");
    app.add_option("--scan-queries", scan_queries, "Queries per full scan")->capture_default_str();
    app.add_option("--quantizer", quantizer, "Code type for --full-scan")->capture_default_str();
    app.add_option("--data", source.path, "Input vectors for --full-scan (default: generated)");
    app.add_option("--format", source.format, "fvecs | raw-f32 | csv");
    app.add_option("--n", source.n, "Rows to generate for --full-scan")->capture_default_str();
    app.add_option("--data-seed", source.seed, "Generator seed for --full-scan")->capture_default_str();
    qopts.add_options(app);
  }

  void run(Context& ctx) {
    if (d == 0) throw ValidationError("--d must be >= 1");
    if (trials == 0) throw ValidationError("--trials must be >= 1");
    if (full_scan) {
      source.d = d;
      const auto cfg = qopts.config(parse_quantizer_kind(quantizer));
      (void)cfg.evp_for(d);
      const auto data = source.load();
      const auto r = bench_full_scan(data, scan_queries, cfg, trials, seed);
      const auto path = ctx.output("bench-full-scan-" + std::string(to_string(cfg.kind)) + ".json");
      write_json(path, {{"float_scan", report_json(r.float_scan)},
                        {"code_scan", report_json(r.code_scan)},
                        {"speedup", r.speedup}});
      if (ctx.pretty) {
        print_bench(ctx.out, r.float_scan);
        print_bench(ctx.out, r.code_scan);
      }
      ctx.out << "speedup=" << fixed(r.speedup, 2) << "\nwrote " << path.string() << "\n";
      ctx.manifest("bench",
                   {{"mode", "full-scan"}, {"data", source.describe()},
                    {"quantizer", quantizer_json(cfg, d)}, {"scan_queries", scan_queries},
                    {"trials", trials}, {"seed", seed}, {"threads", 1}},
                   {path});
      return;
    }
    KernelBenchOptions o;
    o.kernel = parse_bench_kernel(kernel);
    o.dim = d;
    o.count = count;
    o.trials = trials;
    o.seed = seed;
    o.pool = pool;
    const auto r = bench_kernel(o);
    const auto path = ctx.output("bench-" + std::string(to_string(o.kernel)) + ".json");
    write_json(path, report_json(r));
    if (ctx.pretty) {
      print_bench(ctx.out, r);
    } else {
      ctx.out << r.kernel << " mean_ms=" << fixed(r.mean_ms, 3) << " per_op_ns=" << fixed(r.per_op_ns, 3) << "\n";
    }
    ctx.out << "wrote " << path.string() << "\n";
    ctx.manifest("bench",
                 {{"mode", "kernel"}, {"kernel", to_string(o.kernel)}, {"d", d}, {"count", count},
                  {"trials", trials}, {"seed", seed}, {"pool", pool}, {"threads", 1}},
                 {path});
  }
};

// --- info ------------------------------------------------------------------

struct InfoCommand {
  std::size_t d = 0;
  std::optional<std::size_t> x;

  void attach(CLI::App& app) {
    app.add_option("--d", d, "Dimension")->required();
    app.add_option("--x", x, "Nonzero count (default: round(2d/3))");
  }

  void run(Context& ctx) {
    const auto cfg = x ? EvpConfig(d, *x) : EvpConfig::for_dimension(d);
    const double exponent = log10_vertex_count(cfg);
    ctx.out << "d=" << cfg.dim << " x=" << cfg.nonzeros << " log10_vertices=" << fixed(exponent, 2)
            << " (~10^" << static_cast<long long>(std::llround(exponent)) << ")\n";
  }
};

int exit_code_for(const std::exception& e, std::ostream& err) {
  err << "evpq: error: " << e.what() << "\n";
  if (dynamic_cast<const ValidationError*>(&e) != nullptr) return kValidation;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return kIo;
  if (dynamic_cast<const std::bad_alloc*>(&e) != nullptr) return kIo;
  return kInvariant;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ternary EVP quantisation toolkit", "evpq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string out_dir;
  bool pretty = false;
  std::size_t threads = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir", out_dir,
                    std::string("Output directory (default: $") + kOutputDirEnv + " or .)");
    sub->add_flag("--pretty", pretty, "Print a human-readable table");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  };

  GenCommand gen;
  QuantizeCommand quantize;
  CorrelateCommand correlate;
  RecallCommand recall;
  BenchCommand bench;
  InfoCommand info;

  auto* gen_app = app.add_subcommand("gen", "Generate a uniform-hypersphere dataset");
  gen.attach(*gen_app);
  auto* quantize_app = app.add_subcommand("quantize", "Quantise a dataset into a packed code file");
  quantize.attach(*quantize_app);
  auto* correlate_app = app.add_subcommand("correlate", "Spearman rho and Shepard data per quantizer");
  correlate.attach(*correlate_app);
  auto* recall_app = app.add_subcommand("recall", "k@n recall of proxy rankings");
  recall.attach(*recall_app);
  auto* bench_app = app.add_subcommand("bench", "Single-threaded distance kernel timings");
  bench.attach(*bench_app);
  auto* info_app = app.add_subcommand("info", "Print the x choice and vertex-count exponent for d");
  info.attach(*info_app);
  for (auto* sub : {gen_app, quantize_app, correlate_app, recall_app, bench_app}) add_common(sub);

  std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    Context ctx{args, out, out_dir.empty() ? default_out_dir() : fs::path(out_dir), pretty, threads};
    if (info_app->parsed()) {
      info.run(ctx);
      return kOk;
    }
    ensure_dir(ctx.out_dir);
    if (gen_app->parsed()) gen.run(ctx);
    if (quantize_app->parsed()) quantize.run(ctx);
    if (correlate_app->parsed()) correlate.run(ctx);
    if (recall_app->parsed()) recall.run(ctx);
    if (bench_app->parsed()) bench.run(ctx);
    return kOk;
  } catch (const std::exception& e) {
    return exit_code_for(e, err);
  }
}

}  // namespace evpq::cli
