// citestack: generate, ingest, detect, evaluate, report, serve.
// Exit codes: 0 ok, 1 usage, 2 data error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "citestack/citestack.hpp"
#include "citestack/server.hpp"

namespace fs = std::filesystem;
using namespace citestack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw DataError(std::string(what) + " '" + path + "' does not exist");
}

void require_dir(const std::string& path, const char* what) {
  if (!fs::is_directory(path)) throw DataError(std::string(what) + " '" + path + "' is not a directory");
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  return out;
}

void write_store_inputs(const fs::path& dir, const CitationTensor& t) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "tensor.csv");
    write_tensor_csv(out, t);
  }
  {
    auto out = open_out(dir / "journals.tsv");
    write_journal_table(out, t.journals());
  }
}

CitationTensor load_tensor_dir(const std::string& dir) {
  require_dir(dir, "tensor directory");
  require_file((fs::path(dir) / "journals.tsv").string(), "journal table");
  require_file((fs::path(dir) / "tensor.csv").string(), "tensor");
  auto journals = read_journal_table_file((fs::path(dir) / "journals.tsv").string());
  return read_tensor_csv_file((fs::path(dir) / "tensor.csv").string(), std::move(journals));
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  synth::SynthConfig cfg;
  std::string out;
};

void add_generate(CLI::App& app, GenerateArgs& a) {
  auto* c = app.add_subcommand("generate", "Write a synthetic dataset with injected anomalies");
  c->add_option("--out", a.out, "Output directory")->required();
  c->add_option("--seed", a.cfg.seed, "RNG seed")->capture_default_str();
  c->add_option("--n-journals", a.cfg.n_journals, "Number of journals")->capture_default_str();
  c->add_option("--n-anomalies", a.cfg.n_anomalies, "Number of labelled anomalies")->capture_default_str();
  c->add_option("--year-min", a.cfg.year_min, "First year")->capture_default_str();
  c->add_option("--year-max", a.cfg.year_max, "Last year")->capture_default_str();
  c->add_option("--papers-min", a.cfg.papers_min, "Minimum papers per journal")->capture_default_str();
  c->add_option("--papers-max", a.cfg.papers_max, "Maximum papers per journal")->capture_default_str();
  c->add_option("--base-min", a.cfg.base_min, "Minimum normal yearly count")->capture_default_str();
  c->add_option("--base-max", a.cfg.base_max, "Maximum normal yearly count")->capture_default_str();
  c->add_option("--spike-multiplier", a.cfg.spike_multiplier, "Spike level as a multiple of base-max")
      ->capture_default_str();
  c->add_option("--warmup-years", a.cfg.warmup_years, "Normal years before any injection")->capture_default_str();
}

int cmd_generate(const GenerateArgs& a) {
  const auto ds = synth::generate(a.cfg);
  synth::write_dataset(a.out, ds);
  std::cerr << "wrote " << ds.labels.size() << " labels, " << ds.tensor.journal_count() << " journals to " << a.out
            << '\n';
  return kExitOk;
}

// --- ingest -----------------------------------------------------------------

struct IngestArgs {
  std::string corpus;
  std::string out;
  std::optional<int> year_min;
  std::optional<int> year_max;
};

void add_ingest(CLI::App& app, IngestArgs& a) {
  auto* c = app.add_subcommand("ingest", "Aggregate a paper-level corpus into a citation tensor");
  c->add_option("--corpus", a.corpus, "Corpus file (TSV or JSON lines)")->required();
  c->add_option("--out", a.out, "Output directory for tensor.csv and journals.tsv")->required();
  c->add_option("--year-min", a.year_min, "Reject papers before this year");
  c->add_option("--year-max", a.year_max, "Reject papers after this year");
}

int cmd_ingest(const IngestArgs& a) {
  require_file(a.corpus, "corpus");
  const auto corpus = ingest_file(a.corpus, {a.year_min, a.year_max});
  const auto t = build_tensor(corpus);
  write_store_inputs(a.out, t);
  nlohmann::ordered_json s;
  s["papers"] = corpus.size();
  s["journals"] = corpus.journals().size();
  s["year_min"] = t.year_min();
  s["year_max"] = t.year_max();
  s["resolved_references"] = corpus.resolved_reference_count();
  s["dangling_references"] = corpus.dangling_references();
  s["citations"] = t.grand_total();
  std::cout << s.dump(2) << '\n';
  return kExitOk;
}

// --- detect -----------------------------------------------------------------

struct DetectArgs {
  std::string corpus;
  std::string tensor_dir;
  std::string out;
  std::string method = "combined";
  PipelineOptions opts;
};

void add_detect(CLI::App& app, DetectArgs& a) {
  auto* c = app.add_subcommand("detect", "Run the detection pipeline");
  auto* corpus = c->add_option("--corpus", a.corpus, "Paper-level corpus (enables explanations)");
  auto* tensor = c->add_option("--tensor-dir", a.tensor_dir, "Directory with tensor.csv and journals.tsv");
  corpus->excludes(tensor);
  tensor->excludes(corpus);
  c->add_option("--out", a.out, "Output directory (findings.jsonl, store files, report/)")->required();
  c->add_option("--method", a.method, "combined | static | temporal")
      ->check(CLI::IsMember({"combined", "static", "temporal"}))
      ->capture_default_str();
  c->add_option("--buckets", a.opts.bucket_count, "Journal size buckets")->capture_default_str();
  c->add_option("--fence-k", a.opts.fence_k, "IQR fence multiplier")->capture_default_str();
  c->add_flag("--include-below-fence", a.opts.include_below_fence, "Treat below-fence pairs as candidates");
  c->add_option("--min-history", a.opts.temporal.min_history, "Years of history before a year is tested")
      ->capture_default_str();
  c->add_option("--sigmas", a.opts.temporal.band_sigmas, "Band width in standard deviations")
      ->capture_default_str();
  c->add_flag("--temporal-all-pairs", a.opts.temporal_all_pairs, "Run the time-series test on every pair");
  c->add_option("--crowding-sigmas", a.opts.explain.crowding_sigmas, "Crowded-paper threshold in sigmas")
      ->capture_default_str();
  c->add_option("--many-threshold", a.opts.explain.many_threshold, "Percent above which a side is 'many'")
      ->capture_default_str();
  c->add_option("--one-threshold", a.opts.explain.one_threshold, "Percent below which a side is 'one'")
      ->capture_default_str();
}

int cmd_detect(DetectArgs a) {
  if (a.corpus.empty() == a.tensor_dir.empty()) throw UsageError("detect needs exactly one of --corpus, --tensor-dir");
  a.opts.method = parse_method(a.method);
  const auto t0 = std::chrono::steady_clock::now();

  std::optional<Corpus> corpus;
  std::optional<CitationTensor> tensor;
  if (!a.corpus.empty()) {
    require_file(a.corpus, "corpus");
    corpus = ingest_file(a.corpus);
    tensor = build_tensor(*corpus);
  } else {
    tensor = load_tensor_dir(a.tensor_dir);
  }
  const auto res = run_pipeline(*tensor, corpus ? &*corpus : nullptr, a.opts);

  const fs::path out(a.out);
  write_store_inputs(out, *tensor);
  {
    auto f = open_out(out / "findings.jsonl");
    write_findings_jsonl(f, res.findings);
  }
  {
    auto f = open_out(out / "below_fence.csv");
    f << "sender_id,receiver_id,total_citations,deviation\n";
    for (const auto& c : res.below_fence) {
      f << tensor->journals().id(c.pair.sender) << ',' << tensor->journals().id(c.pair.receiver) << ','
        << c.total_citations << ',' << c.deviation << '\n';
    }
  }
  write_report(out / "report", res.findings, tensor->journals());

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& d = res.diagnostics;
  std::cerr << "method=" << to_string(a.opts.method) << " buckets=" << d.buckets << " candidates=" << d.candidates_above
            << " below_fence=" << d.candidates_below << " skipped_grids=" << d.skipped_grids
            << " tested_pairs=" << d.tested_pairs << " findings=" << res.findings.size() << " time=" << secs << "s\n";
  return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string findings;
  std::string labels;
  std::string baseline;
  std::string tensor_dir;
  std::string out;
  bool year_strict = false;
  std::uint64_t seed = 42;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* c = app.add_subcommand("evaluate", "Score findings (or a baseline) against ground-truth labels");
  c->add_option("--labels", a.labels, "labels.csv")->required();
  c->add_option("--findings", a.findings, "findings.jsonl");
  c->add_option("--baseline", a.baseline, "Evaluate a baseline instead of findings")
      ->check(CLI::IsMember({"kmeans"}));
  c->add_option("--tensor-dir", a.tensor_dir, "Tensor directory for --baseline");
  c->add_option("--seed", a.seed, "Baseline seed")->capture_default_str();
  c->add_flag("--year-strict", a.year_strict, "Require the finding year to match a label year");
  c->add_option("--out", a.out, "Also write the metrics JSON here");
}

int cmd_evaluate(const EvaluateArgs& a) {
  if (a.baseline.empty() == a.findings.empty()) throw UsageError("evaluate needs exactly one of --findings, --baseline");
  if (!a.baseline.empty() && a.tensor_dir.empty()) throw UsageError("--baseline needs --tensor-dir");
  require_file(a.labels, "labels");
  const auto labels = synth::read_labels_csv_file(a.labels);

  std::vector<AnomalyFinding> findings;
  if (!a.baseline.empty()) {
    const auto t = load_tensor_dir(a.tensor_dir);
    KMeansOptions ko;
    ko.seed = a.seed;
    findings = pair_findings(t, kmeans_baseline(t, ko));
  } else {
    require_file(a.findings, "findings");
    findings = read_findings_jsonl_file(a.findings);
  }
  const auto m = evaluate(findings, labels, {a.year_strict});
  const auto j = to_json(m).dump(2);
  std::cout << j << '\n';
  if (!a.out.empty()) {
    auto f = open_out(a.out);
    f << j << '\n';
  }
  return kExitOk;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
  std::string findings;
  std::string journals;
  std::string out;
};

void add_report(CLI::App& app, ReportArgs& a) {
  auto* c = app.add_subcommand("report", "Recompute summary and plot series from a findings file");
  c->add_option("--findings", a.findings, "findings.jsonl")->required();
  c->add_option("--journals", a.journals, "journals.tsv")->required();
  c->add_option("--out", a.out, "Output directory")->required();
}

int cmd_report(const ReportArgs& a) {
  require_file(a.findings, "findings");
  require_file(a.journals, "journal table");
  const auto findings = read_findings_jsonl_file(a.findings);
  const auto journals = read_journal_table_file(a.journals);
  write_report(a.out, findings, journals);
  std::cout << summary_json(findings, journals).dump(2) << '\n';
  return kExitOk;
}

// --- serve ------------------------------------------------------------------

struct ServeArgs {
  std::string store;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

void add_serve(CLI::App& app, ServeArgs& a) {
  auto* c = app.add_subcommand("serve", "Serve a detection run over HTTP");
  c->add_option("--store", a.store, "Directory written by `detect`")->required();
  c->add_option("--host", a.host, "Bind address")->capture_default_str();
  c->add_option("--port", a.port, "Port")->capture_default_str()->check(CLI::Range(0, 65535));
  c->add_option("--static-dir", a.static_dir, "Portal bundle served at /");
}

int cmd_serve(const ServeArgs& a) {
  require_dir(a.store, "store");
  const auto store = api::FindingsStore::load(a.store);
  httplib::Server server;
  api::configure_server(server, store, a.static_dir);
  std::cerr << "serving " << store.findings().size() << " findings on http://" << a.host << ':' << a.port << '\n';
  if (!server.listen(a.host, a.port)) throw DataError("cannot listen on " + a.host + ":" + std::to_string(a.port));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"citestack: journal citation anomaly detection"};
  app.require_subcommand(1);
  GenerateArgs gen;
  IngestArgs ing;
  DetectArgs det;
  EvaluateArgs ev;
  ReportArgs rep;
  ServeArgs srv;
  add_generate(app, gen);
  add_ingest(app, ing);
  add_detect(app, det);
  add_evaluate(app, ev);
  add_report(app, rep);
  add_serve(app, srv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "generate") return cmd_generate(gen);
    if (name == "ingest") return cmd_ingest(ing);
    if (name == "detect") return cmd_detect(det);
    if (name == "evaluate") return cmd_evaluate(ev);
    if (name == "report") return cmd_report(rep);
    if (name == "serve") return cmd_serve(srv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
