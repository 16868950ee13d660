// Copyright 2026 The sftmix Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// sftmix: dataset curation and Individual Select orchestration.
//
// Exit codes: 0 success, 1 unexpected failure, 2 validation (bad input,
// manifest or arguments), 3 evaluator failure, 4 ledger corrupt or locked,
// 5 I/O.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "run_lock.h"
#include "sftmix/corpus.h"
#include "sftmix/digest.h"
#include "sftmix/error.h"
#include "sftmix/evaluator.h"
#include "sftmix/ledger.h"
#include "sftmix/metrics.h"
#include "sftmix/packing.h"
#include "sftmix/registry.h"
#include "sftmix/reports.h"
#include "sftmix/schedule.h"
#include "sftmix/selection.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sftmix::tools {
namespace {

constexpr const char* kWorkDirEnv = "SFTMIX_WORK_DIR";

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out_dir;
  double epsilon = ComparisonPolicy{}.epsilon;
  double mme_denominator = ComparisonPolicy{}.mme_denominator;

  ComparisonPolicy policy() const {
    ComparisonPolicy p;
    p.epsilon = epsilon;
    p.mme_denominator = mme_denominator;
    p.Validate();
    return p;
  }
  fs::path OutDir() const {
    if (!out_dir.empty()) return out_dir;
    if (const char* env = std::getenv(kWorkDirEnv); env && *env) return env;
    return fs::current_path();
  }
};

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

Registry RegistryFrom(const std::string& path) {
  return path.empty() ? DefaultRegistry() : LoadRegistry(path);
}

std::vector<Category> ParseOrder(const std::string& order,
                                 const Registry& registry) {
  if (order.empty()) return registry.taxonomy();
  std::vector<Category> categories;
  if (order == "none") return categories;
  std::stringstream stream(order);
  std::string name;
  while (std::getline(stream, name, ',')) {
    auto category = registry.FindCategory(name);
    if (!category) throw ValidationError("unknown category \"" + name + "\"");
    categories.push_back(*category);
  }
  return categories;
}

Addition ParseAddition(const std::string& text) {
  const std::size_t colon = text.rfind(':');
  if (colon == std::string::npos) return {text, Take::All()};
  const std::string take = text.substr(colon + 1);
  if (take == "ALL" || take == "all") return {text.substr(0, colon), Take::All()};
  if (take.empty() || take.find_first_not_of("0123456789") != std::string::npos) {
    throw ValidationError("bad take in \"" + text + "\" (expected id[:N|ALL])");
  }
  return {text.substr(0, colon), Take::N(std::stoull(take))};
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string input;
  std::string dataset;
  std::string registry;
  bool text_only = false;
  std::string valid_out;
  std::string report_out;
};

int RunIngest(const IngestArgs& args) {
  IngestOptions options;
  options.text_only = args.text_only;
  if (!args.registry.empty()) {
    const Registry registry = LoadRegistry(args.registry);
    if (const DatasetDescriptor* d = registry.Find(args.dataset)) {
      options.text_only = options.text_only || d->category.name == "Text-only";
    }
  }
  const IngestResult result = Ingest(args.input, args.dataset, options);
  std::string report;
  for (const IngestIssue& issue : result.issues) {
    report += json{{"line", issue.line},
                   {"sample_id", issue.sample_id},
                   {"reason", issue.reason}}
                  .dump() +
              "\n";
  }
  if (!args.report_out.empty()) WriteText(args.report_out, report);
  if (!args.valid_out.empty()) {
    std::string text;
    for (const SampleRecord& record : result.records) {
      text += SampleToLine(record) + "\n";
    }
    WriteText(args.valid_out, text);
  }
  std::cout << "dataset " << args.dataset << ": " << result.count()
            << " valid records, " << result.issues.size() << " quarantined\n";
  if (args.report_out.empty()) std::cout << report;
  return 0;
}

// ---------------------------------------------------------------------------
// registry

int RunRegistryValidate(const std::string& manifest) {
  const Registry registry = RegistryFrom(manifest);
  std::size_t non_empty = 0;
  for (const Category& category : registry.taxonomy()) {
    const auto candidates = registry.CandidatesIn(category);
    if (!candidates.empty()) ++non_empty;
    std::cout << "  " << category.name << ": " << candidates.size() << "\n";
  }
  std::cout << registry.CandidateCount() << " candidate datasets across "
            << registry.taxonomy().size() << " categories (" << non_empty
            << " non-empty)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compose / materialize

struct ComposeArgs {
  std::string name = "composition";
  std::string base;
  std::vector<std::string> additions;
  std::string registry;
  std::string improve_with;
  std::string out;
};

int RunCompose(const ComposeArgs& args) {
  std::optional<Composition> base;
  if (!args.base.empty()) base = LoadComposition(args.base);
  if (!args.improve_with.empty()) {
    if (!base) throw ValidationError("--improve-with needs --base");
    base = BuildImprovedBaseline(*base, args.improve_with);
  }
  std::vector<Addition> additions;
  for (const std::string& text : args.additions) {
    additions.push_back(ParseAddition(text));
  }
  Composition result =
      additions.empty() && base
          ? Composition(args.name, base->entries(), base->lineage())
          : Compose(args.name, base ? &*base : nullptr, additions,
                    RegistryFrom(args.registry));
  WriteText(args.out, result.Serialize());
  std::cerr << "composition " << result.name() << ": " << result.size()
            << " entries, content_hash " << result.content_hash() << "\n";
  return 0;
}

struct MaterializeArgs {
  std::string composition;
  std::string data_dir;
  std::string registry;
  std::string out;
};

int RunMaterialize(const MaterializeArgs& args, const GlobalOptions& global) {
  const Composition composition = LoadComposition(args.composition);
  const Registry registry = RegistryFrom(args.registry);
  const std::size_t written = Materialize(
      composition, DatasetLocator{args.data_dir}, global.seed, args.out,
      &registry);
  std::cout << "wrote " << written << " records to " << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// subset

struct SubsetArgs {
  std::string corpus;
  std::string corpus_id;
  std::vector<std::uint64_t> sizes;
  bool scaling = false;
  std::string out;
};

int RunSubset(const SubsetArgs& args, const GlobalOptions& global) {
  const std::vector<std::string> ids = LoadCorpusIds(args.corpus);
  const std::string corpus_id =
      args.corpus_id.empty() ? fs::path(args.corpus).stem().string()
                             : args.corpus_id;
  std::vector<std::uint64_t> sizes = args.sizes;
  if (args.scaling) {
    sizes.assign(std::begin(kDefaultScalingSizes),
                 std::end(kDefaultScalingSizes));
  }
  if (sizes.empty()) throw ValidationError("give --size or --scaling");
  if (sizes.size() == 1 && !args.out.empty()) {
    WriteText(args.out,
              SampleSubset(ids, {corpus_id, sizes[0], global.seed}).Serialize());
    return 0;
  }
  const fs::path dir = global.OutDir();
  fs::create_directories(dir);
  for (std::uint64_t size : sizes) {
    const fs::path path =
        dir / (corpus_id + "-" + std::to_string(size) + ".subset");
    WriteText(path.string(),
              SampleSubset(ids, {corpus_id, size, global.seed}).Serialize());
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// pack

struct PackArgs {
  std::string input;
  std::uint64_t max_len = 4096;
  std::uint64_t image_token_cost = kDefaultImageTokenCost;
  std::string length_fn = "whitespace";
  std::string oversize = "isolate";
  std::string out;
};

int RunPack(const PackArgs& args) {
  PackingConfig config;
  config.max_len = args.max_len;
  config.image_token_cost = args.image_token_cost;
  config.length_fn = args.length_fn == "chars_div4" ? LengthFn::kCharsDiv4
                                                    : LengthFn::kWhitespace;
  config.oversize_policy = args.oversize == "reject" ? OversizePolicy::kReject
                                                     : OversizePolicy::kIsolate;
  const IngestResult samples = Ingest(args.input, "");
  const auto sequences = Pack(samples.records, config);
  WriteText(args.out, PackedManifest(sequences));
  std::size_t oversize = 0;
  for (const PackedSequence& s : sequences) oversize += s.oversize ? 1 : 0;
  std::cerr << samples.count() << " samples packed into " << sequences.size()
            << " sequences (" << oversize << " oversize, "
            << samples.issues.size() << " invalid samples skipped)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// select

struct RunManifest {
  std::string run_id;
  std::string registry;
  std::string baseline;
  std::string evaluator;
  std::vector<std::string> order;
  ComparisonPolicy policy;
  std::string out_dir;

  json ToJson() const {
    return {{"run_id", run_id},
            {"registry", registry},
            {"baseline", baseline},
            {"evaluator", evaluator},
            {"order", order},
            {"policy",
             {{"epsilon", policy.epsilon},
              {"mme_denominator", policy.mme_denominator}}},
            {"out_dir", out_dir}};
  }
  static RunManifest FromJson(const json& obj) {
    RunManifest m;
    m.run_id = obj.at("run_id").get<std::string>();
    m.registry = obj.at("registry").get<std::string>();
    m.baseline = obj.at("baseline").get<std::string>();
    m.evaluator = obj.at("evaluator").get<std::string>();
    m.order = obj.at("order").get<std::vector<std::string>>();
    m.policy.epsilon = obj.at("policy").at("epsilon").get<double>();
    m.policy.mme_denominator =
        obj.at("policy").at("mme_denominator").get<double>();
    m.out_dir = obj.at("out_dir").get<std::string>();
    return m;
  }
};

struct SelectArgs {
  std::string registry;
  std::string baseline;
  std::string evaluator;
  std::string order;
  std::string run_id;
  std::string run_dir;
  std::size_t parallel = 1;
};

void PrintSummary(const SelectionSummary& summary) {
  for (const auto& [category, accepted] : summary.per_category) {
    std::cout << "  " << category << ": " << accepted.size() << " accepted";
    for (std::size_t i = 0; i < accepted.size(); ++i) {
      std::cout << (i == 0 ? " (" : ", ") << accepted[i];
    }
    std::cout << (accepted.empty() ? "" : ")") << "\n";
  }
  std::cout << "final composition: " << summary.final_composition.size()
            << " entries, content_hash "
            << summary.final_composition.content_hash() << "\n";
  std::cout << SummaryLine(summary) << "\n";
}

fs::path ResolveRunDir(const SelectArgs& args, const GlobalOptions& global) {
  if (!args.run_dir.empty()) return args.run_dir;
  if (args.run_id.empty()) throw ValidationError("give --run-dir or --run-id");
  return global.OutDir() / args.run_id;
}

std::unique_ptr<Evaluator> LoadEvaluator(const std::string& path,
                                         const ComparisonPolicy& policy) {
  const EvaluatorSpec spec = LoadEvaluatorSpec(path);
  spec.Validate(policy);
  return MakeEvaluator(spec);
}

int RunSelectRun(const SelectArgs& args, const GlobalOptions& global) {
  for (const auto* path : {&args.registry, &args.baseline, &args.evaluator}) {
    if (!path->empty() && !fs::exists(*path)) {
      throw ValidationError("missing input file " + *path);
    }
  }
  if (args.baseline.empty() || args.evaluator.empty()) {
    throw ValidationError("select run needs --baseline and --evaluator");
  }
  const ComparisonPolicy policy = global.policy();
  const Registry registry = RegistryFrom(args.registry);
  const Composition baseline = LoadComposition(args.baseline);
  const std::vector<Category> order = ParseOrder(args.order, registry);
  auto evaluator = LoadEvaluator(args.evaluator, policy);

  RunManifest manifest;
  manifest.registry = args.registry.empty()
                          ? std::string()
                          : fs::absolute(args.registry).string();
  manifest.baseline = fs::absolute(args.baseline).string();
  manifest.evaluator = fs::absolute(args.evaluator).string();
  for (const Category& c : order) manifest.order.push_back(c.name);
  manifest.policy = policy;
  manifest.out_dir = fs::absolute(global.OutDir()).string();
  manifest.run_id = args.run_id;
  if (manifest.run_id.empty()) {
    // Derived from the inputs so reruns of the same experiment collide.
    manifest.run_id =
        "run-" + Sha256Hex(baseline.content_hash() + registry.ToManifest() +
                           evaluator->Fingerprint() + json(manifest.order).dump() +
                           json(manifest.ToJson()["policy"]).dump())
                     .substr(0, 12);
  }

  const fs::path run_dir = fs::path(manifest.out_dir) / manifest.run_id;
  if (fs::exists(run_dir / "ledger.jsonl")) {
    throw ValidationError("run id \"" + manifest.run_id + "\" already exists in " +
                          manifest.out_dir);
  }
  fs::create_directories(run_dir);
  RunLock lock(run_dir);
  WriteText((run_dir / "run.json").string(), manifest.ToJson().dump(2) + "\n");

  SelectionState state =
      InitRun(baseline, registry, order, policy, evaluator->Fingerprint(),
              manifest.run_id);
  LedgerWriter ledger =
      LedgerWriter::Create(run_dir / "ledger.jsonl", MakeRunHeader(state));
  std::cout << "run " << manifest.run_id << " in " << run_dir.string() << "\n";
  const SelectionSummary summary = RunIndividualSelect(
      state, *evaluator, StepOptions{&ledger, args.parallel});
  PrintSummary(summary);
  return 0;
}

int RunSelectResume(const SelectArgs& args, const GlobalOptions& global) {
  const fs::path run_dir = ResolveRunDir(args, global);
  const RunManifest manifest =
      RunManifest::FromJson(json::parse(ReadText(run_dir / "run.json")));
  RunLock lock(run_dir);
  const fs::path ledger_path = run_dir / "ledger.jsonl";
  LedgerWriter ledger = LedgerWriter::Reopen(ledger_path);
  SelectionState state = Resume(ledger_path);
  auto evaluator = LoadEvaluator(
      args.evaluator.empty() ? manifest.evaluator : args.evaluator,
      state.policy);
  if (evaluator->Fingerprint() != state.evaluator_fingerprint) {
    throw ValidationError("evaluator spec changed since the run started");
  }
  std::cout << "resuming " << state.run_id << ": " << state.rounds.size()
            << " rounds complete, " << state.decisions.size()
            << " decisions recorded\n";
  const SelectionSummary summary = RunIndividualSelect(
      state, *evaluator, StepOptions{&ledger, args.parallel});
  PrintSummary(summary);
  return 0;
}

int RunSelectStatus(const SelectArgs& args, const GlobalOptions& global) {
  const fs::path run_dir = ResolveRunDir(args, global);
  const SelectionState state = Resume(run_dir / "ledger.jsonl");
  std::cout << "run " << state.run_id << "\n";
  std::cout << "rounds completed: " << state.rounds.size() << "/"
            << state.order.size() << "\n";
  if (state.current_category) {
    std::cout << "current category: " << state.current_category->name
              << " (decided " << state.DecidedInCurrentRound().size()
              << ", pending " << state.PendingInCurrentRound().size() << ")\n";
  } else if (!state.category_queue.empty()) {
    std::cout << "next category: " << state.category_queue.front().name
              << " (pending " << state.PendingInCurrentRound().size() << ")\n";
  } else {
    std::cout << (state.finished() ? "finished\n" : "awaiting final score\n");
  }
  std::cout << "baseline size: " << state.baseline.size() << " entries\n";
  std::cout << SummaryLine(Summarize(state)) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report

int RunReportScaling(const std::string& input, const std::string& out,
                     const GlobalOptions& global) {
  const auto results = ParseScalingResults(ReadText(input));
  WriteText(out, ScalingReportCsv(results, global.policy()));
  return 0;
}

int RunReportImprovements(const std::string& ledger, const std::string& out) {
  WriteText(out, ImprovementsReportCsv(Resume(ledger)));
  return 0;
}

// ---------------------------------------------------------------------------
// train-config

struct TrainConfigArgs {
  bool frozen = false;
  std::uint64_t total_steps = 1;
  double warmup_frac = 0.03;
  double min_lr = 0.0;
  std::optional<double> lr_vision;
  std::optional<double> lr_adapter;
  std::optional<double> peak_lr_llm;
  std::string out;
};

int RunTrainConfig(const TrainConfigArgs& args) {
  TrainConfig config =
      args.frozen ? TrainConfig::FrozenDefaults() : TrainConfig::UnfrozenDefaults();
  config.total_steps = args.total_steps;
  config.warmup_frac = args.warmup_frac;
  config.min_lr = args.min_lr;
  if (args.lr_vision) config.lr_vision = *args.lr_vision;
  if (args.lr_adapter) config.lr_adapter = *args.lr_adapter;
  if (args.peak_lr_llm) config.peak_lr_llm = *args.peak_lr_llm;
  WriteText(args.out, SerializeTrainConfig(config));
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"sftmix: SFT dataset curation and greedy per-category selection"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for subsets and shuffles");
  app.add_option("--out-dir", global.out_dir,
                 std::string("Output directory (default: $") + kWorkDirEnv +
                     " or the current directory)");
  app.add_option("--policy-epsilon", global.epsilon,
                 "Comparable-performance tolerance in normalized points");
  app.add_option("--mme-denominator", global.mme_denominator,
                 "MME full score used for the 0-100 mapping");

  int exit_code = 0;

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a sample file");
  ingest_cmd->add_option("input", ingest.input, "Sample file (JSONL)")
      ->required();
  ingest_cmd->add_option("--dataset", ingest.dataset, "Dataset id")->required();
  ingest_cmd->add_option("--registry", ingest.registry,
                         "Registry manifest (to detect text-only datasets)");
  ingest_cmd->add_flag("--text-only", ingest.text_only,
                       "Reject records that reference images");
  ingest_cmd->add_option("--valid-out", ingest.valid_out,
                         "Write the valid records here");
  ingest_cmd->add_option("--report", ingest.report_out,
                         "Write quarantined records (JSONL) here");
  ingest_cmd->callback([&] { exit_code = RunIngest(ingest); });

  std::string registry_manifest;
  auto* registry_cmd = app.add_subcommand("registry", "Registry tools");
  registry_cmd->require_subcommand(1);
  auto* validate_cmd = registry_cmd->add_subcommand(
      "validate", "Check a registry manifest and print category counts");
  validate_cmd->add_option("manifest", registry_manifest,
                           "Manifest (default: bundled registry)");
  validate_cmd->callback(
      [&] { exit_code = RunRegistryValidate(registry_manifest); });
  std::string export_out;
  auto* export_cmd =
      registry_cmd->add_subcommand("export", "Print the bundled manifest");
  export_cmd->add_option("-o,--out", export_out, "Output file (default stdout)");
  export_cmd->callback([&] {
    WriteText(export_out, std::string(DefaultRegistryManifest()));
  });

  ComposeArgs compose;
  auto* compose_cmd = app.add_subcommand("compose", "Build a composition");
  compose_cmd->add_option("--name", compose.name, "Composition name");
  compose_cmd->add_option("--base", compose.base, "Base composition file");
  compose_cmd->add_option("--add", compose.additions,
                          "Dataset to append, as id or id:N or id:ALL");
  compose_cmd->add_option("--registry", compose.registry,
                          "Registry manifest (default: bundled)");
  compose_cmd->add_option(
      "--improve-with", compose.improve_with,
      "Replace the base's detail-description entry with this dataset id");
  compose_cmd->add_option("-o,--out", compose.out, "Output (default stdout)");
  compose_cmd->callback([&] { exit_code = RunCompose(compose); });

  MaterializeArgs materialize;
  auto* materialize_cmd = app.add_subcommand(
      "materialize", "Write the shuffled records of a composition");
  materialize_cmd->add_option("--composition", materialize.composition)
      ->required();
  materialize_cmd->add_option("--data-dir", materialize.data_dir,
                              "Directory holding <dataset_id>.jsonl files")
      ->required();
  materialize_cmd->add_option("--registry", materialize.registry,
                              "Registry manifest (default: bundled)");
  materialize_cmd->add_option("-o,--out", materialize.out)->required();
  materialize_cmd->callback(
      [&] { exit_code = RunMaterialize(materialize, global); });

  SubsetArgs subset;
  auto* subset_cmd = app.add_subcommand(
      "subset", "Draw nested deterministic subsets of a corpus");
  subset_cmd->add_option("--corpus", subset.corpus,
                         "Sample file or list of record ids")
      ->required();
  subset_cmd->add_option("--corpus-id", subset.corpus_id,
                         "Corpus name (default: file stem)");
  subset_cmd->add_option("--size", subset.sizes, "Subset size (repeatable)");
  subset_cmd->add_flag("--scaling", subset.scaling,
                       "Use the seven default scaling sizes (1M to 100M)");
  subset_cmd->add_option("-o,--out", subset.out,
                         "Output file for a single size");
  subset_cmd->callback([&] { exit_code = RunSubset(subset, global); });

  PackArgs pack;
  auto* pack_cmd =
      app.add_subcommand("pack", "Pack samples into fixed-length sequences");
  pack_cmd->add_option("--input", pack.input, "Sample file (JSONL)")
      ->required();
  pack_cmd->add_option("--max-len", pack.max_len, "Sequence budget in tokens")
      ->check(CLI::PositiveNumber);
  pack_cmd->add_option("--image-token-cost", pack.image_token_cost,
                       "Tokens charged per image");
  pack_cmd->add_option("--length-fn", pack.length_fn, "Length estimate")
      ->check(CLI::IsMember({"whitespace", "chars_div4"}));
  pack_cmd->add_option("--oversize", pack.oversize,
                       "Handling of samples longer than --max-len")
      ->check(CLI::IsMember({"isolate", "reject"}));
  pack_cmd->add_option("-o,--out", pack.out, "Manifest (default stdout)");
  pack_cmd->callback([&] { exit_code = RunPack(pack); });

  SelectArgs select;
  auto* select_cmd =
      app.add_subcommand("select", "Per-category greedy dataset selection");
  select_cmd->require_subcommand(1);
  auto* run_cmd = select_cmd->add_subcommand("run", "Start a selection run");
  run_cmd->add_option("--registry", select.registry,
                      "Registry manifest (default: bundled)");
  run_cmd->add_option("--baseline", select.baseline,
                      "Starting composition file")
      ->required();
  run_cmd->add_option("--evaluator", select.evaluator,
                      "Evaluator spec (JSON)")
      ->required();
  run_cmd->add_option("--order", select.order,
                      "Comma-separated category order (default: taxonomy "
                      "order; \"none\" for no categories)");
  run_cmd->add_option("--run-id", select.run_id,
                      "Run id (default: derived from the inputs)");
  run_cmd->add_option("--parallel", select.parallel,
                      "Concurrent candidate evaluations per round")
      ->check(CLI::PositiveNumber);
  run_cmd->callback([&] { exit_code = RunSelectRun(select, global); });

  auto* resume_cmd =
      select_cmd->add_subcommand("resume", "Continue a run from its ledger");
  resume_cmd->add_option("--run-dir", select.run_dir, "Run directory");
  resume_cmd->add_option("--run-id", select.run_id,
                         "Run id inside --out-dir");
  resume_cmd->add_option("--evaluator", select.evaluator,
                         "Override the evaluator spec path");
  resume_cmd->add_option("--parallel", select.parallel,
                         "Concurrent candidate evaluations per round")
      ->check(CLI::PositiveNumber);
  resume_cmd->callback([&] { exit_code = RunSelectResume(select, global); });

  auto* status_cmd =
      select_cmd->add_subcommand("status", "Summarize a run's ledger");
  status_cmd->add_option("--run-dir", select.run_dir, "Run directory");
  status_cmd->add_option("--run-id", select.run_id,
                         "Run id inside --out-dir");
  status_cmd->callback([&] { exit_code = RunSelectStatus(select, global); });

  std::string report_input;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "CSV reports");
  report_cmd->require_subcommand(1);
  auto* scaling_cmd = report_cmd->add_subcommand(
      "scaling", "Scores per pre-training subset size");
  scaling_cmd
      ->add_option("--input", report_input,
                   "JSONL of {model, size, benchmark, raw}")
      ->required();
  scaling_cmd->add_option("-o,--out", report_out, "CSV (default stdout)");
  scaling_cmd->callback(
      [&] { exit_code = RunReportScaling(report_input, report_out, global); });
  auto* improvements_cmd = report_cmd->add_subcommand(
      "improvements", "Baseline scores after each selection round");
  improvements_cmd->add_option("--ledger", report_input, "Run ledger")
      ->required();
  improvements_cmd->add_option("-o,--out", report_out, "CSV (default stdout)");
  improvements_cmd->callback(
      [&] { exit_code = RunReportImprovements(report_input, report_out); });

  TrainConfigArgs train;
  auto* train_cmd = app.add_subcommand(
      "train-config", "Emit a learning-rate configuration file");
  train_cmd->add_flag("--frozen", train.frozen,
                      "Freeze the vision encoder (adapter lr 1e-3, no vision lr)");
  train_cmd->add_option("--total-steps", train.total_steps)
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--warmup-frac", train.warmup_frac)
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--min-lr", train.min_lr);
  train_cmd->add_option("--lr-vision", train.lr_vision);
  train_cmd->add_option("--lr-adapter", train.lr_adapter);
  train_cmd->add_option("--peak-lr-llm", train.peak_lr_llm);
  train_cmd->add_option("-o,--out", train.out, "Output (default stdout)");
  train_cmd->callback([&] { exit_code = RunTrainConfig(train); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ExitCodeFor(ErrorClass::kValidation);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

}  // namespace
}  // namespace sftmix::tools

int main(int argc, char** argv) { return sftmix::tools::Main(argc, argv); }
