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

#include "sftmix/evaluator.h"

#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <random>
#include <string>
#include <thread>
#include <utility>

#include "json.hpp"
#include "sftmix/digest.h"
#include "sftmix/error.h"
#include "text_util.h"

namespace sftmix {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json DeltasJson(const BenchmarkDeltas& deltas) {
  json obj = json::object();
  for (const auto& [benchmark, value] : deltas) obj[benchmark] = value;
  return obj;
}

BenchmarkDeltas DeltasFromJson(const json& obj) {
  if (!obj.is_object()) throw ParseError("deltas must be an object");
  BenchmarkDeltas deltas;
  for (const auto& [benchmark, value] : obj.items()) {
    if (!value.is_number()) {
      throw ParseError("delta for \"" + benchmark + "\" must be a number");
    }
    deltas[benchmark] = value.get<double>();
  }
  return deltas;
}

std::string ShellQuote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

void ReplaceAll(std::string& text, std::string_view from,
                const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

std::string Nonce() {
  static std::atomic<std::uint64_t> counter{0};
  thread_local std::mt19937_64 rng{std::random_device{}()};
  return std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
         std::to_string(rng());
}

enum class RunOutcome { kOk, kFailed, kTimedOut };

struct RunResult {
  RunOutcome outcome = RunOutcome::kFailed;
  int status = 0;
};

RunResult RunShell(const std::string& command,
                   std::chrono::milliseconds timeout) {
  const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  const pid_t pid = ::fork();
  if (pid < 0) throw CommandFailed("fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    ::execv("/bin/sh", const_cast<char* const*>(argv));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  auto poll = std::chrono::milliseconds(1);
  while (true) {
    int status = 0;
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) {
      const bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
      return {ok ? RunOutcome::kOk : RunOutcome::kFailed,
              WIFEXITED(status) ? WEXITSTATUS(status) : -1};
    }
    if (done < 0 && errno != EINTR) return {RunOutcome::kFailed, -1};
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      return {RunOutcome::kTimedOut, -1};
    }
    std::this_thread::sleep_for(poll);
    poll = std::min(poll * 2, std::chrono::milliseconds(50));
  }
}

}  // namespace

std::string EvaluatorSpec::ToJson() const {
  json obj;
  if (kind == EvaluatorKind::kOracle) {
    obj["kind"] = "oracle";
    obj["base_scores"] = DeltasJson(BenchmarkDeltas(oracle.base_scores.raw.begin(),
                                                    oracle.base_scores.raw.end()));
    json deltas = json::object();
    for (const auto& [dataset, row] : oracle.deltas) {
      deltas[dataset] = DeltasJson(row);
    }
    obj["deltas"] = std::move(deltas);
    json interactions = json::array();
    for (const InteractionTerm& term : oracle.interactions) {
      interactions.push_back({{"first", term.first},
                              {"second", term.second},
                              {"delta", DeltasJson(term.delta)}});
    }
    obj["interactions"] = std::move(interactions);
    obj["default_zero"] = oracle.default_zero;
  } else {
    obj["kind"] = "external";
    obj["command"] = external.command_template;
    obj["timeout_ms"] = external.timeout.count();
    obj["retries"] = external.retries;
    obj["work_dir"] = external.work_dir.string();
  }
  return obj.dump(2);
}

EvaluatorSpec EvaluatorSpec::FromJson(std::string_view text) {
  EvaluatorSpec spec;
  try {
    const json obj = json::parse(text);
    const auto kind = obj.at("kind").get<std::string>();
    if (kind == "oracle") {
      spec.kind = EvaluatorKind::kOracle;
      for (const auto& [benchmark, value] :
           DeltasFromJson(obj.at("base_scores"))) {
        spec.oracle.base_scores.raw[benchmark] = value;
      }
      if (obj.contains("deltas")) {
        for (const auto& [dataset, row] : obj.at("deltas").items()) {
          spec.oracle.deltas[dataset] = DeltasFromJson(row);
        }
      }
      if (obj.contains("interactions")) {
        for (const json& term : obj.at("interactions")) {
          spec.oracle.interactions.push_back(
              {term.at("first").get<std::string>(),
               term.at("second").get<std::string>(),
               DeltasFromJson(term.at("delta"))});
        }
      }
      spec.oracle.default_zero = obj.value("default_zero", false);
    } else if (kind == "external") {
      spec.kind = EvaluatorKind::kExternal;
      spec.external.command_template = obj.at("command").get<std::string>();
      if (obj.contains("timeout_ms")) {
        spec.external.timeout =
            std::chrono::milliseconds(obj.at("timeout_ms").get<std::int64_t>());
      }
      spec.external.retries = obj.value("retries", 0);
      spec.external.work_dir = obj.value("work_dir", std::string());
    } else {
      throw ParseError("evaluator kind must be \"oracle\" or \"external\"");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("evaluator spec: ") + e.what());
  }
  return spec;
}

std::string EvaluatorSpec::Fingerprint() const { return Sha256Hex(ToJson()); }

std::string Fingerprint(const EvaluatorSpec& spec) { return spec.Fingerprint(); }

void EvaluatorSpec::Validate(const ComparisonPolicy& policy) const {
  if (kind == EvaluatorKind::kExternal) {
    if (external.command_template.empty()) {
      throw ValidationError("external evaluator has no command");
    }
    if (external.timeout.count() <= 0 || external.retries < 0) {
      throw ValidationError("external evaluator needs a positive timeout and "
                            "non-negative retries");
    }
    return;
  }
  for (std::string_view benchmark : kCoreBenchmarks) {
    if (!oracle.base_scores.Has(benchmark)) {
      throw ValidationError("oracle base scores lack \"" +
                            std::string(benchmark) + "\"");
    }
    double low = oracle.base_scores.Raw(benchmark);
    double high = low;
    auto widen = [&](const BenchmarkDeltas& row) {
      if (auto it = row.find(benchmark); it != row.end()) {
        (it->second < 0 ? low : high) += it->second;
      }
    };
    for (const auto& [dataset, row] : oracle.deltas) widen(row);
    for (const InteractionTerm& term : oracle.interactions) widen(term.delta);
    try {
      Normalize(benchmark, low, policy);
      Normalize(benchmark, high, policy);
    } catch (const RangeError& e) {
      throw ValidationError("oracle can leave the admissible range: " +
                            std::string(e.what()));
    }
  }
}

EvaluatorSpec LoadEvaluatorSpec(const fs::path& path) {
  return EvaluatorSpec::FromJson(internal::ReadFile(path));
}

void SaveEvaluatorSpec(const EvaluatorSpec& spec, const fs::path& path) {
  internal::WriteFile(path, spec.ToJson() + "\n");
}

ScoreVector EvaluateOracle(const OracleSpec& oracle,
                           const Composition& composition) {
  ScoreVector scores = oracle.base_scores;
  auto apply = [&](const BenchmarkDeltas& row) {
    for (const auto& [benchmark, delta] : row) scores.raw[benchmark] += delta;
  };
  for (const CompositionEntry& entry : composition.entries()) {
    auto it = oracle.deltas.find(entry.dataset_id);
    if (it == oracle.deltas.end()) {
      if (oracle.default_zero) continue;
      throw UnknownDatasetError("oracle has no delta for dataset \"" +
                                entry.dataset_id + "\"");
    }
    apply(it->second);
  }
  for (const InteractionTerm& term : oracle.interactions) {
    if (composition.Contains(term.first) && composition.Contains(term.second)) {
      apply(term.delta);
    }
  }
  return scores;
}

OracleEvaluator::OracleEvaluator(EvaluatorSpec spec)
    : spec_(std::move(spec)), fingerprint_(spec_.Fingerprint()) {
  if (spec_.kind != EvaluatorKind::kOracle) {
    throw ValidationError("OracleEvaluator needs an oracle spec");
  }
}

ScoreVector OracleEvaluator::Evaluate(const Composition& composition) const {
  ScoreVector scores = EvaluateOracle(spec_.oracle, composition);
  scores.provenance = fingerprint_;
  return scores;
}

ExternalEvaluator::ExternalEvaluator(EvaluatorSpec spec)
    : spec_(std::move(spec)), fingerprint_(spec_.Fingerprint()) {
  if (spec_.kind != EvaluatorKind::kExternal) {
    throw ValidationError("ExternalEvaluator needs an external spec");
  }
  spec_.Validate();
}

ScoreVector ExternalEvaluator::Evaluate(const Composition& composition) const {
  const fs::path root = spec_.external.work_dir.empty()
                            ? fs::temp_directory_path() / "sftmix-eval"
                            : spec_.external.work_dir;
  std::string last_error;
  for (int attempt = 0; attempt <= spec_.external.retries; ++attempt) {
    // A fresh directory per attempt: a score file can only come from this
    // invocation.
    const fs::path dir = root / ("eval-" + Nonce());
    std::error_code ec;
    fs::create_directories(root, ec);
    if (!fs::create_directory(dir, ec) || ec) {
      throw IoError("cannot create evaluator work directory " + dir.string());
    }
    const fs::path manifest = dir / "composition.jsonl";
    const fs::path scores_path = dir / "scores.jsonl";
    internal::WriteFile(manifest, composition.Serialize());

    std::string command = spec_.external.command_template;
    const bool templated = command.find("{composition}") != std::string::npos ||
                           command.find("{out}") != std::string::npos;
    if (templated) {
      ReplaceAll(command, "{composition}", ShellQuote(manifest.string()));
      ReplaceAll(command, "{out}", ShellQuote(scores_path.string()));
    } else {
      command += " --composition " + ShellQuote(manifest.string()) + " --out " +
                 ShellQuote(scores_path.string());
    }

    const auto started = fs::file_time_type::clock::now();
    const RunResult run = RunShell(command, spec_.external.timeout);
    if (run.outcome == RunOutcome::kTimedOut) {
      last_error = "evaluator command timed out after " +
                   std::to_string(spec_.external.timeout.count()) + " ms";
      continue;
    }
    if (run.outcome == RunOutcome::kFailed) {
      last_error = "evaluator command exited with status " +
                   std::to_string(run.status);
      continue;
    }
    if (!fs::exists(scores_path)) {
      throw ScoreParseError("evaluator command produced no score file at " +
                            scores_path.string());
    }
    // One-second slack for filesystems with coarse timestamps.
    if (fs::last_write_time(scores_path) + std::chrono::seconds(1) < started) {
      throw ScoreParseError("stale score file " + scores_path.string());
    }
    ScoreVector scores;
    try {
      scores = LoadScores(scores_path);
    } catch (const ParseError& e) {
      throw ScoreParseError(e.what());
    }
    scores.provenance = fingerprint_;
    return scores;
  }
  throw CommandFailed(last_error);
}

std::unique_ptr<Evaluator> MakeEvaluator(const EvaluatorSpec& spec) {
  if (spec.kind == EvaluatorKind::kOracle) {
    return std::make_unique<OracleEvaluator>(spec);
  }
  return std::make_unique<ExternalEvaluator>(spec);
}

}  // namespace sftmix
