// Copyright 2026 The amilkit Authors.
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

// Command-line driver: synth, preprocess, bag, train, eval, report, ablate.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amilkit/error.h"
#include "amilkit/jsonl.h"
#include "amilkit/pipeline.h"

namespace {

namespace fs = std::filesystem;
using amilkit::Error;
using amilkit::ErrorCode;
using nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int ReportError(std::string_view code, const std::string& message, int status) {
  std::cerr << amilkit::DumpJson({{"error", code}, {"message", message}}) << '\n';
  return status;
}

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct Flags {
  std::string config;
  std::string workdir;
  std::optional<uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> arch;
  std::optional<int> bag_size;
  std::optional<int> workers;
  std::vector<int> p_at;
  bool quiet = false;
};

amilkit::RunConfig Resolve(const Flags& flags) {
  amilkit::RunConfig config;
  config.workers = 0;
  if (!flags.config.empty()) config.Merge(amilkit::ReadJsonFile(flags.config));
  if (flags.seed) config.seed = *flags.seed;
  if (flags.mode) config.mode = amilkit::ParseBagMode(*flags.mode);
  if (flags.arch) config.model.arch = amilkit::ParseArch(*flags.arch);
  if (flags.bag_size) config.bag_size = *flags.bag_size;
  if (flags.workers) config.workers = *flags.workers;
  if (!flags.p_at.empty()) config.p_at = flags.p_at;
  if (!flags.workdir.empty()) {
    config.workdir = flags.workdir;
  } else if (config.workdir.empty()) {
    if (const char* env = std::getenv("AMILKIT_WORKDIR"); env && *env) {
      config.workdir = env;
    } else {
      throw Error(ErrorCode::kUsage,
                  "no workdir: pass --workdir, set paths.workdir in the config "
                  "or AMILKIT_WORKDIR");
    }
  }
  config.Finalize();
  return config;
}

json Dispatch(const std::string& command, const amilkit::RunConfig& config,
              std::ostream* progress) {
  if (command == "synth") return amilkit::RunSynth(config);
  if (command == "preprocess") return amilkit::RunPreprocess(config);
  if (command == "bag") return amilkit::RunBag(config);
  if (command == "train") return amilkit::RunTrain(config, progress);
  if (command == "eval") return amilkit::RunEval(config);
  if (command == "report") return amilkit::RunReport(config);
  if (command == "ablate") return amilkit::RunAblate(config, progress);
  throw Error(ErrorCode::kUsage, "unknown subcommand " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distantly supervised relation extraction with type-keyed bags"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config, "JSON config file (comments allowed)")
      ->check(CLI::ExistingFile);
  app.add_option("--workdir", flags.workdir,
                 "Artifact directory (falls back to AMILKIT_WORKDIR)");
  app.add_option("--seed", flags.seed, "Master seed");
  app.add_option("--mode", flags.mode, "Bag key mode")
      ->check(CLI::IsMember({"pair", "type"}));
  app.add_option("--arch", flags.arch, "Relation representation A..Q")
      ->check(CLI::IsMember({"A", "B", "C", "D", "E", "F", "G", "H", "I", "J",
                             "K", "L", "M", "N", "O", "P", "Q"}));
  app.add_option("--bag-size", flags.bag_size, "Instances per bag")
      ->check(CLI::PositiveNumber);
  app.add_option("--workers", flags.workers, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--p-at", flags.p_at, "Ranks for precision at k, e.g. 100,200")
      ->delimiter(',');
  app.add_flag("-q,--quiet", flags.quiet, "No per-epoch progress on stderr");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"synth", "Generate a synthetic graph, corpus and gold file"},
      {"preprocess", "Segment, match, align, sample negatives, mark and split"},
      {"bag", "Group instances into fixed-size bags and write the manifest"},
      {"train", "Train a model with early stopping on dev F1"},
      {"eval", "Score the test split at corpus and sentence level"},
      {"report", "Collect every metrics file into report.csv"},
      {"ablate", "Train and score all 17 relation representations"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError(amilkit::ErrorCodeName(ErrorCode::kUsage), e.what(), kExitUsage);
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const amilkit::RunConfig config = Resolve(flags);
    fs::create_directories(config.workdir / "meta");
    const std::string started = UtcNow();
    const auto t0 = std::chrono::steady_clock::now();
    const json summary = Dispatch(command, config, flags.quiet ? nullptr : &std::cerr);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<std::string> args(argv, argv + argc);
    amilkit::WriteJsonFile(config.workdir / "meta" / (command + ".json"),
                           {{"command", command},
                            {"argv", args},
                            {"started_at", started},
                            {"finished_at", UtcNow()},
                            {"elapsed_seconds", elapsed},
                            {"config", config.ToJson()}});
    std::cout << amilkit::DumpJson(summary) << '\n';
  } catch (const Error& e) {
    const bool usage =
        e.code() == ErrorCode::kUsage || e.code() == ErrorCode::kInvalidArch;
    return ReportError(amilkit::ErrorCodeName(e.code()), e.what(),
                       usage ? kExitUsage : kExitFailure);
  } catch (const std::exception& e) {
    return ReportError("internal", e.what(), kExitFailure);
  }
  return 0;
}
