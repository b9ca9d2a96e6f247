// Command-line front end over the C API.
#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vnrg/vnrg.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

int exit_code(vnrg_status s) {
  if (s == VNRG_OK) return kExitOk;
  return s == VNRG_ERR_NUMERICAL ? kExitNumerical : kExitValidation;
}

std::string describe_text(const char* path, vnrg_status* status) {
  size_t needed = 0;
  *status = vnrg_checkpoint_describe(path, nullptr, 0, &needed);
  if (*status != VNRG_OK) return {};
  std::string buf(needed, '\0');
  *status = vnrg_checkpoint_describe(path, buf.data(), buf.size(), &needed);
  buf.resize(needed > 0 ? needed - 1 : 0);
  return buf;
}

struct RunOptions {
  std::vector<std::string> configs;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  bool oracle = false;
};

int run_configs(const RunOptions& opt) {
  const std::size_t n = opt.configs.size();
  std::vector<int> codes(n, kExitOk);
  std::mutex io;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const std::string& config = opt.configs[i];
      std::string out_dir = opt.output_dir;
      if (!out_dir.empty() && n > 1) out_dir = (std::filesystem::path(out_dir) / std::filesystem::path(config).stem()).string();
      vnrg_run_overrides ov{};
      ov.output_dir = out_dir.empty() ? nullptr : out_dir.c_str();
      ov.has_seed = opt.seed ? 1 : 0;
      ov.seed = opt.seed.value_or(0);
      ov.oracle = opt.oracle ? 1 : 0;
      const vnrg_status s = vnrg_experiment_run(config.c_str(), &ov);
      codes[i] = exit_code(s);
      std::lock_guard lock(io);
      if (s == VNRG_OK)
        std::cout << config << ": done\n";
      else
        std::cerr << config << ": error: " << vnrg_last_error() << "\n";
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(opt.jobs, 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (std::find(codes.begin(), codes.end(), kExitNumerical) != codes.end()) return kExitNumerical;
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational NRG experiments: NRG, DMRG and vNRG on Ising and Anderson chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(vnrg_version()));

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run one or more experiment configs");
  run->add_option("config", run_opt.configs, "YAML config file(s)")->required()->check(CLI::ExistingFile);
  run->add_option("--output-dir", run_opt.output_dir,
                  "Output directory (one subdirectory per config when several are given)");
  run->add_option("--seed", run_opt.seed, "Override the config seed");
  run->add_option("--jobs", run_opt.jobs, "Configs run concurrently")->check(CLI::PositiveNumber);
  run->add_flag("--oracle", run_opt.oracle, "Compare against exact levels");

  std::string checkpoint;
  auto* inspect = app.add_subcommand("inspect", "Summarize a checkpoint file");
  inspect->add_option("checkpoint", checkpoint, "Checkpoint path")->required();

  std::string csv_a, csv_b;
  double tol = 0.0;
  auto* compare = app.add_subcommand("compare", "Compare two results.csv files, ignoring wall times");
  compare->add_option("csv_a", csv_a)->required();
  compare->add_option("csv_b", csv_b)->required();
  compare->add_option("--tol", tol, "Absolute tolerance for numeric cells (0 means exact text)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*run) return run_configs(run_opt);

  if (*inspect) {
    vnrg_status s;
    const std::string text = describe_text(checkpoint.c_str(), &s);
    if (s != VNRG_OK) {
      std::cerr << checkpoint << ": error: " << vnrg_last_error() << "\n";
      return exit_code(s);
    }
    std::cout << text;
    return kExitOk;
  }

  int equal = 0;
  size_t needed = 0;
  vnrg_status s = vnrg_csv_compare(csv_a.c_str(), csv_b.c_str(), tol, &equal, nullptr, 0, &needed);
  if (s != VNRG_OK) {
    std::cerr << "compare: error: " << vnrg_last_error() << "\n";
    return exit_code(s);
  }
  if (equal) {
    std::cout << "identical\n";
    return kExitOk;
  }
  std::string buf(needed, '\0');
  vnrg_csv_compare(csv_a.c_str(), csv_b.c_str(), tol, &equal, buf.data(), buf.size(), &needed);
  std::cout << "tables differ:\n" << buf.c_str();
  return kExitValidation;
}
