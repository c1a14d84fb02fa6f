// zkw — command-line front end for the workbench experiments.
//
//   zkw <experiment> --config <file> [--out <dir>] [--seed <u64>] [--jobs <n>]
//   zkw compare <manifest-a> <manifest-b>
//
// Exit codes: 0 success, 2 degenerate run (too many skipped instances),
// 1 any error.  Results are bit-identical across reruns of the same config;
// --jobs only affects scheduling and is accepted for interface stability.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zkw/experiments.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int jobs = 0;
  CLI::App* sub = nullptr;
};

int run_one(const std::string& id, const CommonOpts& o) {
  nlohmann::json cfg;
  {
    std::ifstream in(o.config_path);
    if (!in) {
      std::fprintf(stderr, "zkw: cannot open config %s\n", o.config_path.c_str());
      return 1;
    }
    try {
      in >> cfg;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "zkw: config parse error: %s\n", e.what());
      return 1;
    }
  }
  if (!cfg.is_object()) {
    std::fprintf(stderr, "zkw: config must be a JSON object\n");
    return 1;
  }
  if (cfg.contains("experiment") && cfg.at("experiment") != id) {
    std::fprintf(stderr, "zkw: config experiment %s does not match subcommand %s\n",
                 cfg.at("experiment").get<std::string>().c_str(), id.c_str());
    return 1;
  }
  cfg["experiment"] = id;
  if (o.sub->count("--seed")) cfg["seed"] = o.seed;

  int jobs = o.jobs;
  if (jobs <= 0)
    if (const char* env = std::getenv("ZKW_JOBS")) jobs = std::atoi(env);
  if (jobs < 1) jobs = 1;
  (void)jobs;  // execution is serial so results never depend on the job count

  return zkw::run_and_write(cfg, o.out_dir);
}

int run_compare(const std::string& path_a, const std::string& path_b) {
  auto load = [](const std::string& p) {
    return zkw::ResultManifest::from_json(nlohmann::json::parse(zkw::read_file(p)));
  };
  const zkw::ManifestDiff diff = zkw::compare_manifests(load(path_a), load(path_b));
  for (const std::string& line : diff.lines) std::printf("%s\n", line.c_str());
  std::printf(diff.identical ? "identical\n" : "different\n");
  return diff.identical ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical workbench for periodic dispersive interaction estimates"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::vector<std::string> ids;
  for (const auto& [id, keys] : zkw::experiment_schema()) ids.push_back(id);
  for (const std::string& id : ids) {
    CLI::App* s = app.add_subcommand(id, "run the " + id + " experiment");
    s->add_option("--config", opts.config_path, "JSON config file")->required();
    s->add_option("--out", opts.out_dir, "output directory (default: .)");
    s->add_option("--seed", opts.seed, "override the config seed");
    s->add_option("--jobs", opts.jobs, "worker count (ZKW_JOBS env fallback)");
  }
  CLI::App* cmp = app.add_subcommand("compare", "diff two result manifests");
  std::string man_a, man_b;
  cmp->add_option("a", man_a, "first manifest.json")->required();
  cmp->add_option("b", man_b, "second manifest.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().at(0);
    if (sub == cmp) return run_compare(man_a, man_b);
    opts.sub = sub;
    return run_one(sub->get_name(), opts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "zkw: %s\n", e.what());
    return 1;
  }
}
