// Command-line runner for the registered experiments.
//
//   rwde list --format json
//   rwde speed --alpha 3 --beta 1 --seed 7 --out results --format json
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on usage or
// parameter errors, 3 when a resource guard trips.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "rwde/errors.hpp"
#include "rwde/experiments.hpp"
#include "rwde/parallel.hpp"

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  std::size_t threads = 0;
  std::string config;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Base seed");
  sub->add_option("--out", c.out, "Directory for CSV data and the JSON verdict");
  sub->add_option("--format", c.format, "Verdict format on stdout")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "Worker threads (default: RWDE_THREADS or all cores)");
  sub->add_option("--config", c.config, "Flat key=value parameter file; flags win");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks in Dirichlet environment: experiment runner"};
  app.require_subcommand(1);

  std::string list_format = "json";
  CLI::App* list = app.add_subcommand("list", "List registered experiments");
  list->add_option("--format", list_format)->check(CLI::IsMember({"csv", "json"}));

  Common common;
  std::map<std::string, std::map<std::string, std::string>> flags;
  for (const auto& info : rwde::experiment_registry()) {
    CLI::App* sub = app.add_subcommand(info.name, info.description);
    add_common(sub, common);
    for (const auto& [key, def] : info.defaults) {
      sub->add_option("--" + key, flags[info.name][key], "default " + def);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    rwde::write_registry(std::cout, list_format);
    return 0;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    rwde::ExperimentConfig cfg;
    cfg.experiment = name;
    if (!common.config.empty()) cfg.parameters = rwde::read_config_file(common.config);
    // common keys may also come from the config file
    auto take = [&](const std::string& key, auto& target, auto convert) {
      const auto it = cfg.parameters.find(key);
      if (it == cfg.parameters.end()) return;
      if (sub->count("--" + key) == 0) target = convert(it->second);
      cfg.parameters.erase(it);
    };
    auto same = [](const std::string& v) { return v; };
    auto unsigned_value = [&](const std::string& v) {
      std::size_t used = 0;
      const unsigned long long x = std::stoull(v, &used);
      if (used != v.size()) throw rwde::UsageError("config: bad integer " + v);
      return x;
    };
    take("seed", common.seed, unsigned_value);
    take("threads", common.threads, unsigned_value);
    take("out", common.out, same);
    take("format", common.format, same);
    if (common.format != "csv" && common.format != "json") throw rwde::UsageError("format must be csv or json");
    for (const auto& [key, value] : flags[name]) {
      if (sub->count("--" + key) > 0) cfg.parameters[key] = value;
    }
    cfg.seed = common.seed;
    cfg.out_dir = common.out;
    cfg.format = common.format;
    cfg.threads = common.threads > 0 ? common.threads : rwde::default_thread_count();

    const rwde::Verdict v = rwde::run_experiment(cfg);
    if (cfg.format == "json") rwde::write_verdict_json(std::cout, v);
    else rwde::write_verdict_csv(std::cout, v);
    return v.pass() ? 0 : 1;
  } catch (const rwde::ResourceError& e) {
    std::cerr << "rwde " << name << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "rwde " << name << ": " << e.what() << '\n';
    return 2;
  }
}
