#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rwde {

/// Where an expected value comes from.
enum class Provenance { trivial, published, derived };

std::string provenance_tag(Provenance p);

/// How `measured` is compared to `expected`.
enum class Comparison { within, at_most, at_least };

struct Check {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;  // absolute
  Comparison comparison = Comparison::within;
  Provenance provenance = Provenance::trivial;
  bool pass = false;
};

Check make_check(std::string name, double measured, double expected, double tolerance, Comparison cmp,
                 Provenance provenance);

struct Verdict {
  std::string experiment;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> parameters;
  std::vector<Check> checks;
  /// Reported values without a pass/fail criterion.
  std::map<std::string, double> metrics;
  std::vector<std::string> artifacts;
  double wall_seconds = 0.0;

  bool pass() const;
};

struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 1;
  std::string out_dir;  // empty: no files
  std::string format = "json";  // csv | json
  std::size_t threads = 1;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::string reference;
  std::vector<Provenance> provenance;
  std::map<std::string, std::string> defaults;
};

/// All registered experiments, in a stable order.
const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo& find_experiment(const std::string& name);

/// Runs one experiment. Throws UsageError on unknown experiments or keys and
/// ParameterError on invalid values. Writes `<name>_*.csv` data files and
/// `<name>.verdict.json` into config.out_dir when it is set.
Verdict run_experiment(const ExperimentConfig& config);

void write_verdict_json(std::ostream& os, const Verdict& v);
void write_verdict_csv(std::ostream& os, const Verdict& v);
/// Registry as JSON (array of objects) or CSV.
void write_registry(std::ostream& os, const std::string& format);

/// Flat `key = value` lines; `#` starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);

}  // namespace rwde
