#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coex/simulator.hpp"

namespace coex {

/// Ordered key -> value map read from a `key = value` file. Later keys override earlier ones.
using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
/// Throws ParseError naming the line on malformed input.
KeyValues parse_key_values(const std::string& text, const std::string& origin = "<input>");
KeyValues read_key_values_file(const std::string& path);

/// Builds a Scenario from keys. Recognized prefixes: scenario., phy., stations., lbt.,
/// policy., sim. Unknown keys and malformed numbers raise ParseError naming the key.
///
/// Station keys: `stations.count`, defaults as `stations.*.<field>`, overrides as
/// `stations.<i>.<field>`. Fields: cw_min, max_backoff_stage, retry_limit,
/// data_rate_mbps, f_agg, payload_b, arrival_prob_q, relative_load.
///
/// For orla/olaa the policy is derived from the stations unless every policy.* field is
/// given; individual policy.* keys override derived values.
Scenario scenario_from_keys(const KeyValues& kv);
Scenario read_scenario_file(const std::string& path);

struct SweepAxis {
  std::string path;
  std::vector<std::string> values;
};

struct SweepSpec {
  KeyValues base;  ///< scenario keys with sweep.* removed
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  int repetitions = 1;
  std::vector<std::string> outputs;

  struct Cell {
    std::string label;  ///< "path=value[;path=value]"
    KeyValues keys;
  };

  /// Cells in row-major order (axis1 outer).
  std::vector<Cell> cells() const;
};

/// Sweep files are scenario files with extra keys: sweep.axis1.path,
/// sweep.axis1.values (comma separated), optional sweep.axis2.*, sweep.repetitions,
/// sweep.outputs. Axis paths must name numeric scenario keys.
SweepSpec sweep_from_keys(const KeyValues& kv);
SweepSpec read_sweep_file(const std::string& path);

}  // namespace coex
