#include "coex/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "coex/analytic.hpp"
#include "coex/errors.hpp"

namespace coex {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ParseError("key '" + key + "': expected a number, got '" + value + "'");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("key '" + key + "': expected an integer, got '" + value + "'");
  }
  return out;
}

int to_int32(const std::string& key, const std::string& value) {
  const long long v = to_int(key, value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ParseError("key '" + key + "': integer out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError("key '" + key + "': expected true or false, got '" + value + "'");
}

struct StationKeys {
  std::map<std::string, std::pair<std::string, std::string>> fields;  // field -> (key, value)
};

const std::set<std::string>& station_fields() {
  static const std::set<std::string> f{"cw_min",   "max_backoff_stage", "retry_limit",
                                       "data_rate_mbps", "f_agg", "payload_b", "mpdu_bytes",
                                       "arrival_prob_q", "relative_load"};
  return f;
}

void apply_phy(PhyProfile& phy, const std::string& field, const std::string& key,
               const std::string& value) {
  const double v = to_double(key, value);
  if (field == "slot_sigma_us") phy.slot_sigma = v;
  else if (field == "difs_us") phy.difs = v;
  else if (field == "sifs_us") phy.sifs = v;
  else if (field == "lifs_us") phy.lifs = v;
  else if (field == "t_plcp_us") phy.t_plcp = v;
  else if (field == "l_del_bits") phy.l_del = v;
  else if (field == "l_mac_oh_bits") phy.l_mac_oh = v;
  else if (field == "l_pad_bits") phy.l_pad = v;
  else if (field == "l_ack_bits") phy.l_ack = v;
  else if (field == "c_ctrl_mbps") phy.c_ctrl = v;
  else throw ParseError("unknown key '" + key + "'");
}

void apply_dcf(DcfParams& dcf, const std::string& field, const std::string& key,
               const std::string& value, bool& retry_set) {
  if (field == "cw_min") {
    dcf.cw_min = to_int32(key, value);
  } else if (field == "max_backoff_stage") {
    dcf.max_backoff_stage = to_int32(key, value);
    if (!retry_set) dcf.retry_limit = dcf.max_backoff_stage;
  } else if (field == "retry_limit") {
    dcf.retry_limit = to_int32(key, value);
    retry_set = true;
  } else {
    throw ParseError("unknown key '" + key + "'");
  }
}

// Resolves one station from its wildcard and indexed keys. relative_load needs the final
// PHY and station count, so it is returned separately.
StationProfile build_station(const StationKeys& defaults, const StationKeys& own,
                             std::optional<double>& relative_load) {
  std::map<std::string, std::pair<std::string, std::string>> merged = defaults.fields;
  for (const auto& [f, kv] : own.fields) merged[f] = kv;

  StationProfile st;
  bool retry_set = false;
  std::optional<double> mpdu_bytes;
  bool payload_set = false;
  bool q_set = false;
  relative_load.reset();
  for (const auto& [field, kv] : merged) {
    const auto& [key, value] = kv;
    if (field == "cw_min" || field == "max_backoff_stage" || field == "retry_limit") {
      apply_dcf(st.dcf, field, key, value, retry_set);
    } else if (field == "data_rate_mbps") {
      st.data_rate_c = to_double(key, value);
    } else if (field == "f_agg") {
      st.f_agg = to_int32(key, value);
    } else if (field == "payload_b") {
      st.payload_b = to_double(key, value);
      payload_set = true;
    } else if (field == "mpdu_bytes") {
      mpdu_bytes = to_double(key, value);
    } else if (field == "arrival_prob_q") {
      st.arrival_prob_q = to_double(key, value);
      q_set = true;
    } else if (field == "relative_load") {
      relative_load = to_double(key, value);
    }
  }
  if (mpdu_bytes) {
    if (payload_set) throw ParseError("keys 'payload_b' and 'mpdu_bytes' are exclusive");
    st.payload_b = 8.0 * *mpdu_bytes * st.f_agg;
  }
  if (relative_load && q_set) {
    throw ParseError("keys 'arrival_prob_q' and 'relative_load' are exclusive");
  }
  return st;
}

}  // namespace

KeyValues parse_key_values(const std::string& text, const std::string& origin) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (value.empty()) throw ParseError("key '" + key + "': empty value");
    kv[key] = value;
  }
  return kv;
}

KeyValues read_key_values_file(const std::string& path) {
  return parse_key_values(read_text(path), path);
}

Scenario scenario_from_keys(const KeyValues& kv) {
  Scenario sc;
  int count = -1;
  StationKeys defaults;
  std::map<int, StationKeys> indexed;
  DcfParams lbt_dcf;
  bool lbt_dcf_touched = false;
  bool lbt_retry_set = false;
  std::map<std::string, std::pair<std::string, std::string>> policy_keys;

  for (const auto& [key, value] : kv) {
    const auto dot = key.find('.');
    const std::string group = key.substr(0, dot);
    const std::string rest = dot == std::string::npos ? "" : key.substr(dot + 1);

    if (key == "scenario.id") {
      sc.id = value;
    } else if (group == "phy") {
      apply_phy(sc.phy, rest, key, value);
    } else if (key == "stations.count") {
      const long long c = to_int(key, value);
      if (c < 0 || c > 10000) throw ParseError("key 'stations.count': out of range");
      count = static_cast<int>(c);
    } else if (group == "stations") {
      const auto dot2 = rest.find('.');
      if (dot2 == std::string::npos) throw ParseError("unknown key '" + key + "'");
      const std::string who = rest.substr(0, dot2);
      const std::string field = rest.substr(dot2 + 1);
      if (!station_fields().contains(field)) throw ParseError("unknown key '" + key + "'");
      if (who == "*") {
        defaults.fields[field] = {key, value};
      } else {
        const long long i = to_int(key, who);
        if (i < 0 || i > 10000) throw ParseError("key '" + key + "': station index out of range");
        indexed[static_cast<int>(i)].fields[field] = {key, value};
      }
    } else if (key == "lbt.mode") {
      sc.lbt_mode = parse_lbt_mode(value);
    } else if (key == "lbt.t_lbt_us") {
      sc.lbt_t_lbt = to_double(key, value);
    } else if (key == "lbt.rate_mbps") {
      sc.lbt_rate = to_double(key, value);
    } else if (key == "lbt.sync") {
      sc.lbt_sync = to_bool(key, value);
    } else if (key == "lbt.cw_min" || key == "lbt.max_backoff_stage" || key == "lbt.retry_limit") {
      apply_dcf(lbt_dcf, rest, key, value, lbt_retry_set);
      lbt_dcf_touched = true;
    } else if (group == "policy") {
      static const std::set<std::string> fields{"rho_bar", "take_prob_pi", "bursts_per_take_nu",
                                                "lambda_opt", "olaa_threshold_us"};
      if (!fields.contains(rest)) throw ParseError("unknown key '" + key + "'");
      to_double(key, value);
      policy_keys[rest] = {key, value};
    } else if (key == "sim.duration_s") {
      sc.sim_duration = to_double(key, value);
    } else if (key == "sim.warmup_s") {
      sc.warmup = to_double(key, value);
    } else if (key == "sim.seed") {
      sc.seed = to_u64(key, value);
    } else if (key == "sim.drop_at_retry_limit") {
      sc.drop_at_retry_limit = to_bool(key, value);
    } else {
      throw ParseError("unknown key '" + key + "'");
    }
  }

  if (count < 0) {
    count = indexed.empty() ? 0 : indexed.rbegin()->first + 1;
  } else if (!indexed.empty() && indexed.rbegin()->first >= count) {
    throw ParseError("key 'stations." + std::to_string(indexed.rbegin()->first) +
                     "': index beyond stations.count");
  }

  for (int i = 0; i < count; ++i) {
    std::optional<double> load;
    StationProfile st = build_station(defaults, indexed[i], load);
    if (load) {
      if (!(*load > 0.0 && *load <= 1.0)) {
        throw ParseError("key 'relative_load': must be in (0, 1]");
      }
      try {
        st.arrival_prob_q = *load >= 1.0 ? 1.0 : arrival_prob_for_relative_load(*load, st, count, sc.phy);
      } catch (const DomainError& e) {
        throw ConfigError(std::string("relative_load: ") + e.what());
      }
    }
    sc.stations.push_back(st);
  }

  if (sc.lbt_mode == LbtMode::kLaa || sc.lbt_mode == LbtMode::kWifiLegacy) {
    DcfParams d = sc.stations.empty() ? DcfParams{} : sc.stations.front().dcf;
    if (lbt_dcf_touched) d = lbt_dcf;
    sc.lbt_dcf = d;
  } else if (lbt_dcf_touched) {
    sc.lbt_dcf = lbt_dcf;
  }

  if (sc.lbt_mode == LbtMode::kOrla || sc.lbt_mode == LbtMode::kOlaa) {
    PolicyParams p;
    p.t_lbt = sc.lbt_t_lbt;
    if (policy_keys.size() < 5) {
      if (sc.stations.empty()) {
        // Nothing to protect: take every opportunity.
        p.rho_bar = std::numeric_limits<double>::infinity();
        p.take_prob_pi = 1.0;
        p.bursts_per_take_nu = 1.0;
        p.lambda_opt = 0.0;
        p.olaa_threshold = sc.lbt_t_lbt;
      } else {
        sc.phy.validate();
        for (const auto& s : sc.stations) s.validate();
        p = derive_policy(sc.phy, sc.stations, sc.twin_station(), sc.lbt_t_lbt).params;
      }
    }
    for (const auto& [field, kv2] : policy_keys) {
      const double v = to_double(kv2.first, kv2.second);
      if (field == "rho_bar") p.rho_bar = v;
      else if (field == "take_prob_pi") p.take_prob_pi = v;
      else if (field == "bursts_per_take_nu") p.bursts_per_take_nu = v;
      else if (field == "lambda_opt") p.lambda_opt = v;
      else if (field == "olaa_threshold_us") p.olaa_threshold = v;
    }
    sc.policy = p;
  } else if (!policy_keys.empty()) {
    throw ParseError("key '" + policy_keys.begin()->second.first +
                     "': policy keys apply to orla/olaa modes only");
  }
  return sc;
}

Scenario read_scenario_file(const std::string& path) {
  return scenario_from_keys(read_key_values_file(path));
}

std::vector<SweepSpec::Cell> SweepSpec::cells() const {
  std::vector<Cell> out;
  const std::vector<std::string> none{""};
  const auto& values2 = axis2 ? axis2->values : none;
  for (const auto& v1 : axis1.values) {
    for (const auto& v2 : values2) {
      Cell c;
      c.keys = base;
      c.keys[axis1.path] = v1;
      c.label = axis1.path + "=" + v1;
      if (axis2) {
        c.keys[axis2->path] = v2;
        c.label += ";" + axis2->path + "=" + v2;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ParseError("key '" + key + "': empty list item");
    out.push_back(item);
  }
  if (out.empty()) throw ParseError("key '" + key + "': empty list");
  return out;
}

SweepAxis read_axis(const KeyValues& kv, const std::string& prefix, bool required) {
  const auto p = kv.find(prefix + ".path");
  const auto v = kv.find(prefix + ".values");
  if (p == kv.end() && v == kv.end() && !required) return {};
  if (p == kv.end()) throw ParseError("key '" + prefix + ".path' is missing");
  if (v == kv.end()) throw ParseError("key '" + prefix + ".values' is missing");
  SweepAxis axis{p->second, split_list(v->first, v->second)};
  for (const auto& val : axis.values) to_double(axis.path, val);
  return axis;
}

}  // namespace

SweepSpec sweep_from_keys(const KeyValues& kv) {
  static const std::set<std::string> metric_names{"goodput_mbps", "airtime_frac", "takes",
                                                  "opportunities", "collisions", "gain_vs_legacy"};
  static const std::set<std::string> sweep_keys{"sweep.axis1.path", "sweep.axis1.values",
                                                "sweep.axis2.path", "sweep.axis2.values",
                                                "sweep.repetitions", "sweep.outputs"};
  SweepSpec spec;
  for (const auto& [key, value] : kv) {
    if (key.rfind("sweep.", 0) == 0) {
      if (!sweep_keys.contains(key)) throw ParseError("unknown key '" + key + "'");
    } else {
      spec.base[key] = value;
    }
  }
  spec.axis1 = read_axis(kv, "sweep.axis1", true);
  if (kv.contains("sweep.axis2.path") || kv.contains("sweep.axis2.values")) {
    spec.axis2 = read_axis(kv, "sweep.axis2", false);
  }
  if (const auto r = kv.find("sweep.repetitions"); r != kv.end()) {
    const long long reps = to_int(r->first, r->second);
    if (reps < 1 || reps > 100000) throw ParseError("key 'sweep.repetitions': must be >= 1");
    spec.repetitions = static_cast<int>(reps);
  }
  if (const auto o = kv.find("sweep.outputs"); o != kv.end()) {
    spec.outputs = split_list(o->first, o->second);
    for (const auto& m : spec.outputs) {
      if (!metric_names.contains(m)) throw ParseError("key 'sweep.outputs': unknown metric '" + m + "'");
    }
  } else {
    spec.outputs = {"goodput_mbps", "gain_vs_legacy"};
  }
  // Every axis path must be a numeric scenario key: parse the first cell to check.
  scenario_from_keys(spec.cells().front().keys);
  return spec;
}

SweepSpec read_sweep_file(const std::string& path) {
  return sweep_from_keys(read_key_values_file(path));
}

}  // namespace coex
