// SPDX-License-Identifier: Apache-2.0
//
// mimosense: dual-polarization Rayleigh backscatter simulation for phase-OTDR
// Copyright (C) 2026 The mimosense authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mimosense/config.hpp"

#include <cstdio>
#include <functional>

#include "json.hpp"

#include "mimosense/error.hpp"
#include "mimosense/io.hpp"

namespace mimosense {

namespace {

using nlohmann::ordered_json;

struct Field {
  const char *key;
  std::function<ordered_json(const Settings &)> get;
  std::function<void(Settings &, const ordered_json &)> set;
};

template <class T> T as(const ordered_json &v, const char *key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned()))
        throw ConfigError("");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("");
    }
    return v.get<T>();
  } catch (const std::exception &) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type (" + v.dump() + ")");
  }
}

template <class T> std::vector<T> as_list(const ordered_json &v, const char *key) {
  if (!v.is_array()) throw ConfigError(std::string("config key '") + key + "' must be a list");
  std::vector<T> out;
  for (const auto &e : v) out.push_back(as<T>(e, key));
  return out;
}

#define MS_NUM(KEY, EXPR)                                                                                             \
  Field {                                                                                                            \
    #KEY, [](const Settings &s) { return ordered_json(s.EXPR); },                                                    \
        [](Settings &s, const ordered_json &v) { s.EXPR = as<decltype(s.EXPR)>(v, #KEY); }                           \
  }

const std::vector<Field> &fields() {
  static const std::vector<Field> table = {
      // fibre
      MS_NUM(length_m, campaign.fiber.length_m),
      MS_NUM(segment_length_m, campaign.fiber.segment_length_m),
      MS_NUM(beat_length_m, campaign.fiber.beat_length_m),
      MS_NUM(attenuation_db_per_km, campaign.fiber.attenuation_db_per_km),
      MS_NUM(alpha, campaign.fiber.alpha),
      MS_NUM(theta_misalign, campaign.fiber.theta_misalign),
      MS_NUM(polarization_enabled, campaign.fiber.polarization_enabled),
      {"seed", [](const Settings &s) { return ordered_json(s.campaign.seed); },
       [](Settings &s, const ordered_json &v) { s.set_seed(as<std::uint64_t>(v, "seed")); }},
      // probe
      {"scheme", [](const Settings &s) { return ordered_json(std::string(to_string(s.probe().scheme))); },
       [](Settings &s, const ordered_json &v) {
         try {
           s.probe().scheme = scheme_from_string(as<std::string>(v, "scheme"));
         } catch (const std::invalid_argument &e) {
           throw ConfigError(e.what());
         }
       }},
      MS_NUM(code_log2_length, campaign.probe.code_log2_length),
      MS_NUM(symbol_rate_baud, campaign.probe.symbol_rate_baud),
      MS_NUM(launch_power_dbm, campaign.probe.launch_power_dbm),
      MS_NUM(laser_linewidth_hz, campaign.probe.laser_linewidth_hz),
      MS_NUM(rx_noise_sigma_v, campaign.probe.rx_noise_sigma_v),
      MS_NUM(frames, campaign.probe.frames),
      MS_NUM(rx_volts_per_field, campaign.probe.rx_volts_per_field),
      MS_NUM(group_index, campaign.probe.group_index),
      MS_NUM(equalize_frame_period, campaign.probe.equalize_frame_period),
      MS_NUM(memory_budget_bytes, campaign.probe.memory_budget_bytes),
      // phase processing
      MS_NUM(gauge_segments, campaign.processing.gauge_segments),
      MS_NUM(window_s, campaign.processing.window_s),
      MS_NUM(highpass_hz, campaign.processing.highpass_hz),
      MS_NUM(flag_threshold, campaign.processing.flag_threshold),
      // campaign
      {"lengths_m", [](const Settings &s) { return ordered_json(s.campaign.lengths_m); },
       [](Settings &s, const ordered_json &v) { s.campaign.lengths_m = as_list<double>(v, "lengths_m"); }},
      MS_NUM(fibres_per_length, campaign.fibres_per_length),
      {"estimators",
       [](const Settings &s) {
         ordered_json a = ordered_json::array();
         for (Scheme e : s.campaign.estimators) a.push_back(std::string(to_string(e)));
         return a;
       },
       [](Settings &s, const ordered_json &v) {
         s.campaign.estimators.clear();
         for (const std::string &n : as_list<std::string>(v, "estimators")) {
           try {
             s.campaign.estimators.push_back(scheme_from_string(n));
           } catch (const std::invalid_argument &e) {
             throw ConfigError(e.what());
           }
         }
       }},
      MS_NUM(include_pol_free_baseline, campaign.include_pol_free_baseline),
      {"sim_path", [](const Settings &s) { return ordered_json(std::string(to_string(s.campaign.sim_path))); },
       [](Settings &s, const ordered_json &v) {
         try {
           s.campaign.sim_path = sim_path_from_string(as<std::string>(v, "sim_path"));
         } catch (const std::invalid_argument &e) {
           throw ConfigError(e.what());
         }
       }},
      MS_NUM(distance_bin_m, campaign.distance_bin_m),
      MS_NUM(histogram_bins, campaign.histogram_bins),
      {"reference", [](const Settings &s) { return ordered_json(std::string(to_string(s.campaign.reference))); },
       [](Settings &s, const ordered_json &v) {
         try {
           s.campaign.reference = scheme_from_string(as<std::string>(v, "reference"));
         } catch (const std::invalid_argument &e) {
           throw ConfigError(e.what());
         }
       }},
      {"crossing_percentiles", [](const Settings &s) { return ordered_json(s.campaign.crossing_percentiles); },
       [](Settings &s, const ordered_json &v) {
         s.campaign.crossing_percentiles = as_list<double>(v, "crossing_percentiles");
       }},
      MS_NUM(threads, campaign.threads),
      MS_NUM(work_budget, campaign.work_budget),
      // fading map
      {"map_x_axis", [](const Settings &s) { return ordered_json(std::string(to_string(s.map.x_axis))); },
       [](Settings &s, const ordered_json &v) {
         try {
           s.map.x_axis = fading_axis_from_string(as<std::string>(v, "map_x_axis"));
         } catch (const std::invalid_argument &e) {
           throw ConfigError(e.what());
         }
       }},
      {"map_y_axis", [](const Settings &s) { return ordered_json(std::string(to_string(s.map.y_axis))); },
       [](Settings &s, const ordered_json &v) {
         try {
           s.map.y_axis = fading_axis_from_string(as<std::string>(v, "map_y_axis"));
         } catch (const std::invalid_argument &e) {
           throw ConfigError(e.what());
         }
       }},
      MS_NUM(map_x_min, map.x_min),
      MS_NUM(map_x_max, map.x_max),
      MS_NUM(map_y_min, map.y_min),
      MS_NUM(map_y_max, map.y_max),
      MS_NUM(map_nx, map.nx),
      MS_NUM(map_ny, map.ny),
      MS_NUM(map_beta, map.fixed.beta),
      MS_NUM(map_gamma, map.fixed.gamma),
      MS_NUM(map_theta_rot, map.fixed.theta_rot),
      MS_NUM(map_alpha, map.alpha),
      MS_NUM(map_theta_misalign, map.theta_misalign),
      // trajectories
      {"poincare_ratios", [](const Settings &s) { return ordered_json(s.poincare_ratios); },
       [](Settings &s, const ordered_json &v) { s.poincare_ratios = as_list<double>(v, "poincare_ratios"); }},
      MS_NUM(poincare_segments, poincare_segments),
      // strain injection for the probe subcommand
      MS_NUM(strain_segment, strain_segment),
      MS_NUM(strain_amplitude_m, strain_amplitude_m),
      MS_NUM(strain_frequency_hz, strain_frequency_hz),
  };
  return table;
}

#undef MS_NUM

ordered_json to_json(const Settings &s) {
  ordered_json j = ordered_json::object();
  for (const Field &f : fields()) j[f.key] = f.get(s);
  return j;
}

} // namespace

void Settings::set_seed(std::uint64_t seed) {
  campaign.seed = seed;
  campaign.fiber.seed = seed;
}

Settings settings_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const ordered_json::parse_error &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("manifest_version") && j.contains("config")) j = j["config"];
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  Settings s;
  for (const auto &[key, value] : j.items()) {
    const Field *field = nullptr;
    for (const Field &f : fields())
      if (key == f.key) field = &f;
    if (!field) throw ConfigError("unknown config key '" + key + "'");
    field->set(s, value);
  }
  try {
    s.campaign.fiber.validate();
    s.campaign.probe.validate();
    if (s.poincare_segments < 1) throw std::invalid_argument("poincare_segments must be >= 1");
    for (double r : s.poincare_ratios)
      if (!(r >= 0.0)) throw std::invalid_argument("poincare ratios must be >= 0");
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  return s;
}

Settings load_settings(const std::filesystem::path &path) { return settings_from_json(io::read_text(path)); }

std::string settings_to_json(const Settings &s) { return to_json(s).dump(2) + "\n"; }

std::string settings_hash(const Settings &s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(io::fnv1a64(to_json(s).dump())));
  return buf;
}

std::string_view version() { return "0.1.0"; }

std::string manifest_json(std::string_view subcommand, const Settings &s, const std::vector<std::string> &inputs,
                          const std::vector<std::string> &outputs) {
  ordered_json m;
  m["manifest_version"] = 1;
  m["tool"] = "mimosense";
  m["version"] = std::string(version());
  m["subcommand"] = std::string(subcommand);
  m["seed"] = s.campaign.seed;
  m["config_hash"] = settings_hash(s);
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["config"] = to_json(s);
  return m.dump(2) + "\n";
}

} // namespace mimosense
