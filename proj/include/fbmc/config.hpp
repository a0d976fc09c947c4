#pragma once

#include <map>
#include <ostream>
#include <string>

#include "fbmc/simulator.hpp"

namespace fbmc {

using KeyValues = std::map<std::string, std::string>;

// `key = value` lines; '#' starts a comment.
KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);

ScenarioConfig default_scenario();
// Presets: link, sync3band, async3band.
ScenarioConfig preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

// Applies every key; unknown keys and bad values are collected, not thrown one at a time.
void apply_key_values(ScenarioConfig& cfg, const KeyValues& kv, std::vector<std::string>& errors);

KeyValues scenario_to_key_values(const ScenarioConfig& cfg);
void print_config(std::ostream& os, const ScenarioConfig& cfg);

// Default three-band layout: bands of N/4, N/16 gaps, N/16 edges.
std::vector<SubBand> default_subbands(int N, int neighbourOffset);
int async_offset(int N, int cpLen);

std::string format_db(double linear);
std::string format_double(double v);

}  // namespace fbmc
