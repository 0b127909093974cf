#pragma once

#include <filesystem>

#include <json.hpp>

#include "pcrm/io.hpp"
#include "pcrm/sim.hpp"

namespace pcrm {

/// Everything a run needs besides the workload file.
struct ExperimentConfig {
  SimConfig sim;
  IngestOptions ingest;
};

/// Missing keys keep their defaults; unknown keys are rejected so typos do
/// not silently fall back. Without an explicit "region" the vehicle region is
/// the projected ingestion bbox.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const ExperimentConfig& c);

/// Reads a config file. A run manifest is accepted too: its "config" member
/// is used.
ExperimentConfig load_config(const std::filesystem::path& path);

SyntheticSpec spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const SyntheticSpec& s);
SyntheticSpec load_spec(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const MetricsReport& r);

}  // namespace pcrm
