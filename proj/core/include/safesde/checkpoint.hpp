#pragma once

#include <string>

#include "safesde/explorer.hpp"

namespace safesde {

inline constexpr int kCheckpointVersion = 1;

// A reloaded campaign: enough to evaluate, predict and certify without
// re-running the exploration loop.
struct Checkpoint {
  CampaignConfig config;
  std::string config_hash;
  KernelModel model;
  std::string stop_reason;
};

// JSON document with the canonical config text, its hash, and the model
// state (inputs, targets, selection sigmas, density samples) as base64
// little endian doubles.
std::string checkpoint_json(const CampaignReport& report);

void save_checkpoint(const CampaignReport& report, const std::string& path);

// Throws std::runtime_error on unknown format, unsupported version, a
// config hash mismatch, or malformed arrays.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace safesde
