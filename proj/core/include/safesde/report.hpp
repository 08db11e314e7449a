#pragma once

#include <string>

#include "safesde/explorer.hpp"

namespace safesde {

// Writes through a temp file in the same directory followed by a rename,
// so an interrupted run never leaves a partial artifact behind.
void write_file_atomic(const std::string& path, const std::string& content);

// First line of every CSV artifact: "# config_hash=<16 hex> seed=<seed>".
std::string artifact_header(const CampaignConfig& cfg);

std::string selected_csv(const CampaignReport& report);
std::string certified_csv(const CampaignReport& report);
std::string info_gain_csv(const CampaignReport& report);
std::string report_json(const CampaignReport& report);

// selected.csv, certified_set.csv, info_gain.csv, report.json and
// checkpoint.json under dir, which is created if missing.
void write_campaign_artifacts(const CampaignReport& report, const std::string& dir);

}  // namespace safesde
