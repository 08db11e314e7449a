#include "safesde/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "safesde/checkpoint.hpp"

namespace safesde {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_point(std::string& out, const ControlPoint& p) {
  out += fmt(p.t);
  for (long j = 0; j < p.theta.size(); ++j) {
    out += ',';
    out += fmt(p.theta[j]);
  }
}

std::string theta_columns(int m) {
  std::string out;
  for (int j = 0; j < m; ++j) {
    out += ",theta_";
    out += std::to_string(j);
  }
  return out;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string artifact_header(const CampaignConfig& cfg) {
  return "# config_hash=" + config_hash(cfg) + " seed=" + std::to_string(cfg.seed) + "\n";
}

std::string selected_csv(const CampaignReport& report) {
  std::string out = artifact_header(report.config);
  out += "iteration,candidate_id,t";
  out += theta_columns(report.config.segments);
  out += ",sigma,s_hat,r_hat,lcb_s,lcb_r,gain_total\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.iteration);
    out += ',';
    out += std::to_string(row.candidate_id);
    out += ',';
    append_point(out, row.point);
    for (double v : {row.sigma, row.s_hat, row.r_hat, row.lcb_s, row.lcb_r, row.gain_total}) {
      out += ',';
      out += fmt(v);
    }
    out += '\n';
  }
  return out;
}

std::string certified_csv(const CampaignReport& report) {
  std::string out = artifact_header(report.config);
  out += "candidate_id,t";
  out += theta_columns(report.config.segments);
  out += ",in_gamma0\n";
  for (std::size_t i = 0; i < report.certified.ids.size(); ++i) {
    out += std::to_string(report.certified.ids[i]);
    out += ',';
    append_point(out, report.certified.points[i]);
    out += ',';
    out += report.grid.in_gamma0(report.certified.ids[i]) ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string info_gain_csv(const CampaignReport& report) {
  std::string out = artifact_header(report.config);
  out += "iteration,sigma,gain_increment,gain_total\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.iteration);
    for (double v : {row.sigma, row.gain_increment, row.gain_total}) {
      out += ',';
      out += fmt(v);
    }
    out += '\n';
  }
  return out;
}

std::string report_json(const CampaignReport& report) {
  nlohmann::json j;
  j["config_hash"] = config_hash(report.config);
  j["seed"] = report.config.seed;
  j["stop_reason"] = report.stop_reason;
  j["iterations"] = report.rows.size();
  j["observations"] = report.model.n();
  j["certified_count"] = report.certified.ids.size();
  j["candidates"] = report.grid.count();
  j["information_gain"] = report.model.information_gain();
  j["timings_s"] = {{"total", report.clock.total_s},
                    {"select", report.clock.select_s},
                    {"simulate", report.clock.simulate_s},
                    {"estimate", report.clock.estimate_s},
                    {"fit", report.clock.fit_s}};
  j["config"] = serialize_config(report.config);
  return j.dump(2) + "\n";
}

void write_campaign_artifacts(const CampaignReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);
  write_file_atomic((base / "selected.csv").string(), selected_csv(report));
  write_file_atomic((base / "certified_set.csv").string(), certified_csv(report));
  write_file_atomic((base / "info_gain.csv").string(), info_gain_csv(report));
  write_file_atomic((base / "report.json").string(), report_json(report));
  save_checkpoint(report, (base / "checkpoint.json").string());
}

}  // namespace safesde
