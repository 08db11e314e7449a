#include "safesde/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "safesde/report.hpp"

namespace safesde {

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string b64_encode(const unsigned char* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= len; i += 3) {
    unsigned v = unsigned(data[i]) << 16 | unsigned(data[i + 1]) << 8 | data[i + 2];
    out += kAlphabet[v >> 18];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < len) {
    unsigned v = unsigned(data[i]) << 16;
    if (i + 1 < len) v |= unsigned(data[i + 1]) << 8;
    out += kAlphabet[v >> 18];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < len ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

std::vector<unsigned char> b64_decode(const std::string& s) {
  if (s.size() % 4 != 0) throw std::runtime_error("checkpoint: base64 length not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(s.size() / 4 * 3);
  for (std::size_t i = 0; i < s.size(); i += 4) {
    int pad = 0;
    unsigned v = 0;
    for (int k = 0; k < 4; ++k) {
      char c = s[i + k];
      if (c == '=') {
        if (i + 4 != s.size() || k < 2) throw std::runtime_error("checkpoint: stray base64 padding");
        ++pad;
        v <<= 6;
        continue;
      }
      if (pad > 0) throw std::runtime_error("checkpoint: stray base64 padding");
      int d = b64_value(c);
      if (d < 0) throw std::runtime_error("checkpoint: invalid base64 character");
      v = v << 6 | unsigned(d);
    }
    out.push_back((unsigned char)(v >> 16));
    if (pad < 2) out.push_back((unsigned char)((v >> 8) & 0xff));
    if (pad < 1) out.push_back((unsigned char)(v & 0xff));
  }
  return out;
}

std::string pack(const double* p, std::size_t n) {
  return b64_encode(reinterpret_cast<const unsigned char*>(p), n * sizeof(double));
}

std::string pack(const std::vector<double>& v) { return pack(v.data(), v.size()); }

std::vector<double> unpack(const std::string& s, const char* what) {
  auto bytes = b64_decode(s);
  if (bytes.size() % sizeof(double) != 0)
    throw std::runtime_error(std::string("checkpoint: ") + what + ": byte count not a multiple of 8");
  std::vector<double> out(bytes.size() / sizeof(double));
  if (!out.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

std::vector<double> unpack_sized(const nlohmann::json& j, const char* key, std::size_t want) {
  auto v = unpack(j.at(key).get<std::string>(), key);
  if (v.size() != want)
    throw std::runtime_error(std::string("checkpoint: ") + key + ": expected " +
                             std::to_string(want) + " doubles, got " + std::to_string(v.size()));
  return v;
}

}  // namespace

std::string checkpoint_json(const CampaignReport& report) {
  const std::string config_text = serialize_config(report.config);
  nlohmann::json j;
  j["format"] = "safesde-checkpoint";
  j["version"] = kCheckpointVersion;
  j["config"] = config_text;
  j["config_hash"] = config_hash(report.config);
  j["seed"] = report.config.seed;
  j["stop_reason"] = report.stop_reason;

  const auto& obs = report.model.data();
  const int n = int(obs.size());
  const int m = n > 0 ? int(obs[0].point.theta.size()) : report.config.segments;
  std::vector<double> theta(std::size_t(n) * m), t(n), horizon(n), s(n), r(n);
  for (int i = 0; i < n; ++i) {
    for (int jdim = 0; jdim < m; ++jdim) theta[std::size_t(i) * m + jdim] = obs[i].point.theta[jdim];
    t[i] = obs[i].point.t;
    horizon[i] = obs[i].point.horizon;
    s[i] = obs[i].s_hat;
    r[i] = obs[i].r_hat;
  }

  nlohmann::json model;
  model["count"] = n;
  model["theta_dim"] = m;
  model["theta"] = pack(theta);
  model["t"] = pack(t);
  model["horizon"] = pack(horizon);
  model["s"] = pack(s);
  model["r"] = pack(r);
  model["sigma_log"] = pack(report.model.sigma_log());
  model["ridge_log"] = pack(report.model.ridge_log());
  nlohmann::json kdes = nlohmann::json::array();
  for (const auto& o : obs) {
    if (!o.kde) {
      kdes.push_back(nullptr);
      continue;
    }
    nlohmann::json k;
    k["q"] = o.kde->q();
    k["dim"] = o.kde->dim();
    k["bandwidth"] = o.kde->bandwidth;
    k["samples"] = pack(o.kde->samples.data(), std::size_t(o.kde->samples.size()));
    kdes.push_back(std::move(k));
  }
  model["kde"] = std::move(kdes);
  j["model"] = std::move(model);
  return j.dump(2) + "\n";
}

void save_checkpoint(const CampaignReport& report, const std::string& path) {
  write_file_atomic(path, checkpoint_json(report));
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("checkpoint: not valid JSON: ") + e.what());
  }

  if (j.value("format", "") != "safesde-checkpoint")
    throw std::runtime_error("checkpoint: unrecognized format field");
  const int version = j.value("version", -1);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));

  Checkpoint out;
  out.config = parse_config_text(j.at("config").get<std::string>(), "checkpoint");
  out.config_hash = j.at("config_hash").get<std::string>();
  if (out.config_hash != config_hash(out.config))
    throw std::runtime_error("checkpoint: config hash mismatch");
  out.stop_reason = j.value("stop_reason", "");

  const nlohmann::json& model = j.at("model");
  const int n = model.at("count").get<int>();
  const int m = model.at("theta_dim").get<int>();
  if (n < 0 || m < 1) throw std::runtime_error("checkpoint: bad model dimensions");
  const auto theta = unpack_sized(model, "theta", std::size_t(n) * m);
  const auto t = unpack_sized(model, "t", std::size_t(n));
  const auto horizon = unpack_sized(model, "horizon", std::size_t(n));
  const auto s = unpack_sized(model, "s", std::size_t(n));
  const auto r = unpack_sized(model, "r", std::size_t(n));
  auto sigma_log = unpack(model.at("sigma_log").get<std::string>(), "sigma_log");
  auto ridge_log = unpack(model.at("ridge_log").get<std::string>(), "ridge_log");
  if (sigma_log.size() != ridge_log.size())
    throw std::runtime_error("checkpoint: sigma_log and ridge_log lengths differ");

  const nlohmann::json& kdes = model.at("kde");
  if (!kdes.is_array() || int(kdes.size()) != n)
    throw std::runtime_error("checkpoint: kde array length mismatch");

  std::vector<ObservationRecord> obs(n);
  for (int i = 0; i < n; ++i) {
    obs[i].point.theta = Eigen::Map<const Eigen::VectorXd>(theta.data() + std::size_t(i) * m, m);
    obs[i].point.t = t[i];
    obs[i].point.horizon = horizon[i];
    obs[i].s_hat = s[i];
    obs[i].r_hat = r[i];
    const nlohmann::json& k = kdes[i];
    if (k.is_null()) continue;
    KdeEstimate est;
    const int q = k.at("q").get<int>();
    const int dim = k.at("dim").get<int>();
    est.bandwidth = k.at("bandwidth").get<double>();
    if (q < 1 || dim < 1 || est.bandwidth <= 0)
      throw std::runtime_error("checkpoint: bad kde record");
    const auto samples = unpack_sized(k, "samples", std::size_t(q) * dim);
    est.samples.resize(q, dim);
    std::memcpy(est.samples.data(), samples.data(), samples.size() * sizeof(double));
    obs[i].kde = std::move(est);
  }

  out.model = KernelModel::from_parts(out.config.make_model_config(), std::move(obs),
                                      std::move(sigma_log), std::move(ridge_log));
  return out;
}

}  // namespace safesde
