#include "core/manifest.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>

#include "core/csvio.hpp"
#include "json.hpp"

namespace rmdur {

std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

static std::string utc_now_iso() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_to_json(const run_manifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "rmdur";
  j["version"] = "0.1.0";
  j["command"] = m.command;
  j["timestamp"] = utc_now_iso();
  nlohmann::ordered_json ins = nlohmann::ordered_json::array();
  for (const auto& e : m.inputs) {
    nlohmann::ordered_json x;
    x["path"] = e.path;
    x["fnv1a"] = e.digest;
    ins.push_back(std::move(x));
  }
  j["inputs"] = std::move(ins);
  j["outputs"] = m.outputs;
  if (m.has_seed) j["seed"] = m.seed;
  if (!m.config_digest.empty()) j["config_fnv1a"] = m.config_digest;
  return j.dump(2) + "\n";
}

void write_manifest(const run_manifest& m, const std::string& dir) {
  spit_file(dir + "/manifest.json", manifest_to_json(m));
}

}  // namespace rmdur
