// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "modcalc/core/errors.hpp"
#include "modcalc/harness/scenarios.hpp"

namespace modcalc {

namespace {

std::string num12(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

nlohmann::json complex_json(Complex z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

}  // namespace

nlohmann::json RatioReport::to_json() const {
  nlohmann::json members_j = nlohmann::json::array();
  for (const MemberStat& m : members) {
    members_j.push_back({{"index", m.index},
                         {"ratio", m.ratio},
                         {"source_norm", m.source_norm},
                         {"target_norm", m.target_norm},
                         {"skipped", m.skipped}});
  }
  nlohmann::json trend_j = nlohmann::json::array();
  for (const TrendPoint& t : trend) {
    trend_j.push_back({{"n", t.n}, {"max_ratio", t.max_ratio}});
  }
  return {{"max_ratio", max_ratio},
          {"argmax", argmax},
          {"argmax_descriptor", argmax_descriptor},
          {"members", members_j},
          {"skipped", skipped},
          {"grid", grid_meta},
          {"trend", trend_j},
          {"trend_drift", trend_drift()}};
}

std::string RatioReport::csv() const {
  std::string out = "index,ratio,source_norm,target_norm\n";
  for (const MemberStat& m : members) {
    out += std::to_string(m.index) + "," + num12(m.ratio) + "," +
           num12(m.source_norm) + "," + num12(m.target_norm) + "\n";
  }
  return out;
}

std::string to_string(ScenarioStatus status) {
  switch (status) {
    case ScenarioStatus::Pass:
      return "PASS";
    case ScenarioStatus::Fail:
      return "FAIL";
    case ScenarioStatus::Inapplicable:
      return "inapplicable";
  }
  return "FAIL";
}

int ScenarioResult::exit_code() const {
  switch (status) {
    case ScenarioStatus::Pass:
      return 0;
    case ScenarioStatus::Fail:
      return 1;
    case ScenarioStatus::Inapplicable:
      return 4;
  }
  return 1;
}

nlohmann::json ScenarioResult::to_json() const {
  return {{"scenario", scenario},
          {"status", to_string(status)},
          {"detail", detail},
          {"report", report.to_json()},
          {"diagnostics", diagnostics},
          {"config", config}};
}

nlohmann::json KernelCheckReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const KernelProbe& p : probes) {
    rows.push_back({{"lattice", p.lattice},
                    {"bin", p.bin},
                    {"left", complex_json(p.left)},
                    {"right", complex_json(p.right)},
                    {"deviation", p.deviation}});
  }
  return {{"max_deviation", max_deviation}, {"scale", scale},
          {"probes", rows}};
}

std::string fixture_dir() {
  if (const char* env = std::getenv("MODCALC_FIXTURES")) {
    if (*env != '\0') return env;
  }
  return "fixtures";
}

std::uint64_t config_hash(const nlohmann::json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void reconcile_fixture(ScenarioResult& result) {
  nlohmann::json diag = result.diagnostics.is_object()
                            ? result.diagnostics
                            : nlohmann::json::object();
  diag.erase("fixture");  // the marker itself is not part of the payload
  const nlohmann::json payload = {{"status", to_string(result.status)},
                                  {"detail", result.detail},
                                  {"report", result.report.to_json()},
                                  {"diagnostics", diag}};
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(config_hash(result.config)));
  const std::filesystem::path path = std::filesystem::path(fixture_dir()) /
                                     (result.scenario + "-" + hex + ".json");
  nlohmann::json marker = {{"path", path.string()}};
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    nlohmann::json frozen;
    try {
      in >> frozen;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("unreadable fixture " + path.string() + ": " +
                        e.what());
    }
    if (frozen.value("payload", nlohmann::json()).dump() == payload.dump()) {
      marker["state"] = "match";
    } else {
      marker["state"] = "mismatch";
      result.status = ScenarioStatus::Fail;
      result.detail += "; frozen fixture mismatch at " + path.string();
    }
  } else {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    out << nlohmann::json{{"scenario", result.scenario},
                          {"config", result.config},
                          {"payload", payload}}
               .dump(2)
        << "\n";
    if (!out) throw FormatError("cannot write fixture " + path.string());
    marker["state"] = "written";
  }
  result.diagnostics["fixture"] = marker;
}

void write_scenario_files(const ScenarioResult& result,
                          const std::string& json_path,
                          const std::string& csv_path) {
  std::ofstream js(json_path);
  js << result.to_json().dump(2) << "\n";
  if (!js) throw FormatError("cannot write report " + json_path);
  std::ofstream cs(csv_path);
  cs << result.report.csv();
  if (!cs) throw FormatError("cannot write report " + csv_path);
}

}  // namespace modcalc
