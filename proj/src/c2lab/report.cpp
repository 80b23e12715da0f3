#include "c2lab/report.hpp"

#include "c2lab/errors.hpp"

namespace c2lab {

std::string RunReport::render() const {
  nlohmann::ordered_json doc;
  doc["format_version"] = kReportFormatVersion;
  doc["command"] = command;
  doc["method"] = method;
  doc["inputs"] = inputs;
  doc["result"] = result;
  doc["elapsed_ms"] = elapsed_ms;
  return doc.dump(2) + "\n";
}

RunReport RunReport::parse(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("report: not a JSON object");
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer() ||
      doc["format_version"].get<int>() != kReportFormatVersion)
    throw FormatError("report: missing or unsupported format_version");
  RunReport r;
  try {
    r.command = doc.at("command").get<std::string>();
    r.method = doc.at("method").get<std::string>();
    r.inputs = doc.at("inputs");
    r.result = doc.at("result");
    r.elapsed_ms = doc.at("elapsed_ms").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
  return r;
}

}  // namespace c2lab
