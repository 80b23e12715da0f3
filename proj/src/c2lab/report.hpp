#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace c2lab {

inline constexpr int kReportFormatVersion = 1;

// One run's machine-readable record: the command as typed, which method
// produced the result, the inputs (graph hash, parameters, p), the result
// payload, and wall time. Rendered as a single JSON document carrying a
// format_version field; parse followed by render is byte-identical, so
// golden files can be compared exactly.
struct RunReport {
  std::string command;
  std::string method;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json result = nlohmann::ordered_json::object();
  uint64_t elapsed_ms = 0;

  std::string render() const;
  // Throws FormatError on malformed JSON, a missing/unsupported
  // format_version, or missing fields.
  static RunReport parse(const std::string& text);
};

}  // namespace c2lab
