#include "defitex/diagnostics.hpp"

#include <cstdlib>
#include <iostream>
#include <ostream>

#include "json.hpp"

namespace defitex {

namespace {

LogLevel g_level = [] {
  const char* env = std::getenv("DEFITEX_LOG");
  if (!env) return LogLevel::Warn;
  const std::string v(env);
  if (v == "error") return LogLevel::Error;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}();

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    default: return "debug";
  }
}

}  // namespace

LogLevel log_level() { return g_level; }
void set_log_level(LogLevel level) { g_level = level; }

void log_message(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(g_level)) return;
  std::cerr << "[" << level_name(level) << "] " << msg << "\n";
}

void Diagnostics::add(std::string kind, std::int64_t offset, std::string detail) {
  if (echo) {
    log_message(LogLevel::Warn, (paper_.empty() ? kind : paper_ + ": " + kind) +
                                    (detail.empty() ? "" : " (" + detail + ")"));
  }
  items_.push_back(Diagnostic{paper_, std::move(kind), offset, std::move(detail)});
}

void Diagnostics::note(std::string kind, std::int64_t offset, std::string detail) {
  log_message(LogLevel::Debug, (paper_.empty() ? kind : paper_ + ": " + kind) +
                                   (detail.empty() ? "" : " (" + detail + ")"));
  items_.push_back(Diagnostic{paper_, std::move(kind), offset, std::move(detail)});
}

void Diagnostics::write_jsonl(std::ostream& os) const {
  for (const auto& d : items_) {
    nlohmann::ordered_json j;
    j["paper_id"] = d.paper_id;
    j["kind"] = d.kind;
    j["offset"] = d.offset;
    j["detail"] = d.detail;
    os << j.dump() << "\n";
  }
}

}  // namespace defitex
