#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace defitex {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Resolved once from DEFITEX_LOG (error|warn|info|debug); defaults to warn.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_message(LogLevel level, const std::string& msg);

struct Diagnostic {
  std::string paper_id;
  std::string kind;
  std::int64_t offset = -1;
  std::string detail;
};

// Collects pipeline warnings; they end up in the sidecar JSONL log and,
// depending on the log level, echoed to stderr.
class Diagnostics {
 public:
  void set_paper(std::string paper_id) { paper_ = std::move(paper_id); }
  const std::string& paper() const { return paper_; }

  void add(std::string kind, std::int64_t offset, std::string detail);

  // Recorded in the sidecar without the stderr echo (provenance notes).
  void note(std::string kind, std::int64_t offset, std::string detail);

  const std::vector<Diagnostic>& entries() const { return items_; }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  // One JSON object per line: {"paper_id","kind","offset","detail"}.
  void write_jsonl(std::ostream& os) const;

  bool echo = true;

 private:
  std::string paper_;
  std::vector<Diagnostic> items_;
};

}  // namespace defitex
