#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "defitex/tex.hpp"

namespace defitex::render {

// One emission: the source bytes `latex` produced the output bytes `text`.
// Identity segments are byte-for-byte copies, so sub-ranges map exactly;
// everything else maps as an atomic unit.
struct Segment {
  tex::Span latex;
  tex::Span text;
  bool identity = false;
};

struct OffsetMap {
  std::vector<Segment> segments;

  // Smallest text range whose segments cover latex_range; nullopt when the
  // range produced no output at all (dropped content).
  std::optional<tex::Span> map(tex::Span latex_range) const;
};

struct RenderedText {
  std::string text;
  OffsetMap map;
};

struct RenderWarning {
  std::string kind;  // "unbalanced-braces", "reference-kept", ...
  std::size_t offset = 0;
  std::string detail;
};

// Zero-argument replacement commands (\alpha -> α). Loaded once; a JSON
// file {"\\alpha": "α", ...} can be merged over the builtin table.
class SymbolTable {
 public:
  static const SymbolTable& builtin();

  // Builtin table with the file's entries merged over it.
  static SymbolTable with_overrides(const std::filesystem::path& json_file);

  const std::string* lookup(const std::string& name) const;

  void set(std::string name, std::string replacement);

 private:
  std::unordered_map<std::string, std::string> map_;
  friend SymbolTable builtin_symbols();
};

// Converts partial LaTeX to plain Unicode text. Styling commands vanish
// keeping their argument, math shifts vanish keeping converted content,
// unknown braced commands keep the argument, unknown bare commands vanish.
// Whitespace is normalized: runs collapse to one space, \\/\par/blank lines
// become a single newline, ends trimmed.
RenderedText render_plain_text(std::string_view fragment,
                               const SymbolTable& symbols = SymbolTable::builtin(),
                               std::vector<RenderWarning>* warnings = nullptr);

// Maps a LaTeX-coordinate range into rendered-text coordinates.
std::optional<tex::Span> map_span(const RenderedText& rendered, tex::Span latex_range);

}  // namespace defitex::render
