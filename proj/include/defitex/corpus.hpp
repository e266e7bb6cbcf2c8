#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "defitex/diagnostics.hpp"

namespace defitex::corpus {

enum class TimestampSource { Metadata, Mtime };

struct PaperEntry {
  std::string paper_id;
  std::filesystem::path entry_tex;  // resolvable path (root-relative joined)
  std::vector<std::filesystem::path> aux_tex;
  std::int64_t last_updated = 0;
  std::string category;
  TimestampSource timestamp_source = TimestampSource::Mtime;
};

struct CorpusManifest {
  std::filesystem::path root;
  std::int64_t scanned_at = 0;  // latest mtime over scanned files; deterministic
  std::vector<PaperEntry> entries;  // sorted by paper_id
};

// One entry per paper directory under root holding a candidate entry file:
// the .tex containing \documentclass, else the one containing
// \begin{document}. Timestamps come from the metadata table (TSV:
// paper_id<TAB>timestamp, optional third column = category) with a flagged
// mtime fallback. Throws IoError when root is missing.
CorpusManifest scan_corpus(const std::filesystem::path& root,
                           const std::optional<std::filesystem::path>& metadata,
                           Diagnostics& diags);

struct SourceText {
  std::string text;
  std::vector<std::string> inlined;  // provenance: \input/\include targets inlined
};

// Entry file contents with \input{X}/\include{X} resolved exactly one level
// against the paper's aux files; missing targets stay verbatim. UTF-8 with
// Latin-1 fallback.
SourceText read_paper_source(const PaperEntry& entry, Diagnostics& diags);

nlohmann::ordered_json manifest_to_json(const CorpusManifest& manifest);
CorpusManifest manifest_from_json(const nlohmann::json& j);

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest load_manifest(const std::filesystem::path& path);

}  // namespace defitex::corpus
