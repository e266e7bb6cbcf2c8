#include "defitex/corpus.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "defitex/errors.hpp"
#include "defitex/tex.hpp"
#include "defitex/textutil.hpp"
#include "defitex/timeutil.hpp"

namespace defitex::corpus {

namespace {

std::optional<std::string> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

std::int64_t file_mtime(const std::filesystem::path& path) {
  struct stat st{};
  if (::stat(path.c_str(), &st) != 0) return 0;
  return static_cast<std::int64_t>(st.st_mtime);
}

struct MetaRow {
  std::int64_t timestamp = 0;
  std::string category;
};

std::map<std::string, MetaRow> load_metadata(const std::filesystem::path& path,
                                             Diagnostics& diags) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metadata table: " + path.string());
  std::map<std::string, MetaRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        cols.push_back(line.substr(start));
        break;
      }
      cols.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (cols.size() < 2) {
      diags.add("bad-metadata-row", static_cast<std::int64_t>(line_no),
                "expected paper_id<TAB>timestamp");
      continue;
    }
    const auto ts = timeutil::parse_timestamp(cols[1]);
    if (!ts) {
      diags.add("bad-metadata-timestamp", static_cast<std::int64_t>(line_no), cols[1]);
      continue;
    }
    MetaRow row;
    row.timestamp = *ts;
    if (cols.size() >= 3) row.category = cols[2];
    rows[cols[0]] = std::move(row);
  }
  return rows;
}

std::string decode_tex_bytes(std::string raw, const std::string& paper_id,
                             Diagnostics& diags) {
  if (text::valid_utf8(raw)) return raw;
  diags.add("latin1-fallback", -1, paper_id);
  return text::latin1_to_utf8(raw);
}

}  // namespace

CorpusManifest scan_corpus(const std::filesystem::path& root,
                           const std::optional<std::filesystem::path>& metadata,
                           Diagnostics& diags) {
  namespace fs = std::filesystem;
  if (!fs::exists(root) || !fs::is_directory(root)) {
    throw IoError("corpus root not found: " + root.string());
  }
  std::map<std::string, MetaRow> meta;
  if (metadata) meta = load_metadata(*metadata, diags);

  std::vector<std::string> paper_dirs;
  for (const auto& de : fs::directory_iterator(root)) {
    if (de.is_directory()) paper_dirs.push_back(de.path().filename().string());
  }
  std::sort(paper_dirs.begin(), paper_dirs.end());

  CorpusManifest manifest;
  manifest.root = root;
  std::int64_t latest_mtime = 0;

  for (const std::string& paper_id : paper_dirs) {
    diags.set_paper(paper_id);
    const fs::path dir = root / paper_id;

    std::vector<fs::path> tex_files;
    for (const auto& de : fs::recursive_directory_iterator(dir)) {
      if (de.is_regular_file() && de.path().extension() == ".tex") {
        tex_files.push_back(de.path());
      }
    }
    std::sort(tex_files.begin(), tex_files.end());

    fs::path entry_path;
    int entry_rank = 0;  // 2 = \documentclass, 1 = \begin{document}
    for (const fs::path& p : tex_files) {
      const auto bytes = read_file_bytes(p);
      if (!bytes) {
        diags.add("unreadable-file", -1, p.string());
        continue;
      }
      int rank = 0;
      if (bytes->find("\\documentclass") != std::string::npos) rank = 2;
      else if (bytes->find("\\begin{document}") != std::string::npos) rank = 1;
      if (rank > entry_rank) {
        entry_rank = rank;
        entry_path = p;
        if (rank == 2) break;  // files are sorted; first \documentclass wins
      }
    }
    if (entry_rank == 0) {
      diags.add("no-entry-file", -1, "no .tex with \\documentclass or \\begin{document}");
      continue;
    }

    PaperEntry entry;
    entry.paper_id = paper_id;
    entry.entry_tex = entry_path;
    for (const fs::path& p : tex_files) {
      if (p != entry_path) entry.aux_tex.push_back(p);
      latest_mtime = std::max(latest_mtime, file_mtime(p));
    }
    const auto it = meta.find(paper_id);
    if (it != meta.end()) {
      entry.last_updated = it->second.timestamp;
      entry.timestamp_source = TimestampSource::Metadata;
      entry.category = it->second.category;
    } else {
      entry.last_updated = file_mtime(entry_path);
      entry.timestamp_source = TimestampSource::Mtime;
      if (metadata) diags.add("mtime-fallback", -1, "paper missing from metadata table");
    }
    manifest.entries.push_back(std::move(entry));
  }
  diags.set_paper("");

  if (latest_mtime == 0) latest_mtime = file_mtime(root);
  manifest.scanned_at = latest_mtime;
  return manifest;
}

SourceText read_paper_source(const PaperEntry& entry, Diagnostics& diags) {
  const auto bytes = read_file_bytes(entry.entry_tex);
  if (!bytes) throw IoError("cannot read entry file: " + entry.entry_tex.string());
  const std::string source = decode_tex_bytes(*bytes, entry.paper_id, diags);

  const std::vector<tex::Token> tokens = tex::tokenize(source);
  SourceText result;
  result.text.reserve(source.size());

  // Resolve the target of an \input/\include against the aux files.
  auto resolve = [&](const std::string& name) -> std::optional<std::filesystem::path> {
    for (const std::string& candidate : {name, name + ".tex"}) {
      for (const auto& aux : entry.aux_tex) {
        const std::string generic = aux.generic_string();
        const std::string suffix = "/" + candidate;
        const bool path_match =
            generic.size() > suffix.size() &&
            generic.compare(generic.size() - suffix.size(), suffix.size(), suffix) == 0;
        if (aux.filename().string() == candidate || path_match) return aux;
      }
    }
    return std::nullopt;
  };

  std::size_t i = 0;
  while (i < tokens.size()) {
    const tex::Token& t = tokens[i];
    if (t.kind == tex::TokKind::Command && (t.name == "input" || t.name == "include")) {
      // Expect an immediate {target} group (whitespace allowed).
      std::size_t k = i + 1;
      while (k < tokens.size() && tokens[k].kind == tex::TokKind::Text &&
             std::all_of(tokens[k].lexeme.begin(), tokens[k].lexeme.end(),
                         [](char c) { return text::is_space(c); })) {
        ++k;
      }
      if (k + 2 < tokens.size() && tokens[k].kind == tex::TokKind::GroupOpen &&
          tokens[k + 1].kind == tex::TokKind::Text &&
          tokens[k + 2].kind == tex::TokKind::GroupClose) {
        const std::string target = text::normalize_ws(tokens[k + 1].lexeme);
        const auto path = resolve(target);
        if (path) {
          const auto inner = read_file_bytes(*path);
          if (inner) {
            result.text += decode_tex_bytes(*inner, entry.paper_id, diags);
            result.inlined.push_back(target);
            diags.note("input-inlined", static_cast<std::int64_t>(t.span.begin), target);
            i = k + 3;  // past the closing brace; inlined content is not re-scanned
            continue;
          }
          diags.add("unreadable-file", static_cast<std::int64_t>(t.span.begin),
                    path->string());
        } else {
          diags.add("missing-input-target", static_cast<std::int64_t>(t.span.begin), target);
        }
      }
    }
    result.text += t.lexeme;
    ++i;
  }
  return result;
}

namespace {

std::string relative_to(const std::filesystem::path& base, const std::filesystem::path& p) {
  const auto rel = std::filesystem::proximate(p, base);
  return rel.generic_string();
}

}  // namespace

nlohmann::ordered_json manifest_to_json(const CorpusManifest& manifest) {
  nlohmann::ordered_json j;
  j["root"] = manifest.root.generic_string();
  j["scanned_at"] = timeutil::format_utc(manifest.scanned_at);
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const PaperEntry& e : manifest.entries) {
    nlohmann::ordered_json je;
    je["paper_id"] = e.paper_id;
    je["entry_tex"] = relative_to(manifest.root, e.entry_tex);
    nlohmann::ordered_json aux = nlohmann::ordered_json::array();
    for (const auto& a : e.aux_tex) aux.push_back(relative_to(manifest.root, a));
    je["aux_tex"] = std::move(aux);
    je["last_updated"] = timeutil::format_utc(e.last_updated);
    je["category"] = e.category;
    je["timestamp_source"] = e.timestamp_source == TimestampSource::Metadata ? "metadata" : "mtime";
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j;
}

CorpusManifest manifest_from_json(const nlohmann::json& j) {
  CorpusManifest m;
  try {
    m.root = std::filesystem::path(j.at("root").get<std::string>());
    const auto ts = timeutil::parse_timestamp(j.at("scanned_at").get<std::string>());
    m.scanned_at = ts.value_or(0);
    for (const auto& je : j.at("entries")) {
      PaperEntry e;
      e.paper_id = je.at("paper_id").get<std::string>();
      e.entry_tex = m.root / je.at("entry_tex").get<std::string>();
      for (const auto& a : je.at("aux_tex")) {
        e.aux_tex.push_back(m.root / a.get<std::string>());
      }
      const auto lu = timeutil::parse_timestamp(je.at("last_updated").get<std::string>());
      e.last_updated = lu.value_or(0);
      e.category = je.value("category", "");
      e.timestamp_source = je.value("timestamp_source", "mtime") == std::string("metadata")
                               ? TimestampSource::Metadata
                               : TimestampSource::Mtime;
      m.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("bad manifest: ") + ex.what());
  }
  return m;
}

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << manifest_to_json(manifest).dump(2) << "\n";
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("bad manifest JSON: ") + ex.what());
  }
  return manifest_from_json(j);
}

}  // namespace defitex::corpus
