#include "defitex/pipeline.hpp"

#include <ostream>

#include "defitex/errors.hpp"
#include "defitex/extract.hpp"
#include "defitex/textutil.hpp"
#include "defitex/timeutil.hpp"

namespace defitex::pipeline {

std::vector<dataset::DefRecord> extract_paper(const corpus::PaperEntry& entry,
                                              std::string_view source,
                                              const ExtractOptions& options,
                                              Diagnostics& diags) {
  diags.set_paper(entry.paper_id);
  const std::vector<extract::DefinitionBlock> blocks = extract::extract_definition_blocks(
      entry.paper_id, entry.last_updated, source, options.env_names, diags);

  std::vector<dataset::DefRecord> records;
  records.reserve(blocks.size());
  for (const extract::DefinitionBlock& block : blocks) {
    std::vector<render::RenderWarning> warnings;
    const render::RenderedText rendered =
        render::render_plain_text(block.raw_latex, *options.symbols, &warnings);
    for (const render::RenderWarning& w : warnings) {
      diags.add(w.kind, static_cast<std::int64_t>(w.offset), w.detail);
    }
    const std::string text_lower = text::to_lower(rendered.text);

    dataset::DefRecord rec;
    rec.paper_id = block.paper_id;
    rec.block_index = block.block_index;
    rec.latex = block.raw_latex;
    rec.has_optional = block.has_optional;
    rec.optional_arg = block.optional_arg;
    rec.text = rendered.text;
    rec.last_updated = block.last_updated;

    for (const extract::LatexSpan& span : extract::extract_definienda_spans(block, &diags)) {
      dataset::DefRecord::TermSpan ts;
      if (span.kind == extract::SpanKind::OptionalArg) {
        const std::string term = render::render_plain_text(span.term_latex, *options.symbols).text;
        if (term.empty()) {
          diags.add("optional-arg-empty", static_cast<std::int64_t>(block.source_span.begin),
                    "optional argument rendered empty");
          continue;
        }
        const std::size_t at = text_lower.find(text::to_lower(term));
        if (at == std::string::npos) {
          ts.start = -1;
          ts.end = -1;
          ts.term = term;
          diags.add("optional-arg-not-found", static_cast<std::int64_t>(block.source_span.begin),
                    term);
        } else {
          ts.start = static_cast<std::int64_t>(at);
          ts.end = static_cast<std::int64_t>(at + term.size());
          ts.term = rendered.text.substr(at, term.size());
        }
      } else {
        const auto mapped = render::map_span(rendered, span.range);
        if (!mapped) {
          diags.add("span-vanished", static_cast<std::int64_t>(span.range.begin),
                    span.term_latex);
          continue;
        }
        ts.start = static_cast<std::int64_t>(mapped->begin);
        ts.end = static_cast<std::int64_t>(mapped->end);
        ts.term = rendered.text.substr(mapped->begin, mapped->size());
      }
      rec.spans.push_back(std::move(ts));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_definitions_jsonl(std::ostream& os, const std::vector<dataset::DefRecord>& records) {
  for (const dataset::DefRecord& rec : records) {
    nlohmann::ordered_json j;
    j["paper_id"] = rec.paper_id;
    j["block_index"] = rec.block_index;
    j["latex"] = rec.latex;
    if (rec.has_optional) {
      j["optional_arg"] = rec.optional_arg;
    } else {
      j["optional_arg"] = nullptr;
    }
    j["text"] = rec.text;
    nlohmann::ordered_json spans = nlohmann::ordered_json::array();
    for (const auto& ts : rec.spans) {
      spans.push_back({{"start", ts.start}, {"end", ts.end}, {"term", ts.term}});
    }
    j["spans"] = std::move(spans);
    j["last_updated"] = timeutil::format_utc(rec.last_updated);
    os << j.dump() << "\n";
  }
}

std::vector<dataset::DefRecord> read_definitions_jsonl(std::istream& is) {
  std::vector<dataset::DefRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      dataset::DefRecord rec;
      rec.paper_id = j.at("paper_id").get<std::string>();
      rec.block_index = j.at("block_index").get<int>();
      rec.latex = j.at("latex").get<std::string>();
      if (j.contains("optional_arg") && !j.at("optional_arg").is_null()) {
        rec.has_optional = true;
        rec.optional_arg = j.at("optional_arg").get<std::string>();
      }
      rec.text = j.at("text").get<std::string>();
      for (const auto& js : j.at("spans")) {
        dataset::DefRecord::TermSpan ts;
        ts.start = js.at("start").get<std::int64_t>();
        ts.end = js.at("end").get<std::int64_t>();
        ts.term = js.at("term").get<std::string>();
        rec.spans.push_back(std::move(ts));
      }
      const auto ts = timeutil::parse_timestamp(j.at("last_updated").get<std::string>());
      rec.last_updated = ts.value_or(0);
      out.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("definitions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace defitex::pipeline
