#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "defitex/corpus.hpp"
#include "defitex/dataset.hpp"
#include "defitex/diagnostics.hpp"
#include "defitex/render.hpp"

namespace defitex::pipeline {

struct ExtractOptions {
  std::vector<std::string> env_names{"definition"};
  const render::SymbolTable* symbols = &render::SymbolTable::builtin();
};

// Extract stage for one paper: definition blocks, rendered text, and
// definiendum spans mapped to rendered-text coordinates. Optional-argument
// terms are located by first case-insensitive occurrence; unlocatable ones
// get start = end = -1.
std::vector<dataset::DefRecord> extract_paper(const corpus::PaperEntry& entry,
                                              std::string_view source,
                                              const ExtractOptions& options,
                                              Diagnostics& diags);

// JSONL: {"paper_id","block_index","latex","optional_arg","text",
//         "spans":[{"start","end","term"}],"last_updated"}.
void write_definitions_jsonl(std::ostream& os, const std::vector<dataset::DefRecord>& records);
std::vector<dataset::DefRecord> read_definitions_jsonl(std::istream& is);

}  // namespace defitex::pipeline
