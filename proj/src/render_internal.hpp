#pragma once

#include <optional>
#include <string>

#include "defitex/render.hpp"

namespace defitex::render {

SymbolTable builtin_symbols();

// True for accent command names (both control symbols like ' and control
// words like v or c).
bool is_accent_command(const std::string& name);

// Precomposed character for (accent, base letter), e.g. (', o) -> ó.
// Falls back to base + combining mark; empty base drops the accent.
std::string compose_accent(const std::string& accent, const std::string& base);

}  // namespace defitex::render
