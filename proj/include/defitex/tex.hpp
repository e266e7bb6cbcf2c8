#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace defitex::tex {

// Half-open byte range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool empty() const { return begin >= end; }
  bool operator==(const Span&) const = default;
};

enum class TokKind {
  Text,
  Command,
  GroupOpen,
  GroupClose,
  MathShift,
  EnvBegin,
  EnvEnd,
  Comment,
  Verbatim,
};

struct Token {
  TokKind kind = TokKind::Text;
  std::string lexeme;  // exact source slice; concatenation reproduces the input
  Span span;
  std::string name;  // command or environment name
  bool has_optional = false;
  std::string optional_arg;  // raw LaTeX inside [...] after \begin{name}
  Span optional_span;        // location of the bracket content in the source
};

struct EnvBlock {
  std::string name;
  bool has_optional = false;
  std::string optional_arg;
  Span body_span;  // strictly between \begin{name}[...] and \end{name}
  std::string body;
};

// Unbalanced delimiters found while pairing environments.
struct EnvDiagnostic {
  std::string kind;  // "unbalanced-begin" or "stray-end"
  std::size_t offset = 0;
  std::string name;
};

// Lossless lexer: comments, \verb and verbatim environments become single
// tokens; \begin{X}/\end{X} are recognized with their optional argument.
// Unknown constructs degrade to Text.
std::vector<Token> tokenize(std::string_view source);

// All balanced occurrences of exactly `name` (case-sensitive), in document
// order. Nested same-name pairs are matched innermost-first and all reported.
std::vector<EnvBlock> find_environments(const std::vector<Token>& tokens,
                                        std::string_view name,
                                        std::vector<EnvDiagnostic>* diags = nullptr);

// Source with Comment tokens dropped; everything else verbatim.
std::string strip_comments(std::string_view source);

inline bool is_letter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace defitex::tex
