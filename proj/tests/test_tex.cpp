#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "defitex/tex.hpp"

using namespace defitex;
using tex::TokKind;

namespace {

std::string concat_lexemes(const std::vector<tex::Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += t.lexeme;
  return out;
}

}  // namespace

TEST_CASE("tokenize: commands, groups and text") {
  const auto tokens = tex::tokenize("a \\emph{b} c");
  REQUIRE(tokens.size() == 6);
  CHECK(tokens[0].kind == TokKind::Text);
  CHECK(tokens[0].lexeme == "a ");
  CHECK(tokens[1].kind == TokKind::Command);
  CHECK(tokens[1].name == "emph");
  CHECK(tokens[2].kind == TokKind::GroupOpen);
  CHECK(tokens[3].kind == TokKind::Text);
  CHECK(tokens[3].lexeme == "b");
  CHECK(tokens[4].kind == TokKind::GroupClose);
  CHECK(tokens[5].lexeme == " c");
}

TEST_CASE("tokenize: comment runs to end of line, newline stays text") {
  const auto tokens = tex::tokenize("x % note\ny");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].lexeme == "x ");
  CHECK(tokens[1].kind == TokKind::Comment);
  CHECK(tokens[1].lexeme == "% note");
  CHECK(tokens[2].lexeme == "\ny");
}

TEST_CASE("tokenize: escaped percent is a command, not a comment") {
  const auto tokens = tex::tokenize("50\\% of");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[1].kind == TokKind::Command);
  CHECK(tokens[1].name == "%");
}

TEST_CASE("tokenize: environment begin with optional argument") {
  const auto tokens = tex::tokenize("\\begin{definition}[spread] B \\end{definition}");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].kind == TokKind::EnvBegin);
  CHECK(tokens[0].name == "definition");
  CHECK(tokens[0].has_optional);
  CHECK(tokens[0].optional_arg == "spread");
  CHECK(tokens[1].lexeme == " B ");
  CHECK(tokens[2].kind == TokKind::EnvEnd);
  CHECK(tokens[2].name == "definition");
}

TEST_CASE("tokenize: optional argument protects brackets inside braces") {
  const auto tokens = tex::tokenize("\\begin{definition}[{a]b}]X\\end{definition}");
  REQUIRE(tokens[0].kind == TokKind::EnvBegin);
  CHECK(tokens[0].optional_arg == "{a]b}");
}

TEST_CASE("tokenize: math shifts and verb") {
  const auto tokens = tex::tokenize("$x$ and $$y$$ and \\verb|{raw}|");
  CHECK(tokens[0].kind == TokKind::MathShift);
  CHECK(tokens[0].lexeme == "$");
  bool saw_display = false, saw_verb = false;
  for (const auto& t : tokens) {
    if (t.kind == TokKind::MathShift && t.lexeme == "$$") saw_display = true;
    if (t.kind == TokKind::Verbatim) {
      saw_verb = true;
      CHECK(t.lexeme == "\\verb|{raw}|");
    }
  }
  CHECK(saw_display);
  CHECK(saw_verb);
}

TEST_CASE("tokenize: verbatim environment is opaque") {
  const std::string src = "\\begin{verbatim}\\begin{definition}\\end{verbatim}after";
  const auto tokens = tex::tokenize(src);
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].kind == TokKind::Verbatim);
  CHECK(tokens[1].lexeme == "after");
  CHECK(tex::find_environments(tokens, "definition").empty());
}

TEST_CASE("tokenize: round trip is lossless on random latex-like strings") {
  static const char* pieces[] = {"a",    "bc",   " ",        "\n",          "\\emph",
                                 "{",    "}",    "$",        "%xy",         "\\begin{definition}",
                                 "\\end{definition}", "[o]", "\\'e",        "\\verb|v|",
                                 "\\\\", "~",    "\\alpha",  "\\begin{Def}", "10%"};
  std::mt19937 rng(20240601);
  for (int iter = 0; iter < 1000; ++iter) {
    std::string src;
    const int n = static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      src += pieces[rng() % (sizeof(pieces) / sizeof(pieces[0]))];
    }
    const auto tokens = tex::tokenize(src);
    CHECK(concat_lexemes(tokens) == src);
    // Spans are increasing, non-overlapping, and cover the input.
    std::size_t at = 0;
    for (const auto& t : tokens) {
      CHECK(t.span.begin == at);
      CHECK(t.span.end > t.span.begin);
      at = t.span.end;
    }
    CHECK(at == src.size());
  }
}

TEST_CASE("find_environments: literal case-sensitive name match") {
  const std::string src =
      "\\begin{definition}one\\end{definition}\\begin{Def}two\\end{Def}";
  const auto tokens = tex::tokenize(src);
  const auto blocks = tex::find_environments(tokens, "definition");
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].body == "one");
  CHECK(tex::find_environments(tokens, "Def").size() == 1);
}

TEST_CASE("find_environments: balanced nesting inside other environments") {
  const std::string src =
      "\\begin{theorem}\\begin{definition}X\\end{definition}\\end{theorem}";
  const auto blocks = tex::find_environments(tex::tokenize(src), "definition");
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].body == "X");
}

TEST_CASE("find_environments: nested same-name pairs both reported, document order") {
  const std::string src =
      "\\begin{definition}outer\\begin{definition}inner\\end{definition}tail\\end{definition}";
  const auto blocks = tex::find_environments(tex::tokenize(src), "definition");
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].body == "outer\\begin{definition}inner\\end{definition}tail");
  CHECK(blocks[1].body == "inner");
}

TEST_CASE("find_environments: unbalanced begin reported, not returned") {
  std::vector<tex::EnvDiagnostic> diags;
  const auto blocks = tex::find_environments(tex::tokenize("\\begin{definition}X"),
                                             "definition", &diags);
  CHECK(blocks.empty());
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].kind == "unbalanced-begin");
  CHECK(diags[0].offset == 0);
}

TEST_CASE("find_environments: stray end reported") {
  std::vector<tex::EnvDiagnostic> diags;
  const auto blocks =
      tex::find_environments(tex::tokenize("X\\end{definition}"), "definition", &diags);
  CHECK(blocks.empty());
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].kind == "stray-end");
}

TEST_CASE("find_environments: commented-out end does not close a block") {
  const std::string src =
      "\\begin{definition}A % \\end{definition}\nB\\end{definition}";
  const auto blocks = tex::find_environments(tex::tokenize(src), "definition");
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].body == "A % \\end{definition}\nB");
}

TEST_CASE("find_environments: body equals source substring at body_span") {
  const std::string src = "pre\\begin{definition}[x] the body \\end{definition}post";
  const auto blocks = tex::find_environments(tex::tokenize(src), "definition");
  REQUIRE(blocks.size() == 1);
  const auto& b = blocks[0];
  CHECK(b.body == src.substr(b.body_span.begin, b.body_span.end - b.body_span.begin));
  CHECK(b.body == " the body ");
  CHECK(b.optional_arg == "x");
}

TEST_CASE("find_environments: count matches a regex-free manual scan") {
  // Brute-force oracle: count balanced pairs by scanning for the literal
  // delimiters outside comments.
  auto oracle_count = [](const std::string& src) {
    int open = 0, complete = 0;
    std::size_t i = 0;
    bool in_comment = false;
    while (i < src.size()) {
      if (in_comment) {
        if (src[i] == '\n') in_comment = false;
        ++i;
        continue;
      }
      if (src[i] == '%' && (i == 0 || src[i - 1] != '\\')) {
        in_comment = true;
        ++i;
        continue;
      }
      if (src.compare(i, 18, "\\begin{definition}") == 0) {
        ++open;
        i += 18;
        continue;
      }
      if (src.compare(i, 16, "\\end{definition}") == 0) {
        if (open > 0) {
          --open;
          ++complete;
        }
        i += 16;
        continue;
      }
      ++i;
    }
    return complete;
  };

  std::mt19937 rng(7);
  static const char* pieces[] = {"\\begin{definition}", "\\end{definition}", "text ",
                                 "$m$ ", "% c\n", "\\emph{e}"};
  for (int iter = 0; iter < 300; ++iter) {
    std::string src;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) src += pieces[rng() % 6];
    const auto blocks = tex::find_environments(tex::tokenize(src), "definition");
    CHECK(static_cast<int>(blocks.size()) == oracle_count(src));
  }
}

TEST_CASE("strip_comments removes comment lexemes only") {
  CHECK(tex::strip_comments("a % note\nb") == "a \nb");
  CHECK(tex::strip_comments("no comments") == "no comments");
  CHECK(tex::strip_comments("50\\% kept") == "50\\% kept");
}
