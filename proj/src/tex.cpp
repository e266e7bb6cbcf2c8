#include "defitex/tex.hpp"

#include <algorithm>

namespace defitex::tex {

namespace {

bool is_special(char c) {
  return c == '\\' || c == '{' || c == '}' || c == '$' || c == '%';
}

// Scans the {name} group after \begin or \end. Returns false when the
// source does not continue with a braced name.
bool scan_env_name(std::string_view s, std::size_t pos, std::string& name,
                   std::size_t& end) {
  if (pos >= s.size() || s[pos] != '{') return false;
  std::size_t i = pos + 1;
  while (i < s.size() && s[i] != '}' && s[i] != '{' && s[i] != '\n') ++i;
  if (i >= s.size() || s[i] != '}') return false;
  name = std::string(s.substr(pos + 1, i - pos - 1));
  end = i + 1;
  return true;
}

// Scans an optional [...] argument starting at or after `pos` (whitespace
// allowed before '['). Brace groups inside protect ']'. Returns false when
// there is no complete optional argument.
bool scan_optional_arg(std::string_view s, std::size_t pos, Span& content,
                       std::size_t& end) {
  std::size_t i = pos;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
  if (i >= s.size() || s[i] != '[') return false;
  std::size_t j = i + 1;
  int depth = 0;
  while (j < s.size()) {
    const char c = s[j];
    if (c == '{') ++depth;
    else if (c == '}' && depth > 0) --depth;
    else if (c == ']' && depth == 0) {
      content = Span{i + 1, j};
      end = j + 1;
      return true;
    }
    ++j;
  }
  return false;
}

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t text_start = 0;

  auto flush_text = [&](std::size_t upto) {
    if (text_start < upto) {
      Token t;
      t.kind = TokKind::Text;
      t.span = Span{text_start, upto};
      t.lexeme = std::string(source.substr(text_start, upto - text_start));
      out.push_back(std::move(t));
    }
  };
  auto push = [&](Token t) {
    flush_text(t.span.begin);
    text_start = t.span.end;
    i = t.span.end;
    out.push_back(std::move(t));
  };

  while (i < source.size()) {
    const char c = source[i];
    if (!is_special(c)) {
      ++i;
      continue;
    }
    if (c == '%') {
      std::size_t j = i;
      while (j < source.size() && source[j] != '\n') ++j;
      Token t;
      t.kind = TokKind::Comment;
      t.span = Span{i, j};
      t.lexeme = std::string(source.substr(i, j - i));
      push(std::move(t));
      continue;
    }
    if (c == '{' || c == '}') {
      Token t;
      t.kind = c == '{' ? TokKind::GroupOpen : TokKind::GroupClose;
      t.span = Span{i, i + 1};
      t.lexeme = std::string(1, c);
      push(std::move(t));
      continue;
    }
    if (c == '$') {
      const std::size_t n = (i + 1 < source.size() && source[i + 1] == '$') ? 2 : 1;
      Token t;
      t.kind = TokKind::MathShift;
      t.span = Span{i, i + n};
      t.lexeme = std::string(source.substr(i, n));
      push(std::move(t));
      continue;
    }

    // Backslash: control word, control symbol, \verb or \begin/\end.
    if (i + 1 >= source.size()) {
      // Lone trailing backslash stays text.
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    std::string name;
    if (is_letter(source[j])) {
      while (j < source.size() && is_letter(source[j])) ++j;
      name = std::string(source.substr(i + 1, j - i - 1));
    } else {
      name = std::string(1, source[j]);
      ++j;
    }

    if (name == "verb") {
      std::size_t k = j;
      if (k < source.size() && source[k] == '*') ++k;
      if (k < source.size()) {
        const char delim = source[k];
        std::size_t e = k + 1;
        while (e < source.size() && source[e] != delim && source[e] != '\n') ++e;
        if (e < source.size() && source[e] == delim) ++e;
        Token t;
        t.kind = TokKind::Verbatim;
        t.span = Span{i, e};
        t.lexeme = std::string(source.substr(i, e - i));
        push(std::move(t));
        continue;
      }
    }

    if (name == "begin" || name == "end") {
      std::string env;
      std::size_t after_name = 0;
      if (scan_env_name(source, j, env, after_name)) {
        if (name == "begin" && (env == "verbatim" || env == "verbatim*")) {
          // Opaque region through the matching \end{...}.
          const std::string closer = "\\end{" + env + "}";
          const std::size_t found = source.find(closer, after_name);
          const std::size_t e =
              found == std::string_view::npos ? source.size() : found + closer.size();
          Token t;
          t.kind = TokKind::Verbatim;
          t.span = Span{i, e};
          t.lexeme = std::string(source.substr(i, e - i));
          push(std::move(t));
          continue;
        }
        Token t;
        t.kind = name == "begin" ? TokKind::EnvBegin : TokKind::EnvEnd;
        t.name = env;
        std::size_t e = after_name;
        if (name == "begin") {
          Span content;
          std::size_t after_opt = 0;
          if (scan_optional_arg(source, after_name, content, after_opt)) {
            t.has_optional = true;
            t.optional_arg = std::string(source.substr(content.begin, content.size()));
            t.optional_span = content;
            e = after_opt;
          }
        }
        t.span = Span{i, e};
        t.lexeme = std::string(source.substr(i, e - i));
        push(std::move(t));
        continue;
      }
      // \begin without a braced name falls through as a plain command.
    }

    Token t;
    t.kind = TokKind::Command;
    t.name = name;
    t.span = Span{i, j};
    t.lexeme = std::string(source.substr(i, j - i));
    push(std::move(t));
  }
  flush_text(source.size());
  return out;
}

std::vector<EnvBlock> find_environments(const std::vector<Token>& tokens,
                                        std::string_view name,
                                        std::vector<EnvDiagnostic>* diags) {
  struct Open {
    std::size_t token_index;
  };
  std::vector<Open> stack;
  struct Found {
    std::size_t begin_idx, end_idx;
  };
  std::vector<Found> found;

  for (std::size_t idx = 0; idx < tokens.size(); ++idx) {
    const Token& t = tokens[idx];
    if (t.kind == TokKind::EnvBegin && t.name == name) {
      stack.push_back(Open{idx});
    } else if (t.kind == TokKind::EnvEnd && t.name == name) {
      if (stack.empty()) {
        if (diags) {
          diags->push_back(EnvDiagnostic{"stray-end", t.span.begin, std::string(name)});
        }
        continue;
      }
      found.push_back(Found{stack.back().token_index, idx});
      stack.pop_back();
    }
  }
  for (const Open& o : stack) {
    if (diags) {
      diags->push_back(EnvDiagnostic{"unbalanced-begin", tokens[o.token_index].span.begin,
                                     std::string(name)});
    }
  }

  std::sort(found.begin(), found.end(),
            [](const Found& a, const Found& b) { return a.begin_idx < b.begin_idx; });

  std::vector<EnvBlock> blocks;
  blocks.reserve(found.size());
  for (const Found& f : found) {
    const Token& b = tokens[f.begin_idx];
    const Token& e = tokens[f.end_idx];
    EnvBlock blk;
    blk.name = b.name;
    blk.has_optional = b.has_optional;
    blk.optional_arg = b.optional_arg;
    blk.body_span = Span{b.span.end, e.span.begin};
    for (std::size_t k = f.begin_idx + 1; k < f.end_idx; ++k) {
      blk.body += tokens[k].lexeme;
    }
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

std::string strip_comments(std::string_view source) {
  std::string out;
  out.reserve(source.size());
  for (const Token& t : tokenize(source)) {
    if (t.kind != TokKind::Comment) out += t.lexeme;
  }
  return out;
}

}  // namespace defitex::tex
