#include "defitex/render.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

#include "defitex/errors.hpp"
#include "defitex/textutil.hpp"
#include "render_internal.hpp"

namespace defitex::render {

const SymbolTable& SymbolTable::builtin() {
  static const SymbolTable table = builtin_symbols();
  return table;
}

SymbolTable SymbolTable::with_overrides(const std::filesystem::path& json_file) {
  SymbolTable t = builtin();
  std::ifstream in(json_file);
  if (!in) throw IoError("cannot open symbol table: " + json_file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("bad symbol table " + json_file.string() + ": " + e.what());
  }
  if (!j.is_object()) throw SchemaError("symbol table must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string key = it.key();
    if (!key.empty() && key[0] == '\\') key = key.substr(1);
    if (!it.value().is_string()) throw SchemaError("symbol table values must be strings");
    t.set(key, it.value().get<std::string>());
  }
  return t;
}

const std::string* SymbolTable::lookup(const std::string& name) const {
  const auto it = map_.find(name);
  return it == map_.end() ? nullptr : &it->second;
}

void SymbolTable::set(std::string name, std::string replacement) {
  map_[std::move(name)] = std::move(replacement);
}

std::optional<tex::Span> OffsetMap::map(tex::Span latex_range) const {
  std::size_t tb = static_cast<std::size_t>(-1);
  std::size_t te = 0;
  bool found = false;
  for (const Segment& s : segments) {
    if (s.latex.end <= latex_range.begin || s.latex.begin >= latex_range.end) continue;
    std::size_t b = s.text.begin;
    std::size_t e = s.text.end;
    if (s.identity) {
      const std::size_t ob = std::max(latex_range.begin, s.latex.begin);
      const std::size_t oe = std::min(latex_range.end, s.latex.end);
      b = s.text.begin + (ob - s.latex.begin);
      e = s.text.begin + (oe - s.latex.begin);
    }
    if (b == e) continue;
    found = true;
    tb = std::min(tb, b);
    te = std::max(te, e);
  }
  if (!found) return std::nullopt;
  return tex::Span{tb, te};
}

std::optional<tex::Span> map_span(const RenderedText& rendered, tex::Span latex_range) {
  return rendered.map.map(latex_range);
}

namespace {

const std::set<std::string>& display_envs() {
  static const std::set<std::string> envs = {
      "align",    "align*",    "equation", "equation*", "gather",  "gather*",
      "multline", "multline*", "eqnarray", "eqnarray*", "alignat", "alignat*",
      "flalign",  "flalign*",  "displaymath"};
  return envs;
}

const std::set<std::string>& reference_commands() {
  static const std::set<std::string> cmds = {
      "label", "ref",  "eqref",  "pageref", "autoref",
      "cref",  "Cref", "cite",   "citep",   "citet",
      "citealp", "citealt"};
  return cmds;
}

bool renderer_special(char c) {
  return c == '\\' || c == '{' || c == '}' || c == '$' || c == '%' ||
         c == '~' || c == '`' || c == '\'' || c == '-' || c == '&' ||
         text::is_space(c);
}

class Renderer {
 public:
  Renderer(std::string_view src, const SymbolTable& sym,
           std::vector<RenderWarning>* warnings)
      : src_(src), sym_(sym), warnings_(warnings) {}

  RenderedText run() {
    while (i_ < src_.size()) {
      step();
    }
    close_identity();
    if (open_groups_ > 0) {
      warn("unbalanced-braces", first_unclosed_, "group left open");
    }
    RenderedText r;
    r.text = std::move(out_);
    r.map.segments = std::move(segments_);
    return r;
  }

 private:
  enum PendingWs { kNone = 0, kSpace = 1, kNewline = 2 };

  void step() {
    const char c = src_[i_];
    if (!renderer_special(c)) {
      std::size_t j = i_;
      while (j < src_.size() && !renderer_special(src_[j])) ++j;
      emit_identity(i_, j);
      i_ = j;
      return;
    }
    switch (c) {
      case '\\':
        command();
        return;
      case '{':
        ++open_groups_;
        if (open_groups_ == 1) first_unclosed_ = i_;
        ++i_;
        return;
      case '}':
        if (open_groups_ == 0) {
          warn("unbalanced-braces", i_, "stray closing brace");
        } else {
          --open_groups_;
        }
        ++i_;
        return;
      case '$':
        i_ += (i_ + 1 < src_.size() && src_[i_ + 1] == '$') ? 2 : 1;
        return;
      case '%': {
        // Comments are stripped upstream; a stray one still vanishes.
        std::size_t j = i_;
        while (j < src_.size() && src_[j] != '\n') ++j;
        i_ = j;
        return;
      }
      case '~':
        add_ws(kSpace, i_, i_ + 1);
        ++i_;
        return;
      case '&':
        add_ws(kSpace, i_, i_ + 1);
        ++i_;
        return;
      case '-': {
        std::size_t j = i_;
        while (j < src_.size() && src_[j] == '-') ++j;
        const std::size_t run = j - i_;
        if (run >= 3) {
          emit_atomic("—", i_, i_ + 3);
          i_ += 3;
        } else if (run == 2) {
          emit_atomic("–", i_, i_ + 2);
          i_ += 2;
        } else {
          emit_identity(i_, i_ + 1);
          ++i_;
        }
        return;
      }
      case '`':
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '`') {
          emit_atomic("“", i_, i_ + 2);
          i_ += 2;
        } else {
          emit_atomic("‘", i_, i_ + 1);
          ++i_;
        }
        return;
      case '\'':
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '\'') {
          emit_atomic("”", i_, i_ + 2);
          i_ += 2;
        } else {
          emit_identity(i_, i_ + 1);
          ++i_;
        }
        return;
      default: {
        // Whitespace run; two or more newlines make a paragraph break.
        std::size_t j = i_;
        int newlines = 0;
        while (j < src_.size() && text::is_space(src_[j])) {
          if (src_[j] == '\n') ++newlines;
          ++j;
        }
        add_ws(newlines >= 2 ? kNewline : kSpace, i_, j);
        i_ = j;
        return;
      }
    }
  }

  void command() {
    const std::size_t start = i_;
    if (i_ + 1 >= src_.size()) {
      ++i_;
      return;
    }
    std::size_t j = i_ + 1;
    std::string name;
    if (tex::is_letter(src_[j])) {
      while (j < src_.size() && tex::is_letter(src_[j])) ++j;
      name = std::string(src_.substr(i_ + 1, j - i_ - 1));
    } else {
      name = std::string(1, src_[j]);
      ++j;
    }
    i_ = j;

    if (name == "begin" || name == "end") {
      environment(name == "begin", start);
      return;
    }
    if (name == "verb") {
      verbatim();
      return;
    }
    if (name == "\\") {
      skip_bracket_group(false);
      add_ws(kNewline, start, i_);
      return;
    }
    if (name == "par") {
      add_ws(kNewline, start, i_);
      return;
    }
    if (name == "item") {
      skip_bracket_group(true);
      add_ws(kNewline, start, i_);
      return;
    }
    if (name == "(" || name == ")") {
      return;  // inline math delimiters vanish
    }
    if (name == "[" || name == "]") {
      add_ws(kNewline, start, i_);
      return;
    }
    if (is_accent_command(name)) {
      accent(name, start);
      return;
    }
    if (const std::string* val = sym_.lookup(name)) {
      if (*val == " ") {
        add_ws(kSpace, start, i_);
      } else if (!val->empty()) {
        emit_atomic(*val, start, i_);
      }
      return;
    }
    if (reference_commands().count(name)) {
      warn("reference-kept", start, "\\" + name + " argument kept as text");
      skip_bracket_group(true);
      return;
    }
    // Unknown command: a following optional argument is dropped, a braced
    // argument renders as an ordinary group.
    skip_bracket_group(true);
  }

  void environment(bool is_begin, std::size_t start) {
    std::string env;
    if (i_ < src_.size() && src_[i_] == '{') {
      std::size_t j = i_ + 1;
      while (j < src_.size() && src_[j] != '}' && src_[j] != '{' && src_[j] != '\n') ++j;
      if (j < src_.size() && src_[j] == '}') {
        env = std::string(src_.substr(i_ + 1, j - i_ - 1));
        i_ = j + 1;
      }
    }
    if (is_begin) skip_bracket_group(true);
    if (display_envs().count(env)) {
      add_ws(kNewline, start, i_);
    }
  }

  void verbatim() {
    std::size_t k = i_;
    if (k < src_.size() && src_[k] == '*') ++k;
    if (k >= src_.size()) {
      i_ = k;
      return;
    }
    const char delim = src_[k];
    std::size_t e = k + 1;
    const std::size_t content_begin = e;
    while (e < src_.size() && src_[e] != delim && src_[e] != '\n') ++e;
    // Verbatim content is copied literally (whitespace still collapses).
    for (std::size_t p = content_begin; p < e; ++p) {
      if (text::is_space(src_[p])) {
        add_ws(kSpace, p, p + 1);
      } else {
        emit_identity(p, p + 1);
      }
    }
    i_ = (e < src_.size() && src_[e] == delim) ? e + 1 : e;
  }

  void accent(const std::string& name, std::size_t start) {
    // Control-word accents may be separated from their base by spaces.
    if (tex::is_letter(name[0])) {
      while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\t')) ++i_;
    }
    std::string base;
    if (i_ < src_.size() && src_[i_] == '{') {
      int depth = 1;
      std::size_t j = i_ + 1;
      const std::size_t inner_begin = j;
      while (j < src_.size() && depth > 0) {
        if (src_[j] == '{') ++depth;
        else if (src_[j] == '}') --depth;
        ++j;
      }
      const std::size_t inner_end = depth == 0 ? j - 1 : j;
      base = std::string(src_.substr(inner_begin, inner_end - inner_begin));
      i_ = j;
      // Dotless i/j and similar one-command bases.
      if (!base.empty() && base[0] == '\\') {
        if (const std::string* val = sym_.lookup(base.substr(1))) base = *val;
      }
    } else if (i_ < src_.size() && src_[i_] == '\\') {
      std::size_t j = i_ + 1;
      std::string inner;
      if (j < src_.size() && tex::is_letter(src_[j])) {
        while (j < src_.size() && tex::is_letter(src_[j])) ++j;
        inner = std::string(src_.substr(i_ + 1, j - i_ - 1));
      } else if (j < src_.size()) {
        inner = std::string(1, src_[j]);
        ++j;
      }
      if (const std::string* val = sym_.lookup(inner)) base = *val;
      i_ = j;
    } else if (i_ < src_.size() && !text::is_space(src_[i_])) {
      const std::size_t n = text::cp_len(src_, i_);
      base = std::string(src_.substr(i_, n));
      i_ += n;
    }
    const std::string composed = compose_accent(name, base);
    if (!composed.empty()) emit_atomic(composed, start, i_);
  }

  // Skips one [...] group; optionally allows whitespace before '['.
  void skip_bracket_group(bool allow_ws) {
    std::size_t j = i_;
    if (allow_ws) {
      while (j < src_.size() && (src_[j] == ' ' || src_[j] == '\t')) ++j;
    }
    if (j >= src_.size() || src_[j] != '[') return;
    int depth = 0;
    std::size_t k = j + 1;
    while (k < src_.size()) {
      const char c = src_[k];
      if (c == '{') ++depth;
      else if (c == '}' && depth > 0) --depth;
      else if (c == ']' && depth == 0) {
        i_ = k + 1;
        return;
      }
      ++k;
    }
  }

  void add_ws(int kind, std::size_t lat_b, std::size_t lat_e) {
    if (pending_ == kNone) {
      pend_span_ = tex::Span{lat_b, lat_e};
    }
    pending_ = std::max(pending_, kind);
  }

  void flush_pending() {
    if (pending_ == kNone) return;
    const int kind = pending_;
    pending_ = kNone;
    if (out_.empty()) return;  // trim leading whitespace
    close_identity();
    const std::size_t tb = out_.size();
    out_.push_back(kind == kNewline ? '\n' : ' ');
    segments_.push_back(Segment{pend_span_, tex::Span{tb, out_.size()}, false});
  }

  void emit_atomic(const std::string& s, std::size_t lat_b, std::size_t lat_e) {
    if (s.empty()) return;
    flush_pending();
    close_identity();
    const std::size_t tb = out_.size();
    out_ += s;
    segments_.push_back(Segment{tex::Span{lat_b, lat_e}, tex::Span{tb, out_.size()}, false});
  }

  void emit_identity(std::size_t lat_b, std::size_t lat_e) {
    if (lat_b >= lat_e) return;
    flush_pending();
    if (!id_open_ || id_lat_end_ != lat_b) {
      close_identity();
      id_open_ = true;
      id_lat_begin_ = lat_b;
      id_txt_begin_ = out_.size();
    }
    out_.append(src_.substr(lat_b, lat_e - lat_b));
    id_lat_end_ = lat_e;
  }

  void close_identity() {
    if (!id_open_) return;
    segments_.push_back(Segment{tex::Span{id_lat_begin_, id_lat_end_},
                                tex::Span{id_txt_begin_, out_.size()}, true});
    id_open_ = false;
  }

  void warn(const std::string& kind, std::size_t offset, const std::string& detail) {
    if (warnings_) warnings_->push_back(RenderWarning{kind, offset, detail});
  }

  std::string_view src_;
  const SymbolTable& sym_;
  std::vector<RenderWarning>* warnings_;
  std::size_t i_ = 0;
  std::string out_;
  std::vector<Segment> segments_;
  int pending_ = kNone;
  tex::Span pend_span_;
  bool id_open_ = false;
  std::size_t id_lat_begin_ = 0, id_lat_end_ = 0, id_txt_begin_ = 0;
  int open_groups_ = 0;
  std::size_t first_unclosed_ = 0;
};

}  // namespace

RenderedText render_plain_text(std::string_view fragment, const SymbolTable& symbols,
                               std::vector<RenderWarning>* warnings) {
  Renderer r(fragment, symbols, warnings);
  return r.run();
}

}  // namespace defitex::render
