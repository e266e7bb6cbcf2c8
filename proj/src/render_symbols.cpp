#include <unordered_map>

#include "defitex/textutil.hpp"
#include "render_internal.hpp"

namespace defitex::render {

namespace {

struct Entry {
  const char* name;
  const char* text;
};

// Audited replacement table: Greek letters, binary relations, set and
// logic operators, arrows, dots, delimiters, spacing, text symbols and
// the common operator names. Commands not listed here follow the
// unknown-command rule.
const Entry kSymbols[] = {
    // Greek, lowercase
    {"alpha", "α"}, {"beta", "β"}, {"gamma", "γ"}, {"delta", "δ"},
    {"epsilon", "ε"}, {"varepsilon", "ε"}, {"zeta", "ζ"}, {"eta", "η"},
    {"theta", "θ"}, {"vartheta", "ϑ"}, {"iota", "ι"}, {"kappa", "κ"},
    {"lambda", "λ"}, {"mu", "μ"}, {"nu", "ν"}, {"xi", "ξ"},
    {"omicron", "ο"}, {"pi", "π"}, {"varpi", "ϖ"}, {"rho", "ρ"},
    {"varrho", "ϱ"}, {"sigma", "σ"}, {"varsigma", "ς"}, {"tau", "τ"},
    {"upsilon", "υ"}, {"phi", "φ"}, {"varphi", "φ"}, {"chi", "χ"},
    {"psi", "ψ"}, {"omega", "ω"},
    // Greek, uppercase
    {"Gamma", "Γ"}, {"Delta", "Δ"}, {"Theta", "Θ"}, {"Lambda", "Λ"},
    {"Xi", "Ξ"}, {"Pi", "Π"}, {"Sigma", "Σ"}, {"Upsilon", "Υ"},
    {"Phi", "Φ"}, {"Psi", "Ψ"}, {"Omega", "Ω"},
    // Relations
    {"leq", "≤"}, {"le", "≤"}, {"geq", "≥"}, {"ge", "≥"}, {"neq", "≠"},
    {"ne", "≠"}, {"equiv", "≡"}, {"approx", "≈"}, {"cong", "≅"},
    {"simeq", "≃"}, {"sim", "∼"}, {"propto", "∝"}, {"ll", "≪"},
    {"gg", "≫"}, {"prec", "≺"}, {"succ", "≻"}, {"preceq", "⪯"},
    {"succeq", "⪰"}, {"leqslant", "⩽"}, {"geqslant", "⩾"},
    {"subset", "⊂"}, {"supset", "⊃"}, {"subseteq", "⊆"}, {"supseteq", "⊇"},
    {"subsetneq", "⊊"}, {"supsetneq", "⊋"}, {"sqsubseteq", "⊑"},
    {"sqsupseteq", "⊒"}, {"in", "∈"}, {"ni", "∋"}, {"notin", "∉"},
    {"mid", "∣"}, {"nmid", "∤"}, {"parallel", "∥"}, {"perp", "⊥"},
    {"asymp", "≍"}, {"doteq", "≐"}, {"models", "⊨"}, {"vdash", "⊢"},
    {"dashv", "⊣"},
    // Binary operators
    {"times", "×"}, {"div", "÷"}, {"pm", "±"}, {"mp", "∓"},
    {"cdot", "·"}, {"circ", "∘"}, {"bullet", "•"}, {"cup", "∪"},
    {"cap", "∩"}, {"setminus", "∖"}, {"smallsetminus", "∖"},
    {"vee", "∨"}, {"lor", "∨"}, {"wedge", "∧"}, {"land", "∧"},
    {"oplus", "⊕"}, {"ominus", "⊖"}, {"otimes", "⊗"}, {"oslash", "⊘"},
    {"odot", "⊙"}, {"sqcup", "⊔"}, {"sqcap", "⊓"}, {"uplus", "⊎"},
    {"amalg", "⨿"}, {"star", "⋆"}, {"ast", "∗"}, {"dagger", "†"},
    {"ddagger", "‡"}, {"wr", "≀"}, {"triangleleft", "◁"},
    {"triangleright", "▷"}, {"bigtriangleup", "△"}, {"bigtriangledown", "▽"},
    // Arrows
    {"to", "→"}, {"rightarrow", "→"}, {"leftarrow", "←"}, {"gets", "←"},
    {"leftrightarrow", "↔"}, {"Rightarrow", "⇒"}, {"Leftarrow", "⇐"},
    {"Leftrightarrow", "⇔"}, {"mapsto", "↦"}, {"longmapsto", "⟼"},
    {"longrightarrow", "⟶"}, {"longleftarrow", "⟵"},
    {"Longrightarrow", "⟹"}, {"Longleftarrow", "⟸"},
    {"Longleftrightarrow", "⟺"}, {"implies", "⟹"}, {"iff", "⟺"},
    {"hookrightarrow", "↪"}, {"hookleftarrow", "↩"},
    {"rightharpoonup", "⇀"}, {"leftharpoonup", "↼"},
    {"uparrow", "↑"}, {"downarrow", "↓"}, {"updownarrow", "↕"},
    {"Uparrow", "⇑"}, {"Downarrow", "⇓"}, {"nearrow", "↗"},
    {"searrow", "↘"}, {"nwarrow", "↖"}, {"swarrow", "↙"},
    {"rightrightarrows", "⇉"}, {"rightleftharpoons", "⇌"},
    // Big operators and misc math
    {"sum", "∑"}, {"prod", "∏"}, {"coprod", "∐"}, {"int", "∫"},
    {"iint", "∬"}, {"iiint", "∭"}, {"oint", "∮"}, {"bigcup", "⋃"},
    {"bigcap", "⋂"}, {"bigvee", "⋁"}, {"bigwedge", "⋀"},
    {"bigoplus", "⨁"}, {"bigotimes", "⨂"}, {"bigsqcup", "⨆"},
    {"infty", "∞"}, {"partial", "∂"}, {"nabla", "∇"}, {"forall", "∀"},
    {"exists", "∃"}, {"nexists", "∄"}, {"emptyset", "∅"},
    {"varnothing", "∅"}, {"aleph", "ℵ"}, {"hbar", "ℏ"}, {"ell", "ℓ"},
    {"Re", "ℜ"}, {"Im", "ℑ"}, {"wp", "℘"}, {"angle", "∠"},
    {"triangle", "△"}, {"square", "□"}, {"Box", "□"}, {"diamond", "⋄"},
    {"Diamond", "◊"}, {"neg", "¬"}, {"lnot", "¬"}, {"top", "⊤"},
    {"bot", "⊥"}, {"prime", "′"}, {"sqrt", "√"}, {"surd", "√"},
    {"degree", "°"}, {"flat", "♭"}, {"sharp", "♯"}, {"natural", "♮"},
    {"clubsuit", "♣"}, {"diamondsuit", "♢"}, {"heartsuit", "♡"},
    {"spadesuit", "♠"}, {"cdots", "⋯"}, {"ldots", "…"}, {"dots", "…"},
    {"dotsc", "…"}, {"dotsb", "⋯"}, {"vdots", "⋮"}, {"ddots", "⋱"},
    {"therefore", "∴"}, {"because", "∵"},
    // Delimiters
    {"langle", "⟨"}, {"rangle", "⟩"}, {"lceil", "⌈"}, {"rceil", "⌉"},
    {"lfloor", "⌊"}, {"rfloor", "⌋"}, {"|", "‖"}, {"Vert", "‖"},
    {"vert", "|"}, {"lbrace", "{"}, {"rbrace", "}"}, {"lbrack", "["},
    {"rbrack", "]"}, {"backslash", "\\"},
    // Escaped specials
    {"{", "{"}, {"}", "}"}, {"$", "$"}, {"%", "%"}, {"&", "&"},
    {"#", "#"}, {"_", "_"},
    // Spacing
    {",", " "}, {";", " "}, {":", " "}, {" ", " "}, {"\t", " "},
    {"\n", " "}, {"quad", " "}, {"qquad", " "}, {"enspace", " "},
    {"thinspace", " "}, {"!", ""}, {"-", ""}, {"/", ""},
    // Text symbols
    {"textendash", "–"}, {"textemdash", "—"}, {"textquoteleft", "‘"},
    {"textquoteright", "’"}, {"textquotedblleft", "“"},
    {"textquotedblright", "”"}, {"textbackslash", "\\"},
    {"textasciitilde", "~"}, {"textasciicircum", "^"},
    {"textbullet", "•"}, {"textdagger", "†"}, {"textdaggerdbl", "‡"},
    {"textellipsis", "…"}, {"textgreater", ">"}, {"textless", "<"},
    {"textbar", "|"}, {"textunderscore", "_"}, {"dag", "†"},
    {"ddag", "‡"}, {"S", "§"}, {"P", "¶"}, {"copyright", "©"},
    {"pounds", "£"}, {"euro", "€"}, {"dollar", "$"},
    // Letters and ligatures
    {"o", "ø"}, {"O", "Ø"}, {"ae", "æ"}, {"AE", "Æ"}, {"aa", "å"},
    {"AA", "Å"}, {"ss", "ß"}, {"oe", "œ"}, {"OE", "Œ"}, {"l", "ł"},
    {"L", "Ł"}, {"i", "ı"}, {"j", "ȷ"}, {"th", "þ"}, {"TH", "Þ"},
    {"dh", "ð"}, {"DH", "Ð"}, {"ng", "ŋ"}, {"NG", "Ŋ"},
    // Operator names (rendered as their text)
    {"max", "max"}, {"min", "min"}, {"log", "log"}, {"ln", "ln"},
    {"lg", "lg"}, {"exp", "exp"}, {"sin", "sin"}, {"cos", "cos"},
    {"tan", "tan"}, {"cot", "cot"}, {"sec", "sec"}, {"csc", "csc"},
    {"arcsin", "arcsin"}, {"arccos", "arccos"}, {"arctan", "arctan"},
    {"sinh", "sinh"}, {"cosh", "cosh"}, {"tanh", "tanh"},
    {"deg", "deg"}, {"det", "det"}, {"dim", "dim"}, {"gcd", "gcd"},
    {"inf", "inf"}, {"sup", "sup"}, {"lim", "lim"}, {"liminf", "lim inf"},
    {"limsup", "lim sup"}, {"mod", "mod"}, {"bmod", "mod"},
    {"pmod", "mod"}, {"Pr", "Pr"}, {"arg", "arg"}, {"ker", "ker"},
    {"hom", "hom"}, {"lcm", "lcm"},
};

const std::unordered_map<std::string, std::string>& composed_accents() {
  // Keys are accent command + base letter.
  static const std::unordered_map<std::string, std::string> table = {
      {"`a", "à"}, {"`e", "è"}, {"`i", "ì"}, {"`o", "ò"}, {"`u", "ù"},
      {"`A", "À"}, {"`E", "È"}, {"`I", "Ì"}, {"`O", "Ò"}, {"`U", "Ù"},
      {"'a", "á"}, {"'e", "é"}, {"'i", "í"}, {"'o", "ó"}, {"'u", "ú"},
      {"'y", "ý"}, {"'c", "ć"}, {"'n", "ń"}, {"'s", "ś"}, {"'z", "ź"},
      {"'r", "ŕ"}, {"'l", "ĺ"}, {"'g", "ǵ"},
      {"'A", "Á"}, {"'E", "É"}, {"'I", "Í"}, {"'O", "Ó"}, {"'U", "Ú"},
      {"'Y", "Ý"}, {"'C", "Ć"}, {"'N", "Ń"}, {"'S", "Ś"}, {"'Z", "Ź"},
      {"^a", "â"}, {"^e", "ê"}, {"^i", "î"}, {"^o", "ô"}, {"^u", "û"},
      {"^A", "Â"}, {"^E", "Ê"}, {"^I", "Î"}, {"^O", "Ô"}, {"^U", "Û"},
      {"^w", "ŵ"}, {"^y", "ŷ"}, {"^c", "ĉ"}, {"^g", "ĝ"}, {"^h", "ĥ"},
      {"^s", "ŝ"},
      {"\"a", "ä"}, {"\"e", "ë"}, {"\"i", "ï"}, {"\"o", "ö"}, {"\"u", "ü"},
      {"\"y", "ÿ"}, {"\"A", "Ä"}, {"\"E", "Ë"}, {"\"I", "Ï"}, {"\"O", "Ö"},
      {"\"U", "Ü"},
      {"~a", "ã"}, {"~o", "õ"}, {"~n", "ñ"}, {"~A", "Ã"}, {"~O", "Õ"},
      {"~N", "Ñ"}, {"~u", "ũ"}, {"~i", "ĩ"},
      {"=a", "ā"}, {"=e", "ē"}, {"=i", "ī"}, {"=o", "ō"}, {"=u", "ū"},
      {"=A", "Ā"}, {"=E", "Ē"}, {"=I", "Ī"}, {"=O", "Ō"}, {"=U", "Ū"},
      {".z", "ż"}, {".Z", "Ż"}, {".e", "ė"}, {".g", "ġ"}, {".I", "İ"},
      {"ua", "ă"}, {"ue", "ĕ"}, {"ug", "ğ"}, {"ui", "ĭ"}, {"uo", "ŏ"},
      {"uu", "ŭ"}, {"uA", "Ă"}, {"uG", "Ğ"}, {"uU", "Ŭ"},
      {"vc", "č"}, {"vs", "š"}, {"vz", "ž"}, {"vr", "ř"}, {"ve", "ě"},
      {"vd", "ď"}, {"vt", "ť"}, {"vn", "ň"}, {"vl", "ľ"}, {"vg", "ǧ"},
      {"vC", "Č"}, {"vS", "Š"}, {"vZ", "Ž"}, {"vR", "Ř"}, {"vE", "Ě"},
      {"vD", "Ď"}, {"vT", "Ť"}, {"vN", "Ň"}, {"vL", "Ľ"},
      {"Ho", "ő"}, {"Hu", "ű"}, {"HO", "Ő"}, {"HU", "Ű"},
      {"cc", "ç"}, {"cC", "Ç"}, {"cs", "ş"}, {"cS", "Ş"}, {"ct", "ţ"},
      {"cT", "Ţ"}, {"ce", "ȩ"},
      {"ka", "ą"}, {"ke", "ę"}, {"kA", "Ą"}, {"kE", "Ę"},
      {"ra", "å"}, {"rA", "Å"}, {"ru", "ů"}, {"rU", "Ů"},
      {"dl", "ḷ"}, {"dr", "ṛ"}, {"dm", "ṃ"}, {"dn", "ṇ"}, {"dt", "ṭ"},
      {"bh", "ẖ"},
  };
  return table;
}

const std::unordered_map<std::string, const char*>& combining_marks() {
  static const std::unordered_map<std::string, const char*> table = {
      {"`", "̀"}, {"'", "́"}, {"^", "̂"}, {"~", "̃"},
      {"=", "̄"}, {"u", "̆"}, {".", "̇"}, {"\"", "̈"},
      {"r", "̊"}, {"H", "̋"}, {"v", "̌"}, {"c", "̧"},
      {"k", "̨"}, {"d", "̣"}, {"b", "̱"}, {"t", "͡"},
  };
  return table;
}

}  // namespace

SymbolTable builtin_symbols() {
  SymbolTable t;
  for (const Entry& e : kSymbols) {
    t.set(e.name, e.text);
  }
  return t;
}

bool is_accent_command(const std::string& name) {
  return combining_marks().count(name) > 0;
}

std::string compose_accent(const std::string& accent, const std::string& base) {
  if (base.empty()) return "";
  // \i and \j lose their dot under an accent; treat them as i/j.
  std::string b = base;
  if (b == "ı") b = "i";
  if (b == "ȷ") b = "j";
  const std::size_t first = text::cp_len(b, 0);
  const auto it = composed_accents().find(accent + b.substr(0, first));
  if (it != composed_accents().end()) {
    return it->second + b.substr(first);
  }
  const auto mark = combining_marks().find(accent);
  if (mark == combining_marks().end()) return b;
  return b.substr(0, first) + mark->second + b.substr(first);
}

}  // namespace defitex::render
