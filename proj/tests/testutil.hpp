#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Scratch directory removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("defitex_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// Runs the CLI binary; returns the process exit code.
inline int run_cli(const std::string& args) {
  const std::string cmd = std::string(DEFITEX_BIN) + " " + args + " >/dev/null 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic synthetic corpus: `papers` directories of one main.tex each
// with `defs_per_paper` definition environments, plus a metadata TSV.
// Definienda are drawn from a fixed vocabulary so they survive the noise
// filters and can be located in the rendered text.
inline void generate_corpus(const fs::path& root, const fs::path& times_tsv, int papers,
                            int defs_per_paper, std::uint64_t seed) {
  static const char* kAdj[] = {"strong",   "weak",     "perfect",  "minimal",
                               "maximal",  "balanced", "critical", "regular",
                               "induced",  "spanning", "proper",   "stable"};
  static const char* kNoun[] = {"matching",  "coloring", "ordering", "partition",
                                "cover",     "clique",   "spread",   "kernel",
                                "expansion", "distance", "index",    "width"};
  static const char* kFiller[] = {
      "Let $G$ be a finite simple graph with vertex set $V(G)$.",
      "Consider a family of subsets closed under intersection.",
      "Fix an integer $k \\geq 2$ and a proper $k$-coloring of $G$.",
      "All graphs in this paper are finite and loopless.",
      "We write $\\alpha(G)$ for the independence number of $G$.",
      "Suppose the sequence $(a_n)$ is eventually periodic.",
  };

  fs::create_directories(root);
  std::ofstream tsv(times_tsv, std::ios::binary);
  std::uint64_t state = mix64(seed);
  auto next = [&state](std::uint64_t bound) {
    state = mix64(state);
    return state % bound;
  };

  for (int p = 0; p < papers; ++p) {
    char id[32];
    std::snprintf(id, sizeof(id), "16%02d.%05d", p % 12 + 1, p + 1);
    const fs::path dir = root / id;
    fs::create_directories(dir);
    std::ostringstream tex;
    tex << "\\documentclass{article}\n\\begin{document}\n";
    for (int d = 0; d < defs_per_paper; ++d) {
      const std::string adj = kAdj[next(sizeof(kAdj) / sizeof(kAdj[0]))];
      const std::string noun = kNoun[next(sizeof(kNoun) / sizeof(kNoun[0]))];
      const std::string term = adj + " " + noun;
      const bool with_opt = next(4) == 0;
      tex << "\\begin{definition}";
      if (with_opt) tex << "[" << term << "]";
      tex << "\n" << kFiller[next(sizeof(kFiller) / sizeof(kFiller[0]))] << "\n";
      tex << "A set is called a \\emph{" << term << "} of $G$ when it satisfies\n";
      tex << "the property indexed by $" << (d + 1) << "$ below.\n";
      if (next(3) == 0) {
        tex << "Some authors write \\textit{" << noun << "-free} instead.\n";
      }
      tex << "\\end{definition}\n\n";
      tex << kFiller[next(sizeof(kFiller) / sizeof(kFiller[0]))] << "\n\n";
    }
    tex << "\\end{document}\n";
    write_file(dir / "main.tex", tex.str());

    char ts[64];
    std::snprintf(ts, sizeof(ts), "20%02d-%02d-%02dT%02d:00:00Z", 10 + p % 10,
                  static_cast<int>(next(12) + 1), static_cast<int>(next(28) + 1),
                  static_cast<int>(next(24)));
    tsv << id << "\t" << ts << "\tmath.CO\n";
  }
}

}  // namespace testutil
