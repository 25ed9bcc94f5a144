#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "gatforge/generalize.hpp"
#include "gatforge/oracle.hpp"
#include "gatforge/signature.hpp"
#include "gatforge/strictify.hpp"
#include "gatforge/unify.hpp"

namespace gatforge::cli {

// A problem file: a signature section (inline or by reference) followed by
// problem blocks. Unknown block tags are errors.
struct RawBlock {
  std::string tag;
  int line = 0;
  // key -> (text, line); insertion order preserved for diagnostics
  std::vector<std::pair<std::string, std::pair<std::string, int>>> fields;

  const std::string* find(const std::string& key) const;
  int line_of(const std::string& key) const;
};

struct ProblemFile {
  Signature sig;
  std::string sig_text;
  std::vector<RawBlock> blocks;
};

std::variant<ProblemFile, std::vector<Diag>> parse_problem_file(const std::string& text,
                                                                const std::string& base_dir);

struct Flags {
  int depth = 3;
  int ctx_len = 3;
  long max_results = 2000;
  int probe = 20;
  std::uint64_t seed = 0;
  std::string format = "text";  // "text" | "json"
  std::string out_path;         // empty = stdout

  EnumBudget budget() const { return EnumBudget{depth, ctx_len, max_results}; }
};

// Exit codes: 0 success, 1 input error, 2 property violation, 3 budget
// exhaustion without a verdict.
struct Outcome {
  int exit_code = 0;
  std::string report;  // in the requested format
};

// command: check | unify | generalize | strictify-id | verify.
// source is the file content; base_dir resolves `signature file` references.
Outcome run_on_text(const std::string& command, const std::string& source,
                    const std::string& base_dir, const Flags& flags);

// Reads the file and delegates to run_on_text.
Outcome run(const std::string& command, const std::string& path, const Flags& flags);

}  // namespace gatforge::cli
