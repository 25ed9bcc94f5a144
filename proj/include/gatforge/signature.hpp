#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gatforge/syntax.hpp"

namespace gatforge {

enum class DeclKind { SortFormer, TermFormer };

// A generating sort-former or term-former. The boundary is a closed telescope
// over the prefix of the signature; the output type (term-formers only) is
// well-formed over the boundary.
struct Decl {
  std::string name;
  DeclKind kind = DeclKind::SortFormer;
  Telescope boundary;
  std::optional<Type> output_type;
  // Binder display names from the source text, one per boundary entry; kept
  // for diagnostics only, never consulted by structural equality.
  std::vector<std::string> binder_names;
  int line = 0;  // source line, 0 when synthesized
};

// A stratified list of declarations: each depends only on its predecessors.
// Immutable after validation; extension always copies.
class Signature {
 public:
  Signature() = default;

  std::size_t size() const { return decls_.size(); }
  const Decl& operator[](DeclId id) const { return decls_[id]; }
  const std::vector<Decl>& decls() const { return decls_; }

  std::optional<DeclId> lookup(const std::string& name) const;

  // Appends one declaration; the caller is responsible for it being a valid
  // cellular extension (validate_signature checks). Duplicate names throw.
  DeclId push(Decl d);

 private:
  std::vector<Decl> decls_;
  std::unordered_map<std::string, DeclId> by_name_;
};

struct Diag {
  int line = 0;
  int col = 0;
  std::string message;
};

std::string format_diags(const std::vector<Diag>& diags);

}  // namespace gatforge
