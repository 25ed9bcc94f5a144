#include "gatforge/signature.hpp"

#include <sstream>
#include <stdexcept>

namespace gatforge {

std::optional<DeclId> Signature::lookup(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

DeclId Signature::push(Decl d) {
  if (by_name_.count(d.name)) throw std::logic_error("duplicate declaration name: " + d.name);
  DeclId id = static_cast<DeclId>(decls_.size());
  by_name_.emplace(d.name, id);
  decls_.push_back(std::move(d));
  return id;
}

std::string format_diags(const std::vector<Diag>& diags) {
  std::ostringstream os;
  for (const Diag& d : diags) {
    if (d.line > 0) {
      os << d.line << ":" << d.col << ": ";
    }
    os << d.message << "\n";
  }
  return os.str();
}

}  // namespace gatforge
