#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "gatforge/generalize.hpp"
#include "gatforge/signature.hpp"
#include "gatforge/syntax.hpp"
#include "gatforge/text.hpp"

namespace gatforge {

// An introduction context: a type with a distinguished element over a closed
// context.
struct IdIntro {
  Telescope gamma;
  Type type;
  Term elem;
};

// An elimination context over an introduction context: a context delta mapped
// into gamma, a motive over delta.(y : A[gamma_map]).(p : Id(gamma_map, y)),
// and a base case d over delta at (x[gamma_map], refl).
struct IdElim {
  IdIntro intro;
  Telescope delta;
  Subst gamma_map;  // delta -> intro.gamma
  Type motive;
  Term base_case;
};

struct IdSymbols {
  DeclId id_sym, refl_sym;
};
struct ElimSymbols {
  DeclId j_sym, jbeta_sym;
};

// A weakly stable weak identity structure: one identity type, reflexivity,
// eliminator, and computation witness per context, with no naturality
// demanded across contexts. The strictified operations consume only this
// surface, so externally supplied structures plug in alongside the free one.
class WeakIdStructure {
 public:
  virtual ~WeakIdStructure() = default;
  virtual const Signature& signature() const = 0;
  // over intro.gamma.(y : A)
  virtual Type id_type(const IdIntro& intro) = 0;
  // over intro.gamma
  virtual Term refl_term(const IdIntro& intro) = 0;
  // over elim.delta.(y : A[gamma_map]).(p : Id)
  virtual Term j_term(const IdElim& elim) = 0;
  // over elim.delta
  virtual Term jbeta_term(const IdElim& elim) = 0;
};

// Realizes a weakly stable weak identity structure by freely adjoining one
// generating symbol family per distinct context, memoized on the canonical
// printed form of the context. Minting is a read-modify-write: concurrent use
// must be serialized externally; a frozen table is safe to share.
class IdStructureTable final : public WeakIdStructure {
 public:
  explicit IdStructureTable(Signature base);

  const Signature& signature() const override { return sig_; }
  std::size_t base_size() const { return base_size_; }
  std::size_t minted_count() const { return sig_.size() - base_size_; }

  // Symbol minting/memoization. ws_elim requires its introduction context to
  // be registered already and throws std::invalid_argument otherwise.
  IdSymbols ws_id_symbols(const IdIntro& intro);
  ElimSymbols ws_elim_symbols(const IdElim& elim);
  bool intro_registered(const IdIntro& intro) const;
  // The introduction context a minted identity sort was minted at.
  const IdIntro* minted_intro(DeclId id_sym) const;

  // The memoized symbols applied to the ambient variables.
  Type ws_id(const IdIntro& intro);    // over gamma.(y : A)
  Term ws_refl(const IdIntro& intro);  // over gamma
  Term ws_j(const IdElim& elim);       // over delta.(y : A[g]).(p : Id)
  Term ws_jbeta(const IdElim& elim);   // over delta

  Type id_type(const IdIntro& intro) override { return ws_id(intro); }
  Term refl_term(const IdIntro& intro) override { return ws_refl(intro); }
  Term j_term(const IdElim& elim) override { return ws_j(elim); }
  Term jbeta_term(const IdElim& elim) override { return ws_jbeta(elim); }

  // Display names for minted symbols, assigned after sorting the memo keys,
  // so two runs minting the same set of symbols in different orders serialize
  // identically.
  DeclNamer canonical_namer() const;
  // Minted declarations only, topologically ordered with the canonical-key
  // tie-break, printed with canonical names.
  std::string serialize_minted() const;

 private:
  std::string intro_key(const IdIntro& intro) const;
  std::string elim_key(const IdElim& elim) const;
  std::string token(DeclId id) const;
  void validate_intro(const IdIntro& intro) const;
  void validate_elim(const IdElim& elim, const IdSymbols& isyms) const;
  std::unordered_map<DeclId, std::string> assign_canonical_names() const;

  Signature sig_;
  std::size_t base_size_;
  std::map<std::string, IdSymbols> intro_memo_;
  std::map<std::string, ElimSymbols> elim_memo_;
  std::unordered_map<DeclId, std::string> minted_token_;
  std::unordered_map<DeclId, IdIntro> minted_intro_;
};

// The strictly stable structure derived by evaluating the table at generic
// contexts computed by mgg_polysort.
class StrictIdTypes {
 public:
  // Default realization: the free fresh-symbol table over the given base.
  explicit StrictIdTypes(Signature base)
      : table_(std::make_unique<IdStructureTable>(std::move(base))),
        provider_(table_.get()) {}
  // Externally supplied weakly stable structure; must outlive this object.
  explicit StrictIdTypes(WeakIdStructure& provider) : provider_(&provider) {}

  // The free table, when this structure owns one.
  IdStructureTable& table() { return *table_; }
  const IdStructureTable& table() const { return *table_; }
  bool owns_table() const { return table_ != nullptr; }
  const Signature& signature() const { return provider_->signature(); }

  // Inputs are validated against the current extended signature; failures
  // throw std::invalid_argument.
  Type strict_id(const Telescope& gamma, const Type& type, const Term& from, const Term& to);
  Term strict_refl(const Telescope& gamma, const Type& type, const Term& elem);
  Term strict_j(const Telescope& gamma, const Type& type, const Term& elem, const Type& motive,
                const Term& base_case, const Term& to, const Term& path);
  Term strict_jbeta(const Telescope& gamma, const Type& type, const Term& elem,
                    const Type& motive, const Term& base_case);

  // The context over which a motive for (gamma, type, elem) lives:
  // gamma.(y : type).(p : strict_id(type, elem, y)). Minting may occur.
  Telescope motive_context(const Telescope& gamma, const Type& type, const Term& elem);

  static PolySort id_polysort();
  PolySort j_polysort();

 private:
  struct JParts {
    Telescope gamma1;
    Subst g;  // Gamma -> Gamma1
    IdElim elim;
  };
  JParts j_parts(const Telescope& gamma, const Type& type, const Term& elem, const Type& motive,
                 const Term& base_case);

  std::unique_ptr<IdStructureTable> table_;
  WeakIdStructure* provider_;
};

}  // namespace gatforge
