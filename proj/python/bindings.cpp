#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gatforge/cli.hpp"
#include "gatforge/generalize.hpp"
#include "gatforge/oracle.hpp"
#include "gatforge/strictify.hpp"
#include "gatforge/text.hpp"
#include "gatforge/typecheck.hpp"
#include "gatforge/unify.hpp"

namespace py = pybind11;
using namespace gatforge;

namespace {

Signature parse_signature_or_throw(const std::string& text) {
  auto r = parse_signature(text);
  if (auto* errs = std::get_if<std::vector<Diag>>(&r))
    throw py::value_error(format_diags(*errs));
  Signature sig = std::move(std::get<Signature>(r));
  auto verrs = validate_signature(sig);
  if (!verrs.empty()) throw py::value_error(format_diags(verrs));
  return sig;
}

Scope scope_for(const Telescope& ctx) { return default_scope(ctx.size()); }

Term parse_term_py(const Signature& sig, const Telescope& ctx, const std::string& text) {
  auto r = parse_term(sig, scope_for(ctx), text);
  if (auto* d = std::get_if<Diag>(&r)) throw py::value_error(d->message);
  Term t = std::get<Term>(r);
  auto inferred = infer_term(sig, ctx, t);
  if (auto* e = std::get_if<TypeError>(&inferred)) throw py::value_error(e->message);
  return t;
}

Type parse_type_py(const Signature& sig, const Telescope& ctx, const std::string& text) {
  auto r = parse_type(sig, scope_for(ctx), text);
  if (auto* d = std::get_if<Diag>(&r)) throw py::value_error(d->message);
  Type t = std::get<Type>(r);
  if (auto e = check_type(sig, ctx, t)) throw py::value_error(e->message);
  return t;
}

Telescope parse_telescope_py(const Signature& sig, const std::string& text) {
  Scope scope;
  auto r = parse_telescope(sig, scope, text);
  if (auto* d = std::get_if<Diag>(&r)) throw py::value_error(d->message);
  Telescope t = std::get<Telescope>(r);
  if (auto e = check_telescope(sig, t)) throw py::value_error(e->message);
  return t;
}

Subst make_subst(std::size_t src_size, TermVec terms) {
  Subst s;
  s.src_size = src_size;
  s.terms = std::move(terms);
  return s;
}

py::dict mgu_py(const Signature& sig, const UnifProblem& p) {
  MguResult r = mgu(sig, p);
  py::dict out;
  out["ok"] = r.ok();
  if (r.ok()) {
    out["omega"] = r.mgu().omega;
    out["rho"] = r.mgu().rho;
  } else {
    out["reason"] = to_string(r.reason());
  }
  return out;
}

py::dict gen_result_py(GenResult r) {
  py::dict out;
  out["gamma0"] = r.gamma0;
  out["rho0"] = r.rho0;
  out["factor"] = r.factor;
  if (auto* ty = std::get_if<Type>(&r.item0)) {
    out["item0"] = *ty;
  } else if (auto* tm = std::get_if<Term>(&r.item0)) {
    out["item0"] = *tm;
  } else {
    out["item0"] = std::get<Subst>(r.item0);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "kernel for freely generated dependent type theories";

  py::class_<Term>(m, "Term")
      .def("__eq__", [](const Term& a, const Term& b) { return a == b; })
      .def("is_var", &Term::is_var)
      .def("__repr__", [](const Term& t) {
        return t.is_var() ? "<Term var " + std::to_string(t.var()) + ">" : "<Term app>";
      });

  py::class_<Type>(m, "Type")
      .def("__eq__", [](const Type& a, const Type& b) { return a == b; })
      .def("__repr__", [](const Type&) { return "<Type>"; });

  py::class_<Telescope>(m, "Telescope")
      .def("__eq__", [](const Telescope& a, const Telescope& b) { return a == b; })
      .def("__len__", &Telescope::size)
      .def("__repr__",
           [](const Telescope& t) { return "<Telescope n=" + std::to_string(t.size()) + ">"; });

  py::class_<Subst>(m, "Subst")
      .def("__eq__", [](const Subst& a, const Subst& b) { return a == b; })
      .def("__len__", [](const Subst& s) { return s.terms.size(); })
      .def_readonly("terms", &Subst::terms)
      .def("is_identity", &Subst::is_identity)
      .def("__repr__",
           [](const Subst& s) { return "<Subst n=" + std::to_string(s.terms.size()) + ">"; });

  py::class_<Signature>(m, "Signature")
      .def("__len__", &Signature::size)
      .def("lookup",
           [](const Signature& sig, const std::string& name) -> py::object {
             auto id = sig.lookup(name);
             if (!id) return py::none();
             const Decl& d = sig[*id];
             py::dict out;
             out["name"] = d.name;
             out["kind"] = d.kind == DeclKind::SortFormer ? "sort" : "fun";
             out["boundary"] = print_telescope(sig, d.boundary);
             if (d.output_type) out["output"] = print_type(sig, *d.output_type);
             return out;
           })
      .def("__repr__",
           [](const Signature& s) { return "<Signature n=" + std::to_string(s.size()) + ">"; });

  m.def("parse_signature", &parse_signature_or_throw, py::arg("text"),
        "parse and validate a signature; raises ValueError on errors");
  m.def("print_signature", &print_signature);
  m.def("parse_term", &parse_term_py, py::arg("sig"), py::arg("ctx"), py::arg("text"),
        "parse and typecheck a term over a context (display names v0, v1, ...)");
  m.def("parse_type", &parse_type_py);
  m.def("parse_telescope", &parse_telescope_py);
  m.def("print_term",
        [](const Signature& sig, const Term& t) { return print_term(sig, t); });
  m.def("print_type",
        [](const Signature& sig, const Type& t) { return print_type(sig, t); });
  m.def("print_telescope",
        [](const Signature& sig, const Telescope& t) { return print_telescope(sig, t); });
  m.def("print_subst",
        [](const Signature& sig, const Subst& s) { return print_subst(sig, s); });

  m.def("infer_type", [](const Signature& sig, const Telescope& ctx, const Term& t) {
    auto r = infer_term(sig, ctx, t);
    if (auto* e = std::get_if<TypeError>(&r)) throw py::value_error(e->message);
    return std::get<Type>(r);
  });
  m.def("subst", &make_subst, py::arg("src_size"), py::arg("terms"));
  m.def("identity_subst", &Subst::identity);
  m.def("apply_subst_term",
        [](const Term& t, const Subst& s) { return apply_subst(t, s); });
  m.def("apply_subst_type",
        [](const Type& t, const Subst& s) { return apply_subst(t, s); });
  m.def("compose_subst", &compose);

  m.def(
      "unify_terms",
      [](const Signature& sig, const Telescope& ctx, std::size_t flex_len, const Type& type,
         const Term& lhs, const Term& rhs) {
        UnifProblem p;
        p.ctx = ctx;
        p.flex_len = flex_len;
        p.pair = UnifProblem::TermPair{type, lhs, rhs};
        return mgu_py(sig, p);
      },
      py::arg("sig"), py::arg("ctx"), py::arg("flex_len"), py::arg("type"), py::arg("lhs"),
      py::arg("rhs"));
  m.def("unify_types", [](const Signature& sig, const Telescope& ctx, std::size_t flex_len,
                          const Type& lhs, const Type& rhs) {
    UnifProblem p;
    p.ctx = ctx;
    p.flex_len = flex_len;
    p.pair = UnifProblem::TypePair{lhs, rhs};
    return mgu_py(sig, p);
  });

  m.def(
      "generalize_type",
      [](const Signature& sig, const Telescope& omega, const Telescope& delta,
         const Telescope& gamma, const Subst& rho, const Type& item) {
        GenProblem p;
        p.omega = omega;
        p.delta = delta;
        p.gamma = gamma;
        p.rho = rho;
        p.item = GenProblem::TypeItem{item};
        return gen_result_py(mgg(sig, p));
      },
      py::arg("sig"), py::arg("omega"), py::arg("delta"), py::arg("gamma"), py::arg("rho"),
      py::arg("item"));
  m.def("generalize_term",
        [](const Signature& sig, const Telescope& omega, const Telescope& delta,
           const Telescope& gamma, const Subst& rho, const Type& ambient, const Term& item) {
          GenProblem p;
          p.omega = omega;
          p.delta = delta;
          p.gamma = gamma;
          p.rho = rho;
          p.item = GenProblem::TermItem{ambient, item};
          return gen_result_py(mgg(sig, p));
        });

  py::class_<StrictIdTypes>(m, "StrictIdTypes")
      .def(py::init([](const Signature& sig) { return StrictIdTypes(sig); }))
      .def("strict_id", &StrictIdTypes::strict_id, py::arg("gamma"), py::arg("type"),
           py::arg("from_"), py::arg("to"))
      .def("strict_refl", &StrictIdTypes::strict_refl)
      .def("strict_j", &StrictIdTypes::strict_j)
      .def("strict_jbeta", &StrictIdTypes::strict_jbeta)
      .def("motive_context", &StrictIdTypes::motive_context)
      .def("minted_text", [](const StrictIdTypes& s) { return s.table().serialize_minted(); })
      .def("minted_count", [](const StrictIdTypes& s) { return s.table().minted_count(); })
      .def("print_term",
           [](const StrictIdTypes& s, const Term& t) {
             return print_term(s.signature(), t, s.table().canonical_namer());
           })
      .def("print_type", [](const StrictIdTypes& s, const Type& t) {
        return print_type(s.signature(), t, s.table().canonical_namer());
      });

  m.def(
      "enumerate_terms",
      [](const Signature& sig, const Telescope& ctx, const Type& type, int depth, int ctx_len,
         long max_results) {
        EnumBudget b{depth, ctx_len, max_results};
        TermEnum e = enumerate_terms(sig, ctx, type, b);
        return py::make_tuple(e.terms, e.truncated);
      },
      py::arg("sig"), py::arg("ctx"), py::arg("type"), py::arg("depth") = 3,
      py::arg("ctx_len") = 3, py::arg("max_results") = 2000);

  m.def(
      "run",
      [](const std::string& command, const std::string& source, const std::string& base_dir,
         int depth, int ctx_len, long max_results, int probe, std::uint64_t seed,
         const std::string& format) {
        cli::Flags flags;
        flags.depth = depth;
        flags.ctx_len = ctx_len;
        flags.max_results = max_results;
        flags.probe = probe;
        flags.seed = seed;
        flags.format = format;
        cli::Outcome out = cli::run_on_text(command, source, base_dir, flags);
        return py::make_tuple(out.exit_code, out.report);
      },
      py::arg("command"), py::arg("source"), py::arg("base_dir") = ".", py::arg("depth") = 3,
      py::arg("ctx_len") = 3, py::arg("max_results") = 2000, py::arg("probe") = 20,
      py::arg("seed") = 0, py::arg("format") = "text",
      "run a CLI command on problem file text; returns (exit_code, report)");
}
