#include "gatforge/cli.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gatforge/text.hpp"
#include "gatforge/typecheck.hpp"

namespace gatforge::cli {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip_comment(const std::string& line) {
  std::size_t pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

const std::string* RawBlock::find(const std::string& key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return &v.first;
  return nullptr;
}

int RawBlock::line_of(const std::string& key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return v.second;
  return line;
}

std::variant<ProblemFile, std::vector<Diag>> parse_problem_file(const std::string& text,
                                                                const std::string& base_dir) {
  std::vector<Diag> diags;
  ProblemFile out;
  bool have_sig = false;

  std::vector<std::string> lines = split_lines(text);
  std::size_t i = 0;
  const std::size_t n = lines.size();

  static const std::vector<std::string> known_tags = {"unify", "generalize", "strictify-id"};

  while (i < n) {
    std::string line = trim(strip_comment(lines[i]));
    int lineno = static_cast<int>(i) + 1;
    if (line.empty()) {
      ++i;
      continue;
    }

    if (line.rfind("signature", 0) == 0) {
      std::string rest = trim(line.substr(9));
      if (rest == "{") {
        std::string body;
        ++i;
        int body_first = static_cast<int>(i) + 1;
        while (i < n && trim(strip_comment(lines[i])) != "}") {
          body += lines[i];
          body += "\n";
          ++i;
        }
        if (i == n) {
          diags.push_back({lineno, 1, "unterminated signature section"});
          break;
        }
        ++i;  // consume '}'
        out.sig_text = body;
        auto parsed = parse_signature(body);
        if (auto* errs = std::get_if<std::vector<Diag>>(&parsed)) {
          for (Diag d : *errs) {
            d.line += body_first - 1;
            diags.push_back(d);
          }
        } else {
          out.sig = std::move(std::get<Signature>(parsed));
          have_sig = true;
        }
        continue;
      }
      if (rest.rfind("file", 0) == 0) {
        std::string path = trim(rest.substr(4));
        if (!path.empty() && path.front() == '"' && path.back() == '"' && path.size() >= 2)
          path = path.substr(1, path.size() - 2);
        std::string full = path;
        if (!base_dir.empty() && !path.empty() && path.front() != '/')
          full = base_dir + "/" + path;
        std::ifstream in(full);
        if (!in) {
          diags.push_back({lineno, 1, "cannot open signature file '" + full + "'"});
          ++i;
          continue;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        out.sig_text = ss.str();
        auto parsed = parse_signature(out.sig_text);
        if (auto* errs = std::get_if<std::vector<Diag>>(&parsed)) {
          for (const Diag& d : *errs)
            diags.push_back({lineno, 1, path + ":" + std::to_string(d.line) + ":" +
                                            std::to_string(d.col) + ": " + d.message});
        } else {
          out.sig = std::move(std::get<Signature>(parsed));
          have_sig = true;
        }
        ++i;
        continue;
      }
      diags.push_back({lineno, 1, "expected 'signature {' or 'signature file <path>'"});
      ++i;
      continue;
    }

    // A problem block: "<tag> {".
    std::string tag;
    {
      std::size_t sp = line.find_first_of(" \t");
      tag = sp == std::string::npos ? line : line.substr(0, sp);
      std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp));
      bool known = false;
      for (const auto& t : known_tags) known = known || t == tag;
      if (!known) {
        diags.push_back({lineno, 1, "unknown block tag '" + tag + "'"});
        // Skip the block body if one follows.
        if (rest == "{" || line.back() == '{') {
          ++i;
          while (i < n && trim(strip_comment(lines[i])) != "}") ++i;
          if (i < n) ++i;
        } else {
          ++i;
        }
        continue;
      }
      if (rest != "{") {
        diags.push_back({lineno, 1, "expected '{' after '" + tag + "'"});
        ++i;
        continue;
      }
    }

    RawBlock block;
    block.tag = tag;
    block.line = lineno;
    ++i;
    while (i < n) {
      std::string body_line = trim(strip_comment(lines[i]));
      int body_lineno = static_cast<int>(i) + 1;
      if (body_line == "}") {
        ++i;
        break;
      }
      if (i == n - 1 && body_line != "}") {
        diags.push_back({lineno, 1, "unterminated '" + tag + "' block"});
        ++i;
        break;
      }
      if (!body_line.empty()) {
        std::size_t sp = body_line.find_first_of(" \t");
        std::string key = sp == std::string::npos ? body_line : body_line.substr(0, sp);
        std::string val = sp == std::string::npos ? "" : trim(body_line.substr(sp));
        if (block.find(key)) {
          diags.push_back({body_lineno, 1, "duplicate field '" + key + "'"});
        } else {
          block.fields.emplace_back(key, std::make_pair(val, body_lineno));
        }
      }
      ++i;
    }
    out.blocks.push_back(std::move(block));
  }

  if (!have_sig && diags.empty())
    diags.push_back({1, 1, "problem file has no signature section"});
  if (!diags.empty()) return diags;

  std::vector<Diag> verrs = validate_signature(out.sig);
  if (!verrs.empty()) return verrs;
  return out;
}

// ---------------------------------------------------------------------------
// Report assembly

namespace {

struct Section {
  std::string tag;
  int index = 0;  // 0 = unnumbered
  std::string kind;
  std::vector<std::pair<std::string, std::string>> fields;
  std::vector<std::string> lines;
};

struct Report {
  std::string command;
  Flags flags;
  std::vector<Section> sections;
};

std::string emit_text(const Report& r) {
  std::ostringstream os;
  os << "command " << r.command << "\n";
  os << "seed " << r.flags.seed << "\n";
  os << "budget depth " << r.flags.depth << " ctx-len " << r.flags.ctx_len << " max "
     << r.flags.max_results << "\n";
  for (const Section& s : r.sections) {
    os << "\n== " << s.tag;
    if (s.index > 0) os << " #" << s.index;
    if (!s.kind.empty()) os << ": " << s.kind;
    os << "\n";
    for (const auto& [k, v] : s.fields) os << k << " " << v << "\n";
    for (const std::string& l : s.lines) os << l << "\n";
  }
  return os.str();
}

std::string emit_json(const Report& r) {
  json j;
  j["command"] = r.command;
  j["seed"] = r.flags.seed;
  j["budget"] = {{"depth", r.flags.depth}, {"ctx-len", r.flags.ctx_len},
                 {"max", r.flags.max_results}};
  j["sections"] = json::array();
  for (const Section& s : r.sections) {
    json js;
    js["tag"] = s.tag;
    if (s.index > 0) js["index"] = s.index;
    if (!s.kind.empty()) js["kind"] = s.kind;
    json fields = json::object();
    for (const auto& [k, v] : s.fields) fields[k] = v;
    js["fields"] = fields;
    if (!s.lines.empty()) js["lines"] = s.lines;
    j["sections"].push_back(js);
  }
  return j.dump(2) + "\n";
}

std::string emit_report(const Report& r) {
  return r.flags.format == "json" ? emit_json(r) : emit_text(r);
}

Section error_section(const std::vector<Diag>& diags) {
  Section s;
  s.tag = "error";
  for (const Diag& d : diags) {
    std::ostringstream os;
    if (d.line > 0) os << d.line << ":" << d.col << ": ";
    os << d.message;
    s.lines.push_back(os.str());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Block interpretation

struct BlockError {
  Diag diag;
};

class Interp {
 public:
  Interp(const Signature& sig) : sig_(sig) {}

  std::variant<Telescope, BlockError> tele_field(const RawBlock& b, const std::string& key,
                                                 Scope& scope) {
    const std::string* v = b.find(key);
    if (!v) return BlockError{{b.line, 1, "block is missing the '" + key + "' field"}};
    auto r = parse_telescope(sig_, scope, *v, b.line_of(key));
    if (auto* d = std::get_if<Diag>(&r)) return BlockError{*d};
    return std::get<Telescope>(r);
  }

  std::variant<Term, BlockError> term_field(const RawBlock& b, const std::string& key,
                                            const Scope& scope) {
    const std::string* v = b.find(key);
    if (!v) return BlockError{{b.line, 1, "block is missing the '" + key + "' field"}};
    auto r = parse_term(sig_, scope, *v, b.line_of(key));
    if (auto* d = std::get_if<Diag>(&r)) return BlockError{*d};
    return std::get<Term>(r);
  }

  std::variant<Type, BlockError> type_field(const RawBlock& b, const std::string& key,
                                            const Scope& scope) {
    const std::string* v = b.find(key);
    if (!v) return BlockError{{b.line, 1, "block is missing the '" + key + "' field"}};
    auto r = parse_type(sig_, scope, *v, b.line_of(key));
    if (auto* d = std::get_if<Diag>(&r)) return BlockError{*d};
    return std::get<Type>(r);
  }

  std::variant<TermVec, BlockError> list_field(const RawBlock& b, const std::string& key,
                                               const Scope& scope) {
    const std::string* v = b.find(key);
    if (!v) return BlockError{{b.line, 1, "block is missing the '" + key + "' field"}};
    auto r = parse_term_list(sig_, scope, *v, b.line_of(key));
    if (auto* d = std::get_if<Diag>(&r)) return BlockError{*d};
    return std::get<TermVec>(r);
  }

  BlockError type_error(const RawBlock& b, const std::string& key, const TypeError& err) {
    return BlockError{{b.line_of(key), 1, "in '" + key + "': " + err.message}};
  }

  const Signature& sig_;
};

#define FIELD_OR_RETURN(var, expr)                      \
  auto var##_r = (expr);                                \
  if (auto* _e = std::get_if<BlockError>(&var##_r)) return _e->diag; \
  auto& var = std::get<0>(var##_r);

std::variant<UnifProblem, Diag> build_unify(const Signature& sig, const RawBlock& b) {
  Interp in(sig);
  Scope scope;
  FIELD_OR_RETURN(flex, in.tele_field(b, "flex", scope));
  FIELD_OR_RETURN(rigid, in.tele_field(b, "rigid", scope));
  UnifProblem p;
  p.ctx = Telescope::concat(flex, rigid);
  p.flex_len = flex.size();
  if (auto err = check_telescope(sig, p.ctx)) return in.type_error(b, "flex", *err).diag;

  const std::string* kind = b.find("kind");
  if (!kind) return Diag{b.line, 1, "block is missing the 'kind' field"};
  if (*kind == "term") {
    FIELD_OR_RETURN(type, in.type_field(b, "type", scope));
    if (auto err = check_type(sig, p.ctx, type)) return in.type_error(b, "type", *err).diag;
    FIELD_OR_RETURN(lhs, in.term_field(b, "lhs", scope));
    FIELD_OR_RETURN(rhs, in.term_field(b, "rhs", scope));
    if (auto err = check_term(sig, p.ctx, lhs, type)) return in.type_error(b, "lhs", *err).diag;
    if (auto err = check_term(sig, p.ctx, rhs, type)) return in.type_error(b, "rhs", *err).diag;
    p.pair = UnifProblem::TermPair{type, lhs, rhs};
  } else if (*kind == "type") {
    FIELD_OR_RETURN(lhs, in.type_field(b, "lhs", scope));
    FIELD_OR_RETURN(rhs, in.type_field(b, "rhs", scope));
    if (auto err = check_type(sig, p.ctx, lhs)) return in.type_error(b, "lhs", *err).diag;
    if (auto err = check_type(sig, p.ctx, rhs)) return in.type_error(b, "rhs", *err).diag;
    p.pair = UnifProblem::TypePair{lhs, rhs};
  } else if (*kind == "subst") {
    Scope tscope;
    FIELD_OR_RETURN(target, in.tele_field(b, "target", tscope));
    if (auto err = check_telescope(sig, target)) return in.type_error(b, "target", *err).diag;
    FIELD_OR_RETURN(lhs_l, in.list_field(b, "lhs", scope));
    FIELD_OR_RETURN(rhs_l, in.list_field(b, "rhs", scope));
    Subst lhs{p.ctx.size(), lhs_l}, rhs{p.ctx.size(), rhs_l};
    if (auto err = check_subst(sig, p.ctx, lhs, target)) return in.type_error(b, "lhs", *err).diag;
    if (auto err = check_subst(sig, p.ctx, rhs, target)) return in.type_error(b, "rhs", *err).diag;
    p.pair = UnifProblem::SubstPair{target, lhs, rhs};
  } else {
    return Diag{b.line_of("kind"), 1, "unknown kind '" + *kind + "'"};
  }
  return p;
}

std::variant<GenProblem, Diag> build_generalize(const Signature& sig, const RawBlock& b) {
  Interp in(sig);
  Scope oscope;
  FIELD_OR_RETURN(omega, in.tele_field(b, "omega", oscope));
  FIELD_OR_RETURN(delta, in.tele_field(b, "delta", oscope));
  Scope gscope;
  FIELD_OR_RETURN(gamma, in.tele_field(b, "gamma", gscope));
  FIELD_OR_RETURN(rho_l, in.list_field(b, "rho", gscope));

  GenProblem p;
  p.omega = omega;
  p.delta = delta;
  p.gamma = gamma;
  p.rho = Subst{gamma.size(), rho_l};

  Telescope omega_delta = Telescope::concat(omega, delta);
  if (auto err = check_telescope(sig, omega_delta)) return in.type_error(b, "omega", *err).diag;
  if (auto err = check_telescope(sig, gamma)) return in.type_error(b, "gamma", *err).diag;
  if (auto err = check_subst(sig, gamma, p.rho, omega)) return in.type_error(b, "rho", *err).diag;

  Telescope delta_rho = apply_subst_telescope(delta, p.rho);
  Telescope item_ctx = Telescope::concat(gamma, delta_rho);
  Scope iscope = gscope;
  for (std::size_t i = omega.size(); i < oscope.names.size(); ++i) iscope.push(oscope.names[i]);

  const std::string* kind = b.find("kind");
  if (!kind) return Diag{b.line, 1, "block is missing the 'kind' field"};
  if (*kind == "type") {
    FIELD_OR_RETURN(item, in.type_field(b, "item", iscope));
    if (auto err = check_type(sig, item_ctx, item)) return in.type_error(b, "item", *err).diag;
    p.item = GenProblem::TypeItem{item};
  } else if (*kind == "term") {
    FIELD_OR_RETURN(ambient, in.type_field(b, "ambient", oscope));
    if (auto err = check_type(sig, omega_delta, ambient))
      return in.type_error(b, "ambient", *err).diag;
    FIELD_OR_RETURN(item, in.term_field(b, "item", iscope));
    Type expected = apply_subst(ambient, extend(p.rho, delta.size()));
    if (auto err = check_term(sig, item_ctx, item, expected))
      return in.type_error(b, "item", *err).diag;
    p.item = GenProblem::TermItem{ambient, item};
  } else if (*kind == "subst") {
    Scope tscope;
    FIELD_OR_RETURN(target, in.tele_field(b, "target", tscope));
    if (auto err = check_telescope(sig, target)) return in.type_error(b, "target", *err).diag;
    FIELD_OR_RETURN(item_l, in.list_field(b, "item", iscope));
    Subst item{item_ctx.size(), item_l};
    if (auto err = check_subst(sig, item_ctx, item, target))
      return in.type_error(b, "item", *err).diag;
    p.item = GenProblem::SubstItem{target, item};
  } else {
    return Diag{b.line_of("kind"), 1, "unknown kind '" + *kind + "'"};
  }
  return p;
}

struct StrictQuery {
  std::string op;
  Telescope gamma;
  Type type;
  Term elem;
  std::optional<Term> to;          // id
  std::optional<Type> motive;      // j, jbeta
  std::optional<Term> base_case;   // j, jbeta
  std::optional<Term> yterm;       // j
  std::optional<std::string> pterm_text;  // j; "refl" or a term
  std::optional<Term> path;        // j; resolved at execution
  int pterm_line = 0;
  Scope gscope;
  int line = 0;
};

std::variant<StrictQuery, Diag> build_strict(const Signature& sig, const RawBlock& b) {
  Interp in(sig);
  StrictQuery q;
  q.line = b.line;
  Scope gscope;
  FIELD_OR_RETURN(gamma, in.tele_field(b, "gamma", gscope));
  q.gamma = gamma;
  if (auto err = check_telescope(sig, q.gamma)) return in.type_error(b, "gamma", *err).diag;
  const std::string* op = b.find("op");
  if (!op) return Diag{b.line, 1, "block is missing the 'op' field"};
  q.op = *op;
  FIELD_OR_RETURN(type, in.type_field(b, "A", gscope));
  q.type = type;
  if (auto err = check_type(sig, q.gamma, q.type)) return in.type_error(b, "A", *err).diag;
  FIELD_OR_RETURN(elem, in.term_field(b, "x", gscope));
  q.elem = elem;
  if (auto err = check_term(sig, q.gamma, q.elem, q.type))
    return in.type_error(b, "x", *err).diag;

  if (q.op == "id") {
    FIELD_OR_RETURN(to, in.term_field(b, "y", gscope));
    if (auto err = check_term(sig, q.gamma, to, q.type)) return in.type_error(b, "y", *err).diag;
    q.to = to;
  } else if (q.op == "refl") {
    // nothing more
  } else if (q.op == "j" || q.op == "jbeta") {
    const std::string* ptext = b.find("P");
    if (!ptext) return Diag{b.line, 1, "block is missing the 'P' field"};
    // "P (yname pname) <type>": binder names for the two extra slots.
    std::string text = *ptext;
    std::string yname = "y", pname = "p";
    std::string body = text;
    std::size_t open = text.find('(');
    if (open == 0) {
      std::size_t close = text.find(')');
      if (close == std::string::npos)
        return Diag{b.line_of("P"), 1, "expected '(yname pname)' before the motive"};
      std::istringstream names(text.substr(1, close - 1));
      names >> yname >> pname;
      if (yname.empty() || pname.empty())
        return Diag{b.line_of("P"), 1, "expected two binder names"};
      body = trim(text.substr(close + 1));
    }
    Scope pscope = gscope;
    pscope.push(yname);
    pscope.push(pname);
    auto pr = parse_type(sig, pscope, body, b.line_of("P"));
    if (auto* d = std::get_if<Diag>(&pr)) return *d;
    q.motive = std::get<Type>(pr);
    FIELD_OR_RETURN(d, in.term_field(b, "d", gscope));
    q.base_case = d;
    if (q.op == "j") {
      FIELD_OR_RETURN(yterm, in.term_field(b, "yterm", gscope));
      if (auto err = check_term(sig, q.gamma, yterm, q.type))
        return in.type_error(b, "yterm", *err).diag;
      q.yterm = yterm;
      const std::string* pterm = b.find("pterm");
      if (!pterm) return Diag{b.line, 1, "block is missing the 'pterm' field"};
      q.pterm_text = *pterm;
      q.pterm_line = b.line_of("pterm");
    }
  } else {
    return Diag{b.line_of("op"), 1, "unknown op '" + q.op + "'"};
  }
  q.gscope = gscope;
  return q;
}

#undef FIELD_OR_RETURN

// ---------------------------------------------------------------------------
// Probe sampling: seeded, drawn from bounded enumeration over the user
// signature.

class ProbeSampler {
 public:
  ProbeSampler(const Signature& sig, const EnumBudget& budget, std::uint64_t seed)
      : sig_(sig), budget_(budget), eng_(seed ^ 0x9e3779b97f4a7c15ULL) {
    // Draws sample from the enumeration prefix; a few hundred options are
    // plenty and keep uninhabited entry types cheap to detect.
    budget_.max_results = std::min<long>(budget_.max_results, 64);
    contexts_ = enumerate_contexts(sig, budget_).contexts;
  }

  // sigma : Lambda -> gamma; nullopt when sampling fails within the attempt
  // bound (for instance when some entry type has no inhabitants).
  std::optional<std::pair<Telescope, Subst>> sample(const Telescope& gamma) {
    for (int attempt = 0; attempt < 12; ++attempt) {
      const Telescope& lambda = contexts_[eng_() % contexts_.size()];
      Subst sub;
      sub.src_size = lambda.size();
      bool ok = true;
      for (std::size_t i = 0; i < gamma.size() && ok; ++i) {
        Subst pre;
        pre.src_size = lambda.size();
        pre.terms = sub.terms;
        Type expected = apply_subst(gamma.entries[i], pre);
        TermEnum options = enumerate_terms(sig_, lambda, expected, budget_);
        if (options.terms.empty()) {
          ok = false;
          break;
        }
        sub.terms.push_back(options.terms[eng_() % options.terms.size()]);
      }
      if (ok) return std::make_pair(lambda, sub);
    }
    return std::nullopt;
  }

 private:
  const Signature& sig_;
  EnumBudget budget_;
  std::mt19937_64 eng_;
  std::vector<Telescope> contexts_;
};

// ---------------------------------------------------------------------------
// Command runners

int run_unify(const Signature& sig, const std::vector<RawBlock>& blocks, Report& rep) {
  int idx = 0;
  for (const RawBlock& b : blocks) {
    if (b.tag != "unify") continue;
    ++idx;
    Section s;
    s.tag = "unify";
    s.index = idx;
    auto built = build_unify(sig, b);
    if (auto* d = std::get_if<Diag>(&built)) {
      rep.sections.push_back(error_section({*d}));
      return 1;
    }
    const UnifProblem& p = std::get<UnifProblem>(built);
    s.kind = *b.find("kind");
    MguResult r = mgu(sig, p);
    if (r.ok()) {
      s.fields.emplace_back("result", "mgu");
      s.fields.emplace_back("omega", print_telescope(sig, r.mgu().omega));
      s.fields.emplace_back("rho", print_subst(sig, r.mgu().rho));
    } else {
      s.fields.emplace_back("result", "no-unifier " + to_string(r.reason()));
    }
    rep.sections.push_back(std::move(s));
  }
  return 0;
}

int run_generalize(const Signature& sig, const std::vector<RawBlock>& blocks, Report& rep) {
  int idx = 0;
  for (const RawBlock& b : blocks) {
    if (b.tag != "generalize") continue;
    ++idx;
    Section s;
    s.tag = "generalize";
    s.index = idx;
    auto built = build_generalize(sig, b);
    if (auto* d = std::get_if<Diag>(&built)) {
      rep.sections.push_back(error_section({*d}));
      return 1;
    }
    const GenProblem& p = std::get<GenProblem>(built);
    s.kind = *b.find("kind");
    GenResult r = mgg(sig, p);
    s.fields.emplace_back("gamma0", print_telescope(sig, r.gamma0));
    s.fields.emplace_back("rho0", print_subst(sig, r.rho0));
    if (const auto* ty = std::get_if<Type>(&r.item0)) {
      s.fields.emplace_back("item0", print_type(sig, *ty));
    } else if (const auto* tm = std::get_if<Term>(&r.item0)) {
      s.fields.emplace_back("item0", print_term(sig, *tm));
    } else {
      s.fields.emplace_back("item0", print_subst(sig, std::get<Subst>(r.item0)));
    }
    s.fields.emplace_back("factor", print_subst(sig, r.factor));
    rep.sections.push_back(std::move(s));
  }
  return 0;
}

int run_strictify(const Signature& sig, const std::vector<RawBlock>& blocks, const Flags& flags,
                  Report& rep) {
  StrictIdTypes strict(sig);
  struct Ran {
    StrictQuery q;
    std::variant<Type, Term> result;
    std::optional<Type> inferred;
    Section section;
  };
  std::vector<Ran> ran;

  int idx = 0;
  for (const RawBlock& b : blocks) {
    if (b.tag != "strictify-id") continue;
    ++idx;
    Section s;
    s.tag = "strictify-id";
    s.index = idx;
    auto built = build_strict(sig, b);
    if (auto* d = std::get_if<Diag>(&built)) {
      rep.sections.push_back(error_section({*d}));
      return 1;
    }
    StrictQuery q = std::get<StrictQuery>(built);
    s.kind = q.op;

    try {
      if (q.op == "id") {
        Type r = strict.strict_id(q.gamma, q.type, q.elem, *q.to);
        ran.push_back({std::move(q), std::move(r), std::nullopt, std::move(s)});
      } else if (q.op == "refl") {
        Term r = strict.strict_refl(q.gamma, q.type, q.elem);
        auto ty = infer_term(strict.signature(), q.gamma, r);
        ran.push_back({std::move(q), std::move(r), std::get<Type>(ty), std::move(s)});
      } else {
        // Validate the motive and base case against the strictified context.
        Telescope mctx = strict.motive_context(q.gamma, q.type, q.elem);
        if (auto err = check_type(strict.signature(), mctx, *q.motive))
          throw std::invalid_argument("in 'P': " + err->message);
        TermVec at_refl;
        for (std::size_t i = 0; i < q.gamma.size(); ++i)
          at_refl.push_back(Term::var(static_cast<VarIdx>(i)));
        at_refl.push_back(q.elem);
        at_refl.push_back(strict.strict_refl(q.gamma, q.type, q.elem));
        Subst at_refl_s{q.gamma.size(), at_refl};
        Type d_expected = apply_subst(*q.motive, at_refl_s);
        if (auto err = check_term(strict.signature(), q.gamma, *q.base_case, d_expected))
          throw std::invalid_argument("in 'd': " + err->message);

        if (q.op == "jbeta") {
          Term r = strict.strict_jbeta(q.gamma, q.type, q.elem, *q.motive, *q.base_case);
          auto ty = infer_term(strict.signature(), q.gamma, r);
          ran.push_back({std::move(q), std::move(r), std::get<Type>(ty), std::move(s)});
        } else {
          Term p_term;
          if (*q.pterm_text == "refl") {
            p_term = strict.strict_refl(q.gamma, q.type, q.elem);
          } else {
            auto pr = parse_term(sig, q.gscope, *q.pterm_text, q.pterm_line);
            if (auto* d = std::get_if<Diag>(&pr))
              throw std::invalid_argument("in 'pterm': " + d->message);
            p_term = std::get<Term>(pr);
          }
          Type p_expected = strict.strict_id(q.gamma, q.type, q.elem, *q.yterm);
          if (auto err = check_term(strict.signature(), q.gamma, p_term, p_expected))
            throw std::invalid_argument("in 'pterm': " + err->message);
          Term r = strict.strict_j(q.gamma, q.type, q.elem, *q.motive, *q.base_case, *q.yterm,
                                   p_term);
          auto ty = infer_term(strict.signature(), q.gamma, r);
          q.path = p_term;
          ran.push_back({std::move(q), std::move(r), std::get<Type>(ty), std::move(s)});
        }
      }
    } catch (const std::invalid_argument& e) {
      rep.sections.push_back(error_section({Diag{q.line, 1, e.what()}}));
      return 1;
    }
  }

  // Stability probes: substitute-then-strictify must equal
  // strictify-then-substitute, and every output must typecheck. Probes run
  // before rendering so canonical names cover everything minted.
  long violations = 0, performed = 0, skipped = 0;
  if (flags.probe > 0 && !ran.empty()) {
    ProbeSampler sampler(sig, flags.budget(), flags.seed);
    for (const Ran& r : ran) {
      for (int k = 0; k < flags.probe; ++k) {
        auto drawn = sampler.sample(r.q.gamma);
        if (!drawn) {
          ++skipped;
          continue;
        }
        const auto& [lambda, sub] = *drawn;
        ++performed;
        bool ok = true;
        try {
          if (r.q.op == "id") {
            Type direct = strict.strict_id(lambda, apply_subst(r.q.type, sub),
                                           apply_subst(r.q.elem, sub), apply_subst(*r.q.to, sub));
            ok = direct == apply_subst(std::get<Type>(r.result), sub);
            if (ok) ok = check_type(strict.signature(), lambda, direct) == std::nullopt;
          } else if (r.q.op == "refl") {
            Term direct = strict.strict_refl(lambda, apply_subst(r.q.type, sub),
                                             apply_subst(r.q.elem, sub));
            ok = direct == apply_subst(std::get<Term>(r.result), sub);
            if (ok)
              ok = !std::holds_alternative<TypeError>(
                  infer_term(strict.signature(), lambda, direct));
          } else {
            Subst sub2 = extend(sub, 2);
            Type motive2 = apply_subst(*r.q.motive, sub2);
            Term d2 = apply_subst(*r.q.base_case, sub);
            if (r.q.op == "jbeta") {
              Term direct = strict.strict_jbeta(lambda, apply_subst(r.q.type, sub),
                                                apply_subst(r.q.elem, sub), motive2, d2);
              ok = direct == apply_subst(std::get<Term>(r.result), sub);
            } else {
              // The path argument transports along the substitution; the
              // stable structure keeps it well-typed.
              Term direct = strict.strict_j(lambda, apply_subst(r.q.type, sub),
                                            apply_subst(r.q.elem, sub), motive2, d2,
                                            apply_subst(*r.q.yterm, sub),
                                            apply_subst(*r.q.path, sub));
              ok = direct == apply_subst(std::get<Term>(r.result), sub);
            }
          }
        } catch (const std::exception&) {
          ok = false;
        }
        if (!ok) ++violations;
      }
    }
  }

  // Render once against the final table, so result lines and the emitted
  // signature agree on names.
  DeclNamer namer = strict.table().canonical_namer();
  for (Ran& r : ran) {
    if (const auto* ty = std::get_if<Type>(&r.result)) {
      r.section.fields.emplace_back("result", print_type(strict.signature(), *ty, namer));
    } else {
      r.section.fields.emplace_back("result",
                                    print_term(strict.signature(), std::get<Term>(r.result), namer));
    }
    if (r.inferred)
      r.section.fields.emplace_back("type", print_type(strict.signature(), *r.inferred, namer));
    rep.sections.push_back(std::move(r.section));
  }

  Section ext;
  ext.tag = "extended-signature";
  {
    std::string text = strict.table().serialize_minted();
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) ext.lines.push_back(line);
    if (ext.lines.empty()) ext.lines.push_back("(empty)");
  }
  rep.sections.push_back(std::move(ext));

  if (flags.probe > 0 && !ran.empty()) {
    Section ps;
    ps.tag = "probes";
    ps.fields.emplace_back("queries", std::to_string(ran.size()));
    ps.fields.emplace_back("performed", std::to_string(performed));
    ps.fields.emplace_back("skipped", std::to_string(skipped));
    ps.fields.emplace_back("violations", std::to_string(violations));
    rep.sections.push_back(std::move(ps));
    if (violations > 0) return 2;
  }
  return 0;
}

int run_verify(const Signature& sig, const std::vector<RawBlock>& blocks, const Flags& flags,
               Report& rep) {
  int exit_code = 0;
  int idx = 0;
  for (const RawBlock& b : blocks) {
    ++idx;
    Section s;
    s.tag = "verify";
    s.index = idx;
    s.kind = b.tag;
    if (b.tag == "unify") {
      auto built = build_unify(sig, b);
      if (auto* d = std::get_if<Diag>(&built)) {
        rep.sections.push_back(error_section({*d}));
        return 1;
      }
      const UnifProblem& p = std::get<UnifProblem>(built);
      MguResult r = mgu(sig, p);
      s.fields.emplace_back("result", r.ok() ? "mgu" : "no-unifier " + to_string(r.reason()));
      OracleReport rep_o = check_mgu_terminal(sig, p, r, flags.budget());
      s.fields.emplace_back("verdict", to_string(rep_o.kind));
      s.fields.emplace_back("checked", std::to_string(rep_o.checked));
      if (!rep_o.detail.empty()) s.fields.emplace_back("detail", rep_o.detail);
      if (rep_o.kind == VerdictKind::CounterExample) exit_code = 2;
      else if (rep_o.kind == VerdictKind::BudgetExhausted && exit_code != 2) exit_code = 3;
    } else if (b.tag == "generalize") {
      auto built = build_generalize(sig, b);
      if (auto* d = std::get_if<Diag>(&built)) {
        rep.sections.push_back(error_section({*d}));
        return 1;
      }
      const GenProblem& p = std::get<GenProblem>(built);
      GenResult r = mgg(sig, p);
      OracleReport rep_o = check_mgg_terminal(sig, p, r, flags.budget());
      s.fields.emplace_back("verdict", to_string(rep_o.kind));
      s.fields.emplace_back("checked", std::to_string(rep_o.checked));
      s.fields.emplace_back("probes", std::to_string(rep_o.probes));
      if (!rep_o.detail.empty()) s.fields.emplace_back("detail", rep_o.detail);
      if (rep_o.kind == VerdictKind::CounterExample) exit_code = 2;
      else if (rep_o.kind == VerdictKind::BudgetExhausted && exit_code != 2) exit_code = 3;
    } else {
      s.fields.emplace_back("result", "skipped (verify handles unify and generalize blocks)");
    }
    rep.sections.push_back(std::move(s));
  }
  return exit_code;
}

}  // namespace

Outcome run_on_text(const std::string& command, const std::string& source,
                    const std::string& base_dir, const Flags& flags) {
  Report rep;
  rep.command = command;
  rep.flags = flags;
  Outcome out;

  if (command == "check") {
    auto parsed = parse_signature(source);
    if (auto* errs = std::get_if<std::vector<Diag>>(&parsed)) {
      rep.sections.push_back(error_section(*errs));
      out.exit_code = 1;
    } else {
      Signature& sig = std::get<Signature>(parsed);
      std::vector<Diag> verrs = validate_signature(sig);
      if (!verrs.empty()) {
        rep.sections.push_back(error_section(verrs));
        out.exit_code = 1;
      } else {
        Section s;
        s.tag = "check";
        s.fields.emplace_back("status", "ok");
        s.fields.emplace_back("declarations", std::to_string(sig.size()));
        rep.sections.push_back(std::move(s));
      }
    }
    out.report = emit_report(rep);
    return out;
  }

  auto parsed = parse_problem_file(source, base_dir);
  if (auto* errs = std::get_if<std::vector<Diag>>(&parsed)) {
    rep.sections.push_back(error_section(*errs));
    out.exit_code = 1;
    out.report = emit_report(rep);
    return out;
  }
  ProblemFile& pf = std::get<ProblemFile>(parsed);

  if (command == "unify") {
    out.exit_code = run_unify(pf.sig, pf.blocks, rep);
  } else if (command == "generalize") {
    out.exit_code = run_generalize(pf.sig, pf.blocks, rep);
  } else if (command == "strictify-id") {
    out.exit_code = run_strictify(pf.sig, pf.blocks, flags, rep);
  } else if (command == "verify") {
    out.exit_code = run_verify(pf.sig, pf.blocks, flags, rep);
  } else {
    rep.sections.push_back(error_section({Diag{0, 0, "unknown command '" + command + "'"}}));
    out.exit_code = 1;
  }
  out.report = emit_report(rep);
  return out;
}

Outcome run(const std::string& command, const std::string& path, const Flags& flags) {
  std::ifstream in(path);
  if (!in) {
    Report rep;
    rep.command = command;
    rep.flags = flags;
    rep.sections.push_back(error_section({Diag{0, 0, "cannot open '" + path + "'"}}));
    return Outcome{1, emit_report(rep)};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string base_dir = ".";
  std::size_t slash = path.find_last_of('/');
  if (slash != std::string::npos) base_dir = path.substr(0, slash);
  return run_on_text(command, ss.str(), base_dir, flags);
}

}  // namespace gatforge::cli
