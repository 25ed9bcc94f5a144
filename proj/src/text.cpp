#include "gatforge/text.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace gatforge {

namespace {

std::string var_name(VarIdx v) { return "v" + std::to_string(v); }

std::string decl_name(const Signature& sig, DeclId id, const DeclNamer& namer) {
  if (namer) {
    std::string n = namer(id);
    if (!n.empty()) return n;
  }
  return sig[id].name;
}

void print_term_rec(std::ostream& os, const Signature& sig, const Term& t, const DeclNamer& namer,
                    bool atom) {
  if (t.is_var()) {
    os << var_name(t.var());
    return;
  }
  if (t.args().empty()) {
    os << decl_name(sig, t.head(), namer);
    return;
  }
  if (atom) os << "(";
  os << decl_name(sig, t.head(), namer);
  for (const Term& a : t.args()) {
    os << " ";
    print_term_rec(os, sig, a, namer, true);
  }
  if (atom) os << ")";
}

}  // namespace

std::string print_term(const Signature& sig, const Term& t, const DeclNamer& namer) {
  std::ostringstream os;
  print_term_rec(os, sig, t, namer, false);
  return os.str();
}

std::string print_type(const Signature& sig, const Type& a, const DeclNamer& namer) {
  std::ostringstream os;
  os << decl_name(sig, a.head, namer);
  for (const Term& arg : a.args) {
    os << " ";
    print_term_rec(os, sig, arg, namer, true);
  }
  return os.str();
}

std::string print_telescope_tail(const Signature& sig, const Telescope& tele, std::size_t base,
                                 const DeclNamer& namer) {
  if (tele.entries.empty()) return "()";
  std::ostringstream os;
  for (std::size_t i = 0; i < tele.size(); ++i) {
    if (i > 0) os << " ";
    os << "(" << var_name(static_cast<VarIdx>(base + i)) << " : "
       << print_type(sig, tele.entries[i], namer) << ")";
  }
  return os.str();
}

std::string print_telescope(const Signature& sig, const Telescope& tele, const DeclNamer& namer) {
  return print_telescope_tail(sig, tele, 0, namer);
}

std::string print_subst(const Signature& sig, const Subst& s, const DeclNamer& namer) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    if (i > 0) os << ", ";
    print_term_rec(os, sig, s.terms[i], namer, false);
  }
  os << "]";
  return os.str();
}

std::string print_decl(const Signature& sig, const Decl& d, const DeclNamer& namer) {
  std::ostringstream os;
  os << (d.kind == DeclKind::SortFormer ? "sort " : "fun ");
  std::string shown = d.name;
  if (namer) {
    // The declaration being printed may itself be renamed; resolve through
    // the signature when it is registered there.
    if (auto id = sig.lookup(d.name)) {
      std::string n = namer(*id);
      if (!n.empty()) shown = n;
    }
  }
  os << shown;
  for (std::size_t i = 0; i < d.boundary.size(); ++i) {
    os << " (" << var_name(static_cast<VarIdx>(i)) << " : "
       << print_type(sig, d.boundary.entries[i], namer) << ")";
  }
  if (d.kind == DeclKind::TermFormer) {
    os << " : " << print_type(sig, *d.output_type, namer);
  }
  return os.str();
}

std::string print_signature(const Signature& sig) {
  std::ostringstream os;
  for (const Decl& d : sig.decls()) os << print_decl(sig, d) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum Kind { Ident, LParen, RParen, Colon, Semi, Comma, LBracket, RBracket, Newline, End };
  Kind kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  Lexer(const std::string& src, int first_line) : src_(src), line_(first_line) {}

  std::vector<Token> run(std::optional<Diag>* err) {
    std::vector<Token> out;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      if (c == '\n') {
        out.push_back({Token::Newline, "\n", line_, col_});
        advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      int line = line_, col = col_;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          id.push_back(src_[pos_]);
          advance();
        }
        out.push_back({Token::Ident, id, line, col});
        continue;
      }
      Token::Kind k;
      switch (c) {
        case '(': k = Token::LParen; break;
        case ')': k = Token::RParen; break;
        case ':': k = Token::Colon; break;
        case ';': k = Token::Semi; break;
        case ',': k = Token::Comma; break;
        case '[': k = Token::LBracket; break;
        case ']': k = Token::RBracket; break;
        default:
          if (err) *err = Diag{line, col, std::string("unexpected character '") + c + "'"};
          out.push_back({Token::End, "", line, col});
          return out;
      }
      out.push_back({k, std::string(1, c), line, col});
      advance();
    }
    out.push_back({Token::End, "", line_, col_});
    return out;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_;
  int col_ = 1;
};

class ItemParser {
 public:
  ItemParser(const Signature& sig, const std::vector<Token>& toks, std::size_t start = 0)
      : sig_(sig), toks_(toks), i_(start) {}

  std::size_t pos() const { return i_; }
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  bool at_end() const {
    return peek().kind == Token::End || peek().kind == Token::Newline ||
           peek().kind == Token::Semi;
  }

  Diag fail(const Token& t, const std::string& msg) { return Diag{t.line, t.col, msg}; }

  std::optional<VarIdx> resolve_var(const Scope& scope, const std::string& name) {
    for (std::size_t i = scope.names.size(); i-- > 0;) {
      if (scope.names[i] == name) return static_cast<VarIdx>(i);
    }
    return std::nullopt;
  }

  // term := head atom* ; head must name a declaration when arguments follow.
  std::variant<Term, Diag> parse_term(const Scope& scope) {
    const Token& t = peek();
    if (t.kind == Token::LParen) {
      next();
      auto inner = parse_term(scope);
      if (std::holds_alternative<Diag>(inner)) return inner;
      if (peek().kind != Token::RParen) return fail(peek(), "expected ')'");
      next();
      return inner;
    }
    if (t.kind != Token::Ident) return fail(t, "expected a term");
    next();
    TermVec args;
    while (is_atom_start()) {
      auto a = parse_atom(scope);
      if (auto* d = std::get_if<Diag>(&a)) return *d;
      args.push_back(std::get<Term>(a));
    }
    if (auto v = resolve_var(scope, t.text)) {
      if (!args.empty()) return fail(t, "variable '" + t.text + "' cannot take arguments");
      return Term::var(*v);
    }
    auto id = sig_.lookup(t.text);
    if (!id) return fail(t, "undeclared name '" + t.text + "'");
    if (sig_[*id].kind != DeclKind::TermFormer)
      return fail(t, "'" + t.text + "' is a sort-former, not a term");
    return Term::app(*id, std::move(args));
  }

  std::variant<Type, Diag> parse_type(const Scope& scope) {
    const Token& t = peek();
    if (t.kind != Token::Ident) return fail(t, "expected a type");
    next();
    auto id = sig_.lookup(t.text);
    if (!id) return fail(t, "undeclared name '" + t.text + "'");
    if (sig_[*id].kind != DeclKind::SortFormer)
      return fail(t, "'" + t.text + "' is a term-former, not a sort-former");
    TermVec args;
    while (is_atom_start()) {
      auto a = parse_atom(scope);
      if (auto* d = std::get_if<Diag>(&a)) return *d;
      args.push_back(std::get<Term>(a));
    }
    return Type{*id, std::move(args)};
  }

  std::variant<Telescope, Diag> parse_telescope(Scope& scope) {
    Telescope out;
    // "()" denotes the empty telescope; otherwise a sequence of binders.
    if (peek().kind == Token::LParen && toks_[i_ + 1].kind == Token::RParen) {
      next();
      next();
      return out;
    }
    while (peek().kind == Token::LParen) {
      next();
      const Token& nameTok = peek();
      if (nameTok.kind != Token::Ident) return fail(nameTok, "expected a binder name");
      next();
      if (peek().kind != Token::Colon) return fail(peek(), "expected ':'");
      next();
      auto ty = parse_type(scope);
      if (auto* d = std::get_if<Diag>(&ty)) return *d;
      if (peek().kind != Token::RParen) return fail(peek(), "expected ')'");
      next();
      out.entries.push_back(std::get<Type>(ty));
      scope.push(nameTok.text);
    }
    return out;
  }

  std::variant<TermVec, Diag> parse_term_list(const Scope& scope) {
    if (peek().kind != Token::LBracket) return fail(peek(), "expected '['");
    next();
    TermVec out;
    if (peek().kind == Token::RBracket) {
      next();
      return out;
    }
    while (true) {
      auto t = parse_term(scope);
      if (auto* d = std::get_if<Diag>(&t)) return *d;
      out.push_back(std::get<Term>(t));
      if (peek().kind == Token::Comma) {
        next();
        continue;
      }
      if (peek().kind == Token::RBracket) {
        next();
        return out;
      }
      return fail(peek(), "expected ',' or ']'");
    }
  }

  std::optional<Diag> expect_end() {
    if (!at_end()) return fail(peek(), "unexpected trailing input");
    return std::nullopt;
  }

 private:
  bool is_atom_start() const {
    return peek().kind == Token::Ident || peek().kind == Token::LParen;
  }

  std::variant<Term, Diag> parse_atom(const Scope& scope) {
    const Token& t = peek();
    if (t.kind == Token::LParen) {
      next();
      auto inner = parse_term(scope);
      if (std::holds_alternative<Diag>(inner)) return inner;
      if (peek().kind != Token::RParen) return fail(peek(), "expected ')'");
      next();
      return inner;
    }
    next();
    if (auto v = resolve_var(scope, t.text)) return Term::var(*v);
    auto id = sig_.lookup(t.text);
    if (!id) return fail(t, "undeclared name '" + t.text + "'");
    if (sig_[*id].kind != DeclKind::TermFormer)
      return fail(t, "'" + t.text + "' is a sort-former, not a term");
    return Term::app(*id, {});
  }

  const Signature& sig_;
  const std::vector<Token>& toks_;
  std::size_t i_;
};

}  // namespace

Scope default_scope(std::size_t n) {
  Scope s;
  for (std::size_t i = 0; i < n; ++i) s.push(var_name(static_cast<VarIdx>(i)));
  return s;
}

std::variant<Term, Diag> parse_term(const Signature& sig, const Scope& scope,
                                    const std::string& text, int line) {
  std::optional<Diag> lexErr;
  std::vector<Token> toks = Lexer(text, line).run(&lexErr);
  if (lexErr) return *lexErr;
  ItemParser p(sig, toks);
  auto t = p.parse_term(scope);
  if (std::holds_alternative<Diag>(t)) return t;
  if (auto d = p.expect_end()) return *d;
  return t;
}

std::variant<Type, Diag> parse_type(const Signature& sig, const Scope& scope,
                                    const std::string& text, int line) {
  std::optional<Diag> lexErr;
  std::vector<Token> toks = Lexer(text, line).run(&lexErr);
  if (lexErr) return *lexErr;
  ItemParser p(sig, toks);
  auto t = p.parse_type(scope);
  if (std::holds_alternative<Diag>(t)) return t;
  if (auto d = p.expect_end()) return *d;
  return t;
}

std::variant<Telescope, Diag> parse_telescope(const Signature& sig, Scope& scope,
                                              const std::string& text, int line) {
  std::optional<Diag> lexErr;
  std::vector<Token> toks = Lexer(text, line).run(&lexErr);
  if (lexErr) return *lexErr;
  ItemParser p(sig, toks);
  auto t = p.parse_telescope(scope);
  if (std::holds_alternative<Diag>(t)) return t;
  if (auto d = p.expect_end()) return *d;
  return t;
}

std::variant<TermVec, Diag> parse_term_list(const Signature& sig, const Scope& scope,
                                            const std::string& text, int line) {
  std::optional<Diag> lexErr;
  std::vector<Token> toks = Lexer(text, line).run(&lexErr);
  if (lexErr) return *lexErr;
  ItemParser p(sig, toks);
  auto t = p.parse_term_list(scope);
  if (std::holds_alternative<Diag>(t)) return t;
  if (auto d = p.expect_end()) return *d;
  return t;
}

std::variant<Signature, std::vector<Diag>> parse_signature(const std::string& source) {
  std::optional<Diag> lexErr;
  std::vector<Token> toks = Lexer(source, 1).run(&lexErr);
  std::vector<Diag> diags;
  if (lexErr) diags.push_back(*lexErr);

  Signature sig;
  std::size_t i = 0;
  auto skip_separators = [&] {
    while (toks[i].kind == Token::Newline || toks[i].kind == Token::Semi) ++i;
  };
  auto skip_to_next_decl = [&] {
    while (toks[i].kind != Token::End && toks[i].kind != Token::Newline &&
           toks[i].kind != Token::Semi)
      ++i;
  };

  skip_separators();
  while (toks[i].kind != Token::End) {
    const Token& kw = toks[i];
    if (kw.kind != Token::Ident || (kw.text != "sort" && kw.text != "fun")) {
      diags.push_back({kw.line, kw.col, "expected 'sort' or 'fun'"});
      skip_to_next_decl();
      skip_separators();
      continue;
    }
    ++i;
    bool is_sort = kw.text == "sort";
    if (toks[i].kind != Token::Ident) {
      diags.push_back({toks[i].line, toks[i].col, "expected a declaration name"});
      skip_to_next_decl();
      skip_separators();
      continue;
    }
    Token nameTok = toks[i];
    ++i;
    if (nameTok.text == "sort" || nameTok.text == "fun") {
      diags.push_back({nameTok.line, nameTok.col, "'" + nameTok.text + "' is a reserved word"});
      skip_to_next_decl();
      skip_separators();
      continue;
    }
    if (sig.lookup(nameTok.text)) {
      diags.push_back({nameTok.line, nameTok.col, "duplicate name '" + nameTok.text + "'"});
      skip_to_next_decl();
      skip_separators();
      continue;
    }

    ItemParser p(sig, toks, i);
    Scope scope;
    Decl d;
    d.name = nameTok.text;
    d.kind = is_sort ? DeclKind::SortFormer : DeclKind::TermFormer;
    d.line = nameTok.line;

    bool ok = true;
    auto tele = p.parse_telescope(scope);
    if (auto* err = std::get_if<Diag>(&tele)) {
      diags.push_back(*err);
      ok = false;
    } else {
      d.boundary = std::move(std::get<Telescope>(tele));
      d.binder_names = scope.names;
    }
    if (ok && !is_sort) {
      if (p.peek().kind != Token::Colon) {
        diags.push_back(p.fail(p.peek(), "expected ':' and an output type"));
        ok = false;
      } else {
        p.next();
        auto ty = p.parse_type(scope);
        if (auto* err = std::get_if<Diag>(&ty)) {
          diags.push_back(*err);
          ok = false;
        } else {
          d.output_type = std::move(std::get<Type>(ty));
        }
      }
    }
    if (ok && !p.at_end()) {
      diags.push_back(p.fail(p.peek(), "unexpected trailing input after declaration"));
      ok = false;
    }
    i = p.pos();
    if (ok) sig.push(std::move(d));
    skip_to_next_decl();
    skip_separators();
  }

  if (!diags.empty()) return diags;
  return sig;
}

}  // namespace gatforge
