// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_PARSE_HPP_
#define SESSMON_PARSE_HPP_

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sessmon/scenario.hpp"
#include "sessmon/syntax.hpp"
#include "sessmon/typing.hpp"

namespace sessmon {

namespace detail {

struct Token {
  enum Kind { Ident, Nat, Punct, Eof } kind = Eof;
  std::string text;
  long long nat = 0;
  std::size_t line = 1, col = 1;
};

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto bump = [&](char ch) {
    if (ch == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  while (i < src.size()) {
    char ch = src[i];
    if (ch == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') bump(src[i++]);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      bump(ch);
      ++i;
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_'))
        ++j;
      t.kind = Token::Ident;
      t.text = src.substr(i, j - i);
      while (i < j) bump(src[i++]);
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      t.kind = Token::Nat;
      t.text = src.substr(i, j - i);
      t.nat = std::stoll(t.text);
      while (i < j) bump(src[i++]);
    } else if (ch == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      t.kind = Token::Punct;
      t.text = "->";
      bump(src[i++]);
      bump(src[i++]);
    } else if (std::string("{}[](),;:.+-?!@#<=|&").find(ch) !=
               std::string::npos) {
      t.kind = Token::Punct;
      t.text = std::string(1, ch);
      bump(src[i++]);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + ch +
                           "'");
    }
    out.push_back(std::move(t));
  }
  Token eof;
  eof.kind = Token::Eof;
  eof.line = line;
  eof.col = col;
  out.push_back(eof);
  return out;
}

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "lattice",  "elements", "edges",      "global",   "levels",
      "process",  "type",     "policy",     "strategy", "seed",
      "depth",    "cap",      "start",      "terminate", "restart",
      "template", "random",   "exhaustive", "scripted", "mu",
      "end",      "if",       "then",       "else",     "not",
      "true",     "false",    "and",        "or",       "nat",
      "bool"};
  return kw;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(lex(src)) {}

  // ----- entry points ------------------------------------------------------

  Scenario scenario() {
    expect_kw("lattice");
    Scenario sc{lattice_block()};
    lat_ = &sc.lattice;
    std::map<std::string, std::map<Participant, Level>> level_defs;
    std::optional<std::string> start_name;
    std::size_t start_line = 1, start_col = 1;
    std::map<std::string, std::size_t> repo_index;
    while (!at_eof()) {
      const Token& t = peek();
      if (accept_kw("global")) {
        NamedGlobal ng;
        ng.name = ident("global name");
        expect_punct("=");
        ng.g = gtype();
        expect_punct(";");
        sc.globals.push_back(std::move(ng));
      } else if (accept_kw("levels")) {
        std::string name = ident("global name");
        expect_punct("=");
        expect_punct("{");
        std::map<Participant, Level> m;
        do {
          std::string p = ident("participant");
          expect_punct(":");
          m[p] = level_name();
        } while (accept_punct(","));
        expect_punct("}");
        accept_punct(";");
        level_defs[name] = std::move(m);
      } else if (accept_kw("process")) {
        RepoEntry e;
        e.name = ident("process name");
        expect_punct("[");
        if (!accept_punct("]")) {
          do {
            std::string l = ident("label");
            expect_punct(":");
            e.label_sorts[l] = sort();
          } while (accept_punct(","));
          expect_punct("]");
        }
        expect_punct("=");
        e.process = apply_label_sorts(proc(), e.label_sorts);
        expect_punct(";");
        repo_index[e.name] = sc.repo.size();
        sc.repo.push_back(std::move(e));
      } else if (accept_kw("type")) {
        const Token& nt = peek();
        std::string name = ident("process name");
        auto it = repo_index.find(name);
        if (it == repo_index.end())
          throw ParseError(nt.line, nt.col,
                           "type for undeclared process '" + name + "'");
        expect_punct("=");
        sc.repo[it->second].declared_type = ptype();
        expect_punct(";");
      } else if (accept_kw("policy")) {
        if (accept_kw("terminate")) {
          sc.policy = {PolicyKind::Terminate, ""};
        } else if (accept_kw("restart")) {
          sc.policy = {PolicyKind::Restart, ""};
        } else if (accept_kw("template")) {
          expect_punct(":");
          sc.policy = {PolicyKind::Template, ident("global name")};
        } else {
          fail("'terminate', 'restart', or 'template'");
        }
        expect_punct(";");
      } else if (accept_kw("strategy")) {
        if (accept_kw("random")) {
          sc.strategy.kind = StrategyKind::Random;
        } else if (accept_kw("exhaustive")) {
          sc.strategy.kind = StrategyKind::Exhaustive;
        } else if (accept_kw("scripted")) {
          sc.strategy.kind = StrategyKind::Scripted;
          do {
            const Token& rt = peek();
            std::string r = ident("rule name");
            auto rule = rule_from_name(r);
            if (!rule)
              throw ParseError(rt.line, rt.col, "unknown rule '" + r + "'");
            sc.strategy.priority.push_back(*rule);
          } while (accept_punct(","));
        } else {
          fail("'random', 'exhaustive', or 'scripted'");
        }
        expect_punct(";");
      } else if (accept_kw("seed")) {
        sc.seed = static_cast<std::uint64_t>(natural());
        expect_punct(";");
      } else if (accept_kw("depth")) {
        sc.depth_bound = static_cast<std::size_t>(natural());
        expect_punct(";");
      } else if (accept_kw("cap")) {
        sc.branch_cap = static_cast<std::size_t>(natural());
        expect_punct(";");
      } else if (accept_kw("start")) {
        start_line = t.line;
        start_col = t.col;
        start_name = ident("global name");
        expect_punct(";");
      } else {
        fail("a scenario item");
      }
    }
    for (auto& g : sc.globals) {
      auto it = level_defs.find(g.name);
      if (it != level_defs.end()) {
        g.levels = std::move(it->second);
        level_defs.erase(it);
      }
    }
    if (!level_defs.empty())
      throw ParseError(1, 1, "levels for unknown global '" +
                                 level_defs.begin()->first + "'");
    if (start_name) {
      bool found = false;
      for (std::size_t i = 0; i < sc.globals.size(); ++i)
        if (sc.globals[i].name == *start_name) {
          sc.start_index = i;
          found = true;
        }
      if (!found)
        throw ParseError(start_line, start_col,
                         "start names unknown global '" + *start_name + "'");
    }
    return sc;
  }

  GPtr global_type_only() {
    GPtr g = gtype();
    expect_eof();
    return g;
  }

  PPtr process_only(const Lattice& lat) {
    lat_ = &lat;
    PPtr p = proc();
    expect_eof();
    return p;
  }

  TPtr ptype_only() {
    TPtr t = ptype();
    expect_eof();
    return t;
  }

  ExprPtr expr_only(const Lattice& lat) {
    lat_ = &lat;
    ExprPtr e = expr();
    expect_eof();
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Lattice* lat_ = nullptr;

  // ----- token plumbing ----------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_eof() const { return peek().kind == Token::Eof; }
  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& expectation) const {
    const Token& t = peek();
    std::string got = t.kind == Token::Eof ? "end of input"
                                           : "'" + t.text + "'";
    throw ParseError(t.line, t.col, "expected " + expectation + ", found " +
                                        got);
  }

  bool accept_punct(const std::string& s) {
    if (peek().kind == Token::Punct && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_punct(const std::string& s) {
    if (!accept_punct(s)) fail("'" + s + "'");
  }
  bool accept_kw(const std::string& s) {
    if (peek().kind == Token::Ident && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_kw(const std::string& s) {
    if (!accept_kw(s)) fail("'" + s + "'");
  }
  std::string ident(const std::string& what) {
    if (peek().kind != Token::Ident) fail(what);
    if (keywords().count(peek().text))
      fail(what + " (found reserved word '" + peek().text + "')");
    return advance().text;
  }
  long long natural() {
    if (peek().kind != Token::Nat) fail("a number");
    return advance().nat;
  }
  void expect_eof() {
    if (!at_eof()) fail("end of input");
  }

  Level level_name() {
    if (peek().kind != Token::Ident) fail("a level");
    const Token& t = advance();
    if (lat_ && !lat_->contains(t.text))
      throw ParseError(t.line, t.col, "unknown level '" + t.text + "'");
    return Level{t.text};
  }

  // ----- lattice -----------------------------------------------------------

  Lattice lattice_block() {
    expect_punct("{");
    expect_kw("elements");
    std::vector<std::string> elements;
    do {
      elements.push_back(ident("a level"));
    } while (accept_punct(","));
    expect_punct(";");
    expect_kw("edges");
    std::vector<std::pair<std::string, std::string>> edges;
    if (!(peek().kind == Token::Punct && peek().text == ";")) {
      do {
        std::string a = ident("a level");
        expect_punct("<");
        std::string b = ident("a level");
        edges.emplace_back(std::move(a), std::move(b));
      } while (accept_punct(","));
    }
    expect_punct(";");
    expect_punct("}");
    return Lattice::validate(elements, edges);
  }

  // ----- sorts and values --------------------------------------------------

  Sort sort() {
    if (accept_kw("nat")) return Sort::Nat;
    if (accept_kw("bool")) return Sort::Bool;
    fail("'nat' or 'bool'");
  }

  Level opt_level() {
    if (accept_punct("@")) return level_name();
    if (!lat_) {
      const Token& t = peek();
      throw ParseError(t.line, t.col, "literal needs an explicit '@level'");
    }
    return lat_->bottom();
  }

  // ----- expressions -------------------------------------------------------

  ExprPtr expr() { return expr_or(); }

  ExprPtr expr_or() {
    ExprPtr e = expr_and();
    while (accept_kw("or")) e = e_bin(BinOp::Or, e, expr_and());
    return e;
  }
  ExprPtr expr_and() {
    ExprPtr e = expr_cmp();
    while (accept_kw("and")) e = e_bin(BinOp::And, e, expr_cmp());
    return e;
  }
  ExprPtr expr_cmp() {
    ExprPtr e = expr_add();
    for (;;) {
      if (accept_punct("<"))
        e = e_bin(BinOp::Lt, e, expr_add());
      else if (accept_punct("="))
        e = e_bin(BinOp::Eq, e, expr_add());
      else
        return e;
    }
  }
  ExprPtr expr_add() {
    ExprPtr e = expr_un();
    for (;;) {
      if (accept_punct("+"))
        e = e_bin(BinOp::Add, e, expr_un());
      else if (accept_punct("-"))
        e = e_bin(BinOp::Sub, e, expr_un());
      else
        return e;
    }
  }
  ExprPtr expr_un() {
    if (accept_kw("not")) return e_un(UnOp::Not, expr_un());
    return expr_prim();
  }
  ExprPtr expr_prim() {
    if (peek().kind == Token::Nat) {
      long long n = advance().nat;
      return e_lit(make_nat(n, opt_level()));
    }
    if (accept_kw("true")) return e_lit(make_bool(true, opt_level()));
    if (accept_kw("false")) return e_lit(make_bool(false, opt_level()));
    if (accept_punct("#"))
      return e_nonce(static_cast<std::uint64_t>(natural()));
    if (accept_punct("(")) {
      ExprPtr e = expr();
      expect_punct(")");
      return e;
    }
    if (peek().kind == Token::Ident && !keywords().count(peek().text))
      return e_var(advance().text);
    fail("an expression");
  }

  // ----- global types ------------------------------------------------------

  GPtr gtype() {
    if (accept_kw("end")) return g_end();
    if (accept_kw("mu")) {
      std::string t = ident("a recursion variable");
      expect_punct(".");
      return g_mu(t, gtype());
    }
    std::string first = ident("a participant or recursion variable");
    if (!accept_punct("->")) return g_var(first);
    std::string to = ident("a participant");
    expect_punct(":");
    expect_punct("{");
    std::vector<GBranch> branches;
    do {
      GBranch b;
      b.label = ident("a label");
      expect_punct("(");
      b.sort = sort();
      expect_punct(")");
      expect_punct(".");
      b.cont = gtype();
      branches.push_back(std::move(b));
    } while (accept_punct(","));
    expect_punct("}");
    return g_comm(first, to, std::move(branches));
  }

  // ----- processes ---------------------------------------------------------

  PPtr proc() {
    if (accept_kw("mu")) {
      std::string x = ident("a process variable");
      expect_punct(".");
      return p_mu(x, proc());
    }
    PPtr p = prefix_term();
    while (accept_punct("+")) p = p_sum(p, prefix_term());
    return p;
  }

  // A summand, a prefix continuation: 0, a process variable, a conditional,
  // a communication prefix, or a parenthesized process.
  PPtr prefix_term() {
    if (peek().kind == Token::Nat && peek().nat == 0 && peek().text == "0") {
      advance();
      return p_nil();
    }
    if (accept_punct("(")) {
      PPtr p = proc();
      expect_punct(")");
      return p;
    }
    if (accept_kw("if")) {
      ExprPtr e = expr();
      expect_kw("then");
      PPtr t = if_branch();
      expect_kw("else");
      PPtr f = if_branch();
      return p_cond(e, t, f);
    }
    if (peek().kind == Token::Ident && !keywords().count(peek().text)) {
      // Channel prefix when followed by ?, !, or [; else a process variable.
      const std::string& after = peek(1).text;
      bool chan = peek(1).kind == Token::Punct &&
                  (after == "?" || after == "!" || after == "[");
      if (!chan) return p_var(advance().text);
      Channel c = channel();
      if (accept_punct("?")) {
        std::string peer = ident("a participant");
        expect_punct(":");
        std::string label = ident("a label");
        expect_punct("(");
        std::string var = ident("a variable");
        expect_punct(")");
        expect_punct(".");
        return p_recv(c, peer, label, var, std::nullopt, prefix_term());
      }
      expect_punct("!");
      std::string peer = ident("a participant");
      expect_punct(":");
      std::string label = ident("a label");
      expect_punct("(");
      ExprPtr e = expr();
      expect_punct(")");
      expect_punct(".");
      return p_send(c, peer, label, e, std::nullopt, prefix_term());
    }
    fail("a process");
  }

  PPtr if_branch() {
    if (peek().kind == Token::Nat && peek().nat == 0 && peek().text == "0") {
      advance();
      return p_nil();
    }
    if (accept_punct("(")) {
      PPtr p = proc();
      expect_punct(")");
      return p;
    }
    if (peek().kind == Token::Ident && !keywords().count(peek().text))
      return p_var(advance().text);
    fail("'0', a process variable, or a parenthesized process");
  }

  Channel channel() {
    std::string name = ident("a channel");
    if (accept_punct("[")) {
      std::string part = ident("a participant");
      expect_punct("]");
      return session_chan(name, part);
    }
    return user_chan(name);
  }

  // ----- process types -----------------------------------------------------

  TPtr ptype() {
    if (accept_kw("mu")) {
      std::string t = ident("a recursion variable");
      expect_punct(".");
      return t_mu(t, ptype());
    }
    return ptype_or();
  }

  TPtr ptype_or() {
    TPtr t = ptype_and();
    while (accept_punct("|")) t = t_or(t, ptype_and());
    return t;
  }
  TPtr ptype_and() {
    TPtr t = ptype_prefix();
    while (accept_punct("&")) t = t_and(t, ptype_prefix());
    return t;
  }
  TPtr ptype_prefix() {
    if (accept_kw("end")) return t_end();
    if (accept_punct("(")) {
      TPtr t = ptype();
      expect_punct(")");
      return t;
    }
    bool is_in = false;
    if (accept_punct("?"))
      is_in = true;
    else if (accept_punct("!"))
      is_in = false;
    else if (peek().kind == Token::Ident && !keywords().count(peek().text))
      return t_var(advance().text);
    else
      fail("a process type");
    std::string peer = ident("a participant");
    expect_punct(":");
    std::string label = ident("a label");
    expect_punct("(");
    Sort s = sort();
    expect_punct(")");
    expect_punct(".");
    TPtr cont = ptype_prefix();
    return is_in ? t_in(peer, label, s, cont) : t_out(peer, label, s, cont);
  }

  // ----- annotation application -------------------------------------------

  static PPtr apply_label_sorts(const PPtr& p,
                                const std::map<Label, Sort>& sorts) {
    auto pick = [&](const Label& l,
                    const std::optional<Sort>& keep) -> std::optional<Sort> {
      auto it = sorts.find(l);
      if (it != sorts.end()) return it->second;
      return keep;
    };
    return std::visit(
        overloaded{
            [&](const PNil&) { return p; },
            [&](const PRecv& r) {
              return p_recv(r.chan, r.peer, r.label, r.var,
                            pick(r.label, r.sort),
                            apply_label_sorts(r.cont, sorts));
            },
            [&](const PSend& s) {
              return p_send(s.chan, s.peer, s.label, s.expr,
                            pick(s.label, s.sort),
                            apply_label_sorts(s.cont, sorts));
            },
            [&](const PVarRef&) { return p; },
            [&](const PMu& m) {
              return p_mu(m.var, apply_label_sorts(m.body, sorts));
            },
            [&](const PCond& c) {
              return p_cond(c.test, apply_label_sorts(c.then_branch, sorts),
                            apply_label_sorts(c.else_branch, sorts));
            },
            [&](const PSum& s) {
              return p_sum(apply_label_sorts(s.left, sorts),
                           apply_label_sorts(s.right, sorts));
            }},
        p->node);
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Public parsing entry points. All throw ParseError with line/column.
// ---------------------------------------------------------------------------

inline Scenario parse_scenario(const std::string& src) {
  return detail::Parser(src).scenario();
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, 0, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

inline GPtr parse_global_type(const std::string& src) {
  return detail::Parser(src).global_type_only();
}

inline PPtr parse_process(const std::string& src, const Lattice& lat) {
  return detail::Parser(src).process_only(lat);
}

inline TPtr parse_ptype(const std::string& src) {
  return detail::Parser(src).ptype_only();
}

inline ExprPtr parse_expr(const std::string& src, const Lattice& lat) {
  return detail::Parser(src).expr_only(lat);
}

}  // namespace sessmon

#endif  // SESSMON_PARSE_HPP_
