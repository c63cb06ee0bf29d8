#include "dsl.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gpd {

namespace {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Lexing

struct Tok {
  enum Kind { Id, Int, Sym, End };
  Kind kind = End;
  std::string text;
  int line = 1, col = 1;
  size_t off = 0;
};

std::vector<Tok> lex(const std::string& s, std::vector<Diagnostic>& diags) {
  std::vector<Tok> out;
  int line = 1, col = 1;
  size_t i = 0;
  while (i < s.size()) {
    char ch = s[i];
    if (ch == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++col;
      ++i;
      continue;
    }
    if (ch == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    int l = line, c = col;
    size_t o = i;
    if (std::isalpha((unsigned char)ch) || ch == '_') {
      size_t j = i;
      while (j < s.size() &&
             (std::isalnum((unsigned char)s[j]) || s[j] == '_'))
        ++j;
      out.push_back({Tok::Id, s.substr(i, j - i), l, c, o});
      col += (int)(j - i);
      i = j;
      continue;
    }
    if (std::isdigit((unsigned char)ch) ||
        (ch == '-' && i + 1 < s.size() &&
         std::isdigit((unsigned char)s[i + 1]))) {
      size_t j = i + 1;
      while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
      out.push_back({Tok::Int, s.substr(i, j - i), l, c, o});
      col += (int)(j - i);
      i = j;
      continue;
    }
    if (ch == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::Sym, "->", l, c, o});
      col += 2;
      i += 2;
      continue;
    }
    if (std::strchr("{}():;,+^=-", ch)) {
      out.push_back({Tok::Sym, std::string(1, ch), l, c, o});
      ++col;
      ++i;
      continue;
    }
    diags.push_back(
        {l, c, "syntax", "unexpected character '" + std::string(1, ch) + "'"});
    ++col;
    ++i;
  }
  out.push_back({Tok::End, "", line, col, s.size()});
  return out;
}

// ---------------------------------------------------------------------------
// Raw section ASTs

struct Pos {
  int line = 1, col = 1;
};

struct Name {
  std::string s;
  Pos p;
};

struct RawArrow {
  Name name, src, tgt;
};

struct RawEq {
  std::vector<std::vector<Name>> words;  // all equal; each word right-first
  Pos p;
};

struct RawMapping {
  Name dom;
  Name aut;  // empty string when untagged
  Name img;
};

struct RawClause {
  Name arrow;
  std::vector<RawMapping> maps;
};

struct RawLeg {
  Name aut;  // empty when untagged
  Name idem;
};

struct RawTerm {
  Name tag;  // k, k0, k1, ...
  std::vector<RawLeg> legs;
};

struct RawDoc {
  bool have_field = false, have_groupoid = false, have_ring = false,
       have_action = false, have_assert = false;
  Pos field_pos, groupoid_pos, ring_pos, action_pos;
  Name field_expr;  // raw text of the field expression
  std::vector<Name> objects;
  std::vector<RawArrow> arrows;
  std::vector<RawEq> eqs;
  std::vector<std::pair<Name, std::vector<Name>>> ring_clauses;
  std::vector<RawClause> action_clauses;
  std::vector<std::pair<Name, std::vector<Name>>> subgroupoids;
  std::vector<std::pair<Name, std::vector<RawTerm>>> subrings;
  std::vector<Name> asserts;
};

class Parser {
 public:
  Parser(const std::string& text, std::vector<Diagnostic>& diags)
      : text_(text), diags_(diags), toks_(lex(text, diags)) {}

  RawDoc run() {
    while (!at_end()) {
      const Tok& t = peek();
      if (t.kind != Tok::Id) {
        diag(t, "syntax", "expected a section keyword, got '" + t.text + "'");
        ++ip_;
        continue;
      }
      if (t.text == "field")
        field_section();
      else if (t.text == "groupoid")
        groupoid_section();
      else if (t.text == "ring")
        ring_section();
      else if (t.text == "action")
        action_section();
      else if (t.text == "subgroupoid")
        subgroupoid_section();
      else if (t.text == "subring")
        subring_section();
      else if (t.text == "assert")
        assert_section();
      else {
        diag(t, "syntax", "unknown section keyword '" + t.text + "'");
        ++ip_;
        sync();
      }
    }
    return std::move(doc_);
  }

 private:
  const Tok& peek() const { return toks_[ip_]; }
  const Tok& get() { return toks_[ip_++]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool at_sym(const char* s) const {
    return peek().kind == Tok::Sym && peek().text == s;
  }
  bool accept_sym(const char* s) {
    if (!at_sym(s)) return false;
    ++ip_;
    return true;
  }
  bool expect_sym(const char* s) {
    if (accept_sym(s)) return true;
    diag(peek(), "syntax",
         std::string("expected '") + s + "', got '" + peek().text + "'");
    return false;
  }
  bool expect_id(Name& out) {
    if (peek().kind != Tok::Id) {
      diag(peek(), "syntax", "expected a name, got '" + peek().text + "'");
      return false;
    }
    const Tok& t = get();
    out = {t.text, {t.line, t.col}};
    return true;
  }
  void diag(const Tok& t, const std::string& cat, const std::string& msg) {
    diags_.push_back({t.line, t.col, cat, msg});
  }
  void diag(Pos p, const std::string& cat, const std::string& msg) {
    diags_.push_back({p.line, p.col, cat, msg});
  }
  // Error recovery: skip forward past the next ';' or '}'.
  void sync() {
    while (!at_end()) {
      if (accept_sym(";") || accept_sym("}")) return;
      ++ip_;
    }
  }

  void field_section() {
    const Tok& kw = get();
    if (doc_.have_field) diag(kw, "syntax", "duplicate field section");
    doc_.have_field = true;
    doc_.field_pos = {kw.line, kw.col};
    if (!expect_sym(":")) return sync();
    // The field expression is taken verbatim up to the ';' so spellings like
    // "Q(sqrt -3)" survive untokenized.
    const Tok& start = peek();
    size_t begin = start.off;
    while (!at_end() && !at_sym(";")) ++ip_;
    size_t end = peek().off;
    if (!expect_sym(";")) return sync();
    std::string raw = text_.substr(begin, end - begin);
    while (!raw.empty() && std::isspace((unsigned char)raw.back()))
      raw.pop_back();
    doc_.field_expr = {raw, {start.line, start.col}};
  }

  void idlist(std::vector<Name>& out) {
    do {
      Name n;
      if (!expect_id(n)) return sync();
      out.push_back(n);
    } while (accept_sym(","));
    if (!expect_sym(";")) sync();
  }

  void groupoid_section() {
    const Tok& kw = get();
    if (doc_.have_groupoid) diag(kw, "syntax", "duplicate groupoid section");
    doc_.have_groupoid = true;
    doc_.groupoid_pos = {kw.line, kw.col};
    if (!expect_sym("{")) return sync();
    while (!at_end() && !accept_sym("}")) {
      Name head;
      if (!expect_id(head)) {
        sync();
        continue;
      }
      if (!expect_sym(":")) {
        sync();
        continue;
      }
      if (head.s == "objects") {
        idlist(doc_.objects);
      } else if (head.s == "arrows") {
        do {
          RawArrow a;
          if (!expect_id(a.name) || !expect_sym(":") || !expect_id(a.src) ||
              !expect_sym("->") || !expect_id(a.tgt)) {
            sync();
            break;
          }
          doc_.arrows.push_back(a);
        } while (accept_sym(","));
        if (at_sym(";")) ++ip_;
      } else if (head.s == "compose") {
        do {
          RawEq eq;
          eq.p = {peek().line, peek().col};
          bool bad = false;
          do {
            std::vector<Name> word;
            while (peek().kind == Tok::Id) {
              const Tok& t = get();
              word.push_back({t.text, {t.line, t.col}});
            }
            if (word.empty()) {
              diag(peek(), "syntax", "expected a morphism word");
              bad = true;
              break;
            }
            eq.words.push_back(std::move(word));
          } while (accept_sym("="));
          if (bad) {
            sync();
            break;
          }
          if (eq.words.size() < 2) {
            diag(eq.p, "syntax", "a compose entry needs '=' between words");
            sync();
            break;
          }
          doc_.eqs.push_back(std::move(eq));
        } while (accept_sym(","));
        if (at_sym(";")) ++ip_;
      } else {
        diag(head.p, "syntax", "unknown groupoid clause '" + head.s + "'");
        sync();
      }
    }
  }

  void ring_section() {
    const Tok& kw = get();
    if (doc_.have_ring) diag(kw, "syntax", "duplicate ring section");
    doc_.have_ring = true;
    doc_.ring_pos = {kw.line, kw.col};
    if (!expect_sym("{")) return sync();
    while (!at_end() && !accept_sym("}")) {
      Name obj;
      if (!expect_id(obj) || !expect_sym(":")) {
        sync();
        continue;
      }
      std::vector<Name> idems;
      idlist(idems);
      doc_.ring_clauses.push_back({obj, std::move(idems)});
    }
  }

  bool mapping(RawMapping& m) {
    if (!expect_id(m.dom) || !expect_sym("->")) return false;
    if (peek().kind == Tok::Id &&
        (peek().text == "conj" || peek().text == "frob")) {
      const Tok& t = get();
      m.aut = {t.text, {t.line, t.col}};
      if (m.aut.s == "frob" && accept_sym("^")) {
        if (peek().kind != Tok::Int) {
          diag(peek(), "syntax", "expected an exponent after '^'");
          return false;
        }
        m.aut.s += "^" + get().text;
      }
    }
    return expect_id(m.img);
  }

  void action_section() {
    const Tok& kw = get();
    if (doc_.have_action) diag(kw, "syntax", "duplicate action section");
    doc_.have_action = true;
    doc_.action_pos = {kw.line, kw.col};
    if (!expect_sym("{")) return sync();
    while (!at_end() && !accept_sym("}")) {
      RawClause cl;
      if (!expect_id(cl.arrow) || !expect_sym(":")) {
        sync();
        continue;
      }
      bool ok = true;
      do {
        RawMapping m;
        if (!mapping(m)) {
          ok = false;
          sync();
          break;
        }
        cl.maps.push_back(std::move(m));
      } while (accept_sym(","));
      if (ok && !expect_sym(";")) sync();
      doc_.action_clauses.push_back(std::move(cl));
    }
  }

  void subgroupoid_section() {
    get();
    Name name;
    if (!expect_id(name) || !expect_sym("{")) return sync();
    std::vector<Name> members;
    do {
      Name n;
      if (!expect_id(n)) return sync();
      members.push_back(n);
    } while (accept_sym(","));
    if (!expect_sym("}")) return sync();
    doc_.subgroupoids.push_back({name, std::move(members)});
  }

  void subring_section() {
    get();
    Name name;
    if (!expect_id(name) || !expect_sym(":")) return sync();
    std::vector<RawTerm> terms;
    do {
      RawTerm term;
      if (!expect_id(term.tag) || !expect_sym("(")) return sync();
      do {
        RawLeg leg;
        if (peek().kind == Tok::Id &&
            (peek().text == "conj" || peek().text == "frob")) {
          const Tok& t = get();
          leg.aut = {t.text, {t.line, t.col}};
          if (leg.aut.s == "frob" && accept_sym("^")) {
            if (peek().kind != Tok::Int) {
              diag(peek(), "syntax", "expected an exponent after '^'");
              return sync();
            }
            leg.aut.s += "^" + get().text;
          }
        }
        if (!expect_id(leg.idem)) return sync();
        term.legs.push_back(std::move(leg));
      } while (accept_sym("+"));
      if (!expect_sym(")")) return sync();
      terms.push_back(std::move(term));
    } while (accept_sym("+"));
    if (!expect_sym(";")) sync();
    doc_.subrings.push_back({name, std::move(terms)});
  }

  void assert_section() {
    const Tok& kw = get();
    if (doc_.have_assert) diag(kw, "syntax", "duplicate assert section");
    doc_.have_assert = true;
    idlist(doc_.asserts);
  }

  const std::string& text_;
  std::vector<Diagnostic>& diags_;
  std::vector<Tok> toks_;
  size_t ip_ = 0;
  RawDoc doc_;
};

// ---------------------------------------------------------------------------
// Composition-table closure

// Derives the full table from the declared relations using associativity,
// inverse bookkeeping, cancellation, and the anti-homomorphism rule
// (ab)^{-1} = b^{-1} a^{-1}.  Stops at the first genuine conflict.
struct TableBuilder {
  TableBuilder(const std::vector<std::string>& names_,
               const std::vector<int>& src_, const std::vector<int>& tgt_,
               int nobj_, std::vector<Diagnostic>& diags_, Pos gpos_)
      : names(names_), src(src_), tgt(tgt_), nobj(nobj_), diags(diags_),
        gpos(gpos_) {}

  const std::vector<std::string>& names;
  const std::vector<int>& src;
  const std::vector<int>& tgt;
  int nobj;
  std::vector<Diagnostic>& diags;
  Pos gpos;

  int n = 0;
  std::vector<std::vector<int>> t;
  std::vector<int> inv;
  bool changed = false, fatal = false;

  struct Constraint {
    std::vector<int> lhs, rhs;
    std::string orig;  // first word as written, for messages
    Pos p;
    bool done = false;
  };
  std::vector<Constraint> cons;

  void init() {
    n = (int)src.size();
    t.assign(n, std::vector<int>(n, -1));
    inv.assign(n, -1);
    for (int a = 0; a < n; ++a) {
      t[a][src[a]] = a;  // a . id_src(a)
      t[tgt[a]][a] = a;  // id_tgt(a) . a
    }
  }

  std::string pair_name(int a, int b) const { return names[a] + " " + names[b]; }

  void set(int a, int b, int c, Pos p) {
    if (fatal || t[a][b] == c) return;
    if (t[a][b] != -1) {
      diags.push_back({p.line, p.col, "inconsistent composition",
                       "conflicting composites for '" + pair_name(a, b) +
                           "': " + names[t[a][b]] + " vs " + names[c]});
      fatal = true;
      return;
    }
    t[a][b] = c;
    changed = true;
  }

  void set_inv(int a, int b, Pos p) {
    if (fatal) return;
    if (inv[a] == -1) {
      inv[a] = b;
      changed = true;
    } else if (inv[a] != b) {
      diags.push_back({p.line, p.col, "inconsistent composition",
                       "conflicting inverses for '" + names[a] + "'"});
      fatal = true;
    }
  }

  void collapse(std::vector<int>& w) const {
    bool more = true;
    while (more && w.size() > 1) {
      more = false;
      for (size_t i = 0; i + 1 < w.size(); ++i) {
        int c = t[w[i]][w[i + 1]];
        if (c != -1) {
          w[i] = c;
          w.erase(w.begin() + i + 1);
          more = true;
          break;
        }
      }
    }
  }

  void step_constraints() {
    for (auto& con : cons) {
      if (con.done || fatal) continue;
      collapse(con.lhs);
      collapse(con.rhs);
      const std::vector<int>*one = nullptr, *two = nullptr;
      if (con.lhs.size() == 1 && con.rhs.size() == 1) {
        if (con.lhs[0] != con.rhs[0]) {
          diags.push_back({con.p.line, con.p.col, "inconsistent composition",
                           "relation gives conflicting values for '" +
                               con.orig + "'"});
          fatal = true;
        }
        con.done = true;
        continue;
      }
      if (con.lhs.size() == 1 && con.rhs.size() == 2) {
        one = &con.lhs;
        two = &con.rhs;
      } else if (con.rhs.size() == 1 && con.lhs.size() == 2) {
        one = &con.rhs;
        two = &con.lhs;
      }
      if (one) {
        set((*two)[0], (*two)[1], (*one)[0], con.p);
        con.done = true;
      }
    }
  }

  void saturate() {
    Pos p = gpos;
    for (int iter = 0; iter < 1000 && !fatal; ++iter) {
      changed = false;
      step_constraints();
      // Inverse registration: a composite equal to an identity pairs the
      // factors.
      for (int a = 0; a < n && !fatal; ++a)
        for (int b = 0; b < n && !fatal; ++b)
          if (t[a][b] != -1 && t[a][b] < nobj) {
            set_inv(a, b, p);
            set_inv(b, a, p);
          }
      // Associativity: (ab)c = a(bc) fills whichever side is missing.
      for (int a = 0; a < n && !fatal; ++a)
        for (int b = 0; b < n; ++b) {
          if (src[a] != tgt[b] || t[a][b] == -1) continue;
          int ab = t[a][b];
          for (int c = 0; c < n; ++c) {
            if (src[b] != tgt[c] || t[b][c] == -1) continue;
            int bc = t[b][c];
            if (t[ab][c] != -1 && t[a][bc] == -1) set(a, bc, t[ab][c], p);
            if (t[a][bc] != -1 && t[ab][c] == -1) set(ab, c, t[a][bc], p);
            if (fatal) break;
          }
          if (fatal) break;
        }
      // Cancellation and the anti-homomorphism rule.
      for (int a = 0; a < n && !fatal; ++a)
        for (int b = 0; b < n && !fatal; ++b) {
          int c = t[a][b];
          if (c == -1) continue;
          if (inv[a] != -1) set(inv[a], c, b, p);
          if (fatal) break;
          if (inv[b] != -1) set(c, inv[b], a, p);
          if (fatal) break;
          if (inv[a] != -1 && inv[b] != -1 && inv[c] != -1)
            set(inv[b], inv[a], inv[c], p);
        }
      if (!changed) break;
    }
    if (fatal) return;
    // Whatever remains open now is genuinely underdetermined.
    std::vector<std::string> missing;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (src[a] == tgt[b] && t[a][b] == -1) missing.push_back(pair_name(a, b));
    if (!missing.empty()) {
      std::string msg = "composition table incomplete: ";
      for (size_t i = 0; i < missing.size() && i < 5; ++i) {
        if (i) msg += ", ";
        msg += missing[i];
      }
      if (missing.size() > 5)
        msg += ", ... (" + std::to_string(missing.size()) + " entries)";
      diags.push_back(
          {gpos.line, gpos.col, "incomplete composition", msg});
      fatal = true;
      return;
    }
    for (auto& con : cons) {
      if (con.done) continue;
      collapse(con.lhs);
      collapse(con.rhs);
      if (con.lhs.size() != 1 || con.rhs.size() != 1 ||
          con.lhs[0] != con.rhs[0]) {
        diags.push_back({con.p.line, con.p.col, "inconsistent composition",
                         "relation gives conflicting values for '" + con.orig +
                             "'"});
        fatal = true;
        return;
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Semantic resolution

struct Builder {
  Builder(const RawDoc& raw_, std::vector<Diagnostic>& diags_)
      : raw(raw_), diags(diags_) {}

  const RawDoc& raw;
  std::vector<Diagnostic>& diags;

  std::optional<CoeffField> fld;
  std::map<std::string, int> obj_id, morph_id;
  std::optional<Groupoid> grp;
  std::optional<SplitRing> rng;
  std::vector<std::vector<int>> obj_idx;
  std::map<std::string, int> idem_id;
  std::optional<ActionSystem> sys;
  std::vector<std::pair<std::string, MorphSet>> subgroupoids;
  std::vector<std::pair<std::string, BlockSubring>> subrings;
  std::vector<std::string> assertions;

  void diag(Pos p, const std::string& cat, const std::string& msg) {
    diags.push_back({p.line, p.col, cat, msg});
  }

  void field_stage() {
    if (!raw.have_field) {
      diag({1, 1}, "syntax", "missing field section");
      return;
    }
    std::string err;
    fld = CoeffField::parse(raw.field_expr.s, &err);
    if (!fld)
      diag(raw.field_expr.p, "invalid field",
           err.empty() ? "unrecognized field '" + raw.field_expr.s + "'" : err);
  }

  void groupoid_stage() {
    if (!raw.have_groupoid) {
      diag({1, 1}, "syntax", "missing groupoid section");
      return;
    }
    bool clean = true;
    GroupoidData d;
    for (const auto& o : raw.objects) {
      if (obj_id.count(o.s)) {
        diag(o.p, "syntax", "duplicate name '" + o.s + "'");
        clean = false;
        continue;
      }
      obj_id[o.s] = (int)d.object_names.size();
      d.object_names.push_back(o.s);
      d.morph_names.push_back(o.s);
      d.src.push_back(obj_id[o.s]);
      d.tgt.push_back(obj_id[o.s]);
      morph_id[o.s] = obj_id[o.s];
    }
    if (d.object_names.empty()) {
      diag(raw.groupoid_pos, "syntax", "a groupoid needs at least one object");
      clean = false;
    }
    for (const auto& a : raw.arrows) {
      if (morph_id.count(a.name.s)) {
        diag(a.name.p, "syntax", "duplicate name '" + a.name.s + "'");
        clean = false;
        continue;
      }
      auto si = obj_id.find(a.src.s);
      if (si == obj_id.end()) {
        diag(a.src.p, "unknown name", "unknown object " + a.src.s);
        clean = false;
        continue;
      }
      auto ti = obj_id.find(a.tgt.s);
      if (ti == obj_id.end()) {
        diag(a.tgt.p, "unknown name", "unknown object " + a.tgt.s);
        clean = false;
        continue;
      }
      morph_id[a.name.s] = (int)d.morph_names.size();
      d.morph_names.push_back(a.name.s);
      d.src.push_back(si->second);
      d.tgt.push_back(ti->second);
    }
    if (!clean) return;

    TableBuilder tb{d.morph_names, d.src,  d.tgt, (int)d.object_names.size(),
                    diags,         raw.groupoid_pos};
    tb.init();
    for (const auto& eq : raw.eqs) {
      std::vector<std::vector<int>> words;
      std::vector<std::pair<int, int>> ends;  // (src, tgt) of each word
      bool ok = true;
      for (const auto& w : eq.words) {
        std::vector<int> ids;
        for (const auto& nm : w) {
          auto it = morph_id.find(nm.s);
          if (it == morph_id.end()) {
            diag(nm.p, "unknown name", "unknown morphism " + nm.s);
            ok = false;
            break;
          }
          ids.push_back(it->second);
        }
        if (!ok) break;
        for (size_t i = 0; i + 1 < ids.size(); ++i)
          if (d.src[ids[i]] != d.tgt[ids[i + 1]]) {
            diag(eq.p, "domain mismatch",
                 "word is not composable at '" + d.morph_names[ids[i]] + " " +
                     d.morph_names[ids[i + 1]] + "'");
            ok = false;
            break;
          }
        if (!ok) break;
        ends.push_back({d.src[ids.back()], d.tgt[ids.front()]});
        words.push_back(std::move(ids));
      }
      if (!ok) continue;
      for (size_t i = 1; i < ends.size(); ++i)
        if (ends[i] != ends[0]) {
          diag(eq.p, "domain mismatch",
               "the sides of a relation must share source and target");
          ok = false;
          break;
        }
      if (!ok) continue;
      std::string orig;
      for (const auto& nm : eq.words[0])
        orig += (orig.empty() ? "" : " ") + nm.s;
      for (size_t i = 1; i < words.size(); ++i)
        tb.cons.push_back({words[0], words[i], orig, eq.p, false});
    }
    tb.saturate();
    if (tb.fatal) return;
    d.table = std::move(tb.t);
    std::string err;
    grp = Groupoid::make(std::move(d), &err);
    if (!grp)
      diag(raw.groupoid_pos, "inconsistent composition", err);
  }

  void ring_stage() {
    if (!raw.have_ring) {
      diag({1, 1}, "syntax", "missing ring section");
      return;
    }
    if (!fld || obj_id.empty()) return;
    bool clean = true;
    obj_idx.assign(obj_id.size(), {});
    std::vector<char> covered(obj_id.size(), 0);
    int total = 0;
    for (const auto& [obj, idems] : raw.ring_clauses) {
      auto oi = obj_id.find(obj.s);
      if (oi == obj_id.end()) {
        diag(obj.p, "unknown name", "unknown object " + obj.s);
        clean = false;
        continue;
      }
      if (covered[oi->second]) {
        diag(obj.p, "syntax", "duplicate ring clause for object " + obj.s);
        clean = false;
        continue;
      }
      covered[oi->second] = 1;
      for (const auto& nm : idems) {
        long v = -1;
        if (nm.s.size() >= 2 && nm.s[0] == 'e' && nm.s[1] != '0' &&
            nm.s.find_first_not_of("0123456789", 1) == std::string::npos)
          v = std::stol(nm.s.substr(1));
        if (v < 1) {
          diag(nm.p, "syntax",
               "idempotent names must be e1..eN, got '" + nm.s + "'");
          clean = false;
          continue;
        }
        if (idem_id.count(nm.s)) {
          diag(nm.p, "syntax", "duplicate idempotent " + nm.s);
          clean = false;
          continue;
        }
        idem_id[nm.s] = (int)(v - 1);
        obj_idx[oi->second].push_back((int)(v - 1));
        ++total;
      }
    }
    for (size_t x = 0; x < covered.size(); ++x)
      if (!covered[x]) {
        diag(raw.ring_pos, "syntax",
             "ring section does not cover object " + obj_name(x));
        clean = false;
      }
    for (int i = 0; i < total; ++i)
      if (!idem_id.count("e" + std::to_string(i + 1))) {
        diag(raw.ring_pos, "syntax",
             "idempotent names must form e1..e" + std::to_string(total) +
                 " with no gaps");
        clean = false;
        break;
      }
    if (!clean) {
      obj_idx.clear();
      idem_id.clear();
      return;
    }
    for (auto& v : obj_idx) std::sort(v.begin(), v.end());
    rng.emplace(*fld, total);
  }

  std::string obj_name(size_t id) const {
    for (const auto& [k, v] : obj_id)
      if (v == (int)id) return k;
    return "?";
  }

  std::optional<int> resolve_aut(const Name& tag) {
    if (tag.s.empty()) return 0;
    auto a = fld->aut_by_name(tag.s);
    if (!a)
      diag(tag.p, "unknown name",
           "unknown automorphism '" + tag.s + "' for field " + fld->name());
    return a;
  }

  void action_stage() {
    if (!grp || !rng) return;
    int nm = grp->size(), nobj = grp->num_objects();
    std::vector<ArrowMap> maps(nm);
    for (int x = 0; x < nobj; ++x) {
      maps[x].dom = obj_idx[x];
      maps[x].img = obj_idx[x];
      maps[x].aut.assign(obj_idx[x].size(), 0);
    }
    std::vector<char> seen(nm, 0);
    bool clean = true;
    for (const auto& cl : raw.action_clauses) {
      auto mi = morph_id.find(cl.arrow.s);
      if (mi == morph_id.end()) {
        diag(cl.arrow.p, "unknown name", "unknown arrow " + cl.arrow.s);
        clean = false;
        continue;
      }
      int m = mi->second;
      if (grp->is_identity(m)) {
        diag(cl.arrow.p, "syntax",
             "identity " + cl.arrow.s + " acts identically; leave it out");
        clean = false;
        continue;
      }
      if (seen[m]) {
        diag(cl.arrow.p, "syntax", "duplicate action clause for " + cl.arrow.s);
        clean = false;
        continue;
      }
      seen[m] = 1;
      std::vector<std::array<int, 3>> triples;
      std::set<int> doms, imgs;
      for (const auto& mp : cl.maps) {
        auto di = idem_id.find(mp.dom.s);
        if (di == idem_id.end()) {
          diag(mp.dom.p, "unknown name", "unknown idempotent " + mp.dom.s);
          clean = false;
          continue;
        }
        auto ii = idem_id.find(mp.img.s);
        if (ii == idem_id.end()) {
          diag(mp.img.p, "unknown name", "unknown idempotent " + mp.img.s);
          clean = false;
          continue;
        }
        auto aut = resolve_aut(mp.aut);
        if (!aut) {
          clean = false;
          continue;
        }
        int d = di->second, i = ii->second;
        const auto& sidx = obj_idx[grp->src(m)];
        const auto& tidx = obj_idx[grp->tgt(m)];
        if (!std::binary_search(sidx.begin(), sidx.end(), d)) {
          diag(mp.dom.p, "domain mismatch",
               "domain idempotent " + mp.dom.s + " is not over object " +
                   grp->object_name(grp->src(m)));
          clean = false;
          continue;
        }
        if (!std::binary_search(tidx.begin(), tidx.end(), i)) {
          diag(mp.img.p, "domain mismatch",
               "image idempotent " + mp.img.s + " is not over object " +
                   grp->object_name(grp->tgt(m)));
          clean = false;
          continue;
        }
        if (!doms.insert(d).second) {
          diag(mp.dom.p, "non-bijective map",
               "idempotent " + mp.dom.s + " repeats in the domain");
          clean = false;
          continue;
        }
        if (!imgs.insert(i).second) {
          diag(mp.img.p, "non-bijective map",
               "idempotent " + mp.img.s + " repeats in the image");
          clean = false;
          continue;
        }
        triples.push_back({d, i, *aut});
      }
      std::sort(triples.begin(), triples.end());
      for (const auto& tr : triples) {
        maps[m].dom.push_back(tr[0]);
        maps[m].img.push_back(tr[1]);
        maps[m].aut.push_back(tr[2]);
      }
    }
    if (!clean) return;
    std::string err;
    sys = ActionSystem::make(*grp, *rng, obj_idx, std::move(maps), &err);
    if (!sys) {
      Pos p = raw.have_action ? raw.action_pos : raw.groupoid_pos;
      diag(p, "domain mismatch", err);
    }
  }

  void named_stage() {
    if (!sys) return;
    for (const auto& [name, members] : raw.subgroupoids) {
      bool clean = true;
      std::set<int> ids;
      for (const auto& nm : members) {
        auto it = morph_id.find(nm.s);
        if (it == morph_id.end()) {
          diag(nm.p, "unknown name", "unknown morphism " + nm.s);
          clean = false;
          continue;
        }
        ids.insert(it->second);
      }
      for (const auto& prev : subgroupoids)
        if (prev.first == name.s) {
          diag(name.p, "syntax", "duplicate subgroupoid name " + name.s);
          clean = false;
        }
      if (clean)
        subgroupoids.push_back({name.s, MorphSet(ids.begin(), ids.end())});
    }
    for (const auto& [name, terms] : raw.subrings) {
      bool clean = true;
      BlockSubring t;
      for (const auto& term : terms) {
        SubringBlock b;
        if (term.tag.s == "k") {
          b.subfield = fld->full_subfield();
        } else if (term.tag.s.size() > 1 && term.tag.s[0] == 'k' &&
                   term.tag.s.find_first_not_of("0123456789", 1) ==
                       std::string::npos) {
          int j = std::stoi(term.tag.s.substr(1));
          if (j >= (int)fld->subfields().size()) {
            diag(term.tag.p, "invalid subring",
                 "subring " + name.s + ": no subfield " + term.tag.s + " in " +
                     fld->name());
            clean = false;
            continue;
          }
          b.subfield = j;
        } else {
          diag(term.tag.p, "invalid subring",
               "subring " + name.s + ": unknown subfield tag '" + term.tag.s +
                   "'");
          clean = false;
          continue;
        }
        for (const auto& leg : term.legs) {
          auto it = idem_id.find(leg.idem.s);
          if (it == idem_id.end()) {
            diag(leg.idem.p, "unknown name",
                 "unknown idempotent " + leg.idem.s);
            clean = false;
            continue;
          }
          auto aut = resolve_aut(leg.aut);
          if (!aut) {
            clean = false;
            continue;
          }
          b.indices.push_back(it->second);
          b.transport.push_back(*aut);
        }
        t.blocks.push_back(std::move(b));
      }
      for (const auto& prev : subrings)
        if (prev.first == name.s) {
          diag(name.p, "syntax", "duplicate subring name " + name.s);
          clean = false;
        }
      if (!clean) continue;
      std::string err;
      if (!sys->ring().subring_valid(t, &err)) {
        diag(name.p, "invalid subring", "subring " + name.s + ": " + err);
        continue;
      }
      subrings.push_back({name.s, sys->ring().canonicalize(std::move(t))});
    }
  }

  void assert_stage() {
    if (!sys) return;
    for (const auto& nm : raw.asserts) {
      std::string a = nm.s == "group_type" ? "grouptype" : nm.s;
      bool pass;
      if (a == "global") {
        pass = sys->is_global();
      } else if (a == "partial") {
        pass = !sys->is_global();
      } else if (a == "grouptype") {
        MorphSet all(sys->groupoid().size());
        for (int i = 0; i < sys->groupoid().size(); ++i) all[i] = i;
        pass = sys->group_type(all).ok;
      } else if (a == "connected") {
        pass = sys->groupoid().components().size() == 1;
      } else {
        diag(nm.p, "syntax", "unknown assertion '" + nm.s + "'");
        continue;
      }
      assertions.push_back(a);
      if (!pass)
        diag(nm.p, "assertion", "assertion failed: the action is not " + a);
    }
  }
};

// ---------------------------------------------------------------------------
// Rendering helpers

std::string subfield_tag(const CoeffField& k, int sub) {
  if (sub == k.full_subfield()) return "k";
  return "k" + std::to_string(sub);
}

std::string subring_text(const SplitRing& ring, const BlockSubring& t) {
  const CoeffField& k = ring.field();
  BlockSubring c = ring.canonicalize(t);
  std::string out;
  for (const auto& b : c.blocks) {
    if (!out.empty()) out += " + ";
    out += subfield_tag(k, b.subfield) + "(";
    for (size_t j = 0; j < b.indices.size(); ++j) {
      if (j) out += "+";
      if (b.transport[j] != 0) out += k.aut_name(b.transport[j]) + " ";
      out += "e" + std::to_string(b.indices[j] + 1);
    }
    out += ")";
  }
  return out;
}

ordered_json subring_json(const SplitRing& ring, const BlockSubring& t) {
  const CoeffField& k = ring.field();
  BlockSubring c = ring.canonicalize(t);
  ordered_json blocks = ordered_json::array();
  for (const auto& b : c.blocks) {
    ordered_json jb;
    ordered_json idems = ordered_json::array();
    for (int i : b.indices) idems.push_back("e" + std::to_string(i + 1));
    jb["idempotents"] = idems;
    jb["subfield"] = subfield_tag(k, b.subfield);
    ordered_json tr = ordered_json::array();
    for (int a : b.transport) tr.push_back(k.aut_name(a));
    jb["transport"] = tr;
    blocks.push_back(jb);
  }
  ordered_json j;
  j["blocks"] = blocks;
  return j;
}

std::string morph_list(const Groupoid& g, const MorphSet& ms) {
  std::string out = "{";
  for (size_t i = 0; i < ms.size(); ++i) {
    if (i) out += ", ";
    out += g.morph_name(ms[i]);
  }
  return out + "}";
}

ordered_json morph_json(const Groupoid& g, const MorphSet& ms) {
  ordered_json j = ordered_json::array();
  for (int m : ms) j.push_back(g.morph_name(m));
  return j;
}

}  // namespace

const MorphSet* SpecDocument::subgroupoid(const std::string& name) const {
  for (const auto& p : subgroupoids)
    if (p.first == name) return &p.second;
  return nullptr;
}

const BlockSubring* SpecDocument::subring(const std::string& name) const {
  for (const auto& p : subrings)
    if (p.first == name) return &p.second;
  return nullptr;
}

ParseResult parse_spec(const std::string& text) {
  ParseResult res;
  Parser parser(text, res.diagnostics);
  RawDoc raw = parser.run();
  Builder b{raw, res.diagnostics};
  b.field_stage();
  b.groupoid_stage();
  b.ring_stage();
  b.action_stage();
  b.named_stage();
  b.assert_stage();
  if (res.diagnostics.empty() && b.sys) {
    res.doc.emplace(SpecDocument{std::move(*b.sys), std::move(b.subgroupoids),
                                 std::move(b.subrings),
                                 std::move(b.assertions)});
  } else if (res.diagnostics.empty()) {
    res.diagnostics.push_back({1, 1, "syntax", "empty or unusable document"});
  }
  return res;
}

std::string emit_spec(const SpecDocument& doc) {
  const ActionSystem& sys = doc.sys;
  const Groupoid& g = sys.groupoid();
  int nobj = g.num_objects(), nm = g.size();
  std::vector<std::string> sections;

  sections.push_back("field: " + sys.field().name() + ";\n");

  std::string gs = "groupoid {\n  objects: ";
  for (int x = 0; x < nobj; ++x)
    gs += (x ? ", " : "") + g.object_name(x);
  gs += ";\n";
  if (nm > nobj) {
    gs += "  arrows:\n";
    for (int m = nobj; m < nm; ++m) {
      gs += "    " + g.morph_name(m) + ": " + g.object_name(g.src(m)) +
            " -> " + g.object_name(g.tgt(m));
      gs += m + 1 < nm ? ",\n" : ";\n";
    }
    std::vector<std::pair<int, int>> pairs;
    for (int a = nobj; a < nm; ++a)
      for (int c = nobj; c < nm; ++c)
        if (g.composable(a, c)) pairs.push_back({a, c});
    if (!pairs.empty()) {
      gs += "  compose:\n";
      for (size_t i = 0; i < pairs.size(); ++i) {
        auto [a, c] = pairs[i];
        gs += "    " + g.morph_name(a) + " " + g.morph_name(c) + " = " +
              g.morph_name(g.compose(a, c));
        gs += i + 1 < pairs.size() ? ",\n" : ";\n";
      }
    }
  }
  gs += "}\n";
  sections.push_back(gs);

  std::string rs = "ring {\n";
  for (int x = 0; x < nobj; ++x) {
    rs += "  " + g.object_name(x) + ": ";
    const auto& idx = sys.indices_of_object(x);
    for (size_t i = 0; i < idx.size(); ++i)
      rs += (i ? ", " : "") + ("e" + std::to_string(idx[i] + 1));
    rs += ";\n";
  }
  rs += "}\n";
  sections.push_back(rs);

  std::string as;
  for (int m = nobj; m < nm; ++m) {
    const ArrowMap& am = sys.arrow_map(m);
    if (am.dom.empty()) continue;
    as += "  " + g.morph_name(m) + ": ";
    for (size_t j = 0; j < am.dom.size(); ++j) {
      if (j) as += ", ";
      as += "e" + std::to_string(am.dom[j] + 1) + " -> ";
      if (am.aut[j] != 0) as += sys.field().aut_name(am.aut[j]) + " ";
      as += "e" + std::to_string(am.img[j] + 1);
    }
    as += ";\n";
  }
  if (!as.empty()) sections.push_back("action {\n" + as + "}\n");

  for (const auto& [name, members] : doc.subgroupoids) {
    std::string ss = "subgroupoid " + name + " { ";
    for (size_t i = 0; i < members.size(); ++i)
      ss += (i ? ", " : "") + g.morph_name(members[i]);
    sections.push_back(ss + " }\n");
  }
  for (const auto& [name, t] : doc.subrings)
    sections.push_back("subring " + name + ": " + subring_text(sys.ring(), t) +
                       ";\n");
  if (!doc.assertions.empty()) {
    std::string xs = "assert ";
    for (size_t i = 0; i < doc.assertions.size(); ++i)
      xs += (i ? ", " : "") + doc.assertions[i];
    sections.push_back(xs + ";\n");
  }

  std::string out;
  for (size_t i = 0; i < sections.size(); ++i) {
    if (i) out += "\n";
    out += sections[i];
  }
  return out;
}

std::string emit_subring(const SplitRing& ring, const BlockSubring& t,
                         EmitFormat f) {
  if (f == EmitFormat::Text) return subring_text(ring, t) + "\n";
  return subring_json(ring, t).dump() + "\n";
}

std::string emit_fixer(const Groupoid& g, const FixerSet& fx, EmitFormat f) {
  if (f == EmitFormat::Text)
    return morph_list(g, fx.morphisms) +
           (fx.is_subgroupoid ? " (subgroupoid: yes)\n"
                              : " (subgroupoid: no)\n");
  ordered_json j;
  j["morphisms"] = morph_json(g, fx.morphisms);
  j["is_subgroupoid"] = fx.is_subgroupoid;
  return j.dump() + "\n";
}

std::string emit_table(const ActionSystem& sys, const CorrespondenceTable& t,
                       EmitFormat f) {
  if (f == EmitFormat::Text) {
    if (!t.ok) return "error: " + t.err + "\n";
    std::string out;
    for (size_t i = 0; i < t.rows.size(); ++i) {
      out += "H" + std::to_string(i) + " = " +
             morph_list(sys.groupoid(), t.rows[i].subgroupoid) + "  <->  T" +
             std::to_string(i) + " = " +
             subring_text(sys.ring(), t.rows[i].ring) + "\n";
    }
    return out;
  }
  ordered_json j;
  j["ok"] = t.ok;
  j["error"] = t.err;
  ordered_json rows = ordered_json::array();
  if (t.ok)
    for (const auto& row : t.rows) {
      ordered_json r;
      r["subgroupoid"] = morph_json(sys.groupoid(), row.subgroupoid);
      r["ring"] = subring_json(sys.ring(), row.ring);
      rows.push_back(r);
    }
  j["rows"] = rows;
  return j.dump() + "\n";
}

std::string emit_report(const ValidationReport& r, EmitFormat f) {
  if (f == EmitFormat::Text) {
    if (r.diagnostics.empty()) return "OK\n";
    std::string out;
    for (const auto& d : r.diagnostics)
      out += std::to_string(d.line) + ":" + std::to_string(d.col) + ": " +
             d.category + ": " + d.message + "\n";
    return out;
  }
  ordered_json j;
  j["ok"] = r.diagnostics.empty();
  ordered_json ds = ordered_json::array();
  for (const auto& d : r.diagnostics) {
    ordered_json jd;
    jd["line"] = d.line;
    jd["col"] = d.col;
    jd["category"] = d.category;
    jd["message"] = d.message;
    ds.push_back(jd);
  }
  j["diagnostics"] = ds;
  return j.dump() + "\n";
}

}  // namespace gpd
