#ifndef GPD_DSL_HPP
#define GPD_DSL_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "action.hpp"
#include "galois.hpp"
#include "invariants.hpp"

namespace gpd {

// Positioned parser/validator message.  Categories in use: "syntax",
// "unknown name", "incomplete composition", "non-bijective map",
// "domain mismatch", "inconsistent composition", "invalid field",
// "invalid subring", "assertion".
struct Diagnostic {
  int line = 0, col = 0;
  std::string category;
  std::string message;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;  // empty means OK
};

// A fully resolved .gpd document: the validated action system plus the named
// subgroupoids, named subrings, and assertions declared in the file.
// Idempotents are named e1..en in global index order; morphism and object
// names live in the groupoid.
struct SpecDocument {
  ActionSystem sys;
  std::vector<std::pair<std::string, MorphSet>> subgroupoids;
  std::vector<std::pair<std::string, BlockSubring>> subrings;
  std::vector<std::string> assertions;  // "global", "partial", "grouptype",
                                        // "connected"

  const MorphSet* subgroupoid(const std::string& name) const;
  const BlockSubring* subring(const std::string& name) const;
};

struct ParseResult {
  std::optional<SpecDocument> doc;  // set exactly when diagnostics is empty
  std::vector<Diagnostic> diagnostics;
};

// Grammar (sections in any order, `#` comments, free whitespace):
//   field: <field name>;                          Q, Q(i), Q(sqrt d), GF(p^m)
//   groupoid {
//     objects: x, y;
//     arrows: g: x -> y, ginv: y -> x;
//     compose: g ginv = y, l g = m;               words compose right-first;
//   }                                             missing composites are
//                                                 derived by closure
//   ring { x: e1, e2; y: e3; }                    names must be e1..en in order
//   action { g: e1 -> e3, e2 -> conj e4; }        optional conj / frob^k tag
//   subgroupoid NAME { x, y, g }
//   subring NAME: k0(e1+e3) + k(e2) + k(e4);      k = full field, k0 = prime
//                                                 subfield, k<j> = j-th
//                                                 subfield; conj/frob^k before
//                                                 an idempotent twists its leg
//   assert global, grouptype;
// Never throws and never aborts: every problem becomes a Diagnostic.
ParseResult parse_spec(const std::string& text);

// Canonical serialization; parse_spec(emit_spec(d)) reproduces d and is a
// byte-for-byte fixed point of the round trip.
std::string emit_spec(const SpecDocument& doc);

enum class EmitFormat { Text, Structured };

// Text renders subrings in block notation (`k(e1+e2+e4+e5) + k(e3+e6)`) and
// subgroupoids as sorted morphism-name lists.  Structured is single-line JSON
// with fixed key order; identical inputs yield identical bytes.
std::string emit_subring(const SplitRing& ring, const BlockSubring& t,
                         EmitFormat f);
std::string emit_fixer(const Groupoid& g, const FixerSet& fx, EmitFormat f);
std::string emit_table(const ActionSystem& sys, const CorrespondenceTable& t,
                       EmitFormat f);
std::string emit_report(const ValidationReport& r, EmitFormat f);

}  // namespace gpd

#endif
