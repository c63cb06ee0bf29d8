#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dsl.hpp"
#include "galois.hpp"
#include "invariants.hpp"
#include "testutil.hpp"

using namespace gpd;
using gpd::testutil::diamond_data;
using gpd::testutil::diamond_system;
using gpd::testutil::exe1_system;
using gpd::testutil::exe2_system;
using gpd::testutil::groupoid12_system;

namespace {

const char* kExe1Text = R"(# two objects, one connecting arrow pair
field: GF(5);
groupoid {
  objects: x, y;
  arrows: g: x -> y, ginv: y -> x;
  compose: ginv g = x, g ginv = y;
}
ring {
  x: e1;
  y: e2;
}
action {
  g: e1 -> e2;
  ginv: e2 -> e1;
}
assert global, grouptype;
)";

// Same document with the codomain idempotent of g misspelled; the bad token
// sits at line 13, column 12.
const char* kExe1BadIdem = R"(# two objects, one connecting arrow pair
field: GF(5);
groupoid {
  objects: x, y;
  arrows: g: x -> y, ginv: y -> x;
  compose: ginv g = x, g ginv = y;
}
ring {
  x: e1;
  y: e2;
}
action {
  g: e1 -> e9;
  ginv: e2 -> e1;
}
)";

// The two-object groupoid with isotropy C2 at both objects, presented by
// generator relations only; closure has to derive the remaining composites.
const char* kTwoIsoText = R"(field: GF(5);
groupoid {
  objects: x, y;
  arrows: g: x -> x, h: y -> y, l: x -> y, linv: y -> x, m: x -> y, minv: y -> x;
  compose: g g = x, h h = y, l g = m, h l = m, linv l = x, l linv = y, minv m = x, m minv = y;
}
ring { x: e1, e2; y: e3, e4; }
action {
  g: e1 -> e2, e2 -> e1;
  h: e3 -> e4, e4 -> e3;
  l: e1 -> e3, e2 -> e4;
  linv: e3 -> e1, e4 -> e2;
  m: e1 -> e4, e2 -> e3;
  minv: e3 -> e2, e4 -> e1;
}
assert global, grouptype, connected;
)";

// The partial conjugation action of the same groupoid over Q(i), with named
// subgroupoids and a named subring.
const char* kPartialConjText = R"(field: Q(i);
groupoid {
  objects: x, y;
  arrows: g: x -> x, h: y -> y, l: x -> y, linv: y -> x, m: x -> y, minv: y -> x;
  compose: g g = x, h h = y, l g = m, h l = m, linv l = x, l linv = y, minv m = x, m minv = y;
}
ring { x: e1, e2; y: e3, e4; }
action {
  g: e1 -> conj e1;
  h: e3 -> conj e3;
  l: e1 -> e3, e2 -> e4;
  linv: e3 -> e1, e4 -> e2;
  m: e1 -> conj e3;
  minv: e3 -> conj e1;
}
subgroupoid H8 { x, y, g, h }
subgroupoid H10 { x, y, m, minv }
subring T: k0(e1+e3) + k(e2) + k(e4);
assert partial, grouptype;
)";

SpecDocument parse_ok(const std::string& text) {
  auto res = parse_spec(text);
  for (const auto& d : res.diagnostics)
    MESSAGE(d.line, ":", d.col, ": ", d.category, ": ", d.message);
  REQUIRE(res.diagnostics.empty());
  REQUIRE(res.doc.has_value());
  return *res.doc;
}

bool has_diag(const ParseResult& res, const std::string& category,
              const std::string& substring) {
  for (const auto& d : res.diagnostics)
    if (d.category == category &&
        d.message.find(substring) != std::string::npos)
      return true;
  return false;
}

bool maps_equal(const ActionSystem& a, const ActionSystem& b) {
  if (a.groupoid().size() != b.groupoid().size()) return false;
  for (int m = 0; m < a.groupoid().size(); ++m) {
    const ArrowMap &x = a.arrow_map(m), &y = b.arrow_map(m);
    if (x.dom != y.dom || x.img != y.img || x.aut != y.aut) return false;
  }
  return true;
}

BlockSubring pb(std::vector<std::vector<int>> parts) {
  BlockSubring t;
  for (auto& p : parts) {
    SubringBlock b;
    b.indices = p;
    b.subfield = 0;
    b.transport.assign(p.size(), 0);
    t.blocks.push_back(b);
  }
  return t;
}

}  // namespace

TEST_CASE("a minimal document parses to the expected system") {
  auto doc = parse_ok(kExe1Text);
  const ActionSystem& sys = doc.sys;
  CHECK(sys.groupoid().size() == 4);
  CHECK(sys.groupoid().num_objects() == 2);
  CHECK(sys.ring().dim() == 2);
  CHECK(sys.field().name() == "GF(5)");
  CHECK(sys.is_global());
  CHECK(doc.assertions == std::vector<std::string>{"global", "grouptype"});

  auto ref = exe1_system(CoeffField::galois(5, 1));
  CHECK(sys.groupoid().data().table == ref.groupoid().data().table);
  CHECK(sys.groupoid().data().morph_names == ref.groupoid().data().morph_names);
  CHECK(maps_equal(sys, ref));
  CHECK(sys.indices_of_object(0) == std::vector<int>{0});
  CHECK(sys.indices_of_object(1) == std::vector<int>{1});
}

TEST_CASE("unknown idempotent is reported at the offending token") {
  auto res = parse_spec(kExe1BadIdem);
  CHECK_FALSE(res.doc.has_value());
  REQUIRE_FALSE(res.diagnostics.empty());
  const Diagnostic& d = res.diagnostics[0];
  CHECK(d.category == "unknown name");
  CHECK(d.message.find("unknown idempotent e9") != std::string::npos);
  CHECK(d.line == 13);
  CHECK(d.col == 12);
}

TEST_CASE("generator relations close to the full composition table") {
  auto doc = parse_ok(kTwoIsoText);
  auto ref = exe2_system();
  CHECK(doc.sys.groupoid().data().table == diamond_data().table);
  CHECK(doc.sys.groupoid().data().morph_names ==
        ref.groupoid().data().morph_names);
  CHECK(maps_equal(doc.sys, ref));
  CHECK(doc.sys.is_global());
}

TEST_CASE("underivable and conflicting composites are diagnosed") {
  auto incomplete = parse_spec(R"(field: Q;
groupoid { objects: x; arrows: s: x -> x; }
ring { x: e1; }
)");
  CHECK_FALSE(incomplete.doc.has_value());
  CHECK(has_diag(incomplete, "incomplete composition", "s s"));

  auto conflict = parse_spec(R"(field: Q;
groupoid { objects: x; arrows: s: x -> x; compose: s s = x, s s = s; }
ring { x: e1; }
)");
  CHECK_FALSE(conflict.doc.has_value());
  CHECK(has_diag(conflict, "inconsistent composition", "s s"));
}

TEST_CASE("name resolution failures carry the unknown-name category") {
  auto bad_obj = parse_spec(R"(field: Q;
groupoid { objects: x; arrows: g: x -> w; compose: g g = x; }
ring { x: e1; }
)");
  CHECK(has_diag(bad_obj, "unknown name", "unknown object w"));

  auto bad_word = parse_spec(R"(field: Q;
groupoid { objects: x; arrows: s: x -> x; compose: s q = x; }
ring { x: e1; }
)");
  CHECK(has_diag(bad_word, "unknown name", "unknown morphism q"));

  auto bad_member = parse_spec(std::string(kExe1Text) +
                               "subgroupoid W { x, qq }\n");
  CHECK(has_diag(bad_member, "unknown name", "unknown morphism qq"));

  auto bad_aut = parse_spec(R"(field: Q;
groupoid { objects: x, y; arrows: g: x -> y, ginv: y -> x; compose: ginv g = x, g ginv = y; }
ring { x: e1; y: e2; }
action { g: e1 -> conj e2; ginv: e2 -> e1; }
)");
  CHECK(has_diag(bad_aut, "unknown name", "automorphism"));
}

TEST_CASE("map-shape failures are categorized") {
  auto dup_dom = parse_spec(R"(field: Q;
groupoid { objects: x, y; arrows: g: x -> y, ginv: y -> x; compose: ginv g = x, g ginv = y; }
ring { x: e1, e2; y: e3, e4; }
action { g: e1 -> e3, e1 -> e4; }
)");
  CHECK(has_diag(dup_dom, "non-bijective map", "e1"));

  auto dup_img = parse_spec(R"(field: Q;
groupoid { objects: x, y; arrows: g: x -> y, ginv: y -> x; compose: ginv g = x, g ginv = y; }
ring { x: e1, e2; y: e3, e4; }
action { g: e1 -> e3, e2 -> e3; }
)");
  CHECK(has_diag(dup_img, "non-bijective map", "e3"));

  auto wrong_src = parse_spec(R"(field: Q;
groupoid { objects: x, y; arrows: g: x -> y, ginv: y -> x; compose: ginv g = x, g ginv = y; }
ring { x: e1; y: e2; }
action { g: e2 -> e1; }
)");
  CHECK(has_diag(wrong_src, "domain mismatch", "e2"));

  auto wrong_tgt = parse_spec(R"(field: Q;
groupoid { objects: x, y; arrows: g: x -> y, ginv: y -> x; compose: ginv g = x, g ginv = y; }
ring { x: e1; y: e2; }
action { g: e1 -> e1; }
)");
  CHECK(has_diag(wrong_tgt, "domain mismatch", "e1"));
}

TEST_CASE("named sections and automorphism tags resolve") {
  auto doc = parse_ok(kPartialConjText);
  auto ref = diamond_system();
  CHECK(doc.sys.groupoid().data().table == diamond_data().table);
  CHECK(maps_equal(doc.sys, ref));
  CHECK(doc.sys.arrow_map(2).aut == std::vector<int>{1});
  CHECK_FALSE(doc.sys.is_global());

  REQUIRE(doc.subgroupoid("H8") != nullptr);
  CHECK(*doc.subgroupoid("H8") == MorphSet{0, 1, 2, 3});
  REQUIRE(doc.subgroupoid("H10") != nullptr);
  CHECK(*doc.subgroupoid("H10") == MorphSet{0, 1, 6, 7});
  CHECK(doc.subgroupoid("nope") == nullptr);

  REQUIRE(doc.subring("T") != nullptr);
  BlockSubring want;
  want.blocks.push_back({{0, 2}, 0, {0, 0}});
  int full = doc.sys.field().full_subfield();
  want.blocks.push_back({{1}, full, {0}});
  want.blocks.push_back({{3}, full, {0}});
  CHECK(doc.sys.ring().subring_equal(*doc.subring("T"), want));

  // A frobenius tag over GF(9); frob has order two there.
  auto frob_doc = parse_ok(R"(field: GF(9);
groupoid { objects: x; arrows: s: x -> x; compose: s s = x; }
ring { x: e1; }
action { s: e1 -> frob e1; }
)");
  CHECK(frob_doc.sys.arrow_map(1).aut == std::vector<int>{1});
}

TEST_CASE("subring declarations validate and canonicalize") {
  // A transport tag inside the block's Galois group collapses to the
  // identity leg: W below equals T from the base document.
  auto doc = parse_ok(std::string(kPartialConjText) +
                      "subring W: k0(e1+conj e3) + k(e2) + k(e4);\n"
                      "subring V: k(e1) + k(e2+conj e4) + k(e3);\n");
  REQUIRE(doc.subring("W") != nullptr);
  CHECK(doc.sys.ring().subring_equal(*doc.subring("W"), *doc.subring("T")));

  REQUIRE(doc.subring("V") != nullptr);
  int full = doc.sys.field().full_subfield();
  BlockSubring v;
  v.blocks.push_back({{0}, full, {0}});
  v.blocks.push_back({{1, 3}, full, {0, 1}});
  v.blocks.push_back({{2}, full, {0}});
  CHECK(doc.sys.ring().subring_equal(*doc.subring("V"), v));

  auto overlap = parse_spec(std::string(kPartialConjText) +
                            "subring B: k(e1+e2) + k(e2) + k(e3+e4);\n");
  CHECK_FALSE(overlap.doc.has_value());
  CHECK(has_diag(overlap, "invalid subring", "B"));

  auto uncovered = parse_spec(std::string(kPartialConjText) +
                              "subring C: k(e1+e2);\n");
  CHECK_FALSE(uncovered.doc.has_value());
  CHECK(has_diag(uncovered, "invalid subring", "not covered"));
}

TEST_CASE("assertions are checked against the built system") {
  auto res = parse_spec(std::string(kExe1Text) + "assert connected;\n");
  CHECK(has_diag(res, "syntax", "duplicate"));

  std::string partial_claims_global(kPartialConjText);
  auto pos = partial_claims_global.find("assert partial, grouptype;");
  REQUIRE(pos != std::string::npos);
  partial_claims_global.replace(pos, 26, "assert global;");
  auto bad = parse_spec(partial_claims_global);
  CHECK_FALSE(bad.doc.has_value());
  CHECK(has_diag(bad, "assertion", "global"));

  auto empty = parse_spec("");
  CHECK_FALSE(empty.doc.has_value());
  CHECK(has_diag(empty, "syntax", "missing"));
}

TEST_CASE("block-notation rendering matches the reference strings") {
  auto g12 = groupoid12_system();
  CHECK(emit_subring(g12.ring(), pb({{0, 1, 3, 4}, {2, 5}}),
                     EmitFormat::Text) == "k(e1+e2+e4+e5) + k(e3+e6)\n");
  CHECK(emit_subring(g12.ring(), pb({{0, 2, 5}, {1, 3, 4}}),
                     EmitFormat::Text) == "k(e1+e3+e6) + k(e2+e4+e5)\n");

  auto dia = diamond_system();
  int full = dia.field().full_subfield();
  BlockSubring h8inv;
  h8inv.blocks.push_back({{0}, 0, {0}});
  h8inv.blocks.push_back({{1}, full, {0}});
  h8inv.blocks.push_back({{2}, 0, {0}});
  h8inv.blocks.push_back({{3}, full, {0}});
  CHECK(emit_subring(dia.ring(), h8inv, EmitFormat::Text) ==
        "k0(e1) + k(e2) + k0(e3) + k(e4)\n");

  BlockSubring remark;
  remark.blocks.push_back({{0, 2}, 0, {0, 0}});
  remark.blocks.push_back({{1}, full, {0}});
  remark.blocks.push_back({{3}, full, {0}});
  CHECK(emit_subring(dia.ring(), remark, EmitFormat::Text) ==
        "k0(e1+e3) + k(e2) + k(e4)\n");

  BlockSubring twisted;
  twisted.blocks.push_back({{1, 3}, full, {0, 1}});
  CHECK(emit_subring(dia.ring(), twisted, EmitFormat::Text) ==
        "k(e2+conj e4)\n");

  CHECK(emit_subring(dia.ring(), remark, EmitFormat::Structured) ==
        "{\"blocks\":[{\"idempotents\":[\"e1\",\"e3\"],\"subfield\":\"k0\","
        "\"transport\":[\"id\",\"id\"]},{\"idempotents\":[\"e2\"],"
        "\"subfield\":\"k\",\"transport\":[\"id\"]},{\"idempotents\":"
        "[\"e4\"],\"subfield\":\"k\",\"transport\":[\"id\"]}]}\n");
}

TEST_CASE("fixer and report rendering") {
  auto dia = diamond_system();
  int full = dia.field().full_subfield();
  BlockSubring remark;
  remark.blocks.push_back({{0, 2}, 0, {0, 0}});
  remark.blocks.push_back({{1}, full, {0}});
  remark.blocks.push_back({{3}, full, {0}});
  FixerSet fx = fixer_of(dia, remark);
  CHECK(fx.morphisms == MorphSet{0, 1, 2, 3, 6, 7});
  CHECK_FALSE(fx.is_subgroupoid);
  CHECK(emit_fixer(dia.groupoid(), fx, EmitFormat::Text) ==
        "{x, y, g, h, m, minv} (subgroupoid: no)\n");
  CHECK(emit_fixer(dia.groupoid(), fx, EmitFormat::Structured) ==
        "{\"morphisms\":[\"x\",\"y\",\"g\",\"h\",\"m\",\"minv\"],"
        "\"is_subgroupoid\":false}\n");

  ValidationReport ok;
  CHECK(emit_report(ok, EmitFormat::Text) == "OK\n");
  CHECK(emit_report(ok, EmitFormat::Structured) ==
        "{\"ok\":true,\"diagnostics\":[]}\n");
  ValidationReport bad;
  bad.diagnostics.push_back({13, 12, "unknown name", "unknown idempotent e9"});
  CHECK(emit_report(bad, EmitFormat::Text) ==
        "13:12: unknown name: unknown idempotent e9\n");
  CHECK(emit_report(bad, EmitFormat::Structured) ==
        "{\"ok\":false,\"diagnostics\":[{\"line\":13,\"col\":12,"
        "\"category\":\"unknown name\",\"message\":\"unknown idempotent "
        "e9\"}]}\n");
}

TEST_CASE("correspondence-table rendering") {
  auto e1 = exe1_system(CoeffField::rationals());
  auto tab = correspondence(e1);
  REQUIRE(tab.ok);
  CHECK(emit_table(e1, tab, EmitFormat::Text) ==
        "H0 = {x, y}  <->  T0 = k(e1) + k(e2)\n"
        "H1 = {x, y, g, ginv}  <->  T1 = k(e1+e2)\n");
  CHECK(emit_table(e1, tab, EmitFormat::Structured) ==
        "{\"ok\":true,\"error\":\"\",\"rows\":[{\"subgroupoid\":"
        "[\"x\",\"y\"],\"ring\":{\"blocks\":[{\"idempotents\":[\"e1\"],"
        "\"subfield\":\"k\",\"transport\":[\"id\"]},{\"idempotents\":"
        "[\"e2\"],\"subfield\":\"k\",\"transport\":[\"id\"]}]}},"
        "{\"subgroupoid\":[\"x\",\"y\",\"g\",\"ginv\"],\"ring\":{\"blocks\":"
        "[{\"idempotents\":[\"e1\",\"e2\"],\"subfield\":\"k\",\"transport\":"
        "[\"id\",\"id\"]}]}}]}\n");

  auto dia = diamond_system();
  auto bad = correspondence(dia);
  REQUIRE_FALSE(bad.ok);
  std::string txt = emit_table(dia, bad, EmitFormat::Text);
  CHECK(txt.rfind("error: ", 0) == 0);
  CHECK(txt.find("hypothesis") != std::string::npos);
  auto parsed = nlohmann::json::parse(emit_table(dia, bad,
                                                 EmitFormat::Structured));
  CHECK(parsed["ok"] == false);
  CHECK(parsed["rows"].empty());

  // Determinism: identical inputs yield identical bytes.
  CHECK(emit_table(e1, tab, EmitFormat::Structured) ==
        emit_table(e1, correspondence(e1), EmitFormat::Structured));
}

TEST_CASE("canonical serialization is a parse fixed point") {
  auto doc = parse_ok(kExe1Text);
  std::string canon = emit_spec(doc);
  CHECK(canon ==
        "field: GF(5);\n"
        "\n"
        "groupoid {\n"
        "  objects: x, y;\n"
        "  arrows:\n"
        "    g: x -> y,\n"
        "    ginv: y -> x;\n"
        "  compose:\n"
        "    g ginv = y,\n"
        "    ginv g = x;\n"
        "}\n"
        "\n"
        "ring {\n"
        "  x: e1;\n"
        "  y: e2;\n"
        "}\n"
        "\n"
        "action {\n"
        "  g: e1 -> e2;\n"
        "  ginv: e2 -> e1;\n"
        "}\n"
        "\n"
        "assert global, grouptype;\n");
  auto doc2 = parse_ok(canon);
  CHECK(emit_spec(doc2) == canon);
  CHECK(doc2.sys.groupoid().data().table == doc.sys.groupoid().data().table);
  CHECK(maps_equal(doc2.sys, doc.sys));

  auto rich = parse_ok(kPartialConjText);
  std::string rcanon = emit_spec(rich);
  auto rich2 = parse_ok(rcanon);
  CHECK(emit_spec(rich2) == rcanon);
  CHECK(rich2.sys.groupoid().data().table == rich.sys.groupoid().data().table);
  CHECK(maps_equal(rich2.sys, rich.sys));
  REQUIRE(rich2.subgroupoid("H10") != nullptr);
  CHECK(*rich2.subgroupoid("H10") == *rich.subgroupoid("H10"));
  REQUIRE(rich2.subring("T") != nullptr);
  CHECK(rich2.sys.ring().subring_equal(*rich2.subring("T"),
                                       *rich.subring("T")));
  CHECK(rich2.assertions == rich.assertions);
}

TEST_CASE("shipped example documents parse cleanly and match the fixtures") {
  auto slurp = [](const std::string& rel) {
    std::ifstream in(std::string(GPD_SOURCE_DIR) + "/" + rel,
                     std::ios::binary);
    REQUIRE_MESSAGE(in.good(), rel);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto check = [&](const std::string& rel, const ActionSystem& want) {
    CAPTURE(rel);
    std::string text = slurp(rel);
    auto res = parse_spec(text);
    for (auto& d : res.diagnostics)
      MESSAGE(rel << ": " << d.line << ":" << d.col << ": " << d.message);
    REQUIRE(res.doc.has_value());
    const SpecDocument& doc = *res.doc;
    CHECK(doc.sys.groupoid().data().table == want.groupoid().data().table);
    CHECK(doc.sys.groupoid().data().morph_names ==
          want.groupoid().data().morph_names);
    CHECK(doc.sys.field().name() == want.field().name());
    CHECK(doc.sys.ring().dim() == want.ring().dim());
    CHECK(maps_equal(doc.sys, want));
    CHECK(emit_spec(doc) == text);  // shipped form is canonical
  };
  check("data/exe1.gpd", exe1_system(CoeffField::rationals()));
  check("data/exe2-global.gpd", exe2_system());
  check("data/groupoid-12.gpd", groupoid12_system());
  check("data/inv-semigroup.gpd", gpd::testutil::inv_semigroup_system());
  check("tests/data/union-exe1-g12.gpd", gpd::testutil::union_exe1_g12());

  std::string text = slurp("data/ex-invariant.gpd");
  auto res = parse_spec(text);
  REQUIRE(res.doc.has_value());
  const SpecDocument& doc = *res.doc;
  auto want = diamond_system();
  CHECK(doc.sys.groupoid().data().table == want.groupoid().data().table);
  CHECK(maps_equal(doc.sys, want));
  CHECK(doc.subgroupoids.size() == 11);
  REQUIRE(doc.subgroupoid("H8") != nullptr);
  CHECK(*doc.subgroupoid("H8") == MorphSet{0, 1, 2, 3});
  REQUIRE(doc.subgroupoid("H11") != nullptr);
  CHECK((int)doc.subgroupoid("H11")->size() == doc.sys.groupoid().size());
  REQUIRE(doc.subring("T") != nullptr);
  CHECK(emit_subring(doc.sys.ring(), *doc.subring("T"), EmitFormat::Text) ==
        "k0(e1+e3) + k(e2) + k(e4)\n");
  CHECK(emit_spec(doc) == text);
}
