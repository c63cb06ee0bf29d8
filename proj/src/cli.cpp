#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "builtins.hpp"
#include "dsl.hpp"
#include "galois.hpp"
#include "invariants.hpp"

namespace gpd {
namespace {

using ordered_json = nlohmann::ordered_json;

struct Ctx {
  std::ostream& out;
  std::ostream& err;
  EmitFormat fmt;
};

std::string builtin_list() {
  std::string s;
  for (const auto& [name, text] : builtin_specs()) {
    (void)text;
    if (!s.empty()) s += ", ";
    s += name;
  }
  return s;
}

// Document text from a file path or `example NAME`; nullopt (with a message
// on err) when the input cannot be loaded.
std::optional<std::string> load_input(const std::vector<std::string>& input,
                                      std::ostream& err) {
  if (input.empty()) {
    err << "error: an input is required (FILE or 'example NAME')\n";
    return std::nullopt;
  }
  if (input[0] == "example") {
    if (input.size() != 2) {
      err << "error: 'example' needs a builtin name (available: "
          << builtin_list() << ")\n";
      return std::nullopt;
    }
    auto& specs = builtin_specs();
    auto it = specs.find(input[1]);
    if (it == specs.end()) {
      err << "error: unknown builtin '" << input[1]
          << "' (available: " << builtin_list() << ")\n";
      return std::nullopt;
    }
    return it->second;
  }
  if (input.size() != 1) {
    err << "error: expected FILE or 'example NAME'\n";
    return std::nullopt;
  }
  std::ifstream in(input[0], std::ios::binary);
  if (!in.good()) {
    err << "error: cannot read '" << input[0] << "'\n";
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MorphSet all_morphisms(const Groupoid& g) {
  MorphSet h(g.size());
  for (int m = 0; m < g.size(); ++m) h[m] = m;
  return h;
}

// Resolves --subgroupoid (empty = every morphism); nullopt after messaging.
std::optional<MorphSet> pick_subgroupoid(const SpecDocument& doc,
                                         const std::string& name,
                                         std::ostream& err) {
  if (name.empty()) return all_morphisms(doc.sys.groupoid());
  const MorphSet* p = doc.subgroupoid(name);
  if (!p) {
    err << "error: no subgroupoid named '" << name << "' in the document\n";
    return std::nullopt;
  }
  return *p;
}

const BlockSubring* pick_subring(const SpecDocument& doc,
                                 const std::string& name, std::ostream& err) {
  const BlockSubring* p = doc.subring(name);
  if (!p)
    err << "error: no subring named '" << name << "' in the document\n";
  return p;
}

std::string support_names(const std::vector<int>& idx) {
  std::string s = "{";
  for (size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ", ";
    s += "e" + std::to_string(idx[i] + 1);
  }
  return s + "}";
}

ordered_json support_json(const std::vector<int>& idx) {
  ordered_json a = ordered_json::array();
  for (int i : idx) a.push_back("e" + std::to_string(i + 1));
  return a;
}

int cmd_validate(const std::vector<std::string>& input, Ctx& c) {
  auto text = load_input(input, c.err);
  if (!text) return 2;
  ParseResult res = parse_spec(*text);
  c.out << emit_report(ValidationReport{res.diagnostics}, c.fmt);
  return res.diagnostics.empty() ? 0 : 2;
}

int cmd_example(const std::string& name, Ctx& c) {
  auto& specs = builtin_specs();
  auto it = specs.find(name);
  if (it == specs.end()) {
    c.err << "error: unknown builtin '" << name
          << "' (available: " << builtin_list() << ")\n";
    return 2;
  }
  c.out << it->second;
  return 0;
}

int cmd_components(const SpecDocument& doc, Ctx& c) {
  const Groupoid& g = doc.sys.groupoid();
  auto comps = g.components();
  if (c.fmt == EmitFormat::Structured) {
    ordered_json j;
    j["components"] = ordered_json::array();
    for (const auto& comp : comps) {
      ordered_json names = ordered_json::array();
      for (int x : comp) names.push_back(g.object_name(x));
      j["components"].push_back(std::move(names));
    }
    c.out << j.dump() << "\n";
    return 0;
  }
  for (size_t i = 0; i < comps.size(); ++i) {
    c.out << "component " << i << ": {";
    for (size_t k = 0; k < comps[i].size(); ++k)
      c.out << (k ? ", " : "") << g.object_name(comps[i][k]);
    c.out << "}\n";
  }
  return 0;
}

int cmd_grouptype(const SpecDocument& doc, const std::string& sub, Ctx& c) {
  auto h = pick_subgroupoid(doc, sub, c.err);
  if (!h) return 2;
  const Groupoid& g = doc.sys.groupoid();
  if (!g.is_subgroupoid(*h)) {
    if (c.fmt == EmitFormat::Structured) {
      ordered_json j;
      j["group_type"] = false;
      j["error"] = "not a subgroupoid";
      c.out << j.dump() << "\n";
    } else {
      c.out << "not a subgroupoid\n";
    }
    return 1;
  }
  auto gt = doc.sys.group_type(*h);
  if (c.fmt == EmitFormat::Structured) {
    ordered_json j;
    j["group_type"] = gt.ok;
    if (gt.ok) {
      ordered_json tr = ordered_json::object();
      for (int x = 0; x < g.num_objects(); ++x)
        if (gt.tau_by_obj[x] != -1)
          tr[g.object_name(x)] = g.data().morph_names[gt.tau_by_obj[x]];
      j["transversal"] = std::move(tr);
    } else if (gt.failing_object != -1) {
      j["failing_object"] = g.object_name(gt.failing_object);
    }
    c.out << j.dump() << "\n";
  } else if (gt.ok) {
    c.out << "group-type\n";
  } else if (gt.failing_object != -1) {
    c.out << "not group-type: no transversal into "
          << g.object_name(gt.failing_object) << "\n";
  } else {
    c.out << "not group-type\n";
  }
  return gt.ok ? 0 : 1;
}

int cmd_invariants(const SpecDocument& doc, const std::string& sub, Ctx& c) {
  auto h = pick_subgroupoid(doc, sub, c.err);
  if (!h) return 2;
  BlockSubring t = invariants_of(doc.sys, *h);
  c.out << emit_subring(doc.sys.ring(), t, c.fmt);
  return 0;
}

int cmd_fixer(const SpecDocument& doc, const std::string& name, Ctx& c) {
  const BlockSubring* t = pick_subring(doc, name, c.err);
  if (!t) return 2;
  FixerSet fx = fixer_of(doc.sys, *t);
  c.out << emit_fixer(doc.sys.groupoid(), fx, c.fmt);
  return 0;
}

int cmd_coords(const SpecDocument& doc, Ctx& c) {
  auto coords = find_coords(doc.sys);
  const SplitRing& ring = doc.sys.ring();
  if (c.fmt == EmitFormat::Structured) {
    ordered_json j;
    j["found"] = coords.has_value();
    if (coords) {
      ordered_json a = ordered_json::array(), b = ordered_json::array();
      for (const auto& v : coords->a) a.push_back(ring.to_string(v));
      for (const auto& v : coords->b) b.push_back(ring.to_string(v));
      j["a"] = std::move(a);
      j["b"] = std::move(b);
    }
    c.out << j.dump() << "\n";
  } else if (coords) {
    for (size_t i = 0; i < coords->a.size(); ++i) {
      c.out << "a" << i + 1 << " = " << ring.to_string(coords->a[i]) << "\n";
      c.out << "b" << i + 1 << " = " << ring.to_string(coords->b[i]) << "\n";
    }
  } else {
    c.out << "undetermined\n";
  }
  return coords ? 0 : 1;
}

int cmd_strong(const SpecDocument& doc, const std::string& name, Ctx& c) {
  const BlockSubring* t = pick_subring(doc, name, c.err);
  if (!t) return 2;
  StrongResult sr = alpha_strong_check(doc.sys, *t);
  const auto& names = doc.sys.groupoid().data().morph_names;
  if (c.fmt == EmitFormat::Structured) {
    ordered_json j;
    j["strong"] = sr.strong;
    j["local"] = sr.local_ok;
    j["per_base"] =
        sr.per_base_ok ? ordered_json(*sr.per_base_ok) : ordered_json(nullptr);
    j["agree"] = sr.agree;
    if (!sr.strong && sr.pair_fail.g != -1) {
      ordered_json f;
      f["g"] = names[sr.pair_fail.g];
      f["h"] = names[sr.pair_fail.h];
      f["support"] = support_json(sr.pair_fail.support);
      j["failing_pair"] = std::move(f);
    }
    c.out << j.dump() << "\n";
  } else {
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    c.out << "strong: " << yn(sr.strong) << "\n";
    c.out << "local: " << yn(sr.local_ok) << "\n";
    c.out << "per-base: " << (sr.per_base_ok ? yn(*sr.per_base_ok) : "n/a")
          << "\n";
    if (!sr.strong && sr.pair_fail.g != -1)
      c.out << "failing pair: g = " << names[sr.pair_fail.g]
            << ", h = " << names[sr.pair_fail.h]
            << ", support = " << support_names(sr.pair_fail.support) << "\n";
  }
  return sr.strong ? 0 : 1;
}

int cmd_separable(const SpecDocument& doc, const std::string& name, Ctx& c) {
  const BlockSubring* t = pick_subring(doc, name, c.err);
  if (!t) return 2;
  BlockSubring r =
      invariants_of(doc.sys, all_morphisms(doc.sys.groupoid()));
  auto res = doc.sys.ring().separability_check(*t, r);
  if (c.fmt == EmitFormat::Structured) {
    ordered_json j;
    j["separable"] = res.separable;
    j["precondition_ok"] = res.precondition_ok;
    if (!res.precondition_ok) j["error"] = res.err;
    c.out << j.dump() << "\n";
  } else if (!res.precondition_ok) {
    c.out << "not applicable: " << res.err << "\n";
  } else {
    c.out << "separable: " << (res.separable ? "yes" : "no") << "\n";
  }
  if (!res.precondition_ok) return 1;
  return res.separable ? 0 : 1;
}

int cmd_correspondence(const SpecDocument& doc, Ctx& c) {
  CorrespondenceTable tab = correspondence(doc.sys);
  c.out << emit_table(doc.sys, tab, c.fmt);
  return tab.ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "exact invariants, fixers, coordinates and the subgroupoid <-> "
      "subring correspondence for partial groupoid actions on split rings"};
  app.name("gpd");
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "structured"}));

  std::vector<std::string> input;
  std::string subgroupoid_name, subring_name, example_name;

  auto with_input = [&](CLI::App* sub) {
    sub->add_option("input", input, "a .gpd file, or: example NAME")
        ->expected(1, 2)
        ->required();
    sub->fallthrough();
    return sub;
  };
  CLI::App* validate =
      with_input(app.add_subcommand("validate", "parse and check a document"));
  CLI::App* components = with_input(
      app.add_subcommand("components", "connected components of the objects"));
  CLI::App* grouptype = with_input(
      app.add_subcommand("grouptype", "test the group-type property"));
  grouptype->add_option("--subgroupoid", subgroupoid_name,
                        "declared subgroupoid (default: every morphism)");
  CLI::App* invariants = with_input(app.add_subcommand(
      "invariants", "invariant subring of a subgroupoid"));
  invariants->add_option("--subgroupoid", subgroupoid_name,
                         "declared subgroupoid (default: every morphism)");
  CLI::App* fixer = with_input(app.add_subcommand(
      "fixer", "morphisms fixing a declared subring pointwise"));
  fixer->add_option("--subring", subring_name, "declared subring")->required();
  CLI::App* coords =
      with_input(app.add_subcommand("coords", "find a coordinate system"));
  CLI::App* strong = with_input(app.add_subcommand(
      "strong", "separation strength of a declared subring"));
  strong->add_option("--subring", subring_name, "declared subring")->required();
  CLI::App* separable = with_input(app.add_subcommand(
      "separable", "separability over the invariant subring"));
  separable->add_option("--subring", subring_name, "declared subring")
      ->required();
  CLI::App* correspondence = with_input(app.add_subcommand(
      "correspondence", "table of wide group-type subgroupoids and their "
                        "invariant subrings"));
  CLI::App* example =
      app.add_subcommand("example", "print a builtin document");
  example->add_option("name", example_name, "builtin name")->required();
  example->fallthrough();

  std::vector<const char*> argv;
  argv.push_back("gpd");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse((int)argv.size(), argv.data());
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  Ctx c{out, err,
        format == "structured" ? EmitFormat::Structured : EmitFormat::Text};

  if (example->parsed()) return cmd_example(example_name, c);
  if (validate->parsed()) return cmd_validate(input, c);

  auto text = load_input(input, err);
  if (!text) return 2;
  ParseResult res = parse_spec(*text);
  if (!res.doc) {
    err << emit_report(ValidationReport{res.diagnostics}, c.fmt);
    return 2;
  }
  const SpecDocument& doc = *res.doc;
  if (components->parsed()) return cmd_components(doc, c);
  if (grouptype->parsed()) return cmd_grouptype(doc, subgroupoid_name, c);
  if (invariants->parsed()) return cmd_invariants(doc, subgroupoid_name, c);
  if (fixer->parsed()) return cmd_fixer(doc, subring_name, c);
  if (coords->parsed()) return cmd_coords(doc, c);
  if (strong->parsed()) return cmd_strong(doc, subring_name, c);
  if (separable->parsed()) return cmd_separable(doc, subring_name, c);
  if (correspondence->parsed()) return cmd_correspondence(doc, c);
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace gpd
