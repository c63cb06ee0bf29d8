#ifndef GPD_GROUPOID_HPP
#define GPD_GROUPOID_HPP

#include <optional>
#include <string>
#include <vector>

namespace gpd {

// Raw composition-table form of a finite groupoid over stable integer
// morphism ids.  Ids 0..k-1 are the identity morphisms of objects 0..k-1 in
// object order; morph_names[i] == object_names[i] there.  table[g][h] is the
// composite "g after h" (h applies first), -1 where undefined; it must be
// defined exactly when src(g) == tgt(h).
struct GroupoidData {
  std::vector<std::string> object_names;
  std::vector<std::string> morph_names;
  std::vector<int> src;
  std::vector<int> tgt;
  std::vector<std::vector<int>> table;
};

class Groupoid;

struct RestrictedGroupoid {
  // Restriction to a subset of objects, ids renumbered; maps are old id to
  // new id, -1 where dropped.
  std::vector<int> object_map;
  std::vector<int> morph_map;
  std::vector<std::string> object_names;
  std::vector<std::string> morph_names;
  std::vector<int> src, tgt;
  std::vector<std::vector<int>> table;
};

// Morphism-id sets are kept sorted ascending.
using MorphSet = std::vector<int>;

class Groupoid {
 public:
  // Checks every groupoid axiom on the table; on failure reports the first
  // violation and returns nullopt.
  static std::optional<Groupoid> make(GroupoidData d, std::string* err);

  int num_objects() const { return n_obj_; }
  int size() const { return (int)d_.src.size(); }
  int src(int g) const { return d_.src[g]; }
  int tgt(int g) const { return d_.tgt[g]; }
  bool is_identity(int g) const { return g < n_obj_; }
  int identity(int x) const { return x; }
  // g after h; callers must pass a composable pair.
  int compose(int g, int h) const;
  bool composable(int g, int h) const { return d_.src[g] == d_.tgt[h]; }
  int inverse(int g) const { return inverse_[g]; }

  const std::string& object_name(int x) const { return d_.object_names[x]; }
  const std::string& morph_name(int g) const { return d_.morph_names[g]; }
  std::optional<int> morph_by_name(const std::string& name) const;
  std::optional<int> object_by_name(const std::string& name) const;

  MorphSet hom(int x, int y) const;
  MorphSet isotropy(int x) const { return hom(x, x); }
  MorphSet identity_ids() const;

  // Partition of the objects into connectedness classes, each sorted, the
  // list ordered by least object.
  std::vector<std::vector<int>> components() const;

  // tau maps each object of a component to a morphism base -> object, with
  // tau[base] the identity.  Returns tau_tgt^{-1} . g . tau_src, a member of
  // the isotropy group at the base.
  int tau_conj(const std::vector<int>& tau_by_obj, int g) const;

  // Smallest subgroupoid containing gens (closed under composition and
  // inverse; identities appear via g . g^{-1}).
  MorphSet closure(const MorphSet& gens) const;
  bool is_subgroupoid(const MorphSet& morphs) const;
  bool is_wide(const MorphSet& morphs) const;

  // Every nonempty subgroupoid (or every wide one), reached by repeatedly
  // extending closures by one generator; ordered by (size, lexicographic).
  std::vector<MorphSet> enumerate_subgroupoids(bool wide_only) const;

  RestrictedGroupoid restrict_to_objects(const std::vector<int>& objs) const;

  const GroupoidData& data() const { return d_; }

 private:
  Groupoid() = default;
  GroupoidData d_;
  int n_obj_ = 0;
  std::vector<int> inverse_;
};

// Axiom check used by Groupoid::make, exposed for table-construction code
// that wants diagnostics without building the object.
bool validate_groupoid(const GroupoidData& d, std::string* err);

}  // namespace gpd

#endif
