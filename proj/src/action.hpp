#ifndef GPD_ACTION_HPP
#define GPD_ACTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "groupoid.hpp"
#include "ring.hpp"

namespace gpd {

// One arrow's partial map in twisted-permutation form: position j sends the
// idempotent index dom[j] to img[j] with the field automorphism aut[j]
// applied to the coordinate.  dom is sorted; img is a permutation of the
// arrow's image index set.  The map of alpha_m has domain S_{m^{-1}} (over
// the source object) and image S_m (over the target object).
struct ArrowMap {
  std::vector<int> dom;
  std::vector<int> img;
  std::vector<int> aut;
};

struct RestrictedActionSystem;

class ActionSystem {
 public:
  // Validates the unital partial action axioms exactly: identities act as
  // the identity on their object's summand, domains and images sit over
  // source and target, paired arrows invert each other, and for every
  // composable pair the domain inclusion and the composition rule hold.
  static std::optional<ActionSystem> make(Groupoid g, SplitRing ring,
                                          std::vector<std::vector<int>> obj_idx,
                                          std::vector<ArrowMap> maps,
                                          std::string* err);

  const Groupoid& groupoid() const { return g_; }
  const SplitRing& ring() const { return ring_; }
  const CoeffField& field() const { return ring_.field(); }

  const std::vector<int>& indices_of_object(int x) const { return obj_idx_[x]; }
  int object_of_index(int i) const { return obj_of_idx_[i]; }
  // D(m^{-1}): indices whose idempotents alpha_m moves.
  const std::vector<int>& dom_indices(int m) const { return maps_[m].dom; }
  // D(m): indices of the image ideal S_m, sorted.
  const std::vector<int>& img_indices(int m) const { return img_sorted_[m]; }
  const ArrowMap& arrow_map(int m) const { return maps_[m]; }
  // i must lie in dom_indices(m).
  int sigma(int m, int i) const;
  int phi(int m, int i) const;

  // alpha_m(a . 1_{m^{-1}}): coordinates outside the domain are dropped.
  RingElem apply(int m, const RingElem& a) const;

  bool is_global() const;

  struct GroupType {
    bool ok = false;
    // Per object: the chosen transversal arrow into that object, -1 for
    // objects the subgroupoid does not touch.  Least feasible arrow per
    // object; the base of each component gets its identity.
    std::vector<int> tau_by_obj;
    int failing_object = -1;
  };
  // The subgroupoid must be closed; it need not be wide.
  GroupType group_type(const MorphSet& subgroupoid) const;

  // Objects must be a union of groupoid components.
  RestrictedActionSystem restrict_to_objects(const std::vector<int>& objs) const;

 private:
  ActionSystem(Groupoid g, SplitRing ring)
      : g_(std::move(g)), ring_(std::move(ring)) {}
  Groupoid g_;
  SplitRing ring_;
  std::vector<std::vector<int>> obj_idx_;
  std::vector<int> obj_of_idx_;
  std::vector<ArrowMap> maps_;
  std::vector<std::vector<int>> img_sorted_;
};

struct RestrictedActionSystem {
  ActionSystem sys;
  std::vector<int> object_map;  // old object id -> new, -1 dropped
  std::vector<int> morph_map;
  std::vector<int> index_map;   // old ring index -> new
};

}  // namespace gpd

#endif
