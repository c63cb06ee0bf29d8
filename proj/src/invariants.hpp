#ifndef GPD_INVARIANTS_HPP
#define GPD_INVARIANTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "action.hpp"

namespace gpd {

// Morphisms that act trivially on a subring: g with alpha_g(t 1_{g^{-1}}) =
// t 1_g for every t.  Always contains the identities; closure under
// composition can fail, so the flag is computed rather than assumed.
struct FixerSet {
  MorphSet morphisms;
  bool is_subgroupoid = false;
};

// One connected component of a subgroupoid under a group-type witness.  The
// base is the least object; tau[k] carries base -> objects[k] and is the
// identity at the base.  base_ring solves the base isotropy constraints and
// covers only the base object's indices.
struct IsotropyPiece {
  int base = -1;
  std::vector<int> objects;
  std::vector<int> tau;
  BlockSubring base_ring;
};

// Solution of alpha_h(a 1_{h^{-1}}) = a 1_h for all h in H, as a block
// subring.  Indices over objects H does not cover come out unconstrained.
BlockSubring invariants_of(const ActionSystem& sys, const MorphSet& H);

// The defining condition, tested directly on one element.
bool is_invariant(const ActionSystem& sys, const MorphSet& H,
                  const RingElem& v);

// The same subring assembled from base-isotropy solutions pushed along the
// witness transversals, one piece per component of H; objects H does not
// cover contribute free summands.  Fails when the restriction of the action
// to H is not group-type.
std::optional<BlockSubring> invariants_via_phi(
    const ActionSystem& sys, const MorphSet& H, std::string* err = nullptr,
    std::vector<IsotropyPiece>* pieces = nullptr);

// Transversal form of the invariance test on a connected groupoid: write
// v = sum_y alpha_{tau_y}(c_y) with every c_y over the base object, then
// check alpha_u(c_{s(g)} 1_{u^{-1}}) = c_{t(g)} 1_u for u = tau_{t(g)}^{-1}
// g tau_{s(g)}, over every g.  tau must be a group-type witness covering
// every object.  Agrees with is_invariant over the whole groupoid.
bool invariant_by_tau(const ActionSystem& sys, const std::vector<int>& tau,
                      const RingElem& v);

FixerSet fixer_of(const ActionSystem& sys, const BlockSubring& t);

// Loops at obj that fix the restriction of t to the object's indices.
MorphSet isotropy_fixer(const ActionSystem& sys, const BlockSubring& t,
                        int obj);

// Both sides of the component form of fixer membership for T =
// invariants_of(sys, H), per morphism: direct membership against "source
// and target lie in one H-component and the base conjugate fixes the
// restriction of T to that component's base".  H must be wide with a
// group-type witness; err is set otherwise.
struct FixerAgreement {
  bool ok = false;
  std::vector<char> direct, by_components;
  std::string err;
};
FixerAgreement fixer_characterization(const ActionSystem& sys,
                                      const MorphSet& H);

// The remaining reconstructions need a global action (err "global action
// required" otherwise).

struct GlobalInvariantsDecomp {
  std::vector<IsotropyPiece> pieces;
  BlockSubring glued;
  bool matches_direct = false;
};
std::optional<GlobalInvariantsDecomp> global_invariants_decomposition(
    const ActionSystem& sys, const MorphSet& H, std::string* err = nullptr);

// The fixer of t rebuilt from base isotropy groups: per component of the
// direct fixer, the two-sided translates tau_y u tau_z^{-1} of the base
// group.  applicable drops to false if some object has no fixer arrow from
// its component's base, which leaves the reconstruction partial.
struct FixerPiece {
  int base = -1;
  std::vector<int> objects;
  std::vector<int> tau;  // -1 where no fixer arrow base -> object exists
  MorphSet base_group;
};
struct GlobalFixerDecomp {
  std::vector<FixerPiece> pieces;
  MorphSet reconstructed;
  bool applicable = true;
  bool matches_direct = false;
};
std::optional<GlobalFixerDecomp> global_fixer_decomposition(
    const ActionSystem& sys, const BlockSubring& t, std::string* err = nullptr);

}  // namespace gpd

#endif
