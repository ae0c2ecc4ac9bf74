#ifndef HFILL_GROUP_HPP_
#define HFILL_GROUP_HPP_

#include "hfill/complex.hpp"
#include "hfill/presentation.hpp"
#include "hfill/word.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hfill {

  enum class Strategy { free_group, free_abelian, surface, dehn };

  char const* to_string(Strategy s) noexcept;

  // Word problem solver attached to a presentation. Equality is decided by
  // free reduction (FREE), exponent vectors (FREE_ABELIAN) or Dehn's
  // algorithm (SURFACE, DEHN).
  class GroupOracle {
   public:
    static GroupOracle free_group(std::size_t rank);
    static GroupOracle free_abelian(std::size_t rank);
    static GroupOracle surface(std::size_t genus);
    // Throws PRECONDITION_VIOLATED unless p is C'(1/6) without proper powers.
    static GroupOracle dehn(Presentation const& p);

    Strategy strategy() const noexcept {
      return _strategy;
    }
    Presentation const& presentation() const noexcept {
      return *_presentation;
    }
    std::size_t rank() const noexcept {
      return _presentation->rank();
    }

    bool equal(Word const& u, Word const& v) const;

    // Conjugation- and multiplication-compatible invariant: equal elements
    // have equal keys. Exact (keys equal iff elements equal) for FREE and
    // FREE_ABELIAN.
    Letters key(Word const& w) const;
    bool    key_is_exact() const noexcept {
      return _strategy == Strategy::free_group
             || _strategy == Strategy::free_abelian;
    }

    // ShortLex-least geodesic word for the element of w. For SURFACE and
    // DEHN this runs a breadth-first search bounded by the length of the
    // Dehn-reduced form.
    Word normal_form(Word const& w) const;

   private:
    GroupOracle() = default;
    void find_invariants();

    Strategy                            _strategy = Strategy::free_group;
    std::shared_ptr<Presentation const> _presentation;
    std::shared_ptr<DehnReducer const>  _dehn;
    // Integer characters (homomorphisms to Z) as generator weights.
    std::vector<std::vector<std::int64_t>> _characters;
    // Homomorphisms onto F(x, y) given by the image letter of each
    // generator (0 for the identity, +-1 for x, +-2 for y).
    std::vector<std::vector<Letter>> _free_maps;
  };

  // Registry of group elements; lookups are exact, collisions of invariant
  // keys are resolved with the oracle's equality test.
  class ElementIndex {
   public:
    explicit ElementIndex(GroupOracle const& oracle) : _oracle(&oracle) {}

    std::optional<std::size_t> find(Word const& w) const;
    // Registers w; the caller guarantees it is not present yet.
    std::size_t insert(Word const& w);
    std::size_t find_or_insert(Word const& w);

    Word const& representative(std::size_t id) const {
      return _reps[id];
    }
    std::size_t size() const noexcept {
      return _reps.size();
    }

   private:
    GroupOracle const*                                                  _oracle;
    std::vector<Word>                                                   _reps;
    std::unordered_map<Letters, std::vector<std::size_t>, LettersHash> _buckets;
  };

  // Ball of radius r about the identity in the Cayley 2-complex. Vertices
  // are labelled by ShortLex-least geodesics in discovery order; faces are
  // relator loops lying in the ball. Throws OVERFLOW past `vertex_cap` and
  // NON_SIMPLICIAL when the 1-skeleton has loops or parallel edges.
  CellComplex build_cayley_ball(GroupOracle const& oracle,
                                int                r,
                                std::size_t        vertex_cap
                                = CellComplex::default_vertex_cap);

  // Subcomplex of the Cayley 2-complex spanned by the centers and everything
  // reachable through `steps` rounds of adding all relator faces through
  // current vertices. Vertex labels are representative words (the first one
  // found), not normal forms.
  CellComplex build_face_neighborhood(GroupOracle const&       oracle,
                                      std::vector<Word> const& centers,
                                      int                      steps,
                                      std::size_t              vertex_cap
                                      = CellComplex::default_vertex_cap);

  // Oracle for a builtin name: free<k>, z<k> (free abelian), surface<g>.
  GroupOracle builtin_oracle(std::string const& name);

}  // namespace hfill

#endif  // HFILL_GROUP_HPP_
