#ifndef HFILL_COMPLEX_HPP_
#define HFILL_COMPLEX_HPP_

#include "hfill/sparse.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hfill {

  // Vertex labels are either reduced words (letters) or lattice points
  // (coordinates). Auxiliary vertices created by subdivision carry the
  // sentinel `aux_label_tag` followed by a serial number.
  using VertexLabel = std::vector<std::int32_t>;

  inline constexpr std::int32_t aux_label_tag
      = std::numeric_limits<std::int32_t>::min();

  enum class LabelKind { word, point };

  // Edge label for edges that do not come from a generator move.
  inline constexpr std::int32_t extra_edge_label = -1;

  struct Edge {
    std::size_t  tail;
    std::size_t  head;
    std::int32_t label;

    bool operator==(Edge const&) const = default;
  };

  // Oriented cell with an incidence sign.
  struct SignedCell {
    std::size_t cell;
    int         sign;

    bool operator==(SignedCell const&) const = default;
  };

  // A 2-cell is a closed edge walk. `walk[i]` is the vertex the i-th edge
  // step leaves from; `boundary[i]` is that step.
  struct Face2 {
    std::vector<std::size_t> walk;
    std::vector<SignedCell>  boundary;
    std::int32_t             relator = -1;

    bool operator==(Face2 const&) const = default;
  };

  struct Face3 {
    std::vector<SignedCell> boundary;

    bool operator==(Face3 const&) const = default;
  };

  struct VertexLabelHash {
    std::size_t operator()(VertexLabel const& v) const noexcept;
  };

  struct CycleHash {
    std::size_t operator()(std::vector<std::size_t> const& v) const noexcept;
  };

  class CellComplex {
   public:
    static constexpr std::size_t default_vertex_cap = 2'000'000;

    CellComplex() = default;
    CellComplex(int dim, LabelKind kind, std::vector<std::string> names = {})
        : _dim(dim), _kind(kind), _names(std::move(names)) {}

    int dim() const noexcept {
      return _dim;
    }
    LabelKind label_kind() const noexcept {
      return _kind;
    }
    std::vector<std::string> const& generator_names() const noexcept {
      return _names;
    }
    int radius() const noexcept {
      return _radius;
    }
    void set_radius(int r) noexcept {
      _radius = r;
    }

    std::size_t cell_count(int d) const;

    std::vector<VertexLabel> const& vertices() const noexcept {
      return _vertices;
    }
    std::vector<Edge> const& edges() const noexcept {
      return _edges;
    }
    std::vector<Face2> const& faces2() const noexcept {
      return _faces2;
    }
    std::vector<Face3> const& faces3() const noexcept {
      return _faces3;
    }

    std::optional<std::size_t> find_vertex(VertexLabel const& label) const;
    // Edge joining u and v in either direction.
    std::optional<std::size_t> find_edge(std::size_t u, std::size_t v) const;
    // Face with the given closed vertex walk, up to rotation and reversal.
    std::optional<std::size_t>
    find_face(std::vector<std::size_t> const& walk) const;

    // Edge ids incident to each vertex, in insertion order.
    std::vector<std::size_t> const& incident_edges(std::size_t v) const {
      return _incident[v];
    }
    std::size_t other_end(std::size_t edge, std::size_t v) const {
      auto const& e = _edges[edge];
      return e.tail == v ? e.head : e.tail;
    }

    std::size_t add_vertex(VertexLabel label);
    // Throws NON_SIMPLICIAL on loops and on a second edge between the same
    // pair of vertices.
    std::size_t add_edge(std::size_t tail, std::size_t head, std::int32_t label);
    // Adds the face bounded by the closed walk; every consecutive pair must
    // already be joined by an edge. Returns the existing id if the cycle is
    // already present.
    std::size_t add_face2(std::vector<std::size_t> const& walk,
                          std::int32_t                    relator = -1);
    std::size_t add_face3(std::vector<SignedCell> boundary);

    // Boundary of a d-cell as accumulated signed incidences, sorted by id.
    std::vector<SignedCell> boundary_of(int d, std::size_t cell) const;

    bool operator==(CellComplex const& o) const {
      return _dim == o._dim && _kind == o._kind && _vertices == o._vertices
             && _edges == o._edges && _faces2 == o._faces2
             && _faces3 == o._faces3;
    }

   private:
    int                      _dim    = 0;
    LabelKind                _kind   = LabelKind::point;
    std::vector<std::string> _names;
    int                      _radius = 0;

    std::vector<VertexLabel>               _vertices;
    std::vector<Edge>                      _edges;
    std::vector<Face2>                     _faces2;
    std::vector<Face3>                     _faces3;
    std::vector<std::vector<std::size_t>>  _incident;
    std::unordered_map<VertexLabel, std::size_t, VertexLabelHash> _vertex_index;
    std::unordered_map<std::uint64_t, std::size_t>                _edge_index;
    std::unordered_map<std::vector<std::size_t>, std::size_t, CycleHash>
        _face_index;
  };

  // Canonical form of a closed vertex walk: least rotation of the walk or of
  // its reversal.
  std::vector<std::size_t> canonical_cycle(std::vector<std::size_t> const& walk);

  SparseIntMatrix boundary_matrix(CellComplex const& k, int d);

  // Cubical complex of Z^rank restricted to the sup-norm ball of radius r.
  // Edges point in the positive axis direction, squares in the (i, j) plane
  // with i < j run counterclockwise, cubes carry the outward orientation.
  CellComplex build_grid_complex(int         rank,
                                 int         r,
                                 std::size_t vertex_cap
                                 = CellComplex::default_vertex_cap);

  // Drops cells above dimension d.
  CellComplex skeleton(CellComplex const& k, int d);

  struct SubdivisionPattern {
    // Closed vertex walks. Ids below the vertex count refer to vertices of the
    // complex; id vertex_count + i refers to the i-th new vertex.
    std::vector<std::vector<std::size_t>> polygons;
    std::size_t                           new_vertices = 0;
  };

  struct Subdivision {
    CellComplex                           complex;
    std::vector<std::vector<std::size_t>> face_map;  // old face -> new faces
  };

  // Replaces one 2-face by the polygons of the pattern. The pattern's total
  // boundary must equal the face boundary (MISMATCHED_BOUNDARY otherwise).
  Subdivision subdivide_cell(CellComplex const&        k,
                             std::size_t               face,
                             SubdivisionPattern const& pattern);

  std::string label_to_string(CellComplex const& k, VertexLabel const& label);

  // Deterministic JSON with keys vertices, edges, faces2, faces3.
  std::string to_json(CellComplex const& k);

}  // namespace hfill

#endif  // HFILL_COMPLEX_HPP_
