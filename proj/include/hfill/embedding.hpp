#ifndef HFILL_EMBEDDING_HPP_
#define HFILL_EMBEDDING_HPP_

#include "hfill/chains.hpp"
#include "hfill/complex.hpp"
#include "hfill/filling.hpp"
#include "hfill/group.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hfill {

  // Z^rank as a cubical grid, or the Cayley 2-complex of a group.
  class Space {
   public:
    static Space grid(int rank);
    static Space group(GroupOracle oracle, std::string name);
    // "gridK" or any name accepted by builtin_oracle.
    static Space parse(std::string const& name);

    bool is_grid() const noexcept {
      return _rank > 0;
    }
    int rank() const noexcept {
      return _rank;
    }
    GroupOracle const& oracle() const;
    std::string const& name() const noexcept {
      return _name;
    }
    LabelKind label_kind() const noexcept {
      return is_grid() ? LabelKind::point : LabelKind::word;
    }
    std::vector<std::string> generator_names() const;

    CellComplex ball(int radius) const;

    // Distance in the whole space: L1 for grids, geodesic word length for
    // groups.
    std::int64_t distance(VertexLabel const& a, VertexLabel const& b) const;

    // Canonical label of the point (normal form for groups).
    VertexLabel normalize(VertexLabel const& l) const;

    // Extra target radius needed around images so that short geodesics stay
    // in the ball: the longest relator for SURFACE and DEHN, 0 otherwise.
    std::size_t padding() const;

   private:
    int                                 _rank = 0;
    std::shared_ptr<GroupOracle const>  _oracle;
    std::string                         _name;
  };

  enum class EmbeddingKind { logmap, axis_inclusion, plane_inclusion, file };

  char const* to_string(EmbeddingKind k) noexcept;

  struct EmbeddingSpec {
    EmbeddingKind kind = EmbeddingKind::file;
    Space         source;
    Space         target;
    // Absent where the map is undefined.
    std::function<std::optional<VertexLabel>(VertexLabel const&)> vertex_map;

    std::optional<VertexLabel> operator()(VertexLabel const& x) const {
      return vertex_map(x);
    }
  };

  // n -> (floor(log2(|n| + 1)), n), Z -> Z^2.
  EmbeddingSpec builtin_logmap();
  // n -> (n, 0), Z -> Z^2.
  EmbeddingSpec builtin_axis_inclusion();
  // (x, y) -> (x, y, 0), Z^2 -> Z^3.
  EmbeddingSpec builtin_plane_inclusion();
  // "logmap", "axis" or "plane".
  EmbeddingSpec builtin_embedding(std::string const& name);

  // Lines `x1 ... xk -> y1 ... ym` in the label syntax of the complex
  // serialization; blank lines and `#` comments are skipped. Throws SYNTAX on
  // malformed lines and INVALID_EMBEDDING on a repeated source or a repeated
  // image.
  EmbeddingSpec load_embedding(std::string_view text, Space source, Space target);

  VertexLabel parse_label(std::string_view text, Space const& space);

  // ---- distortion ---------------------------------------------------------

  struct ModuliEstimate {
    // source distance t -> (min, max) image distance
    std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> per_distance;
    std::int64_t lipschitz_c = 0;
    std::size_t  pairs       = 0;
    bool         exhaustive  = false;
    // Heuristic witness only: some pair at distance >= T/4 (T the largest
    // sampled distance) lands as close as the closest adjacent pair.
    bool not_coarse = false;
  };

  // All vertex pairs of the source ball when there are at most
  // `sample_count` of them, otherwise `sample_count` seeded random pairs.
  ModuliEstimate estimate_moduli(EmbeddingSpec const& spec, int source_radius,
                                 std::size_t sample_count, std::uint64_t seed,
                                 std::size_t workers = 1);

  // t,min,max
  std::string moduli_to_csv(ModuliEstimate const& m);

  // ---- extended complex ---------------------------------------------------

  struct ExtendedComplex {
    CellComplex  source;  // X
    CellComplex  y;       // 2-skeleton of Z plus added edges and faces
    std::int64_t c = 1;
    std::size_t  base_edges = 0;  // Y edges below this id come from Z
    std::size_t  base_faces = 0;  // likewise for 2-cells
    // Added edge i is Y edge base_edges + i and bounds, together with its
    // geodesic, Y face base_faces + i.
    std::vector<std::size_t> added_edges;
    std::vector<std::size_t> added_faces;

    std::vector<std::size_t> vertex_map;  // X vertex -> Y vertex
    std::vector<SignedCell>  edge_map;    // X edge -> Y edge
    std::vector<Chain>       face_map;    // X face -> Y 2-chain
    std::int64_t             n = 0;       // max norm of a face image

    CellComplex              m;            // image subcomplex
    std::vector<std::size_t> m_vertex;     // Y vertex -> M vertex, or npos
    std::vector<std::size_t> m_edge;       // Y edge -> M edge, or npos
    std::vector<std::size_t> m_face;       // Y face -> M face, or npos

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  };

  // Adds an edge for every pair of target-ball vertices at ball distance
  // 2..C, with a face along the ShortLex-least geodesic, and maps source
  // 2-cells to minimal fillings of their mapped boundaries.
  //
  // Throws INVALID_EMBEDDING when the map is undefined or not injective on
  // the source ball, GEODESIC_ESCAPES_BALL when an image point or the
  // geodesic joining the images of an edge leaves the target ball,
  // PRECONDITION_VIOLATED when an edge image is longer than C or a group
  // target lacks the padding C + longest relator, and UNFILLABLE_LOOP when a
  // mapped boundary bounds nothing in Y.
  ExtendedComplex build_extended_complex(CellComplex const& x, CellComplex const& z,
                                         EmbeddingSpec const& spec, std::int64_t c,
                                         FillBudget const& budget = {});

  // Image of a chain of X (dimension 0, 1 or 2) in Y.
  Chain push_forward(ExtendedComplex const& e, Chain const& c);

  // Restriction of a Y chain supported in M to the cells of M. Throws
  // INVALID_ARGUMENT when the support leaves M.
  Chain restrict_to_image(ExtendedComplex const& e, Chain const& c);

  struct CollisionBound {
    std::int64_t                measured = 0;  // 0 when no cells collide
    std::optional<std::int64_t> theoretical;   // L' + 2N, given moduli
    std::int64_t                l = 1;         // max(measured, 1)
  };

  // Largest source distance between vertices of two source 2-cells whose
  // images share a 2-cell (or of one 2-cell covering a target cell twice).
  CollisionBound collision_bound(ExtendedComplex const& e,
                                 ModuliEstimate const* moduli = nullptr);

  struct QiReport {
    std::int64_t l           = 1;
    bool         lower_ok    = true;
    bool         upper_ok    = true;
    std::size_t  pairs       = 0;
    bool         exhaustive  = false;
    struct Pair {
      std::size_t  x1  = 0;
      std::size_t  x2  = 0;
      std::int64_t dx  = 0;
      std::int64_t dm  = 0;
      double       lhs = 0;  // dx / (L+1) - 2L / (L+1)
      double       rhs = 0;  // dm
    };
    std::optional<Pair> worst;  // least rhs - lhs
  };

  // Checks dx / (L+1) - 2L/(L+1) <= d_M(phi x1, phi x2) <= dx on pairs of
  // inner source vertices.
  QiReport qi_verify(ExtendedComplex const& e, std::int64_t l, std::size_t sample_count,
                     std::uint64_t seed, std::size_t workers = 1);

  struct ExtensionChecks {
    bool        injective_1skeleton = true;
    bool        added_edges_short   = true;  // d_Z <= C
    bool        added_faces_ok      = true;  // edge + geodesic of length <= C
    bool        n_matches           = true;
    bool        chain_map           = true;
    bool        metric_dominance    = true;  // d_M >= d_Y
    std::size_t chain_samples       = 0;
    std::size_t metric_pairs        = 0;

    bool all() const {
      return injective_1skeleton && added_edges_short && added_faces_ok && n_matches
             && chain_map && metric_dominance;
    }
  };

  ExtensionChecks check_extension(ExtendedComplex const& e, std::size_t chain_samples,
                                  std::size_t pair_samples, std::uint64_t seed,
                                  std::size_t workers = 1);

  struct FillingComparison {
    Chain        cycle;
    std::int64_t fvol_x = 0;
    std::int64_t fvol_y = 0;
    std::int64_t fvol_m = 0;
    std::size_t  image_norm = 0;
    bool         pushforward_ok = true;  // fvol_m <= N fvol_x
    bool         certified      = true;
  };

  struct FillingComparisonReport {
    std::vector<FillingComparison> rows;
    std::size_t                    kernel_rank_y = 0;
    bool                           pushforward_ok = true;
    // fvol_m == fvol_y on every row; required when kernel_rank_y == 0.
    bool                           unique_equal = true;
    bool                           vacuous      = true;  // no nonzero cycle
    std::optional<GrowthComparison> m_vs_y;
    std::optional<GrowthComparison> m_vs_x;
  };

  // `cycles` are 1-cycles of the source.
  FillingComparisonReport compare_fillings(ExtendedComplex const& e,
                                           std::vector<Chain> const& cycles,
                                           FillBudget const& budget = {},
                                           std::size_t workers = 1);

}  // namespace hfill

#endif  // HFILL_EMBEDDING_HPP_
