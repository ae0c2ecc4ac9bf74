#ifndef HFILL_FILLING_HPP_
#define HFILL_FILLING_HPP_

#include "hfill/chains.hpp"
#include "hfill/complex.hpp"
#include "hfill/group.hpp"
#include "hfill/lp.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace hfill {

  enum class FillMethod { unique, ilp };

  char const* to_string(FillMethod m) noexcept;

  struct FillBudget {
    IlpBudget ilp;
    bool      force_ilp = false;
  };

  struct FillingResult {
    Chain        cycle;
    Chain        filling;
    std::int64_t volume    = 0;
    FillMethod   method    = FillMethod::unique;
    bool         certified = false;
    bool         padding_stable = true;
  };

  // Minimal fillings in a fixed complex. Boundary matrices, cell vertex
  // sets and kernel ranks are computed once and shared by concurrent calls.
  class FillingSolver {
   public:
    explicit FillingSolver(CellComplex const& k);

    CellComplex const& complex() const noexcept {
      return *_k;
    }

    // Kernel rank of the boundary map on d-cells.
    std::size_t kernel_rank(int d) const;

    // FVol of the d-cycle s. Uses the unique-solution path when the
    // boundary on (d+1)-cells is injective, the integer program otherwise.
    // Throws NO_FILLING when s bounds nothing in the complex and
    // BUDGET_EXCEEDED when the search ends without any filling.
    FillingResult fvol(Chain const& s, FillBudget const& budget = {}) const;

   private:
    // (d+1)-cells with every vertex within graph distance `radius` of the
    // vertices of s.
    std::vector<std::size_t> cells_near(Chain const& s, int radius) const;
    FillingResult            fvol_unique(Chain const& s) const;
    FillingResult            fvol_ilp(Chain const& s, FillBudget const& budget) const;

    CellComplex const*                            _k;
    std::vector<SparseIntMatrix>                  _boundary;       // index d: d-cells -> (d-1)-cells
    std::vector<std::vector<std::vector<std::size_t>>> _cell_vertices;  // index d, cell
    std::vector<std::vector<std::vector<std::size_t>>> _coboundary;     // index d: d-cell -> (d+1)-cells
    mutable std::mutex                            _mutex;
    mutable std::vector<std::optional<std::size_t>> _kernel;
  };

  FillingResult fvol(CellComplex const& k, Chain const& s, FillBudget const& budget = {});

  // Moves a chain between complexes whose cells share vertex labels.
  // Throws INVALID_ARGUMENT when a cell has no counterpart.
  Chain transport_chain(CellComplex const& from, CellComplex const& to, Chain const& c);

  // Recomputes the volume in a larger complex and records the verdict in
  // result.padding_stable.
  bool padding_check(CellComplex const& small, FillingSolver const& large, Chain const& s,
                     FillingResult& result, FillBudget const& budget = {});

  // ---- cycles -------------------------------------------------------------

  // Vertices lying `margin` inside the complex: sup-norm for point labels,
  // graph distance from vertex 0 for word labels.
  std::vector<bool> inner_vertices(CellComplex const& k, int margin);

  // Default margin: ceil(R / 3).
  int default_margin(int radius);

  // Boundary of the axis-parallel box with the given side lengths whose
  // lowest corner is `corner` (grid complexes of rank 2 or 3; the box
  // dimension equals the rank).
  Chain box_cycle(CellComplex const& grid, std::vector<int> const& corner,
                  std::vector<int> const& sides);

  // All simple edge loops of length <= max_len through vertex 0, one per
  // cyclic vertex sequence up to reversal. Requires max_len <= 12.
  std::vector<Chain> exhaustive_loops(CellComplex const& k, std::size_t max_len);

  // Boundary of a random cluster of top-dimensional cells grown across
  // shared faces from a random seed cell, stopping before the boundary norm
  // exceeds max_norm. Only cells with all vertices in `allowed` are used.
  Chain random_cluster_cycle(CellComplex const& k, std::vector<bool> const& allowed,
                             std::size_t max_norm, std::uint64_t seed);

  // 1-cycle in the Cayley 2-complex of a presentation group, given by its
  // vertices (as words) and signed edges between them.
  struct GroupCycle {
    struct Term {
      std::size_t  tail;
      std::size_t  head;
      std::int64_t coeff;
    };
    std::vector<Word> vertices;
    std::vector<Term> edges;

    std::size_t norm() const;
  };

  // Boundary of a random cluster of relator faces grown from the identity.
  GroupCycle random_group_cluster(GroupOracle const& oracle, std::size_t max_norm,
                                  std::uint64_t seed);

  // FVol computed in the face neighborhood of the cycle's vertices with the
  // given number of steps.
  FillingResult fvol_in_group(GroupOracle const& oracle, GroupCycle const& c, int steps,
                              FillBudget const& budget = {});

  // ---- growth profiles ----------------------------------------------------

  struct ProfilePoint {
    std::size_t  ell       = 0;
    std::int64_t fill      = 0;
    std::size_t  count     = 0;
    bool         certified = true;
  };

  struct GrowthProfile {
    std::vector<ProfilePoint> samples;
    std::optional<double>     exponent;
    double                    coefficient = 0;  // fill ~ coefficient * ell^exponent
    double                    residual    = 0;
    std::size_t               window_min  = 0;
    std::size_t               window_max  = 0;
  };

  // Fill_{K,S}(ell): maximum volume over the given cycles of norm <= ell.
  // `volumes[i]` is the result for `cycles[i]`.
  ProfilePoint restricted_fill(std::vector<Chain> const& cycles,
                               std::vector<FillingResult> const& volumes, std::size_t ell);

  // Least-squares slope of log(fill) against log(ell) over samples with
  // ell >= 8. Throws DEGENERATE_FIT with fewer than 4 points, a zero fill in
  // the window, or constant fills.
  GrowthProfile growth_fit(std::vector<ProfilePoint> const& samples);

  struct GrowthComparison {
    std::size_t              c     = 0;
    bool                     holds = false;
    std::vector<std::size_t> failures;
    bool                     extrapolated = false;
  };

  // Smallest C <= c_max with f(n) <= C g(Cn + C) + Cn + C at every sampled n.
  // g is read as a step function (value at the largest sampled ell <= m) and
  // extended by its fitted power law past its range (constant when the fit
  // is degenerate).
  GrowthComparison compare_growth(std::vector<ProfilePoint> const& f,
                                  std::vector<ProfilePoint> const& g, std::size_t c_max);

  std::string     profile_to_csv(std::vector<ProfilePoint> const& samples);
  // Throws SCHEMA_MISMATCH on a bad header, malformed rows or no rows.
  std::vector<ProfilePoint> profile_from_csv(std::string const& text);

  // ---- sampling drivers ---------------------------------------------------

  struct GrowthConfig {
    std::vector<std::size_t> ells;
    std::size_t              count   = 40;  // random cycles per ell
    std::uint64_t            seed    = 1;
    std::size_t              workers = 1;
    bool                     exhaustive = false;  // add simple loops for ell <= 12
    bool                     rectangles = true;   // grid complexes only
    FillBudget               budget;
  };

  struct GrowthRun {
    GrowthProfile profile;
    bool          padding_stable = true;
    std::size_t   fvol_calls     = 0;
  };

  // Samples on a fixed complex (grid or Cayley ball); padded is the same
  // complex built at radius + 2.
  GrowthRun fill_growth(CellComplex const& k, CellComplex const& padded,
                        GrowthConfig const& config);

  // Samples random face clusters of a presentation group, filling each in a
  // one-step face neighborhood and rechecking the maximizers with two steps.
  GrowthRun fill_growth_group(GroupOracle const& oracle, GrowthConfig const& config);

  // Per-sample seed derived from (seed, stream, index) by SplitMix64.
  std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

  // Runs body(i) for i in [0, n) on `workers` threads.
  void parallel_for(std::size_t n, std::size_t workers,
                    std::function<void(std::size_t)> const& body);

}  // namespace hfill

#endif  // HFILL_FILLING_HPP_
