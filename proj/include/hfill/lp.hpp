#ifndef HFILL_LP_HPP_
#define HFILL_LP_HPP_

#include "hfill/exact.hpp"
#include "hfill/sparse.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace hfill {

  using Rational = Fraction<BigInt>;

  // min c.x subject to A x = b, x >= 0.
  struct LpProblem {
    SparseIntMatrix           a;
    std::vector<std::int64_t> b;
    std::vector<std::int64_t> c;
  };

  enum class LpStatus { optimal, infeasible, unbounded, budget_exceeded };

  struct LpSolution {
    LpStatus              status = LpStatus::infeasible;
    Rational              objective;
    std::vector<Rational> x;
    // Dual prices per row (c_B B^-1); reduced cost of column j is
    // c_j - y . A_j.
    std::vector<Rational> y;
    std::size_t           pivots = 0;
  };

  struct LpBudget {
    std::size_t max_pivots = 200'000;
  };

  // Exact two-phase tableau simplex. Dantzig pricing, switching to Bland's
  // rule while the objective stalls; ties broken by lowest index.
  LpSolution solve_lp(LpProblem const& problem, LpBudget const& budget = {});

  struct IlpBudget {
    std::size_t max_nodes        = 20'000;
    std::size_t restart_interval = 10'000;
    LpBudget    lp;
  };

  struct IlpResult {
    LpStatus                                 status = LpStatus::infeasible;
    std::optional<std::vector<std::int64_t>> x;  // best incumbent
    std::optional<Rational>                  value;
    Rational                                 root_bound;  // LP relaxation value
    bool                                     certified = false;
    std::size_t                              nodes     = 0;
  };

  // Branch and bound over the LP relaxation for integral x. Branches on the
  // most fractional variable (lowest index on ties). Open nodes are taken
  // best bound first until an incumbent exists, then depth first with a
  // best-bound restart every `restart_interval` nodes. Requires integral c.
  // The root incumbent comes from rounding the relaxation.
  IlpResult solve_ilp(LpProblem const& problem, IlpBudget const& budget = {});

}  // namespace hfill

#endif  // HFILL_LP_HPP_
