#include <random>

#include "doctest.h"
#include "hfill/lp.hpp"

using namespace hfill;

namespace {

  using Q = Rational;

  LpProblem make(std::vector<std::vector<std::int64_t>> const& a,
                 std::vector<std::int64_t> b, std::vector<std::int64_t> c) {
    LpProblem p{SparseIntMatrix(a.size(), c.size()), std::move(b), std::move(c)};
    for (std::size_t r = 0; r < a.size(); ++r) {
      for (std::size_t j = 0; j < a[r].size(); ++j) {
        if (a[r][j] != 0) p.a.add(r, j, a[r][j]);
      }
    }
    return p;
  }

  // Unique solution of A_S x = b over the rationals, if any.
  std::optional<std::vector<Q>> solve_subset(LpProblem const& p,
                                             std::vector<std::size_t> const& s) {
    std::size_t                 m = p.a.rows(), k = s.size();
    std::vector<std::vector<Q>> t(m, std::vector<Q>(k + 1));
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j = 0; j < k; ++j) t[r][j] = Q(BigInt(p.a.at(r, s[j])));
      t[r][k] = Q(BigInt(p.b[r]));
    }
    std::size_t rank = 0;
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t piv = rank;
      while (piv < m && t[piv][j].is_zero()) ++piv;
      if (piv == m) return std::nullopt;
      std::swap(t[piv], t[rank]);
      for (std::size_t r = 0; r < m; ++r) {
        if (r == rank || t[r][j].is_zero()) continue;
        Q f = t[r][j] / t[rank][j];
        for (std::size_t c = 0; c <= k; ++c) t[r][c] -= f * t[rank][c];
      }
      ++rank;
    }
    for (std::size_t r = rank; r < m; ++r) {
      if (!t[r][k].is_zero()) return std::nullopt;
    }
    std::vector<Q> x(p.a.cols());
    for (std::size_t j = 0; j < k; ++j) x[s[j]] = t[j][k] / t[j][j];
    return x;
  }

  // Minimum over basic feasible solutions (column subsets of size <= m).
  std::optional<Q> vertex_minimum(LpProblem const& p) {
    std::size_t      n = p.a.cols(), m = p.a.rows();
    std::optional<Q> best;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<std::size_t> s;
      for (std::size_t j = 0; j < n; ++j) {
        if (mask >> j & 1) s.push_back(j);
      }
      if (s.size() > m) continue;
      auto x = solve_subset(p, s);
      if (!x) continue;
      bool ok = std::all_of(x->begin(), x->end(), [](Q const& v) { return v.sign() >= 0; });
      if (!ok) continue;
      Q v;
      for (std::size_t j = 0; j < n; ++j) v += Q(BigInt(p.c[j])) * (*x)[j];
      if (!best || v < *best) best = v;
    }
    return best;
  }

  // Optimal integer value by depth-first enumeration; c > 0 bounds the search.
  std::optional<std::int64_t> integer_minimum(LpProblem const& p, std::int64_t cap) {
    std::size_t                 n = p.a.cols();
    std::optional<std::int64_t> best;
    std::vector<std::int64_t>   x(n, 0);
    auto rec = [&](auto&& self, std::size_t j, std::int64_t cost) -> void {
      if (cost > cap || (best && cost >= *best)) return;
      if (j == n) {
        if (p.a.multiply(x) == p.b) best = cost;
        return;
      }
      for (std::int64_t v = 0; cost + v * p.c[j] <= cap; ++v) {
        x[j] = v;
        self(self, j + 1, cost + v * p.c[j]);
      }
      x[j] = 0;
    };
    rec(rec, 0, 0);
    return best;
  }

  void check_certificate(LpProblem const& p, LpSolution const& s) {
    REQUIRE(s.status == LpStatus::optimal);
    // Primal feasibility.
    for (std::size_t r = 0; r < p.a.rows(); ++r) {
      Q lhs;
      for (std::size_t j = 0; j < p.a.cols(); ++j) lhs += Q(BigInt(p.a.at(r, j))) * s.x[j];
      CHECK(lhs == Q(BigInt(p.b[r])));
    }
    for (auto const& v : s.x) CHECK(v.sign() >= 0);
    // Dual feasibility and equal objectives.
    Q yb;
    for (std::size_t r = 0; r < p.a.rows(); ++r) yb += s.y[r] * Q(BigInt(p.b[r]));
    CHECK(yb == s.objective);
    for (std::size_t j = 0; j < p.a.cols(); ++j) {
      Q reduced(BigInt(p.c[j]));
      for (auto const& [r, v] : p.a.column(j)) reduced -= s.y[r] * Q(BigInt(v));
      CHECK(reduced.sign() >= 0);
    }
  }

}  // namespace

TEST_CASE("small LP with known optimum") {
  // min x + 2y s.t. x + y = 3, x - y + s = 1.
  auto p = make({{1, 1, 0}, {1, -1, 1}}, {3, 1}, {1, 2, 0});
  auto s = solve_lp(p);
  check_certificate(p, s);
  CHECK(s.objective == Q(BigInt(4)));
  CHECK(s.x[0] == Q(BigInt(2)));
  CHECK(s.x[1] == Q(BigInt(1)));
}

TEST_CASE("infeasible and unbounded LPs") {
  CHECK(solve_lp(make({{1}}, {-1}, {1})).status == LpStatus::infeasible);
  CHECK(solve_lp(make({{1, -1}}, {0}, {-1, 0})).status == LpStatus::unbounded);
  CHECK(solve_lp(make({{1, 1}, {1, 1}}, {1, 2}, {1, 1})).status == LpStatus::infeasible);
}

TEST_CASE("redundant rows and negative right-hand sides") {
  auto p = make({{1, 1, 0}, {2, 2, 0}, {0, -1, -1}}, {2, 4, -3}, {3, 1, 1});
  auto s = solve_lp(p);
  check_certificate(p, s);
  CHECK(s.objective == *vertex_minimum(p));
}

TEST_CASE("degenerate cycling example") {
  // Beale's example with slacks, scaled by 100 to integers.
  auto p = make({{100, 0, 0, 25, -6000, -4, 900},
                 {0, 100, 0, 50, -9000, -2, 300},
                 {0, 0, 1, 0, 0, 1, 0}},
                {0, 0, 1}, {0, 0, 0, -75, 15000, -2, 600});
  auto s = solve_lp(p);
  check_certificate(p, s);
  CHECK(s.objective == Q(BigInt(-5)));
  CHECK(s.objective == *vertex_minimum(p));
}

TEST_CASE("random LPs agree with vertex enumeration") {
  std::mt19937_64                    rng(11);
  std::uniform_int_distribution<int> val(-4, 4), cost(0, 5), dim(1, 3), cols(2, 7);
  int                                optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t m = dim(rng), n = cols(rng);
    std::vector<std::vector<std::int64_t>> a(m, std::vector<std::int64_t>(n));
    for (auto& row : a)
      for (auto& v : row) v = val(rng);
    std::vector<std::int64_t> b(m), c(n);
    for (auto& v : b) v = val(rng);
    for (auto& v : c) v = cost(rng);
    auto p      = make(a, b, c);
    auto s      = solve_lp(p);
    auto oracle = vertex_minimum(p);
    if (!oracle) {
      CHECK(s.status == LpStatus::infeasible);
      ++infeasible;
      continue;
    }
    check_certificate(p, s);
    CHECK(s.objective == *oracle);
    ++optimal;
  }
  CHECK(optimal > 50);
  CHECK(infeasible > 10);
}

TEST_CASE("large coefficients fall back to big integers") {
  std::int64_t big = 1'000'000'000'000'000'000;
  auto p = make({{big, big - 1, 3, 0}, {big - 7, big, 0, 5}, {1, 1, 1, 1}},
                {big, big - 3, 4}, {1, 1, 1, 1});
  auto oracle = vertex_minimum(p);
  REQUIRE(oracle);
  auto s = solve_lp(p);
  check_certificate(p, s);
  CHECK(s.objective == *oracle);
}

TEST_CASE("pivot budget") {
  auto p = make({{1, 1, 1, 0}, {1, -1, 0, 1}}, {3, 1}, {1, 2, 0, 0});
  CHECK(solve_lp(p, LpBudget{0}).status == LpStatus::budget_exceeded);
}

TEST_CASE("ILP with an integrality gap") {
  // 2x + 2y = 3 has rational but no integer solutions.
  auto r = solve_ilp(make({{2, 2}}, {3}, {1, 1}));
  CHECK(r.status == LpStatus::infeasible);
  CHECK(r.root_bound == Q(BigInt(3), BigInt(2)));

  // min x + y + z s.t. 2x + 3y = 7, 3y + 5z = 8 -> (2, 1, 1).
  auto p = make({{2, 3, 0}, {0, 3, 5}}, {7, 8}, {1, 1, 1});
  auto s = solve_ilp(p);
  CHECK(s.status == LpStatus::optimal);
  CHECK(s.certified);
  REQUIRE(s.x);
  CHECK(*s.value == Q(BigInt(*integer_minimum(p, 20))));
  CHECK(p.a.multiply(*s.x) == p.b);
}

TEST_CASE("random ILPs agree with enumeration") {
  std::mt19937_64                    rng(23);
  std::uniform_int_distribution<int> val(-3, 3), cost(1, 3), dim(1, 3), cols(2, 5), x0(0, 2);
  int                                gaps = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t m = dim(rng), n = cols(rng);
    std::vector<std::vector<std::int64_t>> a(m, std::vector<std::int64_t>(n));
    for (auto& row : a)
      for (auto& v : row) v = val(rng);
    std::vector<std::int64_t> x(n), c(n);
    for (auto& v : x) v = x0(rng);
    for (auto& v : c) v = cost(rng);
    auto p = make(a, {}, c);
    p.b    = p.a.multiply(x);
    std::int64_t cap = 0;
    for (std::size_t j = 0; j < n; ++j) cap += c[j] * x[j];
    auto oracle = integer_minimum(p, cap);
    REQUIRE(oracle);
    auto r = solve_ilp(p);
    CHECK(r.status == LpStatus::optimal);
    CHECK(r.certified);
    REQUIRE(r.value);
    CHECK(*r.value == Q(BigInt(*oracle)));
    CHECK(p.a.multiply(*r.x) == p.b);
    CHECK(r.root_bound <= *r.value);
    gaps += r.root_bound < *r.value;
  }
  CHECK(gaps > 0);
}

TEST_CASE("node budget leaves the result uncertified") {
  // Parity forces branching: sum of even coefficients equal to an odd target.
  auto p = make({{2, 2, 2, 2, 2, 2}}, {11}, {1, 1, 1, 1, 1, 1});
  IlpBudget budget;
  budget.max_nodes = 3;
  auto r = solve_ilp(p, budget);
  CHECK(r.status == LpStatus::budget_exceeded);
  CHECK(!r.certified);
}
