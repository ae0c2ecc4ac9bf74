#include "hfill/filling.hpp"

#include "hfill/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace hfill {

  char const* to_string(FillMethod m) noexcept {
    return m == FillMethod::unique ? "UNIQUE" : "ILP";
  }

  FillingSolver::FillingSolver(CellComplex const& k)
      : _k(&k), _boundary(k.dim() + 1), _cell_vertices(k.dim() + 1), _kernel(k.dim() + 1) {
    for (int d = 1; d <= k.dim(); ++d) {
      _boundary[d] = boundary_matrix(k, d);
    }
    _coboundary.resize(k.dim());
    for (int d = 0; d < k.dim(); ++d) {
      _coboundary[d].resize(k.cell_count(d));
      auto const& m = _boundary[d + 1];
      for (std::size_t c = 0; c < m.cols(); ++c) {
        for (auto const& [r, v] : m.column(c)) {
          _coboundary[d][r].push_back(c);
        }
      }
    }
    auto& ev = _cell_vertices[std::min(1, k.dim())];
    if (k.dim() >= 1) {
      for (auto const& e : k.edges()) {
        ev.push_back({std::min(e.tail, e.head), std::max(e.tail, e.head)});
      }
    }
    if (k.dim() >= 2) {
      for (auto const& f : k.faces2()) {
        std::vector<std::size_t> v = f.walk;
        std::sort(v.begin(), v.end());
        _cell_vertices[2].push_back(std::move(v));
      }
    }
    if (k.dim() >= 3) {
      for (auto const& c : k.faces3()) {
        std::vector<std::size_t> v;
        for (auto const& f : c.boundary) {
          auto const& fv = _cell_vertices[2][f.cell];
          v.insert(v.end(), fv.begin(), fv.end());
        }
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        _cell_vertices[3].push_back(std::move(v));
      }
    }
  }

  std::size_t FillingSolver::kernel_rank(int d) const {
    if (d < 1 || d > _k->dim()) {
      throw Error(ErrorCode::invalid_argument, "no boundary map on " + std::to_string(d) + "-cells");
    }
    std::lock_guard lock(_mutex);
    if (!_kernel[d]) {
      _kernel[d] = hfill::kernel_rank(_boundary[d]).kernel_rank;
    }
    return *_kernel[d];
  }

  namespace {

    std::vector<std::int64_t> restrict_rhs(Chain const& s, std::vector<std::size_t> const& rows) {
      std::vector<std::int64_t> b(rows.size(), 0);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        b[i] = s[rows[i]];
      }
      return b;
    }

  }  // namespace

  std::vector<std::size_t> FillingSolver::cells_near(Chain const& s, int radius) const {
    int                      d = s.dim();
    std::vector<int>         dist(_k->vertices().size(), -1);
    std::deque<std::size_t>  queue;
    auto                     seed = [&](std::size_t v) {
      if (dist[v] < 0) {
        dist[v] = 0;
        queue.push_back(v);
      }
    };
    for (auto const& [cell, coeff] : s.coeffs()) {
      if (d == 0) {
        seed(cell);
      } else {
        for (auto v : _cell_vertices[d][cell]) {
          seed(v);
        }
      }
    }
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      if (dist[v] == radius) {
        continue;
      }
      for (auto e : _k->incident_edges(v)) {
        auto u = _k->other_end(e, v);
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          queue.push_back(u);
        }
      }
    }
    std::vector<std::size_t> out;
    auto const&              cv = _cell_vertices[d + 1];
    for (std::size_t c = 0; c < cv.size(); ++c) {
      if (std::all_of(cv[c].begin(), cv[c].end(), [&](std::size_t v) { return dist[v] >= 0; })) {
        out.push_back(c);
      }
    }
    return out;
  }

  FillingResult FillingSolver::fvol(Chain const& s, FillBudget const& budget) const {
    int d = s.dim();
    if (d < 0 || d + 1 > _k->dim()) {
      throw Error(ErrorCode::invalid_argument,
                  "cannot fill a " + std::to_string(d) + "-cycle in a "
                      + std::to_string(_k->dim()) + "-complex");
    }
    for (auto const& [cell, coeff] : s.coeffs()) {
      if (cell >= _k->cell_count(d)) {
        throw Error(ErrorCode::invalid_argument, "chain refers to a missing cell");
      }
    }
    if (!is_cycle(*_k, s)) {
      throw Error(ErrorCode::invalid_argument, "chain is not a cycle");
    }
    bool unique = !budget.force_ilp && kernel_rank(d + 1) == 0;
    if (s.empty()) {
      FillingResult r;
      r.cycle     = s;
      r.filling   = Chain(d + 1);
      r.method    = unique ? FillMethod::unique : FillMethod::ilp;
      r.certified = true;
      return r;
    }
    FillingResult r = unique ? fvol_unique(s) : fvol_ilp(s, budget);
    if (apply_boundary(*_k, r.filling) != s) {
      throw Error(ErrorCode::mismatched_boundary, "filling does not bound the cycle");
    }
    r.volume = r.filling.norm();
    return r;
  }

  FillingResult FillingSolver::fvol_unique(Chain const& s) const {
    int                        d     = s.dim();
    std::size_t                total = _k->cell_count(d + 1);
    std::vector<std::size_t>   rows(_k->cell_count(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i] = i;
    }
    auto b = restrict_rhs(s, rows);
    for (int radius = 1;; radius *= 2) {
      auto cols = cells_near(s, radius);
      // Past the vertex count the window holds the whole component.
      bool all = cols.size() == total || radius > static_cast<int>(_k->vertices().size());
      auto x   = solve_exact(_boundary[d + 1].select_columns(cols), b);
      if (x) {
        FillingResult r;
        r.cycle   = s;
        r.filling = Chain(d + 1);
        for (std::size_t j = 0; j < cols.size(); ++j) {
          r.filling.add(cols[j], (*x)[j]);
        }
        r.method    = FillMethod::unique;
        r.certified = true;
        return r;
      }
      if (all) {
        throw Error(ErrorCode::no_filling, "cycle is not a boundary in this complex");
      }
    }
  }

  FillingResult FillingSolver::fvol_ilp(Chain const& s, FillBudget const& budget) const {
    int                   d      = s.dim();
    std::size_t           total  = _k->cell_count(d + 1);
    auto const&           bd     = _boundary[d + 1];
    auto const&           cob    = _coboundary[d];
    int                   radius = 1;
    std::set<std::size_t> pulled;  // cells the truncated relaxation asked for

    auto make_lp = [&](std::vector<std::size_t> const& cells, std::vector<std::size_t> const& rows,
                       std::map<std::size_t, std::size_t> const& local) {
      std::size_t n = cells.size();
      LpProblem   lp{SparseIntMatrix(rows.size(), 2 * n), restrict_rhs(s, rows),
                     std::vector<std::int64_t>(2 * n, 1)};
      for (std::size_t j = 0; j < n; ++j) {
        for (auto const& [r, v] : bd.column(cells[j])) {
          if (auto it = local.find(r); it != local.end()) {
            lp.a.add(it->second, j, v);
            lp.a.add(it->second, n + j, -v);
          }
        }
      }
      return lp;
    };

    while (true) {
      auto cols = cells_near(s, radius);
      cols.insert(cols.end(), pulled.begin(), pulled.end());
      std::sort(cols.begin(), cols.end());
      cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
      bool all = cols.size() == total || radius > static_cast<int>(_k->vertices().size());

      // Rows touched by the columns or the cycle.
      std::set<std::size_t> row_set;
      for (auto const& [cell, coeff] : s.coeffs()) {
        row_set.insert(cell);
      }
      for (auto c : cols) {
        for (auto const& [r, v] : bd.column(c)) {
          row_set.insert(r);
        }
      }
      std::vector<std::size_t>           rows(row_set.begin(), row_set.end());
      std::map<std::size_t, std::size_t> local;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        local[rows[i]] = i;
      }
      std::size_t n  = cols.size();
      auto        lp = make_lp(cols, rows, local);

      auto relax = solve_lp(lp, budget.ilp.lp);
      if (relax.status == LpStatus::budget_exceeded) {
        throw Error(ErrorCode::budget_exceeded, "LP relaxation exceeded its pivot budget");
      }
      if (relax.status != LpStatus::optimal) {
        if (all) {
          throw Error(ErrorCode::no_filling, "cycle is not a boundary in this complex");
        }
        radius *= 2;
        continue;
      }

      // Outside cells meeting the window's rows, cut down to those rows,
      // relax the whole complex: their optimum is a global lower bound.
      if (!all) {
        std::vector<bool> inside(total, false);
        for (auto c : cols) {
          inside[c] = true;
        }
        std::set<std::size_t> outside;
        for (auto r : rows) {
          for (auto c : cob[r]) {
            if (!inside[c]) {
              outside.insert(c);
            }
          }
        }
        if (!outside.empty()) {
          auto wide = cols;
          wide.insert(wide.end(), outside.begin(), outside.end());
          auto lower = solve_lp(make_lp(wide, rows, local), budget.ilp.lp);
          if (lower.status == LpStatus::budget_exceeded) {
            throw Error(ErrorCode::budget_exceeded, "LP relaxation exceeded its pivot budget");
          }
          if (lower.objective < relax.objective) {
            std::size_t m = wide.size();
            for (std::size_t j = n; j < m; ++j) {
              if (!lower.x[j].is_zero() || !lower.x[m + j].is_zero()) {
                pulled.insert(wide[j]);
              }
            }
            continue;
          }
        }
      }

      // The window's relaxation value is now the global one.
      auto ilp = solve_ilp(lp, budget.ilp);
      if (ilp.status == LpStatus::infeasible) {
        if (all) {
          throw Error(ErrorCode::no_filling, "cycle has no integral filling in this complex");
        }
        radius *= 2;
        continue;
      }
      if (!ilp.x) {
        throw Error(ErrorCode::budget_exceeded, "branch and bound found no filling within budget");
      }
      bool closed = ilp.status == LpStatus::optimal
                    && (*ilp.value == Rational(relax.objective.ceil()) || (all && ilp.certified));
      if (ilp.status == LpStatus::optimal && !closed && !all) {
        radius *= 2;
        continue;
      }
      FillingResult r;
      r.cycle   = s;
      r.filling = Chain(d + 1);
      for (std::size_t j = 0; j < n; ++j) {
        r.filling.add(cols[j], (*ilp.x)[j] - (*ilp.x)[n + j]);
      }
      r.method    = FillMethod::ilp;
      r.certified = closed;
      return r;
    }
  }

  FillingResult fvol(CellComplex const& k, Chain const& s, FillBudget const& budget) {
    return FillingSolver(k).fvol(s, budget);
  }

  Chain transport_chain(CellComplex const& from, CellComplex const& to, Chain const& c) {
    auto vertex = [&](std::size_t v) {
      auto id = to.find_vertex(from.vertices()[v]);
      if (!id) {
        throw Error(ErrorCode::invalid_argument,
                    "vertex " + label_to_string(from, from.vertices()[v]) + " has no counterpart");
      }
      return *id;
    };
    auto edge = [&](std::size_t e) -> SignedCell {
      auto const& src = from.edges()[e];
      auto        t = vertex(src.tail), h = vertex(src.head);
      auto        id = to.find_edge(t, h);
      if (!id) {
        throw Error(ErrorCode::invalid_argument, "edge has no counterpart");
      }
      return {*id, to.edges()[*id].tail == t ? 1 : -1};
    };
    Chain out(c.dim());
    for (auto const& [cell, coeff] : c.coeffs()) {
      switch (c.dim()) {
        case 0: out.add(vertex(cell), coeff); break;
        case 1: {
          auto e = edge(cell);
          out.add(e.cell, e.sign * coeff);
          break;
        }
        case 2: {
          auto const&              f = from.faces2()[cell];
          std::vector<std::size_t> walk;
          for (auto v : f.walk) {
            walk.push_back(vertex(v));
          }
          auto id = to.find_face(walk);
          if (!id) {
            throw Error(ErrorCode::invalid_argument, "face has no counterpart");
          }
          // Compare orientations on the first boundary edge.
          auto first = f.boundary.front();
          auto e     = edge(first.cell);
          int  sign  = 0;
          for (auto const& b : to.faces2()[*id].boundary) {
            if (b.cell == e.cell) {
              sign = b.sign * e.sign * first.sign;
            }
          }
          out.add(*id, sign * coeff);
          break;
        }
        default:
          throw Error(ErrorCode::invalid_argument, "chains of dimension 3 cannot be transported");
      }
    }
    return out;
  }

  bool padding_check(CellComplex const& small, FillingSolver const& large, Chain const& s,
                     FillingResult& result, FillBudget const& budget) {
    if (s.empty()) {
      result.padding_stable = true;
      return true;
    }
    auto moved            = transport_chain(small, large.complex(), s);
    auto again            = large.fvol(moved, budget);
    result.padding_stable = again.volume == result.volume;
    return result.padding_stable;
  }

}  // namespace hfill
