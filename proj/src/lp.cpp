#include "hfill/lp.hpp"

#include "hfill/errors.hpp"

#include <algorithm>

namespace hfill {

  namespace {

    template <typename Int>
    BigInt to_big(Int const& v) {
      if constexpr (std::is_same_v<Int, BigInt>) {
        return v;
      } else {
        return BigInt(v.str());
      }
    }

    template <typename Int>
    Rational to_rational(Fraction<Int> const& f) {
      return Rational(to_big(f.num()), to_big(f.den()));
    }

    template <typename Int>
    class Tableau {
     public:
      using F = Fraction<Int>;

      explicit Tableau(LpProblem const& p)
          : _m(p.a.rows()), _n(p.a.cols()), _cols(_n + _m), _t(_m, std::vector<F>(_cols)),
            _rhs(_m), _basis(_m), _sign(_m, 1), _d(_cols), _allowed(_cols, true) {
        for (std::size_t c = 0; c < _n; ++c) {
          for (auto const& [r, v] : p.a.column(c)) {
            _t[r][c] = F(Int(v));
          }
        }
        for (std::size_t r = 0; r < _m; ++r) {
          if (p.b[r] < 0) {
            _sign[r] = -1;
            for (std::size_t c = 0; c < _n; ++c) {
              if (!_t[r][c].is_zero()) {
                _t[r][c] = -_t[r][c];
              }
            }
          }
          _rhs[r]          = F(Int(p.b[r] < 0 ? -p.b[r] : p.b[r]));
          _t[r][_n + r]    = F(Int(1));
          _basis[r]        = _n + r;
        }
      }

      LpSolution solve(LpProblem const& p, LpBudget const& budget) {
        LpSolution out;
        _budget = budget.max_pivots;

        // Phase 1: minimize the sum of artificials.
        std::vector<F> c1(_cols);
        for (std::size_t r = 0; r < _m; ++r) {
          c1[_n + r] = F(Int(1));
        }
        price(c1);
        auto st = iterate();
        out.pivots = _pivots;
        if (st != LpStatus::optimal) {
          out.status = st;
          return out;
        }
        if (_z.sign() > 0) {
          out.status = LpStatus::infeasible;
          return out;
        }
        drive_out_artificials();

        // Phase 2.
        std::vector<F> c2(_cols);
        for (std::size_t j = 0; j < _n; ++j) {
          c2[j] = F(Int(p.c[j]));
        }
        for (std::size_t j = _n; j < _cols; ++j) {
          _allowed[j] = false;
        }
        price(c2);
        st         = iterate();
        out.pivots = _pivots;
        out.status = st;
        if (st != LpStatus::optimal) {
          return out;
        }
        out.objective = to_rational(_z);
        out.x.assign(_n, Rational());
        for (std::size_t r = 0; r < _m; ++r) {
          if (_basis[r] < _n) {
            out.x[_basis[r]] = to_rational(_rhs[r]);
          }
        }
        out.y.resize(_m);
        for (std::size_t r = 0; r < _m; ++r) {
          F y = -_d[_n + r];
          if (_sign[r] < 0) {
            y = -y;
          }
          out.y[r] = to_rational(y);
        }
        return out;
      }

     private:
      static constexpr std::size_t stall_limit = 50;

      // Reduced costs and objective for the current basis.
      void price(std::vector<F> const& c) {
        _c = c;
        for (std::size_t j = 0; j < _cols; ++j) {
          _d[j] = c[j];
        }
        _z = F();
        for (std::size_t r = 0; r < _m; ++r) {
          F const& cb = c[_basis[r]];
          if (cb.is_zero()) {
            continue;
          }
          _z += cb * _rhs[r];
          for (std::size_t j = 0; j < _cols; ++j) {
            if (!_t[r][j].is_zero()) {
              _d[j] -= cb * _t[r][j];
            }
          }
        }
      }

      LpStatus iterate() {
        bool        bland   = false;
        std::size_t stalled = 0;
        while (true) {
          std::optional<std::size_t> enter;
          for (std::size_t j = 0; j < _cols; ++j) {
            if (!_allowed[j] || _d[j].sign() >= 0) {
              continue;
            }
            if (!enter || (!bland && _d[j] < _d[*enter])) {
              enter = j;
            }
            if (bland) {
              break;
            }
          }
          if (!enter) {
            return LpStatus::optimal;
          }
          std::size_t                j = *enter;
          std::optional<std::size_t> leave;
          F                          best;
          for (std::size_t r = 0; r < _m; ++r) {
            if (_t[r][j].sign() <= 0) {
              continue;
            }
            F ratio = _rhs[r] / _t[r][j];
            if (!leave || ratio < best
                || (ratio == best && _basis[r] < _basis[*leave])) {
              leave = r;
              best  = ratio;
            }
          }
          if (!leave) {
            return LpStatus::unbounded;
          }
          if (_pivots >= _budget) {
            return LpStatus::budget_exceeded;
          }
          F before = _z;
          pivot(*leave, j);
          if (_z == before) {
            if (++stalled >= stall_limit) {
              bland = true;
            }
          } else {
            stalled = 0;
            bland   = false;
          }
        }
      }

      void pivot(std::size_t r, std::size_t j) {
        ++_pivots;
        F const p = _t[r][j];
        std::vector<std::size_t> nz;
        for (std::size_t k = 0; k < _cols; ++k) {
          if (!_t[r][k].is_zero()) {
            if (!(p == F(Int(1)))) {
              _t[r][k] /= p;
            }
            nz.push_back(k);
          }
        }
        if (!(p == F(Int(1)))) {
          _rhs[r] /= p;
        }
        for (std::size_t i = 0; i < _m; ++i) {
          if (i == r || _t[i][j].is_zero()) {
            continue;
          }
          F f = _t[i][j];
          for (std::size_t k : nz) {
            _t[i][k] -= f * _t[r][k];
          }
          _rhs[i] -= f * _rhs[r];
        }
        if (!_d[j].is_zero()) {
          F f = _d[j];
          for (std::size_t k : nz) {
            _d[k] -= f * _t[r][k];
          }
          _z += f * _rhs[r];
        }
        _basis[r] = j;
      }

      void drive_out_artificials() {
        for (std::size_t r = 0; r < _m; ++r) {
          if (_basis[r] < _n) {
            continue;
          }
          for (std::size_t k = 0; k < _n; ++k) {
            if (!_t[r][k].is_zero()) {
              pivot(r, k);
              break;
            }
          }
        }
      }

      std::size_t                 _m, _n, _cols;
      std::vector<std::vector<F>> _t;
      std::vector<F>              _rhs;
      std::vector<std::size_t>    _basis;
      std::vector<int>            _sign;
      std::vector<F>              _c;
      std::vector<F>              _d;
      F                           _z;
      std::vector<bool>           _allowed;
      std::size_t                 _pivots = 0;
      std::size_t                 _budget = 0;
    };

  }  // namespace

  LpSolution solve_lp(LpProblem const& problem, LpBudget const& budget) {
    if (problem.b.size() != problem.a.rows() || problem.c.size() != problem.a.cols()) {
      throw Error(ErrorCode::invalid_argument, "solve_lp: dimension mismatch");
    }
    try {
      Tableau<SmallInt> t(problem);
      return t.solve(problem, budget);
    } catch (std::overflow_error const&) {
      Tableau<BigInt> t(problem);
      return t.solve(problem, budget);
    }
  }

  namespace {

    struct Bound {
      std::size_t  var;
      bool         upper;
      std::int64_t value;
    };

    struct Node {
      std::vector<Bound> bounds;
      Rational           parent_bound;
    };

    LpProblem with_bounds(LpProblem const& p, std::vector<Bound> const& bounds) {
      if (bounds.empty()) {
        return p;
      }
      std::size_t m = p.a.rows(), n = p.a.cols(), k = bounds.size();
      LpProblem   q{SparseIntMatrix(m + k, n + k), p.b, p.c};
      for (std::size_t c = 0; c < n; ++c) {
        for (auto const& [r, v] : p.a.column(c)) {
          q.a.add(r, c, v);
        }
      }
      for (std::size_t i = 0; i < k; ++i) {
        q.a.add(m + i, bounds[i].var, 1);
        q.a.add(m + i, n + i, bounds[i].upper ? 1 : -1);
        q.b.push_back(bounds[i].value);
        q.c.push_back(0);
      }
      return q;
    }

    BigInt floor_of(Rational const& r) {
      return r.floor();
    }

    BigInt ceil_of(Rational const& r) {
      return r.ceil();
    }

  }  // namespace

  IlpResult solve_ilp(LpProblem const& problem, IlpBudget const& budget) {
    IlpResult   result;
    std::size_t n = problem.a.cols();

    auto root = solve_lp(problem, budget.lp);
    result.nodes = 1;
    if (root.status != LpStatus::optimal) {
      result.status = root.status;
      return result;
    }
    result.root_bound = root.objective;

    auto consider = [&](std::vector<std::int64_t> const& x) {
      if (problem.a.multiply(x) != problem.b) {
        return;
      }
      Rational v;
      for (std::size_t j = 0; j < n; ++j) {
        v += Rational(BigInt(problem.c[j] * x[j]));
      }
      if (!result.value || v < *result.value) {
        result.value = v;
        result.x     = x;
      }
    };

    auto integral = [&](std::vector<Rational> const& x) {
      return std::all_of(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n),
                         [](Rational const& v) { return v.is_integer(); });
    };
    auto as_int = [&](std::vector<Rational> const& x, bool round) {
      std::vector<std::int64_t> out(n);
      Rational                  half(BigInt(1), BigInt(2));
      for (std::size_t j = 0; j < n; ++j) {
        BigInt v = round ? floor_of(x[j] + half) : x[j].num();
        out[j]   = to_int64(v);
      }
      return out;
    };

    if (integral(root.x)) {
      consider(as_int(root.x, false));
    } else {
      consider(as_int(root.x, true));
    }
    auto closed = [&] {
      return result.value && *result.value <= Rational(ceil_of(result.root_bound));
    };
    if (closed()) {
      result.status    = LpStatus::optimal;
      result.certified = true;
      return result;
    }

    // Most fractional variable, lowest index on ties.
    auto branch_var = [&](std::vector<Rational> const& x) -> std::optional<std::size_t> {
      std::optional<std::size_t> best;
      Rational                   best_gap;
      Rational                   half(BigInt(1), BigInt(2));
      for (std::size_t j = 0; j < n; ++j) {
        if (x[j].is_integer()) {
          continue;
        }
        Rational frac = x[j] - Rational(floor_of(x[j]));
        Rational gap  = frac < half ? half - frac : frac - half;
        if (!best || gap < best_gap) {
          best     = j;
          best_gap = gap;
        }
      }
      return best;
    };

    std::vector<Node> stack;
    auto push_children = [&](std::vector<Bound> const& bounds, std::vector<Rational> const& x,
                             Rational const& bound) {
      auto j = branch_var(x);
      if (!j) {
        return;
      }
      std::int64_t lo = to_int64(floor_of(x[*j]));
      Rational     frac = x[*j] - Rational(BigInt(lo));
      Node down{bounds, bound}, up{bounds, bound};
      down.bounds.push_back({*j, true, lo});
      up.bounds.push_back({*j, false, lo + 1});
      // The child nearer the relaxation value is explored first.
      if (frac < Rational(BigInt(1), BigInt(2))) {
        stack.push_back(std::move(up));
        stack.push_back(std::move(down));
      } else {
        stack.push_back(std::move(down));
        stack.push_back(std::move(up));
      }
    };
    push_children({}, root.x, root.objective);

    while (!stack.empty()) {
      if (closed()) {
        break;
      }
      if (result.nodes >= budget.max_nodes) {
        result.status = LpStatus::budget_exceeded;
        return result;
      }
      // Best-bound selection until an incumbent exists; depth first after
      // that, with periodic best-bound restarts.
      if (!result.value
          || (budget.restart_interval > 0 && result.nodes % budget.restart_interval == 0)) {
        auto best = std::min_element(stack.begin(), stack.end(), [](Node const& a, Node const& b) {
          return a.parent_bound < b.parent_bound;
        });
        std::rotate(best, best + 1, stack.end());
      }
      Node node = std::move(stack.back());
      stack.pop_back();
      if (result.value && Rational(ceil_of(node.parent_bound)) >= *result.value) {
        continue;
      }
      auto lp = solve_lp(with_bounds(problem, node.bounds), budget.lp);
      ++result.nodes;
      if (lp.status == LpStatus::infeasible) {
        continue;
      }
      if (lp.status != LpStatus::optimal) {
        result.status = lp.status;
        return result;
      }
      if (result.value && Rational(ceil_of(lp.objective)) >= *result.value) {
        continue;
      }
      std::vector<Rational> x(lp.x.begin(), lp.x.begin() + static_cast<std::ptrdiff_t>(n));
      if (integral(x)) {
        consider(as_int(x, false));
        continue;
      }
      consider(as_int(x, true));
      push_children(node.bounds, x, lp.objective);
    }
    result.status    = result.value ? LpStatus::optimal : LpStatus::infeasible;
    result.certified = result.value.has_value();
    return result;
  }

}  // namespace hfill
