#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "hfill/chains.hpp"
#include "hfill/errors.hpp"
#include "hfill/group.hpp"

using namespace hfill;

namespace {

  // All freely reduced words of length <= n over `rank` generators.
  std::vector<Word> reduced_words(std::size_t rank, std::size_t n) {
    std::vector<Word> out{Word()};
    std::size_t       begin = 0;
    for (std::size_t len = 1; len <= n; ++len) {
      std::size_t end = out.size();
      for (std::size_t i = begin; i < end; ++i) {
        for (std::size_t g = 0; g < rank; ++g) {
          for (bool inv : {false, true}) {
            Letter x = make_letter(g, inv);
            if (!out[i].empty() && out[i].letters().back() == -x) continue;
            Letters l = out[i].letters();
            l.push_back(x);
            out.push_back(Word::from_reduced(l));
          }
        }
      }
      begin = end;
    }
    return out;
  }

  // Elements represented by words of length <= n, each given by its
  // ShortLex-least word; equality by the Dehn wrapper, bucketed by exponent
  // sums (an invariant of the element).
  std::set<Letters> brute_force_ball(Presentation const& p, std::size_t n) {
    std::map<std::vector<int>, std::vector<Word>> classes;
    for (auto const& w : reduced_words(p.rank(), n)) {
      std::vector<int> e(p.rank(), 0);
      for (Letter l : w.letters()) e[generator_of(l)] += l > 0 ? 1 : -1;
      auto& bucket = classes[e];
      bool  seen   = false;
      for (auto& rep : bucket) {
        if (dehn_reduce(rep.inverse() * w, p).empty()) {
          if (w < rep) rep = w;
          seen = true;
          break;
        }
      }
      if (!seen) bucket.push_back(w);
    }
    std::set<Letters> out;
    for (auto const& [e, reps] : classes) {
      for (auto const& r : reps) out.insert(r.letters());
    }
    return out;
  }

  std::set<Letters> labels(CellComplex const& k) {
    std::set<Letters> out;
    for (auto const& v : k.vertices()) out.insert(v);
    return out;
  }

  bool composed_boundary_vanishes(CellComplex const& k) {
    if (k.faces2().empty()) return true;
    return (boundary_matrix(k, 1) * boundary_matrix(k, 2)).is_zero();
  }

  std::vector<std::vector<int>> graph_distances(CellComplex const& k) {
    std::size_t                   n = k.vertices().size();
    std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
    for (std::size_t s = 0; s < n; ++s) {
      std::deque<std::size_t> q{s};
      d[s][s] = 0;
      while (!q.empty()) {
        auto v = q.front();
        q.pop_front();
        for (auto e : k.incident_edges(v)) {
          auto u = k.other_end(e, v);
          if (d[s][u] < 0) {
            d[s][u] = d[s][v] + 1;
            q.push_back(u);
          }
        }
      }
    }
    return d;
  }

}  // namespace

TEST_CASE("free group ball is a tree") {
  auto k = build_cayley_ball(GroupOracle::free_group(2), 2);
  CHECK(k.vertices().size() == 17);
  CHECK(k.edges().size() == 16);
  CHECK(k.faces2().empty());
}

TEST_CASE("free abelian ball is the L1 ball with its unit squares") {
  auto k = build_cayley_ball(GroupOracle::free_abelian(2), 2);
  CHECK(k.vertices().size() == 13);
  // Squares with all four corners in |x| + |y| <= 2.
  std::size_t squares = 0;
  for (int x = -3; x <= 3; ++x) {
    for (int y = -3; y <= 3; ++y) {
      bool ok = true;
      for (auto [dx, dy] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
        ok = ok && std::abs(x + dx) + std::abs(y + dy) <= 2;
      }
      squares += ok;
    }
  }
  CHECK(k.faces2().size() == squares);
  for (auto const& f : k.faces2()) CHECK(f.walk.size() == 4);
}

TEST_CASE("surface group balls match brute-force enumeration") {
  auto oracle = GroupOracle::surface(2);
  auto p      = oracle.presentation();
  auto k2     = build_cayley_ball(oracle, 2);
  CHECK(k2.vertices().size() == 65);
  CHECK(labels(k2) == brute_force_ball(p, 2));

  auto k4 = build_cayley_ball(oracle, 4);
  CHECK(labels(k4) == brute_force_ball(p, 4));
  // Faces of length 8 appear once the radius reaches 4.
  CHECK(!k4.faces2().empty());
  for (auto const& f : k4.faces2()) CHECK(f.walk.size() == 8);
}

TEST_CASE("balls are monotone in the radius") {
  for (auto const& name : {"free2", "z2", "z3", "surface2"}) {
    auto oracle = builtin_oracle(name);
    auto prev   = labels(build_cayley_ball(oracle, 0));
    for (int r = 1; r <= 3; ++r) {
      auto cur = labels(build_cayley_ball(oracle, r));
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      CHECK(cur.size() > prev.size());
      prev = cur;
    }
  }
}

TEST_CASE("free abelian graph distance is the L1 distance") {
  for (int r = 1; r <= 4; ++r) {
    auto k = build_cayley_ball(GroupOracle::free_abelian(2), r);
    auto d = graph_distances(k);
    auto coords = [&](std::size_t v) {
      std::array<int, 2> e{0, 0};
      for (Letter l : k.vertices()[v]) e[generator_of(l)] += l > 0 ? 1 : -1;
      return e;
    };
    for (std::size_t u = 0; u < k.vertices().size(); ++u) {
      for (std::size_t v = 0; v < k.vertices().size(); ++v) {
        auto a = coords(u), b = coords(v);
        CHECK(d[u][v] == std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]));
      }
    }
  }
}

TEST_CASE("Cayley complexes are closed, deduplicated and sized by relators") {
  for (auto const& name : {"z2", "z3", "surface2", "surface3"}) {
    auto oracle = builtin_oracle(name);
    int  r      = oracle.strategy() == Strategy::free_abelian ? 3 : 4;
    auto k      = build_cayley_ball(oracle, r);
    CHECK(composed_boundary_vanishes(k));
    std::set<std::vector<std::size_t>> seen;
    for (auto const& f : k.faces2()) {
      CHECK(seen.insert(canonical_cycle(f.walk)).second);
      CHECK(f.walk.size() == oracle.presentation().relators()[f.relator].size());
    }
  }
}

TEST_CASE("normal forms") {
  auto oracle = GroupOracle::surface(2);
  auto p      = oracle.presentation();
  auto ball   = build_cayley_ball(oracle, 3);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, ball.vertices().size() - 1);
  auto r = p.relators()[0].canonical();
  for (int trial = 0; trial < 40; ++trial) {
    Word label = Word::from_reduced(ball.vertices()[pick(rng)]);
    // Disguise the element by inserting a conjugated relator.
    Word g     = Word::from_reduced(ball.vertices()[pick(rng)]);
    Word w     = label * g * r * g.inverse();
    CHECK(oracle.equal(w, label));
    CHECK(oracle.normal_form(w) == label);
  }
  auto z = GroupOracle::free_abelian(3);
  Word w = Word::reduce(Letters{3, -1, 2, -1, -3, 2});
  CHECK(z.normal_form(w) == Word::reduce(Letters{-1, -1, 2, 2}));
  auto f = GroupOracle::free_group(2);
  CHECK(f.normal_form(w) == w);
}

TEST_CASE("short relators break simpliciality") {
  auto p = parse_presentation("gens: a b\nrel: a b\n");
  auto g = GroupOracle::dehn(p);
  try {
    build_cayley_ball(g, 2);
    FAIL("expected NON_SIMPLICIAL");
  } catch (Error const& e) {
    CHECK(e.code() == ErrorCode::non_simplicial);
  }
  try {
    GroupOracle::dehn(parse_presentation("gens: a\nrel: a a\n"));
    FAIL("expected PRECONDITION_VIOLATED");
  } catch (Error const& e) {
    CHECK(e.code() == ErrorCode::precondition_violated);
  }
}

TEST_CASE("vertex cap") {
  try {
    build_cayley_ball(GroupOracle::free_group(3), 6, 1000);
    FAIL("expected OVERFLOW");
  } catch (Error const& e) {
    CHECK(e.code() == ErrorCode::overflow);
  }
}

TEST_CASE("face neighborhoods") {
  auto oracle = GroupOracle::surface(2);
  auto p      = oracle.presentation();
  auto k      = build_face_neighborhood(oracle, {Word()}, 1);
  // Oracle: distinct elements among prefixes of relator loops at 1.
  std::vector<Word> elems{Word()};
  auto              r = p.relators()[0].canonical().letters();
  for (auto const& w : {r, inverse_letters(r)}) {
    for (auto const& rot : rotations(w)) {
      for (std::size_t j = 1; j < rot.size(); ++j) {
        Word pre = Word::reduce(std::span<Letter const>(rot.data(), j));
        bool dup = std::any_of(elems.begin(), elems.end(), [&](Word const& e) {
          return dehn_reduce(e.inverse() * pre, p).empty();
        });
        if (!dup) elems.push_back(pre);
      }
    }
  }
  CHECK(k.vertices().size() == elems.size());
  CHECK(k.faces2().size() == 8);
  CHECK(composed_boundary_vanishes(k));
  CHECK(kernel_rank(boundary_matrix(k, 2)).kernel_rank == 0);

  auto k2 = build_face_neighborhood(oracle, {Word()}, 2);
  CHECK(k2.vertices().size() > k.vertices().size());
  CHECK(composed_boundary_vanishes(k2));
  CHECK(kernel_rank(boundary_matrix(k2, 2)).kernel_rank == 0);
}
