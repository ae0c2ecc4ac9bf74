#include <random>
#include <set>
#include <unordered_map>

#include "doctest.h"
#include "hfill/errors.hpp"
#include "hfill/filling.hpp"

using namespace hfill;

namespace {

  std::size_t vertex_at(CellComplex const& k, VertexLabel const& p) {
    auto v = k.find_vertex(p);
    REQUIRE(v);
    return *v;
  }

  // Closed walk through lattice points as an oriented edge chain.
  Chain walk_chain(CellComplex const& k, std::vector<VertexLabel> const& pts) {
    Chain c(1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto u = vertex_at(k, pts[i]), v = vertex_at(k, pts[(i + 1) % pts.size()]);
      auto e = k.find_edge(u, v);
      REQUIRE(e);
      c.add(*e, k.edges()[*e].tail == u ? 1 : -1);
    }
    return c;
  }

  // Perimeter of the a x b rectangle with lower-left corner (x, y), traced
  // counterclockwise point by point.
  Chain rectangle_loop(CellComplex const& k, int x, int y, int a, int b) {
    std::vector<VertexLabel> pts;
    for (int i = 0; i < a; ++i) pts.push_back({x + i, y});
    for (int j = 0; j < b; ++j) pts.push_back({x + a, y + j});
    for (int i = a; i > 0; --i) pts.push_back({x + i, y + b});
    for (int j = b; j > 0; --j) pts.push_back({x, y + j});
    return walk_chain(k, pts);
  }

  // Grid complex of rank 3 and radius r without cubes and without the
  // squares of the plane z = 0.
  CellComplex punctured_skeleton(int r) {
    auto        full = build_grid_complex(3, r);
    CellComplex k(2, LabelKind::point);
    k.set_radius(r);
    for (auto const& v : full.vertices()) k.add_vertex(v);
    for (auto const& e : full.edges()) k.add_edge(e.tail, e.head, e.label);
    for (auto const& f : full.faces2()) {
      bool hidden = true;
      for (auto v : f.walk) {
        auto const& p = full.vertices()[v];
        hidden = hidden && p[2] == 0;
      }
      if (!hidden) k.add_face2(f.walk, f.relator);
    }
    return k;
  }

  template <typename F>
  ErrorCode code_of(F&& f) {
    try {
      f();
    } catch (Error const& e) {
      return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
  }

  // Every integer chain of norm <= max_norm over the given cells.
  template <typename Visit>
  void enumerate_chains(std::size_t cells, int max_norm, Visit&& visit) {
    std::vector<std::pair<std::size_t, std::int64_t>> terms;
    auto rec = [&](auto&& self, std::size_t from, int left) -> void {
      visit(terms);
      for (std::size_t c = from; c < cells; ++c) {
        for (int v = 1; v <= left; ++v) {
          for (int s : {1, -1}) {
            terms.emplace_back(c, s * v);
            self(self, c + 1, left - v);
            terms.pop_back();
          }
        }
      }
    };
    rec(rec, 0, max_norm);
  }

  // Minimal norm of a filling for every boundary of a chain of norm <= n.
  std::map<std::vector<std::pair<std::size_t, std::int64_t>>, std::int64_t>
  brute_force_fillings(CellComplex const& k, int dim, int n) {
    std::map<std::vector<std::pair<std::size_t, std::int64_t>>, std::int64_t> best;
    enumerate_chains(k.cell_count(dim), n, [&](auto const& terms) {
      Chain c(dim);
      for (auto [cell, v] : terms) c.add(cell, v);
      auto        b = apply_boundary(k, c);
      std::vector<std::pair<std::size_t, std::int64_t>> key(b.coeffs().begin(), b.coeffs().end());
      auto it = best.find(key);
      if (it == best.end() || c.norm() < it->second) best[key] = c.norm();
    });
    return best;
  }

}  // namespace

TEST_CASE("rectangle fillings equal the enclosed area") {
  auto          k = build_grid_complex(2, 10);
  FillingSolver solver(k);
  CHECK(solver.kernel_rank(2) == 0);
  auto s = rectangle_loop(k, -1, -2, 3, 4);
  auto r = solver.fvol(s);
  CHECK(r.volume == 12);
  CHECK(r.method == FillMethod::unique);
  CHECK(r.certified);
  CHECK(apply_boundary(k, r.filling) == s);

  FillBudget forced;
  forced.force_ilp = true;
  auto i           = solver.fvol(s, forced);
  CHECK(i.volume == 12);
  CHECK(i.method == FillMethod::ilp);
  CHECK(i.certified);

  // box_cycle agrees with the traced perimeter.
  CHECK(box_cycle(k, {-1, -2}, {3, 4}) == s);
}

TEST_CASE("zero cycle") {
  auto k = build_grid_complex(2, 3);
  auto r = fvol(k, Chain(1));
  CHECK(r.volume == 0);
  CHECK(r.filling.empty());
  CHECK(r.certified);
}

TEST_CASE("box surfaces in Z3 are filled by their cubes") {
  auto          k = build_grid_complex(3, 4);
  FillingSolver solver(k);
  CHECK(solver.kernel_rank(3) == 0);
  auto s = box_cycle(k, {-1, -1, -1}, {2, 2, 2});
  CHECK(s.norm() == 24);
  auto r = solver.fvol(s);
  CHECK(r.volume == 8);
  CHECK(r.method == FillMethod::unique);
  FillBudget forced;
  forced.force_ilp = true;
  CHECK(solver.fvol(s, forced).volume == 8);
}

TEST_CASE("errors") {
  auto k = build_grid_complex(2, 2);
  Chain edge(1);
  edge.add(0, 1);
  CHECK(code_of([&] { fvol(k, edge); }) == ErrorCode::invalid_argument);
  CHECK(code_of([&] { fvol(k, Chain(2)); }) == ErrorCode::invalid_argument);

  // A square loop with no face bounds nothing.
  CellComplex hollow(2, LabelKind::point);
  for (VertexLabel p : {VertexLabel{0, 0}, {1, 0}, {1, 1}, {0, 1}}) hollow.add_vertex(p);
  for (std::size_t i = 0; i < 4; ++i) hollow.add_edge(i, (i + 1) % 4, 0);
  Chain loop(1);
  for (std::size_t i = 0; i < 4; ++i) loop.add(i, 1);
  CHECK(code_of([&] { fvol(hollow, loop); }) == ErrorCode::no_filling);
  FillBudget forced;
  forced.force_ilp = true;
  CHECK(code_of([&] { fvol(hollow, loop, forced); }) == ErrorCode::no_filling);
}

TEST_CASE("brute-force equivalence on small Z2 balls") {
  for (int r = 1; r <= 2; ++r) {
    auto          k = build_grid_complex(2, r);
    FillingSolver solver(k);
    int           n    = r == 1 ? 6 : 4;
    auto          best = brute_force_fillings(k, 2, n);
    for (auto const& [key, norm] : best) {
      Chain s(1, Chain::Coeffs(key.begin(), key.end()));
      CHECK(solver.fvol(s).volume == norm);
    }
  }
}

TEST_CASE("integer program on a complex with 2-cycles") {
  // The 2-skeleton of Z3 has closed surfaces, so fillings of loops are not
  // unique and the ILP path is taken.
  auto          k = skeleton(build_grid_complex(3, 1), 2);
  FillingSolver solver(k);
  CHECK(solver.kernel_rank(2) > 0);
  auto best = brute_force_fillings(k, 2, 3);
  std::vector<std::pair<Chain, std::int64_t>> cases;
  for (auto const& [key, norm] : best) {
    cases.emplace_back(Chain(1, Chain::Coeffs(key.begin(), key.end())), norm);
  }
  std::mt19937_64 rng(3);
  std::shuffle(cases.begin(), cases.end(), rng);
  cases.resize(std::min<std::size_t>(cases.size(), 250));
  for (auto const& [s, norm] : cases) {
    auto r = solver.fvol(s);
    CHECK(r.method == FillMethod::ilp);
    CHECK(r.certified);
    CHECK(r.volume == norm);
  }
  Chain ring = walk_chain(k, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  CHECK(solver.fvol(ring).volume == 1);
}

TEST_CASE("integer program stays local in a large complex") {
  // Loops far smaller than the complex: a 4x4 square in the z = 0 plane and
  // a 3x2 one in the x = 1 plane.
  auto          k = skeleton(build_grid_complex(3, 6), 2);
  FillingSolver solver(k);
  std::vector<VertexLabel> pts;
  for (int i = -2; i < 2; ++i) pts.push_back({i, -2, 0});
  for (int j = -2; j < 2; ++j) pts.push_back({2, j, 0});
  for (int i = 2; i > -2; --i) pts.push_back({i, 2, 0});
  for (int j = 2; j > -2; --j) pts.push_back({-2, j, 0});
  auto r = solver.fvol(walk_chain(k, pts));
  CHECK(r.method == FillMethod::ilp);
  CHECK(r.certified);
  CHECK(r.volume == 16);
  pts = {{1, 0, 0}, {1, 1, 0}, {1, 2, 0}, {1, 3, 0}, {1, 3, 1}, {1, 3, 2},
         {1, 2, 2}, {1, 1, 2}, {1, 0, 2}, {1, 0, 1}};
  CHECK(solver.fvol(walk_chain(k, pts)).volume == 6);
}

TEST_CASE("solver agreement, subadditivity and scaling") {
  auto              k = build_grid_complex(2, 6);
  FillingSolver     solver(k);
  auto              allowed = inner_vertices(k, default_margin(6));
  FillBudget        forced;
  forced.force_ilp = true;
  std::vector<Chain> cycles;
  for (std::uint64_t i = 0; i < 200; ++i) {
    cycles.push_back(random_cluster_cycle(k, allowed, 4 + i % 13, sample_seed(9, 0, i)));
  }
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    auto u = solver.fvol(cycles[i]);
    auto v = solver.fvol(cycles[i], forced);
    CHECK(u.volume == v.volume);
    auto const& other = cycles[(i * 7 + 3) % cycles.size()];
    auto        sum   = solver.fvol(cycles[i] + other);
    CHECK(sum.volume <= u.volume + solver.fvol(other).volume);
    auto tripled = solver.fvol(3 * cycles[i]);
    CHECK(tripled.volume == 3 * u.volume);
  }

  // Scaling inequality where fillings are not unique.
  auto          k3 = skeleton(build_grid_complex(3, 2), 2);
  FillingSolver s3(k3);
  auto          loop = walk_chain(k3, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {0, 1, 1}, {0, 0, 1}});
  auto          one  = s3.fvol(loop);
  auto          two  = s3.fvol(2 * loop);
  CHECK(one.volume == 3);
  CHECK(two.volume <= 2 * one.volume);
}

TEST_CASE("padding checks") {
  auto          small = build_grid_complex(2, 4);
  auto          large = build_grid_complex(2, 6);
  FillingSolver big(large);
  auto          s = rectangle_loop(small, -2, -2, 4, 3);
  auto          r = fvol(small, s);
  CHECK(padding_check(small, big, s, r));
  CHECK(r.padding_stable);

  FillingResult zero = fvol(small, Chain(1));
  CHECK(padding_check(small, big, Chain(1), zero));

  // The equator of the punctured ball can only be filled over the top.
  auto          holey = punctured_skeleton(1);
  auto          whole = skeleton(build_grid_complex(3, 3), 2);
  FillingSolver whole_solver(whole);
  auto equator = walk_chain(holey, {{-1, -1, 0}, {0, -1, 0}, {1, -1, 0}, {1, 0, 0},
                                    {1, 1, 0}, {0, 1, 0}, {-1, 1, 0}, {-1, 0, 0}});
  auto hugging = fvol(holey, equator);
  CHECK(hugging.volume == 12);
  CHECK(!padding_check(holey, whole_solver, equator, hugging));
  CHECK(!hugging.padding_stable);
}

TEST_CASE("restricted fill samplers") {
  auto k     = build_grid_complex(2, 6);
  auto loops = exhaustive_loops(k, 4);
  // The four unit squares at the origin.
  CHECK(loops.size() == 4);
  std::vector<FillingResult> vols;
  for (auto const& l : loops) vols.push_back(fvol(k, l));
  CHECK(restricted_fill(loops, vols, 4).fill == 1);

  // Add the dominoes through the origin: 2 shapes x 6 positions.
  CHECK(exhaustive_loops(k, 6).size() == 16);

  // Explicit rectangles of perimeter <= 16.
  std::vector<Chain> rects;
  std::int64_t       oracle = 0;
  for (int a = 1; a <= 7; ++a) {
    for (int b = 1; 2 * (a + b) <= 16; ++b) {
      rects.push_back(rectangle_loop(k, -a / 2, -b / 2, a, b));
      oracle = std::max<std::int64_t>(oracle, a * b);
    }
  }
  vols.clear();
  for (auto const& c : rects) vols.push_back(fvol(k, c));
  auto p = restricted_fill(rects, vols, 16);
  CHECK(p.fill == 16);
  CHECK(p.fill == oracle);
  CHECK(p.count == rects.size());

  // Monotone in the cycle set.
  std::vector<Chain>         half(rects.begin(), rects.begin() + rects.size() / 2);
  std::vector<FillingResult> half_vols(vols.begin(), vols.begin() + vols.size() / 2);
  CHECK(restricted_fill(half, half_vols, 16).fill <= p.fill);

  // Trees carry no nonzero cycles.
  auto tree = build_cayley_ball(GroupOracle::free_group(2), 4);
  CHECK(exhaustive_loops(tree, 12).empty());
  auto allowed = inner_vertices(tree, 1);
  for (std::uint64_t i = 0; i < 5; ++i) {
    CHECK(random_cluster_cycle(tree, allowed, 20, i).empty());
  }
}

TEST_CASE("random clusters respect the norm bound and the inner region") {
  auto k       = build_grid_complex(2, 9);
  auto allowed = inner_vertices(k, default_margin(9));
  for (std::uint64_t i = 0; i < 50; ++i) {
    auto c = random_cluster_cycle(k, allowed, 24, i);
    CHECK(c.norm() <= 24);
    CHECK(c.norm() >= 4);
    CHECK(is_cycle(k, c));
    for (auto const& [e, v] : c.coeffs()) {
      CHECK(allowed[k.edges()[e].tail]);
      CHECK(allowed[k.edges()[e].head]);
    }
  }
  CHECK(random_cluster_cycle(k, allowed, 24, 7) == random_cluster_cycle(k, allowed, 24, 7));
}

TEST_CASE("fillings in the surface group") {
  auto oracle = GroupOracle::surface(2);
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto c = random_group_cluster(oracle, 8, i);
    CHECK(c.norm() == 8);
    CHECK(fvol_in_group(oracle, c, 1).volume == 1);
  }
  // Larger clusters: a filling never needs more faces than the cluster.
  for (std::uint64_t i = 0; i < 6; ++i) {
    auto c  = random_group_cluster(oracle, 20, 100 + i);
    auto r1 = fvol_in_group(oracle, c, 1);
    auto r2 = fvol_in_group(oracle, c, 2);
    CHECK(c.norm() <= 20);
    CHECK(r1.volume == r2.volume);
    // Each face contributes at most 8 and adjacent faces cancel at least 2.
    CHECK(static_cast<std::size_t>(6 * r1.volume + 2) <= c.norm());
  }
}

TEST_CASE("growth fit") {
  std::vector<ProfilePoint> pts;
  for (std::size_t l = 8; l <= 40; l += 4) {
    pts.push_back({l, static_cast<std::int64_t>(l * l / 16), 1, true});
  }
  auto g = growth_fit(pts);
  REQUIRE(g.exponent);
  CHECK(*g.exponent == doctest::Approx(2.0).epsilon(0.005));
  CHECK(g.window_min == 8);
  CHECK(g.window_max == 40);

  for (auto& p : pts) p.fill = 5;
  CHECK(code_of([&] { growth_fit(pts); }) == ErrorCode::degenerate_fit);
  CHECK(code_of([&] { growth_fit({{8, 1}, {12, 2}, {16, 3}}); }) == ErrorCode::degenerate_fit);
}

TEST_CASE("compare growth") {
  std::vector<ProfilePoint> lin, quad, big;
  for (std::size_t l = 8; l <= 40; l += 4) {
    auto n = static_cast<std::int64_t>(l);
    lin.push_back({l, n, 1, true});
    quad.push_back({l, n * n / 16, 1, true});
    big.push_back({l, 4 * n * n, 1, true});
  }
  auto same = compare_growth(quad, quad, 8);
  CHECK(same.holds);
  CHECK(same.c == 1);
  auto up = compare_growth(lin, quad, 8);
  CHECK(up.holds);
  CHECK(up.c <= 2);
  auto down = compare_growth(big, lin, 8);
  CHECK(!down.holds);
  CHECK(!down.failures.empty());
  // Oracle: direct search over C with g(m) = m.
  bool any = false;
  for (std::int64_t c = 1; c <= 8; ++c) {
    bool ok = true;
    for (auto const& p : big) {
      auto n = static_cast<std::int64_t>(p.ell);
      ok     = ok && p.fill <= c * (c * n + c) + c * n + c;
    }
    any = any || ok;
  }
  CHECK(!any);
}

TEST_CASE("profile CSV") {
  std::vector<ProfilePoint> pts{{8, 4, 10, true}, {12, 9, 11, false}};
  auto                      text = profile_to_csv(pts);
  CHECK(text == "ell,max_fill,cycles_sampled,certified\n8,4,10,true\n12,9,11,false\n");
  auto back = profile_from_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[1].fill == 9);
  CHECK(!back[1].certified);
  CHECK(code_of([&] { profile_from_csv(""); }) == ErrorCode::schema_mismatch);
  CHECK(code_of([&] { profile_from_csv("ell,max_fill,cycles_sampled,certified\n"); })
        == ErrorCode::schema_mismatch);
  CHECK(code_of([&] { profile_from_csv("ell,fill\n8,4\n"); }) == ErrorCode::schema_mismatch);
  CHECK(code_of([&] { profile_from_csv("ell,max_fill,cycles_sampled,certified\n8,x,1,true\n"); })
        == ErrorCode::schema_mismatch);
}

TEST_CASE("growth runs are independent of the worker count") {
  auto         k = build_grid_complex(2, 9);
  auto         p = build_grid_complex(2, 11);
  GrowthConfig cfg;
  cfg.ells  = {8, 12, 16, 20};
  cfg.count = 10;
  cfg.seed  = 42;
  auto one  = fill_growth(k, p, cfg);
  cfg.workers = 3;
  auto three  = fill_growth(k, p, cfg);
  CHECK(profile_to_csv(one.profile.samples) == profile_to_csv(three.profile.samples));
  CHECK(one.padding_stable);
  std::int64_t prev = 0;
  for (auto const& s : one.profile.samples) {
    CHECK(s.fill >= prev);
    CHECK(s.fill == static_cast<std::int64_t>((s.ell / 4) * ((s.ell + 3) / 4)));
    prev = s.fill;
  }

  auto         oracle = GroupOracle::surface(2);
  GrowthConfig gc;
  gc.ells  = {8, 12, 16};
  gc.count = 6;
  auto g1  = fill_growth_group(oracle, gc);
  gc.workers = 2;
  auto g2    = fill_growth_group(oracle, gc);
  CHECK(profile_to_csv(g1.profile.samples) == profile_to_csv(g2.profile.samples));
}
