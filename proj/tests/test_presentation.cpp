#include <random>
#include <set>

#include "doctest.h"
#include "hfill/errors.hpp"
#include "hfill/presentation.hpp"

using namespace hfill;

namespace {

  Letters L(std::initializer_list<int> xs) {
    return Letters(xs.begin(), xs.end());
  }

  // Independent piece oracle: a word p is a piece when it occurs as a
  // cyclic subword starting at two positions whose cyclic permutations
  // differ as words. Positions range over every relator and inverse.
  std::size_t oracle_longest_piece(Presentation const& p, std::size_t index) {
    struct Site {
      Letters word;  // the cyclic permutation starting here
    };
    std::vector<Site> sites;
    for (auto const& r : p.relators()) {
      for (auto const& w :
           {r.canonical().letters(), inverse_letters(r.canonical().letters())}) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          Letters s;
          for (std::size_t k = 0; k < w.size(); ++k) {
            s.push_back(w[(i + k) % w.size()]);
          }
          sites.push_back({s});
        }
      }
    }
    auto const& r  = p.relators()[index].canonical().letters();
    auto        ri = inverse_letters(r);
    std::size_t best = 0;
    for (std::size_t len = 1; len <= r.size(); ++len) {
      for (auto const& w : {r, ri}) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          Letters sub, own;
          for (std::size_t k = 0; k < len; ++k) {
            sub.push_back(w[(i + k) % w.size()]);
          }
          for (std::size_t k = 0; k < w.size(); ++k) {
            own.push_back(w[(i + k) % w.size()]);
          }
          for (auto const& s : sites) {
            if (s.word != own && s.word.size() >= len
                && std::equal(sub.begin(), sub.end(), s.word.begin())) {
              best = std::max(best, len);
            }
          }
        }
      }
    }
    return best;
  }

  // Brute-force check that w contains a subword equal to more than half of
  // some cyclic permutation of a relator or its inverse.
  bool has_long_relator_subword(Word const& w, Presentation const& p) {
    auto const& l = w.letters();
    for (auto const& r : p.relators()) {
      for (auto const& base :
           {r.canonical().letters(), inverse_letters(r.canonical().letters())}) {
        auto n = base.size();
        for (std::size_t rot = 0; rot < n; ++rot) {
          for (std::size_t len = n / 2 + 1; len <= n; ++len) {
            for (std::size_t i = 0; i + len <= l.size(); ++i) {
              bool ok = true;
              for (std::size_t k = 0; k < len && ok; ++k) {
                ok = l[i + k] == base[(rot + k) % n];
              }
              if (ok) {
                return true;
              }
            }
          }
        }
      }
    }
    return false;
  }

  Word random_trivial_word(Presentation const& p, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nconj(1, 5), clen(0, 6),
        gen(0, static_cast<int>(2 * p.rank()) - 1),
        rel(0, static_cast<int>(p.relators().size()) - 1), coin(0, 1);
    Word w;
    int  k = nconj(rng);
    for (int i = 0; i < k; ++i) {
      Letters g;
      int     n = clen(rng);
      for (int j = 0; j < n; ++j) {
        int x = gen(rng);
        g.push_back(make_letter(static_cast<std::size_t>(x / 2), x % 2 == 1));
      }
      auto gw = Word::reduce(g);
      auto r  = p.relators()[static_cast<std::size_t>(rel(rng))].canonical();
      if (coin(rng)) {
        r = r.inverse();
      }
      w = w * gw * r * gw.inverse();
    }
    return w;
  }

}  // namespace

TEST_CASE("free_reduce") {
  CHECK(free_reduce(L({1, -1})).empty());
  CHECK(free_reduce(L({1, 2, -2, 1})).letters() == L({1, 1}));
  CHECK(free_reduce(L({1, 2, -1})).letters() == L({1, 2, -1}));
  CHECK(free_reduce(L({1, 2, -2, -1, 3})).letters() == L({3}));
}

TEST_CASE("parse_presentation examples") {
  auto z2 = parse_presentation("gens: a b\nrel: [a,b]");
  CHECK(z2.rank() == 2);
  REQUIRE(z2.relators().size() == 1);
  CHECK(z2.relators()[0].size() == 4);

  auto s2 = parse_presentation("gens: a b c d\nrel: [a,b][c,d]");
  CHECK(s2.relators()[0].size() == 8);
  CHECK(s2 == surface_presentation(2));

  auto sq = parse_presentation("gens: a\nrel: a a");
  CHECK(sq.relators()[0].size() == 2);
  CHECK(is_proper_power(sq.relators()[0]));

  auto mixed = parse_presentation(
      "# comment\ngens: x y\nrel: (x y)^3 X # trailing\nrel: x^-2 y^2\n"
      "lambda: 1/4\n");
  CHECK(mixed.relators().size() == 2);
  CHECK(mixed.lambda_target() == Ratio{1, 4});
  // (xy)^3 X cyclically reduces to y x y x y.
  CHECK(mixed.relators()[0].size() == 5);
}

TEST_CASE("parse_presentation errors carry positions") {
  auto expect_code = [](std::string const& text, ErrorCode code, int line) {
    try {
      parse_presentation(text);
      FAIL("expected a parse error for: " << text);
    } catch (ParseError const& e) {
      CHECK(e.code() == code);
      CHECK(e.line() == line);
    }
  };
  expect_code("gens: a b\nrel: a c", ErrorCode::unknown_generator, 2);
  expect_code("gens: a b\nrel: a A", ErrorCode::empty_relator, 2);
  expect_code("gens: a b\nrel: [a,b]\nrel: b a B A", ErrorCode::duplicate_relator, 3);
  expect_code("gens: a b\nrel: [a,b", ErrorCode::syntax, 2);
  expect_code("rel: a", ErrorCode::syntax, 1);
  expect_code("gens: a\nfoo: a", ErrorCode::syntax, 2);

  try {
    parse_presentation("gens: a b\nrel: a b % a");
    FAIL("expected error");
  } catch (ParseError const& e) {
    CHECK(e.column() == 10);
  }
}

TEST_CASE("round trip parse -> serialize -> parse") {
  std::vector<std::string> texts
      = {"gens: a b\nrel: [a,b]",
         "gens: a b c d\nrel: [a,b][c,d]",
         "gens: x y z\nrel: x y z X Y Z x x\nrel: (x z)^2 y^3\nlambda: 1/5",
         "gens: a\n"};
  for (auto const& t : texts) {
    auto p = parse_presentation(t);
    auto q = parse_presentation(serialize(p));
    CHECK(p.generator_names() == q.generator_names());
    CHECK(p.lambda_target() == q.lambda_target());
    REQUIRE(p.relators().size() == q.relators().size());
    for (std::size_t i = 0; i < p.relators().size(); ++i) {
      CHECK(p.relators()[i].canonical() == q.relators()[i].canonical());
    }
  }
}

TEST_CASE("compute_pieces matches the brute-force oracle") {
  auto z2 = parse_presentation("gens: a b\nrel: [a,b]");
  auto pz = compute_pieces(z2);
  CHECK(pz.per_relator[0] == 1);
  CHECK(oracle_longest_piece(z2, 0) == 1);
  CHECK(pz.witnesses[0].size() == 1);

  auto s2 = surface_presentation(2);
  CHECK(compute_pieces(s2).per_relator[0] == 1);
  CHECK(oracle_longest_piece(s2, 0) == 1);

  auto self = parse_presentation("gens: a b\nrel: a b a b b");
  CHECK(compute_pieces(self).per_relator[0] == oracle_longest_piece(self, 0));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> len(3, 9), g(0, 5);
    std::vector<Letters>               rels;
    for (int k = 0; k < 2; ++k) {
      Letters w;
      int     n = len(rng);
      for (int i = 0; i < n; ++i) {
        int x = g(rng);
        w.push_back(make_letter(static_cast<std::size_t>(x / 2), x % 2));
      }
      rels.push_back(w);
    }
    Presentation p;
    try {
      p = Presentation({"a", "b", "c"}, rels);
    } catch (Error const&) {
      continue;
    }
    auto rep = compute_pieces(p);
    for (std::size_t i = 0; i < p.relators().size(); ++i) {
      CHECK(rep.per_relator[i] == oracle_longest_piece(p, i));
    }
    // Symmetry: replacing R by R^-1 leaves pieces unchanged.
    std::vector<Letters> inv;
    for (auto const& r : p.relators()) {
      inv.push_back(inverse_letters(r.canonical().letters()));
    }
    auto rep_inv = compute_pieces(Presentation({"a", "b", "c"}, inv));
    CHECK(rep.per_relator == rep_inv.per_relator);
  }
}

TEST_CASE("check_small_cancellation verdicts") {
  auto s = check_small_cancellation(surface_presentation(2), {1, 6});
  CHECK(s.satisfied);

  auto z = check_small_cancellation(parse_presentation("gens: a b\nrel: [a,b]"),
                                    {1, 6});
  CHECK_FALSE(z.satisfied);
  CHECK(z.piece_length == 1);
  CHECK(z.relator_length == 4);

  CHECK(check_small_cancellation(parse_presentation("gens: a"), {1, 6}).satisfied);

  // Ties are violations: piece 2 against |r| = 12 at lambda = 1/6.
  auto tie = parse_presentation("gens: a b c\nrel: a a b c c b a c b b c c");
  auto pieces = compute_pieces(tie).per_relator[0];
  CHECK(check_small_cancellation(tie, {1, 6}).satisfied
        == (6 * pieces < tie.relators()[0].size()));
}

TEST_CASE("small cancellation is monotone in lambda") {
  std::vector<Presentation> ps = {surface_presentation(2),
                                  surface_presentation(3),
                                  parse_presentation("gens: a b\nrel: [a,b]"),
                                  parse_presentation("gens: a b\nrel: a b a b b")};
  for (auto const& p : ps) {
    bool seen = false;
    for (std::int64_t num = 1; num <= 12; ++num) {
      bool sat = check_small_cancellation(p, {num, 12}).satisfied;
      if (seen) {
        CHECK(sat);
      }
      seen = seen || sat;
    }
  }
}

TEST_CASE("sub-presentations inherit C'(1/6)") {
  std::mt19937_64                    rng(11);
  std::vector<std::string> const     names = {"a", "b", "c", "d"};
  std::uniform_int_distribution<int> g(0, 7);
  int                                found = 0;
  for (int trial = 0; trial < 4000 && found < 5; ++trial) {
    std::vector<Letters> rels;
    for (int k = 0; k < 2; ++k) {
      Letters w;
      while (w.size() < 24) {
        int  x = g(rng);
        auto l = make_letter(static_cast<std::size_t>(x / 2), x % 2);
        if (w.empty() || w.back() != -l) {
          w.push_back(l);
        }
      }
      rels.push_back(w);
    }
    Presentation p;
    try {
      p = Presentation(names, rels);
    } catch (Error const&) {
      continue;
    }
    if (!check_small_cancellation(p, {1, 6}).satisfied) {
      continue;
    }
    ++found;
    for (std::size_t k = 0; k < 2; ++k) {
      Presentation sub(names, {p.relators()[k].canonical().letters()});
      CHECK(check_small_cancellation(sub, {1, 6}).satisfied);
      CHECK(compute_pieces(sub).per_relator[0]
            <= compute_pieces(p).per_relator[k]);
    }
  }
  CHECK(found > 0);
}

TEST_CASE("is_proper_power") {
  CHECK(is_proper_power(L({1, 1})));
  CHECK_FALSE(is_proper_power(L({1, 2, -1, -2})));
  CHECK(is_proper_power(L({1, 2, 1, 2, 1, 2})));
  CHECK_FALSE(is_proper_power(L({1, 2, 1, 2, 2})));
  CHECK_FALSE(is_proper_power(L({1})));
}

TEST_CASE("greendlinger_step and dehn_reduce") {
  auto s2 = surface_presentation(2);
  auto r  = s2.relators()[0].canonical();
  auto st = greendlinger_step(r, s2);
  REQUIRE(st.has_value());
  CHECK(st->size() < r.size());
  CHECK(dehn_reduce(r, s2).empty());

  auto a = Word::from_reduced({1});
  CHECK_FALSE(greendlinger_step(a, s2).has_value());
  CHECK(dehn_reduce(a, s2) == a);
  CHECK(dehn_reduce(Word(), s2).empty());

  auto g    = Word::reduce(L({2, 3, -1}));
  auto conj = g * r * g.inverse();
  CHECK(dehn_reduce(conj, s2).empty());

  // Not C'(1/6): refused.
  auto z2 = parse_presentation("gens: a b\nrel: [a,b]");
  try {
    dehn_reduce(a, z2);
    FAIL("expected precondition error");
  } catch (Error const& e) {
    CHECK(e.code() == ErrorCode::precondition_violated);
  }
}

TEST_CASE("Dehn reduction empties seeded random trivial words") {
  auto            s2 = surface_presentation(2);
  DehnReducer     dehn(s2);
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    auto w     = random_trivial_word(s2, rng);
    auto trace = dehn.trace(w);
    CHECK(trace.back().empty());
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
      CHECK(trace[k + 1].size() < trace[k].size());
      if (!trace[k].empty()) {
        CHECK(has_long_relator_subword(trace[k], s2));
      }
    }
  }
}

TEST_CASE("Dehn reduction never lengthens and keeps nontrivial words nonempty") {
  auto            s2 = surface_presentation(2);
  DehnReducer     dehn(s2);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> g(0, 7);
  for (int i = 0; i < 200; ++i) {
    Letters l;
    for (int k = 0; k < 12; ++k) {
      int x = g(rng);
      l.push_back(make_letter(static_cast<std::size_t>(x / 2), x % 2));
    }
    auto w = Word::reduce(l);
    auto d = dehn.reduce(w);
    CHECK(d.size() <= w.size());
    // Freely reduced words of length < 5 can never be trivial here.
    if (w.size() > 0 && w.size() < 5) {
      CHECK_FALSE(d.empty());
    }
  }
}
