// hfill: small-cancellation checks, filling volumes, growth profiles and
// embedding experiments from the command line.
//
// Exit status: 0 pass, 1 property failure or runtime error, 2 usage or
// parse error.

#include "hfill/embedding.hpp"
#include "hfill/errors.hpp"
#include "hfill/filling.hpp"
#include "hfill/group.hpp"
#include "hfill/presentation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace hfill;
using nlohmann::json;

namespace {

  struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  std::string read_file(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw UsageError("cannot read " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  void write_text(std::string const& path, std::string const& text) {
    if (path.empty() || path == "-") {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw UsageError("cannot write " + path);
    }
    out << text;
  }

  void emit(json const& j, std::string const& path) {
    write_text(path, j.dump(2) + "\n");
  }

  int exit_code(ErrorCode c) {
    switch (c) {
      case ErrorCode::syntax:
      case ErrorCode::unknown_generator:
      case ErrorCode::empty_relator:
      case ErrorCode::duplicate_relator:
      case ErrorCode::schema_mismatch:
      case ErrorCode::invalid_embedding:
      case ErrorCode::invalid_argument: return 2;
      default: return 1;
    }
  }

  // `key = value` lines; `#` starts a comment.
  std::map<std::string, std::string> read_config(std::string const& path) {
    std::map<std::string, std::string> out;
    std::istringstream                 in(read_file(path));
    std::string                        line;
    int                                n = 0;
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r");
      auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
      ++n;
      if (auto h = line.find('#'); h != std::string::npos) {
        line.erase(h);
      }
      line = trim(line);
      if (line.empty()) {
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw UsageError(path + ":" + std::to_string(n) + ": expected key = value");
      }
      out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
  }

  // Fills options of `sub` that were not given on the command line.
  void apply_config(CLI::App* sub, std::map<std::string, std::string> const& cfg) {
    for (auto const& [key, value] : cfg) {
      auto* opt = sub->get_option_no_throw("--" + key);
      if (!opt) {
        throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
      }
      if (opt->count() == 0) {
        opt->add_result(value);
        opt->run_callback();
      }
    }
  }

  Presentation load_presentation(std::string const& name) {
    if (std::filesystem::exists(name)) {
      return parse_presentation(read_file(name));
    }
    auto number = [&](std::string const& prefix) -> std::optional<std::size_t> {
      if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()
          || name.find_first_not_of("0123456789", prefix.size()) != std::string::npos) {
        return std::nullopt;
      }
      return std::stoul(name.substr(prefix.size()));
    };
    if (auto g = number("surface")) {
      return surface_presentation(*g);
    }
    if (auto k = number("free")) {
      return free_presentation(*k);
    }
    if (auto k = number("z")) {
      return free_abelian_presentation(*k);
    }
    throw UsageError("no presentation file or preset named '" + name + "'");
  }

  Space load_space(std::string const& name) {
    if (std::filesystem::exists(name)) {
      return Space::group(GroupOracle::dehn(parse_presentation(read_file(name))), name);
    }
    return Space::parse(name);
  }

  std::vector<std::size_t> ell_range(std::size_t lo, std::size_t hi, std::size_t step) {
    if (step == 0 || lo > hi) {
      throw UsageError("bad length range");
    }
    std::vector<std::size_t> out;
    for (auto l = lo; l <= hi; l += step) {
      out.push_back(l);
    }
    return out;
  }

  json chain_json(Chain const& c) {
    return json::parse(to_json(c));
  }

  json comparison_json(GrowthComparison const& g) {
    return {{"c", g.c},
            {"holds", g.holds},
            {"failures", g.failures},
            {"extrapolated", g.extrapolated}};
  }

  // ---- subcommands ----------------------------------------------------------

  struct Common {
    std::uint64_t seed    = 1;
    std::size_t   workers = 1;
    std::size_t   max_nodes  = 20000;
    std::size_t   max_pivots = 200000;
    std::string   out;

    FillBudget budget() const {
      FillBudget b;
      b.ilp.max_nodes      = max_nodes;
      b.ilp.lp.max_pivots  = max_pivots;
      return b;
    }
  };

  void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--max-nodes", c.max_nodes, "branch-and-bound node budget");
    sub->add_option("--max-pivots", c.max_pivots, "simplex pivot budget");
    sub->add_option("--out", c.out, "JSON output path (default stdout)");
  }

  int cmd_check_sc(std::string const& source, std::string const& lambda, Common const& c) {
    auto p = load_presentation(source);
    auto l = lambda.empty() ? p.lambda_target() : parse_ratio(lambda);
    auto v = check_small_cancellation(p, l);
    auto pieces = compute_pieces(p);
    json report;
    report["lambda"]            = to_string(l);
    report["relators"]          = p.relators().size();
    report["verdict"]           = v.satisfied ? "SATISFIED" : "VIOLATED";
    report["max_piece"]         = pieces.per_relator;
    json powers                 = json::array();
    for (std::size_t i = 0; i < p.relators().size(); ++i) {
      if (is_proper_power(p.relators()[i])) {
        powers.push_back(i);
      }
    }
    report["proper_powers"] = powers;
    if (!v.satisfied) {
      report["witness"] = {{"relator", v.relator},
                           {"piece", to_string(v.piece.letters(), p.generator_names())},
                           {"piece_length", v.piece_length},
                           {"relator_length", v.relator_length}};
    }
    emit(report, c.out);
    return v.satisfied && powers.empty() ? 0 : 1;
  }

  int cmd_build_ball(std::string const& space, int radius, Common const& c) {
    auto k = load_space(space).ball(radius);
    write_text(c.out, to_json(k) + "\n");
    return 0;
  }

  struct FvolArgs {
    std::string      space = "grid2";
    int              radius = 10;
    std::string      cycle;
    int              dim = 1;
    std::vector<int> box;
    bool             force_ilp = false;
  };

  int cmd_fvol(FvolArgs const& a, Common const& c) {
    auto  sp = load_space(a.space);
    auto  k  = sp.ball(a.radius);
    Chain s;
    if (!a.box.empty()) {
      std::vector<int> corner;
      for (auto side : a.box) {
        corner.push_back(-side / 2);
      }
      s = box_cycle(k, corner, a.box);
    } else if (!a.cycle.empty()) {
      s = chain_from_json(read_file(a.cycle), a.dim);
    } else {
      throw UsageError("fvol needs --box or --cycle");
    }
    auto budget      = c.budget();
    budget.force_ilp = a.force_ilp;
    FillingSolver solver(k);
    auto          r      = solver.fvol(s, budget);
    auto          padded = sp.ball(a.radius + 2);
    padding_check(k, FillingSolver(padded), s, r, budget);
    json report{{"volume", r.volume},
                {"method", to_string(r.method)},
                {"certified", r.certified},
                {"padding_stable", r.padding_stable},
                {"cycle_norm", s.norm()},
                {"filling", chain_json(r.filling)}};
    emit(report, c.out);
    return 0;
  }

  struct GrowthArgs {
    std::string space = "grid2";
    int         radius = 30;
    std::size_t ell_min = 8, ell_max = 40, ell_step = 4;
    std::size_t count   = 40;
    std::string sampler = "random";
    std::string csv;
  };

  int cmd_fill_growth(GrowthArgs const& a, Common const& c) {
    auto         sp = load_space(a.space);
    GrowthConfig cfg;
    cfg.ells       = ell_range(a.ell_min, a.ell_max, a.ell_step);
    cfg.count      = a.count;
    cfg.seed       = c.seed;
    cfg.workers    = c.workers;
    cfg.exhaustive = a.sampler == "exhaustive";
    cfg.budget     = c.budget();
    if (a.sampler != "random" && a.sampler != "exhaustive") {
      throw UsageError("sampler must be random or exhaustive");
    }
    json      report;
    GrowthRun run;
    try {
      if (sp.is_grid()) {
        auto k      = sp.ball(a.radius);
        auto padded = sp.ball(a.radius + 2);
        run         = fill_growth(k, padded, cfg);
      } else {
        run = fill_growth_group(sp.oracle(), cfg);
      }
    } catch (Error const& e) {
      report["error"]   = e.what();
      report["partial"] = true;
      emit(report, c.out);
      return exit_code(e.code());
    }
    auto const& prof = run.profile;
    if (!a.csv.empty()) {
      write_text(a.csv, profile_to_csv(prof.samples));
    }
    bool all_zero = std::all_of(prof.samples.begin(), prof.samples.end(),
                                [](ProfilePoint const& p) { return p.fill == 0; });
    bool certified = std::all_of(prof.samples.begin(), prof.samples.end(),
                                 [](ProfilePoint const& p) { return p.certified; });
    report["space"]          = sp.name();
    report["padding_stable"] = run.padding_stable;
    report["certified"]      = certified;
    report["fvol_calls"]     = run.fvol_calls;
    json samples             = json::array();
    for (auto const& p : prof.samples) {
      samples.push_back({{"ell", p.ell}, {"max_fill", p.fill}, {"cycles_sampled", p.count},
                         {"certified", p.certified}});
    }
    report["samples"] = samples;
    if (prof.exponent) {
      report["fit"] = {{"exponent", *prof.exponent},
                       {"coefficient", prof.coefficient},
                       {"residual", prof.residual},
                       {"window", {prof.window_min, prof.window_max}}};
    } else {
      report["fit"] = {{"error", "DEGENERATE_FIT"},
                       {"class", all_zero ? "linear-trivial" : "undetermined"}};
    }
    emit(report, c.out);
    return 0;
  }

  struct EmbedArgs {
    std::string  spec = "logmap";
    std::string  source, target;
    int          source_radius = 12;
    int          target_radius = 20;
    std::int64_t c             = 0;
    std::size_t  samples       = 200000;
    std::size_t  perimeter     = 20;
    std::size_t  clusters      = 0;
    std::string  moduli_csv;
  };

  int cmd_embed(EmbedArgs const& a, Common const& c) {
    EmbeddingSpec spec;
    if (a.spec == "logmap" || a.spec == "axis" || a.spec == "plane") {
      spec = builtin_embedding(a.spec);
    } else {
      if (a.source.empty() || a.target.empty()) {
        throw UsageError("a FILE spec needs --source and --target");
      }
      spec = load_embedding(read_file(a.spec), load_space(a.source), load_space(a.target));
    }
    auto moduli = estimate_moduli(spec, a.source_radius, a.samples, c.seed, c.workers);
    if (!a.moduli_csv.empty()) {
      write_text(a.moduli_csv, moduli_to_csv(moduli));
    }
    std::int64_t cc = a.c > 0 ? a.c : std::max<std::int64_t>(moduli.lipschitz_c, 1);

    auto x = spec.source.ball(a.source_radius);
    auto z = spec.target.ball(a.target_radius);
    auto e = build_extended_complex(x, z, spec, cc, c.budget());
    auto cb     = collision_bound(e, &moduli);
    auto qi     = qi_verify(e, cb.l, a.samples, c.seed, c.workers);
    auto checks = check_extension(e, 100, 2000, c.seed, c.workers);

    std::vector<Chain> cycles{Chain(1)};
    if (x.dim() >= 2) {
      auto inner = inner_vertices(x, default_margin(x.radius()));
      int  limit = x.radius();
      if (x.label_kind() == LabelKind::point && x.dim() == 2) {
        for (int p = 1; 2 * static_cast<std::size_t>(p + 1) <= a.perimeter; ++p) {
          for (int q = 1; 2 * static_cast<std::size_t>(p + q) <= a.perimeter; ++q) {
            std::vector<int> corner{-p / 2, -q / 2};
            if (corner[0] + p <= limit && corner[1] + q <= limit) {
              cycles.push_back(box_cycle(x, corner, {p, q}));
            }
          }
        }
      }
      for (std::size_t i = 0; i < a.clusters; ++i) {
        cycles.push_back(random_cluster_cycle(x, inner, a.perimeter, sample_seed(c.seed, 23, i)));
      }
    }
    auto cf = compare_fillings(e, cycles, c.budget(), c.workers);

    json report;
    report["kind"] = to_string(spec.kind);
    report["moduli"] = {{"lipschitz_c", moduli.lipschitz_c},
                        {"pairs", moduli.pairs},
                        {"exhaustive", moduli.exhaustive},
                        {"not_coarse", moduli.not_coarse}};
    report["extended"] = {{"c", e.c},
                          {"added_edges", e.added_edges.size()},
                          {"added_faces", e.added_faces.size()},
                          {"n", e.n},
                          {"m_vertices", e.m.vertices().size()},
                          {"m_edges", e.m.edges().size()},
                          {"m_faces", e.m.faces2().size()}};
    json collision{{"measured", cb.measured}, {"l", cb.l}};
    if (cb.theoretical) {
      collision["theoretical"] = *cb.theoretical;
    }
    report["collision"] = collision;
    json qij{{"l", qi.l},
             {"lower_ok", qi.lower_ok},
             {"upper_ok", qi.upper_ok},
             {"pairs", qi.pairs},
             {"exhaustive", qi.exhaustive}};
    if (qi.worst) {
      qij["worst"] = {{"x1", label_to_string(x, x.vertices()[qi.worst->x1])},
                      {"x2", label_to_string(x, x.vertices()[qi.worst->x2])},
                      {"dx", qi.worst->dx},
                      {"dm", qi.worst->dm},
                      {"lhs", qi.worst->lhs},
                      {"rhs", qi.worst->rhs}};
    }
    report["qi"]     = qij;
    report["checks"] = {{"injective_1skeleton", checks.injective_1skeleton},
                        {"added_edges_short", checks.added_edges_short},
                        {"added_faces_ok", checks.added_faces_ok},
                        {"n_matches", checks.n_matches},
                        {"chain_map", checks.chain_map},
                        {"metric_dominance", checks.metric_dominance}};
    json rows = json::array();
    for (auto const& r : cf.rows) {
      rows.push_back({{"norm", r.cycle.norm()},
                      {"fvol_x", r.fvol_x},
                      {"fvol_y", r.fvol_y},
                      {"fvol_m", r.fvol_m},
                      {"pushforward_ok", r.pushforward_ok},
                      {"certified", r.certified}});
    }
    json fill{{"rows", rows},
              {"kernel_rank_y", cf.kernel_rank_y},
              {"pushforward_ok", cf.pushforward_ok},
              {"m_equals_y", cf.unique_equal},
              {"vacuous", cf.vacuous}};
    if (cf.m_vs_y) {
      fill["m_vs_y"] = comparison_json(*cf.m_vs_y);
    }
    if (cf.m_vs_x) {
      fill["m_vs_x"] = comparison_json(*cf.m_vs_x);
    }
    report["fillings"] = fill;
    bool ok = qi.lower_ok && qi.upper_ok && checks.all() && cf.pushforward_ok
              && (cf.kernel_rank_y != 0 || cf.unique_equal);
    report["pass"] = ok;
    emit(report, c.out);
    return ok ? 0 : 1;
  }

  int cmd_compare(std::string const& fa, std::string const& fb, std::size_t cmax,
                  Common const& c) {
    auto a   = profile_from_csv(read_file(fa));
    auto b   = profile_from_csv(read_file(fb));
    auto ab  = compare_growth(a, b, cmax);
    auto ba  = compare_growth(b, a, cmax);
    auto rel = ab.holds && ba.holds ? "∼" : ab.holds ? "≺" : ba.holds ? "≻" : "incomparable-at-scale";
    json report{{"a", fa},
                {"b", fb},
                {"cmax", cmax},
                {"a_vs_b", comparison_json(ab)},
                {"b_vs_a", comparison_json(ba)},
                {"relation", rel}};
    emit(report, c.out);
    return 0;
  }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homological filling experiments"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value file; flags override it");

  Common common;

  std::string sc_source, sc_lambda;
  auto*       sc = app.add_subcommand("check-sc", "small-cancellation verdict");
  sc->add_option("presentation", sc_source, "file or preset (surfaceG, zK, freeK)")->required();
  sc->add_option("--lambda", sc_lambda, "threshold, e.g. 1/6");
  add_common(sc, common);

  std::string bb_space = "grid2";
  int         bb_radius = 3;
  auto*       bb = app.add_subcommand("build-ball", "ball complex as JSON");
  bb->add_option("--space", bb_space, "gridK, freeK, zK, surfaceG or presentation file");
  bb->add_option("--radius", bb_radius)->check(CLI::NonNegativeNumber);
  add_common(bb, common);

  FvolArgs fa;
  auto*    fv = app.add_subcommand("fvol", "filling volume of one cycle");
  fv->add_option("--space", fa.space);
  fv->add_option("--radius", fa.radius)->check(CLI::NonNegativeNumber);
  fv->add_option("--cycle", fa.cycle, "JSON chain file");
  fv->add_option("--dim", fa.dim, "dimension of the chain in --cycle");
  fv->add_option("--box", fa.box, "side lengths of a centred box")->delimiter(',');
  fv->add_flag("--force-ilp", fa.force_ilp);
  add_common(fv, common);

  GrowthArgs ga;
  auto*      fg = app.add_subcommand("fill-growth", "sampled filling profile and exponent fit");
  fg->add_option("--space", ga.space);
  fg->add_option("--radius", ga.radius, "ball radius (grids)");
  fg->add_option("--ell-min", ga.ell_min);
  fg->add_option("--ell-max", ga.ell_max);
  fg->add_option("--ell-step", ga.ell_step);
  fg->add_option("--count", ga.count, "random cycles per length");
  fg->add_option("--sampler", ga.sampler, "random or exhaustive");
  fg->add_option("--csv", ga.csv, "profile CSV path");
  add_common(fg, common);

  EmbedArgs ea;
  auto*     em = app.add_subcommand("embed", "extended complex, QI check and filling comparison");
  em->add_option("--spec", ea.spec, "logmap, axis, plane or an embedding file");
  em->add_option("--source", ea.source, "source space for file specs");
  em->add_option("--target", ea.target, "target space for file specs");
  em->add_option("--source-radius", ea.source_radius);
  em->add_option("--target-radius", ea.target_radius);
  em->add_option("--c", ea.c, "edge threshold (default: measured Lipschitz constant)");
  em->add_option("--samples", ea.samples, "pair samples");
  em->add_option("--perimeter", ea.perimeter, "largest rectangle perimeter / cluster norm");
  em->add_option("--clusters", ea.clusters, "random cluster cycles");
  em->add_option("--moduli-csv", ea.moduli_csv, "distance envelope CSV path");
  add_common(em, common);

  std::string cmp_a, cmp_b;
  std::size_t cmax = 8;
  auto*       cm   = app.add_subcommand("compare", "growth preorder between two profiles");
  cm->add_option("a", cmp_a)->required();
  cm->add_option("b", cmp_b)->required();
  cm->add_option("--cmax", cmax);
  add_common(cm, common);

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    auto* sub = app.get_subcommands().front();
    if (!config_path.empty()) {
      apply_config(sub, read_config(config_path));
    }
    if (sub == sc) {
      return cmd_check_sc(sc_source, sc_lambda, common);
    }
    if (sub == bb) {
      return cmd_build_ball(bb_space, bb_radius, common);
    }
    if (sub == fv) {
      return cmd_fvol(fa, common);
    }
    if (sub == fg) {
      return cmd_fill_growth(ga, common);
    }
    if (sub == em) {
      return cmd_embed(ea, common);
    }
    return cmd_compare(cmp_a, cmp_b, cmax, common);
  } catch (UsageError const& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (CLI::ParseError const& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (Error const& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e.code());
  }
}
