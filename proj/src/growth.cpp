#include "hfill/errors.hpp"
#include "hfill/filling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

namespace hfill {

  void parallel_for(std::size_t n, std::size_t workers,
                    std::function<void(std::size_t)> const& body) {
    if (workers <= 1 || n <= 1) {
      for (std::size_t i = 0; i < n; ++i) {
        body(i);
      }
      return;
    }
    std::atomic<std::size_t>        next{0};
    std::vector<std::exception_ptr> errors(n);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < n; i = next++) {
            try {
              body(i);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          }
        });
      }
    }
    // Report the failure of the lowest index, as a serial run would.
    for (auto const& e : errors) {
      if (e) {
        std::rethrow_exception(e);
      }
    }
  }

  namespace {

    ProfilePoint max_over(std::vector<std::size_t> const& norms,
                          std::vector<FillingResult> const& volumes, std::size_t ell,
                          std::optional<std::size_t>* argmax = nullptr) {
      ProfilePoint p;
      p.ell = ell;
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < norms.size(); ++i) {
        if (norms[i] > ell) {
          continue;
        }
        ++p.count;
        if (!best || volumes[i].volume > volumes[*best].volume) {
          best = i;
        }
      }
      if (best) {
        p.fill = volumes[*best].volume;
        for (std::size_t i = 0; i < norms.size(); ++i) {
          if (norms[i] <= ell && volumes[i].volume == p.fill) {
            p.certified = p.certified && volumes[i].certified && volumes[i].padding_stable;
          }
        }
      }
      if (argmax) {
        *argmax = best;
      }
      return p;
    }

  }  // namespace

  ProfilePoint restricted_fill(std::vector<Chain> const& cycles,
                               std::vector<FillingResult> const& volumes, std::size_t ell) {
    if (cycles.size() != volumes.size()) {
      throw Error(ErrorCode::invalid_argument, "one volume per cycle is required");
    }
    std::vector<std::size_t> norms;
    for (auto const& c : cycles) {
      norms.push_back(static_cast<std::size_t>(c.norm()));
    }
    return max_over(norms, volumes, ell);
  }

  GrowthProfile growth_fit(std::vector<ProfilePoint> const& samples) {
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (samples[i].ell <= samples[i - 1].ell) {
        throw Error(ErrorCode::invalid_argument, "sample lengths must increase strictly");
      }
    }
    GrowthProfile out;
    out.samples = samples;
    std::vector<double> xs, ys;
    for (auto const& s : samples) {
      if (s.ell < 8) {
        continue;
      }
      if (s.fill <= 0) {
        throw Error(ErrorCode::degenerate_fit,
                    "zero fill at length " + std::to_string(s.ell) + " inside the fit window");
      }
      xs.push_back(std::log(static_cast<double>(s.ell)));
      ys.push_back(std::log(static_cast<double>(s.fill)));
      out.window_min = out.window_min == 0 ? s.ell : out.window_min;
      out.window_max = s.ell;
    }
    if (xs.size() < 4) {
      throw Error(ErrorCode::degenerate_fit, "at least 4 samples with length >= 8 are required");
    }
    if (std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); })) {
      throw Error(ErrorCode::degenerate_fit, "all fills are equal");
    }
    double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i] / n;
      my += ys[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    double slope     = sxy / sxx;
    double intercept = my - slope * mx;
    double ss        = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r = ys[i] - (intercept + slope * xs[i]);
      ss += r * r;
    }
    out.exponent    = slope;
    out.coefficient = std::exp(intercept);
    out.residual    = std::sqrt(ss / n);
    return out;
  }

  GrowthComparison compare_growth(std::vector<ProfilePoint> const& f,
                                  std::vector<ProfilePoint> const& g, std::size_t c_max) {
    std::optional<GrowthProfile> fit;
    try {
      fit = growth_fit(g);
    } catch (Error const& e) {
      if (e.code() != ErrorCode::degenerate_fit) {
        throw;
      }
    }
    // Step-function reading of g, extended past its last sample.
    auto g_at = [&](double m, bool& extrapolated) -> double {
      if (g.empty() || m < static_cast<double>(g.front().ell)) {
        return 0;
      }
      if (m > static_cast<double>(g.back().ell)) {
        extrapolated = true;
        double last  = static_cast<double>(g.back().fill);
        return fit ? std::max(last, fit->coefficient * std::pow(m, *fit->exponent)) : last;
      }
      double v = 0;
      for (auto const& s : g) {
        if (static_cast<double>(s.ell) <= m) {
          v = static_cast<double>(s.fill);
        }
      }
      return v;
    };

    GrowthComparison best;
    bool             have = false;
    for (std::size_t c = 1; c <= c_max; ++c) {
      GrowthComparison cur;
      cur.c       = c;
      double cd   = static_cast<double>(c);
      for (auto const& s : f) {
        double n   = static_cast<double>(s.ell);
        double rhs = cd * g_at(cd * n + cd, cur.extrapolated) + cd * n + cd;
        if (static_cast<double>(s.fill) > rhs) {
          cur.failures.push_back(s.ell);
        }
      }
      cur.holds = cur.failures.empty();
      if (cur.holds) {
        return cur;
      }
      if (!have || cur.failures.size() < best.failures.size()) {
        best = cur;
        have = true;
      }
    }
    best.holds = false;
    return best;
  }

  std::string profile_to_csv(std::vector<ProfilePoint> const& samples) {
    std::ostringstream os;
    os << "ell,max_fill,cycles_sampled,certified\n";
    for (auto const& s : samples) {
      os << s.ell << ',' << s.fill << ',' << s.count << ',' << (s.certified ? "true" : "false")
         << '\n';
    }
    return os.str();
  }

  std::vector<ProfilePoint> profile_from_csv(std::string const& text) {
    std::istringstream        in(text);
    std::string               line;
    std::vector<ProfilePoint> out;
    auto fail = [](std::string const& why) {
      return Error(ErrorCode::schema_mismatch, "profile CSV: " + why);
    };
    if (!std::getline(in, line) || line != "ell,max_fill,cycles_sampled,certified") {
      throw fail("expected header 'ell,max_fill,cycles_sampled,certified'");
    }
    std::size_t row = 1;
    while (std::getline(in, line)) {
      ++row;
      if (line.empty()) {
        continue;
      }
      std::vector<std::string> fields;
      std::istringstream       ls(line);
      std::string              field;
      while (std::getline(ls, field, ',')) {
        fields.push_back(field);
      }
      if (fields.size() != 4) {
        throw fail("row " + std::to_string(row) + " does not have 4 fields");
      }
      ProfilePoint p;
      try {
        std::size_t used = 0;
        p.ell            = std::stoull(fields[0], &used);
        if (used != fields[0].size()) throw std::invalid_argument("ell");
        long long fill = std::stoll(fields[1], &used);
        if (used != fields[1].size() || fill < 0) throw std::invalid_argument("fill");
        p.fill  = fill;
        p.count = std::stoull(fields[2], &used);
        if (used != fields[2].size()) throw std::invalid_argument("count");
      } catch (std::exception const&) {
        throw fail("row " + std::to_string(row) + " has a malformed number");
      }
      if (fields[3] != "true" && fields[3] != "false") {
        throw fail("row " + std::to_string(row) + " has a malformed certified flag");
      }
      p.certified = fields[3] == "true";
      if (!out.empty() && p.ell <= out.back().ell) {
        throw fail("lengths must increase strictly");
      }
      out.push_back(p);
    }
    if (out.empty()) {
      throw fail("no rows");
    }
    return out;
  }

  namespace {

    GrowthProfile fit_or_plain(std::vector<ProfilePoint> const& samples) {
      try {
        return growth_fit(samples);
      } catch (Error const& e) {
        if (e.code() != ErrorCode::degenerate_fit) {
          throw;
        }
        GrowthProfile p;
        p.samples = samples;
        return p;
      }
    }

  }  // namespace

  GrowthRun fill_growth(CellComplex const& k, CellComplex const& padded,
                        GrowthConfig const& config) {
    if (config.ells.empty()) {
      throw Error(ErrorCode::invalid_argument, "no lengths to sample");
    }
    FillingSolver solver(k), large(padded);
    std::size_t   top     = *std::max_element(config.ells.begin(), config.ells.end());
    int           margin  = default_margin(k.radius());
    auto          allowed = inner_vertices(k, margin);
    int           limit   = k.radius() - margin;

    std::vector<Chain> cycles;
    if (config.rectangles && k.label_kind() == LabelKind::point && k.dim() == 2) {
      for (int a = 1; 2 * static_cast<std::size_t>(a + 1) <= top; ++a) {
        for (int b = 1; 2 * static_cast<std::size_t>(a + b) <= top; ++b) {
          std::vector<int> corner{-a / 2, -b / 2};
          if (corner[0] + a <= limit && corner[1] + b <= limit && -corner[0] <= limit
              && -corner[1] <= limit) {
            cycles.push_back(box_cycle(k, corner, {a, b}));
          }
        }
      }
    }
    if (config.rectangles && k.label_kind() == LabelKind::point && k.dim() == 3) {
      for (int a = 1; a <= limit; ++a) {
        for (int b = 1; b <= limit; ++b) {
          for (int c = 1; c <= limit; ++c) {
            if (static_cast<std::size_t>(2 * (a * b + b * c + a * c)) > top) {
              continue;
            }
            std::vector<int> corner{-a / 2, -b / 2, -c / 2};
            if (corner[0] + a <= limit && corner[1] + b <= limit && corner[2] + c <= limit) {
              cycles.push_back(box_cycle(k, corner, {a, b, c}));
            }
          }
        }
      }
    }
    if (config.exhaustive && k.dim() >= 1) {
      auto loops = exhaustive_loops(k, std::min<std::size_t>(12, top));
      auto inner = [&](Chain const& c) {
        return std::all_of(c.coeffs().begin(), c.coeffs().end(), [&](auto const& t) {
          auto const& e = k.edges()[t.first];
          return allowed[e.tail] && allowed[e.head];
        });
      };
      for (auto& l : loops) {
        if (inner(l)) {
          cycles.push_back(std::move(l));
        }
      }
    }
    for (std::size_t i = 0; i < config.ells.size(); ++i) {
      for (std::size_t j = 0; j < config.count; ++j) {
        cycles.push_back(
            random_cluster_cycle(k, allowed, config.ells[i], sample_seed(config.seed, i, j)));
      }
    }

    std::vector<FillingResult> volumes(cycles.size());
    parallel_for(cycles.size(), config.workers,
                 [&](std::size_t i) { volumes[i] = solver.fvol(cycles[i], config.budget); });

    std::vector<std::size_t> norms;
    for (auto const& c : cycles) {
      norms.push_back(static_cast<std::size_t>(c.norm()));
    }
    GrowthRun                 run;
    std::map<std::size_t, bool> checked;
    std::vector<ProfilePoint> samples;
    for (auto ell : config.ells) {
      std::optional<std::size_t> arg;
      max_over(norms, volumes, ell, &arg);
      if (arg && !checked.count(*arg)) {
        checked[*arg] = padding_check(k, large, cycles[*arg], volumes[*arg], config.budget);
        run.padding_stable = run.padding_stable && checked[*arg];
      }
      samples.push_back(max_over(norms, volumes, ell));
    }
    run.profile    = fit_or_plain(samples);
    run.fvol_calls = cycles.size() + checked.size();
    return run;
  }

  GrowthRun fill_growth_group(GroupOracle const& oracle, GrowthConfig const& config) {
    if (config.ells.empty()) {
      throw Error(ErrorCode::invalid_argument, "no lengths to sample");
    }
    std::vector<GroupCycle> cycles;
    for (std::size_t i = 0; i < config.ells.size(); ++i) {
      for (std::size_t j = 0; j < config.count; ++j) {
        cycles.push_back(
            random_group_cluster(oracle, config.ells[i], sample_seed(config.seed, i, j)));
      }
    }
    // Smallest neighborhood that holds a filling, and its step count.
    auto solve = [&](GroupCycle const& c, int from, int& used) {
      for (int steps = from;; ++steps) {
        try {
          used = steps;
          return fvol_in_group(oracle, c, steps, config.budget);
        } catch (Error const& e) {
          if (e.code() != ErrorCode::no_filling || steps >= from + 2) {
            throw;
          }
        }
      }
    };
    std::vector<FillingResult> volumes(cycles.size());
    std::vector<int>           steps(cycles.size(), 1);
    parallel_for(cycles.size(), config.workers,
                 [&](std::size_t i) { volumes[i] = solve(cycles[i], 1, steps[i]); });

    std::vector<std::size_t> norms;
    for (auto const& c : cycles) {
      norms.push_back(c.norm());
    }
    GrowthRun                   run;
    std::map<std::size_t, bool> checked;
    std::vector<ProfilePoint>   samples;
    for (auto ell : config.ells) {
      std::optional<std::size_t> arg;
      max_over(norms, volumes, ell, &arg);
      if (arg && !checked.count(*arg)) {
        auto again  = cycles[*arg].edges.empty()
                          ? volumes[*arg]
                          : fvol_in_group(oracle, cycles[*arg], steps[*arg] + 1, config.budget);
        bool stable = again.volume == volumes[*arg].volume;
        volumes[*arg].padding_stable = stable;
        checked[*arg]                = stable;
        run.padding_stable           = run.padding_stable && stable;
      }
      samples.push_back(max_over(norms, volumes, ell));
    }
    run.profile    = fit_or_plain(samples);
    run.fvol_calls = cycles.size() + checked.size();
    return run;
  }

}  // namespace hfill
