#include "hfill/presentation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "hfill/errors.hpp"

namespace hfill {

  namespace {

    bool valid_identifier(std::string const& s) {
      if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0]))
                         || s[0] == '_')) {
        return false;
      }
      return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
      });
    }

    std::string upper(std::string s) {
      for (auto& c : s) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      return s;
    }

    std::size_t common_prefix(std::span<Letter const> a,
                              std::span<Letter const> b) {
      std::size_t n = std::min(a.size(), b.size()), i = 0;
      while (i < n && a[i] == b[i]) {
        ++i;
      }
      return i;
    }

    // Distinct cyclic permutations of r and r^-1, in a fixed order.
    std::vector<Letters> symmetrize(CyclicWord const& r) {
      std::vector<Letters> out;
      auto add = [&out](Letters w) {
        if (std::find(out.begin(), out.end(), w) == out.end()) {
          out.push_back(std::move(w));
        }
      };
      for (auto& w : rotations(r.canonical().letters())) {
        add(std::move(w));
      }
      for (auto& w : rotations(inverse_letters(r.canonical().letters()))) {
        add(std::move(w));
      }
      return out;
    }

    // Recursive-descent parser for a single relator expression.
    class RelatorParser {
     public:
      RelatorParser(std::string_view                       text,
                    int                                    line,
                    int                                    column_offset,
                    std::vector<std::pair<std::string, Letter>> const& tokens)
          : _text(text), _line(line), _offset(column_offset), _tokens(tokens) {}

      Letters parse() {
        auto out = expression();
        skip_space();
        if (_pos != _text.size()) {
          fail(ErrorCode::syntax,
               std::string("unexpected character '") + _text[_pos] + "'");
        }
        return out;
      }

     private:
      [[noreturn]] void fail(ErrorCode code, std::string const& msg) const {
        throw ParseError(code, msg, _line, _offset + static_cast<int>(_pos) + 1);
      }

      void skip_space() {
        while (_pos < _text.size()
               && std::isspace(static_cast<unsigned char>(_text[_pos]))) {
          ++_pos;
        }
      }

      bool at_end_of_expression() {
        skip_space();
        return _pos == _text.size() || _text[_pos] == ',' || _text[_pos] == ']'
               || _text[_pos] == ')';
      }

      Letters expression() {
        Letters out;
        while (!at_end_of_expression()) {
          auto f = factor();
          out.insert(out.end(), f.begin(), f.end());
        }
        return out;
      }

      Letters factor() {
        Letters base = atom();
        skip_space();
        if (_pos < _text.size() && _text[_pos] == '^') {
          ++_pos;
          skip_space();
          std::size_t start = _pos;
          if (_pos < _text.size() && (_text[_pos] == '-' || _text[_pos] == '+')) {
            ++_pos;
          }
          while (_pos < _text.size()
                 && std::isdigit(static_cast<unsigned char>(_text[_pos]))) {
            ++_pos;
          }
          int  k   = 0;
          auto num = _text.substr(start, _pos - start);
          if (!num.empty() && num[0] == '+') {
            num.remove_prefix(1);
          }
          auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
          if (ec != std::errc() || ptr != num.data() + num.size()) {
            _pos = start;
            fail(ErrorCode::syntax, "expected integer exponent");
          }
          Letters unit = k < 0 ? inverse_letters(base) : base;
          Letters out;
          for (int i = 0; i < std::abs(k); ++i) {
            out.insert(out.end(), unit.begin(), unit.end());
          }
          return out;
        }
        return base;
      }

      void expect(char c) {
        skip_space();
        if (_pos >= _text.size() || _text[_pos] != c) {
          fail(ErrorCode::syntax, std::string("expected '") + c + "'");
        }
        ++_pos;
      }

      Letters atom() {
        skip_space();
        char c = _text[_pos];
        if (c == '[') {
          ++_pos;
          auto x = expression();
          expect(',');
          auto y = expression();
          expect(']');
          Letters out = x;
          out.insert(out.end(), y.begin(), y.end());
          auto xi = inverse_letters(x), yi = inverse_letters(y);
          out.insert(out.end(), xi.begin(), xi.end());
          out.insert(out.end(), yi.begin(), yi.end());
          return out;
        }
        if (c == '(') {
          ++_pos;
          auto x = expression();
          expect(')');
          return x;
        }
        // Longest generator token at this position.
        std::size_t best = 0;
        Letter      l    = 0;
        for (auto const& [tok, letter] : _tokens) {
          if (tok.size() > best && _text.substr(_pos, tok.size()) == tok) {
            best = tok.size();
            l    = letter;
          }
        }
        if (best == 0) {
          if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            fail(ErrorCode::unknown_generator,
                 std::string("unknown generator at '") + c + "'");
          }
          fail(ErrorCode::syntax, std::string("unexpected character '") + c + "'");
        }
        _pos += best;
        return {l};
      }

      std::string_view _text;
      std::size_t      _pos = 0;
      int              _line;
      int              _offset;
      std::vector<std::pair<std::string, Letter>> const& _tokens;
    };

  }  // namespace

  Ratio parse_ratio(std::string_view text) {
    Ratio r{1, 1};
    auto  slash = text.find('/');
    auto  parse = [&](std::string_view s, std::int64_t& out) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
      }
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
      }
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::invalid_argument,
                    "malformed rational '" + std::string(text) + "'");
      }
    };
    parse(text.substr(0, slash), r.num);
    if (slash != std::string_view::npos) {
      parse(text.substr(slash + 1), r.den);
    }
    if (r.num <= 0 || r.den <= 0 || r.num > r.den) {
      throw Error(ErrorCode::invalid_argument,
                  "lambda must satisfy 0 < lambda <= 1");
    }
    auto g = std::gcd(r.num, r.den);
    return {r.num / g, r.den / g};
  }

  std::string to_string(Ratio r) {
    return std::to_string(r.num) + "/" + std::to_string(r.den);
  }

  Presentation::Presentation(std::vector<std::string> generator_names,
                             std::vector<Letters>     relators,
                             Ratio                    lambda_target)
      : _generator_names(std::move(generator_names)), _lambda(lambda_target) {
    std::set<std::string> seen;
    for (auto const& n : _generator_names) {
      if (!valid_identifier(n)) {
        throw Error(ErrorCode::invalid_argument,
                    "invalid generator name '" + n + "'");
      }
      if (!seen.insert(n).second) {
        throw Error(ErrorCode::invalid_argument,
                    "duplicate generator name '" + n + "'");
      }
    }
    for (std::size_t i = 0; i < relators.size(); ++i) {
      for (Letter l : relators[i]) {
        if (l == 0 || generator_of(l) >= rank()) {
          throw Error(ErrorCode::unknown_generator,
                      "relator " + std::to_string(i) + " uses letter "
                          + std::to_string(l));
        }
      }
      auto reduced = cyclically_reduce(free_reduce(relators[i]));
      if (reduced.empty()) {
        throw Error(ErrorCode::empty_relator,
                    "relator " + std::to_string(i) + " reduces to the empty word");
      }
      CyclicWord r(relators[i]);
      auto       rinv = r.inverse();
      for (auto const& other : _relators) {
        if (other == r || other == rinv) {
          throw Error(ErrorCode::duplicate_relator,
                      "relator " + std::to_string(i)
                          + " repeats an earlier relator up to cyclic "
                            "permutation and inversion");
        }
      }
      _relators.push_back(std::move(r));
    }
  }

  std::size_t Presentation::max_relator_length() const noexcept {
    std::size_t m = 0;
    for (auto const& r : _relators) {
      m = std::max(m, r.size());
    }
    return m;
  }

  Presentation parse_presentation(std::string_view text) {
    std::vector<std::string> names;
    std::vector<Letters>     relators;
    std::vector<std::pair<int, int>> relator_pos;
    Ratio                    lambda;
    bool                     have_gens = false;
    std::vector<std::pair<std::string, Letter>> tokens;

    int         line_no = 0;
    std::size_t start   = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) {
        end = text.size();
      }
      std::string_view line = text.substr(start, end - start);
      start                 = end + 1;
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
      }
      std::size_t first = 0;
      while (first < line.size()
             && std::isspace(static_cast<unsigned char>(line[first]))) {
        ++first;
      }
      if (first == line.size()) {
        if (end == text.size()) {
          break;
        }
        continue;
      }
      auto colon = line.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(ErrorCode::syntax,
                         "expected 'gens:', 'rel:' or 'lambda:'",
                         line_no,
                         static_cast<int>(first) + 1);
      }
      std::string key(line.substr(first, colon - first));
      while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) {
        key.pop_back();
      }
      auto body = line.substr(colon + 1);
      int  body_col = static_cast<int>(colon) + 1;
      if (key == "gens") {
        if (have_gens) {
          throw ParseError(ErrorCode::syntax, "second 'gens:' line", line_no, 1);
        }
        have_gens = true;
        std::istringstream in{std::string(body)};
        std::string        name;
        while (in >> name) {
          if (!valid_identifier(name)) {
            auto col = static_cast<int>(body.find(name)) + body_col + 1;
            throw ParseError(ErrorCode::syntax,
                             "invalid generator name '" + name + "'",
                             line_no,
                             col);
          }
          if (std::find(names.begin(), names.end(), name) != names.end()) {
            throw ParseError(ErrorCode::syntax,
                             "duplicate generator '" + name + "'",
                             line_no,
                             static_cast<int>(body.find(name)) + body_col + 1);
          }
          names.push_back(name);
        }
        for (std::size_t i = 0; i < names.size(); ++i) {
          tokens.emplace_back(names[i], make_letter(i, false));
        }
        for (std::size_t i = 0; i < names.size(); ++i) {
          auto u = upper(names[i]);
          if (std::find(names.begin(), names.end(), u) == names.end()) {
            tokens.emplace_back(u, make_letter(i, true));
          }
        }
      } else if (key == "rel") {
        if (!have_gens) {
          throw ParseError(ErrorCode::syntax,
                           "'rel:' before 'gens:'",
                           line_no,
                           static_cast<int>(first) + 1);
        }
        RelatorParser parser(body, line_no, body_col, tokens);
        auto          letters = parser.parse();
        relators.push_back(std::move(letters));
        relator_pos.emplace_back(line_no, body_col + 1);
      } else if (key == "lambda") {
        try {
          lambda = parse_ratio(body);
        } catch (Error const& e) {
          throw ParseError(ErrorCode::syntax, e.what(), line_no, body_col + 1);
        }
      } else {
        throw ParseError(ErrorCode::syntax,
                         "unknown key '" + key + "'",
                         line_no,
                         static_cast<int>(first) + 1);
      }
      if (end == text.size()) {
        break;
      }
    }
    if (!have_gens) {
      throw ParseError(ErrorCode::syntax, "missing 'gens:' line", line_no, 1);
    }
    // Validate relators one at a time so errors carry their line.
    std::vector<Letters> accepted;
    for (std::size_t i = 0; i < relators.size(); ++i) {
      accepted.push_back(relators[i]);
      try {
        Presentation check(names, accepted, lambda);
      } catch (Error const& e) {
        throw ParseError(
            e.code(), e.what(), relator_pos[i].first, relator_pos[i].second);
      }
    }
    return Presentation(std::move(names), std::move(relators), lambda);
  }

  Word parse_word(std::string_view text, std::vector<std::string> const& names) {
    std::vector<std::pair<std::string, Letter>> tokens;
    for (std::size_t i = 0; i < names.size(); ++i) {
      tokens.emplace_back(names[i], make_letter(i, false));
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto u = upper(names[i]);
      if (std::find(names.begin(), names.end(), u) == names.end()) {
        tokens.emplace_back(u, make_letter(i, true));
      }
    }
    auto first = text.find_first_not_of(" \t");
    auto last  = text.find_last_not_of(" \t");
    if (first == std::string_view::npos) {
      return {};
    }
    auto body = text.substr(first, last - first + 1);
    if (body == "1" && std::find(names.begin(), names.end(), "1") == names.end()) {
      return {};
    }
    RelatorParser parser(body, 1, static_cast<int>(first), tokens);
    return Word::reduce(parser.parse());
  }

  std::string serialize(Presentation const& p) {
    std::ostringstream out;
    out << "gens:";
    for (auto const& n : p.generator_names()) {
      out << ' ' << n;
    }
    out << '\n';
    for (auto const& r : p.relators()) {
      out << "rel: " << to_string(r.canonical().letters(), p.generator_names())
          << '\n';
    }
    out << "lambda: " << to_string(p.lambda_target()) << '\n';
    return out.str();
  }

  Presentation surface_presentation(std::size_t genus) {
    std::vector<std::string> names;
    Letters                  rel;
    for (std::size_t i = 0; i < genus; ++i) {
      names.push_back(genus <= 13 ? std::string(1, static_cast<char>('a' + 2 * i))
                                  : "a" + std::to_string(i));
      names.push_back(genus <= 13
                          ? std::string(1, static_cast<char>('a' + 2 * i + 1))
                          : "b" + std::to_string(i));
      auto a = make_letter(2 * i, false), b = make_letter(2 * i + 1, false);
      rel.insert(rel.end(), {a, b, -a, -b});
    }
    return Presentation(std::move(names), {rel});
  }

  Presentation free_abelian_presentation(std::size_t rank) {
    std::vector<std::string> names;
    std::vector<Letters>     rels;
    for (std::size_t i = 0; i < rank; ++i) {
      names.push_back(std::string(1, static_cast<char>('a' + i)));
    }
    for (std::size_t i = 0; i < rank; ++i) {
      for (std::size_t j = i + 1; j < rank; ++j) {
        auto a = make_letter(i, false), b = make_letter(j, false);
        rels.push_back({a, b, -a, -b});
      }
    }
    return Presentation(std::move(names), std::move(rels));
  }

  Presentation free_presentation(std::size_t rank) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < rank; ++i) {
      names.push_back(std::string(1, static_cast<char>('a' + i)));
    }
    return Presentation(std::move(names), {});
  }

  PieceReport compute_pieces(Presentation const& p) {
    auto const&                       rels = p.relators();
    std::vector<std::vector<Letters>> perms;
    std::vector<Letters const*>       all;
    for (auto const& r : rels) {
      perms.push_back(symmetrize(r));
    }
    for (auto const& ps : perms) {
      for (auto const& w : ps) {
        all.push_back(&w);
      }
    }
    PieceReport report;
    report.per_relator.assign(rels.size(), 0);
    report.witnesses.assign(rels.size(), Word());
    for (std::size_t i = 0; i < rels.size(); ++i) {
      for (auto const& s : perms[i]) {
        for (auto const* t : all) {
          if (*t == s) {
            continue;
          }
          auto len = common_prefix(s, *t);
          if (len > report.per_relator[i]) {
            report.per_relator[i] = len;
            report.witnesses[i]
                = Word::from_reduced(Letters(s.begin(), s.begin() + len));
          }
        }
      }
    }
    return report;
  }

  SmallCancellationVerdict check_small_cancellation(Presentation const& p,
                                                    Ratio lambda) {
    if (lambda.num <= 0 || lambda.den <= 0 || lambda.num > lambda.den) {
      throw Error(ErrorCode::invalid_argument, "lambda must lie in (0, 1]");
    }
    SmallCancellationVerdict v;
    auto                     pieces = compute_pieces(p);
    for (std::size_t i = 0; i < p.relators().size(); ++i) {
      auto len = pieces.per_relator[i];
      auto rl  = p.relators()[i].size();
      // |p| < num/den * |r|  <=>  |p| * den < num * |r|
      if (!(static_cast<std::int64_t>(len) * lambda.den
            < lambda.num * static_cast<std::int64_t>(rl))) {
        v.satisfied      = false;
        v.relator        = i;
        v.piece          = pieces.witnesses[i];
        v.piece_length   = len;
        v.relator_length = rl;
        return v;
      }
    }
    return v;
  }

  bool is_proper_power(std::span<Letter const> w) {
    auto n = w.size();
    for (std::size_t d = 1; d < n; ++d) {
      if (n % d != 0) {
        continue;
      }
      bool periodic = true;
      for (std::size_t i = 0; i + d < n && periodic; ++i) {
        periodic = w[i] == w[i + d];
      }
      if (periodic) {
        return true;
      }
    }
    return false;
  }

  bool is_proper_power(CyclicWord const& r) {
    return is_proper_power(r.canonical().letters());
  }

  DehnReducer::DehnReducer(Presentation const& p) : _presentation(p) {
    auto v = check_small_cancellation(p, Ratio{1, 6});
    if (!v.satisfied) {
      throw Error(ErrorCode::precondition_violated,
                  "presentation is not C'(1/6): relator "
                      + std::to_string(v.relator) + " has a piece of length "
                      + std::to_string(v.piece_length) + " against length "
                      + std::to_string(v.relator_length));
    }
    for (std::size_t i = 0; i < p.relators().size(); ++i) {
      if (is_proper_power(p.relators()[i])) {
        throw Error(ErrorCode::precondition_violated,
                    "relator " + std::to_string(i) + " is a proper power");
      }
    }
    for (auto const& r : p.relators()) {
      for (auto& w : symmetrize(r)) {
        _symmetrized.push_back(std::move(w));
      }
    }
    _by_first.assign(2 * p.rank(), {});
    for (std::size_t k = 0; k < _symmetrized.size(); ++k) {
      _by_first[letter_rank(_symmetrized[k][0])].push_back(k);
    }
  }

  std::optional<Word> DehnReducer::step(Word const& w) const {
    auto const& l = w.letters();
    for (std::size_t i = 0; i < l.size(); ++i) {
      std::size_t best_len = 0;
      std::size_t best     = 0;
      for (auto k : _by_first[letter_rank(l[i])]) {
        auto const& t = _symmetrized[k];
        auto m = common_prefix(std::span<Letter const>(l).subspan(i), t);
        if (2 * m > t.size() && m > best_len) {
          best_len = m;
          best     = k;
        }
      }
      if (best_len > 0) {
        auto const& t = _symmetrized[best];
        Letters     out(l.begin(), l.begin() + i);
        auto comp = inverse_letters(std::span<Letter const>(t).subspan(best_len));
        out.insert(out.end(), comp.begin(), comp.end());
        out.insert(out.end(), l.begin() + i + best_len, l.end());
        return Word::reduce(out);
      }
    }
    return std::nullopt;
  }

  Word DehnReducer::reduce(Word const& w) const {
    Word cur = w;
    while (auto next = step(cur)) {
      cur = std::move(*next);
    }
    return cur;
  }

  std::vector<Word> DehnReducer::trace(Word const& w) const {
    std::vector<Word> out{w};
    while (auto next = step(out.back())) {
      out.push_back(std::move(*next));
    }
    return out;
  }

  std::optional<Word> greendlinger_step(Word const& w, Presentation const& p) {
    return DehnReducer(p).step(w);
  }

  Word dehn_reduce(Word const& w, Presentation const& p) {
    return DehnReducer(p).reduce(w);
  }

}  // namespace hfill
