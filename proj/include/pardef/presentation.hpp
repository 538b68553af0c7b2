#pragma once

// Finitely presented groups with peripheral structure: words, conjugacy
// class specs given by eigenvalue angles, the line-oriented text format.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pardef/errors.hpp"

namespace pardef {

struct Letter {
  std::size_t gen = 0;
  int sign = 1;  // +1 or -1

  Letter inverse() const { return {gen, -sign}; }
  friend bool operator==(const Letter&, const Letter&) = default;
};

struct Word {
  std::vector<Letter> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  friend bool operator==(const Word&, const Word&) = default;
};

/// Free reduction.
inline Word normalize_word(const Word& w) {
  Word out;
  out.letters.reserve(w.letters.size());
  for (const Letter& l : w.letters) {
    if (!out.letters.empty() && out.letters.back() == l.inverse())
      out.letters.pop_back();
    else
      out.letters.push_back(l);
  }
  return out;
}

inline Word inverse(const Word& w) {
  Word out;
  out.letters.reserve(w.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.push_back(it->inverse());
  return out;
}

inline Word concat(const Word& u, const Word& v) {
  Word out = u;
  out.letters.insert(out.letters.end(), v.letters.begin(), v.letters.end());
  return out;
}

/// An angle in turns, normalized to [0,1). Rational inputs are kept exactly.
class Angle {
public:
  Angle() = default;

  static Angle rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw InvalidInput("angle with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    num %= den;
    if (num < 0) num += den;
    const std::int64_t g = std::gcd(num, den);
    Angle a;
    a.num_ = num / g;
    a.den_ = den / g;
    a.exact_ = true;
    a.value_ = static_cast<double>(a.num_) / static_cast<double>(a.den_);
    return a;
  }

  static Angle decimal(double turns) {
    double v = turns - std::floor(turns);
    if (v >= 1.0) v = 0.0;
    Angle a;
    a.value_ = v;
    a.exact_ = false;
    return a;
  }

  bool exact() const { return exact_; }
  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double turns() const { return value_; }

  std::string to_string() const {
    if (exact_) return std::to_string(num_) + "/" + std::to_string(den_);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    std::string s = buf;
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
  }

  friend bool operator==(const Angle& a, const Angle& b) {
    if (a.exact_ && b.exact_) return a.num_ == b.num_ && a.den_ == b.den_;
    return a.value_ == b.value_;
  }
  friend bool operator<(const Angle& a, const Angle& b) {
    if (a.exact_ && b.exact_) return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    return a.value_ < b.value_;
  }

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  double value_ = 0.0;
  bool exact_ = true;
};

/// Multiset of N eigenvalue angles (eigenvalue = exp(2 pi i angle)), kept sorted.
class ConjugacyClassSpec {
public:
  ConjugacyClassSpec() = default;
  explicit ConjugacyClassSpec(std::vector<Angle> angles) : angles_(std::move(angles)) {
    std::sort(angles_.begin(), angles_.end());
  }

  const std::vector<Angle>& angles() const { return angles_; }
  std::size_t rank() const { return angles_.size(); }

  friend bool operator==(const ConjugacyClassSpec& a, const ConjugacyClassSpec& b) { return a.angles_ == b.angles_; }

private:
  std::vector<Angle> angles_;
};

struct Peripheral {
  std::string name;
  Word word;
  ConjugacyClassSpec cls;
};

struct Presentation {
  std::string name;
  int rank = 1;
  std::vector<std::string> generators;
  std::vector<Word> relators;
  std::vector<Peripheral> peripherals;
  /// Partition of peripheral indices; every peripheral belongs to exactly one group.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::string> warnings;

  std::size_t generator_count() const { return generators.size(); }

  std::size_t group_of(std::size_t peripheral) const {
    for (std::size_t s = 0; s < groups.size(); ++s)
      for (std::size_t i : groups[s])
        if (i == peripheral) return s;
    throw InvalidInput("peripheral index not in any simultaneity group");
  }

  std::optional<std::size_t> generator_index(std::string_view n) const {
    for (std::size_t j = 0; j < generators.size(); ++j)
      if (generators[j] == n) return j;
    return std::nullopt;
  }
};

namespace detail {

struct Token {
  enum Kind { Ident, Number, Symbol } kind;
  std::string text;
  int column;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::vector<Token> tokenize(std::string_view line, int lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const int col = static_cast<int>(i) + 1;
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < line.size() && ident_char(line[j])) ++j;
      if (j < line.size() && line[j] == '\'') ++j;
      out.push_back({Token::Ident, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      std::size_t j = i + 1;
      while (j < line.size() &&
             (std::isdigit(static_cast<unsigned char>(line[j])) || line[j] == '.' || line[j] == '/' || line[j] == 'e' ||
              line[j] == 'E' || ((line[j] == '-' || line[j] == '+') && (line[j - 1] == 'e' || line[j - 1] == 'E'))))
        ++j;
      out.push_back({Token::Number, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (c == '=' || c == ':' || c == ',') {
      out.push_back({Token::Symbol, std::string(1, c), col});
      ++i;
    } else {
      throw ParseError(lineno, col, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

inline Angle parse_angle(const Token& t, int lineno) {
  if (t.kind != Token::Number) throw ParseError(lineno, t.column, "expected angle, got '" + t.text + "'");
  const std::string& s = t.text;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::int64_t p = 0, q = 0;
    const char* b = s.data();
    std::string_view ps(b, slash), qs(b + slash + 1, s.size() - slash - 1);
    if (!ps.empty() && ps.front() == '+') ps.remove_prefix(1);
    auto r1 = std::from_chars(ps.data(), ps.data() + ps.size(), p);
    auto r2 = std::from_chars(qs.data(), qs.data() + qs.size(), q);
    if (r1.ec != std::errc() || r1.ptr != ps.data() + ps.size() || r2.ec != std::errc() ||
        r2.ptr != qs.data() + qs.size() || q <= 0)
      throw ParseError(lineno, t.column, "malformed rational angle '" + s + "'");
    return Angle::rational(p, q);
  }
  std::string_view body = s;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  if (body.find_first_of(".eE") == std::string_view::npos) {
    std::int64_t p = 0;
    auto r = std::from_chars(body.data(), body.data() + body.size(), p);
    if (r.ec != std::errc() || r.ptr != body.data() + body.size())
      throw ParseError(lineno, t.column, "malformed angle '" + s + "'");
    return Angle::rational(p, 1);
  }
  double v = 0;
  auto r = std::from_chars(body.data(), body.data() + body.size(), v);
  if (r.ec != std::errc() || r.ptr != body.data() + body.size() || !std::isfinite(v))
    throw ParseError(lineno, t.column, "malformed decimal angle '" + s + "'");
  return Angle::decimal(v);
}

}  // namespace detail

/// Parses the presentation text format. Throws ParseError with line/column.
inline Presentation parse_presentation(std::string_view text) {
  using detail::Token;
  Presentation p;
  bool have_group = false, have_rank = false, have_gens = false;
  std::vector<std::pair<std::vector<std::string>, std::pair<int, int>>> together;

  auto read_word = [&](const std::vector<Token>& toks, std::size_t from, std::size_t to, int lineno) {
    Word w;
    for (std::size_t k = from; k < to; ++k) {
      const Token& t = toks[k];
      if (t.kind != Token::Ident) throw ParseError(lineno, t.column, "expected generator letter, got '" + t.text + "'");
      std::string name = t.text;
      int sign = 1;
      if (name.back() == '\'') {
        name.pop_back();
        sign = -1;
      }
      auto idx = p.generator_index(name);
      if (!idx) throw ParseError(lineno, t.column, "unknown generator '" + name + "'");
      w.letters.push_back({*idx, sign});
    }
    return w;
  };

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    ++lineno;
    auto toks = detail::tokenize(line, lineno);
    if (toks.empty()) continue;
    const Token& kw = toks[0];
    if (kw.kind != Token::Ident) throw ParseError(lineno, kw.column, "expected a directive");
    auto need_gens = [&] {
      if (!have_gens) throw ParseError(lineno, kw.column, "'" + kw.text + "' before 'generators'");
    };
    if (kw.text == "group") {
      if (toks.size() != 2 || toks[1].kind != Token::Ident)
        throw ParseError(lineno, kw.column, "expected 'group IDENT'");
      if (have_group) throw ParseError(lineno, kw.column, "duplicate 'group'");
      p.name = toks[1].text;
      have_group = true;
    } else if (kw.text == "rank") {
      if (toks.size() != 2 || toks[1].kind != Token::Number)
        throw ParseError(lineno, kw.column, "expected 'rank INT'");
      if (have_rank) throw ParseError(lineno, kw.column, "duplicate 'rank'");
      int n = 0;
      const std::string& s = toks[1].text;
      auto r = std::from_chars(s.data(), s.data() + s.size(), n);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size() || n < 1)
        throw ParseError(lineno, toks[1].column, "rank must be a positive integer");
      p.rank = n;
      have_rank = true;
    } else if (kw.text == "generators") {
      if (have_gens) throw ParseError(lineno, kw.column, "duplicate 'generators'");
      if (toks.size() < 2) throw ParseError(lineno, kw.column, "expected at least one generator");
      for (std::size_t k = 1; k < toks.size(); ++k) {
        const Token& t = toks[k];
        if (t.kind != Token::Ident || t.text.back() == '\'')
          throw ParseError(lineno, t.column, "invalid generator name '" + t.text + "'");
        if (p.generator_index(t.text)) throw ParseError(lineno, t.column, "duplicate generator '" + t.text + "'");
        p.generators.push_back(t.text);
      }
      have_gens = true;
    } else if (kw.text == "relator") {
      need_gens();
      if (toks.size() < 2) throw ParseError(lineno, kw.column, "empty relator");
      Word w = normalize_word(read_word(toks, 1, toks.size(), lineno));
      if (w.empty())
        p.warnings.push_back("relator " + std::to_string(p.relators.size()) + " (line " + std::to_string(lineno) +
                             ") reduces to the empty word");
      p.relators.push_back(std::move(w));
    } else if (kw.text == "peripheral") {
      need_gens();
      if (!have_rank) throw ParseError(lineno, kw.column, "'peripheral' before 'rank'");
      if (toks.size() < 5 || toks[1].kind != Token::Ident || toks[1].text.back() == '\'' ||
          toks[2].text != "=")
        throw ParseError(lineno, kw.column, "expected 'peripheral IDENT = LETTER+ : ANGLE, ...'");
      std::size_t colon = 3;
      while (colon < toks.size() && toks[colon].text != ":") ++colon;
      if (colon == toks.size()) throw ParseError(lineno, kw.column, "missing ':' in peripheral");
      if (colon == 3) throw ParseError(lineno, toks[colon].column, "peripheral word is empty");
      for (const auto& q : p.peripherals)
        if (q.name == toks[1].text) throw ParseError(lineno, toks[1].column, "duplicate peripheral '" + q.name + "'");
      Word w = normalize_word(read_word(toks, 3, colon, lineno));
      std::vector<Angle> angles;
      std::size_t k = colon + 1;
      if (k >= toks.size()) throw ParseError(lineno, toks[colon].column, "missing angles");
      while (k < toks.size()) {
        angles.push_back(detail::parse_angle(toks[k], lineno));
        ++k;
        if (k < toks.size()) {
          if (toks[k].text != ",") throw ParseError(lineno, toks[k].column, "expected ','");
          ++k;
          if (k == toks.size()) throw ParseError(lineno, toks[k - 1].column, "trailing ','");
        }
      }
      if (static_cast<int>(angles.size()) != p.rank)
        throw ParseError(lineno, toks[colon].column,
                         "peripheral '" + toks[1].text + "' has " + std::to_string(angles.size()) +
                             " angles, rank is " + std::to_string(p.rank));
      if (w.empty())
        p.warnings.push_back("peripheral '" + toks[1].text + "' reduces to the empty word");
      p.peripherals.push_back({toks[1].text, std::move(w), ConjugacyClassSpec(std::move(angles))});
    } else if (kw.text == "together") {
      if (toks.size() < 2) throw ParseError(lineno, kw.column, "expected 'together IDENT+'");
      std::vector<std::string> names;
      for (std::size_t k = 1; k < toks.size(); ++k) {
        if (toks[k].kind != Token::Ident) throw ParseError(lineno, toks[k].column, "expected peripheral name");
        names.push_back(toks[k].text);
      }
      together.push_back({std::move(names), {lineno, kw.column}});
    } else {
      throw ParseError(lineno, kw.column, "unknown directive '" + kw.text + "'");
    }
  }
  if (!have_group) throw ParseError(lineno, 1, "missing 'group'");
  if (!have_rank) throw ParseError(lineno, 1, "missing 'rank'");
  if (!have_gens) throw ParseError(lineno, 1, "missing 'generators'");

  std::vector<int> owner(p.peripherals.size(), -1);
  for (std::size_t g = 0; g < together.size(); ++g) {
    const auto& [names, where] = together[g];
    for (const auto& n : names) {
      std::size_t idx = p.peripherals.size();
      for (std::size_t i = 0; i < p.peripherals.size(); ++i)
        if (p.peripherals[i].name == n) idx = i;
      if (idx == p.peripherals.size())
        throw ParseError(where.first, where.second, "'together' names undeclared peripheral '" + n + "'");
      if (owner[idx] != -1)
        throw ParseError(where.first, where.second, "peripheral '" + n + "' appears in two 'together' groups");
      owner[idx] = static_cast<int>(g);
    }
  }
  // Groups ordered by their smallest member.
  std::vector<bool> emitted(together.size(), false);
  for (std::size_t i = 0; i < p.peripherals.size(); ++i) {
    if (owner[i] == -1) {
      p.groups.push_back({i});
    } else if (!emitted[owner[i]]) {
      emitted[owner[i]] = true;
      std::vector<std::size_t> grp;
      for (std::size_t j = 0; j < p.peripherals.size(); ++j)
        if (owner[j] == owner[i]) grp.push_back(j);
      p.groups.push_back(std::move(grp));
    }
  }
  return p;
}

inline std::string word_to_string(const Presentation& p, const Word& w) {
  std::string out;
  for (const Letter& l : w.letters) {
    if (!out.empty()) out += ' ';
    out += p.generators.at(l.gen);
    if (l.sign < 0) out += '\'';
  }
  return out;
}

/// Canonical text form; parse(serialize(p)) reproduces p.
inline std::string serialize_presentation(const Presentation& p) {
  std::ostringstream os;
  const std::string empty_word = p.generators.empty() ? std::string() : p.generators[0] + " " + p.generators[0] + "'";
  auto word = [&](const Word& w) { return w.empty() ? empty_word : word_to_string(p, w); };
  os << "group " << p.name << "\n";
  os << "rank " << p.rank << "\n";
  os << "generators";
  for (const auto& g : p.generators) os << ' ' << g;
  os << "\n";
  for (const Word& r : p.relators) os << "relator " << word(r) << "\n";
  for (const Peripheral& q : p.peripherals) {
    os << "peripheral " << q.name << " = " << word(q.word) << " :";
    for (std::size_t k = 0; k < q.cls.angles().size(); ++k) os << (k ? ", " : " ") << q.cls.angles()[k].to_string();
    os << "\n";
  }
  for (const auto& grp : p.groups) {
    if (grp.size() < 2) continue;
    os << "together";
    for (std::size_t i : grp) os << ' ' << p.peripherals[i].name;
    os << "\n";
  }
  return os.str();
}

inline bool operator==(const Peripheral& a, const Peripheral& b) {
  return a.name == b.name && a.word == b.word && a.cls == b.cls;
}

/// Structural equality (warnings excluded).
inline bool same_presentation(const Presentation& a, const Presentation& b) {
  return a.name == b.name && a.rank == b.rank && a.generators == b.generators && a.relators == b.relators &&
         a.peripherals == b.peripherals && a.groups == b.groups;
}

}  // namespace pardef
