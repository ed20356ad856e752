#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "noether/group.hpp"

namespace noether {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

i64 parse_int(const std::string& s, int line, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("expected integer for ") + what + ", got '" + s + "'");
  }
}

bool valid_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

Word invert_word(const Word& w) {
  Word r;
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.emplace_back(it->first, -it->second);
  return r;
}

}  // namespace

Word parse_word(std::string_view text, const std::vector<std::string>& names, int line) {
  const std::string t = trim(text);
  if (t == "1" || t.empty()) {
    if (t.empty()) throw ParseError(line, "empty word");
    return {};
  }
  Word w;
  std::stringstream ss(t);
  std::string factor;
  while (std::getline(ss, factor, '*')) {
    factor = trim(factor);
    if (factor.empty()) throw ParseError(line, "empty factor in word '" + t + "'");
    std::string name = factor;
    i64 e = 1;
    if (auto caret = factor.find('^'); caret != std::string::npos) {
      name = trim(factor.substr(0, caret));
      e = parse_int(trim(factor.substr(caret + 1)), line, "exponent");
    }
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ParseError(line, "unknown generator '" + name + "'");
    if (e != 0) w.emplace_back(static_cast<std::size_t>(it - names.begin()), e);
  }
  return w;
}

PcGroup parse_group_spec(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>> keys;
  std::vector<std::pair<std::string, int>> power_lines, comm_lines;
  enum class Section { None, Powers, Commutators } section = Section::None;
  static const std::vector<std::string> known = {"p", "generators", "orders", "H", "top", "family", "params"};

  std::stringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line == "powers:") {
      section = Section::Powers;
      continue;
    }
    if (line == "commutators:") {
      section = Section::Commutators;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value' or a relation, got '" + line + "'");
    const std::string lhs = trim(line.substr(0, eq));
    const std::string rhs = trim(line.substr(eq + 1));
    if (std::find(known.begin(), known.end(), lhs) != known.end()) {
      if (keys.count(lhs)) throw ParseError(line_no, "duplicate key '" + lhs + "'");
      keys[lhs] = {rhs, line_no};
      section = Section::None;
      continue;
    }
    if (section == Section::Powers) {
      power_lines.emplace_back(line, line_no);
    } else if (section == Section::Commutators) {
      comm_lines.emplace_back(line, line_no);
    } else {
      throw ParseError(line_no, "unknown key '" + lhs + "'");
    }
  }

  if (keys.count("family")) {
    for (const auto& [k, v] : keys) {
      if (k != "family" && k != "params") throw ParseError(v.second, "key '" + k + "' not allowed with family shorthand");
    }
    if (!power_lines.empty() || !comm_lines.empty()) throw ParseError(0, "relations not allowed with family shorthand");
    if (!keys.count("params")) throw ParseError(keys["family"].second, "family shorthand requires 'params'");
    const auto& [fam, fline] = keys["family"];
    FamilyParams f;
    if (fam == "G1") {
      f.kind = FamilyParams::Kind::G1;
    } else if (fam == "G2") {
      f.kind = FamilyParams::Kind::G2;
    } else {
      throw ParseError(fline, "unknown family '" + fam + "' (expected G1 or G2)");
    }
    const auto& [ptext, pline] = keys["params"];
    const auto items = split_list(ptext);
    if (items.size() != 6) throw ParseError(pline, "params must be p,a,b,c,s,x (or p,a,b,c,r,x)");
    f.p = parse_int(items[0], pline, "p");
    f.a = static_cast<int>(parse_int(items[1], pline, "a"));
    f.b = static_cast<int>(parse_int(items[2], pline, "b"));
    f.c = static_cast<int>(parse_int(items[3], pline, "c"));
    f.s_or_r = static_cast<int>(parse_int(items[4], pline, "s/r"));
    f.x = parse_int(items[5], pline, "x");
    try {
      return make_family_group(f);
    } catch (const ArgumentError& e) {
      throw ParseError(pline, e.what());
    }
  }

  for (const char* req : {"p", "generators", "orders", "H", "top"}) {
    if (!keys.count(req)) throw ParseError(0, std::string("missing required key '") + req + "'");
  }
  const i64 p = parse_int(keys["p"].first, keys["p"].second, "p");
  if (p < 2 || prime_factors(p) != std::vector<i64>{p}) throw ParseError(keys["p"].second, "p must be prime");

  const auto names = split_list(keys["generators"].first);
  if (names.empty()) throw ParseError(keys["generators"].second, "no generators");
  for (const auto& nm : names) {
    if (!valid_name(nm)) throw ParseError(keys["generators"].second, "invalid generator name '" + nm + "'");
    if (std::count(names.begin(), names.end(), nm) > 1) throw ParseError(keys["generators"].second, "duplicate generator '" + nm + "'");
  }
  const auto order_items = split_list(keys["orders"].first);
  const int oline = keys["orders"].second;
  if (order_items.size() != names.size()) throw ParseError(oline, "one order per generator required");
  std::vector<int> rel_exp;
  for (const auto& o : order_items) {
    const int e = log_p_exact(parse_int(o, oline, "order"), p);
    if (e < 1) throw ParseError(oline, "order " + o + " not a power of p");
    rel_exp.push_back(e);
  }

  auto lookup = [&](const std::string& nm, int line) {
    auto it = std::find(names.begin(), names.end(), nm);
    if (it == names.end()) throw ParseError(line, "unknown generator '" + nm + "'");
    return static_cast<std::size_t>(it - names.begin());
  };

  std::vector<std::size_t> h;
  for (const auto& nm : split_list(keys["H"].first)) {
    if (nm.empty()) throw ParseError(keys["H"].second, "empty H generator");
    h.push_back(lookup(nm, keys["H"].second));
  }
  if (h.empty()) throw ParseError(keys["H"].second, "H must list at least one generator");
  std::optional<std::size_t> top;
  if (keys["top"].first != "1") top = lookup(keys["top"].first, keys["top"].second);

  std::vector<Word> powers(names.size());
  std::vector<bool> power_seen(names.size(), false);
  for (const auto& [text_line, ln] : power_lines) {
    const auto eq = text_line.find('=');
    const std::string lhs = trim(text_line.substr(0, eq));
    const auto caret = lhs.find('^');
    if (caret == std::string::npos) throw ParseError(ln, "power relation must read 'g^n = word'");
    const std::size_t g = lookup(trim(lhs.substr(0, caret)), ln);
    const i64 n = parse_int(trim(lhs.substr(caret + 1)), ln, "power exponent");
    if (n != ipow(p, static_cast<unsigned>(rel_exp[g]))) throw ParseError(ln, "power relation exponent must equal the order of " + names[g]);
    if (power_seen[g]) throw ParseError(ln, "duplicate power relation for " + names[g]);
    power_seen[g] = true;
    powers[g] = parse_word(text_line.substr(eq + 1), names, ln);
  }

  std::vector<std::vector<Word>> comms(names.size(), std::vector<Word>(names.size()));
  std::vector<std::vector<bool>> comm_seen(names.size(), std::vector<bool>(names.size(), false));
  for (const auto& [text_line, ln] : comm_lines) {
    const auto eq = text_line.find('=');
    const std::string lhs = trim(text_line.substr(0, eq));
    if (lhs.size() < 5 || lhs.front() != '[' || lhs.back() != ']') throw ParseError(ln, "commutator relation must read '[g,h] = word'");
    const auto parts = split_list(lhs.substr(1, lhs.size() - 2));
    if (parts.size() != 2) throw ParseError(ln, "commutator needs two generators");
    std::size_t g = lookup(parts[0], ln), k = lookup(parts[1], ln);
    if (g == k) throw ParseError(ln, "commutator of a generator with itself");
    Word w = parse_word(text_line.substr(eq + 1), names, ln);
    if (g < k) {
      std::swap(g, k);
      w = invert_word(w);
    }
    if (comm_seen[g][k]) throw ParseError(ln, "duplicate commutator relation");
    comm_seen[g][k] = true;
    comms[g][k] = std::move(w);
  }

  try {
    return PcGroup(p, names, rel_exp, std::move(powers), std::move(comms), std::move(h), top);
  } catch (const ArgumentError& e) {
    throw ParseError(0, e.what());
  }
}

}  // namespace noether
