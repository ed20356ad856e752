#include "noether/action.hpp"

#include <set>
#include <sstream>

namespace noether {

std::string Variable::name() const {
  if (idx.empty()) return family;
  std::string s = family + "[";
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(idx[k]);
  }
  return s + "]";
}

VarSpace::VarSpace(std::vector<Variable> vars) : vars_(std::move(vars)) {
  std::set<std::string> seen;
  for (const auto& v : vars_) {
    if (!seen.insert(v.name()).second) throw ArgumentError("duplicate variable " + v.name());
  }
}

std::optional<std::size_t> VarSpace::find(const std::string& family, const std::vector<i64>& idx) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].family == family && vars_[i].idx == idx) return i;
  }
  return std::nullopt;
}

std::size_t VarSpace::at(const std::string& family, const std::vector<i64>& idx) const {
  if (auto i = find(family, idx)) return *i;
  throw ArgumentError("no variable " + Variable{family, idx, {}}.name());
}

MonomialMap::MonomialMap(std::vector<Root> coeff, IntMatrix exps) : coeff_(std::move(coeff)), exps_(std::move(exps)) {
  if (coeff_.size() != exps_.size()) throw ArgumentError("monomial map: one image per variable required");
  level_ = coeff_.empty() ? 1 : coeff_[0].N;
  for (std::size_t v = 0; v < coeff_.size(); ++v) {
    if (exps_[v].size() != coeff_.size()) throw ArgumentError("monomial map: exponent matrix must be square");
    if (coeff_[v].N != level_) throw ArgumentError("monomial map: mixed root levels");
  }
}

MonomialMap MonomialMap::identity(std::size_t n, i64 N) {
  MonomialMap f(std::vector<Root>(n, Root::one(N)), identity_matrix(n));
  f.level_ = N;
  return f;
}

MonomialMap MonomialMap::permutation(const std::vector<std::size_t>& perm, std::vector<Root> coeff) {
  IntMatrix e(perm.size(), std::vector<i64>(perm.size(), 0));
  for (std::size_t v = 0; v < perm.size(); ++v) e[v].at(perm[v]) = 1;
  return MonomialMap(std::move(coeff), std::move(e));
}

Monomial MonomialMap::apply(const Monomial& m) const {
  if (m.exps.size() != size()) throw ArgumentError("monomial size mismatch");
  Monomial r{m.coeff, std::vector<i64>(size(), 0)};
  for (std::size_t t = 0; t < size(); ++t) {
    const i64 e = m.exps[t];
    if (e == 0) continue;
    r.coeff = root_mul(r.coeff, root_pow(coeff_[t], e));
    const auto& row = exps_[t];
    for (std::size_t u = 0; u < size(); ++u) {
      if (row[u]) r.exps[u] += e * row[u];
    }
  }
  return r;
}

bool MonomialMap::is_identity() const {
  for (std::size_t v = 0; v < size(); ++v) {
    if (!coeff_[v].is_one()) return false;
    for (std::size_t t = 0; t < size(); ++t) {
      if (exps_[v][t] != (v == t ? 1 : 0)) return false;
    }
  }
  return true;
}

std::optional<std::size_t> MonomialMap::target(std::size_t v) const {
  std::optional<std::size_t> hit;
  for (std::size_t t = 0; t < size(); ++t) {
    const i64 e = exps_[v][t];
    if (e == 0) continue;
    if (e != 1 || hit) return std::nullopt;
    hit = t;
  }
  return hit;
}

bool MonomialMap::is_linear() const {
  for (std::size_t v = 0; v < size(); ++v) {
    if (!target(v)) return false;
  }
  return true;
}

MonomialMap MonomialMap::restrict(const std::vector<std::size_t>& keep) const {
  std::vector<i64> pos(size(), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) pos[keep[k]] = static_cast<i64>(k);
  std::vector<Root> c;
  IntMatrix e(keep.size(), std::vector<i64>(keep.size(), 0));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    c.push_back(coeff_.at(keep[k]));
    for (std::size_t t = 0; t < size(); ++t) {
      const i64 x = exps_[keep[k]][t];
      if (x == 0) continue;
      if (pos[t] < 0) throw VerificationError("restriction: image of a kept variable involves a dropped one");
      e[k][static_cast<std::size_t>(pos[t])] = x;
    }
  }
  MonomialMap r(std::move(c), std::move(e));
  r.level_ = level_;
  return r;
}

MonomialMap compose(const MonomialMap& f, const MonomialMap& g) {
  if (f.size() != g.size()) throw ArgumentError("compose: variable spaces differ");
  if (f.level() != g.level()) throw ArgumentError("compose: root levels differ");
  std::vector<Root> c;
  IntMatrix e;
  for (std::size_t v = 0; v < g.size(); ++v) {
    Monomial m = f.apply(g.image(v));
    c.push_back(m.coeff);
    e.push_back(std::move(m.exps));
  }
  if (g.size() == 0) return MonomialMap::identity(0, f.level());
  return MonomialMap(std::move(c), std::move(e));
}

MonomialMap invert(const MonomialMap& f) {
  if (f.size() == 0) return f;
  IntMatrix inv = unimodular_inverse(f.exps());
  std::vector<Root> c;
  for (std::size_t v = 0; v < f.size(); ++v) {
    Root d = Root::one(f.level());
    for (std::size_t t = 0; t < f.size(); ++t) {
      if (inv[v][t]) d = root_mul(d, root_pow(f.coeff(t), -inv[v][t]));
    }
    c.push_back(d);
  }
  return MonomialMap(std::move(c), std::move(inv));
}

MonomialMap map_power(const MonomialMap& f, i64 n) {
  MonomialMap base = n >= 0 ? f : invert(f);
  MonomialMap r = MonomialMap::identity(f.size(), f.level());
  for (i64 e = n >= 0 ? n : -n; e > 0; e >>= 1) {
    if (e & 1) r = compose(r, base);
    if (e > 1) base = compose(base, base);
  }
  return r;
}

FormalSum FormalSum::of(const Root& r, Rational c) {
  FormalSum s(r.N);
  s.add(r, c);
  return s;
}

void FormalSum::add(const Root& r, const Rational& c) {
  if (r.N != level_) throw ArgumentError("formal sum: level mismatch");
  if (c == 0) return;
  auto& slot = terms_[r.k];
  slot += c;
  if (slot == 0) terms_.erase(r.k);
}

FormalSum FormalSum::operator+(const FormalSum& o) const {
  FormalSum r = *this;
  for (const auto& [k, c] : o.terms_) r.add(Root(k, level_), c);
  return r;
}

FormalSum FormalSum::operator*(const FormalSum& o) const {
  FormalSum r(level_);
  for (const auto& [k1, c1] : terms_)
    for (const auto& [k2, c2] : o.terms_) r.add(Root(k1 + k2, level_), c1 * c2);
  return r;
}

u64 rational_mod(const Rational& r, u64 q) {
  using boost::multiprecision::cpp_int;
  cpp_int n = boost::multiprecision::numerator(r) % q;
  if (n < 0) n += q;
  const cpp_int d = boost::multiprecision::denominator(r) % q;
  if (d == 0) throw ArgumentError("rational denominator vanishes mod q");
  const u64 nn = static_cast<u64>(n), dd = static_cast<u64>(d);
  return mulmod(nn, powmod(dd, q - 2, q), q);
}

u64 FormalSum::eval(const FFEmbedding& e) const {
  u64 acc = 0;
  for (const auto& [k, c] : terms_) {
    acc = (acc + mulmod(rational_mod(c, e.q), e.embed(Root(k, level_)), e.q)) % e.q;
  }
  return acc;
}

std::string FormalSum::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [k, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += c.str() + "*" + Root(k, level_).str();
  }
  return s;
}

LinearMap LinearMap::from_monomial(const MonomialMap& f) {
  LinearMap l;
  l.m.assign(f.size(), std::vector<FormalSum>(f.size(), FormalSum(f.level())));
  for (std::size_t v = 0; v < f.size(); ++v) {
    const auto t = f.target(v);
    if (!t) throw ArgumentError("monomial map is not linear");
    l.m[v][*t] = FormalSum::of(f.coeff(v));
  }
  return l;
}

std::vector<std::vector<u64>> LinearMap::eval(const FFEmbedding& e) const {
  std::vector<std::vector<u64>> r(size(), std::vector<u64>(size()));
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) r[i][j] = m[i][j].eval(e);
  return r;
}

LinearMap compose(const LinearMap& f, const LinearMap& g) {
  if (f.size() != g.size()) throw ArgumentError("compose: sizes differ");
  const std::size_t n = f.size();
  const i64 N = n ? f.m[0][0].level() : 1;
  LinearMap r;
  r.m.assign(n, std::vector<FormalSum>(n, FormalSum(N)));
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t t = 0; t < n; ++t) {
      if (g.m[v][t].is_zero()) continue;
      for (std::size_t u = 0; u < n; ++u) {
        if (!f.m[t][u].is_zero()) r.m[v][u] = r.m[v][u] + g.m[v][t] * f.m[t][u];
      }
    }
  return r;
}

bool linear_equal(const LinearMap& a, const LinearMap& b, const FFEmbedding& e1, const FFEmbedding& e2) {
  if (a.size() != b.size()) return false;
  if (a.m == b.m) return true;
  return a.eval(e1) == b.eval(e1) && a.eval(e2) == b.eval(e2);
}

MonomialMap GroupAction::word_map(const Word& w) const {
  MonomialMap r = MonomialMap::identity(vars.size(), level);
  for (const auto& [gen, e] : w) r = compose(r, map_power(gens.at(gen), e));
  return r;
}

MonomialMap GroupAction::element_map(const Element& x) const { return word_map(group->normal_word(x)); }

namespace {

std::string first_difference(const MonomialMap& lhs, const MonomialMap& rhs, const VarSpace& vars) {
  for (std::size_t v = 0; v < lhs.size(); ++v) {
    if (lhs.image(v) != rhs.image(v)) {
      return vars.name(v) + ": " + format_monomial(lhs.image(v), vars) + " vs " + format_monomial(rhs.image(v), vars);
    }
  }
  return "";
}

}  // namespace

ActionReport verify_homomorphism(const GroupAction& a) {
  const PcGroup& g = *a.group;
  ActionReport rep;
  if (a.gens.size() != g.rank()) {
    rep.witness = "one map per generator required";
    return rep;
  }
  for (const auto& m : a.gens) {
    if (m.size() != a.vars.size() || m.level() != a.level) {
      rep.witness = "generator map does not match the variable space";
      return rep;
    }
  }
  for (std::size_t i = 0; i < g.rank(); ++i) {
    const MonomialMap lhs = map_power(a.gens[i], g.rel_order(i));
    const MonomialMap rhs = a.word_map(g.power_word(i));
    if (lhs != rhs) {
      rep.witness = "relator " + g.name(i) + "^" + std::to_string(g.rel_order(i)) + " = " + g.format(g.power_word(i)) +
                    " fails at " + first_difference(lhs, rhs, a.vars);
      return rep;
    }
  }
  for (std::size_t i = 0; i < g.rank(); ++i) {
    for (std::size_t j = i + 1; j < g.rank(); ++j) {
      const MonomialMap lhs = a.word_map({{j, -1}, {i, -1}, {j, 1}, {i, 1}});
      const MonomialMap rhs = a.word_map(g.commutator_word(j, i));
      if (lhs != rhs) {
        rep.witness = "relator [" + g.name(j) + "," + g.name(i) + "] = " + g.format(g.commutator_word(j, i)) + " fails at " +
                      first_difference(lhs, rhs, a.vars);
        return rep;
      }
    }
  }
  rep.ok = true;
  return rep;
}

ActionReport verify_faithful(const GroupAction& a, i64 max_order) {
  const PcGroup& g = *a.group;
  if (g.order() > max_order) throw ScopeError("group order exceeds enumeration bound");
  ActionReport rep;
  // powers[k][e] = M(g_k)^e
  std::vector<std::vector<MonomialMap>> powers(g.rank());
  for (std::size_t k = 0; k < g.rank(); ++k) {
    powers[k].push_back(MonomialMap::identity(a.vars.size(), a.level));
    for (i64 e = 1; e < g.rel_order(k); ++e) powers[k].push_back(compose(powers[k].back(), a.gens[k]));
  }
  for (std::size_t idx = 1; idx < static_cast<std::size_t>(g.order()); ++idx) {
    const Element x = g.element_at(idx);
    MonomialMap m = MonomialMap::identity(a.vars.size(), a.level);
    for (std::size_t k = 0; k < g.rank(); ++k) {
      if (x[k]) m = compose(m, powers[k][static_cast<std::size_t>(x[k])]);
    }
    if (m.is_identity()) {
      rep.witness = "kernel element " + g.format(x);
      return rep;
    }
  }
  rep.ok = true;
  return rep;
}

i64 induced_level(const PcGroup& g) {
  i64 N = 1;
  for (auto h : g.h_generators()) N = std::max(N, g.generator_order(h));
  return N;
}

TopSplit split_top(const PcGroup& g, const HDecomposer& dec, const Element& x, int a) {
  const Element alpha_inv = g.top() ? g.inverse(g.generator(*g.top())) : g.identity();
  Element h = x;
  const i64 pa = ipow(g.p(), static_cast<unsigned>(a));
  for (i64 t = 0; t < pa; ++t) {
    if (auto c = dec.decompose(h)) return {t, *c};
    h = g.multiply(alpha_inv, h);
  }
  throw VerificationError("element " + g.format(x) + " is not of the form alpha^t h");
}

GroupAction induce_representation(std::shared_ptr<const PcGroup> gp, i64 level, i64 max_order) {
  const PcGroup& g = *gp;
  const AbcWitness abc = check_abc(g, max_order);
  if (!abc.ok()) throw ScopeError("not an ABC group: " + format_failure(abc.failure) + " (" + abc.detail + ")");
  if (!abc.split) throw ScopeError("non-split extension: alpha^{p^a} != 1");
  const HDecomposer dec(g, max_order);
  const int a = abc.quotient_log;
  const i64 pa = ipow(g.p(), static_cast<unsigned>(a));
  const std::size_t s = g.h_generators().size();
  const i64 N = level ? level : induced_level(g);
  for (auto o : dec.orders()) {
    if (N % o != 0) throw ArgumentError("level " + std::to_string(N) + " too small for H");
  }

  std::vector<Variable> vars;
  for (std::size_t j = 0; j < s; ++j)
    for (i64 i = 0; i < pa; ++i) vars.push_back({"x", {static_cast<i64>(j) + 1, i}, "induce"});
  auto var = [&](std::size_t j, i64 i) { return j * static_cast<std::size_t>(pa) + static_cast<std::size_t>(mod(i, pa)); };

  std::vector<Element> alpha_pow{g.identity()};
  const Element alpha = g.top() ? g.generator(*g.top()) : g.identity();
  for (i64 i = 1; i < pa; ++i) alpha_pow.push_back(g.multiply(alpha_pow.back(), alpha));

  GroupAction act;
  act.group = gp;
  act.vars = VarSpace(std::move(vars));
  act.level = N;
  for (std::size_t k = 0; k < g.rank(); ++k) {
    const Element x = g.generator(k);
    const TopSplit ts = split_top(g, dec, x, a);
    Element h = g.identity();
    for (std::size_t j = 0; j < s; ++j) h = g.multiply(h, g.power(g.generator(g.h_generators()[j]), ts.h[j]));
    // x . x[j,i] = chi_j(alpha^-i h alpha^i) x[j, i+t]
    std::vector<std::size_t> perm(act.vars.size());
    std::vector<Root> coeff(act.vars.size(), Root::one(N));
    for (i64 i = 0; i < pa; ++i) {
      const auto c = dec.decompose(g.conjugate(h, alpha_pow[static_cast<std::size_t>(i)]));
      if (!c) throw VerificationError("H is not normal under alpha");
      for (std::size_t j = 0; j < s; ++j) {
        perm[var(j, i)] = var(j, i + ts.t);
        coeff[var(j, i)] = Root::lift((*c)[j], dec.orders()[j], N);
      }
    }
    act.gens.push_back(MonomialMap::permutation(perm, std::move(coeff)));
  }
  const auto hom = verify_homomorphism(act);
  if (!hom.ok) throw VerificationError("induced action is not a homomorphism: " + hom.witness);
  act.homomorphism = true;
  const auto faith = verify_faithful(act, max_order);
  if (!faith.ok) throw VerificationError("induced action is not faithful: " + faith.witness);
  act.faithful = true;
  return act;
}

std::string format_monomial(const Monomial& m, const VarSpace& vars) {
  std::ostringstream os;
  bool first = true;
  if (!m.coeff.is_one()) {
    os << m.coeff.str();
    first = false;
  }
  for (std::size_t t = 0; t < m.exps.size(); ++t) {
    if (m.exps[t] == 0) continue;
    if (!first) os << '*';
    os << vars.name(t);
    if (m.exps[t] != 1) os << '^' << m.exps[t];
    first = false;
  }
  if (first) os << '1';
  return os.str();
}

std::string format_map(const MonomialMap& f, const VarSpace& vars) {
  std::string s;
  for (std::size_t v = 0; v < f.size(); ++v) {
    if (!s.empty()) s += ", ";
    s += vars.name(v) + " -> " + format_monomial(f.image(v), vars);
  }
  return s;
}

}  // namespace noether
