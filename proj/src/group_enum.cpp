#include <algorithm>
#include <deque>
#include <numeric>

#include "noether/group.hpp"

namespace noether {

namespace {

void require_bound(const PcGroup& g, i64 max_order) {
  if (g.order() > max_order) {
    throw ScopeError("group order " + std::to_string(g.order()) + " exceeds enumeration bound " + std::to_string(max_order));
  }
}

/// Membership vector of the subgroup generated by the given elements.
std::vector<char> subgroup(const PcGroup& g, const Enumeration& en, const std::vector<std::size_t>& gens) {
  std::vector<char> in(en.size, 0);
  std::deque<std::size_t> queue{0};
  in[0] = 1;
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    for (std::size_t s : gens) {
      const std::size_t y = en.multiply(g, x, s);
      if (!in[y]) {
        in[y] = 1;
        queue.push_back(y);
      }
    }
  }
  return in;
}

std::size_t count(const std::vector<char>& v) { return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1)); }

/// Generators of the normal closure of `gens` (extended until closed under conjugation).
std::vector<std::size_t> normal_closure(const PcGroup& g, const Enumeration& en, std::vector<std::size_t> gens) {
  for (;;) {
    const auto members = subgroup(g, en, gens);
    bool grown = false;
    const std::size_t current = gens.size();
    for (std::size_t k = 0; k < current && !grown; ++k) {
      const Element s = g.element_at(gens[k]);
      for (std::size_t t = 0; t < g.rank(); ++t) {
        const std::size_t c = g.index(g.conjugate(s, g.generator(t)));
        if (!members[c]) {
          gens.push_back(c);
          grown = true;
          break;
        }
      }
    }
    if (!grown) return gens;
  }
}

Element top_element(const PcGroup& g) { return g.top() ? g.generator(*g.top()) : g.identity(); }

}  // namespace

std::size_t Enumeration::multiply(const PcGroup& g, std::size_t x, std::size_t y) const {
  const Element ye = g.element_at(y);
  for (std::size_t k = 0; k < ye.size(); ++k) {
    for (i64 e = 0; e < ye[k]; ++e) x = right_mul[k][x];
  }
  return x;
}

Enumeration enumerate(const PcGroup& g, i64 max_order) {
  require_bound(g, max_order);
  Enumeration en;
  en.size = static_cast<std::size_t>(g.order());
  en.right_mul.assign(g.rank(), std::vector<std::size_t>(en.size));
  for (std::size_t x = 0; x < en.size; ++x) {
    const Element xe = g.element_at(x);
    for (std::size_t k = 0; k < g.rank(); ++k) {
      Element y = xe;
      g.mul_gen(y, k);
      en.right_mul[k][x] = g.index(y);
    }
  }
  return en;
}

ConsistencyReport verify_consistency(const PcGroup& g, i64 max_order) {
  ConsistencyReport rep;
  rep.order = g.order();
  const Enumeration en = enumerate(g, max_order);
  const std::size_t n = en.size;

  std::vector<std::vector<std::size_t>> inv(g.rank(), std::vector<std::size_t>(n));
  for (std::size_t k = 0; k < g.rank(); ++k) {
    std::vector<char> hit(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t y = en.right_mul[k][x];
      if (hit[y]) {
        rep.witness = "right multiplication by " + g.name(k) + " is not a bijection (collision at " + g.format(g.element_at(y)) + ")";
        return rep;
      }
      hit[y] = 1;
      inv[k][y] = x;
    }
  }

  auto apply_word = [&](std::size_t x, const Word& w) {
    for (const auto& [gen, e] : w) {
      const auto& perm = e >= 0 ? en.right_mul[gen] : inv[gen];
      for (i64 t = 0; t < (e >= 0 ? e : -e); ++t) x = perm[x];
    }
    return x;
  };

  for (std::size_t x = 0; x < n; ++x) {
    if (apply_word(0, g.normal_word(g.element_at(x))) != x) {
      rep.witness = "normal form " + g.format(g.element_at(x)) + " does not collect to itself";
      return rep;
    }
  }

  for (std::size_t i = 0; i < g.rank(); ++i) {
    const Word lhs{{i, g.rel_order(i)}};
    for (std::size_t x = 0; x < n; ++x) {
      if (apply_word(x, lhs) != apply_word(x, g.power_word(i))) {
        rep.witness = "relator " + g.name(i) + "^" + std::to_string(g.rel_order(i)) + " = " + g.format(g.power_word(i)) +
                      " violated at " + g.format(g.element_at(x));
        return rep;
      }
    }
    for (std::size_t j = i + 1; j < g.rank(); ++j) {
      const Word conj{{i, -1}, {j, 1}, {i, 1}};
      Word rhs{{j, 1}};
      rhs.insert(rhs.end(), g.commutator_word(j, i).begin(), g.commutator_word(j, i).end());
      for (std::size_t x = 0; x < n; ++x) {
        if (apply_word(x, conj) != apply_word(x, rhs)) {
          rep.witness = "relator [" + g.name(j) + "," + g.name(i) + "] = " + g.format(g.commutator_word(j, i)) +
                        " violated at " + g.format(g.element_at(x));
          return rep;
        }
      }
    }
  }

  i64 exponent = 1;
  for (std::size_t y = 1; y < n; ++y) {
    std::size_t x = y;
    i64 k = 1;
    while (x != 0) {
      x = en.multiply(g, x, y);
      ++k;
    }
    exponent = std::lcm(exponent, k);
  }
  rep.exponent = exponent;
  rep.consistent = true;
  return rep;
}

int nilpotency_class(const PcGroup& g, i64 max_order) {
  const Enumeration en = enumerate(g, max_order);
  std::vector<std::size_t> current;
  for (std::size_t t = 0; t < g.rank(); ++t) current.push_back(g.index(g.generator(t)));
  int cls = 0;
  for (;;) {
    std::vector<std::size_t> comms;
    for (std::size_t t = 0; t < g.rank(); ++t) {
      for (std::size_t s : current) {
        const std::size_t c = g.index(g.commutator(g.generator(t), g.element_at(s)));
        if (c != 0) comms.push_back(c);
      }
    }
    ++cls;
    if (comms.empty()) return cls;
    current = normal_closure(g, en, comms);
    if (cls > 64) throw VerificationError("lower central series does not terminate");
  }
}

std::string format_failure(AbcWitness::Failure f) {
  switch (f) {
    case AbcWitness::Failure::None:
      return "ok";
    case AbcWitness::Failure::HNotAbelian:
      return "H not abelian";
    case AbcWitness::Failure::HNotNormal:
      return "H not normal";
    case AbcWitness::Failure::QuotientNotCyclic:
      return "quotient G/H not cyclic via top generator";
  }
  return "?";
}

AbcWitness check_abc(const PcGroup& g, i64 max_order) {
  AbcWitness w;
  const auto& h = g.h_generators();
  for (std::size_t x = 0; x < h.size(); ++x) {
    for (std::size_t y = x + 1; y < h.size(); ++y) {
      if (g.commutator(g.generator(h[x]), g.generator(h[y])) != g.identity()) {
        w.failure = AbcWitness::Failure::HNotAbelian;
        w.detail = "[" + g.name(h[x]) + "," + g.name(h[y]) + "] != 1";
        return w;
      }
    }
  }
  w.h_abelian = true;
  const Enumeration en = enumerate(g, max_order);
  std::vector<std::size_t> hidx;
  for (auto k : h) hidx.push_back(g.index(g.generator(k)));
  const auto members = subgroup(g, en, hidx);
  w.h_order = static_cast<i64>(count(members));
  for (auto k : h) {
    for (std::size_t t = 0; t < g.rank(); ++t) {
      const Element c = g.conjugate(g.generator(k), g.generator(t));
      if (!members[g.index(c)]) {
        w.failure = AbcWitness::Failure::HNotNormal;
        w.detail = g.name(k) + " conjugated by " + g.name(t) + " = " + g.format(c) + " lies outside H";
        return w;
      }
    }
  }
  w.h_normal = true;
  const Element alpha = top_element(g);
  auto with_top = hidx;
  with_top.push_back(g.index(alpha));
  if (static_cast<i64>(count(subgroup(g, en, with_top))) != g.order()) {
    w.failure = AbcWitness::Failure::QuotientNotCyclic;
    w.detail = "H together with the top generator does not generate G";
    return w;
  }
  w.quotient_cyclic = true;
  w.quotient_log = log_p_exact(g.order() / w.h_order, g.p());
  w.split = g.power(alpha, ipow(g.p(), static_cast<unsigned>(w.quotient_log))) == g.identity();
  i64 prod = 1;
  for (auto k : h) prod *= g.generator_order(k);
  w.h_basis = prod == w.h_order;
  if (!w.split) w.detail = "alpha^(p^a) != 1";
  return w;
}

HDecomposer::HDecomposer(const PcGroup& g, i64 max_order) : g_(&g) {
  require_bound(g, max_order);
  const auto& h = g.h_generators();
  for (auto k : h) orders_.push_back(g.generator_order(k));
  table_.assign(static_cast<std::size_t>(g.order()), {});
  std::vector<i64> c(h.size(), 0);
  // Odometer over the exponent box.
  for (;;) {
    Element e = g.identity();
    for (std::size_t t = 0; t < h.size(); ++t) e = g.multiply(e, g.power(g.generator(h[t]), c[t]));
    auto& slot = table_[g.index(e)];
    if (!slot.empty()) throw ScopeError("H generators are not independent (not a direct product basis)");
    slot = c;
    std::size_t t = 0;
    while (t < c.size() && ++c[t] == orders_[t]) c[t++] = 0;
    if (t == c.size()) break;
  }
}

std::optional<std::vector<i64>> HDecomposer::decompose(const Element& h) const {
  const auto& slot = table_.at(g_->index(h));
  if (slot.empty()) {
    if (h == g_->identity()) return std::vector<i64>(orders_.size(), 0);
    return std::nullopt;
  }
  return slot;
}

CommutatorData commutator_data(const PcGroup& g, i64 max_order) {
  const AbcWitness abc = check_abc(g, max_order);
  if (!abc.ok()) throw ScopeError("ABC check failed: " + format_failure(abc.failure) + " (" + abc.detail + ")");
  if (!abc.h_basis) throw ScopeError("H generators must form a direct-product basis of H");
  const int cls = nilpotency_class(g, max_order);
  if (cls > 2) throw ScopeError("nilpotency class " + std::to_string(cls) + " > 2");

  const HDecomposer dec(g, max_order);
  const auto& h = g.h_generators();
  const std::size_t s = h.size();
  const Element alpha = top_element(g);
  CommutatorData d;
  d.a = abc.quotient_log;
  for (auto k : h) d.h_log_orders.push_back(log_p_exact(g.generator_order(k), g.p()));
  d.exponent.assign(s, std::vector<i64>(s, 0));
  d.valuation.assign(s, std::vector<int>(s, -1));
  d.unit.assign(s, std::vector<i64>(s, 0));
  const i64 pa = ipow(g.p(), static_cast<unsigned>(d.a));
  for (std::size_t j = 0; j < s; ++j) {
    const Element gam = g.commutator(g.generator(h[j]), alpha);
    d.gamma.push_back(gam);
    const auto ex = dec.decompose(gam);
    if (!ex) throw VerificationError("[" + g.name(h[j]) + ", alpha] does not lie in H");
    Element rebuilt = g.identity();
    for (std::size_t i = 0; i < s; ++i) {
      const i64 c = (*ex)[i];
      d.exponent[i][j] = c;
      if (c != 0) {
        d.valuation[i][j] = valuation(c, g.p());
        d.unit[i][j] = c / ipow(g.p(), static_cast<unsigned>(d.valuation[i][j]));
        if (d.h_log_orders[i] - d.valuation[i][j] > d.a) {
          throw VerificationError("a_m - r_mj exceeds a for (m, j) = (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
        }
      }
      rebuilt = g.multiply(rebuilt, g.power(g.generator(h[i]), d.unit[i][j] * (c ? ipow(g.p(), static_cast<unsigned>(d.valuation[i][j])) : 0)));
    }
    if (rebuilt != gam) throw VerificationError("commutator decomposition does not reconstruct gamma_" + std::to_string(j + 1));
    if (g.power(gam, pa) != g.identity()) throw VerificationError("gamma_" + std::to_string(j + 1) + "^(p^a) != 1");
    if (cls == 2) {
      for (std::size_t t = 0; t < g.rank(); ++t) {
        if (g.commutator(gam, g.generator(t)) != g.identity()) d.central = false;
      }
      if (!d.central) throw VerificationError("gamma_" + std::to_string(j + 1) + " is not central in a class-2 group");
    }
  }
  return d;
}

}  // namespace noether
