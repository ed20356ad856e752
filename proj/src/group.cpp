#include "noether/group.hpp"

#include <algorithm>
#include <sstream>

namespace noether {

PcGroup::PcGroup(i64 p, std::vector<std::string> names, std::vector<int> rel_exponents,
                 std::vector<Word> powers, std::vector<std::vector<Word>> commutators,
                 std::vector<std::size_t> h_generators, std::optional<std::size_t> top,
                 std::optional<FamilyParams> family)
    : p_(p),
      names_(std::move(names)),
      rel_exp_(std::move(rel_exponents)),
      powers_(std::move(powers)),
      comms_(std::move(commutators)),
      h_gens_(std::move(h_generators)),
      top_(top),
      family_(std::move(family)) {
  const std::size_t n = names_.size();
  if (p_ < 2 || prime_factors(p_) != std::vector<i64>{p_}) throw ArgumentError("p must be prime");
  if (rel_exp_.size() != n) throw ArgumentError("one relative order per generator required");
  powers_.resize(n);
  comms_.resize(n);
  for (auto& row : comms_) row.resize(n);
  stride_.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (rel_exp_[i] < 1) throw ArgumentError("relative order of " + names_[i] + " must be a positive power of p");
    rel_order_.push_back(ipow(p_, static_cast<unsigned>(rel_exp_[i])));
  }
  for (std::size_t i = n; i-- > 0;) {
    if (i + 1 < n) stride_[i] = stride_[i + 1] * static_cast<std::size_t>(rel_order_[i + 1]);
    if (__builtin_mul_overflow(order_, rel_order_[i], &order_)) throw ScopeError("group order overflow");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [gen, e] : powers_[i]) {
      if (gen <= i) throw ArgumentError("power relation of " + names_[i] + " must use later generators only");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      for (const auto& [gen, e] : comms_[j][i]) {
        if (gen <= i) {
          throw ArgumentError("commutator [" + names_[j] + "," + names_[i] +
                              "] must be a word in generators after " + names_[i]);
        }
      }
    }
  }
  for (auto h : h_gens_) {
    if (h >= n) throw ArgumentError("H generator out of range");
  }
  if (top_ && *top_ >= n) throw ArgumentError("top generator out of range");
  build_tables();
}

std::optional<std::size_t> PcGroup::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

Element PcGroup::generator(std::size_t i) const {
  Element e = identity();
  e.at(i) = 1;
  return e;
}

namespace {
constexpr i64 kTableLimit = i64{1} << 24;
}

void PcGroup::build_tables() {
  const std::size_t n = rank();
  power_elem_.assign(n, identity());
  conj_.assign(n, std::vector<Element>(n));
  gen_inverse_.assign(n, identity());
  gen_order_.assign(n, 1);
  tabled_ = order_ <= kTableLimit;
  if (tabled_) right_.assign(n, {});
  // Generators are processed from the last one down: everything needed to
  // collect words in g_{i+1}..g_n is ready before g_i is handled.
  for (std::size_t i = n; i-- > 0;) {
    power_elem_[i] = collect(powers_[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      Word w{{j, 1}};
      w.insert(w.end(), comms_[j][i].begin(), comms_[j][i].end());
      conj_[i][j] = collect(w);
    }
    if (tabled_) build_regular_tables(i);
    Element x = generator(i);
    const Element one = identity();
    Element prev = one;
    i64 k = 1;
    while (x != one) {
      prev = x;
      mul_gen(x, i);
      if (++k > order_) throw VerificationError("generator " + names_[i] + " has no finite order (inconsistent presentation)");
    }
    gen_order_[i] = k;
    gen_inverse_[i] = (k == 1) ? one : prev;
  }
}

// B in <g_i..g_n> is g_i^b C with C in <g_{i+1}..g_n>, and B g_i = g_i^{b+1} phi(C)
// where phi is conjugation by g_i.  phi is filled by peeling the last letter of C.
void PcGroup::build_regular_tables(std::size_t i) {
  const std::size_t inner = stride_[i];
  const std::size_t size = inner * static_cast<std::size_t>(rel_order_[i]);
  std::vector<std::uint32_t> phi(inner, 0);
  for (std::size_t c = 1; c < inner; ++c) {
    std::size_t j = rank() - 1;
    while ((c / stride_[j]) % static_cast<std::size_t>(rel_order_[j]) == 0) --j;
    phi[c] = static_cast<std::uint32_t>(rm_elem(phi[c - stride_[j]], conj_[i][j]));
  }
  const std::size_t w = index(power_elem_[i]);
  auto& r = right_[i];
  r.resize(size);
  for (std::size_t bidx = 0; bidx < size; ++bidx) {
    const std::size_t b = bidx / inner, c = bidx % inner;
    if (b + 1 < static_cast<std::size_t>(rel_order_[i])) {
      r[bidx] = static_cast<std::uint32_t>((b + 1) * inner + phi[c]);
    } else {
      r[bidx] = static_cast<std::uint32_t>(rm_elem(w, element_at(phi[c])));
    }
  }
}

std::size_t PcGroup::rm(std::size_t i, std::size_t x) const {
  const std::size_t s = stride_[i] * static_cast<std::size_t>(rel_order_[i]);
  const std::size_t low = x % s;
  return x - low + right_[i][low];
}

std::size_t PcGroup::rm_elem(std::size_t x, const Element& y) const {
  for (std::size_t k = 0; k < y.size(); ++k) {
    for (i64 e = 0; e < y[k]; ++e) x = rm(k, x);
  }
  return x;
}

void PcGroup::mul_elem(Element& x, const Element& y) const {
  if (tabled_) {
    x = element_at(rm_elem(index(x), y));
    return;
  }
  for (std::size_t k = 0; k < y.size(); ++k) {
    for (i64 e = 0; e < y[k]; ++e) mul_gen(x, k);
  }
}

void PcGroup::mul_gen(Element& x, std::size_t i) const {
  if (tabled_) {
    x = element_at(rm(i, index(x)));
  } else {
    mul_gen_slow(x, i);
  }
}

void PcGroup::mul_gen_slow(Element& x, std::size_t i) const {
  const std::size_t n = rank();
  Element tail(n, 0);
  bool has_tail = false;
  for (std::size_t j = i + 1; j < n; ++j) {
    tail[j] = x[j];
    has_tail |= x[j] != 0;
    x[j] = 0;
  }
  if (++x[i] == rel_order_[i]) {
    x[i] = 0;
    mul_elem(x, power_elem_[i]);
  }
  if (!has_tail) return;
  // x * g_i = (prefix * g_i) * (tail conjugated by g_i)
  for (std::size_t j = i + 1; j < n; ++j) {
    for (i64 e = 0; e < tail[j]; ++e) mul_elem(x, conj_[i][j]);
  }
}

Element PcGroup::multiply(const Element& x, const Element& y) const {
  Element r = x;
  mul_elem(r, y);
  return r;
}

Element PcGroup::collect(const Word& w) const {
  Element x = identity();
  for (const auto& [gen, e] : w) {
    if (gen >= rank()) throw ArgumentError("word letter out of range");
    if (e >= 0) {
      const i64 reps = gen_order_.empty() ? e : e % gen_order_[gen];
      for (i64 k = 0; k < reps; ++k) mul_gen(x, gen);
    } else {
      const i64 reps = (-e) % gen_order_[gen];
      for (i64 k = 0; k < reps; ++k) mul_elem(x, gen_inverse_[gen]);
    }
  }
  return x;
}

Word PcGroup::normal_word(const Element& x) const {
  Word w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0) w.emplace_back(i, x[i]);
  }
  return w;
}

Element PcGroup::inverse(const Element& x) const {
  Element r = identity();
  for (std::size_t i = x.size(); i-- > 0;) {
    for (i64 e = 0; e < x[i]; ++e) mul_elem(r, gen_inverse_[i]);
  }
  return r;
}

Element PcGroup::power(const Element& x, i64 n) const {
  Element base = n >= 0 ? x : inverse(x);
  Element r = identity();
  for (i64 k = 0; k < (n >= 0 ? n : -n); ++k) mul_elem(r, base);
  return r;
}

Element PcGroup::commutator(const Element& x, const Element& y) const {
  Element r = inverse(x);
  mul_elem(r, inverse(y));
  mul_elem(r, x);
  mul_elem(r, y);
  return r;
}

Element PcGroup::conjugate(const Element& x, const Element& by) const {
  Element r = inverse(by);
  mul_elem(r, x);
  mul_elem(r, by);
  return r;
}

std::size_t PcGroup::index(const Element& x) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) idx += static_cast<std::size_t>(x[i]) * stride_[i];
  return idx;
}

Element PcGroup::element_at(std::size_t idx) const {
  Element x(rank(), 0);
  for (std::size_t i = 0; i < rank(); ++i) {
    x[i] = static_cast<i64>(idx / stride_[i]);
    idx %= stride_[i];
  }
  return x;
}

std::string PcGroup::format(const Word& w) const {
  if (w.empty()) return "1";
  std::ostringstream os;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) os << '*';
    os << names_[w[k].first];
    if (w[k].second != 1) os << '^' << w[k].second;
  }
  return os.str();
}

std::string PcGroup::format(const Element& x) const { return format(normal_word(x)); }

PcGroup make_family_group(const FamilyParams& f) {
  if (f.a < 1 || f.b < 1 || f.c < 1) throw ArgumentError("family parameters a, b, c must be >= 1");
  if (f.s_or_r < 1) throw ArgumentError("family parameter s (or r) must be >= 1");
  const std::size_t A = 0, B = 1, C = 2;
  std::vector<std::vector<Word>> comms(3, std::vector<Word>(3));
  const i64 pb = ipow(f.p, static_cast<unsigned>(f.b));
  const i64 x = mod(f.x, pb);
  const i64 ps = ipow(f.p, static_cast<unsigned>(f.s_or_r));
  if (f.kind == FamilyParams::Kind::G1) {
    // [beta, alpha] = 1, [gamma, alpha] = beta^x gamma^{p^s}
    if (x) comms[C][A].emplace_back(B, x);
    comms[C][A].emplace_back(C, ps);
  } else {
    // [beta, alpha] = beta^{p^r}, [gamma, alpha] = beta^x
    comms[B][A].emplace_back(B, ps);
    if (x) comms[C][A].emplace_back(B, x);
  }
  return PcGroup(f.p, {"alpha", "beta", "gamma"}, {f.a, f.b, f.c}, {}, std::move(comms), {B, C}, A, f);
}

std::string format_group_spec(const PcGroup& g) {
  std::ostringstream os;
  if (const auto& f = g.family()) {
    os << "family = " << (f->kind == FamilyParams::Kind::G1 ? "G1" : "G2") << "\nparams = " << f->p << ',' << f->a << ',' << f->b << ','
       << f->c << ',' << f->s_or_r << ',' << f->x << '\n';
    return os.str();
  }
  auto list = [&](const auto& idx) {
    std::string out;
    for (auto i : idx) out += (out.empty() ? "" : ", ") + g.name(i);
    return out;
  };
  std::vector<std::size_t> all(g.rank());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  os << "p = " << g.p() << "\ngenerators = " << list(all) << "\norders = ";
  for (std::size_t i = 0; i < g.rank(); ++i) os << (i ? ", " : "") << g.rel_order(i);
  os << "\nH = " << list(g.h_generators()) << "\ntop = " << (g.top() ? g.name(*g.top()) : std::string("1")) << '\n';
  std::string powers, comms;
  for (std::size_t i = 0; i < g.rank(); ++i) {
    if (!g.power_word(i).empty()) powers += "  " + g.name(i) + "^" + std::to_string(g.rel_order(i)) + " = " + g.format(g.power_word(i)) + "\n";
  }
  for (std::size_t j = 0; j < g.rank(); ++j)
    for (std::size_t i = 0; i < j; ++i) {
      if (!g.commutator_word(j, i).empty()) comms += "  [" + g.name(j) + ", " + g.name(i) + "] = " + g.format(g.commutator_word(j, i)) + "\n";
    }
  if (!powers.empty()) os << "powers:\n" << powers;
  if (!comms.empty()) os << "commutators:\n" << comms;
  return os.str();
}

}  // namespace noether
