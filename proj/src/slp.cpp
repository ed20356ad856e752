#include <cmath>
#include <random>

#include "noether/transform.hpp"

namespace noether {

Slp::Slp(std::size_t inputs) : inputs_(inputs) {
  for (std::size_t i = 0; i < inputs; ++i) push({Op::Input, i, 0, 0, 0, Root()}, {1, 0});
}

Slp::Node Slp::push(Instr ins, std::pair<i64, i64> deg) {
  ops_.push_back(std::move(ins));
  deg_.push_back(deg);
  return ops_.size() - 1;
}

Slp::Node Slp::input(std::size_t i) const {
  if (i >= inputs_) throw ArgumentError("SLP input out of range");
  return i;
}

Slp::Node Slp::constant(const Rational& c, const Root& r) { return push({Op::Const, 0, 0, 0, c, r}, {0, 0}); }
Slp::Node Slp::constant(const Rational& c) { return constant(c, Root()); }

Slp::Node Slp::add(Node a, Node b) {
  const auto [na, da] = deg_.at(a);
  const auto [nb, db] = deg_.at(b);
  return push({Op::Add, a, b, 0, 0, Root()}, {std::max(na + db, nb + da), da + db});
}

Slp::Node Slp::sub(Node a, Node b) {
  const auto [na, da] = deg_.at(a);
  const auto [nb, db] = deg_.at(b);
  return push({Op::Sub, a, b, 0, 0, Root()}, {std::max(na + db, nb + da), da + db});
}

Slp::Node Slp::mul(Node a, Node b) {
  const auto [na, da] = deg_.at(a);
  const auto [nb, db] = deg_.at(b);
  return push({Op::Mul, a, b, 0, 0, Root()}, {na + nb, da + db});
}

Slp::Node Slp::div(Node a, Node b) {
  const auto [na, da] = deg_.at(a);
  const auto [nb, db] = deg_.at(b);
  return push({Op::Div, a, b, 0, 0, Root()}, {na + db, da + nb});
}

Slp::Node Slp::pow(Node a, i64 e) {
  const auto [na, da] = deg_.at(a);
  const i64 m = e >= 0 ? e : -e;
  return push({Op::Pow, a, 0, e, 0, Root()}, e >= 0 ? std::pair{m * na, m * da} : std::pair{m * da, m * na});
}

Slp::Node Slp::monomial(const Monomial& m, const std::vector<Node>& vars) {
  Node acc = constant(1, m.coeff);
  for (std::size_t t = 0; t < m.exps.size(); ++t) {
    if (m.exps[t] == 0) continue;
    acc = mul(acc, m.exps[t] == 1 ? vars.at(t) : pow(vars.at(t), m.exps[t]));
  }
  return acc;
}

std::optional<std::vector<u64>> Slp::eval(const std::vector<u64>& point, const FFEmbedding& e) const {
  if (point.size() != inputs_) throw ArgumentError("SLP evaluation: wrong number of inputs");
  const u64 q = e.q;
  std::vector<u64> val(ops_.size());
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    const Instr& ins = ops_[k];
    switch (ins.op) {
      case Op::Input:
        val[k] = point[ins.a] % q;
        break;
      case Op::Const:
        val[k] = mulmod(rational_mod(ins.c, q), ins.r.is_one() ? 1 : e.embed(ins.r), q);
        break;
      case Op::Add:
        val[k] = (val[ins.a] + val[ins.b]) % q;
        break;
      case Op::Sub:
        val[k] = (val[ins.a] + q - val[ins.b]) % q;
        break;
      case Op::Mul:
        val[k] = mulmod(val[ins.a], val[ins.b], q);
        break;
      case Op::Div:
        if (val[ins.b] == 0) return std::nullopt;
        val[k] = mulmod(val[ins.a], powmod(val[ins.b], q - 2, q), q);
        break;
      case Op::Pow: {
        u64 base = val[ins.a];
        if (ins.e < 0) {
          if (base == 0) return std::nullopt;
          base = powmod(base, q - 2, q);
        }
        val[k] = powmod(base, static_cast<u64>(ins.e < 0 ? -ins.e : ins.e), q);
        break;
      }
    }
  }
  std::vector<u64> out;
  for (auto n : outputs_) out.push_back(val[n]);
  return out;
}

std::vector<Slp::Node> inline_slp(Slp& dst, const Slp& src, const std::vector<Slp::Node>& inputs) {
  if (inputs.size() != src.inputs()) throw ArgumentError("inline_slp: input count mismatch");
  std::vector<Slp::Node> map(src.size());
  for (std::size_t i = 0; i < src.inputs(); ++i) map[i] = inputs[i];
  src.replay(dst, map);
  std::vector<Slp::Node> out;
  for (auto n : src.outputs()) out.push_back(map[n]);
  return out;
}

void Slp::replay(Slp& dst, std::vector<Node>& map) const {
  for (std::size_t k = inputs_; k < ops_.size(); ++k) {
    const Instr& ins = ops_[k];
    switch (ins.op) {
      case Op::Input:
        break;
      case Op::Const:
        map[k] = dst.constant(ins.c, ins.r);
        break;
      case Op::Add:
        map[k] = dst.add(map[ins.a], map[ins.b]);
        break;
      case Op::Sub:
        map[k] = dst.sub(map[ins.a], map[ins.b]);
        break;
      case Op::Mul:
        map[k] = dst.mul(map[ins.a], map[ins.b]);
        break;
      case Op::Div:
        map[k] = dst.div(map[ins.a], map[ins.b]);
        break;
      case Op::Pow:
        map[k] = dst.pow(map[ins.a], ins.e);
        break;
    }
  }
}

PitVerdict pit_equal(const Slp& a, const Slp& b, const FFEmbedding& e, int trials, u64 seed) {
  if (a.inputs() != b.inputs()) throw ArgumentError("pit_equal: input counts differ");
  if (a.outputs().size() != b.outputs().size()) throw ArgumentError("pit_equal: output counts differ");
  if (trials < 1) throw ArgumentError("pit_equal: trials must be >= 1");
  PitVerdict v;
  i64 d = 1;
  for (std::size_t k = 0; k < a.outputs().size(); ++k) {
    const auto [na, da] = a.degree(a.outputs()[k]);
    const auto [nb, db] = b.degree(b.outputs()[k]);
    d = std::max(d, std::max(na + db, nb + da));
  }
  v.degree = d;
  v.log2_per_trial = std::log2(static_cast<double>(d)) - std::log2(static_cast<double>(e.q));
  std::mt19937_64 rng(seed);
  constexpr int kResampleBudget = 64;
  int misses = 0;
  while (v.trials < trials) {
    std::vector<u64> point(a.inputs());
    for (auto& x : point) x = rng() % e.q;
    const auto va = a.eval(point, e);
    const auto vb = b.eval(point, e);
    if (!va || !vb) {
      ++v.resamples;
      if (++misses > kResampleBudget) {
        v.outcome = PitVerdict::Outcome::Inconclusive;
        v.detail = "resample budget exhausted (denominator vanishes too often)";
        return v;
      }
      continue;
    }
    misses = 0;
    ++v.trials;
    for (std::size_t k = 0; k < va->size(); ++k) {
      if ((*va)[k] != (*vb)[k]) {
        v.outcome = PitVerdict::Outcome::Unequal;
        v.witness = point;
        v.detail = "output " + std::to_string(k) + " differs";
        return v;
      }
    }
  }
  v.outcome = PitVerdict::Outcome::Equal;
  v.log2_total = v.log2_per_trial * v.trials;
  return v;
}

}  // namespace noether
