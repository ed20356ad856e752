#include "noether/invariants.hpp"

#include <numeric>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace noether {

using boost::multiprecision::cpp_int;

namespace {

using BigMatrix = std::vector<std::vector<cpp_int>>;

i64 narrow(const cpp_int& v) {
  if (v > std::numeric_limits<i64>::max() || v < std::numeric_limits<i64>::min()) throw ScopeError("integer overflow in lattice computation");
  return static_cast<i64>(v);
}

cpp_int floor_div(const cpp_int& a, const cpp_int& b) {
  cpp_int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

void DiagonalAction::validate() const {
  if (chars.size() != orders.size()) throw ArgumentError("one order per generator required");
  for (std::size_t j = 0; j < chars.size(); ++j) {
    if (orders[j] < 1) throw ArgumentError("generator orders must be positive");
    if (chars[j].size() != vars()) throw ArgumentError("every generator needs one exponent per variable");
  }
}

IntMatrix mat_mul(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t inner = b.size();
  IntMatrix r(a.size(), std::vector<i64>(inner ? b[0].size() : 0, 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < r[i].size(); ++j) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

HnfResult hnf(const IntMatrix& M) {
  const std::size_t m = M.size();
  const std::size_t n = m ? M[0].size() : 0;
  BigMatrix h(m, std::vector<cpp_int>(n)), u(m, std::vector<cpp_int>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    if (M[i].size() != n) throw ArgumentError("hnf: ragged matrix");
    for (std::size_t j = 0; j < n; ++j) h[i][j] = M[i][j];
    u[i][i] = 1;
  }
  auto combine = [&](std::size_t r1, std::size_t r2, const cpp_int& a, const cpp_int& b, const cpp_int& c, const cpp_int& d) {
    // (r1, r2) <- (a r1 + b r2, c r1 + d r2)
    for (auto* mat : {&h, &u}) {
      auto& x = (*mat)[r1];
      auto& y = (*mat)[r2];
      for (std::size_t j = 0; j < x.size(); ++j) {
        const cpp_int nx = a * x[j] + b * y[j];
        const cpp_int ny = c * x[j] + d * y[j];
        x[j] = nx;
        y[j] = ny;
      }
    }
  };
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    for (std::size_t r = row + 1; r < m; ++r) {
      if (h[r][col] == 0) continue;
      // extended gcd on (h[row][col], h[r][col])
      cpp_int a = h[row][col], b = h[r][col];
      cpp_int x0 = 1, x1 = 0, y0 = 0, y1 = 1;
      while (b != 0) {
        const cpp_int q = floor_div(a, b);
        cpp_int t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
        t = y0 - q * y1;
        y0 = y1;
        y1 = t;
      }
      // x0 * p + y0 * s = a = gcd; (x1, y1) annihilates the pair
      combine(row, r, x0, y0, x1, y1);
    }
    if (h[row][col] == 0) continue;
    ++row;
  }
  // positive pivots and reduction above
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < m; ++col) {
    if (h[r][col] == 0) continue;
    if (h[r][col] < 0) {
      for (auto* mat : {&h, &u})
        for (auto& v : (*mat)[r]) v = -v;
    }
    for (std::size_t above = 0; above < r; ++above) {
      const cpp_int q = floor_div(h[above][col], h[r][col]);
      if (q == 0) continue;
      for (auto* mat : {&h, &u})
        for (std::size_t j = 0; j < (*mat)[above].size(); ++j) (*mat)[above][j] -= q * (*mat)[r][j];
    }
    ++r;
  }
  HnfResult res;
  res.H.assign(m, std::vector<i64>(n));
  res.U.assign(m, std::vector<i64>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) res.H[i][j] = narrow(h[i][j]);
    for (std::size_t j = 0; j < m; ++j) res.U[i][j] = narrow(u[i][j]);
  }
  return res;
}

IntMatrix invariant_lattice(const DiagonalAction& d) {
  d.validate();
  const std::size_t n = d.vars(), r = d.chars.size();
  // rows [C^T | I_n] and [diag(orders) | 0]; kernel rows have zeros in the first r columns
  IntMatrix A;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<i64> row(r + n, 0);
    for (std::size_t j = 0; j < r; ++j) row[j] = mod(d.chars[j][v], d.orders[j]);
    row[r + v] = 1;
    A.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < r; ++j) {
    std::vector<i64> row(r + n, 0);
    row[j] = d.orders[j];
    A.push_back(std::move(row));
  }
  const IntMatrix H = hnf(A).H;
  IntMatrix basis;
  for (const auto& row : H) {
    bool kernel = true;
    for (std::size_t j = 0; j < r; ++j) kernel &= row[j] == 0;
    bool zero = true;
    for (std::size_t v = 0; v < n; ++v) zero &= row[r + v] == 0;
    if (kernel && !zero) basis.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(r), row.end());
  }
  if (basis.size() != n) throw VerificationError("invariant lattice does not have full rank");
  return basis;
}

i64 lattice_index(const IntMatrix& basis) {
  i64 det = 1;
  std::size_t col = 0;
  for (const auto& row : basis) {
    while (col < row.size() && row[col] == 0) ++col;
    if (col == row.size()) return 0;
    det *= row[col++];
  }
  return det;
}

bool is_invariant(const DiagonalAction& d, const std::vector<i64>& m) {
  for (std::size_t j = 0; j < d.chars.size(); ++j) {
    __int128 acc = 0;
    for (std::size_t v = 0; v < m.size(); ++v) acc += static_cast<__int128>(d.chars[j][v]) * m[v];
    if (acc % d.orders[j] != 0) return false;
  }
  return true;
}

bool in_lattice(const IntMatrix& basis, const std::vector<i64>& m) {
  std::vector<i64> rest = m;
  std::size_t col = 0;
  for (const auto& row : basis) {
    while (col < row.size() && row[col] == 0) {
      if (rest[col] != 0) return false;
      ++col;
    }
    if (col == row.size()) break;
    if (rest[col] % row[col] != 0) return false;
    const i64 q = rest[col] / row[col];
    for (std::size_t j = col; j < row.size(); ++j) rest[j] -= q * row[j];
    ++col;
  }
  for (auto x : rest) {
    if (x != 0) return false;
  }
  return true;
}

IntMatrix fixed_generators(const DiagonalAction& d) {
  IntMatrix basis = invariant_lattice(d);
  for (const auto& row : basis) {
    if (!is_invariant(d, row)) throw VerificationError("lattice basis monomial is not invariant");
  }
  return basis;
}

BruteReport brute_check(const DiagonalAction& d, const IntMatrix& basis, i64 box) {
  BruteReport rep;
  for (const auto& row : basis) {
    if (!is_invariant(d, row)) {
      rep.witness = "basis row not invariant";
      return rep;
    }
  }
  const std::size_t n = d.vars();
  std::vector<i64> m(n, -box);
  for (;;) {
    ++rep.checked;
    if (is_invariant(d, m) && !in_lattice(basis, m)) {
      rep.witness = "invariant exponent (";
      for (std::size_t v = 0; v < n; ++v) rep.witness += (v ? "," : "") + std::to_string(m[v]);
      rep.witness += ") outside the lattice";
      return rep;
    }
    std::size_t k = 0;
    while (k < n && m[k] == box) m[k++] = -box;
    if (k == n) break;
    ++m[k];
  }
  rep.ok = true;
  return rep;
}

DiagonalAction diagonal_from_action(const GroupAction& a) {
  DiagonalAction d;
  for (std::size_t k = 0; k < a.gens.size(); ++k) {
    const MonomialMap& f = a.gens[k];
    i64 ord = 1;
    for (std::size_t v = 0; v < f.size(); ++v) {
      if (f.target(v) != v) throw ArgumentError("action of " + a.group->name(k) + " is not diagonal");
      ord = std::lcm(ord, f.coeff(v).order());
    }
    std::vector<i64> row;
    for (std::size_t v = 0; v < f.size(); ++v) row.push_back(f.coeff(v).k / (a.level / ord));
    d.chars.push_back(std::move(row));
    d.orders.push_back(ord);
  }
  return d;
}

DiagonalAction parse_diagonal_spec(std::string_view text) {
  DiagonalAction d;
  std::stringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  long long n = -1;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    std::stringstream ls(raw);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "vars") {
      std::string eq;
      if (n >= 0) throw ParseError(line, "duplicate 'vars'");
      if (!(ls >> eq >> n) || eq != "=" || n < 0) throw ParseError(line, "expected 'vars = n'");
      continue;
    }
    if (head != "gen") throw ParseError(line, "expected 'vars = n' or 'gen <order>: exponents'");
    if (n < 0) throw ParseError(line, "'vars' must come first");
    std::string ord_text;
    if (!(ls >> ord_text) || ord_text.back() != ':') throw ParseError(line, "expected 'gen <order>:'");
    ord_text.pop_back();
    i64 ord = 0;
    try {
      ord = std::stoll(ord_text);
    } catch (const std::exception&) {
      throw ParseError(line, "bad order '" + ord_text + "'");
    }
    if (ord < 1) throw ParseError(line, "order must be positive");
    std::vector<i64> row;
    long long e;
    while (ls >> e) row.push_back(mod(e, ord));
    if (!ls.eof()) throw ParseError(line, "bad exponent");
    if (row.size() != static_cast<std::size_t>(n)) throw ParseError(line, "expected " + std::to_string(n) + " exponents");
    d.chars.push_back(std::move(row));
    d.orders.push_back(ord);
  }
  if (n < 0) throw ParseError(line, "missing 'vars = n'");
  if (d.chars.empty()) {
    // no generators: trivial action on n variables
    d.chars.push_back(std::vector<i64>(static_cast<std::size_t>(n), 0));
    d.orders.push_back(1);
  }
  return d;
}

}  // namespace noether
