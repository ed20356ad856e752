#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "noether/certificate.hpp"

namespace fs = std::filesystem;
using namespace noether;
using nlohmann::json;

namespace {

constexpr int kVerified = 0, kIncomplete = 1, kInputError = 2;

struct Common {
  PipelineOptions opt;
  std::string emit;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ArgumentError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& target, const std::string& text) {
  if (target == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(target);
  if (!out) throw ArgumentError("cannot write " + target);
  out << text;
}

int exit_code(Certificate::Status s) {
  switch (s) {
    case Certificate::Status::Verified: return kVerified;
    case Certificate::Status::InputError: return kInputError;
    default: return kIncomplete;
  }
}

std::string bound_text(double b) {
  if (!std::isfinite(b)) return "none";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << b;
  return os.str();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--trials", c.opt.trials, "PIT evaluation points per identity")->envname("NOETHER_TRIALS")->check(CLI::Range(1, 64));
  sub->add_option("--prime-bits", c.opt.prime_bits, "size of the evaluation primes")->envname("NOETHER_PRIME_BITS")->check(CLI::Range(16, 62));
  sub->add_option("--seed", c.opt.seed, "session seed")->envname("NOETHER_SEED");
  sub->add_option("--max-order", c.opt.max_order, "largest group order handled by enumeration")
      ->envname("NOETHER_MAX_ORDER")
      ->check(CLI::PositiveNumber);
  sub->add_option("--emit", c.emit, "certificate output (file, '-' for stdout, directory for suite)")->envname("NOETHER_EMIT");
}

Certificate load_and_run(const std::string& text, const std::string& name, const PipelineOptions& opt) {
  std::shared_ptr<const PcGroup> g;
  try {
    g = std::make_shared<const PcGroup>(parse_group_spec(text));
  } catch (const std::exception& e) {
    Certificate c;
    c.options = opt;
    c.group.name = name;
    c.status = Certificate::Status::InputError;
    c.message = e.what();
    return c;
  }
  return run_pipeline(g, name, opt);
}

int cmd_check(const Common& c, const std::string& path) {
  std::string text;
  try {
    text = slurp(path);
  } catch (const ArgumentError& e) {
    std::cerr << "noether: " << e.what() << "\n";
    return kInputError;
  }
  const std::string name = fs::path(path).stem().string();
  const Certificate cert = load_and_run(text, name, c.opt);
  std::ostream& out = c.emit == "-" ? std::cerr : std::cout;
  out << name << ": " << status_name(cert.status) << ", terminal " << terminal_name(cert.terminal.kind) << ", " << cert.steps.size()
      << " steps, log2 error bound " << bound_text(cert.log2_error_bound()) << "\n";
  if (cert.status != Certificate::Status::Verified) std::cerr << "noether: " << name << ": " << cert.message << "\n";
  if (!c.emit.empty() && cert.status != Certificate::Status::InputError) write_text(c.emit, certificate_dump(cert, text));
  return exit_code(cert.status);
}

struct SuiteEntry {
  std::string name;
  std::string text;
  Certificate cert;
};

int cmd_suite(const Common& c, const std::string& groups, const std::string& manifest, const std::string& filter, unsigned jobs) {
  std::vector<SuiteEntry> entries;
  try {
    std::istringstream list(slurp(manifest));
    std::string line;
    while (std::getline(list, line)) {
      line.erase(0, line.find_first_not_of(" \t"));
      line.erase(line.find_last_not_of(" \t\r") + 1);
      if (line.empty() || line[0] == '#') continue;
      SuiteEntry e;
      e.name = line;
      e.text = slurp(fs::path(groups) / (line + ".grp"));
      if (!filter.empty()) {
        std::string hay = lower(e.name);
        const auto fam = e.text.find("family = ");
        if (fam != std::string::npos) hay += " " + lower(e.text.substr(fam + 9, 2));
        if (hay.find(lower(filter)) == std::string::npos) continue;
      }
      entries.push_back(std::move(e));
    }
  } catch (const ArgumentError& e) {
    std::cerr << "noether: " << e.what() << "\n";
    return kInputError;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) entries[i].cert = load_and_run(entries[i].text, entries[i].name, c.opt);
  };
  std::vector<std::thread> pool;
  const unsigned n = std::max(1u, std::min<unsigned>(jobs ? jobs : std::thread::hardware_concurrency(), static_cast<unsigned>(entries.size())));
  for (unsigned t = 0; t < n && !entries.empty(); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (!c.emit.empty()) fs::create_directories(c.emit);
  int verified = 0;
  double worst = -std::numeric_limits<double>::infinity();
  std::cout << std::left << std::setw(22) << "group" << std::setw(12) << "status" << std::setw(20) << "terminal" << std::setw(7) << "steps"
            << std::setw(8) << "cyclic" << "log2 bound\n";
  for (const auto& e : entries) {
    const Certificate& k = e.cert;
    verified += k.status == Certificate::Status::Verified;
    worst = std::max(worst, k.log2_error_bound());
    std::cout << std::setw(22) << e.name << std::setw(12) << status_name(k.status) << std::setw(20) << terminal_name(k.terminal.kind)
              << std::setw(7) << k.steps.size() << std::setw(8) << k.count_node(node::kLemma24) << bound_text(k.log2_error_bound()) << "\n";
    if (k.status != Certificate::Status::Verified) std::cerr << "noether: " << e.name << ": " << k.message << "\n";
    if (!c.emit.empty()) write_text((fs::path(c.emit) / (e.name + ".cert.json")).string(), certificate_dump(k, e.text));
  }
  std::cout << entries.size() << " groups, " << verified << " verified, worst log2 bound " << bound_text(worst) << "\n";
  return verified == static_cast<int>(entries.size()) ? kVerified : kIncomplete;
}

int cmd_lemma24(const Common& c, int n) {
  CycleReport r;
  try {
    r = verify_cycle_linearization(n, c.opt);
  } catch (const ArgumentError& e) {
    std::cerr << "noether: " << e.what() << "\n";
    return kInputError;
  }
  const bool ok = r.invertible && r.diagonal;
  std::cout << "cycle n = " << n << ": " << (ok ? "verified" : "failed") << ", invertible " << (r.invertible ? "yes" : "no")
            << ", tau(s_i) = xi^i s_i " << (r.diagonal ? "yes" : "no") << ", " << r.pit.size() << " PIT verdicts, log2 error bound "
            << bound_text(r.log2_error_bound()) << "\n";
  if (!ok) std::cerr << "noether: " << r.detail << "\n";
  if (!c.emit.empty()) {
    json pit = json::array();
    for (const auto& v : r.pit) pit.push_back({{"equal", v.equal()}, {"degree", v.degree}, {"trials", v.trials}, {"log2_total", v.log2_total}});
    const double b = r.log2_error_bound();
    const json j = {{"n", n}, {"level", r.level}, {"invertible", r.invertible}, {"diagonal", r.diagonal}, {"pit", pit},
                    {"error_bound_log2", std::isfinite(b) ? json(b) : json(nullptr)}, {"seed", c.opt.seed}};
    write_text(c.emit, j.dump(2) + "\n");
  }
  return ok ? kVerified : kIncomplete;
}

int cmd_invariants(const Common& c, const std::string& path, i64 box) {
  DiagonalAction d;
  try {
    d = parse_diagonal_spec(slurp(path));
  } catch (const std::exception& e) {
    std::cerr << "noether: " << path << ": " << e.what() << "\n";
    return kInputError;
  }
  const std::size_t n = d.chars.empty() ? 0 : d.chars[0].size();
  const IntMatrix basis = fixed_generators(d);
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < n; ++i) vars.push_back({"y", {static_cast<i64>(i) + 1}, "input"});
  const VarSpace vs(vars);
  std::vector<std::string> gens;
  for (const auto& row : basis) gens.push_back(format_monomial(Monomial{Root::one(1), row}, vs));
  const BruteReport br = brute_check(d, basis, box);
  for (const auto& g : gens) std::cout << g << "\n";
  std::cout << "index " << lattice_index(basis) << ", brute check in [-" << box << ", " << box << "]^" << n << ": "
            << (br.ok ? "ok" : "FAILED " + br.witness) << "\n";
  if (!c.emit.empty()) {
    const json j = {{"generators", gens}, {"lattice", basis}, {"index", lattice_index(basis)}, {"brute_box", box}, {"brute_ok", br.ok}};
    write_text(c.emit, j.dump(2) + "\n");
  }
  return br.ok ? kVerified : kIncomplete;
}

int cmd_recheck(const std::string& path) {
  json j;
  try {
    j = json::parse(slurp(path));
  } catch (const std::exception& e) {
    std::cerr << "noether: " << path << ": " << e.what() << "\n";
    return kInputError;
  }
  const RecheckReport r = recheck_certificate(j);
  std::cout << path << ": " << (r.ok ? "ok" : "FAILED") << ", " << r.steps_checked << " steps re-verified\n";
  for (const auto& f : r.failures) std::cerr << "noether: " << f << "\n";
  return r.ok ? kVerified : kIncomplete;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noether: verified linearization certificates for p-group actions"};
  app.require_subcommand(1);
  Common common;

  std::string spec;
  auto* check = app.add_subcommand("check", "run the pipeline on one group spec");
  check->add_option("spec", spec, "group spec file")->required();
  add_common(check, common);

  std::string groups = NOETHER_DATA_DIR "/groups", manifest = NOETHER_DATA_DIR "/suite.txt", filter;
  unsigned jobs = 0;
  auto* suite = app.add_subcommand("suite", "run every bundled group");
  suite->add_option("--groups", groups, "directory of .grp files");
  suite->add_option("--manifest", manifest, "list of group names");
  suite->add_option("--filter", filter, "case-insensitive substring of the name or family (G1, G2)");
  suite->add_option("--jobs", jobs, "worker threads (0 = hardware)");
  add_common(suite, common);

  int n = 0;
  auto* lemma = app.add_subcommand("lemma24", "check the cyclic linearization for C_n");
  lemma->add_option("--n", n, "cycle length (prime power >= 2)")->required();
  add_common(lemma, common);

  std::string diag;
  i64 box = 2;
  auto* inv = app.add_subcommand("invariants", "fixed-field generators of a diagonal action");
  inv->add_option("spec", diag, "diagonal spec file")->required();
  inv->add_option("--box", box, "brute check box")->check(CLI::Range(0, 8));
  add_common(inv, common);

  std::string cert_path;
  auto* recheck = app.add_subcommand("recheck", "re-verify a certificate document");
  recheck->add_option("certificate", cert_path, "certificate JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }
  try {
    if (*check) return cmd_check(common, spec);
    if (*suite) return cmd_suite(common, groups, manifest, filter, jobs);
    if (*lemma) return cmd_lemma24(common, n);
    if (*recheck) return cmd_recheck(cert_path);
    return cmd_invariants(common, diag, box);
  } catch (const std::exception& e) {
    std::cerr << "noether: " << e.what() << "\n";
    return kIncomplete;
  }
}
