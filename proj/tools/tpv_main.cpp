// Command-line front end: run and sample cost-modeled RAM programs, verify
// the stability/privacy claim suite, and certify delay distributions.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpv/asmio.hpp"
#include "tpv/suite.hpp"

namespace {

using nlohmann::json;
using namespace tpv;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

std::vector<Int> parse_input_list(const std::string& s) {
  std::vector<Int> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    if (cur.empty()) continue;
    out.emplace_back(cur);
  }
  return out;
}

Program load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open program file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Program p = parse_program(ss.str());
  auto diags = validate_program(p);
  if (!diags.empty()) {
    std::string msg = "program fails validation:";
    for (const auto& d : diags)
      msg += "\n  line " + std::to_string(d.line) + ": " + d.message;
    throw std::runtime_error(msg);
  }
  return p;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

json record_to_json(const CheckRecord& rec) {
  json values = json::object();
  for (const auto& [k, v] : rec.values) values[k] = v;
  json j{{"check", rec.name},
         {"claim", rec.claim},
         {"verdict", rec.pass ? "pass" : "fail"},
         {"expected_negative", rec.expected_negative},
         {"witness", rec.witness},
         {"values", values}};
  if (rec.elapsed_ms >= 0) j["elapsed_ms"] = rec.elapsed_ms;
  return j;
}

SuiteConfig read_config(const std::string& path) {
  SuiteConfig cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto cut = raw.find_first_of(";#");
    std::string line = detail_asm::trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail_asm::trim(line.substr(0, eq));
    std::string val = detail_asm::trim(line.substr(eq + 1));
    if (key == "check")
      cfg.checks.push_back(val);
    else if (key == "seed")
      cfg.seed = std::stoull(val);
    else if (key == "max_rand_branches")
      cfg.max_rand_branches = static_cast<unsigned>(std::stoul(val));
    else if (key == "max_steps")
      cfg.max_steps = std::stoull(val);
    else if (key == "samples")
      cfg.samples = std::stoull(val);
    else if (key == "corpus_size")
      cfg.corpus_size = static_cast<unsigned>(std::stoul(val));
    else if (key == "jobs")
      cfg.jobs = std::stoi(val);
    else if (key == "timings")
      cfg.timings = val == "1" || val == "true";
    else
      throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" + key +
                               "'");
  }
  return cfg;
}

int cmd_run(const std::string& file, const std::string& input_csv, std::uint64_t seed,
            std::uint64_t max_steps) {
  Program p = load_program(file);
  std::vector<Int> input = parse_input_list(input_csv);
  RunLimits lim;
  lim.max_steps = max_steps;
  ExecResult res = run_sampled(p, input, make_env(input), seed, lim);
  std::cout << "program: " << p.name << "\n";
  std::cout << "output:";
  for (const auto& v : res.output) std::cout << " " << v;
  std::cout << "\nruntime: " << res.runtime << "\n";
  return kExitOk;
}

int cmd_sample(const std::string& file, const std::string& input_csv, std::uint64_t n,
               std::uint64_t seed, bool against_exact, unsigned max_branches) {
  Program p = load_program(file);
  std::vector<Int> input = parse_input_list(input_csv);
  if (n < 1) throw std::runtime_error("need at least one sample");
  TimeDist hist;  // runtime -> count
  for (std::uint64_t i = 0; i < n; ++i) {
    ExecResult res = run_sampled(p, input, make_env(input), seed + i);
    hist[res.runtime] += 1;
  }
  std::cout << "runtime  count\n";
  for (const auto& [t, c] : hist) std::cout << t << "  " << boost::multiprecision::numerator(c)
                                            << "\n";
  if (against_exact) {
    EnumLimits lim;
    lim.max_rand_branches = max_branches;
    auto exact = enumerate_exact(p, input, make_env(input), lim);
    TimeDist emp;
    for (const auto& [t, c] : hist) emp[t] = c / Rat(Int(n));
    Rat tvd = tv_distance(emp, exact.runtime_marginal());
    std::cout << "exact_residual: " << rat_str(exact.residual) << "\n";
    std::cout << "tvd_vs_exact: " << rat_str(tvd) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& format,
               const std::string& out_path, int jobs_override, bool timings) {
  SuiteConfig cfg = read_config(config_path);
  if (jobs_override > 0) cfg.jobs = jobs_override;
  if (timings) cfg.timings = true;
  Report rep = run_suite(cfg);

  if (format == "json") {
    json j{{"seed", cfg.seed},
           {"limits",
            {{"max_rand_branches", cfg.max_rand_branches},
             {"max_steps", cfg.max_steps},
             {"samples", cfg.samples},
             {"corpus_size", cfg.corpus_size}}},
           {"all_pass", rep.all_pass}};
    j["checks"] = json::array();
    for (const auto& rec : rep.records) j["checks"].push_back(record_to_json(rec));
    emit(j.dump(2) + "\n", out_path);
  } else {
    std::ostringstream os;
    for (const auto& rec : rep.records) {
      os << (rec.pass ? "PASS" : "FAIL") << (rec.expected_negative ? " (negative)" : "") << "  "
         << rec.name << "\n";
      if (!rec.pass && !rec.witness.empty()) os << "      " << rec.witness << "\n";
    }
    os << (rep.all_pass ? "all checks passed" : "CHECK FAILURES PRESENT") << " ("
       << rep.records.size() << " checks)\n";
    emit(os.str(), out_path);
  }
  return rep.all_pass ? kExitOk : kExitCheckFailure;
}

int cmd_certify_delay(const std::string& a, const std::string& b, const std::string& mu,
                      const std::string& upper, const std::string& offset,
                      const std::string& t_in, const std::string& out_path) {
  DiscreteLaplaceParams p{Int(mu), Int(a), Int(b)};
  CensorSpec cs{Int(upper), Int(offset)};
  Int tin(t_in);
  Rat target = pow_rat(Rat(p.b, p.a), tin.convert_to<long>());
  DelayCertificate cert = certify_delay(p, cs, tin, target);
  json j{{"t_in", cert.t_in.str()},
         {"e_eps", rat_str(cert.budget.e_eps)},
         {"delta", rat_str(cert.budget.delta)},
         {"closed_form_delta", rat_str(cert.closed_form_delta)},
         {"params", {{"mu", cert.params.mu.str()}, {"a", cert.params.a.str()},
                     {"b", cert.params.b.str()}}},
         {"censor", {{"upper", cert.censor.upper.str()}, {"offset", cert.censor.offset.str()}}}};
  emit(j.dump(2) + "\n", out_path);
  return kExitOk;
}

int cmd_dump(const std::string& which, const std::string& out_path) {
  Program p;
  if (which == "randomized_response") {
    p = build_randomized_response();
  } else if (which == "sum") {
    p = build_sum();
  } else if (which == "sum_append") {
    p = build_sum(Model::Ram, 0, true);
  } else if (which == "discrete_laplace") {
    p = build_discrete_laplace(1, 2);
  } else if (which == "discrete_laplace_last") {
    p = build_discrete_laplace(1, 2, Model::Ram, 0, true);
  } else if (which == "timing_private_delay") {
    p = build_delay(1, 2, 4, 8);
  } else if (which == "dataset_count") {
    p = build_dataset_count();
  } else if (which == "identity_leaky_runtime") {
    p = build_identity_leaky_runtime();
  } else if (which == "truncate_output") {
    p = build_truncate_output();
  } else if (which == "timing_private_sum") {
    p = chain(chain(build_sum(Model::WordRam, 6), build_discrete_laplace(1, 2, Model::WordRam, 6)),
              build_delay(1, 2, 20, 20, Model::WordRam, 6));
  } else {
    throw std::runtime_error("unknown listing '" + which + "'");
  }
  emit(serialize_program(p), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"instruction-counting RAM toolkit: timing stability and timing privacy checks"};
  app.require_subcommand(1);

  std::string file, input_csv = "", out_path = "";
  std::uint64_t seed = 7, n = 1000, max_steps = 10'000'000;
  unsigned max_branches = 26;
  std::string config_path, format = "text", which;
  int jobs = 0;
  bool against_exact = false, timings = false;
  std::string a = "1", b = "2", mu = "10", upper = "20", offset = "0", t_in = "1";

  auto* run = app.add_subcommand("run", "execute a program once with a fixed seed");
  run->add_option("program", file, "assembly file")->required();
  run->add_option("--input", input_csv, "comma-separated input cells");
  run->add_option("--seed", seed, "rng seed");
  run->add_option("--max-steps", max_steps, "step limit");

  auto* sample = app.add_subcommand("sample", "runtime histogram over seeded runs");
  sample->add_option("program", file, "assembly file")->required();
  sample->add_option("--input", input_csv, "comma-separated input cells");
  sample->add_option("-n,--samples", n, "number of runs");
  sample->add_option("--seed", seed, "rng seed base");
  sample->add_flag("--exact", against_exact, "compare against exact enumeration");
  sample->add_option("--max-branches", max_branches, "rand-branch cap for --exact");

  auto* verify = app.add_subcommand("verify", "run the configured claim checks");
  verify->add_option("--config", config_path, "key = value config file")->required();
  verify->add_option("--format", format, "json|text")->check(CLI::IsMember({"json", "text"}));
  verify->add_option("--out", out_path, "write the report here instead of stdout");
  verify->add_option("--jobs", jobs, "run checks concurrently");
  verify->add_flag("--timings", timings, "include wall-clock timings (non-deterministic)");

  auto* certify = app.add_subcommand("certify-delay", "certify a censored-DL delay distribution");
  certify->add_option("--a", a, "ratio numerator");
  certify->add_option("--b", b, "ratio denominator");
  certify->add_option("--shift", mu, "shift mu");
  certify->add_option("--upper", upper, "censor bound B");
  certify->add_option("--offset", offset, "offset c");
  certify->add_option("--t-in", t_in, "incoming timing-stability bound");
  certify->add_option("--out", out_path, "write the certificate here");

  auto* dump = app.add_subcommand("dump", "emit a shipped listing as assembly text");
  dump->add_option("name", which, "listing name")->required();
  dump->add_option("--out", out_path, "write to file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(file, input_csv, seed, max_steps);
    if (sample->parsed()) return cmd_sample(file, input_csv, n, seed, against_exact, max_branches);
    if (verify->parsed()) return cmd_verify(config_path, format, out_path, jobs, timings);
    if (certify->parsed()) return cmd_certify_delay(a, b, mu, upper, offset, t_in, out_path);
    if (dump->parsed()) return cmd_dump(which, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
