// Command-line front end: instance generation, sequential/local runs with
// verification, convexity probing, and the rank-3 boundary table.
//
// Exit codes: 0 success, 1 verification failure, 2 theorem violation,
// 3 input error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>

#include "CLI11.hpp"
#include "lll/generate.hpp"
#include "lll/local_sim.hpp"
#include "lll/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitTheoremViolation = 2;
constexpr int kExitInputError = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lll::ValidationError("cannot open file: " + path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_out(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path);
  if (!out) throw lll::ValidationError("cannot write file: " + path);
  out << bytes;
}

struct CommonOpts {
  std::uint64_t seed = 0;
  double tol = 0.0;  // 0 = per-rank default
  bool force = false;
  std::string out;
};

int cmd_gen(const lll::GenSpec& spec, const std::string& out_path) {
  const lll::LLLInstance inst = lll::generate_instance(spec);
  const auto crit = inst.criterion();
  write_out(out_path, lll::instance_to_string(inst));
  std::cerr << "gen: " << inst.num_events() << " events, "
            << inst.num_variables() << " variables, p = " << crit.p.str()
            << ", d = " << crit.d << ", p*2^d = " << crit.p_times_2d.str()
            << "\n";
  return kExitOk;
}

int cmd_run(const std::string& instance_path, const std::string& mode,
            const std::string& order_kind, const std::string& ids_kind,
            const CommonOpts& common) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string bytes = slurp(instance_path);
  const lll::LLLInstance inst =
      lll::instance_from_json(lll::json::parse(bytes), common.force);

  lll::Report report;
  report.command = "run";
  report.mode = mode;
  report.instance_digest = lll::fnv1a_digest(bytes);

  lll::Assignment assignment;
  if (mode == "sequential") {
    std::vector<int> order(inst.num_variables());
    std::iota(order.begin(), order.end(), 0);
    if (order_kind == "reversed") std::reverse(order.begin(), order.end());
    lll::RunOptions opts;
    opts.tol = common.tol;
    const auto res = lll::run_sequential(inst, order, opts);
    assignment = res.assignment;
    report.stats = res.stats;
  } else {
    const auto ids = ids_kind == "meta" ? lll::ids_from_meta(inst)
                                        : lll::default_ids(inst);
    lll::LocalRunOptions opts;
    opts.tol = common.tol;
    const auto res = lll::run_local(inst, ids, opts);
    assignment = res.assignment;
    report.stats = res.stats;
    report.round_log = res.log.to_json();
  }

  report.occurring = inst.verify_assignment(assignment);
  report.assignment = lll::assignment_to_json(inst, assignment);
  report.outcome = report.occurring.empty() ? "verified" : "failed";
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - t0)
          .count();
  write_out(common.out, report.to_json().dump(2) + "\n");
  return report.occurring.empty() ? kExitOk : kExitVerifyFailed;
}

int cmd_verify(const std::string& instance_path,
               const std::string& assignment_path, const CommonOpts& common) {
  const lll::LLLInstance inst = lll::instance_from_json(
      lll::json::parse(slurp(instance_path)), common.force);
  lll::json doc = lll::json::parse(slurp(assignment_path));
  if (doc.contains("assignment")) doc = doc["assignment"];
  const lll::Assignment assignment = lll::assignment_from_json(inst, doc);
  const auto occurring = inst.verify_assignment(assignment);
  if (occurring.empty()) {
    std::cout << "verified: no event occurs\n";
    return kExitOk;
  }
  std::cout << "failed: " << occurring.size() << " events occur:";
  for (long long id : occurring) std::cout << " " << id;
  std::cout << "\n";
  return kExitVerifyFailed;
}

int cmd_probe(std::size_t r, std::size_t samples, const CommonOpts& common) {
  const double tol = common.tol > 0 ? common.tol : lll::default_oracle_tol(r);
  const auto rep = lll::convexity_probe(r, samples, common.seed, tol);
  write_out(common.out, lll::probe_csv(rep));
  std::cerr << "probe: r = " << r << ", samples = " << rep.samples
            << ", violations = " << rep.violations;
  if (r == 3) {
    std::cerr << ", closed-form violations = " << rep.closed_form_violations;
  }
  std::cerr << ", worst margin = " << lll::float17(rep.worst_margin) << "\n";
  return rep.violations == 0 ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constructive Lovasz Local Lemma toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts common;
  app.add_option("--seed", common.seed, "Seed for anything randomized");
  app.add_option("--tol", common.tol, "Oracle tolerance");
  app.add_flag("--force", common.force,
               "Load instances that fail the criterion");
  app.add_option("--out", common.out, "Output path ('-' for stdout)");

  auto* gen = app.add_subcommand("gen", "Generate a criterion-passing instance");
  lll::GenSpec spec;
  gen->add_option("--family", spec.family,
                  "shared-variable-random | k-sat-like | star-hyperedge");
  gen->add_option("--n-events", spec.n_events, "Number of events");
  gen->add_option("--max-rank", spec.max_rank, "Maximum hyperedge rank");
  gen->add_option("--max-domain", spec.max_domain, "Maximum domain size");
  gen->add_option("--target-d", spec.target_d, "Dependency degree cap");

  auto* run = app.add_subcommand("run", "Fix all variables and verify");
  std::string instance_path, mode = "sequential", order_kind = "forward",
              ids_kind = "default";
  run->add_option("instance", instance_path, "Instance file")->required();
  run->add_option("--mode", mode, "sequential | local")
      ->check(CLI::IsMember({"sequential", "local"}));
  run->add_option("--order", order_kind, "forward | reversed (sequential)")
      ->check(CLI::IsMember({"forward", "reversed"}));
  run->add_option("--ids", ids_kind, "default | meta (local)")
      ->check(CLI::IsMember({"default", "meta"}));

  auto* verify = app.add_subcommand("verify", "Check an assignment file");
  std::string assignment_path;
  verify->add_option("instance", instance_path, "Instance file")->required();
  verify->add_option("assignment", assignment_path,
                     "Assignment or report file")
      ->required();

  auto* probe = app.add_subcommand("probe", "Sampled convexity check");
  std::size_t probe_r = 3, probe_samples = 1000;
  probe->add_option("--r", probe_r, "Rank (2..6)");
  probe->add_option("--samples", probe_samples, "Number of samples");

  auto* table =
      app.add_subcommand("boundary-table", "Rank-3 oracle vs closed form CSV");
  int grid = 50;
  double max_coord = 0.5;
  table->add_option("--grid", grid, "Grid points per axis");
  table->add_option("--max", max_coord, "Upper end of the (a,b) range");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (gen->parsed()) {
      spec.seed = common.seed;
      return cmd_gen(spec, common.out);
    }
    if (run->parsed()) {
      return cmd_run(instance_path, mode, order_kind, ids_kind, common);
    }
    if (verify->parsed()) {
      return cmd_verify(instance_path, assignment_path, common);
    }
    if (probe->parsed()) {
      return cmd_probe(probe_r, probe_samples, common);
    }
    if (table->parsed()) {
      write_out(common.out, lll::boundary_table_csv(grid, max_coord));
      return kExitOk;
    }
  } catch (const lll::TheoremViolation& ex) {
    std::cerr << "theorem violation: " << ex.what() << "\n";
    return kExitTheoremViolation;
  } catch (const lll::Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInputError;
  } catch (const lll::json::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
