#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bidopt/auction_sim.hpp"
#include "bidopt/errors.hpp"
#include "bidopt/io.hpp"
#include "bidopt/oracle.hpp"
#include "bidopt/single_group.hpp"
#include "bidopt/solver.hpp"

namespace {

using bidopt::io::json;

enum Exit : int {
  kOk = 0,
  kOther = 1,
  kSchema = 2,
  kInfeasible = 3,
  kOracleCap = 4,
  kUnsupported = 5,
};

struct TolFlags {
  std::optional<double> qp, done, residual, flow;
  std::optional<std::size_t> max_iterations;

  void add(CLI::App* cmd) {
    cmd->add_option("--qp-tol", qp, "QP stall threshold, relative to the objective");
    cmd->add_option("--done-tol", done, "done threshold on the QP objective, relative to (sum I)^2");
    cmd->add_option("--residual-tol", residual, "residual clamp, relative to sum I");
    cmd->add_option("--flow-tol", flow, "max-flow tolerance, relative to sum I");
    cmd->add_option("--max-iterations", max_iterations, "QP iteration cap");
  }

  bidopt::SolverOptions options() const {
    bidopt::SolverOptions o;
    if (qp) o.tol.qp = *qp;
    if (done) o.tol.done = *done;
    if (residual) o.tol.residual = *residual;
    if (flow) o.tol.flow = *flow;
    if (max_iterations) o.tol.max_iterations = *max_iterations;
    return o;
  }
};

bidopt::ProblemInstance load_instance(const std::string& path) {
  return bidopt::io::instance_from_json(bidopt::io::read_json_file(path));
}

// "pure" and "mixed" name the solver's own strategies; anything else is a file.
bidopt::MixedStrategy load_strategy(const bidopt::ProblemInstance& inst, const std::string& spec,
                                    const bidopt::SolverOptions& opts) {
  if (spec == "pure" || spec == "mixed") {
    const auto d = bidopt::decompose(inst, opts);
    if (spec == "pure") return bidopt::lift(bidopt::build_allocation(inst, d));
    return bidopt::build_mixed(inst, d).strategy;
  }
  return bidopt::io::mixed_from_json(inst, bidopt::io::read_json_file(spec));
}

bidopt::B1Choice b1_choice(bool auto_b1, const std::optional<double>& delta,
                           const std::vector<double>& b1) {
  const int given = static_cast<int>(auto_b1) + static_cast<int>(delta.has_value()) +
                    static_cast<int>(!b1.empty());
  if (given > 1) throw bidopt::DomainError("use only one of --auto-b1, --delta, --b1");
  if (delta) return bidopt::B1Choice::relative_delta(*delta);
  if (!b1.empty()) return bidopt::B1Choice::per_component_bids(b1);
  return bidopt::B1Choice::automatic();
}

int report(const std::string& msg, int code) {
  std::cerr << "bidopt: " << msg << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-minimal bidding for campaigns with overlapping targeting"};
  app.require_subcommand(1);
  std::string instance_path, strategy_spec, out = "-";
  TolFlags tol;

  auto* build = app.add_subcommand("build-groups", "partition request types into targeting groups");
  build->add_option("--instance", instance_path, "criteria-form instance")->required();
  build->add_option("--out", out, "output path, - for stdout");

  auto* solve = app.add_subcommand("solve", "recursive decomposition, pure allocation and bounds");
  solve->add_option("--instance", instance_path)->required();
  solve->add_option("--out", out);
  tol.add(solve);

  bool auto_b1 = false;
  std::optional<double> delta;
  std::vector<double> b1s;
  auto* mixed = app.add_subcommand("mixed", "two-bid mixed strategy per component");
  mixed->add_option("--instance", instance_path)->required();
  mixed->add_option("--out", out);
  mixed->add_flag("--auto-b1", auto_b1, "flat-region left endpoints (default)");
  mixed->add_option("--delta", delta, "b1 = (1 - delta) * price in every component");
  mixed->add_option("--b1", b1s, "one b1 per component, in solution order");
  tol.add(mixed);

  std::optional<std::string> group_id;
  std::optional<double> demand, single_b1;
  auto* single = app.add_subcommand("single", "closed forms for one campaign on one group");
  single->add_option("--instance", instance_path)->required();
  single->add_option("--group", group_id, "group id (default: the only group)");
  single->add_option("--demand", demand, "impressions (default: the only campaign's)");
  single->add_option("--b1", single_b1, "also report the two-point mix with this lower bid");
  single->add_option("--out", out);

  auto* verify = app.add_subcommand("verify", "cost, feasibility and sufficient optimality conditions");
  verify->add_option("--instance", instance_path)->required();
  verify->add_option("--strategy", strategy_spec, "strategy file, or pure / mixed")->required();
  verify->add_option("--out", out);
  tol.add(verify);

  bidopt::GridSpec grid;
  bool oracle_mixed = false;
  int bids_per_pair = 2;
  auto* oracle = app.add_subcommand("oracle", "brute-force grid search");
  oracle->add_option("--instance", instance_path)->required();
  oracle->add_option("--gamma-steps", grid.gamma_steps, "fraction grid 1/q")->check(CLI::Range(1, 50));
  oracle->add_option("--subdivisions", grid.subdivisions, "bid grid refinement per knot interval")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--max-states", grid.max_states, "enumeration cap");
  oracle->add_flag("--mixed", oracle_mixed, "search two-bid mixed strategies");
  oracle->add_option("--bids-per-pair", bids_per_pair)->check(CLI::Range(1, 2));
  oracle->add_option("--out", out);

  std::uint64_t seed = 0;
  bidopt::SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "replay a strategy in second-price auctions");
  simulate->add_option("--instance", instance_path)->required();
  simulate->add_option("--strategy", strategy_spec, "strategy file, or pure / mixed")->required();
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--replications", sim.replications)->check(CLI::PositiveNumber);
  simulate->add_flag("--poisson", sim.poisson, "Poisson request counts with mean V");
  simulate->add_option("--out", out);
  tol.add(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSchema;
  }

  try {
    json doc;
    if (build->parsed()) {
      doc = bidopt::io::build_groups(bidopt::io::read_json_file(instance_path));
    } else if (solve->parsed()) {
      const auto inst = load_instance(instance_path);
      doc = bidopt::io::solution_to_json(inst, bidopt::decompose(inst, tol.options()));
    } else if (mixed->parsed()) {
      const auto inst = load_instance(instance_path);
      const auto d = bidopt::decompose(inst, tol.options());
      doc = bidopt::io::mixed_report_to_json(inst, bidopt::build_mixed(inst, d, b1_choice(auto_b1, delta, b1s)));
    } else if (single->parsed()) {
      const auto inst = load_instance(instance_path);
      std::size_t j = 0;
      if (group_id)
        j = inst.group_index(*group_id);
      else if (inst.num_groups() != 1)
        throw bidopt::DomainError("instance has several groups; pass --group");
      double I = 0.0;
      if (demand)
        I = *demand;
      else if (inst.num_campaigns() == 1)
        I = inst.campaign(0).impressions;
      else
        throw bidopt::DomainError("instance has several campaigns; pass --demand");
      const auto& curve = inst.group(j).curve;
      doc = bidopt::io::single_to_json(bidopt::solve_single(curve, I));
      if (single_b1) doc["two_point"] = bidopt::io::two_point_to_json(bidopt::two_point_mixed(curve, I, *single_b1));
    } else if (verify->parsed()) {
      const auto inst = load_instance(instance_path);
      const auto opts = tol.options();
      bool is_mixed = strategy_spec == "mixed";
      json sdoc;
      if (strategy_spec != "pure" && strategy_spec != "mixed") {
        sdoc = bidopt::io::read_json_file(strategy_spec);
        is_mixed = bidopt::io::is_mixed_document(sdoc);
      }
      if (is_mixed) {
        const auto s = sdoc.is_null() ? load_strategy(inst, strategy_spec, opts) : bidopt::io::mixed_from_json(inst, sdoc);
        doc = {{"version", bidopt::io::kFormatVersion},
               {"kind", "verification"},
               {"verdict", bidopt::to_string(bidopt::Verdict::kNotApplicable)},
               {"detail", "mixed strategy; the sufficient conditions concern pure allocations"}};
        doc["cost"] = bidopt::mixed_cost(inst, s);
        doc["feasibility"] = bidopt::io::feasibility_to_json(inst, bidopt::check_feasible(inst, s));
      } else {
        const auto a = sdoc.is_null() ? bidopt::build_allocation(inst, bidopt::decompose(inst, opts))
                                      : bidopt::io::pure_from_json(inst, sdoc);
        doc = bidopt::io::verification_to_json(bidopt::verify_sufficient(inst, a));
        doc["cost"] = bidopt::pure_cost(inst, a);
        doc["feasibility"] = bidopt::io::feasibility_to_json(inst, bidopt::check_feasible(inst, a));
      }
    } else if (oracle->parsed()) {
      const auto inst = load_instance(instance_path);
      const auto r = oracle_mixed ? bidopt::grid_mixed_cost(inst, grid, bids_per_pair)
                                  : bidopt::grid_pure_optimum(inst, grid);
      doc = bidopt::io::oracle_to_json(inst, r, oracle_mixed);
    } else if (simulate->parsed()) {
      const auto inst = load_instance(instance_path);
      sim.seed = seed;
      const auto s = load_strategy(inst, strategy_spec, tol.options());
      doc = bidopt::io::simulation_to_json(inst, bidopt::run_simulation(inst, s, sim));
    }
    bidopt::io::write_json(doc, out);
    return kOk;
  } catch (const bidopt::SchemaError& e) {
    return report(e.what(), kSchema);
  } catch (const bidopt::DomainError& e) {
    return report(e.what(), kSchema);
  } catch (const bidopt::InfeasibleInstance& e) {
    return report(std::string("infeasible: ") + e.what(), kInfeasible);
  } catch (const bidopt::UnsatisfiableSupply& e) {
    return report(std::string("infeasible: ") + e.what(), kInfeasible);
  } catch (const bidopt::OracleCapExceeded& e) {
    return report(e.what(), kOracleCap);
  } catch (const bidopt::UnsupportedCurve& e) {
    return report(e.what(), kUnsupported);
  } catch (const std::exception& e) {
    return report(e.what(), kOther);
  }
}
