#include "isocalc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "isocalc/catalog.hpp"
#include "isocalc/contour.hpp"
#include "isocalc/json_io.hpp"
#include "isocalc/spectral.hpp"
#include "isocalc/verification.hpp"

namespace isocalc::cli {

namespace {

struct RunConfig {
  std::string command;
  std::vector<std::string> fields;
  std::string matrix_path;
  std::string direction_path;
  std::string suite;
  int block = 0;
  std::uint64_t seed = 0;
  std::optional<double> block_tol;
  std::optional<double> structure_tol;
  std::optional<double> fd_step;
  std::optional<double> gap_min;
  int nodes = 64;
  std::optional<long> d;
  std::string multiplicities;
  std::optional<long> trials;
  std::string output_path;
  bool pretty = false;
};

void require_positive(const std::optional<double>& v, const char* flag) {
  if (v && !(*v > 0)) throw InvalidInput(std::string(flag) + " must be positive");
}

Options calculus_options(const RunConfig& cfg) {
  require_positive(cfg.block_tol, "--block-tol");
  require_positive(cfg.structure_tol, "--structure-tol");
  require_positive(cfg.fd_step, "--fd-step");
  Options o;
  o.block_tol = cfg.block_tol;
  o.structure_tol = cfg.structure_tol;
  o.fd_step = cfg.fd_step.value_or(0);
  return o;
}

json blocks_to_json(const BlockStructure<double>& blocks) {
  json out = json::array();
  for (const auto& b : blocks.blocks) {
    json members = json::array();
    for (Index i = b.begin; i < b.end(); ++i) members.push_back(i + 1);
    out.push_back(std::move(members));
  }
  return out;
}

Field single_field(const RunConfig& cfg) {
  if (cfg.fields.size() != 1) throw InvalidInput("exactly one --field is required");
  return parse_field_spec<double>(cfg.fields.front());
}

std::vector<int> parse_multiplicities(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InvalidInput("bad --multiplicities entry '" + item + "'");
    }
  }
  return out;
}

json cmd_apply(const RunConfig& cfg) {
  const Field f = single_field(cfg);
  const HMatrix a = load_matrix(cfg.matrix_path);
  const auto res = apply_detailed(f, a, calculus_options(cfg));
  return {{"result", matrix_to_json(res.result)},
          {"alpha", real_vector_to_json(res.decomposition.alpha)},
          {"blocks", blocks_to_json(res.blocks)},
          {"block_tol", res.blocks.tol_used}};
}

json cmd_derivative(const RunConfig& cfg) {
  const Field f = single_field(cfg);
  const HMatrix a = load_matrix(cfg.matrix_path);
  if (cfg.direction_path.empty()) throw InvalidInput("derivative needs --direction");
  const HMatrix e = load_matrix(cfg.direction_path);
  const auto rep = frechet_apply(f, a, e, calculus_options(cfg));
  json warnings = json::array();
  if (rep.dd.ill_conditioned) {
    std::ostringstream os;
    os << "divided-difference quotient " << rep.dd.max_quotient << " exceeds " << kQuotientWarning
       << "; eigenvalues are nearly but not numerically equal";
    warnings.push_back(os.str());
  }
  return {{"result", matrix_to_json(rep.result)},
          {"divided_difference", real_matrix_to_json(rep.dd.entries)},
          {"ehat", matrix_to_json(rep.Ehat)},
          {"ehat_diag", real_vector_to_json(rep.ehat)},
          {"jacobian", real_matrix_to_json(rep.jac)},
          {"structure_residual", rep.structure_residual},
          {"asymmetry", rep.asymmetry},
          {"alpha", real_vector_to_json(rep.decomposition.alpha)},
          {"blocks", blocks_to_json(rep.dd.blocks)},
          {"max_quotient", rep.dd.max_quotient},
          {"warnings", std::move(warnings)}};
}

json cmd_project(const RunConfig& cfg) {
  const HMatrix a = load_matrix(cfg.matrix_path);
  require_positive(cfg.block_tol, "--block-tol");
  require_positive(cfg.gap_min, "--gap-min");
  ContourOptions<double> opts;
  opts.nodes = cfg.nodes;
  opts.block_tol = cfg.block_tol;
  if (cfg.gap_min) opts.gap_min = *cfg.gap_min;
  if (cfg.block < 1) throw InvalidInput("--block is 1-based and must be given");
  const auto res = spectral_projector_contour(a, cfg.block - 1, opts);
  return {{"projector", matrix_to_json(res.projector)},
          {"block", cfg.block},
          {"center", res.center},
          {"radius", res.radius},
          {"nodes", res.nodes},
          {"residual", res.residual},
          {"asymmetry", res.asymmetry},
          {"blocks", blocks_to_json(res.blocks)}};
}

std::vector<Field> fields_or(const RunConfig& cfg, std::initializer_list<const char*> defaults) {
  std::vector<Field> out;
  if (cfg.fields.empty())
    for (const char* s : defaults) out.push_back(parse_field_spec<double>(s));
  else
    for (const auto& s : cfg.fields) out.push_back(parse_field_spec<double>(s));
  return out;
}

json cmd_check(const RunConfig& cfg) {
  static const std::vector<std::string> suites{"frechet", "lipschitz", "dd_bound", "hoffman_wielandt", "all"};
  if (std::find(suites.begin(), suites.end(), cfg.suite) == suites.end())
    throw InvalidInput("unknown suite '" + cfg.suite + "'");
  if (cfg.d && *cfg.d < 1) throw InvalidInput("--d must be positive");
  if (cfg.trials && *cfg.trials < 1) throw InvalidInput("--trials must be positive");
  const bool all = cfg.suite == "all";
  const Options opts = calculus_options(cfg);
  const auto mults = parse_multiplicities(cfg.multiplicities);
  std::vector<PropertyReport> reports;
  std::size_t run_index = 0;
  auto next_seed = [&] { return child_seed(cfg.seed, run_index++); };

  if (all || cfg.suite == "frechet") {
    FrechetSuiteConfig fc;
    fc.multiplicities = mults;
    int msum = 0;
    for (int m : mults) msum += m;
    fc.d = cfg.d.value_or(mults.empty() ? 5 : msum);
    if (!mults.empty() && msum != fc.d) throw InvalidInput("--multiplicities must sum to --d");
    if (cfg.trials) fc.trials = static_cast<std::size_t>(*cfg.trials);
    fc.options = opts;
    const auto fields = all ? fields_or({}, {"scalar_lift:identity", "scalar_lift:square", "scalar_lift:exp",
                                             "sqrt_shifted:2", "trace_coupled:0.5"})
                            : fields_or(cfg, {"scalar_lift:identity", "scalar_lift:square", "scalar_lift:exp",
                                              "sqrt_shifted:2", "trace_coupled:0.5"});
    for (const auto& f : fields) {
      if (!f.supports(fc.d)) {
        if (all) continue;
        f.require_dim(fc.d);
      }
      for (auto& r : frechet_suite(f, fc, next_seed())) reports.push_back(std::move(r));
    }
  }
  if (all || cfg.suite == "lipschitz") {
    LipschitzSuiteConfig lc;
    lc.d = cfg.d.value_or(4);
    if (cfg.trials) lc.trials = static_cast<std::size_t>(*cfg.trials);
    auto fields = all ? fields_or({}, {"scalar_lift:identity", "soft_threshold:1", "scalar_lift:abs"})
                      : fields_or(cfg, {"scalar_lift:identity", "soft_threshold:1", "scalar_lift:abs"});
    if (all) fields.push_back(top_block_projection<double>());
    for (const auto& f : fields) {
      if (f.meta.lipschitz_constant) {
        if (!f.supports(lc.d) && all) continue;
        reports.push_back(lipschitz_suite(f, lc, next_seed()));
      } else if (!f.meta.claims_block_constant) {
        reports.push_back(lipschitz_counterexample(f));
      } else {
        throw InvalidInput("field '" + f.meta.name + "' carries no Lipschitz constant");
      }
    }
  }
  if (all || cfg.suite == "dd_bound") {
    DdBoundConfig dc;
    dc.d = cfg.d.value_or(4);
    if (cfg.trials) dc.samples = static_cast<std::size_t>(*cfg.trials);
    dc.options = opts;
    const auto fields =
        all ? fields_or({}, {"scalar_lift:identity", "scalar_lift:abs", "soft_threshold:1", "constant:1",
                             "paper_gap_linear"})
            : fields_or(cfg, {"scalar_lift:identity", "scalar_lift:abs", "soft_threshold:1", "constant:1"});
    for (const auto& f : fields) reports.push_back(dd_bound_suite(f, dc, next_seed()));
  }
  if (all || cfg.suite == "hoffman_wielandt") {
    HoffmanWielandtConfig hc;
    hc.d = cfg.d.value_or(6);
    if (cfg.trials) hc.trials = static_cast<std::size_t>(*cfg.trials);
    reports.push_back(hoffman_wielandt_suite(hc, next_seed()));
  }

  bool passed = true;
  json arr = json::array();
  for (const auto& r : reports) {
    passed = passed && r.passed;
    arr.push_back(report_to_json(r));
  }
  return {{"suite", cfg.suite}, {"seed", cfg.seed}, {"passed", passed}, {"reports", std::move(arr)}};
}

json cmd_catalog() {
  json arr = json::array();
  for (const auto& e : catalog_entries()) arr.push_back({{"spec", e.spec}, {"description", e.description}});
  return {{"fields", std::move(arr)}};
}

void write_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << json{{"kind", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
}

}  // namespace

int exit_code_for(const std::string& kind) {
  if (kind == "well_definedness") return kWellDefinedness;
  if (kind == "numerical_failure") return kNumericalFailure;
  if (kind == "structure_violation") return kStructureViolation;
  if (kind == "ill_conditioned_contour") return kGapTooSmall;
  return kParseError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Spectral calculus of vector fields on Hermitian matrices"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output", cfg.output_path, "Write JSON here instead of stdout");
    sub->add_flag("--pretty", cfg.pretty, "Round numbers and indent the output");
    sub->add_option("--block-tol", cfg.block_tol, "Eigenvalues closer than this form one block");
  };
  auto add_field_opts = [&](CLI::App* sub) {
    sub->add_option("--structure-tol", cfg.structure_tol, "Max deviation of the Jacobian from its block form");
    sub->add_option("--fd-step", cfg.fd_step, "Finite-difference step for Jacobians");
  };

  auto* apply_cmd = app.add_subcommand("apply", "Evaluate L_F(A)");
  apply_cmd->add_option("--field", cfg.fields, "Vector field spec, e.g. scalar_lift:square")->required();
  apply_cmd->add_option("--matrix", cfg.matrix_path, "Matrix JSON file")->required();
  add_common(apply_cmd);
  add_field_opts(apply_cmd);

  auto* deriv_cmd = app.add_subcommand("derivative", "Frechet derivative L_F'(E) at A");
  deriv_cmd->add_option("--field", cfg.fields, "Vector field spec")->required();
  deriv_cmd->add_option("--matrix", cfg.matrix_path, "Matrix JSON file for A")->required();
  deriv_cmd->add_option("--direction", cfg.direction_path, "Matrix JSON file for E")->required();
  add_common(deriv_cmd);
  add_field_opts(deriv_cmd);

  auto* project_cmd = app.add_subcommand("project", "Spectral projector by contour quadrature");
  project_cmd->add_option("--matrix", cfg.matrix_path, "Matrix JSON file")->required();
  project_cmd->add_option("--block", cfg.block, "1-based index of the distinct eigenvalue")->required();
  project_cmd->add_option("--nodes", cfg.nodes, "Quadrature nodes on the circle");
  project_cmd->add_option("--gap-min", cfg.gap_min, "Smallest admissible eigenvalue gap");
  add_common(project_cmd);

  auto* check_cmd = app.add_subcommand("check", "Run verification suites");
  check_cmd->add_option("suite,--suite", cfg.suite, "frechet | lipschitz | dd_bound | hoffman_wielandt | all");
  check_cmd->add_option("--field", cfg.fields, "Vector field spec (repeatable)");
  check_cmd->add_option("--seed", cfg.seed, "Suite seed");
  check_cmd->add_option("--d", cfg.d, "Matrix dimension");
  check_cmd->add_option("--multiplicities", cfg.multiplicities, "Planted multiplicities, e.g. 2,2,1");
  check_cmd->add_option("--trials", cfg.trials, "Trials per suite");
  add_common(check_cmd);
  add_field_opts(check_cmd);

  app.add_subcommand("catalog", "List built-in vector fields");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    write_error(err, "usage_error", e.what(), kParseError);
    return kParseError;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "check" && cfg.suite.empty()) cfg.suite = "all";

  json result;
  try {
    if (cfg.command == "apply")
      result = cmd_apply(cfg);
    else if (cfg.command == "derivative")
      result = cmd_derivative(cfg);
    else if (cfg.command == "project")
      result = cmd_project(cfg);
    else if (cfg.command == "check")
      result = cmd_check(cfg);
    else
      result = cmd_catalog();
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    write_error(err, e.kind(), e.what(), code);
    return code;
  }

  const std::string text = dump_json(result, cfg.pretty);
  if (cfg.output_path.empty()) {
    out << text << "\n";
  } else {
    std::ofstream file(cfg.output_path);
    if (!file) {
      write_error(err, "io_error", "cannot write '" + cfg.output_path + "'", kParseError);
      return kParseError;
    }
    file << text << "\n";
  }
  if (cfg.command == "check" && !result["passed"].get<bool>()) return kSuiteViolation;
  return kOk;
}

}  // namespace isocalc::cli
