// carleman-lab: command-line front end.  Builds weight sequences,
// matrices, weight functions, and series from flag specs, runs the
// requested condition analyses, and writes a machine-readable JSON
// report (plus CSV/JSON dumps on request).
//
// Exit codes: 0 success; 1 when --assert is set and any verdict is not
// "holds"; 2 on malformed input or unwritable output.

#include <carleman/io.hpp>
#include <carleman/matrix.hpp>
#include <carleman/sequence.hpp>
#include <carleman/series.hpp>
#include <carleman/weight_function.hpp>
#include <carleman/witness.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace carleman;

constexpr int exit_ok = 0;
constexpr int exit_assert_failed = 1;
constexpr int exit_bad_input = 2;

// Resolved flag set for one invocation.
struct AnalysisConfig {
  // Object specs.
  std::string family;           // "kind" or "kind:param"
  std::vector<double> lambdas;  // matrix row indices
  std::string input;            // CSV/JSON path to load instead of a family
  double power_alpha = 0.0;     // function: raw power weight t^alpha

  // Truncations and grids.
  std::size_t J = 512;
  std::vector<double> grid{1.0, 1e6, 256.0};  // tmin, tmax, points

  // Condition lists and their constants.
  std::vector<std::string> conds;
  std::size_t stretch = 2;  // index stretch C for mixed / root-square
  double C1 = 1.0;          // multiplicative constant for root-square

  // Series operands.
  std::string left, right, out_csv;
  std::string variant = "cauchy";

  // Witness parameters.
  std::size_t steps = 7;
  std::string thresholds = "none";  // "none" | "default" | "t1,t2,..."
  std::size_t basis_count = 1;
  std::vector<double> interval{0.25, 0.75};
  std::size_t degree = 3;
  std::string element;  // "re,im,e1,e2,...;re,im,..." (one monomial per ';')
  std::vector<double> a_list{0.9, 0.5};
  std::string oracle = "trivial";
  std::string bundle_path = "carleman_witness.json";
  std::string coeffs_path = "carleman_witness_coefficients.csv";

  // Outputs.
  std::string output = "carleman_report.json";
  std::string dump;  // sequence/function CSV or matrix JSON dump path
  bool assert_verdicts = false;
};

// ---------------------------------------------------------------------------
// Report assembly.

json certificate_json(const Certificate& c) {
  json j = json::object();
  if (c.C) j["C"] = *c.C;
  if (c.h) j["h"] = *c.h;
  if (c.D) j["D"] = *c.D;
  if (c.C1) j["C1"] = *c.C1;
  if (j.empty()) return json();  // no realized constants -> null
  j["rechecked"] = c.rechecked;
  return j;
}

std::string summarize(const ConditionVerdict& v) {
  std::ostringstream os;
  bool first = true;
  std::size_t shown = 0;
  for (const auto& [name, value] : v.stats) {
    if (shown++ == 6) break;
    if (!first) os << ", ";
    os << name << "=" << value;
    first = false;
  }
  if (!v.note.empty()) {
    if (!first) os << "; ";
    os << v.note;
  }
  return os.str();
}

ReportVerdict to_report(const ConditionVerdict& v) {
  ReportVerdict out;
  out.condition = v.condition;
  out.verdict = v.holds;
  out.certificate = certificate_json(v.certificate);
  out.evidence_summary = summarize(v);
  return out;
}

// Writes the report, prints the verdict lines, applies --assert.
int finish(const AnalysisConfig& cfg, Report rep) {
  const json doc = report_to_json(rep);
  write_text_file(cfg.output, doc.dump(2) + "\n");
  for (const ReportVerdict& v : rep.verdicts)
    std::cout << to_string(v.verdict) << "(" << v.condition << ")\n";
  for (const std::string& a : rep.artifacts)
    std::cout << "artifact: " << a << "\n";
  std::cout << "report: " << cfg.output << "\n";
  if (cfg.assert_verdicts && !report_all_hold(rep)) return exit_assert_failed;
  return exit_ok;
}

// ---------------------------------------------------------------------------
// Shared builders.

WeightSequence load_or_build_sequence(const AnalysisConfig& cfg) {
  if (!cfg.input.empty()) {
    std::ifstream is(cfg.input);
    if (!is) throw std::runtime_error("cannot open for reading: " + cfg.input);
    return read_sequence_csv(is);
  }
  if (cfg.family.empty())
    throw std::invalid_argument("need --family or --input");
  return WeightSequence::from_family(parse_family(cfg.family), cfg.J);
}

SequenceCondition sequence_condition_from_string(const std::string& s) {
  if (s == "mg") return SequenceCondition::mg;
  if (s == "nq") return SequenceCondition::nq;
  if (s == "pointwise-square") return SequenceCondition::pointwise_square;
  if (s == "mixed") return SequenceCondition::mixed;
  if (s == "root-square") return SequenceCondition::root_square;
  throw std::invalid_argument("unknown sequence condition '" + s + "'");
}

FunctionCondition function_condition_from_string(const std::string& s) {
  if (s == "omega1") return FunctionCondition::omega1;
  if (s == "omega2") return FunctionCondition::omega2;
  if (s == "omega3") return FunctionCondition::omega3;
  if (s == "omega4") return FunctionCondition::omega4;
  if (s == "omega5") return FunctionCondition::omega5;
  if (s == "omega7") return FunctionCondition::omega7;
  if (s == "mixed-omega7") return FunctionCondition::mixed_omega7;
  if (s == "omegasnq") return FunctionCondition::omegasnq;
  if (s == "omegaQ") return FunctionCondition::omegaQ;
  throw std::invalid_argument("unknown function condition '" + s + "'");
}

MatrixCondition matrix_condition_from_string(const std::string& s) {
  if (s == "roumieu-square") return MatrixCondition::roumieu_square;
  if (s == "beurling-square") return MatrixCondition::beurling_square;
  if (s == "roumieu-big-square") return MatrixCondition::roumieu_big_square;
  if (s == "beurling-big-square") return MatrixCondition::beurling_big_square;
  if (s == "quasianalytic") return MatrixCondition::quasianalytic;
  throw std::invalid_argument("unknown matrix condition '" + s + "'");
}

PowerSeries load_series(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_series_csv(is);
}

FunctionGrid make_grid(const AnalysisConfig& cfg) {
  if (cfg.grid.size() != 3)
    throw std::invalid_argument("--grid needs tmin,tmax,points");
  FunctionGrid g;
  g.t_min = cfg.grid[0];
  g.t_max = cfg.grid[1];
  if (cfg.grid[2] < 8.0 || cfg.grid[2] != std::floor(cfg.grid[2]))
    throw std::invalid_argument("--grid points must be an integer >= 8");
  g.points = std::size_t(cfg.grid[2]);
  g.integral_t_max = g.t_max;
  return g;
}

SummationWeightOracle parse_oracle(const std::string& spec) {
  if (spec == "trivial") return SummationWeightOracle::trivial();
  if (spec.rfind("file:", 0) != 0)
    throw std::invalid_argument("--oracle takes 'trivial' or 'file:<path>'");
  const std::string path = spec.substr(5);
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  const auto lines = detail::read_csv_lines(is, "j,k,omega", "oracle csv");
  std::map<std::pair<std::size_t, std::size_t>, double> table;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = detail::split_csv(lines[i]);
    detail::expect_fields(fields, 3, i + 2, "oracle csv");
    const double j = detail::parse_double(fields[0], i + 2);
    const double k = detail::parse_double(fields[1], i + 2);
    if (j < 0 || k < 1 || j != std::floor(j) || k != std::floor(k))
      throw std::invalid_argument("oracle csv: j, k must be integer indices");
    table[{std::size_t(j), std::size_t(k)}] =
        detail::parse_double(fields[2], i + 2);
  }
  return SummationWeightOracle::from_function(
      [table = std::move(table)](std::size_t j, std::size_t k) {
        const auto it = table.find({j, k});
        return it == table.end() ? 1.0 : it->second;
      });
}

// ---------------------------------------------------------------------------
// sequence check

int cmd_sequence_check(const AnalysisConfig& cfg) {
  const WeightSequence W = load_or_build_sequence(cfg);
  if (cfg.conds.empty()) throw std::invalid_argument("need --cond");

  Report rep;
  rep.inputs = json{{"command", "sequence check"},
                    {"family", cfg.input.empty() ? cfg.family : "custom"},
                    {"input", cfg.input},
                    {"J", W.order()},
                    {"conditions", cfg.conds},
                    {"C", cfg.stretch},
                    {"C1", cfg.C1}};
  for (const std::string& name : cfg.conds) {
    SequenceConditionOptions opt;
    opt.C = cfg.stretch;
    opt.C1 = cfg.C1;
    rep.verdicts.push_back(to_report(
        check_sequence_condition(W, sequence_condition_from_string(name), opt)));
  }
  if (!cfg.dump.empty()) {
    std::ostringstream os;
    write_sequence_csv(os, W);
    write_text_file(cfg.dump, os.str());
    rep.artifacts.push_back(cfg.dump);
  }
  return finish(cfg, std::move(rep));
}

// ---------------------------------------------------------------------------
// function check

int cmd_function_check(const AnalysisConfig& cfg) {
  WeightFunction w = [&] {
    if (cfg.power_alpha > 0.0) return WeightFunction::power(cfg.power_alpha);
    if (!cfg.input.empty()) {
      std::ifstream is(cfg.input);
      if (!is)
        throw std::runtime_error("cannot open for reading: " + cfg.input);
      return read_weight_csv(is);
    }
    if (cfg.family.empty())
      throw std::invalid_argument("need --power, --family, or --input");
    return WeightFunction::associated(
        WeightSequence::from_family(parse_family(cfg.family), cfg.J));
  }();
  if (cfg.conds.empty()) throw std::invalid_argument("need --cond");
  const FunctionGrid grid = make_grid(cfg);

  Report rep;
  rep.inputs = json{{"command", "function check"},
                    {"function", w.label()},
                    {"J", cfg.J},
                    {"conditions", cfg.conds},
                    {"grid", cfg.grid}};
  for (const std::string& name : cfg.conds)
    rep.verdicts.push_back(to_report(check_function_condition(
        w, function_condition_from_string(name), grid)));

  if (!cfg.dump.empty()) {
    std::ostringstream os;
    if (w.form() == WeightFunction::Form::tabulated) {
      write_weight_csv(os, w);
    } else {
      std::vector<double> ts;
      const double lo = std::log(grid.t_min), hi = std::log(grid.t_max);
      for (std::size_t i = 0; i < grid.points; ++i)
        ts.push_back(std::exp(lo + (hi - lo) * double(i) /
                                       double(grid.points - 1)));
      write_weight_csv(os, w, ts);
    }
    write_text_file(cfg.dump, os.str());
    rep.artifacts.push_back(cfg.dump);
  }
  return finish(cfg, std::move(rep));
}

// ---------------------------------------------------------------------------
// matrix example / matrix check

int cmd_matrix(const AnalysisConfig& cfg, bool example) {
  const WeightMatrix mx = [&] {
    if (example) {
      if (cfg.lambdas.empty()) throw std::invalid_argument("need --lambdas");
      return build_example_matrix(cfg.lambdas, cfg.J);
    }
    if (cfg.input.empty()) throw std::invalid_argument("need --input");
    return matrix_from_json(json::parse(read_text_file(cfg.input)));
  }();
  if (cfg.conds.empty()) throw std::invalid_argument("need --cond");

  std::vector<double> lambdas;
  for (const MatrixRow& row : mx.rows()) lambdas.push_back(row.lambda);

  Report rep;
  rep.inputs = json{{"command", example ? "matrix example" : "matrix check"},
                    {"lambdas", lambdas},
                    {"input", cfg.input},
                    {"J", mx.order()},
                    {"conditions", cfg.conds}};
  for (const std::string& name : cfg.conds)
    rep.verdicts.push_back(to_report(
        check_matrix_condition(mx, matrix_condition_from_string(name))));

  if (!cfg.dump.empty()) {
    write_text_file(cfg.dump, matrix_to_json(mx).dump(2) + "\n");
    rep.artifacts.push_back(cfg.dump);
  }
  return finish(cfg, std::move(rep));
}

// ---------------------------------------------------------------------------
// series product / series membership

int cmd_series_product(const AnalysisConfig& cfg) {
  if (cfg.left.empty() || cfg.right.empty() || cfg.out_csv.empty())
    throw std::invalid_argument("need --left, --right, and --out");
  const PowerSeries f = load_series(cfg.left);
  const PowerSeries g = load_series(cfg.right);
  const PowerSeries h = cfg.variant == "cauchy"    ? cauchy_product(f, g)
                        : cfg.variant == "hadamard" ? hadamard_product(f, g)
                        : throw std::invalid_argument(
                              "--variant takes 'cauchy' or 'hadamard'");
  std::ostringstream os;
  write_series_csv(os, h);
  write_text_file(cfg.out_csv, os.str());

  Report rep;
  rep.inputs = json{{"command", "series product"},
                    {"variant", cfg.variant},
                    {"left", cfg.left},
                    {"right", cfg.right},
                    {"J", h.order()}};
  rep.artifacts.push_back(cfg.out_csv);
  return finish(cfg, std::move(rep));
}

int cmd_series_membership(const AnalysisConfig& cfg) {
  if (cfg.input.empty()) throw std::invalid_argument("need --input");
  const PowerSeries f = load_series(cfg.input);

  MembershipReport m;
  json cls;
  if (!cfg.lambdas.empty()) {
    m = classify_membership(f, build_example_matrix(cfg.lambdas, f.order()));
    cls = json{{"lambdas", cfg.lambdas}};
  } else if (!cfg.family.empty()) {
    m = classify_membership(
        f, WeightSequence::from_family(parse_family(cfg.family), f.order()));
    cls = json{{"family", cfg.family}};
  } else {
    throw std::invalid_argument("need --family or --lambdas");
  }

  Report rep;
  rep.inputs = json{{"command", "series membership"},
                    {"input", cfg.input},
                    {"class", cls},
                    {"J", f.order()}};
  ReportVerdict roumieu;
  roumieu.condition = "membership-roumieu";
  roumieu.verdict = m.roumieu;
  {
    json cert = json::object();
    if (m.log_h) cert["log_h"] = *m.log_h;
    if (m.lambda) cert["lambda"] = *m.lambda;
    roumieu.certificate = cert.empty() ? json() : cert;
  }
  roumieu.evidence_summary = m.note;
  rep.verdicts.push_back(std::move(roumieu));

  ReportVerdict beurling;
  beurling.condition = "membership-beurling";
  beurling.verdict = m.beurling;
  rep.verdicts.push_back(std::move(beurling));
  return finish(cfg, std::move(rep));
}

// ---------------------------------------------------------------------------
// witness build

AlgebraElement parse_element(const std::string& spec) {
  std::vector<Monomial> monomials;
  std::istringstream groups(spec);
  std::string group;
  while (std::getline(groups, group, ';')) {
    const auto fields = detail::split_csv(group);
    if (fields.size() < 3)
      throw std::invalid_argument(
          "--element monomials need re,im,e1[,e2,...]");
    Monomial m;
    m.coefficient = {detail::parse_double(fields[0], 1),
                     detail::parse_double(fields[1], 1)};
    for (std::size_t i = 2; i < fields.size(); ++i) {
      const double e = detail::parse_double(fields[i], 1);
      if (e < 0 || e != std::floor(e))
        throw std::invalid_argument("--element exponents must be integers >= 0");
      m.exponents.push_back(unsigned(e));
    }
    monomials.push_back(std::move(m));
  }
  return AlgebraElement(std::move(monomials));
}

GapSearchOptions parse_thresholds(const std::string& spec) {
  GapSearchOptions opt;
  if (spec == "none" || spec.empty()) {
    opt.thresholds = std::vector<double>{};  // disabled: recurrence-only gaps
  } else if (spec == "default") {
    opt.thresholds = std::nullopt;  // T_p = p
  } else {
    std::vector<double> values;
    for (std::string_view field : detail::split_csv(spec))
      values.push_back(detail::parse_double(field, 1));
    opt.thresholds = std::move(values);
  }
  return opt;
}

int cmd_witness_build(const AnalysisConfig& cfg) {
  const bool matrix_variant = !cfg.lambdas.empty();
  if (!matrix_variant && cfg.family.empty())
    throw std::invalid_argument("need --family or --lambdas");
  const GapVariant variant = cfg.variant == "cauchy" ? GapVariant::cauchy
                             : cfg.variant == "hadamard"
                                 ? GapVariant::hadamard
                                 : throw std::invalid_argument(
                                       "--variant takes 'cauchy' or 'hadamard'");

  const SummationWeightOracle oracle = parse_oracle(cfg.oracle);
  const GapSearchOptions search = parse_thresholds(cfg.thresholds);
  if (cfg.interval.size() != 2)
    throw std::invalid_argument("--interval needs A,B");

  std::optional<WeightSequence> N;
  std::optional<WeightMatrix> mx;
  if (matrix_variant)
    mx.emplace(build_example_matrix(cfg.lambdas, cfg.J));
  else
    N.emplace(WeightSequence::from_family(parse_family(cfg.family), cfg.J));

  const GapSequence gap =
      matrix_variant ? build_gap_sequence(*mx, cfg.steps, variant, oracle, search)
                     : build_gap_sequence(*N, cfg.steps, variant, oracle, search);
  const ExponentBasis basis = build_exponent_basis(
      cfg.basis_count, cfg.interval[0], cfg.interval[1], cfg.degree);
  const double b = basis.values.front();

  std::optional<AlgebraElement> element;
  PowerSeries series = matrix_variant ? build_witness(b, gap, *mx)
                                      : build_witness(b, gap, *N);
  if (!cfg.element.empty()) {
    element = parse_element(cfg.element);
    const ElementExpansion expansion =
        matrix_variant
            ? algebra_element_coefficients(*element, basis, gap, *mx,
                                           ExpansionMethod::closed_form)
            : algebra_element_coefficients(*element, basis, gap, *N,
                                           ExpansionMethod::closed_form);
    series = expansion.series;
  }

  const WeightSequence& context = matrix_variant ? mx->row(0).sequence : *N;
  const DivergenceReport diag =
      divergence_diagnostic(series, context, oracle, cfg.a_list, gap);

  {
    std::ostringstream os;
    write_series_csv(os, series);
    write_text_file(cfg.coeffs_path, os.str());
  }
  WitnessBundle bundle;
  bundle.basis = basis;
  bundle.gap = gap;
  bundle.element = element;
  bundle.coefficients_ref = cfg.coeffs_path;
  bundle.diagnostics = diag;
  write_text_file(cfg.bundle_path,
                  witness_bundle_to_json(bundle).dump(2) + "\n");

  Report rep;
  rep.inputs = json{{"command", "witness build"},
                    {"family", cfg.family},
                    {"lambdas", cfg.lambdas},
                    {"J", cfg.J},
                    {"variant", cfg.variant},
                    {"steps", cfg.steps},
                    {"thresholds", cfg.thresholds},
                    {"basis_count", cfg.basis_count},
                    {"interval", cfg.interval},
                    {"degree", cfg.degree},
                    {"element", cfg.element},
                    {"a_list", cfg.a_list},
                    {"oracle", cfg.oracle}};

  ReportVerdict independence;
  independence.condition = "basis-independence";
  independence.verdict = Verdict::holds;  // construction certifies or throws
  independence.certificate = json{{"min_gap", basis.min_gap},
                                  {"degree", basis.degree},
                                  {"count", basis.values.size()}};
  {
    std::ostringstream os;
    os << "combination values pairwise distinct up to degree " << basis.degree;
    independence.evidence_summary = os.str();
  }
  rep.verdicts.push_back(std::move(independence));

  ReportVerdict admissible;
  admissible.condition = "gap-admissible";
  admissible.verdict = Verdict::holds;  // the search throws otherwise
  admissible.certificate = json{{"variant", std::string(to_string(variant))},
                                {"k", gap.indices()}};
  {
    std::ostringstream os;
    os << "growth and recurrence checks passed for p <= " << gap.steps();
    admissible.evidence_summary = os.str();
  }
  rep.verdicts.push_back(std::move(admissible));

  for (const DivergencePoint& pt : diag.points) {
    ReportVerdict v;
    {
      std::ostringstream os;
      os << "divergence(a=" << pt.a << ")";
      v.condition = os.str();
    }
    v.verdict = pt.verdict;
    v.certificate = json{{"gain", pt.gain},
                         {"sums", pt.log_sums.size()}};
    std::ostringstream os;
    os << "log-gain " << pt.gain << " across the last three partial sums";
    if (!pt.note.empty()) os << "; " << pt.note;
    v.evidence_summary = os.str();
    rep.verdicts.push_back(std::move(v));
  }

  rep.artifacts = {cfg.coeffs_path, cfg.bundle_path};
  return finish(cfg, std::move(rep));
}

// ---------------------------------------------------------------------------
// Flag wiring.

int run_command(int argc, char** argv) {
  AnalysisConfig cfg;
  CLI::App app{"weight-structure calculus laboratory"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--output", cfg.output, "report JSON path");
    cmd->add_flag("--assert", cfg.assert_verdicts,
                  "exit 1 unless every verdict holds");
  };

  CLI::App* sequence = app.add_subcommand("sequence", "weight sequences");
  sequence->require_subcommand(1);
  CLI::App* seq_check = sequence->add_subcommand("check", "growth conditions");
  seq_check->add_option("--family", cfg.family, "kind or kind:param");
  seq_check->add_option("--input", cfg.input, "sequence CSV (j,logM)");
  seq_check->add_option("--J", cfg.J, "truncation");
  seq_check->add_option("--cond", cfg.conds, "conditions")->delimiter(',');
  seq_check->add_option("--C", cfg.stretch, "index stretch for mixed/root-square");
  seq_check->add_option("--C1", cfg.C1, "constant for root-square");
  seq_check->add_option("--dump", cfg.dump, "write the sequence CSV here");
  add_common(seq_check);

  CLI::App* function = app.add_subcommand("function", "weight functions");
  function->require_subcommand(1);
  CLI::App* fun_check = function->add_subcommand("check", "growth conditions");
  fun_check->add_option("--power", cfg.power_alpha, "raw power weight t^alpha");
  fun_check->add_option("--family", cfg.family,
                        "associated function of this family");
  fun_check->add_option("--input", cfg.input, "weight CSV (t,omega)");
  fun_check->add_option("--J", cfg.J, "truncation for associated functions");
  fun_check->add_option("--cond", cfg.conds, "conditions")->delimiter(',');
  fun_check->add_option("--grid", cfg.grid, "tmin,tmax,points")
      ->delimiter(',')
      ->expected(3);
  fun_check->add_option("--dump", cfg.dump, "write sampled CSV here");
  add_common(fun_check);

  CLI::App* matrix = app.add_subcommand("matrix", "weight matrices");
  matrix->require_subcommand(1);
  CLI::App* mx_example =
      matrix->add_subcommand("example", "the explicit quasianalytic family");
  mx_example->add_option("--lambdas", cfg.lambdas, "row indices")
      ->delimiter(',');
  mx_example->add_option("--J", cfg.J, "truncation");
  mx_example->add_option("--cond", cfg.conds, "conditions")->delimiter(',');
  mx_example->add_option("--dump", cfg.dump, "write the matrix JSON here");
  add_common(mx_example);
  CLI::App* mx_check = matrix->add_subcommand("check", "load and analyze");
  mx_check->add_option("--input", cfg.input, "matrix JSON");
  mx_check->add_option("--cond", cfg.conds, "conditions")->delimiter(',');
  mx_check->add_option("--dump", cfg.dump, "write the matrix JSON here");
  add_common(mx_check);

  CLI::App* series = app.add_subcommand("series", "weighted power series");
  series->require_subcommand(1);
  CLI::App* product = series->add_subcommand("product", "cauchy/hadamard");
  product->add_option("--variant", cfg.variant, "cauchy or hadamard");
  product->add_option("--left", cfg.left, "left factor CSV");
  product->add_option("--right", cfg.right, "right factor CSV");
  product->add_option("--out", cfg.out_csv, "product CSV path");
  add_common(product);
  CLI::App* membership =
      series->add_subcommand("membership", "class membership");
  membership->add_option("--input", cfg.input, "series CSV");
  membership->add_option("--family", cfg.family, "kind or kind:param");
  membership->add_option("--lambdas", cfg.lambdas, "matrix row indices")
      ->delimiter(',');
  add_common(membership);

  CLI::App* witness = app.add_subcommand("witness", "algebrability witnesses");
  witness->require_subcommand(1);
  CLI::App* build = witness->add_subcommand("build", "gap series + diagnostics");
  build->add_option("--family", cfg.family, "kind or kind:param");
  build->add_option("--lambdas", cfg.lambdas, "matrix row indices")
      ->delimiter(',');
  build->add_option("--J", cfg.J, "truncation");
  build->add_option("--variant", cfg.variant, "cauchy or hadamard");
  build->add_option("--steps", cfg.steps, "gap steps P");
  build->add_option("--thresholds", cfg.thresholds,
                    "'none', 'default' (T_p = p), or t1,t2,...");
  build->add_option("--basis-count", cfg.basis_count, "exponent count");
  build->add_option("--interval", cfg.interval, "exponent interval A,B")
      ->delimiter(',')
      ->expected(2);
  build->add_option("--degree", cfg.degree, "certified combination degree");
  build->add_option("--element", cfg.element,
                    "monomials re,im,e1[,e2...] joined by ';'");
  build->add_option("--a-list", cfg.a_list, "evaluation points, decreasing")
      ->delimiter(',');
  build->add_option("--oracle", cfg.oracle, "trivial or file:<path>");
  build->add_option("--bundle", cfg.bundle_path, "witness bundle JSON path");
  build->add_option("--coeffs", cfg.coeffs_path, "coefficient CSV path");
  add_common(build);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_bad_input;
  }

  try {
    if (seq_check->parsed()) return cmd_sequence_check(cfg);
    if (fun_check->parsed()) return cmd_function_check(cfg);
    if (mx_example->parsed()) return cmd_matrix(cfg, true);
    if (mx_check->parsed()) return cmd_matrix(cfg, false);
    if (product->parsed()) return cmd_series_product(cfg);
    if (membership->parsed()) return cmd_series_membership(cfg);
    if (build->parsed()) return cmd_witness_build(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_input;
  }
  std::cerr << "error: no subcommand\n";
  return exit_bad_input;
}

}  // namespace

int main(int argc, char** argv) { return run_command(argc, argv); }
