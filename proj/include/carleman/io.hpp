#pragma once

// Serialization: CSV for bulk numeric tables, JSON for structured
// objects and analysis reports.  Log-domain quantities are stored
// as-is, so series, sequences, and matrices round-trip bit-exactly;
// emitters are deterministic (identical inputs give identical bytes,
// no timestamps).

#include <carleman/matrix.hpp>
#include <carleman/sequence.hpp>
#include <carleman/series.hpp>
#include <carleman/trend.hpp>
#include <carleman/version.hpp>
#include <carleman/weight_function.hpp>
#include <carleman/witness.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace carleman {

using json = nlohmann::ordered_json;

namespace detail {

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view field, std::size_t line) {
  // std::from_chars does not accept "inf"; the zero coefficient rows
  // need it.
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    std::ostringstream os;
    os << "csv: malformed number '" << field << "' on line " << line;
    throw std::invalid_argument(os.str());
  }
  return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Reads non-empty lines, strips trailing '\r', checks the header.
inline std::vector<std::string> read_csv_lines(std::istream& is,
                                               std::string_view header,
                                               std::string_view what) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back(line);
  }
  if (lines.empty() || lines.front() != header) {
    std::ostringstream os;
    os << what << ": expected header '" << header << "'";
    throw std::invalid_argument(os.str());
  }
  lines.erase(lines.begin());
  return lines;
}

inline void expect_fields(const std::vector<std::string_view>& fields,
                          std::size_t n, std::size_t line,
                          std::string_view what) {
  if (fields.size() != n) {
    std::ostringstream os;
    os << what << ": expected " << n << " fields on line " << line;
    throw std::invalid_argument(os.str());
  }
}

inline void expect_index(double parsed, std::size_t expected, std::size_t line,
                         std::string_view what) {
  if (parsed != double(expected)) {
    std::ostringstream os;
    os << what << ": expected index " << expected << " on line " << line;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV: power series, columns (j, phase_re, phase_im, logmag).

inline void write_series_csv(std::ostream& os, const PowerSeries& f) {
  os << "j,phase_re,phase_im,logmag\n";
  for (std::size_t j = 0; j <= f.order(); ++j) {
    const Coefficient& c = f[j];
    os << j << ',' << detail::format_double(c.phase.real()) << ','
       << detail::format_double(c.phase.imag()) << ','
       << detail::format_double(c.log_mag) << '\n';
  }
}

inline PowerSeries read_series_csv(std::istream& is) {
  const auto lines =
      detail::read_csv_lines(is, "j,phase_re,phase_im,logmag", "series csv");
  if (lines.empty())
    throw std::invalid_argument("series csv: no coefficient rows");
  std::vector<Coefficient> c(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = detail::split_csv(lines[i]);
    detail::expect_fields(fields, 4, i + 2, "series csv");
    detail::expect_index(detail::parse_double(fields[0], i + 2), i, i + 2,
                         "series csv");
    const double re = detail::parse_double(fields[1], i + 2);
    const double im = detail::parse_double(fields[2], i + 2);
    const double lm = detail::parse_double(fields[3], i + 2);
    if (lm != neg_infinity) c[i] = Coefficient::from_log(lm, {re, im});
  }
  return PowerSeries(std::move(c));
}

// ---------------------------------------------------------------------------
// CSV: weight sequences, columns (j, logM).  Reloads as a custom family.

inline void write_sequence_csv(std::ostream& os, const WeightSequence& M) {
  os << "j,logM\n";
  for (std::size_t j = 0; j <= M.order(); ++j)
    os << j << ',' << detail::format_double(M.log_M(j)) << '\n';
}

inline WeightSequence read_sequence_csv(std::istream& is) {
  const auto lines = detail::read_csv_lines(is, "j,logM", "sequence csv");
  std::vector<double> logM(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = detail::split_csv(lines[i]);
    detail::expect_fields(fields, 2, i + 2, "sequence csv");
    detail::expect_index(detail::parse_double(fields[0], i + 2), i, i + 2,
                         "sequence csv");
    logM[i] = detail::parse_double(fields[1], i + 2);
  }
  return WeightSequence::custom(std::move(logM));
}

// ---------------------------------------------------------------------------
// CSV: weight functions, columns (t, omega).  The linear-t schema costs
// one log/exp per round trip, so reloaded grids can drift by ulps; all
// log-domain formats above round-trip exactly.

inline void write_weight_csv(std::ostream& os, const WeightFunction& w,
                             std::span<const double> t_grid) {
  os << "t,omega\n";
  for (double t : t_grid) {
    if (!(t > 0.0))
      throw std::invalid_argument("weight csv: grid points must be positive");
    os << detail::format_double(t) << ','
       << detail::format_double(w(t)) << '\n';
  }
}

// Tabulated functions dump their own samples.
inline void write_weight_csv(std::ostream& os, const WeightFunction& w) {
  if (w.form() != WeightFunction::Form::tabulated)
    throw std::invalid_argument(
        "weight csv: sampling grid required for non-tabulated functions");
  os << "t,omega\n";
  for (std::size_t i = 0; i < w.tabulated_log_t().size(); ++i)
    os << detail::format_double(std::exp(w.tabulated_log_t()[i])) << ','
       << detail::format_double(w.tabulated_values()[i]) << '\n';
}

inline WeightFunction read_weight_csv(std::istream& is) {
  const auto lines = detail::read_csv_lines(is, "t,omega", "weight csv");
  std::vector<double> log_t(lines.size()), values(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = detail::split_csv(lines[i]);
    detail::expect_fields(fields, 2, i + 2, "weight csv");
    const double t = detail::parse_double(fields[0], i + 2);
    if (!(t > 0.0))
      throw std::invalid_argument("weight csv: t must be positive");
    log_t[i] = std::log(t);
    values[i] = detail::parse_double(fields[1], i + 2);
  }
  return WeightFunction::tabulated(std::move(log_t), std::move(values));
}

// ---------------------------------------------------------------------------
// JSON: weight matrices, {lambdas, J, rows}.  Generators are runtime
// closures and are not serialized.

inline json matrix_to_json(const WeightMatrix& mx) {
  json out;
  json lambdas = json::array();
  json rows = json::array();
  for (const MatrixRow& row : mx.rows()) {
    lambdas.push_back(row.lambda);
    rows.push_back(row.sequence.log_M());
  }
  out["lambdas"] = std::move(lambdas);
  out["J"] = mx.order();
  out["rows"] = std::move(rows);
  return out;
}

inline WeightMatrix matrix_from_json(const json& j) {
  if (!j.contains("lambdas") || !j.contains("J") || !j.contains("rows"))
    throw std::invalid_argument("matrix json: need lambdas, J, rows");
  const auto& lambdas = j.at("lambdas");
  const auto& rows = j.at("rows");
  if (!lambdas.is_array() || !rows.is_array() ||
      lambdas.size() != rows.size() || lambdas.empty())
    throw std::invalid_argument("matrix json: lambdas and rows must align");
  const std::size_t J = j.at("J").get<std::size_t>();
  std::vector<MatrixRow> built;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto logM = rows[i].get<std::vector<double>>();
    if (logM.size() != J + 1)
      throw std::invalid_argument("matrix json: row length must be J + 1");
    built.push_back(
        {lambdas[i].get<double>(), WeightSequence::custom(std::move(logM))});
  }
  return WeightMatrix(std::move(built));
}

// ---------------------------------------------------------------------------
// JSON: analysis reports.

struct ReportVerdict {
  std::string condition;
  Verdict verdict = Verdict::inconclusive;
  json certificate;  // structured payload, may be null
  std::string evidence_summary;
};

struct Report {
  json inputs;  // echo of what was analyzed
  std::vector<ReportVerdict> verdicts;
  std::vector<std::string> artifacts;  // paths written alongside
};

inline json report_to_json(const Report& rep) {
  json out;
  out["tool_version"] = std::string(tool_version);
  out["inputs"] = rep.inputs.is_null() ? json::object() : rep.inputs;
  json verdicts = json::array();
  for (const ReportVerdict& v : rep.verdicts) {
    json rec;
    rec["condition"] = v.condition;
    rec["verdict"] = std::string(to_string(v.verdict));
    rec["holds"] = v.verdict == Verdict::holds;
    rec["certificate"] = v.certificate;
    rec["evidence_summary"] = v.evidence_summary;
    verdicts.push_back(std::move(rec));
  }
  out["verdicts"] = std::move(verdicts);
  out["artifacts"] = rep.artifacts;
  return out;
}

// True when every verdict holds; the CLI's --assert gate.
inline bool report_all_hold(const Report& rep) {
  for (const ReportVerdict& v : rep.verdicts)
    if (v.verdict != Verdict::holds) return false;
  return true;
}

inline Verdict verdict_from_string(std::string_view s) {
  if (s == "holds") return Verdict::holds;
  if (s == "fails") return Verdict::fails;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw std::invalid_argument("unknown verdict: " + std::string(s));
}

// ---------------------------------------------------------------------------
// JSON: witness bundles {basis, gap, element, coefficients_ref,
// diagnostics}.  Exact-zero magnitudes (log -inf, in the sums and the
// corrections) are stored as null, as is a non-finite gain.

struct WitnessBundle {
  ExponentBasis basis;
  GapSequence gap = GapSequence::from_indices({1}, GapVariant::cauchy);
  std::optional<AlgebraElement> element;
  std::string coefficients_ref;  // path of the coefficient CSV dump
  std::optional<DivergenceReport> diagnostics;
};

namespace detail {

inline json log_or_null(double v) {
  if (v == neg_infinity) return nullptr;
  return v;
}

inline double log_from_json(const json& j) {
  return j.is_null() ? neg_infinity : j.get<double>();
}

}  // namespace detail

inline json witness_bundle_to_json(const WitnessBundle& b) {
  json out;
  json basis;
  basis["values"] = b.basis.values;
  basis["provenance"] = b.basis.provenance;
  basis["lower"] = b.basis.lower;
  basis["upper"] = b.basis.upper;
  basis["degree"] = b.basis.degree;
  basis["min_gap"] = b.basis.min_gap;
  out["basis"] = std::move(basis);

  json gap;
  gap["variant"] = std::string(to_string(b.gap.variant()));
  gap["k"] = b.gap.indices();
  out["gap"] = std::move(gap);

  if (b.element) {
    json monomials = json::array();
    for (const Monomial& m : b.element->monomials()) {
      json rec;
      rec["re"] = m.coefficient.real();
      rec["im"] = m.coefficient.imag();
      rec["exponents"] = m.exponents;
      monomials.push_back(std::move(rec));
    }
    out["element"] = json{{"monomials", std::move(monomials)}};
  } else {
    out["element"] = nullptr;
  }

  out["coefficients_ref"] = b.coefficients_ref;

  if (b.diagnostics) {
    json diag;
    diag["evaluated"] = b.diagnostics->evaluated;
    diag["note"] = b.diagnostics->note;
    json points = json::array();
    for (const DivergencePoint& pt : b.diagnostics->points) {
      json rec;
      rec["a"] = pt.a;
      json sums = json::array();
      for (double s : pt.log_sums) sums.push_back(detail::log_or_null(s));
      rec["log_sums"] = std::move(sums);
      json corrections = json::array();
      for (double c : pt.log_corrections)
        corrections.push_back(detail::log_or_null(c));
      rec["log_corrections"] = std::move(corrections);
      rec["verdict"] = std::string(to_string(pt.verdict));
      // JSON has no infinities; a null gain is recomputed from the sums
      // on reload.
      rec["gain"] = std::isfinite(pt.gain) ? json(pt.gain) : json(nullptr);
      rec["note"] = pt.note;
      points.push_back(std::move(rec));
    }
    diag["points"] = std::move(points);
    out["diagnostics"] = std::move(diag);
  } else {
    out["diagnostics"] = nullptr;
  }
  return out;
}

inline WitnessBundle witness_bundle_from_json(const json& j) {
  WitnessBundle b;
  const auto& basis = j.at("basis");
  b.basis.values = basis.at("values").get<std::vector<double>>();
  b.basis.provenance = basis.at("provenance").get<std::vector<std::string>>();
  b.basis.lower = basis.at("lower").get<double>();
  b.basis.upper = basis.at("upper").get<double>();
  b.basis.degree = basis.at("degree").get<std::size_t>();
  b.basis.min_gap = basis.at("min_gap").get<double>();

  const auto& gap = j.at("gap");
  const std::string variant = gap.at("variant").get<std::string>();
  if (variant != "cauchy" && variant != "hadamard")
    throw std::invalid_argument("witness bundle: unknown gap variant");
  b.gap = GapSequence::from_indices(
      gap.at("k").get<std::vector<std::size_t>>(),
      variant == "cauchy" ? GapVariant::cauchy : GapVariant::hadamard);

  if (j.contains("element") && !j.at("element").is_null()) {
    std::vector<Monomial> monomials;
    for (const auto& rec : j.at("element").at("monomials")) {
      Monomial m;
      m.coefficient = {rec.at("re").get<double>(), rec.at("im").get<double>()};
      m.exponents = rec.at("exponents").get<std::vector<unsigned>>();
      monomials.push_back(std::move(m));
    }
    b.element = AlgebraElement(std::move(monomials));
  }

  b.coefficients_ref = j.value("coefficients_ref", std::string{});

  if (j.contains("diagnostics") && !j.at("diagnostics").is_null()) {
    const auto& diag = j.at("diagnostics");
    DivergenceReport rep;
    rep.evaluated = diag.at("evaluated").get<std::vector<std::size_t>>();
    rep.note = diag.value("note", std::string{});
    for (const auto& rec : diag.at("points")) {
      DivergencePoint pt;
      pt.a = rec.at("a").get<double>();
      for (const auto& s : rec.at("log_sums"))
        pt.log_sums.push_back(detail::log_from_json(s));
      for (const auto& c : rec.at("log_corrections"))
        pt.log_corrections.push_back(detail::log_from_json(c));
      pt.verdict = verdict_from_string(rec.at("verdict").get<std::string>());
      if (const auto& gain = rec.at("gain"); gain.is_null()) {
        const auto& s = pt.log_sums;
        pt.gain = s.size() >= 3 ? s.back() - s[s.size() - 3] : 0.0;
      } else {
        pt.gain = gain.get<double>();
      }
      pt.note = rec.value("note", std::string{});
      rep.points.push_back(std::move(pt));
    }
    b.diagnostics = std::move(rep);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Family specs of the form "kind" or "kind:param", e.g. "gevrey:2".

inline FamilyDescriptor parse_family(std::string_view spec) {
  std::string_view kind = spec;
  std::optional<double> param;
  if (const auto colon = spec.find(':'); colon != std::string_view::npos) {
    kind = spec.substr(0, colon);
    const auto text = spec.substr(colon + 1);
    param = detail::parse_double(text, 1);
  }
  auto need = [&](FamilyKind k) {
    if (!param)
      throw std::invalid_argument("family spec: " + std::string(kind) +
                                  " needs a parameter, e.g. '" +
                                  std::string(kind) + ":2'");
    return FamilyDescriptor{k, *param};
  };
  if (kind == "factorial") {
    if (param)
      throw std::invalid_argument("family spec: factorial takes no parameter");
    return {FamilyKind::factorial, 0.0};
  }
  if (kind == "gevrey") return need(FamilyKind::gevrey);
  if (kind == "qgevrey") return need(FamilyKind::qgevrey);
  if (kind == "loglogrow") return need(FamilyKind::log_log_row);
  throw std::invalid_argument("family spec: unknown kind '" +
                              std::string(kind) + "'");
}

// ---------------------------------------------------------------------------
// File helpers.

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

}  // namespace carleman
