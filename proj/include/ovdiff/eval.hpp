#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ovdiff/alignment.hpp"
#include "ovdiff/crossref.hpp"
#include "ovdiff/engine.hpp"
#include "ovdiff/error.hpp"

namespace ovdiff {

struct Measures {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  friend bool operator==(const Measures&, const Measures&) = default;
};

/// Precision, recall and F1 per OV subset.
struct SubsetMeasures {
  Measures remain;
  Measures update;
  Measures add;
  Measures del;

  std::array<const Measures*, 4> all() const { return {&remain, &update, &add, &del}; }
  friend bool operator==(const SubsetMeasures&, const SubsetMeasures&) = default;
};

inline constexpr std::array<const char*, 4> kSubsetNames{"remain", "update", "add", "delete"};

/// Measures from raw counts. An empty system output has precision 1 only when
/// the reference is empty too; likewise for recall with an empty reference.
inline Measures measures_from_counts(std::size_t system, std::size_t reference, std::size_t correct) {
  Measures m;
  m.precision = system == 0 ? (reference == 0 ? 1.0 : 0.0) : static_cast<double>(correct) / static_cast<double>(system);
  m.recall = reference == 0 ? (system == 0 ? 1.0 : 0.0) : static_cast<double>(correct) / static_cast<double>(reference);
  m.f1 = m.precision + m.recall == 0 ? 0.0 : 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

template <class T>
Measures subset_measures(const std::set<T>& system, const std::set<T>& reference) {
  std::size_t correct = 0;
  for (const auto& x : system) correct += reference.count(x);
  return measures_from_counts(system.size(), reference.size(), correct);
}

/// Mapping sets are compared on (entity1, entity2); confidence is ignored.
inline Measures subset_measures(const Alignment& system, const Alignment& reference) {
  return subset_measures(system.pairs(), reference.pairs());
}

/// Either side of an evaluation: mapping pairs or bare entities.
using EvalSet = std::variant<std::set<IriPair>, std::set<Iri>>;

inline Measures subset_measures(const EvalSet& system, const EvalSet& reference) {
  if (system.index() != reference.index()) {
    throw KindMismatch("cannot compare a mapping set with an entity set");
  }
  return std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        return subset_measures(s, std::get<S>(reference));
      },
      system);
}

inline SubsetMeasures evaluate(const OvResult& result, const VersionRefs& refs) {
  return {subset_measures(result.remain, refs.remain), subset_measures(result.update, refs.update),
          subset_measures(result.add, refs.add), subset_measures(result.del, refs.del)};
}

struct ConservationReport {
  bool pass = false;
  std::size_t lhs = 0;  // N(O) + N(O')
  std::size_t rhs = 0;  // 2(|remain| + |update|) + |add| + |delete|
};

inline ConservationReport conservation_check(const OvResult& r, std::size_t n_o, std::size_t n_o_prime) {
  ConservationReport c;
  c.lhs = n_o + n_o_prime;
  c.rhs = 2 * (r.remain.size() + r.update.size()) + r.add.size() + r.del.size();
  c.pass = c.lhs == c.rhs;
  return c;
}

struct DeltaReport {
  bool pass = false;
  long matched = 0;  // (|remain1| + |update1|) - (|remain2| + |update2|)
  long added = 0;    // |add2| - |add1|
  long deleted = 0;  // |delete2| - |delete1|
};

/// Every match gained or lost between two runs over the same O, O' moves
/// exactly one entity out of (or into) each of add and delete.
inline DeltaReport delta_consistency(const OvResult& r1, const OvResult& r2) {
  auto n = [](std::size_t x) { return static_cast<long>(x); };
  DeltaReport d;
  d.matched = n(r1.matched()) - n(r2.matched());
  d.added = n(r2.add.size()) - n(r1.add.size());
  d.deleted = n(r2.del.size()) - n(r1.del.size());
  d.pass = d.matched == d.added && d.added == d.deleted;
  return d;
}

struct SweepPoint {
  double threshold = 0;
  OvResult result;
  std::optional<SubsetMeasures> measures;

  std::array<std::size_t, 4> cardinalities() const {
    return {result.remain.size(), result.update.size(), result.add.size(), result.del.size()};
  }
};

struct SweepSeries {
  std::vector<SweepPoint> points;
};

/// Runs the OV task at each threshold. Pair scores (and cross-reference
/// scopes) are computed once; only assignment is repeated per threshold.
template <PairScorer F>
SweepSeries sweep_entities(const EntitySet& o, const EntitySet& o_prime, const F& score, std::size_t top_k,
                           const std::vector<double>& thresholds, const VersionRefs* refs = nullptr,
                           const std::vector<CrossRefPair>* crs = nullptr,
                           CrossRefPolicy policy = CrossRefPolicy::Strict, ScoringStats* stats = nullptr,
                           std::size_t workers = 1) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0)) throw Error("thresholds must lie in [0, 1]");
    if (i && !(thresholds[i] > thresholds[i - 1])) throw Error("thresholds must be strictly ascending");
  }
  // Top-k selection ignores the threshold, so candidates can be shared.
  OvParams base{0.0, top_k};
  std::vector<ScoredPair> prior;
  std::vector<ScoredPair> candidates;
  if (crs && !crs->empty()) {
    CrScopes scopes = restrict_scope(o, o_prime, *crs, policy);
    prior = prior_pairs(scopes, o, o_prime);
    if (!scopes.scope1.empty() && !scopes.scope2.empty()) {
      prepare_scorer(score, o, o_prime);
      candidates = candidate_pairs(o, o_prime, score, base, posterior_scope(scopes), stats, workers);
    }
  } else {
    prepare_scorer(score, o, o_prime);
    candidates = candidate_pairs(o, o_prime, score, base, std::nullopt, stats, workers);
  }

  SweepSeries series;
  for (double s : thresholds) {
    OvParams params{s, top_k};
    auto matched = assign(prior, params);
    auto posterior = assign(candidates, params);
    matched.insert(matched.end(), posterior.begin(), posterior.end());
    SweepPoint p{s, classify(matched, o, o_prime, params), std::nullopt};
    if (refs) p.measures = evaluate(p.result, *refs);
    series.points.push_back(std::move(p));
  }
  return series;
}

template <PairScorer F>
SweepSeries sweep(const TripleSet& o_doc, const TripleSet& o_prime_doc, const F& score, std::size_t top_k,
                  const std::vector<double>& thresholds, const VersionRefs* refs = nullptr,
                  const std::vector<CrossRefPair>* crs = nullptr, CrossRefPolicy policy = CrossRefPolicy::Strict,
                  ScoringStats* stats = nullptr, std::size_t workers = 1) {
  return sweep_entities(extract_entities(o_doc), extract_entities(o_prime_doc), score, top_k, thresholds, refs, crs,
                        policy, stats, workers);
}

/// `count` evenly spaced thresholds from `from` to `to`, rounded to 1e-9 so
/// that e.g. 0.90..1.00 step 0.01 hits every grid value exactly.
inline std::vector<double> threshold_grid(double from, double to, double step) {
  if (!(step > 0)) throw Error("threshold step must be positive");
  std::vector<double> out;
  auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(std::round((from + static_cast<double>(i) * step) * 1e9) / 1e9);
  return out;
}

/// Normalized Gaussian kernel of radius ceil(4 sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0)) throw DomainError("sigma must be positive");
  auto radius = static_cast<long>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0;
  for (long j = -radius; j <= radius; ++j) {
    double w = std::exp(-0.5 * static_cast<double>(j * j) / (sigma * sigma));
    k[static_cast<std::size_t>(j + radius)] = w;
    sum += w;
  }
  for (auto& w : k) w /= sum;
  return k;
}

/// 1-D Gaussian filter with half-sample reflection at the edges
/// (d c b a | a b c d | d c b a).
inline std::vector<double> gaussian_smooth(const std::vector<double>& series, double sigma) {
  auto kernel = gaussian_kernel(sigma);
  if (series.empty()) return {};
  const long n = static_cast<long>(series.size());
  const long radius = static_cast<long>(kernel.size() / 2);
  auto reflect = [n](long i) {
    const long period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
  };
  std::vector<double> out(series.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0;
    for (long j = -radius; j <= radius; ++j) {
      acc += kernel[static_cast<std::size_t>(j + radius)] * series[static_cast<std::size_t>(reflect(i - j))];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

enum class ReportFormat { Csv, Json };

inline ReportFormat report_format_from_name(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw Error("unknown report format '" + std::string(name) + "'");
}

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Threshold, then precision/recall/F1 per subset (only when the series was
/// evaluated), then the four subset cardinalities. With `smooth_sigma`, each
/// measure column is Gaussian-smoothed along the threshold axis.
inline std::string emit_report(const SweepSeries& series, ReportFormat format,
                               std::optional<double> smooth_sigma = std::nullopt) {
  bool with_measures = !series.points.empty() && series.points.front().measures.has_value();
  for (const auto& p : series.points) with_measures = with_measures && p.measures.has_value();

  std::vector<std::string> measure_cols;
  std::vector<std::vector<double>> measure_vals;
  if (with_measures) {
    for (std::size_t s = 0; s < 4; ++s) {
      for (const char* m : {"precision", "recall", "f1"}) {
        measure_cols.push_back(std::string(kSubsetNames[s]) + "_" + m);
        std::vector<double> col;
        for (const auto& p : series.points) {
          const Measures& ms = *p.measures->all()[s];
          col.push_back(std::string_view(m) == "precision" ? ms.precision : std::string_view(m) == "recall" ? ms.recall : ms.f1);
        }
        if (smooth_sigma) col = gaussian_smooth(col, *smooth_sigma);
        measure_vals.push_back(std::move(col));
      }
    }
  }
  const std::array<const char*, 4> count_cols{"remain_count", "update_count", "add_count", "delete_count"};

  std::string out;
  if (format == ReportFormat::Csv) {
    out += "threshold";
    for (const auto& c : measure_cols) out += "," + c;
    for (const char* c : count_cols) out += std::string(",") + c;
    out += "\n";
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      const auto& p = series.points[i];
      out += fixed6(p.threshold);
      for (const auto& col : measure_vals) out += "," + fixed6(col[i]);
      for (std::size_t c : p.cardinalities()) out += "," + std::to_string(c);
      out += "\n";
    }
    return out;
  }
  out += "[";
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& p = series.points[i];
    out += i ? ",\n  {" : "\n  {";
    out += "\"threshold\": " + fixed6(p.threshold);
    for (std::size_t c = 0; c < measure_cols.size(); ++c) out += ", \"" + measure_cols[c] + "\": " + fixed6(measure_vals[c][i]);
    auto card = p.cardinalities();
    for (std::size_t c = 0; c < 4; ++c) out += std::string(", \"") + count_cols[c] + "\": " + std::to_string(card[c]);
    out += "}";
  }
  out += series.points.empty() ? "]\n" : "\n]\n";
  return out;
}

/// One row (or object) per subset.
inline std::string emit_report(const SubsetMeasures& m, ReportFormat format) {
  std::string out;
  auto all = m.all();
  if (format == ReportFormat::Csv) {
    out = "subset,precision,recall,f1\n";
    for (std::size_t s = 0; s < 4; ++s) {
      out += std::string(kSubsetNames[s]) + "," + fixed6(all[s]->precision) + "," + fixed6(all[s]->recall) + "," +
             fixed6(all[s]->f1) + "\n";
    }
    return out;
  }
  out = "{";
  for (std::size_t s = 0; s < 4; ++s) {
    out += s ? ",\n  \"" : "\n  \"";
    out += std::string(kSubsetNames[s]) + "\": {\"precision\": " + fixed6(all[s]->precision) +
           ", \"recall\": " + fixed6(all[s]->recall) + ", \"f1\": " + fixed6(all[s]->f1) + "}";
  }
  out += "\n}\n";
  return out;
}

}  // namespace ovdiff
